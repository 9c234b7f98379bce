//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use lyapga::polyform::enumerate_basis;
use lyapga::{CandidatePolynomial, Expr, GridSpec, Region, VectorField};
use rand::Rng;

/// Degree-3 function reported for the damped pendulum on the unit box.
pub const PENDULUM_L: &str = "8*x1^2 + 8*x1*x2 + 9*x2^2 - x1^3 + 3*x1^2*x2 - x2^3";

pub fn pendulum() -> VectorField {
    VectorField::builtin("pendulum").unwrap()
}

pub fn planar() -> VectorField {
    VectorField::builtin("planar").unwrap()
}

/// Box with the given sides around the origin, `k` nodes per axis,
/// default exclusion.
pub fn origin_grid(sides: &[f64], k: usize) -> GridSpec {
    let region = Region::new(vec![0.0; sides.len()], sides.to_vec()).unwrap();
    GridSpec::uniform(region, k).unwrap()
}

pub fn pendulum_l() -> CandidatePolynomial {
    CandidatePolynomial::parse(PENDULUM_L, 3, vec![0.0, 0.0]).unwrap()
}

/// Linear field `ẋ = -x` in `n` dimensions.
pub fn contraction(n: usize) -> VectorField {
    let eqs: Vec<String> = (1..=n).map(|i| format!("-x{i}")).collect();
    VectorField::parse(&eqs, vec![0.0; n]).unwrap()
}

pub fn random_candidate<R: Rng>(
    rng: &mut R,
    n: usize,
    degree: u32,
    equilibrium: Vec<f64>,
) -> CandidatePolynomial {
    let len = enumerate_basis(n, degree).unwrap().len();
    let coeffs = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
    CandidatePolynomial::new(degree, coeffs, equilibrium).unwrap()
}

/// Small-integer coefficients, so that signs flip on the grid.
pub fn random_integer_candidate<R: Rng>(rng: &mut R, n: usize, degree: u32) -> CandidatePolynomial {
    let len = enumerate_basis(n, degree).unwrap().len();
    let coeffs = (0..len).map(|_| rng.gen_range(-2..=2) as f64).collect();
    CandidatePolynomial::new(degree, coeffs, vec![0.0; n]).unwrap()
}

/// Random expression tree of bounded depth over `x1..x{n}` using only
/// operations that print back unambiguously.
pub fn random_expr<R: Rng>(rng: &mut R, n: usize, depth: u32) -> Expr {
    use lyapga::dynsys::{BinOp, Func};
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            Expr::Var(rng.gen_range(0..n))
        } else {
            let v: f64 = rng.gen_range(-50.0..50.0);
            Expr::Num((v * 8.0).round() / 8.0)
        };
    }
    match rng.gen_range(0..3) {
        0 => Expr::Neg(Box::new(random_expr(rng, n, depth - 1))),
        1 => {
            let funcs = [
                Func::Sin,
                Func::Cos,
                Func::Tan,
                Func::Exp,
                Func::Ln,
                Func::Sqrt,
                Func::Abs,
            ];
            let f = funcs[rng.gen_range(0..funcs.len())];
            Expr::Call(f, Box::new(random_expr(rng, n, depth - 1)))
        }
        _ => {
            let ops = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow];
            let op = ops[rng.gen_range(0..ops.len())];
            Expr::Binary(
                op,
                Box::new(random_expr(rng, n, depth - 1)),
                Box::new(random_expr(rng, n, depth - 1)),
            )
        }
    }
}

pub struct ParseCase {
    pub text: &'static str,
    /// `Ok(value at CORPUS_POINT)` or `Err(byte offset)`.
    pub expect: Result<f64, usize>,
}

/// Point at which corpus expressions are evaluated (dimension 3).
pub const CORPUS_POINT: [f64; 3] = [0.5, -1.5, 2.0];

const fn ok(text: &'static str, v: f64) -> ParseCase {
    ParseCase {
        text,
        expect: Ok(v),
    }
}

const fn err(text: &'static str, offset: usize) -> ParseCase {
    ParseCase {
        text,
        expect: Err(offset),
    }
}

/// Expression grammar corpus over `x1..x3`.
pub fn parser_corpus() -> Vec<ParseCase> {
    vec![
        // literals and variables
        ok("0", 0.0),
        ok("42", 42.0),
        ok("3.25", 3.25),
        ok(".5", 0.5),
        ok("2.", 2.0),
        ok("1e3", 1000.0),
        ok("2.5E-1", 0.25),
        ok("1e+2", 100.0),
        ok("x1", 0.5),
        ok("x2", -1.5),
        ok("x3", 2.0),
        ok("  x1  ", 0.5),
        ok("\tx1\n+\nx3", 2.5),
        // additive / multiplicative precedence and left associativity
        ok("1 + 2 * 3", 7.0),
        ok("(1 + 2) * 3", 9.0),
        ok("10 - 4 - 3", 3.0),
        ok("10 - (4 - 3)", 9.0),
        ok("64 / 8 / 2", 4.0),
        ok("64 / (8 / 2)", 16.0),
        ok("2 * 3 / 4", 1.5),
        ok("x1 + x2 * x3", -2.5),
        ok("x1*x2 - x3/x3", -1.75),
        // power: right associative, above unary minus
        ok("2^3", 8.0),
        ok("2^3^2", 512.0),
        ok("(2^3)^2", 64.0),
        ok("-2^2", -4.0),
        ok("(-2)^2", 4.0),
        ok("2^-1", 0.5),
        ok("2^-1^2", 0.5),
        ok("x2^2", 2.25),
        ok("-x2^2", -2.25),
        ok("x3^x3", 4.0),
        ok("3 * 2^2", 12.0),
        ok("2^2 * 3", 12.0),
        // unary minus
        ok("-3", -3.0),
        ok("--3", 3.0),
        ok("---3", -3.0),
        ok("-(1 + 2)", -3.0),
        ok("4 * -x1", -2.0),
        ok("4 - -x1", 4.5),
        ok("-x1 * 4", -2.0),
        // functions
        ok("sin(0)", 0.0),
        ok("cos(0)", 1.0),
        ok("tan(0)", 0.0),
        ok("exp(0)", 1.0),
        ok("ln(1)", 0.0),
        ok("sqrt(16)", 4.0),
        ok("abs(x2)", 1.5),
        ok("sqrt(x3 * 8)", 4.0),
        ok("-sin(0) - x2", 1.5),
        ok("exp(ln(x3))", 2.0),
        ok("abs(-x1)^2", 0.25),
        ok("sin (0)", 0.0),
        ok("2*(3)", 6.0),
        // errors, with byte offsets
        err("", 0),
        err("   ", 3),
        err("1 +", 3),
        err("1 + * 2", 4),
        err("(1 + 2", 6),
        err("(1 + 2 x", 7),
        err("1 + 2)", 5),
        err("x4", 0),
        err("1 + x0", 4),
        err("y", 0),
        err("x1 + foo(1)", 5),
        err("sin x1", 4),
        err("sin(1", 5),
        err("2 $ 3", 2),
        err("3 4", 2),
        err(".", 0),
        err("2^", 2),
        err("ln()", 3),
        err("x1x2", 0),
        err("é", 0),
    ]
}
