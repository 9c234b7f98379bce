//! Autonomous dynamics `ẋ = f(x)` given as parsed expressions.

mod expr;
mod parser;

pub use expr::{BinOp, EvalError, Expr, Func};
pub use parser::{parse_expr, ParseError, ParseErrorKind};

pub(crate) use parser::scan_number;

use crate::error::{Error, Result};

/// Largest `|f_i(x̄)|` accepted for a declared equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-9;

/// Names accepted by [`VectorField::builtin`].
pub const BUILTINS: [&str; 2] = ["pendulum", "planar"];

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    name: Option<String>,
    components: Vec<Expr>,
    sources: Vec<String>,
    equilibrium: Vec<f64>,
}

impl VectorField {
    /// Builds a field from component expressions and checks that the
    /// declared equilibrium really is one.
    pub fn new(components: Vec<Expr>, equilibrium: Vec<f64>) -> Result<Self> {
        let n = equilibrium.len();
        if n == 0 {
            return Err(Error::invalid("dimension", "must be at least 1"));
        }
        if components.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: components.len(),
            });
        }
        if let Some(idx) = components.iter().filter_map(Expr::max_var).max() {
            if idx >= n {
                return Err(Error::invalid(
                    "vector field",
                    format!("references x{} but the dimension is {n}", idx + 1),
                ));
            }
        }
        let sources = components.iter().map(Expr::to_string).collect();
        let vf = VectorField {
            name: None,
            components,
            sources,
            equilibrium,
        };
        let f_eq = vf.eval(&vf.equilibrium)?;
        let residual = f_eq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > EQUILIBRIUM_TOLERANCE {
            return Err(Error::NotEquilibrium {
                point: vf.equilibrium.clone(),
                residual,
            });
        }
        Ok(vf)
    }

    /// Parses each component from text (`x1..xn`).
    pub fn parse<S: AsRef<str>>(equations: &[S], equilibrium: Vec<f64>) -> Result<Self> {
        let n = equilibrium.len();
        if equations.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: equations.len(),
            });
        }
        let components = equations
            .iter()
            .map(|s| parse_expr(s.as_ref(), n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut vf = Self::new(components, equilibrium)?;
        vf.sources = equations.iter().map(|s| s.as_ref().to_string()).collect();
        Ok(vf)
    }

    /// The example systems: `pendulum` (damped, g/l = 1, b = 1) and
    /// `planar` (`ẋ = -x + xy`, `ẏ = -y`), both with equilibrium at the origin.
    pub fn builtin(name: &str) -> Result<Self> {
        let equations: [&str; 2] = match name {
            "pendulum" => ["x2", "-sin(x1) - x2"],
            "planar" => ["-x1 + x1*x2", "-x2"],
            other => return Err(Error::UnknownSystem(other.to_string())),
        };
        Self::parse(&equations, vec![0.0, 0.0]).map(|vf| vf.named(name))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.equilibrium.len()
    }

    pub fn equilibrium(&self) -> &[f64] {
        &self.equilibrium
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Component source text as given (or as printed, for trees built in code).
    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    /// `f(x)`; a failing component is reported with its index and the point.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        self.components
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.eval(x).map_err(|source| Error::FieldDomain {
                    component: i + 1,
                    point: x.to_vec(),
                    source,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(text: &str) -> f64 {
        parse_expr(text, 2).unwrap().eval(&[0.5, -1.5]).unwrap()
    }

    #[test]
    fn pendulum_component_parses() {
        let e = parse_expr("-sin(x1) - x2", 2).unwrap();
        let x = [0.3, 0.7];
        assert_eq!(e.eval(&x).unwrap(), -(0.3f64).sin() - 0.7);
        assert_eq!(parse_expr("x1", 1).unwrap(), Expr::Var(0));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval1("2^3^2"), 512.0);
        assert_eq!(eval1("-2^2"), -4.0);
        assert_eq!(eval1("2^-1"), 0.5);
        assert_eq!(eval1("1 - 2 - 3"), -4.0);
        assert_eq!(eval1("8 / 4 / 2"), 1.0);
        assert_eq!(eval1("2 + 3 * 4"), 14.0);
        assert_eq!(eval1("(2 + 3) * 4"), 20.0);
        assert_eq!(eval1("--3"), 3.0);
        assert_eq!(eval1("2 * -3"), -6.0);
        assert_eq!(eval1("1.5e1 + .5 + 2."), 17.5);
    }

    #[test]
    fn errors_report_offsets() {
        let cases: [(&str, usize, usize); 8] = [
            ("x3", 2, 0),
            ("x1 + foo(x2)", 2, 5),
            ("sin x1", 2, 4),
            ("(x1 + x2", 2, 8),
            ("x1 +", 2, 4),
            ("x1 ) ", 2, 3),
            ("x0", 2, 0),
            ("3 $ 4", 2, 2),
        ];
        for (text, n, offset) in cases {
            let err = parse_expr(text, n).unwrap_err();
            assert_eq!(err.offset, offset, "{text}: {err}");
        }
        assert!(matches!(
            parse_expr("y", 2).unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert_eq!(
            parse_expr("   ", 1).unwrap_err().kind,
            ParseErrorKind::UnexpectedEnd
        );
    }

    #[test]
    fn domain_errors() {
        let x = [-1.0, 0.0];
        for text in ["ln(x1)", "sqrt(x1)", "x1 ^ 0.5", "1 / x2", "exp(1000)"] {
            assert!(parse_expr(text, 2).unwrap().eval(&x).is_err(), "{text}");
        }
        assert_eq!(parse_expr("x1^3", 2).unwrap().eval(&x).unwrap(), -1.0);
    }

    #[test]
    fn builtin_fields() {
        let p = VectorField::builtin("pendulum").unwrap();
        assert_eq!(p.dimension(), 2);
        assert_eq!(p.eval(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(p.eval(&[1.0, 0.0]).unwrap(), vec![0.0, -(1.0f64).sin()]);
        let v = p.eval(&[std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
        assert_eq!(v[0], 0.0);
        assert!((v[1] + 1.0).abs() < 1e-15);

        let q = VectorField::builtin("planar").unwrap();
        assert_eq!(q.eval(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(q.eval(&[1.0, 0.5]).unwrap(), vec![-0.5, -0.5]);

        assert!(matches!(
            VectorField::builtin("lorenz"),
            Err(Error::UnknownSystem(_))
        ));
    }

    #[test]
    fn equilibrium_is_validated() {
        let err = VectorField::parse(&["x2", "-sin(x1) - x2"], vec![0.1, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NotEquilibrium { .. }));
        assert!(VectorField::parse(&["x1 - 1", "x2"], vec![1.0, 0.0]).is_ok());
        assert!(VectorField::parse(&["x1"], vec![0.0, 0.0]).is_err());
        assert!(VectorField::new(vec![Expr::Var(2), Expr::Var(0)], vec![0.0; 2]).is_err());
    }

    #[test]
    fn field_errors_name_component_and_point() {
        let vf = VectorField::parse(&["x1", "ln(1 + x1)"], vec![0.0, 0.0]).unwrap();
        match vf.eval(&[-2.0, 0.0]) {
            Err(Error::FieldDomain {
                component, point, ..
            }) => {
                assert_eq!(component, 2);
                assert_eq!(point, vec![-2.0, 0.0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
