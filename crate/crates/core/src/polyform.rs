//! Truncated Taylor candidates over a graded multi-index basis.
//!
//! A candidate of dimension `n` and maximal degree `N` is
//!
//! ```text
//! L(x) = Σ p_k · Π (x_i − x̄_i)^{k_i},   1 ≤ |k| ≤ N
//! ```
//!
//! The constant monomial is never part of the basis, so `L(x̄) = 0` holds by
//! construction. Monomials are ordered by total degree, and within one degree
//! by descending lexicographic order of the exponent tuple, e.g. for `n = 2`:
//! `x1, x2, x1^2, x1*x2, x2^2, x1^3, ...`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynsys::{ParseError, ParseErrorKind};
use crate::error::{Error, Result};

/// Exponent tuple `(k_1, ..., k_n)` of a single monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// Total degree `Σ k_i`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Number of monomials with `1 ≤ degree ≤ max_degree` in `n` variables,
/// i.e. `C(n + N, N) − 1`.
pub fn basis_size(n: usize, max_degree: u32) -> usize {
    let n = n as u128;
    let big_n = max_degree as u128;
    let mut c: u128 = 1;
    // C(n+N, N) built incrementally; every partial product is itself a binomial.
    for i in 1..=big_n {
        c = c * (n + i) / i;
    }
    (c - 1) as usize
}

/// All multi-indices of total degree `1..=max_degree` in graded
/// (descending) lexicographic order.
pub fn enumerate_basis(n: usize, max_degree: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::invalid("dimension", "must be at least 1"));
    }
    if max_degree == 0 {
        return Err(Error::invalid("degree", "must be at least 1"));
    }
    let mut out = Vec::with_capacity(basis_size(n, max_degree));
    let mut scratch = vec![0u32; n];
    for m in 1..=max_degree {
        compositions(m, 0, &mut scratch, &mut out);
    }
    Ok(out)
}

fn compositions(remaining: u32, pos: usize, scratch: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex(scratch.to_vec()));
        return;
    }
    for k in (0..=remaining).rev() {
        scratch[pos] = k;
        compositions(remaining - k, pos + 1, scratch, out);
    }
}

#[inline]
fn ipow(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Value of the monomial `Π dx_i^{k_i}` at the shifted point `dx = x − x̄`.
#[inline]
pub(crate) fn monomial(exponents: &[u32], dx: &[f64]) -> f64 {
    let mut acc = 1.0;
    for (&k, &d) in exponents.iter().zip(dx) {
        acc *= ipow(d, k);
    }
    acc
}

/// `∂/∂x_var` of the monomial at `dx`, by the power rule.
#[inline]
pub(crate) fn monomial_partial(exponents: &[u32], dx: &[f64], var: usize) -> f64 {
    let k_var = exponents[var];
    if k_var == 0 {
        return 0.0;
    }
    let mut acc = k_var as f64;
    for (i, (&k, &d)) in exponents.iter().zip(dx).enumerate() {
        acc *= if i == var { ipow(d, k - 1) } else { ipow(d, k) };
    }
    acc
}

/// A potential Lyapunov function: coefficients over the canonical basis.
///
/// Immutable once built; the basis is shared between clones.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePolynomial {
    max_degree: u32,
    basis: Arc<[MultiIndex]>,
    coefficients: Vec<f64>,
    equilibrium: Vec<f64>,
}

impl CandidatePolynomial {
    pub fn new(max_degree: u32, coefficients: Vec<f64>, equilibrium: Vec<f64>) -> Result<Self> {
        let basis: Arc<[MultiIndex]> = enumerate_basis(equilibrium.len(), max_degree)?.into();
        Self::with_basis(basis, coefficients, equilibrium)
    }

    /// Builds a candidate over an already enumerated basis (avoids
    /// re-enumerating it for every genome).
    pub fn with_basis(
        basis: Arc<[MultiIndex]>,
        coefficients: Vec<f64>,
        equilibrium: Vec<f64>,
    ) -> Result<Self> {
        let n = equilibrium.len();
        let first = basis
            .first()
            .ok_or_else(|| Error::invalid("basis", "empty"))?;
        if first.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: first.dimension(),
                got: n,
            });
        }
        if coefficients.len() != basis.len() {
            return Err(Error::invalid(
                "coefficients",
                format!(
                    "expected {} values, got {}",
                    basis.len(),
                    coefficients.len()
                ),
            ));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "coefficients",
                format!("non-finite value {bad}"),
            ));
        }
        let max_degree = basis.last().map(MultiIndex::degree).unwrap_or(0);
        Ok(CandidatePolynomial {
            max_degree,
            basis,
            coefficients,
            equilibrium,
        })
    }

    pub fn zeros(n: usize, max_degree: u32) -> Result<Self> {
        let size = basis_size(n.max(1), max_degree.max(1));
        Self::new(max_degree, vec![0.0; size], vec![0.0; n])
    }

    pub fn dimension(&self) -> usize {
        self.equilibrium.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<[MultiIndex]> {
        Arc::clone(&self.basis)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn equilibrium(&self) -> &[f64] {
        &self.equilibrium
    }

    /// Same basis and equilibrium, new coefficients.
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Result<Self> {
        Self::with_basis(self.shared_basis(), coefficients, self.equilibrium.clone())
    }

    /// Coefficients multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        CandidatePolynomial {
            coefficients: self.coefficients.iter().map(|c| alpha * c).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn shift(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.equilibrium)
            .map(|(a, b)| a - b)
            .collect())
    }

    /// `L(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let dx = self.shift(x)?;
        Ok(self.evaluate_shifted(&dx))
    }

    pub(crate) fn evaluate_shifted(&self, dx: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (k, &p) in self.basis.iter().zip(&self.coefficients) {
            sum += p * monomial(k.exponents(), dx);
        }
        sum
    }

    /// `(∂L/∂x_1, ..., ∂L/∂x_n)` at `x`, differentiated term by term.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dx = self.shift(x)?;
        Ok(self.gradient_shifted(&dx))
    }

    pub(crate) fn gradient_shifted(&self, dx: &[f64]) -> Vec<f64> {
        (0..dx.len())
            .map(|var| {
                let mut sum = 0.0;
                for (k, &p) in self.basis.iter().zip(&self.coefficients) {
                    sum += p * monomial_partial(k.exponents(), dx, var);
                }
                sum
            })
            .collect()
    }

    /// Parses the textual form produced by [`Display`](fmt::Display), e.g.
    /// `8*x1^2 + 8*x1*x2 - x2^3`. Repeated monomials are summed. Variables
    /// denote shifted coordinates `x_i − x̄_i`.
    pub fn parse(text: &str, max_degree: u32, equilibrium: Vec<f64>) -> Result<Self> {
        let n = equilibrium.len();
        let basis: Arc<[MultiIndex]> = enumerate_basis(n, max_degree)?.into();
        let terms = PolyParser::new(text, n).parse()?;
        let mut coefficients = vec![0.0; basis.len()];
        for (offset, coeff, exps) in terms {
            let idx = exps.degree();
            if idx == 0 {
                if coeff != 0.0 {
                    return Err(ParseError::new(offset, ParseErrorKind::ConstantTerm).into());
                }
                continue;
            }
            if idx > max_degree {
                return Err(ParseError::new(
                    offset,
                    ParseErrorKind::DegreeTooHigh {
                        degree: idx,
                        max: max_degree,
                    },
                )
                .into());
            }
            let pos = basis
                .iter()
                .position(|k| *k == exps)
                .expect("every monomial of degree 1..=N is in the basis");
            coefficients[pos] += coeff;
        }
        Self::with_basis(basis, coefficients, equilibrium)
    }
}

impl fmt::Display for CandidatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &p) in self.basis.iter().zip(&self.coefficients) {
            if p == 0.0 {
                continue;
            }
            let magnitude = p.abs();
            match (first, p < 0.0) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let mut need_star = false;
            if magnitude != 1.0 {
                write!(f, "{magnitude}")?;
                need_star = true;
            }
            for (i, &e) in k.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if need_star {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                need_star = true;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    src: &'a str,
    pos: usize,
    dimension: usize,
}

type Term = (usize, f64, MultiIndex);

impl<'a> PolyParser<'a> {
    fn new(src: &'a str, dimension: usize) -> Self {
        PolyParser {
            src,
            pos: 0,
            dimension,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.pos, kind)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err(ParseErrorKind::UnexpectedEnd));
        }
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            terms.push(self.term(sign)?);
            self.skip_ws();
            sign = match self.peek() {
                None => break,
                Some('+') => 1.0,
                Some('-') => -1.0,
                Some(c) => return Err(self.err(ParseErrorKind::UnexpectedChar(c))),
            };
            self.pos += 1;
        }
        Ok(terms)
    }

    fn term(&mut self, sign: f64) -> Result<Term, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut exps = vec![0u32; self.dimension];
        let mut coeff = sign;
        let mut expect_factor = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                coeff *= self.number()?;
                self.eat('*')
            }
            _ => true,
        };
        while expect_factor {
            self.skip_ws();
            let (var, power) = self.var_power()?;
            exps[var] += power;
            expect_factor = self.eat('*');
        }
        Ok((start, coeff, MultiIndex(exps)))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let len = crate::dynsys::scan_number(&self.src[start..]);
        if len == 0 {
            return Err(self.err(ParseErrorKind::Expected("number")));
        }
        self.pos += len;
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, ParseErrorKind::InvalidNumber))
    }

    fn digits(&mut self) -> Option<u32> {
        let rest = &self.src[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        let v = rest[..len].parse().ok()?;
        self.pos += len;
        Some(v)
    }

    fn var_power(&mut self) -> Result<(usize, u32), ParseError> {
        let start = self.pos;
        if self.peek() != Some('x') {
            return match self.peek() {
                None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
                Some(_) => Err(self.err(ParseErrorKind::Expected("variable x<i>"))),
            };
        }
        self.pos += 1;
        let index = self
            .digits()
            .ok_or_else(|| self.err(ParseErrorKind::Expected("variable index")))?;
        if index == 0 || index as usize > self.dimension {
            return Err(ParseError::new(
                start,
                ParseErrorKind::VariableOutOfRange {
                    index: index as usize,
                    dimension: self.dimension,
                },
            ));
        }
        let mut power = 1;
        if self.eat('^') {
            self.skip_ws();
            power = self
                .digits()
                .ok_or_else(|| self.err(ParseErrorKind::Expected("integer exponent")))?;
        }
        Ok((index as usize - 1, power))
    }
}
