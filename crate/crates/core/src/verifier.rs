//! Grid verification of Lyapunov conditions.
//!
//! A point `x ≠ x̄` of the grid is *satisfied* iff `L(x) > 0` and
//! `∇L(x)·f(x) < 0`; every other point is a violation. The cost is the
//! violated fraction `J = |Y| / (|X| + |Y|)`, so `J = 0` means every grid
//! point passes. Nothing is claimed about points between grid nodes.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynsys::VectorField;
use crate::error::{Error, Result};
use crate::polyform::{monomial, monomial_partial, CandidatePolynomial, MultiIndex};

/// Default number of violating points kept in serialized reports.
pub const DEFAULT_VIOLATION_CAP: usize = 100;

/// Default lattice resolution per axis.
pub const DEFAULT_POINTS_PER_AXIS: usize = 51;

/// Axis-aligned box `Π [c_i − a_i/2, c_i + a_i/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    center: Vec<f64>,
    side_lengths: Vec<f64>,
}

impl Region {
    pub fn new(center: Vec<f64>, side_lengths: Vec<f64>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("region", "dimension must be at least 1"));
        }
        if center.len() != side_lengths.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: side_lengths.len(),
            });
        }
        if let Some(a) = side_lengths.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::invalid(
                "region",
                format!("side lengths must be positive and finite, got {a}"),
            ));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("region", "center must be finite"));
        }
        Ok(Region {
            center,
            side_lengths,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn side_lengths(&self) -> &[f64] {
        &self.side_lengths
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    region: Region,
    points_per_axis: Vec<usize>,
    exclusion_radius: f64,
}

impl GridSpec {
    /// `exclusion_radius = None` selects half of the smallest grid step.
    pub fn new(
        region: Region,
        points_per_axis: Vec<usize>,
        exclusion_radius: Option<f64>,
    ) -> Result<Self> {
        if points_per_axis.len() != region.dimension() {
            return Err(Error::DimensionMismatch {
                expected: region.dimension(),
                got: points_per_axis.len(),
            });
        }
        if let Some(k) = points_per_axis.iter().find(|&&k| k < 3) {
            return Err(Error::invalid(
                "grid",
                format!("points per axis must be at least 3, got {k}"),
            ));
        }
        let min_step = region
            .side_lengths
            .iter()
            .zip(&points_per_axis)
            .map(|(a, &k)| a / (k - 1) as f64)
            .fold(f64::INFINITY, f64::min);
        let exclusion_radius = exclusion_radius.unwrap_or(min_step / 2.0);
        let min_side = region
            .side_lengths
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(exclusion_radius >= 0.0 && exclusion_radius < min_side / 2.0) {
            return Err(Error::invalid(
                "grid",
                format!(
                    "exclusion radius {exclusion_radius} must lie in [0, {})",
                    min_side / 2.0
                ),
            ));
        }
        Ok(GridSpec {
            region,
            points_per_axis,
            exclusion_radius,
        })
    }

    /// Same resolution on every axis, default exclusion.
    pub fn uniform(region: Region, points: usize) -> Result<Self> {
        let n = region.dimension();
        Self::new(region, vec![points; n], None)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn points_per_axis(&self) -> &[usize] {
        &self.points_per_axis
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    pub fn dimension(&self) -> usize {
        self.region.dimension()
    }
}

/// Lattice points in row-major order (last axis fastest), with points
/// strictly closer than `exclusion_radius` (∞-norm) to the center removed.
/// A zero radius keeps every node.
pub fn build_grid(spec: &GridSpec) -> Result<Vec<Vec<f64>>> {
    let region = &spec.region;
    let n = region.dimension();
    // Coordinates are c + a·(2j − (k−1)) / (2(k−1)): symmetric, and exactly
    // the center for the middle node of an odd count.
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let k = spec.points_per_axis[i];
            let denom = (2 * (k - 1)) as f64;
            (0..k)
                .map(|j| {
                    let t = (2 * j as i64 - (k as i64 - 1)) as f64 / denom;
                    region.center[i] + region.side_lengths[i] * t
                })
                .collect()
        })
        .collect();
    let total: usize = spec.points_per_axis.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let point: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect();
        let dist = point
            .iter()
            .zip(&region.center)
            .fold(0.0f64, |m, (x, c)| m.max((x - c).abs()));
        if dist >= spec.exclusion_radius {
            out.push(point);
        }
        for axis in (0..n).rev() {
            idx[axis] += 1;
            if idx[axis] < spec.points_per_axis[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(out)
}

fn check_dims(c: &CandidatePolynomial, vf: &VectorField) -> Result<()> {
    if c.dimension() != vf.dimension() {
        return Err(Error::DimensionMismatch {
            expected: vf.dimension(),
            got: c.dimension(),
        });
    }
    Ok(())
}

/// `L̇(x) = ∇L(x)·f(x)`.
pub fn lie_derivative(c: &CandidatePolynomial, vf: &VectorField, x: &[f64]) -> Result<f64> {
    check_dims(c, vf)?;
    let grad = c.gradient(x)?;
    let f = vf.eval(x)?;
    Ok(dot(&grad, &f))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += x * y;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    ViolatedPositivity,
    ViolatedDecrease,
}

impl Verdict {
    fn of(value: f64, derivative: f64) -> Verdict {
        if !(value > 0.0) {
            Verdict::ViolatedPositivity
        } else if !(derivative < 0.0) {
            Verdict::ViolatedDecrease
        } else {
            Verdict::Satisfied
        }
    }

    pub fn is_satisfied(self) -> bool {
        self == Verdict::Satisfied
    }
}

/// Checks both strict conditions at `x`; positivity is reported first.
pub fn classify_point(c: &CandidatePolynomial, vf: &VectorField, x: &[f64]) -> Result<Verdict> {
    let value = c.evaluate(x)?;
    let derivative = lie_derivative(c, vf, x)?;
    Ok(Verdict::of(value, derivative))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub value: f64,
    pub derivative: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub cost: f64,
    pub satisfied_count: usize,
    pub violated_count: usize,
    pub total_points: usize,
    /// Smallest `L` over the grid.
    pub min_value: f64,
    /// Largest `L̇` over the grid.
    pub max_derivative: f64,
    /// Violating points in grid order. May be truncated, see
    /// [`CostReport::truncated`]; `violated_count` is always the full count.
    pub violations: Vec<Violation>,
}

impl CostReport {
    pub fn is_certified(&self) -> bool {
        self.violated_count == 0
    }

    /// Copy with at most `cap` violations listed.
    pub fn truncated(&self, cap: usize) -> CostReport {
        let mut out = self.clone();
        out.violations.truncate(cap);
        out
    }
}

/// `J` over the grid of `spec`, with per-point detail.
pub fn cost(c: &CandidatePolynomial, vf: &VectorField, spec: &GridSpec) -> Result<CostReport> {
    check_dims(c, vf)?;
    GridEvaluator::new(vf, spec, c.shared_basis())?.report(c)
}

/// Grid, field values and monomial tables precomputed for one basis.
///
/// Both `L` and each `∂L/∂x_i` are linear in the coefficients, so once the
/// monomials and their partials are tabulated per point, scoring a genome
/// only needs dot products. The tables hold exactly the numbers the direct
/// route ([`classify_point`]) computes, accumulated in the same order, so
/// both routes agree bit for bit.
#[derive(Debug, Clone)]
pub struct GridEvaluator {
    dimension: usize,
    basis: Arc<[MultiIndex]>,
    equilibrium: Vec<f64>,
    points: Vec<Vec<f64>>,
    // per point: basis.len() monomial values
    values: Vec<f64>,
    // per point: dimension × basis.len() partials, variable-major
    partials: Vec<f64>,
    // per point: f(x)
    field: Vec<f64>,
}

const CHUNK: usize = 256;

impl GridEvaluator {
    pub fn new(vf: &VectorField, spec: &GridSpec, basis: Arc<[MultiIndex]>) -> Result<Self> {
        let n = vf.dimension();
        if spec.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: spec.dimension(),
            });
        }
        if basis.first().map(MultiIndex::dimension) != Some(n) {
            return Err(Error::invalid(
                "basis",
                "dimension does not match the system",
            ));
        }
        let points = build_grid(spec)?;
        let gamma = basis.len();
        let equilibrium = vf.equilibrium().to_vec();
        let mut values = Vec::with_capacity(points.len() * gamma);
        let mut partials = Vec::with_capacity(points.len() * gamma * n);
        let mut field = Vec::with_capacity(points.len() * n);
        for x in &points {
            let dx: Vec<f64> = x.iter().zip(&equilibrium).map(|(a, b)| a - b).collect();
            values.extend(basis.iter().map(|k| monomial(k.exponents(), &dx)));
            for var in 0..n {
                partials.extend(
                    basis
                        .iter()
                        .map(|k| monomial_partial(k.exponents(), &dx, var)),
                );
            }
            field.extend(vf.eval(x)?);
        }
        Ok(GridEvaluator {
            dimension: n,
            basis,
            equilibrium,
            points,
            values,
            partials,
            field,
        })
    }

    pub fn basis(&self) -> &Arc<[MultiIndex]> {
        &self.basis
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    fn value_at(&self, p: usize, coeffs: &[f64]) -> f64 {
        let gamma = coeffs.len();
        let row = &self.values[p * gamma..(p + 1) * gamma];
        dot(coeffs, row)
    }

    #[inline]
    fn derivative_at(&self, p: usize, coeffs: &[f64]) -> f64 {
        let gamma = coeffs.len();
        let n = self.dimension;
        let base = p * gamma * n;
        let mut sum = 0.0;
        for var in 0..n {
            let row = &self.partials[base + var * gamma..base + (var + 1) * gamma];
            sum += dot(coeffs, row) * self.field[p * n + var];
        }
        sum
    }

    /// Number of violating points.
    pub fn count_violations(&self, coeffs: &[f64]) -> usize {
        assert_eq!(coeffs.len(), self.basis.len(), "genome length");
        (0..self.points.len())
            .filter(|&p| {
                let value = self.value_at(p, coeffs);
                !(value > 0.0) || !(self.derivative_at(p, coeffs) < 0.0)
            })
            .count()
    }

    /// `J` for a raw coefficient vector in basis order.
    pub fn cost_of(&self, coeffs: &[f64]) -> f64 {
        self.count_violations(coeffs) as f64 / self.points.len() as f64
    }

    /// Full report; chunks are evaluated in parallel and merged in grid order.
    pub fn report(&self, c: &CandidatePolynomial) -> Result<CostReport> {
        if c.basis() != &*self.basis || c.equilibrium() != self.equilibrium.as_slice() {
            return Err(Error::invalid(
                "candidate",
                "basis or equilibrium differs from the evaluator's",
            ));
        }
        let coeffs = c.coefficients();
        struct Partial {
            satisfied: usize,
            min_value: f64,
            max_derivative: f64,
            violations: Vec<Violation>,
        }
        let chunks: Vec<Partial> = (0..self.points.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                let mut part = Partial {
                    satisfied: 0,
                    min_value: f64::INFINITY,
                    max_derivative: f64::NEG_INFINITY,
                    violations: Vec::new(),
                };
                for &p in idx {
                    let value = self.value_at(p, coeffs);
                    let derivative = self.derivative_at(p, coeffs);
                    part.min_value = part.min_value.min(value);
                    part.max_derivative = part.max_derivative.max(derivative);
                    match Verdict::of(value, derivative) {
                        Verdict::Satisfied => part.satisfied += 1,
                        verdict => part.violations.push(Violation {
                            point: self.points[p].clone(),
                            value,
                            derivative,
                            verdict,
                        }),
                    }
                }
                part
            })
            .collect();

        let mut report = CostReport {
            cost: 0.0,
            satisfied_count: 0,
            violated_count: 0,
            total_points: self.points.len(),
            min_value: f64::INFINITY,
            max_derivative: f64::NEG_INFINITY,
            violations: Vec::new(),
        };
        for part in chunks {
            report.satisfied_count += part.satisfied;
            report.min_value = report.min_value.min(part.min_value);
            report.max_derivative = report.max_derivative.max(part.max_derivative);
            report.violations.extend(part.violations);
        }
        report.violated_count = report.violations.len();
        report.cost = report.violated_count as f64 / report.total_points as f64;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::parse_expr;

    fn unit_box(side: f64) -> Region {
        Region::new(vec![0.0, 0.0], vec![side, side]).unwrap()
    }

    fn stable_linear() -> VectorField {
        VectorField::parse(&["-x1", "-x2"], vec![0.0, 0.0]).unwrap()
    }

    fn quadratic(sign: f64) -> CandidatePolynomial {
        CandidatePolynomial::new(2, vec![0.0, 0.0, sign, 0.0, sign], vec![0.0, 0.0]).unwrap()
    }

    fn quartic_pendulum_l() -> CandidatePolynomial {
        CandidatePolynomial::new(
            3,
            vec![0., 0., 8., 8., 9., -1., 3., 0., -1.],
            vec![0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn small_lattice() {
        let spec = GridSpec::new(unit_box(1.0), vec![3, 3], Some(0.0)).unwrap();
        let pts = build_grid(&spec).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-0.5, -0.5]);
        assert_eq!(pts[1], vec![-0.5, 0.0]);
        assert_eq!(pts[4], vec![0.0, 0.0]);
        assert_eq!(pts[8], vec![0.5, 0.5]);

        let spec = GridSpec::new(unit_box(1.0), vec![3, 3], Some(0.1)).unwrap();
        let pts = build_grid(&spec).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(!pts.contains(&vec![0.0, 0.0]));
    }

    #[test]
    fn one_dimensional_exclusion() {
        let region = Region::new(vec![0.0], vec![2.0]).unwrap();
        let spec = GridSpec::new(region, vec![5], Some(0.4)).unwrap();
        let pts: Vec<f64> = build_grid(&spec)
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        assert_eq!(pts, vec![-1.0, -0.5, 0.5, 1.0]);
    }

    #[test]
    fn default_grid_size() {
        let spec = GridSpec::uniform(unit_box(1.0), DEFAULT_POINTS_PER_AXIS).unwrap();
        assert_eq!(build_grid(&spec).unwrap().len(), 51 * 51 - 1);
        let spec = GridSpec::uniform(unit_box(1.0), 50).unwrap();
        // no node sits on the center; the four nearest are exactly half a step away
        assert_eq!(build_grid(&spec).unwrap().len(), 2500);
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(unit_box(1.0), vec![2, 3], None).is_err());
        assert!(GridSpec::new(unit_box(1.0), vec![3], None).is_err());
        assert!(GridSpec::new(unit_box(1.0), vec![3, 3], Some(0.5)).is_err());
        assert!(GridSpec::new(unit_box(1.0), vec![3, 3], Some(-1.0)).is_err());
        assert!(Region::new(vec![0.0], vec![0.0]).is_err());
        assert!(Region::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn lie_derivative_examples() {
        let pendulum = VectorField::builtin("pendulum").unwrap();
        let v = lie_derivative(&quartic_pendulum_l(), &pendulum, &[1.0, 0.0]).unwrap();
        assert!((v - 11.0 * -(1.0f64).sin()).abs() < 1e-12);
        assert!((v - -9.256_180_833_3).abs() < 1e-9);

        let v = lie_derivative(&quadratic(1.0), &stable_linear(), &[0.3, 0.4]).unwrap();
        assert!((v - -0.5).abs() < 1e-15);

        let planar = VectorField::builtin("planar").unwrap();
        let v = lie_derivative(&quadratic(1.0), &planar, &[1.0, 0.5]).unwrap();
        assert_eq!(v, -1.5);
    }

    #[test]
    fn classification_examples() {
        let pendulum = VectorField::builtin("pendulum").unwrap();
        assert_eq!(
            classify_point(&quartic_pendulum_l(), &pendulum, &[1.0, 0.0]).unwrap(),
            Verdict::Satisfied
        );
        assert_eq!(
            classify_point(&quadratic(-1.0), &pendulum, &[0.2, 0.1]).unwrap(),
            Verdict::ViolatedPositivity
        );
        let unstable = VectorField::parse(&["x1", "x2"], vec![0.0, 0.0]).unwrap();
        assert_eq!(
            classify_point(&quadratic(1.0), &unstable, &[1.0, 0.0]).unwrap(),
            Verdict::ViolatedDecrease
        );
    }

    #[test]
    fn zero_values_count_as_violations() {
        // L = x1^2 vanishes on the x2 axis.
        let c = CandidatePolynomial::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0], vec![0.0; 2]).unwrap();
        let spec = GridSpec::uniform(unit_box(1.0), 3).unwrap();
        let r = cost(&c, &stable_linear(), &spec).unwrap();
        assert_eq!(r.violated_count, 2);
        assert!(r
            .violations
            .iter()
            .all(|v| v.verdict == Verdict::ViolatedPositivity && v.point[0] == 0.0));
    }

    #[test]
    fn cost_examples() {
        let spec = GridSpec::uniform(unit_box(1.0), 51).unwrap();
        let r = cost(&quadratic(1.0), &stable_linear(), &spec).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.violations.is_empty());
        assert_eq!(r.satisfied_count, 2600);

        let r = cost(&quadratic(-1.0), &stable_linear(), &spec).unwrap();
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.violated_count, 2600);
        assert_eq!(r.truncated(DEFAULT_VIOLATION_CAP).violations.len(), 100);

        let pendulum = VectorField::builtin("pendulum").unwrap();
        let spec = GridSpec::uniform(unit_box(1.0), 101).unwrap();
        let r = cost(&quartic_pendulum_l(), &pendulum, &spec).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.min_value > 0.0 && r.max_derivative < 0.0);
    }

    #[test]
    fn corner_spot_check() {
        let pendulum = VectorField::builtin("pendulum").unwrap();
        let v = lie_derivative(&quartic_pendulum_l(), &pendulum, &[0.5, 0.5]).unwrap();
        let expected = 12.75 * 0.5 + 13.0 * (-(0.5f64).sin() - 0.5);
        assert!((v - expected).abs() < 1e-12);
        assert!(v < -6.3);
    }

    #[test]
    fn evaluator_rejects_mismatched_candidate() {
        let vf = stable_linear();
        let spec = GridSpec::uniform(unit_box(1.0), 5).unwrap();
        let ev = GridEvaluator::new(&vf, &spec, quadratic(1.0).shared_basis()).unwrap();
        assert!(ev.report(&quartic_pendulum_l()).is_err());
        let shifted =
            CandidatePolynomial::new(2, vec![0.0, 0.0, 1.0, 0.0, 1.0], vec![0.1, 0.0]).unwrap();
        assert!(ev.report(&shifted).is_err());
    }

    #[test]
    fn domain_errors_surface_at_construction() {
        let vf = VectorField::new(
            vec![
                parse_expr("-x1", 2).unwrap(),
                parse_expr("ln(x2 + 1) - x2", 2).unwrap(),
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        let spec = GridSpec::uniform(unit_box(3.0), 5).unwrap();
        let err = cost(&quadratic(1.0), &vf, &spec).unwrap_err();
        assert!(
            matches!(err, Error::FieldDomain { component: 2, .. }),
            "{err}"
        );
    }
}
