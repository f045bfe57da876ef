//! Truncated power series in n variables stored as homogeneous blocks,
//! with evaluation, radius estimation, convergence verdicts, and the
//! indeterminacy layer between the certified regions.
//!
//! A series `sum over alpha of x^alpha a_alpha` with row coefficients
//! `a_alpha` of column degree `q'` is stored as blocks `A(0), ..., A(M)`,
//! where block `m` is indexed by the degree-m row slice and
//! `A(m)[alpha, alpha'] = alpha! * a[alpha, alpha']`. Under that scaling
//! the degree-m part of the series evaluated at `h` is the ordinary
//! product of the row `(h^alpha'/alpha'!)` with `A(m)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::GradedMatrix;
use crate::multiindex::{log_factorial, log_multifactorial, multifactorial_f64, GradedSlice, MultiIndex};
use crate::norm::{ell_norm, log_rho_norm, rho_norm, RhoExponent};
use crate::scalar::{Field, Scalar};

/// Per-degree, per-component table of term sums: entry [m][j] belongs to
/// degree m and component j.
type TermTable = Vec<Vec<f64>>;

/// Sparse monomial coefficients `(alpha, alpha') -> value`, all column
/// indices of one shared degree.
#[derive(Clone, Debug)]
pub struct CoefficientMap {
    vars: usize,
    col_vars: usize,
    col_degree: usize,
    field: Field,
    terms: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl CoefficientMap {
    pub fn new(vars: usize, col_vars: usize, col_degree: usize, field: Field) -> Result<Self> {
        if vars == 0 || col_vars == 0 {
            return Err(Error::Domain(
                "a coefficient map needs at least one variable on each side".into(),
            ));
        }
        Ok(Self {
            vars,
            col_vars,
            col_degree,
            field,
            terms: BTreeMap::new(),
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn col_vars(&self) -> usize {
        self.col_vars
    }

    pub fn col_degree(&self) -> usize {
        self.col_degree
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, alpha: MultiIndex, alpha_prime: MultiIndex, value: Scalar) -> Result<()> {
        if alpha.len() != self.vars {
            return Err(Error::DimensionMismatch(format!(
                "alpha {alpha} has length {}, expected {}",
                alpha.len(),
                self.vars
            )));
        }
        if alpha_prime.len() != self.col_vars {
            return Err(Error::DimensionMismatch(format!(
                "alpha' {alpha_prime} has length {}, expected {}",
                alpha_prime.len(),
                self.col_vars
            )));
        }
        if alpha_prime.degree() != self.col_degree {
            return Err(Error::Domain(format!(
                "alpha' {alpha_prime} has degree {}, expected {}",
                alpha_prime.degree(),
                self.col_degree
            )));
        }
        if value.field() == Field::Complex && self.field == Field::Real {
            return Err(Error::FieldMismatch(format!(
                "complex coefficient at ({alpha}, {alpha_prime}) in a real map"
            )));
        }
        match self.terms.entry((alpha, alpha_prime)) {
            std::collections::btree_map::Entry::Occupied(e) => Err(Error::DuplicateTerm(format!(
                "({}, {})",
                e.key().0,
                e.key().1
            ))),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value.as_complex());
                Ok(())
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, Complex64)> {
        self.terms.iter().map(|((a, ap), &v)| (a, ap, v))
    }

    /// Highest row degree present, if any term exists.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(a, _)| a.degree()).max()
    }

    /// Direct monomial evaluation; the independent counterpart of block
    /// evaluation, kept simple on purpose.
    pub fn evaluate_monomials(&self, point: &[Scalar]) -> Result<Vec<Complex64>> {
        if point.len() != self.vars {
            return Err(Error::DimensionMismatch(format!(
                "point has length {}, expected {}",
                point.len(),
                self.vars
            )));
        }
        let cols = GradedSlice::get(self.col_vars, self.col_degree)?;
        let mut out = vec![Complex64::new(0.0, 0.0); cols.dim()];
        for (alpha, alpha_prime, value) in self.iter() {
            let mut monomial = Complex64::new(1.0, 0.0);
            for (k, &e) in alpha.entries().iter().enumerate() {
                if e > 0 {
                    monomial *= point[k].as_complex().powi(e as i32);
                }
            }
            let j = cols.rank(alpha_prime).expect("validated on insert");
            out[j] += monomial * value;
        }
        Ok(out)
    }
}

/// A truncated power series as contiguous homogeneous blocks `A(0..=M)`.
#[derive(Clone, Debug)]
pub struct BlockSeries {
    vars: usize,
    col_vars: usize,
    col_degree: usize,
    field: Field,
    blocks: Vec<GradedMatrix>,
}

/// Radius data estimated from the stored blocks.
///
/// `rate` is the maximum of `norm(A(m))^(1/m)` over the last `window`
/// nonzero blocks; `radius` is its reciprocal. A finite prefix cannot
/// pin down the true limit superior, so the window is reported with the
/// estimate.
#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub rate: f64,
    pub radius: f64,
    /// `norm(A(m))^(1/m)` per degree; index 0 is unused and holds 0.
    pub block_roots: Vec<f64>,
    /// Number of trailing nonzero blocks the estimate looked at.
    pub window: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerdictStatus {
    ConvergedCertified,
    DivergedCertified,
    Unknown,
}

impl std::fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictStatus::ConvergedCertified => write!(f, "converged-certified"),
            VerdictStatus::DivergedCertified => write!(f, "diverged-certified"),
            VerdictStatus::Unknown => write!(f, "unknown"),
        }
    }
}

/// Numeric evidence attached to a verdict.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// The certified-convergence case: the contraction ratio and the bound
    /// on everything past the stored truncation.
    GeometricTail { ratio: f64, tail_bound: f64 },
    /// The certified-divergence case: a component whose per-degree
    /// absolute term sums fail to decay over the inspected window.
    TermGrowth {
        component: usize,
        window_start: usize,
        sums: Vec<f64>,
    },
    /// Neither certificate applies.
    Inconclusive { ratio: f64 },
}

/// Knobs for [`BlockSeries::converges_at`].
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceOptions {
    /// Certification margin on the contraction ratio.
    pub margin: f64,
    /// Consecutive degrees of non-decreasing term sums needed to certify
    /// divergence.
    pub divergence_window: usize,
    /// Override for the radius-estimate window.
    pub radius_window: Option<usize>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            margin: 1e-6,
            divergence_window: 8,
            radius_window: None,
        }
    }
}

/// Outcome of a convergence probe at one point.
///
/// Verdicts are reported twice: once for the full multi-index series of
/// absolute terms, and once for the degree-grouped series whose terms are
/// the absolute values of the homogeneous parts. The two need not agree,
/// and no attempt is made to reconcile them.
#[derive(Clone, Debug)]
pub struct ConvergenceVerdict {
    pub status: VerdictStatus,
    pub certificate: Certificate,
    /// Per-component partial sums of absolute terms up to the truncation.
    pub components: Vec<f64>,
    pub grouped_status: VerdictStatus,
    pub grouped_certificate: Certificate,
    /// Per-component partial sums of grouped absolute degree terms.
    pub grouped_components: Vec<f64>,
    /// The point's norm in the conjugate exponent.
    pub point_norm: f64,
    /// The estimated coefficient growth rate used for certification.
    pub rate: f64,
}

/// The shell between the certified-convergence ball and the radius beyond
/// which divergence witnesses are guaranteed to exist.
#[derive(Clone, Copy, Debug)]
pub struct IndeterminacyLayer {
    pub inner: f64,
    pub outer: f64,
    /// `outer / inner`: n^((rho-1)/rho) for finite rho, n at rho = inf.
    pub factor: f64,
}

/// One probed point with its verdict.
#[derive(Clone, Debug)]
pub struct WitnessPoint {
    pub point: Vec<Scalar>,
    pub verdict: ConvergenceVerdict,
}

/// Result of scanning a sphere of the conjugate norm for divergence
/// witnesses.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub r1: f64,
    pub diagonal: WitnessPoint,
    pub samples: Vec<WitnessPoint>,
}

impl BlockSeries {
    /// Convert monomial coefficients into homogeneous blocks, scaling each
    /// row by its exact factorial so that block evaluation reproduces the
    /// monomial sum.
    pub fn from_coefficients(map: &CoefficientMap, truncation: usize) -> Result<Self> {
        if let Some(top) = map.max_degree() {
            if top > truncation {
                return Err(Error::Domain(format!(
                    "coefficient of degree {top} exceeds the truncation {truncation}"
                )));
            }
        }
        let mut blocks = Vec::with_capacity(truncation + 1);
        for m in 0..=truncation {
            blocks.push(GradedMatrix::zero(
                map.vars(),
                map.col_vars(),
                m,
                map.col_degree(),
                map.field(),
            )?);
        }
        let col_slice = GradedSlice::get(map.col_vars(), map.col_degree())?;
        for (alpha, alpha_prime, value) in map.iter() {
            let m = alpha.degree();
            let row_slice = GradedSlice::get(map.vars(), m)?;
            let i = row_slice.rank(alpha).expect("validated on insert");
            let j = col_slice.rank(alpha_prime).expect("validated on insert");
            let weight = multifactorial_f64(alpha);
            if !weight.is_finite() {
                return Err(Error::Capacity(format!(
                    "{alpha}! is not representable as a double"
                )));
            }
            let cols = col_slice.dim();
            blocks[m].entries_mut()[i * cols + j] = value * weight;
        }
        Ok(Self {
            vars: map.vars(),
            col_vars: map.col_vars(),
            col_degree: map.col_degree(),
            field: map.field(),
            blocks,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn col_vars(&self) -> usize {
        self.col_vars
    }

    pub fn col_degree(&self) -> usize {
        self.col_degree
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The truncation degree M.
    pub fn truncation(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[GradedMatrix] {
        &self.blocks
    }

    pub fn block(&self, m: usize) -> Option<&GradedMatrix> {
        self.blocks.get(m)
    }

    /// Evaluate the truncated series at a point by summing the ordinary
    /// products of the scaled power rows with the blocks.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<GradedMatrix> {
        if point.len() != self.vars {
            return Err(Error::DimensionMismatch(format!(
                "point has length {}, expected {}",
                point.len(),
                self.vars
            )));
        }
        let point_field = if point.iter().any(|v| v.field() == Field::Complex) {
            Field::Complex
        } else {
            Field::Real
        };
        let target = if point_field == Field::Complex || self.field == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        };
        let mut acc = GradedMatrix::zero(self.vars, self.col_vars, 0, self.col_degree, target)?;
        for (m, block) in self.blocks.iter().enumerate() {
            let row = scaled_power_row(point, self.vars, target, m)?;
            let term = if block.field() == target {
                row.ordinary_mul(block)?
            } else {
                row.ordinary_mul(&block.to_complex())?
            };
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// The weighted norm of every block.
    pub fn block_norms(&self, rho: RhoExponent) -> Vec<f64> {
        self.blocks.iter().map(|b| rho_norm(b, rho)).collect()
    }

    /// Estimate the coefficient growth rate and the convergence radius
    /// from the trailing nonzero blocks.
    pub fn radius_estimate(
        &self,
        rho: RhoExponent,
        window: Option<usize>,
    ) -> Result<RadiusEstimate> {
        if self.blocks.is_empty() {
            return Err(Error::EmptySeries);
        }
        let truncation = self.truncation();
        let mut block_roots = vec![0.0f64; truncation + 1];
        let mut nonzero = Vec::new();
        for (m, block) in self.blocks.iter().enumerate().skip(1) {
            let log_norm = log_rho_norm(block, rho);
            block_roots[m] = (log_norm / m as f64).exp();
            if log_norm > f64::NEG_INFINITY {
                nonzero.push(m);
            }
        }
        let window_used = match window {
            Some(w) => {
                if w == 0 || w > truncation {
                    return Err(Error::Domain(format!(
                        "window {w} must lie in 1..={truncation}"
                    )));
                }
                w
            }
            // Last half of the nonzero blocks, at least 3.
            None => (nonzero.len().div_ceil(2)).max(3),
        };
        let tail = nonzero.len().min(window_used);
        let rate = nonzero[nonzero.len() - tail..]
            .iter()
            .map(|&m| block_roots[m])
            .fold(0.0, f64::max);
        Ok(RadiusEstimate {
            rate,
            radius: 1.0 / rate,
            block_roots,
            window: tail,
        })
    }

    /// Per-degree, per-component sums of the absolute terms
    /// `|h^alpha / alpha! * A(m)[alpha, alpha']|`, together with the
    /// degree-grouped signed sums' absolute values.
    fn term_tables(&self, point: &[Scalar]) -> Result<(TermTable, TermTable)> {
        let cols = self.blocks[0].cols();
        let mut absolute = vec![vec![0.0f64; cols]; self.blocks.len()];
        let mut grouped = vec![vec![0.0f64; cols]; self.blocks.len()];
        for (m, block) in self.blocks.iter().enumerate() {
            let rows = block.row_slice();
            let mut signed = vec![Complex64::new(0.0, 0.0); cols];
            for (i, alpha) in rows.elements().iter().enumerate() {
                let mut monomial = Complex64::new(1.0, 0.0);
                for (k, &e) in alpha.entries().iter().enumerate() {
                    if e > 0 {
                        monomial *= point[k].as_complex().powi(e as i32);
                    }
                }
                let weight = multifactorial_f64(alpha);
                let scale = if weight.is_finite() {
                    monomial / weight
                } else {
                    monomial * (-log_multifactorial(alpha)).exp()
                };
                if scale.re == 0.0 && scale.im == 0.0 {
                    continue;
                }
                for j in 0..cols {
                    let term = scale * block.entry(i, j);
                    absolute[m][j] += term.norm();
                    signed[j] += term;
                }
            }
            for j in 0..cols {
                grouped[m][j] = signed[j].norm();
            }
        }
        Ok((absolute, grouped))
    }

    /// Probe absolute convergence at a point.
    ///
    /// Convergence is certified when the point's conjugate norm times the
    /// estimated growth rate stays below 1 by the configured margin;
    /// the certificate is then a geometric bound on the tail past the
    /// truncation. Divergence is certified only by a direct witness: a
    /// component whose per-degree term sums are positive and non-decreasing
    /// across the trailing window. Anything else stays unknown; in
    /// particular a point above the certified radius is never declared
    /// divergent without a witness.
    pub fn converges_at(
        &self,
        point: &[Scalar],
        rho: RhoExponent,
        opts: &ConvergenceOptions,
    ) -> Result<ConvergenceVerdict> {
        if point.len() != self.vars {
            return Err(Error::DimensionMismatch(format!(
                "point has length {}, expected {}",
                point.len(),
                self.vars
            )));
        }
        let estimate = self.radius_estimate(rho, opts.radius_window)?;
        let varrho = rho.conjugate();
        let point_norm = ell_norm(point, varrho);
        let ratio = point_norm * estimate.rate;
        let (absolute, grouped) = self.term_tables(point)?;
        let components: Vec<f64> = column_sums(&absolute);
        let grouped_components: Vec<f64> = column_sums(&grouped);

        let (status, certificate) = self.classify(&estimate, ratio, &absolute, opts, varrho);
        let (grouped_status, grouped_certificate) =
            self.classify(&estimate, ratio, &grouped, opts, varrho);

        Ok(ConvergenceVerdict {
            status,
            certificate,
            components,
            grouped_status,
            grouped_certificate,
            grouped_components,
            point_norm,
            rate: estimate.rate,
        })
    }

    fn classify(
        &self,
        estimate: &RadiusEstimate,
        ratio: f64,
        sums: &[Vec<f64>],
        opts: &ConvergenceOptions,
        varrho: RhoExponent,
    ) -> (VerdictStatus, Certificate) {
        if ratio < 1.0 - opts.margin {
            let tail_bound = self.geometric_tail_bound(estimate, ratio, varrho);
            return (
                VerdictStatus::ConvergedCertified,
                Certificate::GeometricTail { ratio, tail_bound },
            );
        }
        if let Some((component, window_start, window_sums)) =
            growth_witness(sums, opts.divergence_window)
        {
            return (
                VerdictStatus::DivergedCertified,
                Certificate::TermGrowth {
                    component,
                    window_start,
                    sums: window_sums,
                },
            );
        }
        (VerdictStatus::Unknown, Certificate::Inconclusive { ratio })
    }

    /// Bound on each component's absolute tail past the truncation,
    /// assuming the estimated rate also dominates the unseen blocks:
    /// `(q'!)^(1/varrho) * c * ratio^(M+1) / (1 - ratio)` with
    /// `c = max over stored nonzero blocks of norm(A(m)) / rate^m`.
    fn geometric_tail_bound(&self, estimate: &RadiusEstimate, ratio: f64, varrho: RhoExponent) -> f64 {
        if estimate.rate == 0.0 {
            return 0.0;
        }
        let log_rate = estimate.rate.ln();
        let mut log_c = f64::NEG_INFINITY;
        for m in 1..=self.truncation() {
            if estimate.block_roots[m] > 0.0 {
                let log_norm = m as f64 * estimate.block_roots[m].ln();
                log_c = log_c.max(log_norm - m as f64 * log_rate);
            }
        }
        if log_c == f64::NEG_INFINITY {
            return 0.0;
        }
        let component_factor = if varrho.is_infinite() {
            1.0
        } else {
            (log_factorial(self.col_degree as u32) / varrho.value()).exp()
        };
        let m_next = (self.truncation() + 1) as f64;
        component_factor * log_c.exp() * ratio.powf(m_next) / (1.0 - ratio)
    }

    /// The shell where neither certified region applies.
    pub fn indeterminacy_layer(
        &self,
        rho: RhoExponent,
        window: Option<usize>,
    ) -> Result<IndeterminacyLayer> {
        let estimate = self.radius_estimate(rho, window)?;
        let n = self.vars as f64;
        let factor = if rho.is_infinite() {
            n
        } else {
            n.powf((rho.value() - 1.0) / rho.value())
        };
        Ok(IndeterminacyLayer {
            inner: estimate.radius,
            outer: estimate.radius * factor,
            factor,
        })
    }

    /// Probe the sphere of conjugate norm `r1`: the diagonal direction
    /// plus `samples` seeded random directions.
    pub fn layer_witness_scan(
        &self,
        rho: RhoExponent,
        r1: f64,
        samples: usize,
        seed: u64,
        opts: &ConvergenceOptions,
    ) -> Result<WitnessReport> {
        if !r1.is_finite() || r1 <= 0.0 {
            return Err(Error::Domain(format!("scan radius must be positive, got {r1}")));
        }
        let varrho = rho.conjugate();
        let n = self.vars as f64;
        let diag_coord = if varrho.is_infinite() {
            r1
        } else {
            r1 * n.powf(-1.0 / varrho.value())
        };
        let diagonal_point = vec![Scalar::Real(diag_coord); self.vars];
        let diagonal = WitnessPoint {
            verdict: self.converges_at(&diagonal_point, rho, opts)?,
            point: diagonal_point,
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample_points = Vec::with_capacity(samples);
        for _ in 0..samples {
            let point = loop {
                let raw: Vec<Scalar> = (0..self.vars)
                    .map(|_| match self.field {
                        Field::Real => Scalar::Real(rng.random_range(-1.0..1.0)),
                        Field::Complex => Scalar::Complex(Complex64::new(
                            rng.random_range(-1.0..1.0),
                            rng.random_range(-1.0..1.0),
                        )),
                    })
                    .collect();
                let norm = ell_norm(&raw, varrho);
                if norm > 1e-9 {
                    let scale = r1 / norm;
                    break raw
                        .into_iter()
                        .map(|v| match v {
                            Scalar::Real(x) => Scalar::Real(x * scale),
                            Scalar::Complex(z) => Scalar::Complex(z * scale),
                        })
                        .collect::<Vec<_>>();
                }
            };
            sample_points.push(point);
        }
        let mut sample_reports = Vec::with_capacity(samples);
        for point in sample_points {
            sample_reports.push(WitnessPoint {
                verdict: self.converges_at(&point, rho, opts)?,
                point,
            });
        }
        Ok(WitnessReport {
            r1,
            diagonal,
            samples: sample_reports,
        })
    }
}

fn column_sums(table: &[Vec<f64>]) -> Vec<f64> {
    let cols = table.first().map_or(0, Vec::len);
    let mut out = vec![0.0f64; cols];
    for row in table {
        for (acc, &v) in out.iter_mut().zip(row) {
            *acc += v;
        }
    }
    out
}

/// A component certifying divergence: over the trailing `window` degrees
/// its term sums are positive and never decrease (up to roundoff).
fn growth_witness(sums: &[Vec<f64>], window: usize) -> Option<(usize, usize, Vec<f64>)> {
    let degrees = sums.len();
    if window == 0 || degrees < window {
        return None;
    }
    let start = degrees - window;
    let cols = sums.first().map_or(0, Vec::len);
    (0..cols).find_map(|j| {
        let tail: Vec<f64> = sums[start..].iter().map(|row| row[j]).collect();
        let positive = tail.iter().all(|&t| t > 0.0);
        let non_decreasing = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        (positive && non_decreasing).then_some((j, start, tail))
    })
}

/// The row `(h^alpha'/alpha'!)` over the degree-m column slice; equals the
/// closed-form power of the point row divided by m!.
fn scaled_power_row(
    point: &[Scalar],
    vars: usize,
    field: Field,
    m: usize,
) -> Result<GradedMatrix> {
    let cols = GradedSlice::get(vars, m)?;
    let mut out = GradedMatrix::zero(vars, vars, 0, m, field)?;
    let dim = cols.dim();
    for (j, alpha_prime) in cols.elements().iter().enumerate() {
        let weight = multifactorial_f64(alpha_prime);
        let mut value = if weight.is_finite() {
            Complex64::new(1.0 / weight, 0.0)
        } else {
            Complex64::new((-log_multifactorial(alpha_prime)).exp(), 0.0)
        };
        for (k, &e) in alpha_prime.entries().iter().enumerate() {
            if e > 0 {
                value *= point[k].as_complex().powi(e as i32);
            }
        }
        out.entries_mut()[j] = value;
    }
    debug_assert_eq!(dim, out.cols());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{geometric_coefficients, one_variable_power_coefficients};
    use crate::matrix::h_power_closed;
    use crate::multiindex::factorial_f64;

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn insert_validates_shape_degree_and_duplicates() {
        let mut map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        assert!(matches!(
            map.insert(mi(&[1]), mi(&[0]), Scalar::Real(1.0)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            map.insert(mi(&[1, 0]), mi(&[1]), Scalar::Real(1.0)),
            Err(Error::Domain(_))
        ));
        map.insert(mi(&[1, 0]), mi(&[0]), Scalar::Real(1.0)).unwrap();
        assert!(matches!(
            map.insert(mi(&[1, 0]), mi(&[0]), Scalar::Real(2.0)),
            Err(Error::DuplicateTerm(_))
        ));
        assert!(matches!(
            map.insert(
                mi(&[0, 1]),
                mi(&[0]),
                Scalar::Complex(Complex64::new(0.0, 1.0))
            ),
            Err(Error::FieldMismatch(_))
        ));
    }

    #[test]
    fn block_scaling_examples() {
        let mut map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        map.insert(mi(&[2, 0]), mi(&[0]), Scalar::Real(5.0)).unwrap();
        map.insert(mi(&[1, 1]), mi(&[0]), Scalar::Real(1.0)).unwrap();
        map.insert(mi(&[0, 0]), mi(&[0]), Scalar::Real(3.0)).unwrap();
        let series = BlockSeries::from_coefficients(&map, 2).unwrap();
        // Degree-0 block keeps the constant term.
        assert_eq!(series.block(0).unwrap().entry(0, 0).re, 3.0);
        // (2,0)! = 2 scales the coefficient 5 to 10; (1,1)! = 1 leaves 1.
        let block2 = series.block(2).unwrap();
        let rows = block2.row_slice();
        let i20 = rows.rank(&mi(&[2, 0])).unwrap();
        let i11 = rows.rank(&mi(&[1, 1])).unwrap();
        assert_eq!(block2.entry(i20, 0).re, 10.0);
        assert_eq!(block2.entry(i11, 0).re, 1.0);
    }

    #[test]
    fn from_coefficients_rejects_terms_beyond_truncation() {
        let mut map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        map.insert(mi(&[3, 0]), mi(&[0]), Scalar::Real(1.0)).unwrap();
        assert!(matches!(
            BlockSeries::from_coefficients(&map, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn block_evaluation_matches_monomial_evaluation() {
        // The scaling is exactly what makes the two routes agree; probe it
        // at random points rather than trusting the formula.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let vars = rng.random_range(1..=3usize);
            let col_vars = rng.random_range(1..=2usize);
            let col_degree = rng.random_range(0..=2usize);
            let truncation = rng.random_range(0..=6usize);
            let mut map = CoefficientMap::new(vars, col_vars, col_degree, Field::Real).unwrap();
            let col_elems = enumerate(col_vars, col_degree);
            for m in 0..=truncation {
                for alpha in enumerate(vars, m) {
                    for alpha_prime in &col_elems {
                        if rng.random_bool(0.4) {
                            map.insert(
                                alpha.clone(),
                                alpha_prime.clone(),
                                Scalar::Real(rng.random_range(-1.0..1.0)),
                            )
                            .unwrap();
                        }
                    }
                }
            }
            let series = BlockSeries::from_coefficients(&map, truncation).unwrap();
            for _ in 0..20 {
                let point: Vec<Scalar> = (0..vars)
                    .map(|_| Scalar::Real(rng.random_range(-0.9..0.9)))
                    .collect();
                let via_blocks = series.evaluate(&point).unwrap();
                let via_monomials = map.evaluate_monomials(&point).unwrap();
                let scale = via_monomials
                    .iter()
                    .map(|z| z.norm())
                    .fold(via_blocks.max_abs(), f64::max)
                    .max(1e-12);
                for (j, want) in via_monomials.iter().enumerate() {
                    let got = via_blocks.entry(0, j);
                    assert!(
                        (got - want).norm() <= 1e-10 * scale,
                        "component {j}: {got} vs {want}"
                    );
                }
            }
        }
    }

    fn enumerate(vars: usize, degree: usize) -> Vec<MultiIndex> {
        crate::multiindex::enumerate_slice(vars, degree).unwrap()
    }

    #[test]
    fn scaled_power_row_is_the_closed_power_over_m_factorial() {
        let point = [Scalar::Real(0.4), Scalar::Real(-0.7)];
        let h = GradedMatrix::point_row(&point).unwrap();
        for m in 0..=6usize {
            let direct = scaled_power_row(&point, 2, Field::Real, m).unwrap();
            let m_fact = crate::multiindex::factorial_u128(m as u32).unwrap() as f64;
            let via_closed = h_power_closed(&h, m)
                .unwrap()
                .scale(Scalar::Real(1.0 / m_fact))
                .unwrap();
            assert!(direct.approx_eq(&via_closed, 1e-12, 1e-250));
        }
    }

    #[test]
    fn evaluate_geometric_series_partial_sum() {
        let map = geometric_coefficients(2, 2).unwrap();
        let series = BlockSeries::from_coefficients(&map, 2).unwrap();
        let value = series
            .evaluate(&[Scalar::Real(0.1), Scalar::Real(0.2)])
            .unwrap();
        // 1 + 0.3 + 0.09
        assert!((value.entry(0, 0).re - 1.39).abs() <= 1e-12);
    }

    #[test]
    fn evaluate_zero_and_constant_series() {
        let map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        let series = BlockSeries::from_coefficients(&map, 3).unwrap();
        let value = series
            .evaluate(&[Scalar::Real(0.5), Scalar::Real(0.5)])
            .unwrap();
        assert!(value.is_zero());

        let mut map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        map.insert(mi(&[0, 0]), mi(&[0]), Scalar::Real(4.5)).unwrap();
        let series = BlockSeries::from_coefficients(&map, 0).unwrap();
        let value = series
            .evaluate(&[Scalar::Real(0.5), Scalar::Real(0.5)])
            .unwrap();
        assert_eq!(value.entry(0, 0).re, 4.5);
    }

    #[test]
    fn geometric_block_norms_follow_the_closed_form() {
        // Block norms are n^(m/rho) for finite rho: check against direct
        // summation of the weights within each slice.
        let map = geometric_coefficients(2, 8).unwrap();
        let series = BlockSeries::from_coefficients(&map, 8).unwrap();
        for rho_value in [1.0, 2.0] {
            let rho = RhoExponent::new(rho_value).unwrap();
            let norms = series.block_norms(rho);
            for (m, norm) in norms.iter().enumerate() {
                let want = 2.0f64.powf(m as f64 / rho_value);
                assert!(
                    (norm - want).abs() <= 1e-9 * want,
                    "rho={rho_value} m={m}: {norm} vs {want}"
                );
            }
        }
    }

    #[test]
    fn radius_examples_for_the_geometric_family() {
        let map = geometric_coefficients(2, 12).unwrap();
        let series = BlockSeries::from_coefficients(&map, 12).unwrap();
        let est1 = series.radius_estimate(RhoExponent::one(), None).unwrap();
        assert!((est1.radius - 0.5).abs() <= 1e-12);
        let est2 = series.radius_estimate(RhoExponent::two(), None).unwrap();
        assert!((est2.radius - 0.5f64.sqrt()).abs() <= 1e-12);
        let est_inf = series
            .radius_estimate(RhoExponent::infinity(), None)
            .unwrap();
        assert!((est_inf.radius - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn one_variable_radius_is_classical() {
        let map = one_variable_power_coefficients(3.0, 20).unwrap();
        let series = BlockSeries::from_coefficients(&map, 20).unwrap();
        for rho in [RhoExponent::one(), RhoExponent::two(), RhoExponent::infinity()] {
            let est = series.radius_estimate(rho, None).unwrap();
            assert!(
                (est.radius - 1.0 / 3.0).abs() <= 1e-9,
                "rho={rho}: {}",
                est.radius
            );
        }

        // Brute-force cross-check: partial sums settle below the radius
        // and blow up above it.
        let below: f64 = (0..=20).map(|m| (0.33f64 * 3.0).powi(m)).sum();
        let above: f64 = (0..=20).map(|m| (0.34f64 * 3.0).powi(m)).sum();
        assert!(below < 100.0 / (1.0 - 0.99));
        assert!(above > (1.02f64).powi(20));
        let verdict_below = series
            .converges_at(
                &[Scalar::Real(0.33)],
                RhoExponent::two(),
                &ConvergenceOptions::default(),
            )
            .unwrap();
        assert_eq!(verdict_below.status, VerdictStatus::ConvergedCertified);
        let verdict_above = series
            .converges_at(
                &[Scalar::Real(0.34)],
                RhoExponent::two(),
                &ConvergenceOptions::default(),
            )
            .unwrap();
        assert_eq!(verdict_above.status, VerdictStatus::DivergedCertified);
    }

    #[test]
    fn window_validation() {
        let map = geometric_coefficients(2, 6).unwrap();
        let series = BlockSeries::from_coefficients(&map, 6).unwrap();
        assert!(series.radius_estimate(RhoExponent::one(), Some(0)).is_err());
        assert!(series.radius_estimate(RhoExponent::one(), Some(7)).is_err());
        assert!(series.radius_estimate(RhoExponent::one(), Some(6)).is_ok());
    }

    #[test]
    fn all_zero_series_has_infinite_radius() {
        let map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        let series = BlockSeries::from_coefficients(&map, 5).unwrap();
        let est = series.radius_estimate(RhoExponent::two(), None).unwrap();
        assert_eq!(est.rate, 0.0);
        assert!(est.radius.is_infinite());
        // And everything converges with a zero tail bound.
        let verdict = series
            .converges_at(
                &[Scalar::Real(10.0), Scalar::Real(10.0)],
                RhoExponent::two(),
                &ConvergenceOptions::default(),
            )
            .unwrap();
        assert_eq!(verdict.status, VerdictStatus::ConvergedCertified);
        if let Certificate::GeometricTail { tail_bound, .. } = verdict.certificate {
            assert_eq!(tail_bound, 0.0);
        } else {
            panic!("expected a geometric tail certificate");
        }
    }

    #[test]
    fn geometric_verdicts_inside_and_around_the_layer() {
        let map = geometric_coefficients(2, 20).unwrap();
        let series = BlockSeries::from_coefficients(&map, 20).unwrap();
        let rho = RhoExponent::two();
        let opts = ConvergenceOptions::default();

        // Comfortably below the certified radius.
        let verdict = series
            .converges_at(&[Scalar::Real(0.3), Scalar::Real(0.3)], rho, &opts)
            .unwrap();
        assert_eq!(verdict.status, VerdictStatus::ConvergedCertified);

        // In the layer, the diagonal direction genuinely diverges.
        let c = 0.9 / 2.0f64.sqrt();
        let verdict = series
            .converges_at(&[Scalar::Real(c), Scalar::Real(c)], rho, &opts)
            .unwrap();
        assert_eq!(verdict.status, VerdictStatus::DivergedCertified);

        // In the layer, an axis direction truly converges but cannot be
        // certified from the rate alone: it must never read divergent.
        let verdict = series
            .converges_at(&[Scalar::Real(0.9), Scalar::Real(0.0)], rho, &opts)
            .unwrap();
        assert_ne!(verdict.status, VerdictStatus::DivergedCertified);
    }

    #[test]
    fn layer_examples() {
        let map = geometric_coefficients(2, 12).unwrap();
        let series = BlockSeries::from_coefficients(&map, 12).unwrap();
        let layer = series
            .indeterminacy_layer(RhoExponent::two(), None)
            .unwrap();
        assert!((layer.inner - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-6);
        assert!((layer.outer - 1.0).abs() <= 1e-9);

        let layer1 = series.indeterminacy_layer(RhoExponent::one(), None).unwrap();
        assert_eq!(layer1.inner, layer1.outer);

        let map1 = one_variable_power_coefficients(0.5, 10).unwrap();
        let series1 = BlockSeries::from_coefficients(&map1, 10).unwrap();
        let layer_n1 = series1
            .indeterminacy_layer(RhoExponent::new(3.0).unwrap(), None)
            .unwrap();
        assert_eq!(layer_n1.inner, layer_n1.outer);
    }

    #[test]
    fn witness_scan_examples() {
        let map = geometric_coefficients(2, 20).unwrap();
        let series = BlockSeries::from_coefficients(&map, 20).unwrap();
        let rho = RhoExponent::two();
        let opts = ConvergenceOptions::default();

        let scan = series
            .layer_witness_scan(rho, 1.05, 4, 11, &opts)
            .unwrap();
        assert_eq!(
            scan.diagonal.verdict.status,
            VerdictStatus::DivergedCertified
        );

        let scan = series.layer_witness_scan(rho, 0.5, 6, 11, &opts).unwrap();
        assert_eq!(
            scan.diagonal.verdict.status,
            VerdictStatus::ConvergedCertified
        );
        for sample in &scan.samples {
            assert_eq!(
                sample.verdict.status,
                VerdictStatus::ConvergedCertified,
                "sample {:?}",
                sample.point
            );
        }

        // One variable: beyond the radius the witness is the classical one.
        let map1 = one_variable_power_coefficients(3.0, 20).unwrap();
        let series1 = BlockSeries::from_coefficients(&map1, 20).unwrap();
        let scan = series1
            .layer_witness_scan(RhoExponent::two(), 0.4, 2, 3, &opts)
            .unwrap();
        assert_eq!(
            scan.diagonal.verdict.status,
            VerdictStatus::DivergedCertified
        );
    }

    #[test]
    fn diagonal_points_above_the_layer_are_never_certified_convergent() {
        let map = geometric_coefficients(2, 20).unwrap();
        let series = BlockSeries::from_coefficients(&map, 20).unwrap();
        let opts = ConvergenceOptions::default();
        for rho_value in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let rho = RhoExponent::new(rho_value).unwrap();
            let layer = series.indeterminacy_layer(rho, None).unwrap();
            for bump in [1.01, 1.25, 2.0] {
                let scan = series
                    .layer_witness_scan(rho, layer.outer * bump, 0, 5, &opts)
                    .unwrap();
                assert_ne!(
                    scan.diagonal.verdict.status,
                    VerdictStatus::ConvergedCertified,
                    "rho={rho_value} r1={}",
                    layer.outer * bump
                );
            }
        }
    }

    #[test]
    fn term_sums_below_the_radius_are_geometrically_dominated() {
        // For points with conjugate norm at most 0.95 of the estimated
        // radius, the per-degree absolute term sums sit under the
        // geometric envelope that the tail certificate extrapolates.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for series in [
            BlockSeries::from_coefficients(&geometric_coefficients(2, 16).unwrap(), 16).unwrap(),
            BlockSeries::from_coefficients(&one_variable_power_coefficients(3.0, 16).unwrap(), 16)
                .unwrap(),
        ] {
            for rho in [RhoExponent::one(), RhoExponent::two(), RhoExponent::infinity()] {
                let varrho = rho.conjugate();
                let est = series.radius_estimate(rho, None).unwrap();
                let envelope_c = (1..=series.truncation())
                    .filter(|&m| est.block_roots[m] > 0.0)
                    .map(|m| (est.block_roots[m] / est.rate).powi(m as i32))
                    .fold(0.0f64, f64::max);
                let factor = if varrho.is_infinite() {
                    1.0
                } else {
                    factorial_f64(series.col_degree() as u32).powf(1.0 / varrho.value())
                };
                for _ in 0..10 {
                    let point: Vec<Scalar> = (0..series.vars())
                        .map(|_| Scalar::Real(rng.random_range(-1.0..1.0)))
                        .collect();
                    let norm = ell_norm(&point, varrho);
                    if norm < 1e-6 {
                        continue;
                    }
                    let scale = 0.95 * est.radius * rng.random_range(0.1..=1.0) / norm;
                    let point: Vec<Scalar> = point
                        .iter()
                        .map(|s| match s {
                            Scalar::Real(x) => Scalar::Real(x * scale),
                            Scalar::Complex(_) => unreachable!(),
                        })
                        .collect();
                    let theta = ell_norm(&point, varrho) * est.rate;
                    let (absolute, _) = series.term_tables(&point).unwrap();
                    for (m, sums) in absolute.iter().enumerate().skip(1) {
                        let envelope = factor * envelope_c * theta.powi(m as i32);
                        for &sum in sums {
                            assert!(
                                sum <= envelope * (1.0 + 1e-9),
                                "degree {m}: {sum} above the envelope {envelope}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn grouped_and_absolute_sums_are_reported_separately() {
        // Cancelling homogeneous parts: grouped sums vanish while the
        // absolute ones do not. The two verdicts are independent data.
        let mut map = CoefficientMap::new(2, 1, 0, Field::Real).unwrap();
        for m in 1..=10u32 {
            map.insert(mi(&[m, 0]), mi(&[0]), Scalar::Real(1.0)).unwrap();
            map.insert(mi(&[0, m]), mi(&[0]), Scalar::Real(-1.0)).unwrap();
        }
        let series = BlockSeries::from_coefficients(&map, 10).unwrap();
        let point = [Scalar::Real(0.4), Scalar::Real(0.4)];
        let verdict = series
            .converges_at(&point, RhoExponent::two(), &ConvergenceOptions::default())
            .unwrap();
        assert!(verdict.grouped_components[0] < 1e-12);
        assert!(verdict.components[0] > 1.0);
        // No claim that the two statuses coincide, only that both exist.
        let _ = (verdict.status, verdict.grouped_status);
    }

    #[test]
    fn witness_scan_rejects_nonpositive_radius() {
        let map = geometric_coefficients(2, 6).unwrap();
        let series = BlockSeries::from_coefficients(&map, 6).unwrap();
        assert!(series
            .layer_witness_scan(
                RhoExponent::two(),
                0.0,
                1,
                0,
                &ConvergenceOptions::default()
            )
            .is_err());
    }
}
