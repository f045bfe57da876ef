//! The weighted rho-norm family on graded matrices and conjugate-exponent
//! bookkeeping.
//!
//! For finite rho, the norm of a matrix of degrees `(p, p')` is
//!
//! ```text
//! ( sum over (alpha, alpha') of |A[alpha,alpha']|^rho
//!     / ( alpha! * (p! p'!)^(rho-1) ) )^(1/rho)
//! ```
//!
//! and for rho = infinity it is `sup |A[alpha,alpha']| / (p! p'!)`. The
//! weight carries the row factorial `alpha!` but not the column one; only
//! the constant `p'!` enters. Points of F^n are measured in the conjugate
//! exponent, where the weights all collapse to 1 and the norm is the
//! classical one.

use crate::error::{Error, Result};
use crate::matrix::GradedMatrix;
use crate::multiindex::{factorial_f64, log_factorial, log_multifactorial, multifactorial_f64};
use crate::scalar::Scalar;

/// An exponent in [1, infinity] together with its conjugate.
///
/// The conjugate is computed once at construction, so taking conjugates
/// twice returns the original stored value exactly.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RhoExponent {
    value: f64,
    conj: f64,
}

impl RhoExponent {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::Domain(format!(
                "exponent must lie in [1, inf], got {value}"
            )));
        }
        let conj = if value == 1.0 {
            f64::INFINITY
        } else if value.is_infinite() {
            1.0
        } else {
            value / (value - 1.0)
        };
        Ok(Self { value, conj })
    }

    pub fn one() -> Self {
        Self::new(1.0).expect("1 is a valid exponent")
    }

    pub fn two() -> Self {
        Self::new(2.0).expect("2 is a valid exponent")
    }

    pub fn infinity() -> Self {
        Self::new(f64::INFINITY).expect("infinity is a valid exponent")
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn conjugate_value(&self) -> f64 {
        self.conj
    }

    /// The conjugate exponent; an exact involution.
    pub fn conjugate(&self) -> Self {
        Self {
            value: self.conj,
            conj: self.value,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

impl std::fmt::Display for RhoExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.value.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// log(sum(exp(t))) with the max shift; -inf for an empty or all -inf input.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - m).exp()).sum();
    m + sum.ln()
}

/// The weighted norm of a graded matrix. Zero exactly for the zero matrix.
pub fn rho_norm(a: &GradedMatrix, rho: RhoExponent) -> f64 {
    if rho.is_infinite() {
        return sup_norm(a);
    }
    let r = rho.value();
    let ppf = factorial_f64(a.row_degree() as u32) * factorial_f64(a.col_degree() as u32);
    let weight_const = ppf.powf(r - 1.0);
    let row_slice = a.row_slice();
    let row_weights: Vec<f64> = row_slice
        .elements()
        .iter()
        .map(multifactorial_f64)
        .collect();
    if weight_const.is_finite() && row_weights.iter().all(|w| w.is_finite()) {
        let mut sum = 0.0f64;
        for (i, &row_weight) in row_weights.iter().enumerate() {
            for j in 0..a.cols() {
                let mag = a.entry(i, j).norm();
                if mag > 0.0 {
                    sum += mag.powf(r) / (row_weight * weight_const);
                }
            }
        }
        sum.powf(1.0 / r)
    } else {
        log_rho_norm(a, rho).exp()
    }
}

/// The natural log of [`rho_norm`], accumulated in the log domain so that
/// large factorial weights cannot overflow. -inf for the zero matrix.
pub fn log_rho_norm(a: &GradedMatrix, rho: RhoExponent) -> f64 {
    let lpp = log_factorial(a.row_degree() as u32) + log_factorial(a.col_degree() as u32);
    if rho.is_infinite() {
        let m = a.max_abs();
        return if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            m.ln() - lpp
        };
    }
    let r = rho.value();
    let row_slice = a.row_slice();
    let row_logs: Vec<f64> = row_slice
        .elements()
        .iter()
        .map(log_multifactorial)
        .collect();
    let mut terms = Vec::with_capacity(a.rows() * a.cols());
    for (i, &row_log) in row_logs.iter().enumerate() {
        for j in 0..a.cols() {
            let mag = a.entry(i, j).norm();
            if mag > 0.0 {
                terms.push(r * mag.ln() - row_log - (r - 1.0) * lpp);
            }
        }
    }
    log_sum_exp(&terms) / r
}

fn sup_norm(a: &GradedMatrix) -> f64 {
    let m = a.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    let denom = factorial_f64(a.row_degree() as u32) * factorial_f64(a.col_degree() as u32);
    if denom.is_finite() {
        m / denom
    } else {
        (m.ln() - log_factorial(a.row_degree() as u32) - log_factorial(a.col_degree() as u32))
            .exp()
    }
}

/// The classical norm of a point of F^n under the given exponent.
pub fn ell_norm(values: &[Scalar], exponent: RhoExponent) -> f64 {
    if exponent.is_infinite() {
        return values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    let e = exponent.value();
    let sum: f64 = values
        .iter()
        .map(|v| {
            let m = v.abs();
            if m > 0.0 {
                m.powf(e)
            } else {
                0.0
            }
        })
        .sum();
    sum.powf(1.0 / e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::GradedMatrix;
    use crate::scalar::Field;

    #[test]
    fn conjugate_examples_and_involution() {
        assert_eq!(RhoExponent::two().conjugate().value(), 2.0);
        assert_eq!(RhoExponent::one().conjugate().value(), f64::INFINITY);
        assert_eq!(RhoExponent::infinity().conjugate().value(), 1.0);
        let three = RhoExponent::new(3.0).unwrap();
        assert_eq!(three.conjugate().value(), 1.5);
        // Exact involution for awkward values too.
        let odd = RhoExponent::new(1.3).unwrap();
        assert_eq!(odd.conjugate().conjugate(), odd);
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        assert!(RhoExponent::new(0.5).is_err());
        assert!(RhoExponent::new(f64::NAN).is_err());
    }

    #[test]
    fn row_of_degree_one_reduces_to_the_classical_norm() {
        let h = GradedMatrix::from_real(2, 2, 0, 1, &[3.0, 4.0]).unwrap();
        assert!((rho_norm(&h, RhoExponent::two()) - 5.0).abs() <= 1e-12);
        let lg = log_rho_norm(&h, RhoExponent::two());
        assert!((lg - 5.0f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn identity_norms() {
        let e = GradedMatrix::identity(2, 1, Field::Real).unwrap();
        assert!((rho_norm(&e, RhoExponent::one()) - 2.0).abs() <= 1e-12);
        assert!((rho_norm(&e, RhoExponent::infinity()) - 1.0).abs() <= 1e-12);
        let lg = log_rho_norm(&e, RhoExponent::one());
        assert!((lg - 2.0f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn zero_matrix_has_zero_norm_and_log_negative_infinity() {
        let z = GradedMatrix::zero(3, 2, 2, 1, Field::Complex).unwrap();
        for rho in [RhoExponent::one(), RhoExponent::two(), RhoExponent::infinity()] {
            assert_eq!(rho_norm(&z, rho), 0.0);
            assert_eq!(log_rho_norm(&z, rho), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn log_and_direct_paths_agree() {
        let data: Vec<f64> = (0..12).map(|i| ((i * 37) % 11) as f64 / 7.0 - 0.6).collect();
        let a = GradedMatrix::from_real(2, 2, 3, 2, &data).unwrap();
        for value in [1.0, 1.5, 2.0, 3.0] {
            let rho = RhoExponent::new(value).unwrap();
            let direct = rho_norm(&a, rho);
            let via_log = log_rho_norm(&a, rho).exp();
            assert!(
                (direct - via_log).abs() <= 1e-12 * direct.abs().max(1e-300),
                "rho={value}: {direct} vs {via_log}"
            );
        }
    }

    #[test]
    fn degree_zero_norm_is_the_absolute_value() {
        let a = GradedMatrix::from_real(3, 2, 0, 0, &[-1.7]).unwrap();
        for value in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let rho = RhoExponent::new(value).unwrap();
            assert!((rho_norm(&a, rho) - 1.7).abs() <= 1e-12 * 1.7);
        }
    }

    #[test]
    fn one_variable_norm_matches_hand_formula() {
        // n = 1, degrees (p, p'): a single entry x has norm
        // |x| / (p!^(1/rho) * (p! p'!)^(1/conj)) for finite rho and
        // |x| / (p! p'!) at infinity.
        let x = 1.7f64;
        for (p, pp) in [(3usize, 2usize), (0, 4), (5, 0), (2, 2)] {
            let a = GradedMatrix::from_real(1, 1, p, pp, &[x]).unwrap();
            let p_f = factorial_f64(p as u32);
            let pp_f = factorial_f64(pp as u32);
            for value in [1.0, 1.5, 2.0, 3.0] {
                let rho = RhoExponent::new(value).unwrap();
                let want = x / (p_f.powf(1.0 / value)
                    * (p_f * pp_f).powf(1.0 / rho.conjugate_value()));
                assert!(
                    (rho_norm(&a, rho) - want).abs() <= 1e-12 * want,
                    "p={p} p'={pp} rho={value}"
                );
            }
            let want = x / (p_f * pp_f);
            assert!((rho_norm(&a, RhoExponent::infinity()) - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn ell_norm_matches_matrix_norm_on_point_rows() {
        let values = [Scalar::Real(0.3), Scalar::Real(-1.2), Scalar::Real(0.0)];
        let row = GradedMatrix::point_row(&values).unwrap();
        for value in [1.0, 2.0, 3.5, f64::INFINITY] {
            let e = RhoExponent::new(value).unwrap();
            let a = ell_norm(&values, e);
            let b = rho_norm(&row, e);
            assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
