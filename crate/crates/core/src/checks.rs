//! Seeded randomized verification of the algebraic laws, the closed-form
//! powers, the norm axioms, and every norm inequality the library relies
//! on. The CLI's `verify` subcommand runs [`run_full_suite`]; the test
//! suites reuse the individual checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::extremal::random_matrix_with;
use crate::matrix::{h_power_closed, v_power_closed, GradedMatrix};
use crate::multiindex::{
    binomial_u128, enumerate_slice, factorial_f64, multinomial, MultiIndex,
};
use crate::norm::{rho_norm, RhoExponent};
use crate::scalar::{Field, Scalar};
use crate::series::CoefficientMap;

/// The exponent grid every inequality is exercised on.
pub const RHO_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

/// Outcome of one randomized check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub instances: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(name: &'static str, instances: usize, max_violation: f64, tolerance: f64) -> Self {
        Self {
            name,
            instances,
            max_violation,
            tolerance,
            passed: max_violation <= tolerance,
        }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}  {} ({} instances, max violation {:.3e}, tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.max_violation,
            self.tolerance
        )
    }
}

/// Instance counts and tolerances for the full suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Instances per algebra law and field.
    pub algebra_instances: usize,
    /// Instances per inequality, spread over the exponent grid and fields.
    pub inequality_instances: usize,
    pub algebra_tolerance: f64,
    pub inequality_tolerance: f64,
    /// Highest power checked against the closed forms.
    pub power_degree_max: usize,
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            algebra_instances: 200,
            inequality_instances: 1000,
            algebra_tolerance: 1e-9,
            inequality_tolerance: 1e-12,
            power_degree_max: 6,
        }
    }
}

/// A random matrix with entries uniform in [-1, 1] per part.
pub fn random_matrix(
    rng: &mut ChaCha8Rng,
    row_vars: usize,
    col_vars: usize,
    row_degree: usize,
    col_degree: usize,
    field: Field,
) -> Result<GradedMatrix> {
    random_matrix_with(rng, row_vars, col_vars, row_degree, col_degree, field)
}

/// Coefficients `a_alpha = |alpha|!/alpha!` in `vars` variables: the
/// geometric series in the sum of the variables, whose block norms are
/// `vars^(m/rho)` for every finite exponent.
pub fn geometric_coefficients(vars: usize, truncation: usize) -> Result<CoefficientMap> {
    let mut map = CoefficientMap::new(vars, 1, 0, Field::Real)?;
    let col = MultiIndex::zero(1);
    for m in 0..=truncation {
        for alpha in enumerate_slice(vars, m)? {
            let value = multinomial(m, &alpha)? as f64;
            map.insert(alpha, col.clone(), Scalar::Real(value))?;
        }
    }
    Ok(map)
}

/// One-variable coefficients `a_m = base^m`.
pub fn one_variable_power_coefficients(base: f64, truncation: usize) -> Result<CoefficientMap> {
    let mut map = CoefficientMap::new(1, 1, 0, Field::Real)?;
    let col = MultiIndex::zero(1);
    for m in 0..=truncation {
        map.insert(
            MultiIndex::new(vec![m as u32])?,
            col.clone(),
            Scalar::Real(base.powi(m as i32)),
        )?;
    }
    Ok(map)
}

/// Relative gap between two matrices that ought to be equal.
fn rel_gap(x: &GradedMatrix, y: &GradedMatrix) -> f64 {
    let scale = x.max_abs().max(y.max_abs()).max(1e-12);
    let diff = x
        .entries()
        .iter()
        .zip(y.entries())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    diff / scale
}

/// Relative violation of `lhs <= rhs`; zero when the inequality holds.
fn le_violation(lhs: f64, rhs: f64) -> f64 {
    ((lhs - rhs) / rhs.max(1e-300)).max(0.0)
}

fn random_scalar(rng: &mut ChaCha8Rng, field: Field) -> Scalar {
    match field {
        Field::Real => Scalar::Real(rng.random_range(-2.0..2.0)),
        Field::Complex => Scalar::Complex(Complex64::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )),
    }
}

fn rng_for(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

struct Dims {
    row_vars: usize,
    col_vars: usize,
}

fn random_dims(rng: &mut ChaCha8Rng) -> Dims {
    Dims {
        row_vars: rng.random_range(1..=3),
        col_vars: rng.random_range(1..=3),
    }
}

pub fn check_odot_commutative(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 1);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let d = random_dims(&mut rng);
            let (p, pp, q, qp) = degrees4(&mut rng, 3);
            let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
            let b = random_matrix(&mut rng, d.row_vars, d.col_vars, q, qp, field).unwrap();
            let ab = a.odot(&b).unwrap();
            let ba = b.odot(&a).unwrap();
            worst = worst.max(rel_gap(&ab, &ba));
            instances += 1;
        }
    }
    CheckReport::new("odot commutativity", instances, worst, cfg.algebra_tolerance)
}

pub fn check_odot_distributive(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 2);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let d = random_dims(&mut rng);
            let (p, pp, q, qp) = degrees4(&mut rng, 3);
            let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
            let b = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
            let c = random_matrix(&mut rng, d.row_vars, d.col_vars, q, qp, field).unwrap();
            let lhs = a.add(&b).unwrap().odot(&c).unwrap();
            let rhs = a.odot(&c).unwrap().add(&b.odot(&c).unwrap()).unwrap();
            worst = worst.max(rel_gap(&lhs, &rhs));
            instances += 1;
        }
    }
    CheckReport::new("odot distributivity", instances, worst, cfg.algebra_tolerance)
}

pub fn check_odot_associative(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 3);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let d = random_dims(&mut rng);
            let (p, pp, q, qp) = degrees4(&mut rng, 3);
            let (r, rp) = (rng.random_range(0..=3), rng.random_range(0..=3));
            let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
            let b = random_matrix(&mut rng, d.row_vars, d.col_vars, q, qp, field).unwrap();
            let c = random_matrix(&mut rng, d.row_vars, d.col_vars, r, rp, field).unwrap();
            let lhs = a.odot(&b).unwrap().odot(&c).unwrap();
            let rhs = a.odot(&b.odot(&c).unwrap()).unwrap();
            worst = worst.max(rel_gap(&lhs, &rhs));
            instances += 1;
        }
    }
    CheckReport::new("odot associativity", instances, worst, cfg.algebra_tolerance)
}

pub fn check_odot_scalar_compatible(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 4);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let d = random_dims(&mut rng);
            let (p, pp, q, qp) = degrees4(&mut rng, 3);
            let lambda = random_scalar(&mut rng, field);
            let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
            let b = random_matrix(&mut rng, d.row_vars, d.col_vars, q, qp, field).unwrap();
            let lhs = a.scale(lambda).unwrap().odot(&b).unwrap();
            let rhs = a.odot(&b).unwrap().scale(lambda).unwrap();
            worst = worst.max(rel_gap(&lhs, &rhs));
            instances += 1;
        }
    }
    CheckReport::new(
        "odot scalar compatibility",
        instances,
        worst,
        cfg.algebra_tolerance,
    )
}

/// `A (B odot H) = (A B) odot H` for a degree-(0, s) row H; the row's data
/// is shared between the two sides, retagged to each side's row space.
pub fn check_mixed_left_product(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 5);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let na = rng.random_range(1..=3);
            let nb = rng.random_range(1..=3);
            let nc = rng.random_range(1..=3);
            let p = rng.random_range(0..=3);
            let q = rng.random_range(0..=3);
            let qp = rng.random_range(0..=3);
            let s = rng.random_range(0..=3);
            let a = random_matrix(&mut rng, na, nb, p, q, field).unwrap();
            let b = random_matrix(&mut rng, nb, nc, q, qp, field).unwrap();
            let h_left = random_matrix(&mut rng, nb, nc, 0, s, field).unwrap();
            let h_right = h_left.with_row_vars(na).unwrap();
            let lhs = a.ordinary_mul(&b.odot(&h_left).unwrap()).unwrap();
            let rhs = a.ordinary_mul(&b).unwrap().odot(&h_right).unwrap();
            worst = worst.max(rel_gap(&lhs, &rhs));
            instances += 1;
        }
    }
    CheckReport::new(
        "ordinary product mixes with odot rows",
        instances,
        worst,
        cfg.algebra_tolerance,
    )
}

/// `(E_k odot V) A = A odot V` for a degree-(s, 0) column V, shared
/// between the two sides the same way.
pub fn check_mixed_identity_column(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 6);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for _ in 0..cfg.algebra_instances {
            let n = rng.random_range(1..=3);
            let np = rng.random_range(1..=3);
            let k = rng.random_range(0..=3);
            let s = rng.random_range(0..=3);
            let qp = rng.random_range(0..=3);
            let e_k = GradedMatrix::identity(n, k, field).unwrap();
            let v_left = random_matrix(&mut rng, n, n, s, 0, field).unwrap();
            let v_right = v_left.with_col_vars(np).unwrap();
            let a = random_matrix(&mut rng, n, np, k, qp, field).unwrap();
            let lhs = e_k.odot(&v_left).unwrap().ordinary_mul(&a).unwrap();
            let rhs = a.odot(&v_right).unwrap();
            worst = worst.max(rel_gap(&lhs, &rhs));
            instances += 1;
        }
    }
    CheckReport::new(
        "identity padding absorbs odot columns",
        instances,
        worst,
        cfg.algebra_tolerance,
    )
}

pub fn check_row_power_closed_form(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 7);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for vars in 1..=3usize {
            for m in 0..=cfg.power_degree_max {
                for _ in 0..3 {
                    let h = random_matrix(&mut rng, vars, vars, 0, 1, field).unwrap();
                    let closed = h_power_closed(&h, m).unwrap();
                    let iterated = h.odot_power(m).unwrap();
                    worst = worst.max(rel_gap(&closed, &iterated));
                    instances += 1;
                }
            }
        }
    }
    CheckReport::new("row power closed form", instances, worst, 1e-12)
}

pub fn check_column_power_closed_form(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 8);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for field in [Field::Real, Field::Complex] {
        for vars in 1..=3usize {
            for m in 0..=cfg.power_degree_max {
                for _ in 0..3 {
                    let v = random_matrix(&mut rng, vars, vars, 1, 0, field).unwrap();
                    let closed = v_power_closed(&v, m).unwrap();
                    let iterated = v.odot_power(m).unwrap();
                    worst = worst.max(rel_gap(&closed, &iterated));
                    instances += 1;
                }
            }
        }
    }
    CheckReport::new("column power closed form", instances, worst, 1e-12)
}

pub fn check_norm_axioms(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 9);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let per_cell = (cfg.algebra_instances / RHO_GRID.len()).max(1);
    for field in [Field::Real, Field::Complex] {
        for rho_value in RHO_GRID {
            let rho = RhoExponent::new(rho_value).unwrap();
            for _ in 0..per_cell {
                let d = random_dims(&mut rng);
                let (p, pp, _, _) = degrees4(&mut rng, 3);
                let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
                let b = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
                let zero =
                    GradedMatrix::zero(d.row_vars, d.col_vars, p, pp, field).unwrap();

                // Vanishing exactly on the zero matrix.
                if rho_norm(&zero, rho) != 0.0 {
                    worst = worst.max(1.0);
                }
                if !a.is_zero() && rho_norm(&a, rho) <= 0.0 {
                    worst = worst.max(1.0);
                }

                // Absolute homogeneity.
                let lambda = random_scalar(&mut rng, field);
                let scaled = rho_norm(&a.scale(lambda).unwrap(), rho);
                let expected = lambda.abs() * rho_norm(&a, rho);
                worst = worst.max((scaled - expected).abs() / expected.max(1e-12));

                // Triangle inequality.
                let sum_norm = rho_norm(&a.add(&b).unwrap(), rho);
                worst = worst.max(le_violation(sum_norm, rho_norm(&a, rho) + rho_norm(&b, rho)));
                instances += 1;
            }
        }
    }
    CheckReport::new("norm axioms", instances, worst, cfg.algebra_tolerance)
}

pub fn check_odot_submultiplicative(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 10);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let per_cell = (cfg.inequality_instances / (RHO_GRID.len() * 2)).max(1);
    for field in [Field::Real, Field::Complex] {
        for rho_value in RHO_GRID {
            let rho = RhoExponent::new(rho_value).unwrap();
            for _ in 0..per_cell {
                let d = random_dims(&mut rng);
                let (p, pp, q, qp) = degrees4(&mut rng, 3);
                let a = random_matrix(&mut rng, d.row_vars, d.col_vars, p, pp, field).unwrap();
                let b = random_matrix(&mut rng, d.row_vars, d.col_vars, q, qp, field).unwrap();
                let lhs = rho_norm(&a.odot(&b).unwrap(), rho);
                let rhs = rho_norm(&a, rho) * rho_norm(&b, rho);
                worst = worst.max(le_violation(lhs, rhs));
                instances += 1;
            }
        }
    }
    CheckReport::new(
        "odot norm submultiplicative",
        instances,
        worst,
        cfg.inequality_tolerance,
    )
}

/// `norm(A B) <= (q!)^(2 - 1/rho) (q'!)^(2/rho - 1) norm_rho(A) norm_conj(B)`
/// for the ordinary product over an inner slice of degree q.
pub fn check_ordinary_product_cross_norm(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 11);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let per_cell = (cfg.inequality_instances / (RHO_GRID.len() * 2)).max(1);
    for field in [Field::Real, Field::Complex] {
        for rho_value in RHO_GRID {
            let rho = RhoExponent::new(rho_value).unwrap();
            let varrho = rho.conjugate();
            for _ in 0..per_cell {
                let na = rng.random_range(1..=3);
                let nb = rng.random_range(1..=3);
                let nc = rng.random_range(1..=3);
                let p = rng.random_range(0..=3);
                let q = rng.random_range(0..=3);
                let qp = rng.random_range(0..=3);
                let a = random_matrix(&mut rng, na, nb, p, q, field).unwrap();
                let b = random_matrix(&mut rng, nb, nc, q, qp, field).unwrap();
                let lhs = rho_norm(&a.ordinary_mul(&b).unwrap(), rho);
                let r = rho.value();
                let constant = factorial_f64(q as u32).powf(2.0 - 1.0 / r)
                    * factorial_f64(qp as u32).powf(2.0 / r - 1.0);
                let rhs = constant * rho_norm(&a, rho) * rho_norm(&b, varrho);
                worst = worst.max(le_violation(lhs, rhs));
                instances += 1;
            }
        }
    }
    CheckReport::new(
        "ordinary product cross-norm bound",
        instances,
        worst,
        cfg.inequality_tolerance,
    )
}

/// `norm((h^(m)/m! odot E_k) A) <= C(m+k, k) norm_conj(h)^m norm(A)`.
pub fn check_power_contraction_bound(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 12);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let per_cell = (cfg.inequality_instances / (RHO_GRID.len() * 2)).max(1);
    for field in [Field::Real, Field::Complex] {
        for rho_value in RHO_GRID {
            let rho = RhoExponent::new(rho_value).unwrap();
            let varrho = rho.conjugate();
            for _ in 0..per_cell {
                let n = rng.random_range(1..=3);
                let np = rng.random_range(1..=3);
                let m = rng.random_range(0..=4usize);
                let k = rng.random_range(0..=4usize);
                let qp = rng.random_range(0..=2);
                let h = random_matrix(&mut rng, n, n, 0, 1, field).unwrap();
                let a = random_matrix(&mut rng, n, np, m + k, qp, field).unwrap();
                let m_fact = factorial_f64(m as u32);
                let operator = h_power_closed(&h, m)
                    .unwrap()
                    .scale(Scalar::Real(1.0 / m_fact))
                    .unwrap()
                    .odot(&GradedMatrix::identity(n, k, field).unwrap())
                    .unwrap();
                let lhs = rho_norm(&operator.ordinary_mul(&a).unwrap(), rho);
                let binom = binomial_u128((m + k) as u64, k as u64).unwrap() as f64;
                let rhs = binom * rho_norm(&h, varrho).powi(m as i32) * rho_norm(&a, rho);
                worst = worst.max(le_violation(lhs, rhs));
                instances += 1;
            }
        }
    }
    CheckReport::new(
        "power contraction bound",
        instances,
        worst,
        cfg.inequality_tolerance,
    )
}

/// `norm((h1 odot ... odot hm)/m! A) <= prod norm_conj(hi) * norm(A)`.
pub fn check_multilinear_contraction_bound(cfg: &SuiteConfig) -> CheckReport {
    let mut rng = rng_for(cfg, 13);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let per_cell = (cfg.inequality_instances / (RHO_GRID.len() * 2)).max(1);
    for field in [Field::Real, Field::Complex] {
        for rho_value in RHO_GRID {
            let rho = RhoExponent::new(rho_value).unwrap();
            let varrho = rho.conjugate();
            for _ in 0..per_cell {
                let n = rng.random_range(1..=3);
                let np = rng.random_range(1..=3);
                let m = rng.random_range(0..=4usize);
                let qp = rng.random_range(0..=2);
                let a = random_matrix(&mut rng, n, np, m, qp, field).unwrap();
                let mut product = GradedMatrix::odot_unit(n, n, field).unwrap();
                let mut direction_norms = 1.0f64;
                for _ in 0..m {
                    let h = random_matrix(&mut rng, n, n, 0, 1, field).unwrap();
                    direction_norms *= rho_norm(&h, varrho);
                    product = product.odot(&h).unwrap();
                }
                let m_fact = factorial_f64(m as u32);
                let lhs = rho_norm(
                    &product
                        .scale(Scalar::Real(1.0 / m_fact))
                        .unwrap()
                        .ordinary_mul(&a)
                        .unwrap(),
                    rho,
                );
                let rhs = direction_norms * rho_norm(&a, rho);
                worst = worst.max(le_violation(lhs, rhs));
                instances += 1;
            }
        }
    }
    CheckReport::new(
        "multilinear contraction bound",
        instances,
        worst,
        cfg.inequality_tolerance,
    )
}

/// Every check, in a fixed order.
pub fn run_full_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    vec![
        check_odot_commutative(cfg),
        check_odot_distributive(cfg),
        check_odot_associative(cfg),
        check_odot_scalar_compatible(cfg),
        check_mixed_left_product(cfg),
        check_mixed_identity_column(cfg),
        check_row_power_closed_form(cfg),
        check_column_power_closed_form(cfg),
        check_norm_axioms(cfg),
        check_odot_submultiplicative(cfg),
        check_ordinary_product_cross_norm(cfg),
        check_power_contraction_bound(cfg),
        check_multilinear_contraction_bound(cfg),
    ]
}

fn degrees4(rng: &mut ChaCha8Rng, max: usize) -> (usize, usize, usize, usize) {
    (
        rng.random_range(0..=max),
        rng.random_range(0..=max),
        rng.random_range(0..=max),
        rng.random_range(0..=max),
    )
}
