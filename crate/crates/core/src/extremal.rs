//! Seeded derivative-free estimation of two extremal quantities: the best
//! constant in the lower bound `c * norm(A) * norm(B) <= norm(A odot B)`,
//! and the multilinear operator norm of a homogeneous block.
//!
//! Both searches walk feasible points only, so a minimization reports an
//! upper bound on the true infimum and a maximization reports a lower
//! bound on the true supremum. The optimizer is coordinate perturbation
//! with a shrinking step: the norms are not smooth at the exponent
//! extremes, and projection back to the unit sphere is exact by
//! homogeneity (a rescale).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::GradedMatrix;
use crate::multiindex::factorial_f64;
use crate::norm::{rho_norm, RhoExponent};
use crate::scalar::Field;
use crate::series::BlockSeries;

/// Restart and step schedule for the coordinate search. Restart `i` draws
/// from stream `i` of the seeded generator, so results do not depend on
/// execution order and more restarts can only improve the answer.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub shrink: f64,
    pub step_tol: f64,
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iters: 2000,
            seed: 0,
            initial_step: 0.5,
            shrink: 0.7,
            step_tol: 1e-10,
        }
    }
}

/// A lower-constant estimation problem: the shapes of the two factors,
/// the norm exponent, the field to search, and the budget.
#[derive(Clone, Debug)]
pub struct ExtremalProblem {
    pub row_vars: usize,
    pub col_vars: usize,
    /// Degrees (p, p') of the left factor.
    pub left_degrees: (usize, usize),
    /// Degrees (q, q') of the right factor.
    pub right_degrees: (usize, usize),
    pub rho: RhoExponent,
    pub field: Field,
    pub budget: SearchBudget,
}

/// The optimizing point the search ended at.
#[derive(Clone, Debug)]
pub enum ExtremalArgument {
    /// Unit-norm factor pair of a lower-constant search.
    Pair {
        left: GradedMatrix,
        right: GradedMatrix,
    },
    /// Unit-norm direction rows of an operator-norm search.
    Directions(Vec<GradedMatrix>),
}

#[derive(Clone, Debug)]
pub struct ExtremalResult {
    pub value: f64,
    pub argument: ExtremalArgument,
    /// Best value reached by each restart, in restart order.
    pub trace: Vec<f64>,
    /// Whether the winning restart stopped on step tolerance rather than
    /// on the iteration budget.
    pub converged: bool,
    pub field_searched: Field,
}

/// A random matrix with entries uniform in [-1, 1] per part.
pub(crate) fn random_matrix_with(
    rng: &mut ChaCha8Rng,
    row_vars: usize,
    col_vars: usize,
    row_degree: usize,
    col_degree: usize,
    field: Field,
) -> Result<GradedMatrix> {
    let mut m = GradedMatrix::zero(row_vars, col_vars, row_degree, col_degree, field)?;
    for slot in m.entries_mut() {
        *slot = match field {
            Field::Real => Complex64::new(rng.random_range(-1.0..1.0), 0.0),
            Field::Complex => Complex64::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ),
        };
    }
    Ok(m)
}

fn random_unit(
    rng: &mut ChaCha8Rng,
    row_vars: usize,
    col_vars: usize,
    row_degree: usize,
    col_degree: usize,
    field: Field,
    exponent: RhoExponent,
) -> Result<GradedMatrix> {
    loop {
        let m = random_matrix_with(rng, row_vars, col_vars, row_degree, col_degree, field)?;
        let norm = rho_norm(&m, exponent);
        if norm > 1e-9 {
            return Ok(m.scale_f64(1.0 / norm));
        }
    }
}

struct RestartOutcome {
    value: f64,
    state: Vec<GradedMatrix>,
    converged: bool,
}

/// One restart of cyclic coordinate perturbation over a tuple of
/// unit-norm matrices.
fn coordinate_restart<F>(
    mut state: Vec<GradedMatrix>,
    norms: &[RhoExponent],
    objective: &F,
    maximize: bool,
    budget: &SearchBudget,
) -> RestartOutcome
where
    F: Fn(&[GradedMatrix]) -> f64,
{
    let improves = |candidate: f64, best: f64| {
        if maximize {
            candidate > best
        } else {
            candidate < best
        }
    };
    let mut best = objective(&state);
    let mut step = budget.initial_step;
    let mut converged = false;
    for _ in 0..budget.iters {
        let mut improved = false;
        for t in 0..state.len() {
            let parts: &[bool] = match state[t].field() {
                Field::Real => &[false],
                Field::Complex => &[false, true],
            };
            for e in 0..state[t].entries().len() {
                for &imag_part in parts {
                    for sign in [1.0f64, -1.0] {
                        let mut candidate = state[t].clone();
                        {
                            let slot = &mut candidate.entries_mut()[e];
                            if imag_part {
                                slot.im += sign * step;
                            } else {
                                slot.re += sign * step;
                            }
                        }
                        let norm = rho_norm(&candidate, norms[t]);
                        if norm <= 1e-12 {
                            continue;
                        }
                        let candidate = candidate.scale_f64(1.0 / norm);
                        let previous = std::mem::replace(&mut state[t], candidate);
                        let value = objective(&state);
                        if improves(value, best) {
                            best = value;
                            improved = true;
                        } else {
                            state[t] = previous;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= budget.shrink;
            if step < budget.step_tol {
                converged = true;
                break;
            }
        }
    }
    RestartOutcome {
        value: best,
        state,
        converged,
    }
}

fn multi_start<F, G>(
    budget: &SearchBudget,
    norms: &[RhoExponent],
    mut start: G,
    objective: F,
    maximize: bool,
) -> Result<(f64, Vec<GradedMatrix>, Vec<f64>, bool)>
where
    F: Fn(&[GradedMatrix]) -> f64,
    G: FnMut(&mut ChaCha8Rng) -> Result<Vec<GradedMatrix>>,
{
    if budget.restarts == 0 || budget.iters == 0 {
        return Err(Error::Domain(
            "search budget must have restarts >= 1 and iters >= 1".into(),
        ));
    }
    let mut best: Option<RestartOutcome> = None;
    let mut trace = Vec::with_capacity(budget.restarts);
    for restart in 0..budget.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(restart as u64);
        let state = start(&mut rng)?;
        let outcome = coordinate_restart(state, norms, &objective, maximize, budget);
        trace.push(outcome.value);
        let replace = match &best {
            None => true,
            Some(b) => {
                if maximize {
                    outcome.value > b.value
                } else {
                    outcome.value < b.value
                }
            }
        };
        if replace {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart ran");
    Ok((best.value, best.state, trace, best.converged))
}

/// Estimate the infimum of `norm(A odot B)` over unit-norm pairs of the
/// given shapes. The reported value is achieved by the returned pair, so
/// it upper-bounds the true infimum.
pub fn lambda_estimate(problem: &ExtremalProblem) -> Result<ExtremalResult> {
    let (p, pp) = problem.left_degrees;
    let (q, qp) = problem.right_degrees;
    // Surface shape or capacity problems before the search loop.
    let zero_left = GradedMatrix::zero(problem.row_vars, problem.col_vars, p, pp, problem.field)?;
    let zero_right = GradedMatrix::zero(problem.row_vars, problem.col_vars, q, qp, problem.field)?;
    zero_left.odot(&zero_right)?;

    let rho = problem.rho;
    let norms = [rho, rho];
    let objective = move |state: &[GradedMatrix]| {
        let product = state[0]
            .odot(&state[1])
            .expect("shapes fixed at problem construction");
        rho_norm(&product, rho)
    };
    let field = problem.field;
    let (row_vars, col_vars) = (problem.row_vars, problem.col_vars);
    let start = move |rng: &mut ChaCha8Rng| {
        Ok(vec![
            random_unit(rng, row_vars, col_vars, p, pp, field, rho)?,
            random_unit(rng, row_vars, col_vars, q, qp, field, rho)?,
        ])
    };
    let (value, state, trace, converged) =
        multi_start(&problem.budget, &norms, start, objective, false)?;
    let mut state = state.into_iter();
    Ok(ExtremalResult {
        value,
        argument: ExtremalArgument::Pair {
            left: state.next().expect("two factors"),
            right: state.next().expect("two factors"),
        },
        trace,
        converged,
        field_searched: problem.field,
    })
}

/// Estimate the norm of the degree-m multilinear map attached to a block:
/// the supremum of `norm((h1 odot ... odot hm)/m! * A)` over direction
/// rows of unit conjugate norm. The reported value is achieved by the
/// returned directions, so it lower-bounds the true supremum.
pub fn opnorm_estimate(
    block: &GradedMatrix,
    rho: RhoExponent,
    budget: &SearchBudget,
) -> Result<ExtremalResult> {
    let m = block.row_degree();
    if m == 0 {
        let value = rho_norm(block, rho);
        return Ok(ExtremalResult {
            value,
            argument: ExtremalArgument::Directions(Vec::new()),
            trace: vec![value],
            converged: true,
            field_searched: block.field(),
        });
    }
    let varrho = rho.conjugate();
    let norms = vec![varrho; m];
    let inv_m_factorial = 1.0 / factorial_f64(m as u32);
    if inv_m_factorial == 0.0 {
        return Err(Error::Capacity(format!(
            "degree {m} factorial exceeds the double range"
        )));
    }
    let target = block.clone();
    let objective = move |state: &[GradedMatrix]| {
        let mut product = state[0].clone();
        for h in &state[1..] {
            product = product.odot(h).expect("direction shapes are fixed");
        }
        let applied = product
            .scale_f64(inv_m_factorial)
            .ordinary_mul(&target)
            .expect("inner slice matches the block rows");
        rho_norm(&applied, rho)
    };
    let field = block.field();
    let vars = block.row_vars();
    let start = move |rng: &mut ChaCha8Rng| {
        (0..m)
            .map(|_| random_unit(rng, vars, vars, 0, 1, field, varrho))
            .collect::<Result<Vec<_>>>()
    };
    let (value, state, trace, converged) = multi_start(budget, &norms, start, objective, true)?;
    Ok(ExtremalResult {
        value,
        argument: ExtremalArgument::Directions(state),
        trace,
        converged,
        field_searched: field,
    })
}

/// One row of the operator-norm versus weighted-norm comparison table.
#[derive(Clone, Debug)]
pub struct OpnormRootRow {
    pub degree: usize,
    pub op_norm: f64,
    pub rho_norm: f64,
    pub op_root: f64,
    pub rho_root: f64,
}

/// The two root sequences whose limits the open comparison question is
/// about. No claim about the limits is made; this is data.
pub fn opnorm_root_sequence(
    series: &BlockSeries,
    rho: RhoExponent,
    budget: &SearchBudget,
) -> Result<Vec<OpnormRootRow>> {
    if series.blocks().is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut rows = Vec::new();
    for m in 1..=series.truncation() {
        let block = series.block(m).expect("contiguous blocks");
        let op = opnorm_estimate(block, rho, budget)?.value;
        let weighted = rho_norm(block, rho);
        let exponent = 1.0 / m as f64;
        rows.push(OpnormRootRow {
            degree: m,
            op_norm: op,
            rho_norm: weighted,
            op_root: op.powf(exponent),
            rho_root: weighted.powf(exponent),
        });
    }
    Ok(rows)
}
