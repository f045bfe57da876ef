//! Multi-index arithmetic, the graded linear order, and ranked enumeration
//! of the slices `{alpha : |alpha| = p}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// An n-tuple of nonnegative integer exponents, n >= 1.
///
/// The derived ordering is graded: lower total degree first, and within a
/// degree the tuple whose first differing component is *larger* comes
/// first. Tuples of different lengths are ordered by length so that `Ord`
/// stays total; same-length comparisons are the meaningful ones.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("multi-index must have length >= 1".into()));
        }
        Ok(Self { entries })
    }

    /// The zero index of the given length.
    pub fn zero(len: usize) -> Self {
        assert!(len >= 1, "multi-index length must be >= 1");
        Self {
            entries: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Total degree |alpha|.
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|&e| e as usize).sum()
    }

    /// Componentwise `self <= other` (both of the same length).
    pub fn componentwise_le(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a <= b)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add multi-indices of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `self - other`, or `None` when lengths differ or any component
    /// would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.len() != other.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.entries.iter().zip(&other.entries) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Self { entries: out })
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.entries[i]
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| {
                for (a, b) in self.entries.iter().zip(&other.entries) {
                    if a != b {
                        // Larger leading component sorts earlier.
                        return b.cmp(a);
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// The graded order on same-length multi-indices.
pub fn compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare multi-indices of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.cmp(b))
}

/// Exact `k!` in 128 bits.
pub fn factorial_u128(k: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    for i in 2..=k as u128 {
        acc = acc
            .checked_mul(i)
            .ok_or_else(|| Error::Capacity(format!("{k}! overflows 128 bits")))?;
    }
    Ok(acc)
}

/// Exact binomial coefficient `C(n, k)` in 128 bits.
pub fn binomial_u128(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) is divisible by i at every step.
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Capacity(format!("C({n},{k}) overflows 128 bits")))?
            / i as u128;
    }
    Ok(acc)
}

/// Exact `alpha! = alpha_1! ... alpha_n!`.
pub fn multifactorial(a: &MultiIndex) -> Result<u128> {
    let mut acc: u128 = 1;
    for &e in a.entries() {
        acc = acc
            .checked_mul(factorial_u128(e)?)
            .ok_or_else(|| Error::Capacity(format!("{a}! overflows 128 bits")))?;
    }
    Ok(acc)
}

/// Exact `alpha! / (beta! (alpha - beta)!)`, with the convention that the
/// value is 0 whenever `beta` is not componentwise below `alpha`.
pub fn multibinomial(a: &MultiIndex, b: &MultiIndex) -> Result<u128> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot form a binomial of multi-indices with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if !b.componentwise_le(a) {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for (&ai, &bi) in a.entries().iter().zip(b.entries()) {
        acc = acc
            .checked_mul(binomial_u128(ai as u64, bi as u64)?)
            .ok_or_else(|| Error::Capacity(format!("({a} choose {b}) overflows 128 bits")))?;
    }
    Ok(acc)
}

/// Exact multinomial coefficient `m! / parts!` for `|parts| = m`.
pub fn multinomial(m: usize, parts: &MultiIndex) -> Result<u128> {
    if parts.degree() != m {
        return Err(Error::Domain(format!(
            "multinomial parts {parts} do not sum to {m}"
        )));
    }
    let mut acc: u128 = 1;
    let mut partial: u64 = 0;
    for &e in parts.entries() {
        partial += e as u64;
        acc = acc
            .checked_mul(binomial_u128(partial, e as u64)?)
            .ok_or_else(|| Error::Capacity(format!("multinomial({m}, {parts}) overflows")))?;
    }
    Ok(acc)
}

const FLOAT_FACTORIAL_MAX: u32 = 170;

static FLOAT_FACTORIALS: OnceLock<Vec<f64>> = OnceLock::new();

fn float_factorials() -> &'static [f64] {
    FLOAT_FACTORIALS.get_or_init(|| {
        let mut table = Vec::with_capacity(FLOAT_FACTORIAL_MAX as usize + 1);
        let mut acc = 1.0f64;
        table.push(acc);
        for k in 1..=FLOAT_FACTORIAL_MAX as u64 {
            acc *= k as f64;
            table.push(acc);
        }
        table
    })
}

/// `k!` as a double; +infinity past the representable range.
pub fn factorial_f64(k: u32) -> f64 {
    if k <= FLOAT_FACTORIAL_MAX {
        float_factorials()[k as usize]
    } else {
        f64::INFINITY
    }
}

/// `alpha!` as a double; +infinity on overflow.
pub fn multifactorial_f64(a: &MultiIndex) -> f64 {
    a.entries().iter().map(|&e| factorial_f64(e)).product()
}

static LOG_FACTORIALS: OnceLock<Mutex<Vec<f64>>> = OnceLock::new();

/// `ln k!`, i.e. the log-gamma of `k + 1`, from a compensated cumulative
/// table so that the relative error stays far below 1e-12 at small k.
pub fn log_factorial(k: u32) -> f64 {
    let cell = LOG_FACTORIALS.get_or_init(|| Mutex::new(vec![0.0, 0.0]));
    let mut table = cell.lock().expect("log-factorial table poisoned");
    if table.len() <= k as usize {
        // Kahan-compensated extension of ln(k!) = sum of ln(i).
        let mut sum = *table.last().expect("table is never empty");
        let mut comp = 0.0f64;
        for i in table.len() as u64..=k as u64 {
            let y = (i as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
    }
    table[k as usize]
}

/// `ln(alpha!)` as a sum of component log-factorials.
pub fn log_multifactorial(a: &MultiIndex) -> f64 {
    a.entries().iter().map(|&e| log_factorial(e)).sum()
}

/// Number of multi-indices of length `vars` and degree `degree`.
pub fn slice_dim(vars: usize, degree: usize) -> Result<usize> {
    if vars == 0 {
        return Err(Error::Domain("slice dimension requires vars >= 1".into()));
    }
    let d = binomial_u128((degree + vars - 1) as u64, (vars - 1) as u64)?;
    usize::try_from(d).map_err(|_| {
        Error::Capacity(format!(
            "slice ({vars} vars, degree {degree}) has more elements than usize"
        ))
    })
}

/// Default cap on the number of elements a slice may enumerate.
pub const DEFAULT_MAX_SLICE_DIM: usize = 1 << 20;

/// One graded slice `{alpha : |alpha| = degree}`, sorted ascending, with a
/// rank lookup. Built once per `(vars, degree)` and shared.
#[derive(Debug)]
pub struct GradedSlice {
    vars: usize,
    degree: usize,
    elements: Vec<MultiIndex>,
    ranks: HashMap<MultiIndex, usize>,
}

type SliceCache = Mutex<HashMap<(usize, usize), Arc<GradedSlice>>>;
static SLICE_CACHE: OnceLock<SliceCache> = OnceLock::new();

impl GradedSlice {
    pub fn get(vars: usize, degree: usize) -> Result<Arc<Self>> {
        Self::get_with_limit(vars, degree, DEFAULT_MAX_SLICE_DIM)
    }

    pub fn get_with_limit(vars: usize, degree: usize, max_dim: usize) -> Result<Arc<Self>> {
        if vars == 0 {
            return Err(Error::Domain("graded slice requires vars >= 1".into()));
        }
        let cache = SLICE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(found) = cache
            .lock()
            .expect("slice cache poisoned")
            .get(&(vars, degree))
        {
            return Ok(Arc::clone(found));
        }
        let dim = slice_dim(vars, degree)?;
        if dim > max_dim {
            return Err(Error::Capacity(format!(
                "slice ({vars} vars, degree {degree}) has {dim} elements, above the limit {max_dim}"
            )));
        }
        let mut elements = Vec::with_capacity(dim);
        let mut scratch = vec![0u32; vars];
        generate_compositions(degree as u32, 0, &mut scratch, &mut elements);
        elements.sort_unstable();
        let ranks = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let slice = Arc::new(Self {
            vars,
            degree,
            elements,
            ranks,
        });
        cache
            .lock()
            .expect("slice cache poisoned")
            .entry((vars, degree))
            .or_insert_with(|| Arc::clone(&slice));
        Ok(slice)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MultiIndex] {
        &self.elements
    }

    /// The multi-index at `rank` within the sorted slice.
    pub fn unrank(&self, rank: usize) -> Result<&MultiIndex> {
        self.elements.get(rank).ok_or_else(|| {
            Error::Domain(format!(
                "rank {rank} out of range for slice of dimension {}",
                self.elements.len()
            ))
        })
    }

    /// The rank of `idx` within the slice, if it belongs to it.
    pub fn rank(&self, idx: &MultiIndex) -> Option<usize> {
        self.ranks.get(idx).copied()
    }
}

fn generate_compositions(
    remaining: u32,
    pos: usize,
    scratch: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex {
            entries: scratch.clone(),
        });
        return;
    }
    for v in 0..=remaining {
        scratch[pos] = v;
        generate_compositions(remaining - v, pos + 1, scratch, out);
    }
}

/// All multi-indices of the given length and degree, sorted ascending.
pub fn enumerate_slice(vars: usize, degree: usize) -> Result<Vec<MultiIndex>> {
    Ok(GradedSlice::get(vars, degree)?.elements().to_vec())
}
