//! Dense matrices indexed by graded multi-index slices, with the ordinary
//! matrix product and the graded convolution product.
//!
//! A matrix of row degree `p` and column degree `p'` has its rows indexed
//! by the slice `{|alpha| = p}` over `row_vars` variables and its columns
//! by `{|alpha'| = p'}` over `col_vars` variables, both in the graded
//! order of [`crate::multiindex`]. Entries are stored row-major; real
//! matrices keep a zero imaginary part and carry the `Real` field tag.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::{
    factorial_u128, multibinomial, multinomial, GradedSlice, MultiIndex,
};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct GradedMatrix {
    row_vars: usize,
    col_vars: usize,
    row_degree: usize,
    col_degree: usize,
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl GradedMatrix {
    /// The zero matrix of the given shape.
    pub fn zero(
        row_vars: usize,
        col_vars: usize,
        row_degree: usize,
        col_degree: usize,
        field: Field,
    ) -> Result<Self> {
        let rows = GradedSlice::get(row_vars, row_degree)?.dim();
        let cols = GradedSlice::get(col_vars, col_degree)?.dim();
        Ok(Self {
            row_vars,
            col_vars,
            row_degree,
            col_degree,
            field,
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        })
    }

    /// Build a matrix entry by entry from its index pair.
    pub fn from_fn<F>(
        row_vars: usize,
        col_vars: usize,
        row_degree: usize,
        col_degree: usize,
        field: Field,
        mut f: F,
    ) -> Result<Self>
    where
        F: FnMut(&MultiIndex, &MultiIndex) -> Complex64,
    {
        let row_slice = GradedSlice::get(row_vars, row_degree)?;
        let col_slice = GradedSlice::get(col_vars, col_degree)?;
        let mut entries = Vec::with_capacity(row_slice.dim() * col_slice.dim());
        for alpha in row_slice.elements() {
            for alpha_prime in col_slice.elements() {
                entries.push(f(alpha, alpha_prime));
            }
        }
        Ok(Self {
            row_vars,
            col_vars,
            row_degree,
            col_degree,
            field,
            rows: row_slice.dim(),
            cols: col_slice.dim(),
            entries,
        })
    }

    /// A real matrix from row-major data.
    pub fn from_real(
        row_vars: usize,
        col_vars: usize,
        row_degree: usize,
        col_degree: usize,
        data: &[f64],
    ) -> Result<Self> {
        let mut m = Self::zero(row_vars, col_vars, row_degree, col_degree, Field::Real)?;
        if data.len() != m.entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                m.entries.len(),
                data.len()
            )));
        }
        for (slot, &x) in m.entries.iter_mut().zip(data) {
            *slot = Complex64::new(x, 0.0);
        }
        Ok(m)
    }

    /// A complex matrix from row-major data.
    pub fn from_complex(
        row_vars: usize,
        col_vars: usize,
        row_degree: usize,
        col_degree: usize,
        data: &[Complex64],
    ) -> Result<Self> {
        let mut m = Self::zero(row_vars, col_vars, row_degree, col_degree, Field::Complex)?;
        if data.len() != m.entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                m.entries.len(),
                data.len()
            )));
        }
        m.entries.copy_from_slice(data);
        Ok(m)
    }

    /// The unit matrix on the slice of the given degree.
    pub fn identity(vars: usize, degree: usize, field: Field) -> Result<Self> {
        let dim = GradedSlice::get(vars, degree)?.dim();
        let mut m = Self::zero(vars, vars, degree, degree, field)?;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// A point of F^n as a row of row degree 0 and column degree 1.
    pub fn point_row(values: &[Scalar]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Domain("a point needs at least one coordinate".into()));
        }
        let field = if values.iter().any(|v| v.field() == Field::Complex) {
            Field::Complex
        } else {
            Field::Real
        };
        let mut m = Self::zero(n, n, 0, 1, field)?;
        // The degree-1 column slice lists the unit vectors in coordinate
        // order, so the j-th column is the j-th coordinate.
        for (j, v) in values.iter().enumerate() {
            m.entries[j] = v.as_complex();
        }
        Ok(m)
    }

    /// A point of F^n as a column of row degree 1 and column degree 0.
    pub fn column_vector(values: &[Scalar]) -> Result<Self> {
        let row = Self::point_row(values)?;
        let n = values.len();
        let mut m = Self::zero(n, n, 1, 0, row.field)?;
        m.entries.copy_from_slice(&row.entries);
        Ok(m)
    }

    pub fn row_vars(&self) -> usize {
        self.row_vars
    }

    pub fn col_vars(&self) -> usize {
        self.col_vars
    }

    pub fn row_degree(&self) -> usize {
        self.row_degree
    }

    pub fn col_degree(&self) -> usize {
        self.col_degree
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn row_slice(&self) -> Arc<GradedSlice> {
        GradedSlice::get(self.row_vars, self.row_degree).expect("shape validated at construction")
    }

    pub fn col_slice(&self) -> Arc<GradedSlice> {
        GradedSlice::get(self.col_vars, self.col_degree).expect("shape validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The same data retagged as complex.
    pub fn to_complex(&self) -> Self {
        let mut out = self.clone();
        out.field = Field::Complex;
        out
    }

    /// The same data viewed over a different row variable count. Only a
    /// degree-0 row space (a single zero multi-index) can be swapped out.
    pub fn with_row_vars(&self, row_vars: usize) -> Result<Self> {
        if self.row_degree != 0 {
            return Err(Error::ShapeMismatch(format!(
                "row space of degree {} cannot be re-based",
                self.row_degree
            )));
        }
        GradedSlice::get(row_vars, 0)?;
        let mut out = self.clone();
        out.row_vars = row_vars;
        Ok(out)
    }

    /// The same data viewed over a different column variable count. Only a
    /// degree-0 column space can be swapped out.
    pub fn with_col_vars(&self, col_vars: usize) -> Result<Self> {
        if self.col_degree != 0 {
            return Err(Error::ShapeMismatch(format!(
                "column space of degree {} cannot be re-based",
                self.col_degree
            )));
        }
        GradedSlice::get(col_vars, 0)?;
        let mut out = self.clone();
        out.col_vars = col_vars;
        Ok(out)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.row_vars != other.row_vars
            || self.col_vars != other.col_vars
            || self.row_degree != other.row_degree
            || self.col_degree != other.col_degree
        {
            return Err(Error::ShapeMismatch(format!(
                "({},{}) degrees ({},{}) vs ({},{}) degrees ({},{})",
                self.row_vars,
                self.col_vars,
                self.row_degree,
                self.col_degree,
                other.row_vars,
                other.col_vars,
                other.row_degree,
                other.col_degree
            )));
        }
        Ok(())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        self.same_field(other)?;
        let mut out = self.clone();
        for (slot, z) in out.entries.iter_mut().zip(&other.entries) {
            *slot += z;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        self.same_field(other)?;
        let mut out = self.clone();
        for (slot, z) in out.entries.iter_mut().zip(&other.entries) {
            *slot -= z;
        }
        Ok(out)
    }

    /// Entrywise scaling. A complex scalar cannot scale a real matrix.
    pub fn scale(&self, lambda: Scalar) -> Result<Self> {
        if lambda.field() == Field::Complex && self.field == Field::Real {
            return Err(Error::FieldMismatch(
                "complex scalar applied to a real matrix".into(),
            ));
        }
        Ok(self.scale_complex(lambda.as_complex()))
    }

    pub(crate) fn scale_f64(&self, lambda: f64) -> Self {
        self.scale_complex(Complex64::new(lambda, 0.0))
    }

    fn scale_complex(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        for slot in out.entries.iter_mut() {
            *slot *= lambda;
        }
        out
    }

    /// Ordinary matrix product over the shared inner slice.
    pub fn ordinary_mul(&self, other: &Self) -> Result<Self> {
        if self.col_vars != other.row_vars || self.col_degree != other.row_degree {
            return Err(Error::DimensionMismatch(format!(
                "inner index spaces differ: ({} vars, degree {}) vs ({} vars, degree {})",
                self.col_vars, self.col_degree, other.row_vars, other.row_degree
            )));
        }
        self.same_field(other)?;
        let mut out = Self::zero(
            self.row_vars,
            other.col_vars,
            self.row_degree,
            other.col_degree,
            self.field,
        )?;
        let inner = self.cols;
        for i in 0..self.rows {
            for k in 0..inner {
                let a = self.entries[i * inner + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * out.cols + j] += a * other.entries[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// The graded convolution product.
    ///
    /// For `A` of degrees `(p, p')` and `B` of degrees `(q, q')` over the
    /// same variable counts, the result `C` has degrees `(p+q, p'+q')` and
    ///
    /// ```text
    /// C[alpha, alpha'] = sum over |beta| = p, |beta'| = p',
    ///                    beta <= alpha, beta' <= alpha' (componentwise)
    ///   of (alpha choose beta) * A[beta, beta'] * B[alpha-beta, alpha'-beta']
    /// ```
    ///
    /// with the binomial weight computed exactly.
    pub fn odot(&self, other: &Self) -> Result<Self> {
        if self.row_vars != other.row_vars || self.col_vars != other.col_vars {
            return Err(Error::DimensionMismatch(format!(
                "variable counts differ: ({},{}) vs ({},{})",
                self.row_vars, self.col_vars, other.row_vars, other.col_vars
            )));
        }
        self.same_field(other)?;
        let mut out = Self::zero(
            self.row_vars,
            self.col_vars,
            self.row_degree + other.row_degree,
            self.col_degree + other.col_degree,
            self.field,
        )?;

        // Decompositions of each result row alpha into (beta, alpha-beta)
        // with the exact binomial weight, and of each result column.
        let a_rows = self.row_slice();
        let b_rows = other.row_slice();
        let out_rows = out.row_slice();
        let mut row_splits: Vec<Vec<(usize, usize, f64)>> = Vec::with_capacity(out.rows);
        for alpha in out_rows.elements() {
            let mut splits = Vec::new();
            for (ia, beta) in a_rows.elements().iter().enumerate() {
                if let Some(gamma) = alpha.checked_sub(beta) {
                    let ib = b_rows.rank(&gamma).expect("difference stays in the slice");
                    let w = multibinomial(alpha, beta)? as f64;
                    splits.push((ia, ib, w));
                }
            }
            row_splits.push(splits);
        }

        let a_cols = self.col_slice();
        let b_cols = other.col_slice();
        let out_cols = out.col_slice();
        let mut col_splits: Vec<Vec<(usize, usize)>> = Vec::with_capacity(out.cols);
        for alpha_prime in out_cols.elements() {
            let mut splits = Vec::new();
            for (ja, beta_prime) in a_cols.elements().iter().enumerate() {
                if let Some(gamma) = alpha_prime.checked_sub(beta_prime) {
                    let jb = b_cols.rank(&gamma).expect("difference stays in the slice");
                    splits.push((ja, jb));
                }
            }
            col_splits.push(splits);
        }

        for (i, rsp) in row_splits.iter().enumerate() {
            for (j, csp) in col_splits.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(ia, ib, w) in rsp {
                    for &(ja, jb) in csp {
                        acc += self.entries[ia * self.cols + ja]
                            * other.entries[ib * other.cols + jb]
                            * w;
                    }
                }
                out.entries[i * out.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// The multiplicative unit for the graded product: the single-entry
    /// matrix of degrees (0, 0) holding 1.
    pub fn odot_unit(row_vars: usize, col_vars: usize, field: Field) -> Result<Self> {
        let mut m = Self::zero(row_vars, col_vars, 0, 0, field)?;
        m.entries[0] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    /// The m-fold graded power; `m = 0` gives the unit.
    pub fn odot_power(&self, m: usize) -> Result<Self> {
        let mut acc = Self::odot_unit(self.row_vars, self.col_vars, self.field)?;
        for _ in 0..m {
            acc = acc.odot(self)?;
        }
        Ok(acc)
    }

    /// Entrywise comparison with a relative tolerance and an absolute floor.
    pub fn approx_eq(&self, other: &Self, rel: f64, abs: f64) -> bool {
        if self.same_shape(other).is_err() {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        let tol = (rel * scale).max(abs);
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Closed form for the m-th graded power of a row `h` of degrees (0, 1):
/// the entry at column `alpha'` is the multinomial `m!/alpha'!` times
/// `h^alpha'`.
pub fn h_power_closed(h: &GradedMatrix, m: usize) -> Result<GradedMatrix> {
    if h.row_degree() != 0 || h.col_degree() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected a row of degrees (0, 1), got ({}, {})",
            h.row_degree(),
            h.col_degree()
        )));
    }
    let cols = GradedSlice::get(h.col_vars(), m)?;
    let mut out = GradedMatrix::zero(h.row_vars(), h.col_vars(), 0, m, h.field())?;
    for (j, alpha_prime) in cols.elements().iter().enumerate() {
        let coeff = multinomial(m, alpha_prime)? as f64;
        let mut value = Complex64::new(coeff, 0.0);
        for (k, &e) in alpha_prime.entries().iter().enumerate() {
            if e > 0 {
                value *= h.entry(0, k).powi(e as i32);
            }
        }
        out.entries[j] = value;
    }
    Ok(out)
}

/// Closed form for the m-th graded power of a column `v` of degrees
/// (1, 0): the entry at row `alpha` is `m! * v^alpha`.
pub fn v_power_closed(v: &GradedMatrix, m: usize) -> Result<GradedMatrix> {
    if v.row_degree() != 1 || v.col_degree() != 0 {
        return Err(Error::ShapeMismatch(format!(
            "expected a column of degrees (1, 0), got ({}, {})",
            v.row_degree(),
            v.col_degree()
        )));
    }
    let rows = GradedSlice::get(v.row_vars(), m)?;
    let m_fact = factorial_u128(m as u32)? as f64;
    let mut out = GradedMatrix::zero(v.row_vars(), v.col_vars(), m, 0, v.field())?;
    for (i, alpha) in rows.elements().iter().enumerate() {
        let mut value = Complex64::new(m_fact, 0.0);
        for (k, &e) in alpha.entries().iter().enumerate() {
            if e > 0 {
                value *= v.entry(k, 0).powi(e as i32);
            }
        }
        out.entries[i] = value;
    }
    Ok(out)
}
