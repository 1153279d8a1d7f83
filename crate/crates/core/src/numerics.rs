//! Small dense complex linear algebra: just enough for noise whitening and
//! Q-weighted norms on receivers with a handful of antennas.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Zero;

use crate::{Error, Real, Result};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: format!("{cols} columns"),
                actual: format!("{} columns", bad.len()),
            });
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Real diagonal matrix.
    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows} rows"),
                actual: format!("{} rows", bad.len()),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                actual: format!("{} rows", other.rows),
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Complex::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        }))
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                actual: format!("length {}", x.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                actual: format!("{}x{}", self.rows, self.cols),
            });
        }
        let scale = self.data.iter().fold(T::one(), |m, z| m.max(z.norm()));
        let tol = T::epsilon() * T::lit(64.0) * scale;
        for i in 0..self.rows {
            for j in 0..=i {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// `aᴴb`.
#[inline]
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// `‖v‖²`.
#[inline]
pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Lower-triangular `G` with `G·Gᴴ = q`.
///
/// Fails with [`Error::NotPositiveDefinite`] naming the first pivot that is
/// not strictly positive.
pub fn cholesky_factor<T: Real>(q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    q.check_hermitian()?;
    let n = q.rows();
    let mut g = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let diag = (0..j).fold(q[(j, j)].re, |acc, k| acc - g[(j, k)].norm_sqr());
        if !(diag > T::zero()) || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: diag.to_f64().unwrap_or(f64::NAN),
            });
        }
        let pivot = diag.sqrt();
        g[(j, j)] = Complex::new(pivot, T::zero());
        for i in j + 1..n {
            let acc = (0..j).fold(q[(i, j)], |acc, k| acc - g[(i, k)] * g[(j, k)].conj());
            g[(i, j)] = acc / pivot;
        }
    }
    Ok(g)
}

/// Inverse of a Hermitian positive-definite matrix via its Cholesky factor.
pub fn hermitian_inverse<T: Real>(q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let g = cholesky_factor(q)?;
    let n = g.rows();
    // q⁻¹ = G⁻ᴴ G⁻¹; solve G·X = I column by column, then form XᴴX.
    let mut inv_g = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let rhs = if i == col { T::one() } else { T::zero() };
            let acc = (0..i).fold(Complex::new(rhs, T::zero()), |acc, k| {
                acc - g[(i, k)] * inv_g[(k, col)]
            });
            inv_g[(i, col)] = acc / g[(i, i)];
        }
    }
    let mut inv = inv_g.conj_transpose().matmul(&inv_g)?;
    // Symmetrize away rounding so the result passes the Hermitian check downstream.
    for i in 0..n {
        inv[(i, i)].im = T::zero();
        for j in 0..i {
            let avg = (inv[(i, j)] + inv[(j, i)].conj()).scale(T::lit(0.5));
            inv[(i, j)] = avg;
            inv[(j, i)] = avg.conj();
        }
    }
    Ok(inv)
}

/// `xᴴQx` for Hermitian `q`.
pub fn quadratic_norm<T: Real>(x: &[Complex<T>], q: &ComplexMatrix<T>) -> Result<T> {
    if !q.is_square() || q.rows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} matrix", x.len()),
            actual: format!("{}x{}", q.rows(), q.cols()),
        });
    }
    let qx = q.mul_vec(x)?;
    let value = inner(x, &qx);
    if value.im.abs() > T::lit(1e-10) * T::one().max(value.re.abs()) {
        return Err(Error::NonRealQuadraticForm(
            value.im.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(value.re)
}
