//! Dense complex linear algebra for the Hilbert-space model.
//!
//! Everything here works on small square matrices (dimension 1 to a few dozen)
//! stored row-major. The eigensolver is a cyclic Jacobi iteration, which is
//! accurate and simple at these sizes.

mod eigen;
mod solve;
mod tolerance;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) use eigen::sqrt_eigenvalue;
pub use eigen::{canonical_phase, extend_to_basis, hermitian_eigh, psd_sqrt, EigenDecomposition};
pub use solve::solve_real;
pub use tolerance::{ToleranceConfig, CLIP_TOL, CLUSTER_TOL, EQ_TOL, PROB_FLOOR, SHARP_TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Builds a matrix from real and (optional) imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let dim = re.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in re.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                let y = match im {
                    Some(im) => {
                        let im_row = im.get(i).ok_or(Error::LengthMismatch {
                            expected: dim,
                            got: im.len(),
                        })?;
                        if im_row.len() != dim {
                            return Err(Error::LengthMismatch {
                                expected: dim,
                                got: im_row.len(),
                            });
                        }
                        im_row[j]
                    }
                    None => 0.0,
                };
                data.push(C64::new(x, y));
            }
        }
        if let Some(im) = im {
            if im.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: im.len(),
                });
            }
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let dim = u.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let dim = cols.len();
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `trace(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.frobenius_norm().max(1.0)
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `⟨v, A v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        inner(v, &self.apply(v))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    fn check_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].re).collect())
            .collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].im).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            dim: self.dim,
            re: self.real_rows(),
            im: Some(self.imag_rows()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.dim == 0 {
            return Err(serde::de::Error::custom("matrix dimension must be positive"));
        }
        if wire.re.len() != wire.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} rows in `re`, found {}",
                wire.dim,
                wire.re.len()
            )));
        }
        let m = ComplexMatrix::from_parts(&wire.re, wire.im.as_deref())
            .map_err(serde::de::Error::custom)?;
        if !m.is_finite() {
            return Err(serde::de::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

/// `‖A − B‖_F ≤ tol · max(1, ‖A‖_F)`.
pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    let diff = a.try_sub(b)?;
    Ok(diff.frobenius_norm() <= tol * a.frobenius_norm().max(1.0))
}

/// `⟨u, v⟩`, antilinear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank-one projector `v v†` onto a unit vector.
pub fn projector(v: &[C64]) -> Result<ComplexMatrix> {
    let norm = vector_norm(v);
    if v.is_empty() || (norm - 1.0).abs() > EQ_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(ComplexMatrix::outer(v, v))
}

pub fn real_vector(xs: &[f64]) -> Vec<C64> {
    xs.iter().map(|&x| C64::new(x, 0.0)).collect()
}
