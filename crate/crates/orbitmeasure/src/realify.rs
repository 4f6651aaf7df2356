//! Fixed linearizations of real, complex and quaternionic matrices into
//! real coordinate vectors.
//!
//! The layouts are row-major and entrywise: a complex entry `a + b i`
//! contributes `(a, b)`, a quaternion `a + b i + c j + d k` contributes
//! `(a, b, c, d)`. Under these layouts the Euclidean dot product of the
//! coordinates equals `Re tr(A^H B)`, so the flat matrix inner product and
//! the ambient dot product are the same thing and no metric bookkeeping is
//! needed downstream.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::EntryField;
use crate::{Error, Result};

/// Quaternion scalar `a + b i + c j + d k`, storage and arithmetic only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quat {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quat { a, b, c, d }
    }

    pub fn zero() -> Self {
        Quat::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Quat::new(self.a, -self.b, -self.c, -self.d)
    }
}

impl std::ops::Mul for Quat {
    type Output = Quat;

    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        )
    }
}

impl std::ops::Add for Quat {
    type Output = Quat;

    fn add(self, o: Quat) -> Quat {
        Quat::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

/// A matrix tagged with the field its entries live in.
#[derive(Clone, Debug)]
pub enum MatrixOverField {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
    Quaternion(DMatrix<Quat>),
}

impl MatrixOverField {
    pub fn field(&self) -> EntryField {
        match self {
            MatrixOverField::Real(_) => EntryField::Real,
            MatrixOverField::Complex(_) => EntryField::Complex,
            MatrixOverField::Quaternion(_) => EntryField::Quaternion,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixOverField::Real(m) => m.shape(),
            MatrixOverField::Complex(m) => m.shape(),
            MatrixOverField::Quaternion(m) => m.shape(),
        }
    }
}

/// Real dimension contributed by one entry of the given field.
pub fn entry_width(field: EntryField) -> usize {
    match field {
        EntryField::Real => 1,
        EntryField::Complex => 2,
        EntryField::Quaternion => 4,
    }
}

/// Linearize a matrix into ambient real coordinates. The declared field must
/// match the matrix representation.
pub fn realify(field: EntryField, matrix: &MatrixOverField) -> Result<DVector<f64>> {
    if matrix.field() != field {
        return Err(Error::FieldMismatch { expected: field });
    }
    let v = match matrix {
        MatrixOverField::Real(m) => DVector::from_iterator(
            m.nrows() * m.ncols(),
            m.row_iter()
                .flat_map(|r| r.iter().copied().collect::<Vec<_>>()),
        ),
        MatrixOverField::Complex(m) => {
            let mut out = Vec::with_capacity(2 * m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push(m[(i, j)].re);
                    out.push(m[(i, j)].im);
                }
            }
            DVector::from_vec(out)
        }
        MatrixOverField::Quaternion(m) => {
            let mut out = Vec::with_capacity(4 * m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let q = m[(i, j)];
                    out.extend_from_slice(&[q.a, q.b, q.c, q.d]);
                }
            }
            DVector::from_vec(out)
        }
    };
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("realify"));
    }
    Ok(v)
}

/// `Re tr(A^H B)` computed at the matrix level; the realified dot product
/// must reproduce it exactly.
pub fn flat_inner(a: &MatrixOverField, b: &MatrixOverField) -> Result<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    if (ra, ca) != (rb, cb) || a.field() != b.field() {
        return Err(Error::SizeMismatch {
            left_rows: ra,
            left_cols: ca,
            right_rows: rb,
            right_cols: cb,
        });
    }
    let s = match (a, b) {
        (MatrixOverField::Real(x), MatrixOverField::Real(y)) => x.dot(y),
        (MatrixOverField::Complex(x), MatrixOverField::Complex(y)) => {
            x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum()
        }
        (MatrixOverField::Quaternion(x), MatrixOverField::Quaternion(y)) => {
            x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * *q).a).sum()
        }
        _ => unreachable!("field equality checked above"),
    };
    Ok(s)
}

/// Embed a quaternionic matrix as a complex matrix of doubled size, sending
/// the entry `a + b i + c j + d k = alpha + beta j` (with `alpha = a + b i`,
/// `beta = c + d i`) to the 2x2 block `[[alpha, beta], [-conj(beta),
/// conj(alpha)]]`. The embedding is a *-algebra homomorphism, so Hermitian,
/// anti-Hermitian and unitary matrices map to their complex counterparts.
pub fn quaternion_complex_embedding(m: &DMatrix<Quat>) -> DMatrix<Complex64> {
    let (n, p) = m.shape();
    let mut out = DMatrix::<Complex64>::zeros(2 * n, 2 * p);
    for i in 0..n {
        for j in 0..p {
            let q = m[(i, j)];
            let alpha = Complex64::new(q.a, q.b);
            let beta = Complex64::new(q.c, q.d);
            out[(2 * i, 2 * j)] = alpha;
            out[(2 * i, 2 * j + 1)] = beta;
            out[(2 * i + 1, 2 * j)] = -beta.conj();
            out[(2 * i + 1, 2 * j + 1)] = alpha.conj();
        }
    }
    out
}

/// Storage layout of matrices flowing through an ensemble model. Real-field
/// models keep real entries; complex and (embedded) quaternionic models use
/// complex entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoredLayout {
    Real,
    Complex,
}

/// Stored square-matrix shape of a model: layout plus matrix size. All
/// internal arithmetic uses `DMatrix<Complex64>`; real-layout matrices carry
/// exactly zero imaginary parts, which complex arithmetic preserves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixShape {
    pub layout: StoredLayout,
    pub size: usize,
}

impl MatrixShape {
    pub fn real(size: usize) -> Self {
        MatrixShape {
            layout: StoredLayout::Real,
            size,
        }
    }

    pub fn complex(size: usize) -> Self {
        MatrixShape {
            layout: StoredLayout::Complex,
            size,
        }
    }

    /// Length of the realified coordinate vector.
    pub fn ambient_dim(&self) -> usize {
        match self.layout {
            StoredLayout::Real => self.size * self.size,
            StoredLayout::Complex => 2 * self.size * self.size,
        }
    }

    /// Linearize a stored matrix. Real layout drops the (identically zero)
    /// imaginary parts.
    pub fn realify(&self, m: &DMatrix<Complex64>) -> DVector<f64> {
        debug_assert_eq!(m.nrows(), self.size);
        debug_assert_eq!(m.ncols(), self.size);
        let n = self.size;
        match self.layout {
            StoredLayout::Real => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        debug_assert!(m[(i, j)].im.abs() < 1e-10);
                        out.push(m[(i, j)].re);
                    }
                }
                DVector::from_vec(out)
            }
            StoredLayout::Complex => {
                let mut out = Vec::with_capacity(2 * n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(m[(i, j)].re);
                        out.push(m[(i, j)].im);
                    }
                }
                DVector::from_vec(out)
            }
        }
    }

    /// Rebuild a stored matrix from ambient coordinates.
    pub fn unrealify(&self, v: &DVector<f64>) -> Result<DMatrix<Complex64>> {
        if v.len() != self.ambient_dim() {
            return Err(Error::AmbientMismatch {
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        let n = self.size;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        match self.layout {
            StoredLayout::Real => {
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = Complex64::new(v[i * n + j], 0.0);
                    }
                }
            }
            StoredLayout::Complex => {
                for i in 0..n {
                    for j in 0..n {
                        let k = 2 * (i * n + j);
                        m[(i, j)] = Complex64::new(v[k], v[k + 1]);
                    }
                }
            }
        }
        Ok(m)
    }
}
