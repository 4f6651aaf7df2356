//! Inner-product spaces over ambient real coordinates, Gram volumes, and
//! absolute determinants of linear maps between such spaces.
//!
//! The central identity is `|det A| = Vol(A v_1, ..., A v_n) / Vol(v_1, ...,
//! v_n)` with `Vol` the Gram volume, which makes the determinant independent
//! of the chosen bases. Everything downstream (orbit Jacobians, chart
//! pullbacks) reduces to this.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::tol::Tolerances;
use crate::{Error, Result};

/// A finite-dimensional inner-product space presented by ambient coordinate
/// vectors. `gram[(i, j)]` is the inner product of `basis[i]` and `basis[j]`;
/// it need not agree with the ambient dot product, which lets a space carry
/// a non-flat metric over flat coordinates.
#[derive(Clone, Debug)]
pub struct InnerProductSpace {
    basis: Vec<DVector<f64>>,
    gram: DMatrix<f64>,
    ambient_dim: usize,
    /// Basis vectors as columns, for span resolution.
    basis_matrix: DMatrix<f64>,
    /// Cholesky factor of `basis_matrix^T basis_matrix` (always SPD because
    /// the basis is validated to be independent).
    normal_chol: Cholesky<f64, nalgebra::Dyn>,
}

impl InnerProductSpace {
    /// Standard `R^dim` with the Euclidean inner product.
    pub fn standard(dim: usize) -> Self {
        let basis: Vec<_> = (0..dim)
            .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Self::with_gram(basis, DMatrix::identity(dim, dim), &Tolerances::default())
            .expect("standard basis is orthonormal")
    }

    /// Space spanned by the given ambient vectors, inner product inherited
    /// from the ambient dot product.
    pub fn from_ambient_basis(basis: Vec<DVector<f64>>, tol: &Tolerances) -> Result<Self> {
        let n = basis.len();
        let mut gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = basis[i].dot(&basis[j]);
            }
        }
        Self::with_gram(basis, gram, tol)
    }

    /// Space with an explicitly supplied Gram matrix.
    pub fn with_gram(
        basis: Vec<DVector<f64>>,
        gram: DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            // Trivial space: no basis, no constraints. Volumes over it are
            // empty products and maps out of it have determinant one.
            return Ok(InnerProductSpace {
                basis: Vec::new(),
                gram: DMatrix::zeros(0, 0),
                ambient_dim: 0,
                basis_matrix: DMatrix::zeros(0, 0),
                normal_chol: Cholesky::new(DMatrix::zeros(0, 0)).expect("trivial factorization"),
            });
        }
        let ambient_dim = basis[0].len();
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(Error::AmbientMismatch {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("basis vector"));
            }
        }
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::DimensionMismatch {
                domain: dim,
                codomain: gram.nrows(),
            });
        }
        let sym_defect = (&gram - gram.transpose()).abs().max();
        if sym_defect > tol.gram_symmetry {
            return Err(Error::NotPositiveDefinite {
                detail: format!("symmetry defect {sym_defect:.3e}"),
            });
        }
        let eig = gram.clone().symmetric_eigen().eigenvalues;
        let max_eig = eig.iter().cloned().fold(0.0_f64, f64::max);
        let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if !min_eig.is_finite() || min_eig <= tol.gram_positivity * max_eig.max(1e-300) {
            return Err(Error::NotPositiveDefinite {
                detail: format!("eigenvalue range [{min_eig:.3e}, {max_eig:.3e}]"),
            });
        }

        let basis_matrix = DMatrix::from_columns(&basis);
        let normal = basis_matrix.transpose() * &basis_matrix;
        let normal_chol = Cholesky::new(normal).ok_or_else(|| Error::RankDeficient {
            detail: "basis vectors are linearly dependent".into(),
        })?;

        Ok(InnerProductSpace {
            basis,
            gram,
            ambient_dim,
            basis_matrix,
            normal_chol,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Coordinates of an ambient vector in this basis (least squares), with
    /// a residual check that the vector actually lies in the span.
    pub fn resolve(&self, v: &DVector<f64>, tol: &Tolerances) -> Result<DVector<f64>> {
        if v.len() != self.ambient_dim {
            return Err(Error::AmbientMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        let rhs = self.basis_matrix.transpose() * v;
        let coords = self.normal_chol.solve(&rhs);
        let residual = (&self.basis_matrix * &coords - v).norm();
        let scale = 1.0 + v.norm();
        if residual > tol.span_residual * scale {
            return Err(Error::NotInSpan {
                residual,
                tol: tol.span_residual * scale,
            });
        }
        Ok(coords)
    }

    /// Inner product of two ambient vectors that lie in this space.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>, tol: &Tolerances) -> Result<f64> {
        let ca = self.resolve(a, tol)?;
        let cb = self.resolve(b, tol)?;
        Ok((ca.transpose() * &self.gram * cb)[(0, 0)])
    }
}

/// Determinant of an SPD-ish Gram matrix with the clamp policy: tiny
/// negative determinants (relative to the scale of the matrix) collapse to
/// zero, anything more negative is an internal error.
fn gram_det(g: &DMatrix<f64>, tol: &Tolerances) -> Result<f64> {
    let n = g.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    if let Some(chol) = Cholesky::new(g.clone()) {
        let det: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
        return Ok(det);
    }
    // Cholesky refuses near-singular matrices; fall back to the eigenvalue
    // product and clamp the roundoff-negative directions.
    let eig = g.clone().symmetric_eigen().eigenvalues;
    let scale = eig.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(1e-300);
    let mut det = 1.0;
    for &l in eig.iter() {
        if l < -tol.det_clamp * scale {
            return Err(Error::Internal(format!(
                "gram determinant has a negative eigenvalue {l:.3e} beyond the clamp ({:.3e})",
                tol.det_clamp * scale
            )));
        }
        det *= l.max(0.0);
    }
    Ok(det)
}

/// Gram volume `sqrt(det <v_i, v_j>)` of vectors under a space's inner
/// product. The empty family has volume 1.
pub fn gram_volume(
    vectors: &[DVector<f64>],
    space: &InnerProductSpace,
    tol: &Tolerances,
) -> Result<f64> {
    if vectors.is_empty() {
        return Ok(1.0);
    }
    let coords: Vec<DVector<f64>> = vectors
        .iter()
        .map(|v| space.resolve(v, tol))
        .collect::<Result<_>>()?;
    let k = coords.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let val = (coords[i].transpose() * space.gram() * &coords[j])[(0, 0)];
            g[(i, j)] = val;
            g[(j, i)] = val;
        }
    }
    let det = gram_det(&g, tol)?;
    if !det.is_finite() {
        return Err(Error::NonFinite("gram volume"));
    }
    Ok(det.max(0.0).sqrt())
}

/// Gram volume of ambient vectors under the plain Euclidean dot product;
/// avoids constructing a space when the metric is flat.
pub fn ambient_gram_volume(vectors: &[DVector<f64>], tol: &Tolerances) -> Result<f64> {
    if vectors.is_empty() {
        return Ok(1.0);
    }
    let k = vectors.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let val = vectors[i].dot(&vectors[j]);
            g[(i, j)] = val;
            g[(j, i)] = val;
        }
    }
    Ok(gram_det(&g, tol)?.max(0.0).sqrt())
}

/// A linear map between two inner-product spaces, stored as the coordinate
/// matrix of the images of the domain basis in the codomain basis.
#[derive(Clone, Debug)]
pub struct LinearMapBetween {
    pub domain: InnerProductSpace,
    pub codomain: InnerProductSpace,
    /// `codomain.dim() x domain.dim()`; column `j` holds the codomain
    /// coordinates of the image of `domain.basis()[j]`.
    pub coord: DMatrix<f64>,
}

impl LinearMapBetween {
    pub fn new(
        domain: InnerProductSpace,
        codomain: InnerProductSpace,
        coord: DMatrix<f64>,
    ) -> Result<Self> {
        if coord.ncols() != domain.dim() || coord.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                domain: domain.dim(),
                codomain: coord.ncols(),
            });
        }
        if coord.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("map coordinates"));
        }
        Ok(LinearMapBetween {
            domain,
            codomain,
            coord,
        })
    }
}

/// `|det A|` of a map between spaces of equal dimension, as the ratio of the
/// image Gram volume to the domain Gram volume. Basis independent.
pub fn map_abs_det(map: &LinearMapBetween, tol: &Tolerances) -> Result<f64> {
    let n = map.domain.dim();
    if map.codomain.dim() != n {
        return Err(Error::DimensionMismatch {
            domain: n,
            codomain: map.codomain.dim(),
        });
    }
    // Gram of the image vectors: coord^T G_W coord. The domain Gram volume
    // is sqrt(det G_V).
    let image_gram = map.coord.transpose() * map.codomain.gram() * &map.coord;
    let num = gram_det(&image_gram, tol)?;
    let den = gram_det(map.domain.gram(), tol)?;
    if den <= 0.0 {
        return Err(Error::RankDeficient {
            detail: "domain basis has zero Gram volume".into(),
        });
    }
    let det = (num.max(0.0) / den).sqrt();
    if !det.is_finite() {
        return Err(Error::NonFinite("map determinant"));
    }
    Ok(det)
}

/// Product-of-norms fast path, valid when the domain basis is orthogonal and
/// the image vectors are pairwise orthogonal. Returns `None` when the
/// orthogonality premise fails at relative tolerance `tol.orthogonal_fast_path`.
pub fn map_abs_det_orthogonal(map: &LinearMapBetween, tol: &Tolerances) -> Result<Option<f64>> {
    let n = map.domain.dim();
    if map.codomain.dim() != n {
        return Err(Error::DimensionMismatch {
            domain: n,
            codomain: map.codomain.dim(),
        });
    }
    let gv = map.domain.gram();
    let image_gram = map.coord.transpose() * map.codomain.gram() * &map.coord;
    let orth = |g: &DMatrix<f64>| -> bool {
        for i in 0..n {
            for j in 0..i {
                let scale = (g[(i, i)] * g[(j, j)]).sqrt().max(1e-300);
                if g[(i, j)].abs() > tol.orthogonal_fast_path * scale {
                    return false;
                }
            }
        }
        true
    };
    if !orth(gv) || !orth(&image_gram) {
        return Ok(None);
    }
    let mut det = 1.0;
    for i in 0..n {
        if gv[(i, i)] <= 0.0 {
            return Err(Error::RankDeficient {
                detail: "domain basis vector of zero norm".into(),
            });
        }
        det *= (image_gram[(i, i)].max(0.0) / gv[(i, i)]).sqrt();
    }
    Ok(Some(det))
}

/// Singular values of a map between inner-product spaces, with respect to
/// the two metrics, descending.
pub fn map_singular_values(map: &LinearMapBetween) -> Result<Vec<f64>> {
    let lv = Cholesky::new(map.domain.gram().clone()).ok_or_else(|| Error::RankDeficient {
        detail: "domain gram is not positive definite".into(),
    })?;
    let lw = Cholesky::new(map.codomain.gram().clone()).ok_or_else(|| Error::RankDeficient {
        detail: "codomain gram is not positive definite".into(),
    })?;
    // Orthonormal-coordinate matrix: L_W^T coord L_V^{-T}.
    let mut a = lw.l().transpose() * &map.coord;
    // Right-solve against L_V^T: a <- a (L_V^T)^{-1}, done row by row.
    let lvt = lv.l().transpose();
    let at = lvt
        .transpose()
        .lu()
        .solve(&a.transpose())
        .ok_or_else(|| Error::RankDeficient {
            detail: "domain gram factor is singular".into(),
        })?;
    a = at.transpose();
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Singular values of the map sending an orthonormal frame of `domain` onto
/// the given ambient image vectors, the ambient carrying the flat metric.
/// Equivalent to `map_singular_values` with a flat codomain built on the
/// image span, but well defined at rank deficiency.
pub fn ambient_singular_values(
    images: &[DVector<f64>],
    domain: &InnerProductSpace,
) -> Result<Vec<f64>> {
    if images.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            domain: domain.dim(),
            codomain: images.len(),
        });
    }
    if images.is_empty() {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_columns(images);
    let lv = Cholesky::new(domain.gram().clone()).ok_or_else(|| Error::RankDeficient {
        detail: "domain gram is not positive definite".into(),
    })?;
    let lvt = lv.l().transpose();
    let solved =
        lvt.transpose()
            .lu()
            .solve(&m.transpose())
            .ok_or_else(|| Error::RankDeficient {
                detail: "domain gram factor is singular".into(),
            })?;
    let a = solved.transpose();
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Modified Gram-Schmidt under a space's inner product, with one
/// reorthogonalization pass. Fails on rank deficiency.
pub fn orthonormalize(
    vectors: &[DVector<f64>],
    space: &InnerProductSpace,
    tol: &Tolerances,
) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let original_norm = space.inner(v, v, tol)?.max(0.0).sqrt();
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &out {
                let c = space.inner(q, &w, tol)?;
                w -= q * c;
            }
        }
        let norm = space.inner(&w, &w, tol)?.max(0.0).sqrt();
        if norm <= tol.orthonormal * (1.0 + original_norm) {
            return Err(Error::RankDeficient {
                detail: format!(
                    "vector {} reduced to norm {norm:.3e} during orthonormalization",
                    out.len()
                ),
            });
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Flat-metric orthonormalization of ambient vectors; returns the
/// orthonormal frame of the span, dropping directions below the cutoff.
/// Never errors on rank deficiency, so it is usable at singular points.
pub fn span_frame(vectors: &[DVector<f64>], tol: &Tolerances) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    let scale = vectors
        .iter()
        .map(|v| v.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w -= q * c;
            }
        }
        let norm = w.norm();
        if norm > tol.orthonormal * scale {
            out.push(w / norm);
        }
    }
    out
}

/// Numeric rank of a family of ambient vectors at the crate's relative
/// singular-value cutoff.
pub fn numeric_rank(vectors: &[DVector<f64>], rank_rel: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(vectors);
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_rel * max).count()
}
