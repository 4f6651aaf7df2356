//! Matrix Lie group models: algebra bases, exponentials, conjugation flows
//! and isotropy ranks.
//!
//! Groups act on stored matrices by conjugation `x -> g x g^H`; with every
//! structure group sitting inside the unitary group of its stored size,
//! `g^H = g^{-1}` and the action preserves the flat inner product. The
//! derivative of the flow `t -> exp(t xi) y exp(-t xi)` at `t = 0` is the
//! commutator `[xi, y]`, available both analytically and by central
//! differences.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::EntryField;
use crate::linalg;
use crate::realify::MatrixShape;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant. Relative accuracy is at machine level for spectral norms up
/// to the tens; inputs here stay far below that.
pub fn expm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::SizeMismatch {
            left_rows: a.nrows(),
            left_cols: a.ncols(),
            right_rows: a.ncols(),
            right_cols: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    // One-norm of the matrix, used to pick the squaring count.
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    const THETA13: f64 = 5.371920351148152;
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let a = a.map(|z| z * scale);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let bc = |k: usize| Complex64::new(B[k], 0.0);
    let u_inner = &a6 * (a6.map(|z| z * bc(13)) + a4.map(|z| z * bc(11)) + a2.map(|z| z * bc(9)))
        + a6.map(|z| z * bc(7))
        + a4.map(|z| z * bc(5))
        + a2.map(|z| z * bc(3))
        + id.map(|z| z * bc(1));
    let u = &a * u_inner;
    let v = &a6 * (a6.map(|z| z * bc(12)) + a4.map(|z| z * bc(10)) + a2.map(|z| z * bc(8)))
        + a6.map(|z| z * bc(6))
        + a4.map(|z| z * bc(4))
        + a2.map(|z| z * bc(2))
        + id.map(|z| z * bc(0));

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Internal("Pade denominator is singular".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// How a group element moves points of the model space. Both variants act by
/// matrix conjugation; they differ in what the ambient space of points is
/// (a linear subspace of matrices versus an embedded submanifold such as the
/// group itself or the positive-definite cone).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    /// Conjugation on a linear subspace of matrices (symmetric, Hermitian,
    /// anti-Hermitian, ...).
    AdjointOnSubspace,
    /// Conjugation on an embedded submanifold (a group manifold or a cone).
    ConjugationOnSubmanifold,
}

/// Finite-difference options for flow derivatives and chart Jacobians.
#[derive(Clone, Copy, Debug)]
pub struct FlowOpts {
    pub h: f64,
    pub richardson: bool,
}

impl FlowOpts {
    pub fn from_tol(tol: &Tolerances) -> Self {
        FlowOpts {
            h: tol.fd_step,
            richardson: tol.richardson,
        }
    }
}

/// A matrix model of a compact Lie group: stored shape, semantic entry
/// field, and a basis of the Lie algebra in stored form.
#[derive(Clone, Debug)]
pub struct LieGroupModel {
    pub name: String,
    pub entry_field: EntryField,
    pub shape: MatrixShape,
    algebra_basis: Vec<DMatrix<Complex64>>,
    /// Realified algebra basis vectors as columns, for span checks.
    basis_columns: Vec<DVector<f64>>,
}

impl LieGroupModel {
    /// Build a model and validate the basis: linear independence and
    /// closure of the bracket within the span.
    pub fn new(
        name: impl Into<String>,
        entry_field: EntryField,
        shape: MatrixShape,
        algebra_basis: Vec<DMatrix<Complex64>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let name = name.into();
        for m in &algebra_basis {
            if m.nrows() != shape.size || m.ncols() != shape.size {
                return Err(Error::SizeMismatch {
                    left_rows: m.nrows(),
                    left_cols: m.ncols(),
                    right_rows: shape.size,
                    right_cols: shape.size,
                });
            }
        }
        let basis_columns: Vec<DVector<f64>> =
            algebra_basis.iter().map(|m| shape.realify(m)).collect();
        let dim = basis_columns.len();
        if dim > 0 {
            if linalg::numeric_rank(&basis_columns, tol.rank_rel) != dim {
                return Err(Error::RankDeficient {
                    detail: format!("algebra basis of `{name}` is linearly dependent"),
                });
            }
            let frame = linalg::span_frame(&basis_columns, tol);
            let scale = basis_columns
                .iter()
                .map(|v| v.norm())
                .fold(0.0_f64, f64::max)
                .max(1.0);
            for (i, xi) in algebra_basis.iter().enumerate() {
                for eta in algebra_basis.iter().skip(i + 1) {
                    let bracket = xi * eta - eta * xi;
                    let mut v = shape.realify(&bracket);
                    for q in &frame {
                        let c = q.dot(&v);
                        v -= q * c;
                    }
                    if v.norm() > tol.bracket_closure * scale * scale {
                        return Err(Error::Internal(format!(
                            "algebra basis of `{name}` is not bracket-closed (residual {:.3e})",
                            v.norm()
                        )));
                    }
                }
            }
        }
        Ok(LieGroupModel {
            name,
            entry_field,
            shape,
            algebra_basis,
            basis_columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra_basis.len()
    }

    pub fn algebra_basis(&self) -> &[DMatrix<Complex64>] {
        &self.algebra_basis
    }

    pub fn basis_columns(&self) -> &[DVector<f64>] {
        &self.basis_columns
    }

    /// Algebra element with the given coefficients in the stored basis.
    pub fn algebra_element(&self, coeffs: &[f64]) -> Result<DMatrix<Complex64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                domain: self.dim(),
                codomain: coeffs.len(),
            });
        }
        let n = self.shape.size;
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (c, b) in coeffs.iter().zip(self.algebra_basis.iter()) {
            out += b.map(|z| z * Complex64::new(*c, 0.0));
        }
        Ok(out)
    }

    /// Residual of membership in the unitary realization of the group
    /// (Frobenius distance of `g^H g` from the identity, plus the realness
    /// defect for real-layout models).
    pub fn membership_residual(&self, g: &DMatrix<Complex64>) -> f64 {
        let n = self.shape.size;
        let mut r = (g.adjoint() * g - DMatrix::<Complex64>::identity(n, n)).norm();
        if self.shape.layout == crate::realify::StoredLayout::Real {
            let imag: f64 = g.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
            r = r.max(imag);
        }
        r
    }

    /// Error unless `g` is in the group within tolerance.
    pub fn check_membership(&self, g: &DMatrix<Complex64>, tol: &Tolerances) -> Result<()> {
        let residual = self.membership_residual(g);
        if residual > tol.group_membership * (self.shape.size as f64).sqrt().max(1.0) {
            return Err(Error::NotInGroup { residual });
        }
        Ok(())
    }
}

/// Splitting of the algebra into the isotropy part and its orthogonal
/// complement. The complement carries the restricted flat inner product and
/// is the domain of the orbit map at chart points.
#[derive(Clone, Debug)]
pub struct SubspaceDecomposition {
    k_basis: Vec<DMatrix<Complex64>>,
    l_basis: Vec<DMatrix<Complex64>>,
}

impl SubspaceDecomposition {
    /// Validate: both parts sit inside the algebra span, they intersect
    /// trivially, together they span the algebra, the isotropy part is
    /// bracket-closed, and the two parts are orthogonal.
    pub fn new(
        model: &LieGroupModel,
        k_basis: Vec<DMatrix<Complex64>>,
        l_basis: Vec<DMatrix<Complex64>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let shape = model.shape;
        if k_basis.len() + l_basis.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                domain: model.dim(),
                codomain: k_basis.len() + l_basis.len(),
            });
        }
        let k_cols: Vec<DVector<f64>> = k_basis.iter().map(|m| shape.realify(m)).collect();
        let l_cols: Vec<DVector<f64>> = l_basis.iter().map(|m| shape.realify(m)).collect();
        let mut all = k_cols.clone();
        all.extend(l_cols.iter().cloned());
        if !all.is_empty() && linalg::numeric_rank(&all, tol.rank_rel) != model.dim() {
            return Err(Error::RankDeficient {
                detail: "isotropy and complement do not span the algebra".into(),
            });
        }
        // Orthogonality of the two parts under the flat inner product.
        for a in &k_cols {
            for b in &l_cols {
                let scale = (a.norm() * b.norm()).max(1e-300);
                if a.dot(b).abs() > 1e-9 * scale {
                    return Err(Error::Internal(
                        "isotropy part is not orthogonal to its complement".into(),
                    ));
                }
            }
        }
        // Bracket closure of the isotropy part within itself.
        if !k_cols.is_empty() {
            let frame = linalg::span_frame(&k_cols, tol);
            let scale = k_cols
                .iter()
                .map(|v| v.norm())
                .fold(0.0_f64, f64::max)
                .max(1.0);
            for (i, xi) in k_basis.iter().enumerate() {
                for eta in k_basis.iter().skip(i + 1) {
                    let bracket = xi * eta - eta * xi;
                    let mut v = shape.realify(&bracket);
                    for q in &frame {
                        let c = q.dot(&v);
                        v -= q * c;
                    }
                    if v.norm() > tol.bracket_closure * scale * scale {
                        return Err(Error::Internal(format!(
                            "isotropy part is not bracket-closed (residual {:.3e})",
                            v.norm()
                        )));
                    }
                }
            }
        }
        Ok(SubspaceDecomposition { k_basis, l_basis })
    }

    pub fn k_dim(&self) -> usize {
        self.k_basis.len()
    }

    pub fn l_dim(&self) -> usize {
        self.l_basis.len()
    }

    pub fn k_basis(&self) -> &[DMatrix<Complex64>] {
        &self.k_basis
    }

    pub fn l_basis(&self) -> &[DMatrix<Complex64>] {
        &self.l_basis
    }
}

/// Conjugation action of a group element on a stored point.
pub fn conjugate(g: &DMatrix<Complex64>, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    g * x * g.adjoint()
}

/// `exp(t xi)` for a stored algebra element.
pub fn exp_scaled(xi: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    expm(&xi.map(|z| z * Complex64::new(t, 0.0)))
}

/// Group exponential through ambient coordinates: `xi` must lie in the span
/// of the model's algebra basis.
pub fn exp_matrix(
    model: &LieGroupModel,
    xi: &DVector<f64>,
    t: f64,
    tol: &Tolerances,
) -> Result<DVector<f64>> {
    let m = model.shape.unrealify(xi)?;
    // Span check: project onto the algebra frame and compare.
    let frame = linalg::span_frame(model.basis_columns(), tol);
    let mut residual_v = xi.clone();
    for q in &frame {
        let c = q.dot(&residual_v);
        residual_v -= q * c;
    }
    let scale = 1.0 + xi.norm();
    if residual_v.norm() > tol.span_residual * scale {
        return Err(Error::NotInSpan {
            residual: residual_v.norm(),
            tol: tol.span_residual * scale,
        });
    }
    let g = exp_scaled(&m, t)?;
    Ok(model.shape.realify(&g))
}

/// Central-difference derivative of the conjugation flow
/// `t -> exp(t xi) y exp(-t xi)` at `t = 0`, optionally Richardson
/// extrapolated, in stored-matrix form.
pub fn flow_derivative_matrix(
    y: &DMatrix<Complex64>,
    xi: &DMatrix<Complex64>,
    opts: FlowOpts,
) -> Result<DMatrix<Complex64>> {
    let h = opts.h;
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::StepUnderflow { h, scale: 1.0 });
    }
    let diff = |h: f64| -> Result<DMatrix<Complex64>> {
        let gp = exp_scaled(xi, h)?;
        let gm = exp_scaled(xi, -h)?;
        let fp = conjugate(&gp, y);
        let fm = conjugate(&gm, y);
        Ok((fp - fm).map(|z| z / Complex64::new(2.0 * h, 0.0)))
    };
    let d_h = diff(h)?;
    if !opts.richardson {
        return Ok(d_h);
    }
    let d_h2 = diff(h / 2.0)?;
    // Fourth-order combination (4 D(h/2) - D(h)) / 3.
    Ok((d_h2.map(|z| z * Complex64::new(4.0, 0.0)) - d_h).map(|z| z / Complex64::new(3.0, 0.0)))
}

/// Flow derivative through ambient coordinates.
pub fn flow_derivative(
    shape: MatrixShape,
    y: &DVector<f64>,
    xi: &DVector<f64>,
    opts: FlowOpts,
) -> Result<DVector<f64>> {
    let ym = shape.unrealify(y)?;
    let xm = shape.unrealify(xi)?;
    Ok(shape.realify(&flow_derivative_matrix(&ym, &xm, opts)?))
}

/// Commutator `[xi, y] = xi y - y xi` in stored form.
pub fn commutator(xi: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if xi.shape() != y.shape() {
        return Err(Error::SizeMismatch {
            left_rows: xi.nrows(),
            left_cols: xi.ncols(),
            right_rows: y.nrows(),
            right_cols: y.ncols(),
        });
    }
    Ok(xi * y - y * xi)
}

/// Commutator through ambient coordinates.
pub fn commutator_ambient(
    shape: MatrixShape,
    xi: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    let xm = shape.unrealify(xi)?;
    let ym = shape.unrealify(y)?;
    Ok(shape.realify(&commutator(&xm, &ym)?))
}

/// Rank data of the full-algebra orbit map at a point.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IsotropyRank {
    pub rank: usize,
    pub kernel_dim: usize,
    pub singular_values: Vec<f64>,
}

/// Numeric rank of `xi -> d/dt exp(t xi) y exp(-t xi)` over the whole
/// algebra basis; the kernel dimension is the isotropy algebra dimension at
/// `y`. Flow derivatives are taken by finite differences so the check stays
/// independent of the analytic commutator route.
pub fn isotropy_rank(
    model: &LieGroupModel,
    y: &DMatrix<Complex64>,
    opts: FlowOpts,
    tol: &Tolerances,
) -> Result<IsotropyRank> {
    let dim = model.dim();
    if dim == 0 {
        return Ok(IsotropyRank {
            rank: 0,
            kernel_dim: 0,
            singular_values: Vec::new(),
        });
    }
    let mut columns = Vec::with_capacity(dim);
    for xi in model.algebra_basis() {
        let d = flow_derivative_matrix(y, xi, opts)?;
        columns.push(model.shape.realify(&d));
    }
    let m = DMatrix::from_columns(&columns);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let max = sv.first().copied().unwrap_or(0.0);
    // Scale the cutoff by the operand sizes so central points report exact
    // kernels: columns are commutators, whose natural scale is |y| |xi|.
    let scale = max.max(
        y.norm()
            * model
                .basis_columns()
                .iter()
                .map(|c| c.norm())
                .fold(0.0_f64, f64::max),
    );
    let rank = if scale == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > tol.rank_rel * scale).count()
    };
    Ok(IsotropyRank {
        rank,
        kernel_dim: dim - rank,
        singular_values: sv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<Complex64>::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert!((e - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn exp_of_planar_generator_is_a_rotation() {
        let theta = FRAC_PI_2;
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(-theta, 0.0), c(theta, 0.0), c(0.0, 0.0)],
        );
        let e = expm(&a).unwrap();
        let expect =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((e - expect).norm() < 1e-14);
    }

    #[test]
    fn exp_is_additive_in_the_scale() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.4), c(0.3, -0.2), c(-0.3, -0.2), c(0.0, -0.4)],
        );
        for (s, t) in [(0.3, 0.9), (1.5, -0.7), (2.0, 2.0)] {
            let lhs = exp_scaled(&a, s + t).unwrap();
            let rhs = exp_scaled(&a, s).unwrap() * exp_scaled(&a, t).unwrap();
            assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn exp_handles_large_scaled_inputs() {
        // Norm 10 input: scaling and squaring engaged. exp of a skew
        // matrix is orthogonal, which checks global accuracy.
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(-10.0, 0.0), c(10.0, 0.0), c(0.0, 0.0)],
        );
        let e = expm(&a).unwrap();
        let defect = (e.adjoint() * &e - DMatrix::<Complex64>::identity(2, 2)).norm();
        assert!(defect < 1e-12);
        let expect = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(10.0_f64.cos(), 0.0),
                c(-(10.0_f64.sin()), 0.0),
                c(10.0_f64.sin(), 0.0),
                c(10.0_f64.cos(), 0.0),
            ],
        );
        assert!((e - expect).norm() < 1e-12);
    }

    fn so2_model() -> LieGroupModel {
        let gen =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
                .map(|z| z / Complex64::new(2.0_f64.sqrt(), 0.0));
        LieGroupModel::new(
            "so(2)",
            EntryField::Real,
            MatrixShape::real(2),
            vec![gen],
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn flow_derivative_matches_commutator() {
        let model = so2_model();
        let xi = model.algebra_basis()[0].clone();
        let y =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let fd = flow_derivative_matrix(&y, &xi, FlowOpts::from_tol(&tol())).unwrap();
        let an = commutator(&xi, &y).unwrap();
        assert!((fd.clone() - an).norm() < 1e-9);
        // Expected value: [(E12 - E21)/sqrt2, diag(0, 1)] = -(E12 + E21)/sqrt2.
        let s = -1.0 / 2.0_f64.sqrt();
        let expect =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
        assert!((fd - expect).norm() < 1e-9);
    }

    #[test]
    fn commutator_with_diagonal_scales_offdiagonal_entries() {
        let xi =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let y =
            DMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(7.0, 0.0)]);
        let b = commutator(&xi, &y).unwrap();
        let expect =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(4.0, 0.0), c(4.0, 0.0), c(0.0, 0.0)]);
        assert!((b - expect).norm() < 1e-14);
    }

    #[test]
    fn flow_derivative_is_linear_in_xi() {
        let model = so2_model();
        let xi = model.algebra_basis()[0].clone();
        let y =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]);
        let opts = FlowOpts::from_tol(&tol());
        let d1 = flow_derivative_matrix(&y, &xi, opts).unwrap();
        let d2 = flow_derivative_matrix(&y, &xi.map(|z| z * c(2.5, 0.0)), opts).unwrap();
        assert!((d2 - d1.map(|z| z * c(2.5, 0.0))).norm() < 1e-8);
    }

    #[test]
    fn exp_matrix_requires_span_membership() {
        let model = so2_model();
        // A symmetric matrix is not in so(2).
        let bad = DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            exp_matrix(&model, &bad, 1.0, &tol()),
            Err(Error::NotInSpan { .. })
        ));
        let good = model.shape.realify(&model.algebra_basis()[0]);
        let g = exp_matrix(&model, &good, 0.7, &tol()).unwrap();
        let gm = model.shape.unrealify(&g).unwrap();
        assert!(model.membership_residual(&gm) < 1e-12);
    }

    fn u2_model() -> LieGroupModel {
        // u(2): i E11, i E22, (E12 - E21)/sqrt2, i (E12 + E21)/sqrt2.
        let s = 1.0 / 2.0_f64.sqrt();
        let basis = vec![
            DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, s), c(0.0, s), c(0.0, 0.0)]),
        ];
        LieGroupModel::new(
            "u(2)",
            EntryField::Complex,
            MatrixShape::complex(2),
            basis,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn isotropy_rank_at_distinct_diagonal_point() {
        // Hermitian diag(0, 1) under u(2): kernel is the diagonal torus.
        let model = u2_model();
        let y =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = isotropy_rank(&model, &y, FlowOpts::from_tol(&tol()), &tol()).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel_dim, 2);
    }

    #[test]
    fn isotropy_rank_at_central_point_is_zero() {
        let model = u2_model();
        let y =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = isotropy_rank(&model, &y, FlowOpts::from_tol(&tol()), &tol()).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_dim, 4);
    }

    #[test]
    fn isotropy_rank_for_planar_rotations() {
        // so(2) on diag(0, 1): the single generator acts without kernel.
        let model = so2_model();
        let y =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = isotropy_rank(&model, &y, FlowOpts::from_tol(&tol()), &tol()).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel_dim, 0);
    }

    #[test]
    fn decomposition_validates_orthogonal_split() {
        let model = u2_model();
        let basis = model.algebra_basis().to_vec();
        let dec = SubspaceDecomposition::new(
            &model,
            vec![basis[0].clone(), basis[1].clone()],
            vec![basis[2].clone(), basis[3].clone()],
            &tol(),
        )
        .unwrap();
        assert_eq!(dec.k_dim(), 2);
        assert_eq!(dec.l_dim(), 2);

        // A non-spanning split is rejected.
        assert!(SubspaceDecomposition::new(
            &model,
            vec![basis[0].clone(), basis[0].clone()],
            vec![basis[2].clone(), basis[3].clone()],
            &tol(),
        )
        .is_err());
    }

    #[test]
    fn membership_check_rejects_non_unitary() {
        let model = u2_model();
        let g =
            DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            model.check_membership(&g, &tol()),
            Err(Error::NotInGroup { .. })
        ));
    }
}
