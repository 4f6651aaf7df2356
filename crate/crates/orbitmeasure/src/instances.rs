//! Registry of concrete ensembles: the Gaussian families (orthogonal,
//! unitary, symplectic), Wishart matrices on the positive-definite cone,
//! Haar-distributed unitary matrices and SU(2), the skew-Hermitian algebra
//! family, and chiral block matrices.
//!
//! Every instance wires the same ingredients: an orthonormal algebra basis
//! split into isotropy part and complement, a diagonal (or torus) chart
//! with analytic tangents, an invariant weight matched to the sampler, the
//! chamber multiplicity, and — where a classical closed form exists — a
//! reference radial density.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::ensemble::{Chart, EnsembleParts, EnsembleSpec};
use crate::error::EntryField;
use crate::lie::{ActionKind, LieGroupModel, SubspaceDecomposition};
use crate::linalg::InnerProductSpace;
use crate::realify::{quaternion_complex_embedding, MatrixShape, Quat};
use crate::spectra;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Coarse family labels for the registered instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Linear,
    NonlinearNoncompact,
    CompactGroup,
    Algebra,
}

/// Size parameters accepted by [`build_instance`]. `n` is the matrix size
/// (for the chiral family: the taller block dimension); `m` is the Wishart
/// degree-of-freedom count or the chiral smaller block dimension.
#[derive(Clone, Copy, Debug, Default)]
pub struct InstanceParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
}

impl InstanceParams {
    pub fn n(n: usize) -> Self {
        InstanceParams {
            n: Some(n),
            m: None,
        }
    }

    pub fn nm(n: usize, m: usize) -> Self {
        InstanceParams {
            n: Some(n),
            m: Some(m),
        }
    }
}

/// Static description of a registry entry.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct InstanceDescriptor {
    pub key: &'static str,
    pub family: Family,
    /// Dyson index of the classical counterpart, where one applies.
    pub beta: Option<u8>,
    pub takes_n: bool,
    pub takes_m: bool,
}

const DESCRIPTORS: [InstanceDescriptor; 8] = [
    InstanceDescriptor {
        key: "gaussian-beta1",
        family: Family::Linear,
        beta: Some(1),
        takes_n: true,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "gaussian-beta2",
        family: Family::Linear,
        beta: Some(2),
        takes_n: true,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "gaussian-beta4",
        family: Family::Linear,
        beta: Some(4),
        takes_n: true,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "spd-wishart",
        family: Family::NonlinearNoncompact,
        beta: Some(1),
        takes_n: true,
        takes_m: true,
    },
    InstanceDescriptor {
        key: "unitary-group",
        family: Family::CompactGroup,
        beta: Some(2),
        takes_n: true,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "su2-group",
        family: Family::CompactGroup,
        beta: None,
        takes_n: false,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "algebra-u",
        family: Family::Algebra,
        beta: Some(2),
        takes_n: true,
        takes_m: false,
    },
    InstanceDescriptor {
        key: "chiral-beta2",
        family: Family::Linear,
        beta: Some(2),
        takes_n: true,
        takes_m: true,
    },
];

/// All registered instance keys.
pub fn instance_keys() -> Vec<&'static str> {
    DESCRIPTORS.iter().map(|d| d.key).collect()
}

pub fn descriptor(key: &str) -> Result<InstanceDescriptor> {
    DESCRIPTORS
        .iter()
        .find(|d| d.key == key)
        .copied()
        .ok_or_else(|| Error::UnknownKey(key.to_string()))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Chamber multiplicity of an instance: how many chart parameters map onto
/// one orbit (orderings of eigenvalues, and the reflection for SU(2)).
pub fn declared_degree(key: &str, params: &InstanceParams) -> Result<usize> {
    match key {
        "gaussian-beta1" | "gaussian-beta2" | "gaussian-beta4" | "spd-wishart"
        | "unitary-group" | "algebra-u" => {
            let n = require_n(key, params)?;
            Ok(factorial(n))
        }
        "su2-group" => Ok(2),
        "chiral-beta2" => {
            let (_p, q) = chiral_dims(params)?;
            Ok(factorial(q))
        }
        _ => Err(Error::UnknownKey(key.to_string())),
    }
}

/// Closed-form reference density at `t`, up to a constant independent of
/// `t`. The chiral family deliberately has none and reports an error.
pub fn oracle_density(key: &str, params: &InstanceParams, t: &[f64]) -> Result<f64> {
    let check_len = |r: usize| -> Result<()> {
        if t.len() != r {
            return Err(Error::ChartDomain(format!(
                "{key} expects {r} parameters, got {}",
                t.len()
            )));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::ChartDomain("non-finite parameter".into()));
        }
        Ok(())
    };
    match key {
        "gaussian-beta1" => {
            check_len(require_n(key, params)?)?;
            Ok(vandermonde(t, 1) * gaussian_weight(t))
        }
        "gaussian-beta2" | "algebra-u" => {
            check_len(require_n(key, params)?)?;
            Ok(vandermonde(t, 2) * gaussian_weight(t))
        }
        "gaussian-beta4" => {
            check_len(require_n(key, params)?)?;
            Ok(vandermonde(t, 4) * gaussian_weight(t))
        }
        "spd-wishart" => {
            let (n, m) = wishart_dims(params)?;
            check_len(n)?;
            if t.iter().any(|&v| v <= 0.0) {
                return Err(Error::ChartDomain(
                    "positive-definite chart needs positive parameters".into(),
                ));
            }
            let power = (m as f64 - n as f64 - 1.0) / 2.0;
            let laguerre: f64 = t
                .iter()
                .map(|&v| v.powf(power) * (-v / 2.0).exp())
                .product();
            Ok(vandermonde(t, 1) * laguerre)
        }
        "unitary-group" => {
            check_len(require_n(key, params)?)?;
            let mut prod = 1.0;
            for i in 0..t.len() {
                for j in (i + 1)..t.len() {
                    let chord = 2.0 * ((t[i] - t[j]) / 2.0).sin().abs();
                    prod *= chord * chord;
                }
            }
            Ok(prod)
        }
        "su2-group" => {
            check_len(1)?;
            let s = t[0].sin();
            Ok(4.0 * s * s)
        }
        "chiral-beta2" => Err(Error::NoOracle(key.to_string())),
        _ => Err(Error::UnknownKey(key.to_string())),
    }
}

fn vandermonde(t: &[f64], beta: u32) -> f64 {
    let mut prod = 1.0;
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            prod *= (t[j] - t[i]).abs().powi(beta as i32);
        }
    }
    prod
}

fn gaussian_weight(t: &[f64]) -> f64 {
    (-t.iter().map(|v| v * v).sum::<f64>() / 2.0).exp()
}

fn require_n(key: &str, params: &InstanceParams) -> Result<usize> {
    if params.m.is_some() && key != "spd-wishart" && key != "chiral-beta2" {
        return Err(Error::BadParams(format!("{key} takes no m parameter")));
    }
    match key {
        "su2-group" => match params.n {
            None | Some(2) => Ok(2),
            Some(n) => Err(Error::BadParams(format!(
                "su2-group is fixed at size 2, got n={n}"
            ))),
        },
        _ => match params.n {
            Some(n) if n >= 1 => Ok(n),
            Some(n) => Err(Error::BadParams(format!("{key} needs n >= 1, got {n}"))),
            None => Err(Error::BadParams(format!("{key} needs the n parameter"))),
        },
    }
}

fn wishart_dims(params: &InstanceParams) -> Result<(usize, usize)> {
    let n = match params.n {
        Some(n) if n >= 1 => n,
        Some(n) => {
            return Err(Error::BadParams(format!(
                "spd-wishart needs n >= 1, got {n}"
            )))
        }
        None => return Err(Error::BadParams("spd-wishart needs the n parameter".into())),
    };
    let m = params.m.unwrap_or(n + 1);
    if m < n {
        return Err(Error::BadParams(format!(
            "spd-wishart needs m >= n, got n={n}, m={m}"
        )));
    }
    Ok((n, m))
}

fn chiral_dims(params: &InstanceParams) -> Result<(usize, usize)> {
    let p = match params.n {
        Some(p) if p >= 1 => p,
        _ => {
            return Err(Error::BadParams(
                "chiral-beta2 needs n >= 1 for the taller block".into(),
            ))
        }
    };
    let q = match params.m {
        Some(q) if q >= 1 => q,
        _ => {
            return Err(Error::BadParams(
                "chiral-beta2 needs m >= 1 for the smaller block".into(),
            ))
        }
    };
    if p < q {
        return Err(Error::BadParams(format!(
            "chiral-beta2 needs n >= m, got n={p}, m={q}"
        )));
    }
    Ok((p, q))
}

/// Build a fully wired ensemble from the registry.
pub fn build_instance(
    key: &str,
    params: &InstanceParams,
    tol: &Tolerances,
) -> Result<EnsembleSpec> {
    let parts = match key {
        "gaussian-beta1" => gaussian_beta1_parts(require_n(key, params)?),
        "gaussian-beta2" => gaussian_beta2_parts(require_n(key, params)?),
        "gaussian-beta4" => gaussian_beta4_parts(require_n(key, params)?, tol)?,
        "spd-wishart" => {
            let (n, m) = wishart_dims(params)?;
            spd_wishart_parts(n, m)
        }
        "unitary-group" => unitary_group_parts(require_n(key, params)?),
        "su2-group" => {
            require_n(key, params)?;
            su2_group_parts()
        }
        "algebra-u" => algebra_u_parts(require_n(key, params)?),
        "chiral-beta2" => {
            let (p, q) = chiral_dims(params)?;
            chiral_beta2_parts(p, q)
        }
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    let parts = finish_parts(parts, tol)?;
    EnsembleSpec::from_parts(parts, tol)
}

/// Intermediate bundle before models are validated: raw bases and closures.
struct RawParts {
    name: String,
    action: ActionKind,
    entry_field: EntryField,
    shape: MatrixShape,
    k_basis: Vec<DMatrix<Complex64>>,
    l_basis: Vec<DMatrix<Complex64>>,
    chart: Chart,
    dim_x: usize,
    x_basis: Option<Vec<DMatrix<Complex64>>>,
    weight: crate::ensemble::WeightFn,
    degree: usize,
    sampler: crate::ensemble::SamplerFn,
    radial: crate::ensemble::RadialFn,
    t_sampler: crate::ensemble::TSamplerFn,
    oracle: Option<crate::ensemble::OracleFn>,
    oracle_is_unit_constant: bool,
    quad_box: Vec<(f64, f64)>,
}

fn finish_parts(raw: RawParts, tol: &Tolerances) -> Result<EnsembleParts> {
    let mut algebra = raw.k_basis.clone();
    algebra.extend(raw.l_basis.iter().cloned());
    let model = LieGroupModel::new(raw.name.clone(), raw.entry_field, raw.shape, algebra, tol)?;
    let split = SubspaceDecomposition::new(&model, raw.k_basis, raw.l_basis, tol)?;
    let x_space = match raw.x_basis {
        Some(basis) => Some(InnerProductSpace::from_ambient_basis(
            basis.iter().map(|b| raw.shape.realify(b)).collect(),
            tol,
        )?),
        None => None,
    };
    Ok(EnsembleParts {
        name: raw.name,
        action: raw.action,
        model,
        split,
        chart: raw.chart,
        dim_x: raw.dim_x,
        x_space,
        weight: raw.weight,
        degree: raw.degree,
        sampler: raw.sampler,
        radial: raw.radial,
        t_sampler: raw.t_sampler,
        oracle: raw.oracle,
        oracle_is_unit_constant: raw.oracle_is_unit_constant,
        quad_box: raw.quad_box,
    })
}

// ---------------------------------------------------------------------------
// Shared matrix builders and distribution helpers.

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_matrix(n: usize, i: usize, j: usize, v: Complex64) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    m[(i, j)] = v;
    m
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal basis of real antisymmetric matrices: (E_ij - E_ji)/sqrt(2).
fn so_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(i, j)] = c(FRAC_1_SQRT_2, 0.0);
            m[(j, i)] = c(-FRAC_1_SQRT_2, 0.0);
            out.push(m);
        }
    }
    out
}

/// Orthonormal basis of skew-Hermitian matrices, split into the diagonal
/// torus and the off-diagonal complement.
fn u_basis_split(n: usize) -> (Vec<DMatrix<Complex64>>, Vec<DMatrix<Complex64>>) {
    let mut k = Vec::new();
    for i in 0..n {
        k.push(unit_matrix(n, i, i, c(0.0, 1.0)));
    }
    let mut l = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = DMatrix::<Complex64>::zeros(n, n);
            a[(i, j)] = c(FRAC_1_SQRT_2, 0.0);
            a[(j, i)] = c(-FRAC_1_SQRT_2, 0.0);
            l.push(a);
            let mut s = DMatrix::<Complex64>::zeros(n, n);
            s[(i, j)] = c(0.0, FRAC_1_SQRT_2);
            s[(j, i)] = c(0.0, FRAC_1_SQRT_2);
            l.push(s);
        }
    }
    (k, l)
}

/// Orthonormal basis of real symmetric matrices.
fn symmetric_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(unit_matrix(n, i, i, c(1.0, 0.0)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(i, j)] = c(FRAC_1_SQRT_2, 0.0);
            m[(j, i)] = c(FRAC_1_SQRT_2, 0.0);
            out.push(m);
        }
    }
    out
}

/// Orthonormal basis of Hermitian matrices.
fn hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = symmetric_basis(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(i, j)] = c(0.0, FRAC_1_SQRT_2);
            m[(j, i)] = c(0.0, -FRAC_1_SQRT_2);
            out.push(m);
        }
    }
    out
}

fn quat_entry_matrix(n: usize, i: usize, j: usize, q: Quat) -> DMatrix<Quat> {
    DMatrix::from_fn(n, n, |r, s| if r == i && s == j { q } else { Quat::zero() })
}

const QUAT_UNITS: [Quat; 4] = [
    Quat {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    },
    Quat {
        a: 0.0,
        b: 1.0,
        c: 0.0,
        d: 0.0,
    },
    Quat {
        a: 0.0,
        b: 0.0,
        c: 1.0,
        d: 0.0,
    },
    Quat {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    },
];

fn quat_neg(q: Quat) -> Quat {
    Quat::new(-q.a, -q.b, -q.c, -q.d)
}

/// Embedded orthonormal basis of quaternion skew-Hermitian matrices, split
/// into the diagonal sp(1)^n part and the off-diagonal complement.
fn sp_basis_split(n: usize) -> (Vec<DMatrix<Complex64>>, Vec<DMatrix<Complex64>>) {
    let mut k = Vec::new();
    for i in 0..n {
        for unit in &QUAT_UNITS[1..] {
            let m = quaternion_complex_embedding(&quat_entry_matrix(n, i, i, *unit));
            k.push(m.map(|z| z * c(FRAC_1_SQRT_2, 0.0)));
        }
    }
    let mut l = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for unit in &QUAT_UNITS {
                let mut q = quat_entry_matrix(n, i, j, *unit);
                q[(j, i)] = quat_neg(unit.conj());
                let m = quaternion_complex_embedding(&q);
                l.push(m.map(|z| z * c(0.5, 0.0)));
            }
        }
    }
    (k, l)
}

/// Embedded orthonormal basis of quaternion Hermitian (self-dual) matrices.
fn quaternion_hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let m = quaternion_complex_embedding(&quat_entry_matrix(n, i, i, QUAT_UNITS[0]));
        out.push(m.map(|z| z * c(FRAC_1_SQRT_2, 0.0)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for unit in &QUAT_UNITS {
                let mut q = quat_entry_matrix(n, i, j, *unit);
                q[(j, i)] = unit.conj();
                let m = quaternion_complex_embedding(&q);
                out.push(m.map(|z| z * c(0.5, 0.0)));
            }
        }
    }
    out
}

fn gauss(rng: &mut dyn RngCore) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-distributed unitary matrix: complex Ginibre columns orthonormalized
/// by modified Gram–Schmidt, which fixes the triangular factor's diagonal
/// to be real positive.
fn haar_unitary(n: usize, rng: &mut dyn RngCore) -> DMatrix<Complex64> {
    let mut g = DMatrix::from_fn(n, n, |_, _| {
        c(gauss(rng) * FRAC_1_SQRT_2, gauss(rng) * FRAC_1_SQRT_2)
    });
    for j in 0..n {
        let mut col = g.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let qi = g.column(i).into_owned();
                let coef = qi.dotc(&col);
                col -= qi * coef;
            }
        }
        let norm = col.norm();
        col /= c(norm, 0.0);
        g.set_column(j, &col);
    }
    g
}

fn min_pairwise_gap(t: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            min = min.min((t[i] - t[j]).abs());
        }
    }
    min
}

fn min_circular_chord(t: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            min = min.min(2.0 * ((t[i] - t[j]) / 2.0).sin().abs());
        }
    }
    min
}

/// Ascending Gaussian draws with a guaranteed minimum gap, for randomized
/// probes at regular chart parameters.
fn sorted_gauss_with_margin(n: usize, margin: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let mut t: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
        t.sort_by(f64::total_cmp);
        if n < 2 || min_pairwise_gap(&t) > margin {
            return t;
        }
    }
}

fn diagonal_chart(n: usize) -> Chart {
    Chart::new(
        n,
        Box::new(move |t: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| if i == j { c(t[i], 0.0) } else { c(0.0, 0.0) })
        }),
        Box::new(move |_t: &[f64], j: usize| unit_matrix(n, j, j, c(1.0, 0.0))),
        Box::new(|_t: &[f64]| true),
        Box::new(|t: &[f64], gap: f64| min_pairwise_gap(t) > gap),
    )
}

fn trace_squared(y: &DMatrix<Complex64>) -> f64 {
    // Re tr(y^2) without forming the full product.
    let n = y.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let z = y[(i, k)] * y[(k, i)];
            acc += z.re;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Gaussian orthogonal family: real symmetric matrices under rotations.

fn gaussian_beta1_parts(n: usize) -> RawParts {
    let shape = MatrixShape::real(n);
    let sampler = move |rng: &mut dyn RngCore| {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(gauss(rng), 0.0);
            for j in (i + 1)..n {
                let v = gauss(rng) * FRAC_1_SQRT_2;
                m[(i, j)] = c(v, 0.0);
                m[(j, i)] = c(v, 0.0);
            }
        }
        m
    };
    RawParts {
        name: format!("gaussian-beta1({n})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Real,
        shape,
        k_basis: Vec::new(),
        l_basis: so_basis(n),
        chart: diagonal_chart(n),
        dim_x: n * (n + 1) / 2,
        x_basis: Some(symmetric_basis(n)),
        weight: Box::new(|y: &DMatrix<Complex64>| (-trace_squared(y) / 2.0).exp()),
        degree: factorial(n),
        sampler: Box::new(sampler),
        radial: Box::new(|x: &DMatrix<Complex64>| Ok(spectra::hermitian_eigenvalues(x))),
        t_sampler: Box::new(move |rng: &mut dyn RngCore| sorted_gauss_with_margin(n, 0.05, rng)),
        oracle: Some(Box::new(|t: &[f64]| vandermonde(t, 1) * gaussian_weight(t))),
        oracle_is_unit_constant: true,
        quad_box: vec![(-8.0, 8.0); n],
    }
}

// ---------------------------------------------------------------------------
// Gaussian unitary family: Hermitian matrices under the unitary group.

fn gaussian_beta2_parts(n: usize) -> RawParts {
    let shape = MatrixShape::complex(n);
    let (k_basis, l_basis) = u_basis_split(n);
    let sampler = move |rng: &mut dyn RngCore| {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(gauss(rng), 0.0);
            for j in (i + 1)..n {
                let re = gauss(rng) * FRAC_1_SQRT_2;
                let im = gauss(rng) * FRAC_1_SQRT_2;
                m[(i, j)] = c(re, im);
                m[(j, i)] = c(re, -im);
            }
        }
        m
    };
    RawParts {
        name: format!("gaussian-beta2({n})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Complex,
        shape,
        k_basis,
        l_basis,
        chart: diagonal_chart(n),
        dim_x: n * n,
        x_basis: Some(hermitian_basis(n)),
        weight: Box::new(|y: &DMatrix<Complex64>| (-trace_squared(y) / 2.0).exp()),
        degree: factorial(n),
        sampler: Box::new(sampler),
        radial: Box::new(|x: &DMatrix<Complex64>| Ok(spectra::hermitian_eigenvalues(x))),
        t_sampler: Box::new(move |rng: &mut dyn RngCore| sorted_gauss_with_margin(n, 0.05, rng)),
        oracle: Some(Box::new(|t: &[f64]| vandermonde(t, 2) * gaussian_weight(t))),
        oracle_is_unit_constant: true,
        quad_box: vec![(-8.0, 8.0); n],
    }
}

// ---------------------------------------------------------------------------
// Gaussian symplectic family: quaternion self-dual matrices through the
// complex embedding of doubled size.

fn gaussian_beta4_parts(n: usize, tol: &Tolerances) -> Result<RawParts> {
    let shape = MatrixShape::complex(2 * n);
    let (k_basis, l_basis) = sp_basis_split(n);
    let x_basis = quaternion_hermitian_basis(n);
    let x_columns: Vec<nalgebra::DVector<f64>> = x_basis.iter().map(|b| shape.realify(b)).collect();
    // Orthonormality of the embedded basis is what makes the sampler's
    // coordinate density equal the declared weight; check it once here.
    let space = InnerProductSpace::from_ambient_basis(x_columns, tol)?;
    let gram = space.gram();
    for i in 0..space.dim() {
        for j in 0..space.dim() {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (gram[(i, j)] - expect).abs() > 1e-12 {
                return Err(Error::Internal(
                    "quaternion Hermitian basis is not orthonormal after embedding".into(),
                ));
            }
        }
    }
    let sampler_basis: Vec<DMatrix<Complex64>> = x_basis.clone();
    let sampler = move |rng: &mut dyn RngCore| {
        let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        let scale = 2.0_f64.sqrt();
        for b in &sampler_basis {
            let coef = c(gauss(rng) * scale, 0.0);
            m += b.map(|z| z * coef);
        }
        m
    };
    let chart = Chart::new(
        n,
        Box::new(move |t: &[f64]| {
            DMatrix::from_fn(2 * n, 2 * n, |i, j| {
                if i == j {
                    c(t[i / 2], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
        }),
        Box::new(move |_t: &[f64], j: usize| {
            let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            m[(2 * j, 2 * j)] = c(1.0, 0.0);
            m[(2 * j + 1, 2 * j + 1)] = c(1.0, 0.0);
            m
        }),
        Box::new(|_t: &[f64]| true),
        Box::new(|t: &[f64], gap: f64| min_pairwise_gap(t) > gap),
    );
    Ok(RawParts {
        name: format!("gaussian-beta4({n})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Quaternion,
        shape,
        k_basis,
        l_basis,
        chart,
        dim_x: 2 * n * n - n,
        x_basis: Some(x_basis),
        weight: Box::new(|y: &DMatrix<Complex64>| (-trace_squared(y) / 4.0).exp()),
        degree: factorial(n),
        sampler: Box::new(sampler),
        radial: Box::new(move |x: &DMatrix<Complex64>| {
            let ev = spectra::hermitian_eigenvalues(x);
            // Kramers pairs: the embedded spectrum is doubled; collapse
            // adjacent pairs to the quaternionic eigenvalues.
            let mut t = Vec::with_capacity(n);
            for i in 0..n {
                t.push((ev[2 * i] + ev[2 * i + 1]) / 2.0);
            }
            Ok(t)
        }),
        t_sampler: Box::new(move |rng: &mut dyn RngCore| sorted_gauss_with_margin(n, 0.05, rng)),
        oracle: Some(Box::new(|t: &[f64]| vandermonde(t, 4) * gaussian_weight(t))),
        oracle_is_unit_constant: false,
        quad_box: vec![(-8.0, 8.0); n],
    })
}

// ---------------------------------------------------------------------------
// Wishart family: positive-definite symmetric matrices under rotations.

fn spd_wishart_parts(n: usize, m: usize) -> RawParts {
    let shape = MatrixShape::real(n);
    let power = (m as f64 - n as f64 - 1.0) / 2.0;
    let chart = Chart::new(
        n,
        Box::new(move |t: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| if i == j { c(t[i], 0.0) } else { c(0.0, 0.0) })
        }),
        Box::new(move |_t: &[f64], j: usize| unit_matrix(n, j, j, c(1.0, 0.0))),
        Box::new(|t: &[f64]| t.iter().all(|&v| v > 0.0)),
        Box::new(|t: &[f64], gap: f64| min_pairwise_gap(t) > gap),
    );
    let sampler = move |rng: &mut dyn RngCore| {
        let g = DMatrix::<f64>::from_fn(n, m, |_, _| gauss(rng));
        let x = &g * g.transpose();
        x.map(|v| c(v, 0.0))
    };
    let radial = |x: &DMatrix<Complex64>| Ok(spectra::hermitian_eigenvalues(x));
    let t_sampler = move |rng: &mut dyn RngCore| loop {
        let g = DMatrix::<f64>::from_fn(n, m, |_, _| gauss(rng));
        let x = (&g * g.transpose()).map(|v| c(v, 0.0));
        let t = spectra::hermitian_eigenvalues(&x);
        if (n < 2 || min_pairwise_gap(&t) > 0.1) && t.iter().all(|&v| v > 0.05) {
            return t;
        }
    };
    RawParts {
        name: format!("spd-wishart({n},{m})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Real,
        shape,
        k_basis: Vec::new(),
        l_basis: so_basis(n),
        chart,
        dim_x: n * (n + 1) / 2,
        x_basis: Some(symmetric_basis(n)),
        weight: Box::new(move |y: &DMatrix<Complex64>| {
            let det = y.determinant().re;
            let tr: f64 = y.diagonal().iter().map(|z| z.re).sum();
            if det <= 0.0 {
                return 0.0;
            }
            det.powf(power) * (-tr / 2.0).exp()
        }),
        degree: factorial(n),
        sampler: Box::new(sampler),
        radial: Box::new(radial),
        t_sampler: Box::new(t_sampler),
        oracle: Some(Box::new(move |t: &[f64]| {
            let laguerre: f64 = t
                .iter()
                .map(|&v| v.powf(power) * (-v / 2.0).exp())
                .product();
            vandermonde(t, 1) * laguerre
        })),
        oracle_is_unit_constant: false,
        quad_box: vec![(1e-8, 60.0); n],
    }
}

// ---------------------------------------------------------------------------
// Unitary group under its own conjugation: Haar matrices, torus chart.

fn unitary_group_parts(n: usize) -> RawParts {
    let shape = MatrixShape::complex(n);
    let (k_basis, l_basis) = u_basis_split(n);
    let chart = Chart::new(
        n,
        Box::new(move |t: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c(t[i].cos(), t[i].sin())
                } else {
                    c(0.0, 0.0)
                }
            })
        }),
        Box::new(move |t: &[f64], j: usize| unit_matrix(n, j, j, c(-t[j].sin(), t[j].cos()))),
        Box::new(|_t: &[f64]| true),
        Box::new(|t: &[f64], gap: f64| min_circular_chord(t) > gap),
    );
    let t_sampler = move |rng: &mut dyn RngCore| loop {
        let mut t: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();
        t.sort_by(f64::total_cmp);
        if n < 2 || min_circular_chord(&t) > 0.1 {
            return t;
        }
    };
    RawParts {
        name: format!("unitary-group({n})"),
        action: ActionKind::ConjugationOnSubmanifold,
        entry_field: EntryField::Complex,
        shape,
        k_basis,
        l_basis,
        chart,
        dim_x: n * n,
        x_basis: None,
        weight: Box::new(|_y: &DMatrix<Complex64>| 1.0),
        degree: factorial(n),
        sampler: Box::new(move |rng: &mut dyn RngCore| haar_unitary(n, rng)),
        radial: Box::new(|x: &DMatrix<Complex64>| spectra::unitary_eigenphases(x)),
        t_sampler: Box::new(t_sampler),
        oracle: Some(Box::new(|t: &[f64]| {
            let mut prod = 1.0;
            for i in 0..t.len() {
                for j in (i + 1)..t.len() {
                    let chord = 2.0 * ((t[i] - t[j]) / 2.0).sin().abs();
                    prod *= chord * chord;
                }
            }
            prod
        })),
        oracle_is_unit_constant: true,
        quad_box: vec![(0.0, 2.0 * PI); n],
    }
}

// ---------------------------------------------------------------------------
// SU(2) under conjugation: one eigenphase in [0, pi].

fn su2_group_parts() -> RawParts {
    let shape = MatrixShape::complex(2);
    let s = FRAC_1_SQRT_2;
    let k_basis = vec![DMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, s), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -s)],
    )];
    let l_basis = vec![
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, s), c(0.0, s), c(0.0, 0.0)]),
    ];
    let chart = Chart::new(
        1,
        Box::new(|t: &[f64]| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    c(t[0].cos(), t[0].sin()),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(t[0].cos(), -t[0].sin()),
                ],
            )
        }),
        Box::new(|t: &[f64], _j: usize| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    c(-t[0].sin(), t[0].cos()),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(-t[0].sin(), -t[0].cos()),
                ],
            )
        }),
        Box::new(|_t: &[f64]| true),
        Box::new(|t: &[f64], gap: f64| 2.0 * t[0].sin().abs() > gap),
    );
    let sampler = move |rng: &mut dyn RngCore| loop {
        let v = [gauss(rng), gauss(rng), gauss(rng), gauss(rng)];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let (a, b, cc, d) = (v[0] / norm, v[1] / norm, v[2] / norm, v[3] / norm);
        return DMatrix::from_row_slice(2, 2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)]);
    };
    RawParts {
        name: "su2-group".into(),
        action: ActionKind::ConjugationOnSubmanifold,
        entry_field: EntryField::Complex,
        shape,
        k_basis,
        l_basis,
        chart,
        dim_x: 3,
        x_basis: None,
        weight: Box::new(|_y: &DMatrix<Complex64>| 1.0),
        degree: 2,
        sampler: Box::new(sampler),
        radial: Box::new(|x: &DMatrix<Complex64>| {
            // Eigenphases of a special unitary 2x2 matrix are +/- theta
            // with trace 2 cos(theta).
            let tr = (x[(0, 0)] + x[(1, 1)]).re / 2.0;
            Ok(vec![tr.clamp(-1.0, 1.0).acos()])
        }),
        t_sampler: Box::new(|rng: &mut dyn RngCore| vec![0.05 + rng.gen::<f64>() * (PI - 0.1)]),
        oracle: Some(Box::new(|t: &[f64]| {
            let s = t[0].sin();
            4.0 * s * s
        })),
        oracle_is_unit_constant: true,
        quad_box: vec![(0.0, PI)],
    }
}

// ---------------------------------------------------------------------------
// Skew-Hermitian algebra family under the adjoint action.

fn algebra_u_parts(n: usize) -> RawParts {
    let shape = MatrixShape::complex(n);
    let (k_basis, l_basis) = u_basis_split(n);
    let mut x_basis = k_basis.clone();
    x_basis.extend(l_basis.iter().cloned());
    let chart = Chart::new(
        n,
        Box::new(move |t: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| if i == j { c(0.0, t[i]) } else { c(0.0, 0.0) })
        }),
        Box::new(move |_t: &[f64], j: usize| unit_matrix(n, j, j, c(0.0, 1.0))),
        Box::new(|_t: &[f64]| true),
        Box::new(|t: &[f64], gap: f64| min_pairwise_gap(t) > gap),
    );
    let sampler = move |rng: &mut dyn RngCore| {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(0.0, gauss(rng));
            for j in (i + 1)..n {
                let re = gauss(rng) * FRAC_1_SQRT_2;
                let im = gauss(rng) * FRAC_1_SQRT_2;
                // Skew-Hermitian: entry and negated conjugate across the
                // diagonal.
                m[(i, j)] = c(re, im);
                m[(j, i)] = c(-re, im);
            }
        }
        m
    };
    RawParts {
        name: format!("algebra-u({n})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Complex,
        shape,
        k_basis,
        l_basis,
        chart,
        dim_x: n * n,
        x_basis: Some(x_basis),
        weight: Box::new(|y: &DMatrix<Complex64>| (trace_squared(y) / 2.0).exp()),
        degree: factorial(n),
        sampler: Box::new(sampler),
        radial: Box::new(|x: &DMatrix<Complex64>| {
            // Imaginary spectrum: eigenvalues of -i x, ascending.
            let h = x.map(|z| z * c(0.0, -1.0));
            Ok(spectra::hermitian_eigenvalues(&h))
        }),
        t_sampler: Box::new(move |rng: &mut dyn RngCore| sorted_gauss_with_margin(n, 0.05, rng)),
        oracle: Some(Box::new(|t: &[f64]| vandermonde(t, 2) * gaussian_weight(t))),
        oracle_is_unit_constant: true,
        quad_box: vec![(-8.0, 8.0); n],
    }
}

// ---------------------------------------------------------------------------
// Chiral family: off-diagonal block Hermitian matrices under block-diagonal
// unitary conjugation; the radial parameters are the singular values of the
// block.

fn chiral_beta2_parts(p: usize, q: usize) -> RawParts {
    let size = p + q;
    let shape = MatrixShape::complex(size);
    let s = FRAC_1_SQRT_2;

    // Isotropy part: shared phases on matched index pairs, plus the full
    // unitary algebra on the unmatched tall-block indices.
    let mut k_basis = Vec::new();
    for i in 0..q {
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        m[(i, i)] = c(0.0, s);
        m[(p + i, p + i)] = c(0.0, s);
        k_basis.push(m);
    }
    for a in q..p {
        k_basis.push(unit_matrix(size, a, a, c(0.0, 1.0)));
    }
    for a in q..p {
        for b in (a + 1)..p {
            let mut re = DMatrix::<Complex64>::zeros(size, size);
            re[(a, b)] = c(s, 0.0);
            re[(b, a)] = c(-s, 0.0);
            k_basis.push(re);
            let mut im = DMatrix::<Complex64>::zeros(size, size);
            im[(a, b)] = c(0.0, s);
            im[(b, a)] = c(0.0, s);
            k_basis.push(im);
        }
    }

    // Complement: phase differences on matched pairs and all remaining
    // off-diagonal directions of both blocks.
    let mut l_basis = Vec::new();
    for i in 0..q {
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        m[(i, i)] = c(0.0, s);
        m[(p + i, p + i)] = c(0.0, -s);
        l_basis.push(m);
    }
    let push_pair = |basis: &mut Vec<DMatrix<Complex64>>, a: usize, b: usize| {
        let mut re = DMatrix::<Complex64>::zeros(size, size);
        re[(a, b)] = c(s, 0.0);
        re[(b, a)] = c(-s, 0.0);
        basis.push(re);
        let mut im = DMatrix::<Complex64>::zeros(size, size);
        im[(a, b)] = c(0.0, s);
        im[(b, a)] = c(0.0, s);
        basis.push(im);
    };
    for a in 0..q {
        for b in (a + 1)..q {
            push_pair(&mut l_basis, a, b);
        }
    }
    for a in 0..q {
        for b in q..p {
            push_pair(&mut l_basis, a, b);
        }
    }
    for a in 0..q {
        for b in (a + 1)..q {
            push_pair(&mut l_basis, p + a, p + b);
        }
    }

    let mut x_basis = Vec::new();
    for a in 0..p {
        for b in 0..q {
            let mut re = DMatrix::<Complex64>::zeros(size, size);
            re[(a, p + b)] = c(s, 0.0);
            re[(p + b, a)] = c(s, 0.0);
            x_basis.push(re);
            let mut im = DMatrix::<Complex64>::zeros(size, size);
            im[(a, p + b)] = c(0.0, s);
            im[(p + b, a)] = c(0.0, -s);
            x_basis.push(im);
        }
    }

    let chart = Chart::new(
        q,
        Box::new(move |t: &[f64]| {
            let mut m = DMatrix::<Complex64>::zeros(size, size);
            for i in 0..q {
                m[(i, p + i)] = c(t[i], 0.0);
                m[(p + i, i)] = c(t[i], 0.0);
            }
            m
        }),
        Box::new(move |_t: &[f64], j: usize| {
            let mut m = DMatrix::<Complex64>::zeros(size, size);
            m[(j, p + j)] = c(1.0, 0.0);
            m[(p + j, j)] = c(1.0, 0.0);
            m
        }),
        Box::new(|t: &[f64]| t.iter().all(|&v| v > 0.0)),
        Box::new(|t: &[f64], gap: f64| min_pairwise_gap(t) > gap && t.iter().all(|&v| v > gap)),
    );
    let sampler = move |rng: &mut dyn RngCore| {
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        for a in 0..p {
            for b in 0..q {
                let w = c(gauss(rng) * FRAC_1_SQRT_2, gauss(rng) * FRAC_1_SQRT_2);
                m[(a, p + b)] = w;
                m[(p + b, a)] = w.conj();
            }
        }
        m
    };
    let radial = move |x: &DMatrix<Complex64>| {
        let ev = spectra::hermitian_eigenvalues(x);
        // Spectrum is {+/- singular values, zeros}; the top q entries are
        // the singular values in ascending order.
        Ok(ev[(ev.len() - q)..].to_vec())
    };
    let t_sampler = move |rng: &mut dyn RngCore| loop {
        let mut t: Vec<f64> = (0..q).map(|_| gauss(rng).abs() + 0.1).collect();
        t.sort_by(f64::total_cmp);
        if q < 2 || min_pairwise_gap(&t) > 0.1 {
            return t;
        }
    };
    RawParts {
        name: format!("chiral-beta2({p},{q})"),
        action: ActionKind::AdjointOnSubspace,
        entry_field: EntryField::Complex,
        shape,
        k_basis,
        l_basis,
        chart,
        dim_x: 2 * p * q,
        x_basis: Some(x_basis),
        weight: Box::new(|y: &DMatrix<Complex64>| (-trace_squared(y) / 2.0).exp()),
        degree: factorial(q),
        sampler: Box::new(sampler),
        radial: Box::new(radial),
        t_sampler: Box::new(t_sampler),
        oracle: None,
        oracle_is_unit_constant: false,
        quad_box: vec![(1e-8, (p as f64).sqrt() + (q as f64).sqrt() + 6.0); q],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{
        check_conditions, jacobian_factor, joint_density, orbit_chart_pullback, psi_mode_agreement,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn build(key: &str, params: InstanceParams) -> EnsembleSpec {
        build_instance(key, &params, &tol()).unwrap()
    }

    #[test]
    fn registry_rejects_bad_requests() {
        assert!(matches!(
            build_instance("no-such-ensemble", &InstanceParams::n(2), &tol()),
            Err(Error::UnknownKey(_))
        ));
        assert!(matches!(
            build_instance("spd-wishart", &InstanceParams::nm(2, 1), &tol()),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            build_instance("chiral-beta2", &InstanceParams::nm(1, 2), &tol()),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            build_instance("gaussian-beta2", &InstanceParams::default(), &tol()),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            build_instance("gaussian-beta2", &InstanceParams::nm(2, 3), &tol()),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            build_instance("su2-group", &InstanceParams::n(3), &tol()),
            Err(Error::BadParams(_))
        ));
        assert!(build_instance("su2-group", &InstanceParams::default(), &tol()).is_ok());
    }

    #[test]
    fn declared_degrees() {
        assert_eq!(
            declared_degree("gaussian-beta2", &InstanceParams::n(3)).unwrap(),
            6
        );
        assert_eq!(
            declared_degree("gaussian-beta1", &InstanceParams::n(1)).unwrap(),
            1
        );
        assert_eq!(
            declared_degree("su2-group", &InstanceParams::default()).unwrap(),
            2
        );
        assert_eq!(
            declared_degree("unitary-group", &InstanceParams::n(4)).unwrap(),
            24
        );
        assert_eq!(
            declared_degree("spd-wishart", &InstanceParams::n(2)).unwrap(),
            2
        );
        assert_eq!(
            declared_degree("chiral-beta2", &InstanceParams::nm(3, 2)).unwrap(),
            2
        );
    }

    #[test]
    fn hermitian_family_dimensions() {
        let spec = build("gaussian-beta2", InstanceParams::n(2));
        assert_eq!(spec.dim_x(), 4);
        assert_eq!(spec.split().l_dim(), 2);
        assert_eq!(spec.chart().r, 2);
        assert_eq!(spec.degree(), 2);
    }

    #[test]
    fn hermitian_family_jacobians() {
        let spec = build("gaussian-beta2", InstanceParams::n(2));
        let j = jacobian_factor(&spec, &[0.0, 1.0], &tol()).unwrap();
        assert!((j - 1.0).abs() < 1e-12);
        let spec3 = build("gaussian-beta2", InstanceParams::n(3));
        let j = jacobian_factor(&spec3, &[0.0, 1.0, 3.0], &tol()).unwrap();
        assert!((j - 36.0).abs() < 1e-10);
    }

    #[test]
    fn hermitian_density_hand_value() {
        let spec = build("gaussian-beta2", InstanceParams::n(2));
        let eval = joint_density(&spec, &[-1.0, 1.0], &tol()).unwrap();
        assert!((eval.density - 1.4715177646857693).abs() < 1e-12);
        assert!((eval.chart_volume - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_family_jacobian_and_small_size() {
        let spec = build("gaussian-beta1", InstanceParams::n(2));
        let j = jacobian_factor(&spec, &[0.0, 2.0], &tol()).unwrap();
        assert!((j - 2.0).abs() < 1e-12);

        let spec1 = build("gaussian-beta1", InstanceParams::n(1));
        assert_eq!(spec1.split().l_dim(), 0);
        let j = jacobian_factor(&spec1, &[0.7], &tol()).unwrap();
        assert!((j - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symplectic_family_geometry() {
        let spec = build("gaussian-beta4", InstanceParams::n(2));
        assert_eq!(spec.model().dim(), 10);
        assert_eq!(spec.split().k_dim(), 6);
        assert_eq!(spec.split().l_dim(), 4);
        assert_eq!(spec.dim_x(), 6);

        // Quartic gap law with unit constant under the embedded normalization.
        let j = jacobian_factor(&spec, &[0.0, 1.0], &tol()).unwrap();
        assert!((j - 1.0).abs() < 1e-10, "quartic jacobian {j}");
        let j = jacobian_factor(&spec, &[0.0, 2.0], &tol()).unwrap();
        assert!((j - 16.0).abs() < 1e-9);

        // Doubling chart directions have norm sqrt(2) each.
        let eval = joint_density(&spec, &[0.1, 1.4], &tol()).unwrap();
        assert!((eval.chart_volume - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symplectic_radial_collapses_kramers_pairs() {
        let spec = build("gaussian-beta4", InstanceParams::n(2));
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = spec.sample_matrix(&mut rng);
            let full = spectra::hermitian_eigenvalues(&x);
            for i in 0..2 {
                assert!((full[2 * i] - full[2 * i + 1]).abs() < 1e-8);
            }
            let t = spec.radial_part(&x).unwrap();
            assert_eq!(t.len(), 2);
            assert!(t[0] <= t[1]);
        }
    }

    #[test]
    fn wishart_family_values() {
        let spec = build("spd-wishart", InstanceParams::nm(2, 3));
        let j = jacobian_factor(&spec, &[1.0, 3.0], &tol()).unwrap();
        assert!((j - 2.0).abs() < 1e-12);
        // Flat determinant power at m = n + 1.
        let y = spec.chart().point(&[1.0, 3.0]).unwrap();
        assert!((spec.weight_at(&y) - (-2.0_f64).exp()).abs() < 1e-15);

        let spec4 = build("spd-wishart", InstanceParams::nm(2, 4));
        let y = spec4.chart().point(&[1.0, 3.0]).unwrap();
        assert!((spec4.weight_at(&y) - 3.0_f64.sqrt() * (-2.0_f64).exp()).abs() < 1e-12);

        // Default degrees of freedom keep the weight flat.
        let specd = build("spd-wishart", InstanceParams::n(2));
        let y = specd.chart().point(&[0.5, 2.0]).unwrap();
        assert!((specd.weight_at(&y) - (-1.25_f64).exp()).abs() < 1e-15);

        assert!(matches!(
            joint_density(&spec, &[-1.0, 2.0], &tol()),
            Err(Error::ChartDomain(_))
        ));
    }

    #[test]
    fn wishart_samples_are_positive_definite() {
        let spec = build("spd-wishart", InstanceParams::nm(2, 3));
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = spec.sample_matrix(&mut rng);
            let t = spec.radial_part(&x).unwrap();
            assert!(t.iter().all(|&v| v > 0.0), "spectrum {t:?}");
        }
    }

    #[test]
    fn unitary_family_values() {
        let spec = build("unitary-group", InstanceParams::n(2));
        let j = jacobian_factor(&spec, &[0.0, PI], &tol()).unwrap();
        assert!((j - 4.0).abs() < 1e-12);
        assert_eq!(spec.dim_x(), 4);

        let spec1 = build("unitary-group", InstanceParams::n(1));
        let j = jacobian_factor(&spec1, &[1.2], &tol()).unwrap();
        assert!((j - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_haar_sampler_is_unitary_and_deterministic() {
        let spec = build("unitary-group", InstanceParams::n(3));
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let u = spec.sample_matrix(&mut rng);
        assert!(spec.model().membership_residual(&u) < 1e-12);

        let mut rng2 = ChaCha12Rng::seed_from_u64(21);
        let u2 = spec.sample_matrix(&mut rng2);
        assert_eq!(u, u2);
    }

    #[test]
    fn unitary_size_one_phases_are_uniform() {
        let spec = build("unitary-group", InstanceParams::n(1));
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n_samples = 10_000;
        let mut phases: Vec<f64> = (0..n_samples)
            .map(|_| {
                let u = spec.sample_matrix(&mut rng);
                spec.radial_part(&u).unwrap()[0]
            })
            .collect();
        phases.sort_by(f64::total_cmp);
        let mut ks = 0.0_f64;
        for (i, &phi) in phases.iter().enumerate() {
            let f = phi / (2.0 * PI);
            ks = ks.max((f - i as f64 / n_samples as f64).abs());
            ks = ks.max((f - (i + 1) as f64 / n_samples as f64).abs());
        }
        assert!(ks < 0.02, "uniform-phase distance {ks}");
    }

    #[test]
    fn su2_family_values() {
        let spec = build("su2-group", InstanceParams::default());
        let j = jacobian_factor(&spec, &[PI / 2.0], &tol()).unwrap();
        assert!((j - 4.0).abs() < 1e-12);
        let theta: f64 = 0.7;
        let j = jacobian_factor(&spec, &[theta], &tol()).unwrap();
        assert!((j - 4.0 * theta.sin().powi(2)).abs() < 1e-12);

        let eval = joint_density(&spec, &[theta], &tol()).unwrap();
        assert!((eval.chart_volume - 2.0_f64.sqrt()).abs() < 1e-12);

        // Ratio against the sine-squared law is exactly flat.
        let mut ratios = Vec::new();
        for k in 1..20 {
            let th = k as f64 * PI / 20.0;
            let j = jacobian_factor(&spec, &[th], &tol()).unwrap();
            ratios.push(j / (4.0 * th.sin().powi(2)));
        }
        for r in &ratios {
            assert!((r - ratios[0]).abs() < 1e-8 * ratios[0]);
        }
    }

    #[test]
    fn su2_sampler_lands_in_the_group() {
        let spec = build("su2-group", InstanceParams::default());
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..10 {
            let u = spec.sample_matrix(&mut rng);
            assert!(spec.model().membership_residual(&u) < 1e-14);
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            assert!((det - c(1.0, 0.0)).norm() < 1e-14);
            let t = spec.radial_part(&u).unwrap();
            assert!(t[0] >= 0.0 && t[0] <= PI);
        }
    }

    #[test]
    fn algebra_family_values() {
        let spec = build("algebra-u", InstanceParams::n(2));
        let j = jacobian_factor(&spec, &[0.0, 1.0], &tol()).unwrap();
        assert!((j - 1.0).abs() < 1e-12);
        let spec3 = build("algebra-u", InstanceParams::n(3));
        let j = jacobian_factor(&spec3, &[0.0, 1.0, 3.0], &tol()).unwrap();
        assert!((j - 36.0).abs() < 1e-10);

        // Gaussian weight in the imaginary spectrum.
        let y = spec.chart().point(&[0.5, 1.5]).unwrap();
        assert!((spec.weight_at(&y) - (-1.25_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn algebra_radial_matches_chart() {
        let spec = build("algebra-u", InstanceParams::n(3));
        let t = [-0.9, 0.3, 1.4];
        let y = spec.chart().point(&t).unwrap();
        let back = spec.radial_part(&y).unwrap();
        for (a, b) in t.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn chiral_family_geometry() {
        let spec = build("chiral-beta2", InstanceParams::nm(2, 1));
        assert_eq!(spec.split().k_dim(), 2);
        assert_eq!(spec.split().l_dim(), 3);
        assert_eq!(spec.chart().r, 1);
        assert_eq!(spec.dim_x(), 4);

        // Homogeneity degree equals the complement dimension.
        let j1 = jacobian_factor(&spec, &[1.0], &tol()).unwrap();
        let j2 = jacobian_factor(&spec, &[2.0], &tol()).unwrap();
        assert!((j2 / j1 - 8.0).abs() < 1e-10);

        let spec22 = build("chiral-beta2", InstanceParams::nm(2, 2));
        assert_eq!(spec22.split().k_dim(), 2);
        assert_eq!(spec22.split().l_dim(), 6);
        let j1 = jacobian_factor(&spec22, &[0.8, 1.7], &tol()).unwrap();
        let j2 = jacobian_factor(&spec22, &[1.6, 3.4], &tol()).unwrap();
        assert!((j2 / j1 - 64.0).abs() < 1e-8 * 64.0);
    }

    #[test]
    fn chiral_has_no_closed_form_reference() {
        let spec = build("chiral-beta2", InstanceParams::nm(2, 1));
        assert!(matches!(spec.oracle_at(&[1.0]), Err(Error::NoOracle(_))));
        assert!(matches!(
            oracle_density("chiral-beta2", &InstanceParams::nm(2, 1), &[1.0]),
            Err(Error::NoOracle(_))
        ));
    }

    #[test]
    fn chiral_routes_agree_without_an_oracle() {
        let spec = build("chiral-beta2", InstanceParams::nm(2, 2));
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..3 {
            let t = spec.sample_t(&mut rng);
            let j = jacobian_factor(&spec, &t, &tol()).unwrap();
            let pb = orbit_chart_pullback(&spec, &t, &tol()).unwrap();
            assert!((pb - j).abs() < 1e-5 * j.max(1.0), "j {j} pullback {pb}");
            let dev = psi_mode_agreement(&spec, &t, &tol()).unwrap();
            assert!(dev < 1e-7);
        }
    }

    #[test]
    fn chiral_radial_recovers_block_singular_values() {
        let spec = build("chiral-beta2", InstanceParams::nm(3, 2));
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let x = spec.sample_matrix(&mut rng);
        let t = spec.radial_part(&x).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t[0] > 0.0 && t[0] <= t[1]);

        // Compare against singular values computed from the raw block.
        let mut w = DMatrix::<Complex64>::zeros(3, 2);
        for a in 0..3 {
            for b in 0..2 {
                w[(a, b)] = x[(a, 3 + b)];
            }
        }
        let mut sv: Vec<f64> = w.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        for (a, b) in t.iter().zip(sv.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_examples() {
        let v = oracle_density("gaussian-beta2", &InstanceParams::n(2), &[0.0, 1.0]).unwrap();
        assert!((v - (-0.5_f64).exp()).abs() < 1e-15);
        let v = oracle_density("unitary-group", &InstanceParams::n(2), &[0.0, PI]).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = oracle_density("su2-group", &InstanceParams::default(), &[PI / 2.0]).unwrap();
        assert!((v - 4.0).abs() < 1e-15);
        let v = oracle_density("spd-wishart", &InstanceParams::nm(1, 3), &[2.0]).unwrap();
        assert!((v - 2.0_f64.powf(0.5) * (-1.0_f64).exp()).abs() < 1e-15);
        assert!(matches!(
            oracle_density("spd-wishart", &InstanceParams::nm(1, 3), &[-2.0]),
            Err(Error::ChartDomain(_))
        ));
    }

    #[test]
    fn oracle_ratio_is_unit_for_linear_families() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for (key, params) in [
            ("gaussian-beta1", InstanceParams::n(3)),
            ("gaussian-beta2", InstanceParams::n(3)),
            ("algebra-u", InstanceParams::n(3)),
            ("unitary-group", InstanceParams::n(3)),
        ] {
            let spec = build(key, params);
            assert!(spec.oracle_is_unit_constant());
            for _ in 0..5 {
                let t = spec.sample_t(&mut rng);
                let eval = joint_density(&spec, &t, &tol()).unwrap();
                let oracle = spec.oracle_at(&t).unwrap();
                let ratio = eval.density / oracle;
                assert!((ratio - 1.0).abs() < 1e-9, "{key}: ratio {ratio} at {t:?}");
            }
        }
    }

    #[test]
    fn symplectic_oracle_ratio_is_constant() {
        let spec = build("gaussian-beta4", InstanceParams::n(2));
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let mut ratios = Vec::new();
        for _ in 0..5 {
            let t = spec.sample_t(&mut rng);
            let eval = joint_density(&spec, &t, &tol()).unwrap();
            ratios.push(eval.density / spec.oracle_at(&t).unwrap());
        }
        for r in &ratios {
            assert!((r - ratios[0]).abs() < 1e-9 * ratios[0].abs());
        }
    }

    #[test]
    fn every_instance_validates_and_passes_conditions() {
        let cases: Vec<(&str, InstanceParams)> = vec![
            ("gaussian-beta1", InstanceParams::n(2)),
            ("gaussian-beta2", InstanceParams::n(2)),
            ("gaussian-beta4", InstanceParams::n(2)),
            ("spd-wishart", InstanceParams::nm(2, 3)),
            ("unitary-group", InstanceParams::n(2)),
            ("su2-group", InstanceParams::default()),
            ("algebra-u", InstanceParams::n(2)),
            ("chiral-beta2", InstanceParams::nm(2, 1)),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for (key, params) in cases {
            let spec = build(key, params);
            spec.validate(11, &tol())
                .unwrap_or_else(|e| panic!("{key}: {e}"));
            for _ in 0..3 {
                let t = spec.sample_t(&mut rng);
                let report = check_conditions(&spec, &t, &tol()).unwrap();
                assert!(report.pass && report.regular, "{key} at {t:?}: {report:?}");
            }
        }
    }

    #[test]
    fn gaussian_size_one_sample_mean_is_centered() {
        let spec = build("gaussian-beta2", InstanceParams::n(1));
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let n_samples = 100_000;
        let mut sum = 0.0;
        for _ in 0..n_samples {
            let x = spec.sample_matrix(&mut rng);
            sum += spec.radial_part(&x).unwrap()[0];
        }
        let mean = sum / n_samples as f64;
        assert!(mean.abs() < 4.0 / (n_samples as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn radial_parts_are_ascending() {
        let cases: Vec<(&str, InstanceParams)> = vec![
            ("gaussian-beta1", InstanceParams::n(3)),
            ("gaussian-beta2", InstanceParams::n(3)),
            ("gaussian-beta4", InstanceParams::n(2)),
            ("spd-wishart", InstanceParams::nm(3, 4)),
            ("unitary-group", InstanceParams::n(3)),
            ("algebra-u", InstanceParams::n(3)),
            ("chiral-beta2", InstanceParams::nm(2, 2)),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for (key, params) in cases {
            let spec = build(key, params);
            for _ in 0..3 {
                let x = spec.sample_matrix(&mut rng);
                let t = spec.radial_part(&x).unwrap();
                for w in t.windows(2) {
                    assert!(w[0] <= w[1], "{key}: radial {t:?} not ascending");
                }
            }
        }
    }
}
