//! Ensemble evaluation: the orbit-map Jacobian factor, joint radial
//! densities, and numeric checks of the geometric assumptions behind them.
//!
//! An ensemble couples a compact matrix group acting by conjugation on a
//! space of matrices with a chart of canonical representatives (typically
//! ordered diagonals) and an invariant weight. The radial density of the
//! chart parameters is `weight(y(t)) * J(y(t))`, where `J` is the volume
//! distortion of the orbit map: the absolute determinant of
//! `xi -> [xi, y]` restricted to the orthogonal complement of the isotropy
//! algebra. With that complement carrying the flat inner product, the
//! proportionality constant is exactly 1.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::lie::{self, ActionKind, FlowOpts, LieGroupModel, SubspaceDecomposition};
use crate::linalg::{self, InnerProductSpace, LinearMapBetween};
use crate::tol::Tolerances;
use crate::{Error, Result};

pub type WeightFn = Box<dyn Fn(&DMatrix<Complex64>) -> f64 + Send + Sync>;
pub type ChartPointFn = Box<dyn Fn(&[f64]) -> DMatrix<Complex64> + Send + Sync>;
pub type ChartTangentFn = Box<dyn Fn(&[f64], usize) -> DMatrix<Complex64> + Send + Sync>;
pub type ChartPredicateFn = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;
pub type RegularPredicateFn = Box<dyn Fn(&[f64], f64) -> bool + Send + Sync>;
pub type SamplerFn = Box<dyn Fn(&mut dyn RngCore) -> DMatrix<Complex64> + Send + Sync>;
pub type RadialFn = Box<dyn Fn(&DMatrix<Complex64>) -> Result<Vec<f64>> + Send + Sync>;
pub type TSamplerFn = Box<dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync>;
pub type OracleFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Parametrization of the representative submanifold: a point map
/// `t -> y(t)`, its analytic tangents, a domain predicate, and a
/// regularity predicate flagging parameters near coalescence.
pub struct Chart {
    pub r: usize,
    point: ChartPointFn,
    tangent: ChartTangentFn,
    domain: ChartPredicateFn,
    regular: RegularPredicateFn,
}

impl Chart {
    pub fn new(
        r: usize,
        point: ChartPointFn,
        tangent: ChartTangentFn,
        domain: ChartPredicateFn,
        regular: RegularPredicateFn,
    ) -> Self {
        Chart {
            r,
            point,
            tangent,
            domain,
            regular,
        }
    }

    /// Representative matrix at `t`, after checking the chart domain.
    pub fn point(&self, t: &[f64]) -> Result<DMatrix<Complex64>> {
        if t.len() != self.r {
            return Err(Error::ChartDomain(format!(
                "chart expects {} parameters, got {}",
                self.r,
                t.len()
            )));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::ChartDomain("non-finite chart parameter".into()));
        }
        if !(self.domain)(t) {
            return Err(Error::ChartDomain(format!(
                "parameter {t:?} outside the chart domain"
            )));
        }
        Ok((self.point)(t))
    }

    /// Analytic tangent `dy/dt_j` at `t`.
    pub fn tangent(&self, t: &[f64], j: usize) -> Result<DMatrix<Complex64>> {
        if j >= self.r {
            return Err(Error::ChartDomain(format!(
                "tangent index {j} out of range for {} parameters",
                self.r
            )));
        }
        Ok((self.tangent)(t, j))
    }

    pub fn in_domain(&self, t: &[f64]) -> bool {
        t.len() == self.r && t.iter().all(|v| v.is_finite()) && (self.domain)(t)
    }

    /// True when `t` is safely away from coalescence at the given gap scale.
    pub fn is_regular(&self, t: &[f64], gap: f64) -> bool {
        self.in_domain(t) && (self.regular)(t, gap)
    }
}

/// A multiplicative change of reference measures: ambient measure scaled by
/// `u`, representative measure by `v`, quotient measure by the constant
/// `lambda`. The Jacobian factor picks up `u / (lambda * v)`.
pub struct MeasureTransform {
    pub u: WeightFn,
    pub v: WeightFn,
    pub lambda: f64,
}

/// Everything needed to wire an [`EnsembleSpec`]; validated by
/// [`EnsembleSpec::from_parts`].
pub struct EnsembleParts {
    pub name: String,
    pub action: ActionKind,
    pub model: LieGroupModel,
    pub split: SubspaceDecomposition,
    pub chart: Chart,
    /// Dimension of the model of the full matrix space (for submanifold
    /// actions: the manifold dimension, not the ambient coordinate count).
    pub dim_x: usize,
    /// Linear span housing the matrix space, when it is a linear subspace.
    pub x_space: Option<InnerProductSpace>,
    pub weight: WeightFn,
    pub degree: usize,
    pub sampler: SamplerFn,
    pub radial: RadialFn,
    pub t_sampler: TSamplerFn,
    pub oracle: Option<OracleFn>,
    pub oracle_is_unit_constant: bool,
    pub quad_box: Vec<(f64, f64)>,
}

/// A fully wired ensemble: group model, isotropy split, chart, weight,
/// sampler machinery and the declared chamber multiplicity.
pub struct EnsembleSpec {
    name: String,
    action: ActionKind,
    model: LieGroupModel,
    split: SubspaceDecomposition,
    chart: Chart,
    dim_x: usize,
    x_space: Option<InnerProductSpace>,
    weight: WeightFn,
    degree: usize,
    sampler: SamplerFn,
    radial: RadialFn,
    t_sampler: TSamplerFn,
    oracle: Option<OracleFn>,
    oracle_is_unit_constant: bool,
    quad_box: Vec<(f64, f64)>,
    measures: Vec<MeasureTransform>,
    l_space: InnerProductSpace,
}

impl EnsembleSpec {
    pub fn from_parts(parts: EnsembleParts, tol: &Tolerances) -> Result<Self> {
        let EnsembleParts {
            name,
            action,
            model,
            split,
            chart,
            dim_x,
            x_space,
            weight,
            degree,
            sampler,
            radial,
            t_sampler,
            oracle,
            oracle_is_unit_constant,
            quad_box,
        } = parts;
        if degree == 0 {
            return Err(Error::BadParams(
                "covering degree must be at least 1".into(),
            ));
        }
        if split.l_dim() + chart.r != dim_x {
            return Err(Error::DimensionMismatch {
                domain: split.l_dim() + chart.r,
                codomain: dim_x,
            });
        }
        if quad_box.len() != chart.r {
            return Err(Error::BadParams(format!(
                "quadrature box has {} axes for {} chart parameters",
                quad_box.len(),
                chart.r
            )));
        }
        let l_columns: Vec<DVector<f64>> = split
            .l_basis()
            .iter()
            .map(|m| model.shape.realify(m))
            .collect();
        let l_space = if l_columns.is_empty() {
            InnerProductSpace::standard(0)
        } else {
            InnerProductSpace::from_ambient_basis(l_columns, tol)?
        };
        Ok(EnsembleSpec {
            name,
            action,
            model,
            split,
            chart,
            dim_x,
            x_space,
            weight,
            degree,
            sampler,
            radial,
            t_sampler,
            oracle,
            oracle_is_unit_constant,
            quad_box,
            measures: Vec::new(),
            l_space,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> ActionKind {
        self.action
    }

    pub fn model(&self) -> &LieGroupModel {
        &self.model
    }

    pub fn split(&self) -> &SubspaceDecomposition {
        &self.split
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn l_space(&self) -> &InnerProductSpace {
        &self.l_space
    }

    pub fn quad_box(&self) -> &[(f64, f64)] {
        &self.quad_box
    }

    pub fn weight_at(&self, y: &DMatrix<Complex64>) -> f64 {
        (self.weight)(y)
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    pub fn oracle_is_unit_constant(&self) -> bool {
        self.oracle_is_unit_constant
    }

    /// Closed-form reference density at `t`, up to a constant.
    pub fn oracle_at(&self, t: &[f64]) -> Result<f64> {
        if !self.chart.in_domain(t) {
            return Err(Error::ChartDomain(format!(
                "parameter {t:?} outside the chart domain"
            )));
        }
        match &self.oracle {
            Some(f) => Ok(f(t)),
            None => Err(Error::NoOracle(self.name.clone())),
        }
    }

    pub fn sample_matrix(&self, rng: &mut dyn RngCore) -> DMatrix<Complex64> {
        (self.sampler)(rng)
    }

    /// Ordered radial parameters (eigenvalues/eigenphases) of a sampled
    /// matrix.
    pub fn radial_part(&self, x: &DMatrix<Complex64>) -> Result<Vec<f64>> {
        (self.radial)(x)
    }

    /// A random regular chart parameter, for randomized checks.
    pub fn sample_t(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (self.t_sampler)(rng)
    }

    /// Random group element `exp(zeta)` with Gaussian algebra coefficients
    /// of the given scale.
    pub fn random_group_element(
        &self,
        rng: &mut dyn RngCore,
        scale: f64,
    ) -> Result<DMatrix<Complex64>> {
        let coeffs: Vec<f64> = (0..self.model.dim())
            .map(|_| {
                let v: f64 = StandardNormal.sample(rng);
                v * scale
            })
            .collect();
        let zeta = self.model.algebra_element(&coeffs)?;
        lie::expm(&zeta)
    }

    /// Accumulated measure-transform factor `prod u/(lambda v)` at `y`.
    pub fn measure_factor(&self, y: &DMatrix<Complex64>) -> f64 {
        self.measures
            .iter()
            .map(|m| (m.u)(y) / (m.lambda * (m.v)(y)))
            .product()
    }

    /// Spot-check the structural invariants that need randomness: weight
    /// invariance under the action, chart points and samples staying in the
    /// declared linear span, and the dimension count.
    pub fn validate(&self, seed: u64, tol: &Tolerances) -> Result<()> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        if self.split.l_dim() + self.chart.r != self.dim_x {
            return Err(Error::DimensionMismatch {
                domain: self.split.l_dim() + self.chart.r,
                codomain: self.dim_x,
            });
        }
        for _ in 0..8 {
            let x = self.sample_matrix(&mut rng);
            let g = self.random_group_element(&mut rng, 0.5)?;
            self.model.check_membership(&g, tol)?;
            let moved = lie::conjugate(&g, &x);
            let p0 = (self.weight)(&x);
            let p1 = (self.weight)(&moved);
            let residual = (p1 - p0).abs();
            if residual > tol.invariance_check * (1.0 + p0.abs()) {
                return Err(Error::NonInvariantWeight { residual });
            }
            if let Some(space) = &self.x_space {
                space.resolve(&self.model.shape.realify(&x), tol)?;
                let t = self.sample_t(&mut rng);
                let y = self.chart.point(&t)?;
                space.resolve(&self.model.shape.realify(&y), tol)?;
            }
        }
        Ok(())
    }
}

/// Evaluation mode for the orbit map differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMode {
    /// Commutator `[xi, y]`.
    Analytic,
    /// Central differences of the conjugation flow.
    FiniteDifference,
}

/// The differential of the orbit map at a chart point, as ambient image
/// columns of the complement basis.
pub struct PsiMap {
    pub images: Vec<DVector<f64>>,
    ambient_dim: usize,
}

impl PsiMap {
    /// The same data as a map between inner-product spaces (complement
    /// basis -> orthonormal frame of the image span). Only defined at full
    /// rank; use [`jacobian_factor`] for the scale at arbitrary points.
    pub fn linear_map(&self, spec: &EnsembleSpec, tol: &Tolerances) -> Result<LinearMapBetween> {
        if self.images.is_empty() {
            return Err(Error::RankDeficient {
                detail: "empty orbit-map differential".into(),
            });
        }
        let frame = linalg::span_frame(&self.images, tol);
        if frame.len() < self.images.len() {
            return Err(Error::RankDeficient {
                detail: format!(
                    "orbit-map image spans {} of {} directions",
                    frame.len(),
                    self.images.len()
                ),
            });
        }
        let codomain = InnerProductSpace::from_ambient_basis(frame.clone(), tol)?;
        let mut coord = DMatrix::<f64>::zeros(frame.len(), self.images.len());
        for (j, img) in self.images.iter().enumerate() {
            for (i, q) in frame.iter().enumerate() {
                coord[(i, j)] = q.dot(img);
            }
        }
        LinearMapBetween::new(spec.l_space().clone(), codomain, coord)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
}

/// Images of the complement basis under `xi -> d/ds exp(s xi) y exp(-s xi)`
/// at the chart point `y(t)`.
pub fn psi_map(spec: &EnsembleSpec, t: &[f64], mode: PsiMode, tol: &Tolerances) -> Result<PsiMap> {
    let y = spec.chart().point(t)?;
    psi_map_at(spec, &y, mode, tol)
}

fn psi_map_at(
    spec: &EnsembleSpec,
    y: &DMatrix<Complex64>,
    mode: PsiMode,
    tol: &Tolerances,
) -> Result<PsiMap> {
    let shape = spec.model().shape;
    let mut images = Vec::with_capacity(spec.split().l_dim());
    for xi in spec.split().l_basis() {
        let d = match mode {
            PsiMode::Analytic => lie::commutator(xi, y)?,
            PsiMode::FiniteDifference => {
                lie::flow_derivative_matrix(y, xi, FlowOpts::from_tol(tol))?
            }
        };
        let v = shape.realify(&d);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("orbit-map differential"));
        }
        images.push(v);
    }
    Ok(PsiMap {
        images,
        ambient_dim: shape.ambient_dim(),
    })
}

/// Maximum entrywise deviation between the analytic and finite-difference
/// image columns, relative to the analytic scale.
pub fn psi_mode_agreement(spec: &EnsembleSpec, t: &[f64], tol: &Tolerances) -> Result<f64> {
    let analytic = psi_map(spec, t, PsiMode::Analytic, tol)?;
    let fd = psi_map(spec, t, PsiMode::FiniteDifference, tol)?;
    let scale = analytic
        .images
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let mut worst = 0.0_f64;
    for (a, f) in analytic.images.iter().zip(fd.images.iter()) {
        for (x, y) in a.iter().zip(f.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst / scale)
}

fn jacobian_from_images(
    spec: &EnsembleSpec,
    images: &[DVector<f64>],
    tol: &Tolerances,
) -> Result<(f64, Vec<f64>)> {
    if images.is_empty() {
        return Ok((1.0, Vec::new()));
    }
    let sv = linalg::ambient_singular_values(images, spec.l_space())?;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    if max <= 0.0 || min <= tol.rank_rel * max {
        return Ok((0.0, sv));
    }
    Ok((sv.iter().product(), sv))
}

/// Jacobian factor of the orbit map at `y(t)`: the product of singular
/// values of the complement-restricted differential, times any accumulated
/// measure-transform factor. Zero at rank deficiency (coalesced spectra).
pub fn jacobian_factor(spec: &EnsembleSpec, t: &[f64], tol: &Tolerances) -> Result<f64> {
    jacobian_factor_with_mode(spec, t, PsiMode::Analytic, tol)
}

pub fn jacobian_factor_with_mode(
    spec: &EnsembleSpec,
    t: &[f64],
    mode: PsiMode,
    tol: &Tolerances,
) -> Result<f64> {
    let y = spec.chart().point(t)?;
    let psi = psi_map_at(spec, &y, mode, tol)?;
    let (j, _) = jacobian_from_images(spec, &psi.images, tol)?;
    Ok(j * spec.measure_factor(&y))
}

/// One density evaluation at a chart parameter.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DensityEvaluation {
    pub t: Vec<f64>,
    /// Representative point, in flat ambient coordinates.
    pub y: Vec<f64>,
    pub jacobian: f64,
    pub weight: f64,
    /// `weight * jacobian`: density relative to the induced measure on the
    /// representative submanifold.
    pub density: f64,
    /// Gram volume of the analytic chart tangents.
    pub chart_volume: f64,
    /// `density * chart_volume`: density relative to Lebesgue measure in
    /// the chart parameters.
    pub density_chart: f64,
    pub psi_singular_values: Vec<f64>,
}

/// Evaluate the joint radial density at `t`.
pub fn joint_density(
    spec: &EnsembleSpec,
    t: &[f64],
    tol: &Tolerances,
) -> Result<DensityEvaluation> {
    let y = spec.chart().point(t)?;
    let psi = psi_map_at(spec, &y, PsiMode::Analytic, tol)?;
    let (j_raw, sv) = jacobian_from_images(spec, &psi.images, tol)?;
    let jacobian = j_raw * spec.measure_factor(&y);
    let weight = spec.weight_at(&y);
    if !weight.is_finite() {
        return Err(Error::NonFinite("ensemble weight"));
    }
    let tangents: Vec<DVector<f64>> = (0..spec.chart().r)
        .map(|j| Ok(spec.model().shape.realify(&spec.chart().tangent(t, j)?)))
        .collect::<Result<_>>()?;
    let chart_volume = if tangents.is_empty() {
        1.0
    } else {
        linalg::ambient_gram_volume(&tangents, tol)?
    };
    let density = jacobian * weight;
    Ok(DensityEvaluation {
        t: t.to_vec(),
        y: spec.model().shape.realify(&y).iter().copied().collect(),
        jacobian,
        weight,
        density,
        chart_volume,
        density_chart: density * chart_volume,
        psi_singular_values: sv,
    })
}

/// Absolute determinant of a charted smooth map at a point, by central
/// finite differences: Gram volume of the image columns over the square
/// root of the domain Gram determinant. The codomain carries the flat
/// metric of its coordinates.
pub fn pullback_determinant<F>(
    map: F,
    point: &[f64],
    domain_gram: &DMatrix<f64>,
    opts: FlowOpts,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<DVector<f64>>,
{
    let m = point.len();
    if domain_gram.nrows() != m || domain_gram.ncols() != m {
        return Err(Error::SizeMismatch {
            left_rows: domain_gram.nrows(),
            left_cols: domain_gram.ncols(),
            right_rows: m,
            right_cols: m,
        });
    }
    let columns = fd_columns(&map, point, opts)?;
    let volume = column_volume(&columns);
    let chol = Cholesky::new(domain_gram.clone()).ok_or_else(|| Error::NotPositiveDefinite {
        detail: "domain Gram of the charted map".into(),
    })?;
    let domain_volume: f64 = (0..m).map(|i| chol.l()[(i, i)]).product();
    if domain_volume <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            detail: "domain Gram volume vanished".into(),
        });
    }
    let value = volume / domain_volume;
    if !value.is_finite() {
        return Err(Error::NonFinite("pullback determinant"));
    }
    Ok(value)
}

fn fd_columns<F>(map: &F, point: &[f64], opts: FlowOpts) -> Result<Vec<DVector<f64>>>
where
    F: Fn(&[f64]) -> Result<DVector<f64>>,
{
    let mut columns = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let h = opts.h * (1.0 + point[i].abs());
        if point[i] + h == point[i] {
            return Err(Error::StepUnderflow { h, scale: point[i] });
        }
        let diff = |h: f64| -> Result<DVector<f64>> {
            let mut fwd = point.to_vec();
            let mut bwd = point.to_vec();
            fwd[i] += h;
            bwd[i] -= h;
            Ok((map(&fwd)? - map(&bwd)?) / (2.0 * h))
        };
        let d = if opts.richardson {
            let d_h = diff(h)?;
            let d_h2 = diff(h / 2.0)?;
            (d_h2 * 4.0 - d_h) / 3.0
        } else {
            diff(h)?
        };
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("finite-difference column"));
        }
        columns.push(d);
    }
    Ok(columns)
}

/// Product of singular values of the matrix with the given columns: the
/// unnormalized Gram volume, stable at rank deficiency.
fn column_volume(columns: &[DVector<f64>]) -> f64 {
    if columns.is_empty() {
        return 1.0;
    }
    let m = DMatrix::from_columns(columns);
    m.singular_values().iter().product()
}

/// Group-direction and chart-direction columns of the pullback frame.
type FrameColumns = (Vec<DVector<f64>>, Vec<DVector<f64>>);

fn orbit_chart_columns(
    spec: &EnsembleSpec,
    g: Option<&DMatrix<Complex64>>,
    t: &[f64],
    tol: &Tolerances,
) -> Result<FrameColumns> {
    let shape = spec.model().shape;
    let opts = FlowOpts::from_tol(tol);
    let y0 = spec.chart().point(t)?;
    let y = match g {
        Some(g) => lie::conjugate(g, &y0),
        None => y0.clone(),
    };

    // Group directions: finite-difference flows of the (translated)
    // complement basis, kept clear of the analytic commutator so the two
    // evaluation routes stay independent.
    let mut group_cols = Vec::with_capacity(spec.split().l_dim());
    for xi in spec.split().l_basis() {
        let xi_t = match g {
            Some(g) => lie::conjugate(g, xi),
            None => xi.clone(),
        };
        let d = lie::flow_derivative_matrix(&y, &xi_t, opts)?;
        group_cols.push(shape.realify(&d));
    }

    // Chart directions: finite differences through the chart map itself.
    let mut chart_cols = Vec::with_capacity(spec.chart().r);
    for j in 0..spec.chart().r {
        let h = opts.h * (1.0 + t[j].abs());
        if t[j] + h == t[j] {
            return Err(Error::StepUnderflow { h, scale: t[j] });
        }
        let diff = |h: f64| -> Result<DVector<f64>> {
            let mut fwd = t.to_vec();
            let mut bwd = t.to_vec();
            fwd[j] += h;
            bwd[j] -= h;
            let yf = spec.chart().point(&fwd)?;
            let yb = spec.chart().point(&bwd)?;
            let (yf, yb) = match g {
                Some(g) => (lie::conjugate(g, &yf), lie::conjugate(g, &yb)),
                None => (yf, yb),
            };
            Ok((shape.realify(&yf) - shape.realify(&yb)) / (2.0 * h))
        };
        let d = if opts.richardson {
            let d_h = diff(h)?;
            let d_h2 = diff(h / 2.0)?;
            (d_h2 * 4.0 - d_h) / 3.0
        } else {
            diff(h)?
        };
        chart_cols.push(d);
    }
    Ok((group_cols, chart_cols))
}

/// Independent evaluation route for the Jacobian factor: assemble the full
/// differential of `(xi, t) -> exp(xi) y(t) exp(-xi)` by finite differences
/// and take the volume ratio against the chart block of the domain metric.
/// Agrees with [`jacobian_factor`] at regular points.
pub fn orbit_chart_pullback(spec: &EnsembleSpec, t: &[f64], tol: &Tolerances) -> Result<f64> {
    orbit_chart_pullback_at(spec, None, t, tol)
}

fn orbit_chart_pullback_at(
    spec: &EnsembleSpec,
    g: Option<&DMatrix<Complex64>>,
    t: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    let (group_cols, chart_cols) = orbit_chart_columns(spec, g, t, tol)?;
    let mut all = group_cols;
    all.extend(chart_cols.iter().cloned());
    let total = column_volume(&all);
    let chart = column_volume(&chart_cols);
    if chart <= 0.0 || !chart.is_finite() {
        return Err(Error::NotPositiveDefinite {
            detail: "chart tangent volume vanished".into(),
        });
    }
    Ok(total / chart)
}

/// Relative deviation of the pullback route evaluated on the chart
/// translated by `g` against the untranslated chart. Small residuals
/// witness that the density does not depend on the orbit representative.
pub fn gauge_invariance_check(
    spec: &EnsembleSpec,
    g: &DMatrix<Complex64>,
    t: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    spec.model().check_membership(g, tol)?;
    let base = orbit_chart_pullback_at(spec, None, t, tol)?;
    let moved = orbit_chart_pullback_at(spec, Some(g), t, tol)?;
    Ok((moved - base).abs() / base.max(1e-300))
}

/// Rescale the reference measures by `u` (ambient), `v` (representatives)
/// and the constant `lambda`; the reported Jacobian factor becomes
/// `u/(lambda v)` times the original. `u` must be invariant under the
/// action, which is spot-checked on random draws.
pub fn transform_weights(
    mut spec: EnsembleSpec,
    u: WeightFn,
    v: WeightFn,
    lambda: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<EnsembleSpec> {
    use rand::SeedableRng;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::BadParams(format!(
            "measure scale must be a positive constant, got {lambda}"
        )));
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let x = spec.sample_matrix(&mut rng);
        let g = spec.random_group_element(&mut rng, 0.5)?;
        let moved = lie::conjugate(&g, &x);
        let u0 = u(&x);
        let u1 = u(&moved);
        let residual = (u1 - u0).abs();
        if residual > tol.invariance_check * (1.0 + u0.abs()) {
            return Err(Error::NonInvariantWeight { residual });
        }
    }
    spec.measures.push(MeasureTransform { u, v, lambda });
    Ok(spec)
}

/// Numeric verdict on the geometric assumptions at one chart parameter.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConditionReport {
    pub t: Vec<f64>,
    /// Chart regularity predicate (gaps above tolerance).
    pub regular: bool,
    /// True when the point sits at (numerical) coalescence, where the
    /// orbit drops dimension and the density vanishes.
    pub in_singular_set: bool,
    /// Largest normalized inner product between orbit directions and chart
    /// tangents.
    pub orthogonality_residual: f64,
    pub orthogonality_pass: bool,
    /// Numeric rank of orbit directions and chart tangents together.
    pub transversality_rank: usize,
    pub transversality_pass: bool,
    /// Kernel dimension of the full-algebra flow differential.
    pub isotropy_kernel_dim: usize,
    pub isotropy_pass: bool,
    /// Smallest singular value of the assembled differential.
    pub min_pullback_singular_value: f64,
    pub regularity_pass: bool,
    pub pass: bool,
}

/// Check orthogonality, transversality, the isotropy dimension, and local
/// regularity of the orbit-times-chart parametrization at `t`. Parameters
/// flagged irregular are reported as inside the singular set without
/// counting as failures.
pub fn check_conditions(
    spec: &EnsembleSpec,
    t: &[f64],
    tol: &Tolerances,
) -> Result<ConditionReport> {
    let y = spec.chart().point(t)?;
    let shape = spec.model().shape;
    let regular = spec.chart().is_regular(t, tol.regular_gap);

    let psi = psi_map_at(spec, &y, PsiMode::Analytic, tol)?;
    let tangents: Vec<DVector<f64>> = (0..spec.chart().r)
        .map(|j| Ok(shape.realify(&spec.chart().tangent(t, j)?)))
        .collect::<Result<_>>()?;

    let mut orthogonality_residual = 0.0_f64;
    for img in &psi.images {
        let ni = img.norm();
        if ni < 1e-14 {
            continue;
        }
        for tan in &tangents {
            let nt = tan.norm();
            if nt < 1e-14 {
                continue;
            }
            orthogonality_residual = orthogonality_residual.max(img.dot(tan).abs() / (ni * nt));
        }
    }
    let orthogonality_pass = orthogonality_residual < tol.orthogonality_check;

    let mut all = psi.images.clone();
    all.extend(tangents.iter().cloned());
    let transversality_rank = linalg::numeric_rank(&all, tol.rank_rel);
    let transversality_pass = transversality_rank == spec.dim_x();

    let iso = lie::isotropy_rank(spec.model(), &y, FlowOpts::from_tol(tol), tol)?;
    let isotropy_pass = iso.kernel_dim == spec.split().k_dim();

    let (min_sv, max_sv) = if all.is_empty() {
        (1.0, 1.0)
    } else {
        let m = DMatrix::from_columns(&all);
        let sv = m.singular_values();
        (
            sv.iter().cloned().fold(f64::INFINITY, f64::min),
            sv.iter().cloned().fold(0.0_f64, f64::max),
        )
    };
    let regularity_pass = min_sv > tol.regular_gap * max_sv.max(1.0);

    let psi_deficient = {
        let sv = linalg::ambient_singular_values(&psi.images, spec.l_space())?;
        match (sv.first(), sv.last()) {
            (Some(&max), Some(&min)) => max <= 0.0 || min <= tol.rank_rel * max,
            _ => false,
        }
    };
    let in_singular_set = !regular || psi_deficient;

    let pass = if regular {
        orthogonality_pass && transversality_pass && isotropy_pass && regularity_pass
    } else {
        // Coalesced parameters are expected to drop rank; record, don't fail.
        true
    };

    Ok(ConditionReport {
        t: t.to_vec(),
        regular,
        in_singular_set,
        orthogonality_residual,
        orthogonality_pass,
        transversality_rank,
        transversality_pass,
        isotropy_kernel_dim: iso.kernel_dim,
        isotropy_pass,
        min_pullback_singular_value: min_sv,
        regularity_pass,
        pass,
    })
}

/// Isotropy dimension check at a chart parameter: the kernel of the
/// full-algebra flow differential must match the declared isotropy part.
pub fn isotropy_rank_check(
    spec: &EnsembleSpec,
    t: &[f64],
    tol: &Tolerances,
) -> Result<lie::IsotropyRank> {
    let y = spec.chart().point(t)?;
    lie::isotropy_rank(spec.model(), &y, FlowOpts::from_tol(tol), tol)
}
