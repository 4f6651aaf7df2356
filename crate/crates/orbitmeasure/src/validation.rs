//! Monte-Carlo and quadrature verification: empirical spectra against the
//! derived chart density, and the normalized radial integration identity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{
    check_conditions, gauge_invariance_check, joint_density, psi_mode_agreement, EnsembleSpec,
};
use crate::lie::ActionKind;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Samples drawn per derived-seed chunk; chunking keeps batches identical
/// regardless of thread count.
const CHUNK: usize = 4096;
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Ordered radial samples from one instance.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub instance: String,
    pub count: usize,
    pub seed: u64,
    /// Each entry is an ascending chart parameter vector.
    pub samples: Vec<Vec<f64>>,
}

fn chunked_map<T: Send>(
    spec: &EnsembleSpec,
    count: usize,
    seed: u64,
    map: impl Fn(&DMatrix<Complex64>) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let chunks = count.div_ceil(CHUNK);
    let per_chunk: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng =
                ChaCha12Rng::seed_from_u64(seed.wrapping_add((c as u64).wrapping_mul(SEED_STRIDE)));
            let take = CHUNK.min(count - c * CHUNK);
            let mut out = Vec::with_capacity(take);
            for _ in 0..take {
                let x = spec.sample_matrix(&mut rng);
                out.push(map(&x)?);
            }
            Ok(out)
        })
        .collect();
    let mut merged = Vec::with_capacity(count);
    for chunk in per_chunk {
        merged.extend(chunk?);
    }
    Ok(merged)
}

/// Draw `count` matrices and record their radial parts. Deterministic for a
/// fixed seed, independent of thread count.
pub fn sample(spec: &EnsembleSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::BadParams("sample count must be at least 1".into()));
    }
    let samples = chunked_map(spec, count, seed, |x| spec.radial_part(x))?;
    Ok(SampleBatch {
        instance: spec.name().to_string(),
        count,
        seed,
        samples,
    })
}

/// One-dimensional projections of a chart parameter vector.
fn statistic_value(statistic: &str, t: &[f64]) -> Result<f64> {
    match statistic {
        "max-eigenvalue" => Ok(t.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        "min-eigenvalue" => Ok(t.iter().copied().fold(f64::INFINITY, f64::min)),
        "spacing" => {
            if t.len() < 2 {
                return Err(Error::BadParams(
                    "spacing statistic needs at least two parameters".into(),
                ));
            }
            let mut sorted = t.to_vec();
            sorted.sort_by(f64::total_cmp);
            Ok(sorted
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min))
        }
        other => Err(Error::UnknownStatistic(other.to_string())),
    }
}

/// Range the statistic can take over the quadrature box, used to pin the
/// endpoints of the model CDF.
fn statistic_bounds(statistic: &str, quad_box: &[(f64, f64)]) -> (f64, f64) {
    let lo = quad_box.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    let hi = quad_box
        .iter()
        .map(|b| b.1)
        .fold(f64::NEG_INFINITY, f64::max);
    match statistic {
        "spacing" => (0.0, hi - lo),
        _ => (lo, hi),
    }
}

/// Where the model density on the chart box comes from.
pub enum DensitySource<'a> {
    /// The density computed by the library itself.
    Derived,
    /// An externally supplied density with respect to Lebesgue measure on
    /// the box (used for negative controls).
    Custom(&'a (dyn Fn(&[f64]) -> Result<f64> + Sync)),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonReport {
    pub schema: String,
    pub instance: String,
    pub statistic: String,
    pub ks_distance: f64,
    pub sample_count: usize,
    /// Quadrature points per chart axis.
    pub grid_size: usize,
    pub threshold: f64,
    pub pass: bool,
}

struct QuadratureAccumulator {
    /// (statistic value, mass) per node, merged on equal statistics later.
    mass_points: Vec<(f64, f64)>,
    total: f64,
    shell: f64,
}

/// Per-axis flags telling which box sides can leak mass. A side only
/// leaks if the chart domain continues past it; a side resting on a hard
/// wall of the domain (the positivity edge of a cone, say) carries
/// genuine boundary mass instead of truncation error.
fn leaky_sides(spec: &EnsembleSpec, steps: &[f64]) -> (Vec<bool>, Vec<bool>) {
    let quad_box = spec.quad_box();
    let probe = |axis: usize, upper: bool| -> bool {
        let mut t: Vec<f64> = quad_box.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        t[axis] = if upper {
            quad_box[axis].1 + steps[axis]
        } else {
            quad_box[axis].0 - steps[axis]
        };
        spec.chart().in_domain(&t)
    };
    let r = quad_box.len();
    let lo = (0..r).map(|a| probe(a, false)).collect();
    let hi = (0..r).map(|a| probe(a, true)).collect();
    (lo, hi)
}

/// Tensor-grid trapezoid quadrature of the chart density over the box,
/// projected onto one statistic. Returns sorted knots with the accumulated
/// mass at each distinct statistic value, plus total and outermost-shell
/// mass.
fn quadrature_masses(
    spec: &EnsembleSpec,
    statistic: &str,
    source: &DensitySource,
    tol: &Tolerances,
) -> Result<QuadratureAccumulator> {
    let r = spec.chart().r;
    let grid = tol.grid_points.max(2);
    let quad_box = spec.quad_box();
    let axes: Vec<Vec<f64>> = quad_box
        .iter()
        .map(|&(lo, hi)| {
            (0..grid)
                .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
                .collect()
        })
        .collect();
    let steps: Vec<f64> = quad_box
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (grid - 1) as f64)
        .collect();
    let axis_weight = |axis: usize, i: usize| -> f64 {
        let w = if i == 0 || i + 1 == grid { 0.5 } else { 1.0 };
        w * steps[axis]
    };

    let inner_count = grid.pow((r - 1) as u32);
    let (open_lo, open_hi) = leaky_sides(spec, &steps);
    let mut acc = QuadratureAccumulator {
        mass_points: Vec::with_capacity(grid * inner_count),
        total: 0.0,
        shell: 0.0,
    };
    // Outer axis stays sequential so mass accumulation is deterministic;
    // the inner slice is evaluated in parallel and collected in order.
    for i0 in 0..grid {
        let slice: Vec<Result<(f64, f64, bool)>> = (0..inner_count)
            .into_par_iter()
            .map(|flat| {
                let mut idx = vec![0usize; r];
                idx[0] = i0;
                let mut rest = flat;
                for axis in (1..r).rev() {
                    idx[axis] = rest % grid;
                    rest /= grid;
                }
                let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
                let weight: f64 = idx
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| axis_weight(a, i))
                    .product();
                let density = match source {
                    DensitySource::Derived => joint_density(spec, &t, tol)?.density_chart,
                    DensitySource::Custom(f) => f(&t)?,
                };
                let on_shell = idx
                    .iter()
                    .enumerate()
                    .any(|(a, &i)| (i == 0 && open_lo[a]) || (i + 1 == grid && open_hi[a]));
                let stat = statistic_value(statistic, &t)?;
                Ok((stat, weight * density, on_shell))
            })
            .collect();
        for node in slice {
            let (stat, mass, on_shell) = node?;
            acc.total += mass;
            if on_shell {
                acc.shell += mass;
            }
            acc.mass_points.push((stat, mass));
        }
    }
    Ok(acc)
}

/// Continuity-corrected piecewise-linear CDF from scattered mass points.
struct ModelCdf {
    knots: Vec<(f64, f64)>,
}

impl ModelCdf {
    fn build(mut points: Vec<(f64, f64)>, total: f64, bounds: (f64, f64)) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // Merge equal statistic values.
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (s, m) in points {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += m,
                _ => merged.push((s, m)),
            }
        }
        let mut knots = Vec::with_capacity(merged.len() + 2);
        knots.push((bounds.0.min(merged.first().map_or(bounds.0, |k| k.0)), 0.0));
        let mut cum = 0.0;
        for (s, m) in merged {
            let f = (cum + m / 2.0) / total;
            cum += m;
            knots.push((s, f.clamp(0.0, 1.0)));
        }
        knots.push((bounds.1.max(knots.last().unwrap().0), 1.0));
        ModelCdf { knots }
    }

    fn eval(&self, s: f64) -> f64 {
        let k = &self.knots;
        if s <= k[0].0 {
            return 0.0;
        }
        if s >= k[k.len() - 1].0 {
            return 1.0;
        }
        let mut lo = 0;
        let mut hi = k.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if k[mid].0 <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (s0, f0) = k[lo];
        let (s1, f1) = k[hi];
        if s1 <= s0 {
            return f0;
        }
        f0 + (f1 - f0) * (s - s0) / (s1 - s0)
    }
}

/// Kolmogorov-Smirnov comparison of the empirical statistic distribution
/// against the derived density integrated over the chart box.
pub fn ks_compare(
    spec: &EnsembleSpec,
    batch: &SampleBatch,
    statistic: &str,
    tol: &Tolerances,
) -> Result<ComparisonReport> {
    ks_compare_with_density(spec, batch, statistic, &DensitySource::Derived, tol)
}

/// Same comparison against an arbitrary model density on the box.
pub fn ks_compare_with_density(
    spec: &EnsembleSpec,
    batch: &SampleBatch,
    statistic: &str,
    source: &DensitySource,
    tol: &Tolerances,
) -> Result<ComparisonReport> {
    if batch.instance != spec.name() {
        return Err(Error::BadParams(format!(
            "batch from {} compared against {}",
            batch.instance,
            spec.name()
        )));
    }
    // Validate the statistic key up front (independent of batch content).
    statistic_value(statistic, &vec![0.0; spec.chart().r.max(2)])?;

    let acc = quadrature_masses(spec, statistic, source, tol)?;
    if !acc.total.is_finite() || acc.total <= 0.0 {
        return Err(Error::Internal(format!(
            "quadrature mass {} is not usable",
            acc.total
        )));
    }
    // Truncated boxes must capture essentially all mass; the outermost
    // grid shell is the estimate of what leaks. Compact charts (group
    // instances) cover their box exactly.
    if spec.action() == ActionKind::AdjointOnSubspace {
        let shell_fraction = acc.shell / acc.total;
        if shell_fraction >= tol.quadrature_tail {
            return Err(Error::QuadratureDomain {
                shell_mass: shell_fraction,
                tol: tol.quadrature_tail,
            });
        }
    }
    let bounds = statistic_bounds(statistic, spec.quad_box());
    let cdf = ModelCdf::build(acc.mass_points, acc.total, bounds);

    let mut values = Vec::with_capacity(batch.samples.len());
    for t in &batch.samples {
        values.push(statistic_value(statistic, t)?);
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut ks = 0.0_f64;
    for (i, &v) in values.iter().enumerate() {
        let f = cdf.eval(v);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max((f - (i + 1) as f64 / n).abs());
    }
    Ok(ComparisonReport {
        schema: "1".into(),
        instance: spec.name().to_string(),
        statistic: statistic.to_string(),
        ks_distance: ks,
        sample_count: batch.samples.len(),
        grid_size: tol.grid_points.max(2),
        threshold: tol.ks_threshold,
        pass: ks < tol.ks_threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegrationReport {
    pub schema: String,
    pub instance: String,
    pub test_function: String,
    /// Monte-Carlo mean of the test function over ambient samples.
    pub lhs: f64,
    /// Quadrature of the test function against the chart density, as a
    /// normalized ratio.
    pub rhs: f64,
    pub rel_error: f64,
    pub stderr: f64,
    pub sample_count: usize,
    pub pass: bool,
}

type TestFn = Box<dyn Fn(&DMatrix<Complex64>) -> f64 + Send + Sync>;

fn trace_re(x: &DMatrix<Complex64>) -> f64 {
    x.diagonal().iter().map(|z| z.re).sum()
}

fn trace_abs2(x: &DMatrix<Complex64>) -> f64 {
    let tr: Complex64 = x.diagonal().iter().sum();
    tr.norm_sqr()
}

fn trace_power_re(x: &DMatrix<Complex64>, power: usize) -> f64 {
    let mut acc = DMatrix::<Complex64>::identity(x.nrows(), x.ncols());
    for _ in 0..power {
        acc = &acc * x;
    }
    acc.diagonal().iter().map(|z| z.re).sum()
}

/// Registered conjugation-invariant test functions. Matrix families use
/// traces of powers; compact group families use the polynomial class
/// functions |tr x|^2, |tr x|^4 and Re tr(x).
fn test_function(spec: &EnsembleSpec, key: &str) -> Result<TestFn> {
    let group_like = spec.action() == ActionKind::ConjugationOnSubmanifold;
    match (key, group_like) {
        ("tr-x2", false) => Ok(Box::new(|x| trace_power_re(x, 2))),
        ("tr-x4", false) => Ok(Box::new(|x| trace_power_re(x, 4))),
        ("tr-exp-neg", false) => Ok(Box::new(|x| {
            let gram = x.adjoint() * x;
            match crate::lie::expm(&gram.map(|z| -z)) {
                Ok(e) => trace_re(&e),
                Err(_) => f64::NAN,
            }
        })),
        ("tr-x2", true) => Ok(Box::new(trace_abs2)),
        ("tr-x4", true) => Ok(Box::new(|x| trace_abs2(x).powi(2))),
        ("tr-exp-neg", true) => Ok(Box::new(trace_re)),
        _ => Err(Error::UnknownKey(key.to_string())),
    }
}

/// Verify the normalized radial integration identity: the ambient mean of
/// an invariant function equals its chart-density average.
pub fn integration_check(
    spec: &EnsembleSpec,
    f_key: &str,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<IntegrationReport> {
    if count == 0 {
        return Err(Error::BadParams("sample count must be at least 1".into()));
    }
    let f = test_function(spec, f_key)?;

    // Spot-check invariance under the action on a few draws.
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xABCD_EF01);
    for _ in 0..8 {
        let x = spec.sample_matrix(&mut rng);
        let g = spec.random_group_element(&mut rng, 0.5)?;
        let moved = &g * &x * g.adjoint();
        let dev = (f(&moved) - f(&x)).abs();
        if dev > 1e-9 {
            return Err(Error::Internal(format!(
                "test function {f_key} moved by {dev:.3e} under the action"
            )));
        }
    }

    let values = chunked_map(spec, count, seed, |x| Ok(f(x)))?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();

    // Quadrature ratio: the covering degree and overall measure constant
    // cancel between numerator and denominator.
    let r = spec.chart().r;
    let grid = tol.grid_points.max(2);
    let quad_box = spec.quad_box();
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    let mut shell = 0.0;
    let inner_count = grid.pow((r - 1) as u32);
    let steps: Vec<f64> = quad_box
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (grid - 1) as f64)
        .collect();
    let (open_lo, open_hi) = leaky_sides(spec, &steps);
    for i0 in 0..grid {
        let slice: Vec<Result<(f64, f64, bool)>> = (0..inner_count)
            .into_par_iter()
            .map(|flat| {
                let mut idx = vec![0usize; r];
                idx[0] = i0;
                let mut rest = flat;
                for axis in (1..r).rev() {
                    idx[axis] = rest % grid;
                    rest /= grid;
                }
                let t: Vec<f64> = idx
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| quad_box[a].0 + steps[a] * i as f64)
                    .collect();
                let weight: f64 = idx
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| {
                        let w = if i == 0 || i + 1 == grid { 0.5 } else { 1.0 };
                        w * steps[a]
                    })
                    .product();
                let eval = joint_density(spec, &t, tol)?;
                let y = spec.chart().point(&t)?;
                let mass = weight * eval.density_chart;
                let on_shell = idx
                    .iter()
                    .enumerate()
                    .any(|(a, &i)| (i == 0 && open_lo[a]) || (i + 1 == grid && open_hi[a]));
                Ok((f(&y) * mass, mass, on_shell))
            })
            .collect();
        for node in slice {
            let (num, mass, on_shell) = node?;
            numerator += num;
            denominator += mass;
            if on_shell {
                shell += mass;
            }
        }
    }
    if !denominator.is_finite() || denominator <= 0.0 {
        return Err(Error::Internal(format!(
            "quadrature mass {denominator} is not usable"
        )));
    }
    if spec.action() == ActionKind::AdjointOnSubspace {
        let shell_fraction = shell / denominator;
        if shell_fraction >= tol.quadrature_tail {
            return Err(Error::QuadratureDomain {
                shell_mass: shell_fraction,
                tol: tol.quadrature_tail,
            });
        }
    }
    let rhs = numerator / denominator;
    let rel_error = (mean - rhs).abs() / rhs.abs().max(1e-12);
    // Equivalent to rel-error < 3*(stderr/|rhs| + 0.002), stated in a form
    // that stays meaningful as rhs approaches zero.
    let pass = (mean - rhs).abs() < 3.0 * (stderr + 0.002 * rhs.abs());
    Ok(IntegrationReport {
        schema: "1".into(),
        instance: spec.name().to_string(),
        test_function: f_key.to_string(),
        lhs: mean,
        rhs,
        rel_error,
        stderr,
        sample_count: count,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionsSummary {
    pub points: usize,
    pub passed: usize,
    pub orthogonality_passed: usize,
    pub transversality_passed: usize,
    pub isotropy_passed: usize,
    pub regularity_passed: usize,
    pub singular_flagged: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossModeCheck {
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleRatioCheck {
    pub points: usize,
    pub mean_ratio: f64,
    pub coefficient_of_variation: f64,
    pub unit_constant_expected: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GaugeCheck {
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub schema: String,
    pub instance: String,
    pub seed: u64,
    pub conditions: ConditionsSummary,
    pub cross_mode: CrossModeCheck,
    /// Absent for instances without a closed-form reference density.
    pub oracle_ratio: Option<OracleRatioCheck>,
    pub gauge: GaugeCheck,
    pub all_pass: bool,
}

/// Full verification pass over one instance: geometric conditions at
/// random regular points, agreement of the analytic and finite-difference
/// routes, constancy of the density/reference ratio, and invariance of the
/// pull-back volume under group translation.
pub fn verify_suite(
    spec: &EnsembleSpec,
    points: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ValidationReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut conditions = ConditionsSummary {
        points,
        passed: 0,
        orthogonality_passed: 0,
        transversality_passed: 0,
        isotropy_passed: 0,
        regularity_passed: 0,
        singular_flagged: 0,
        pass: false,
    };
    for _ in 0..points {
        let t = spec.sample_t(&mut rng);
        let report = check_conditions(spec, &t, tol)?;
        if report.pass {
            conditions.passed += 1;
        }
        if report.orthogonality_pass {
            conditions.orthogonality_passed += 1;
        }
        if report.transversality_pass {
            conditions.transversality_passed += 1;
        }
        if report.isotropy_pass {
            conditions.isotropy_passed += 1;
        }
        if report.regularity_pass {
            conditions.regularity_passed += 1;
        }
        if report.in_singular_set {
            conditions.singular_flagged += 1;
        }
    }
    conditions.pass = conditions.passed == points && conditions.singular_flagged == 0;

    let cross_points = points.clamp(1, 20);
    let mut max_dev = 0.0_f64;
    for _ in 0..cross_points {
        let t = spec.sample_t(&mut rng);
        max_dev = max_dev.max(psi_mode_agreement(spec, &t, tol)?);
    }
    let cross_mode = CrossModeCheck {
        points: cross_points,
        max_deviation: max_dev,
        tolerance: tol.cross_mode_entry,
        pass: max_dev < tol.cross_mode_entry,
    };

    let oracle_ratio = if spec.has_oracle() {
        let ratio_points = points.clamp(2, 50);
        let mut ratios = Vec::with_capacity(ratio_points);
        for _ in 0..ratio_points {
            let t = spec.sample_t(&mut rng);
            let eval = joint_density(spec, &t, tol)?;
            let reference = spec.oracle_at(&t)?;
            if reference <= 0.0 {
                return Err(Error::Internal(format!(
                    "reference density {reference} not positive at a regular point"
                )));
            }
            ratios.push(eval.density / reference);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var =
            ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64;
        let cv = var.sqrt() / mean.abs().max(1e-300);
        let mut pass = cv < tol.oracle_cv;
        if spec.oracle_is_unit_constant() {
            pass = pass && (mean - 1.0).abs() < tol.oracle_cv;
        }
        Some(OracleRatioCheck {
            points: ratio_points,
            mean_ratio: mean,
            coefficient_of_variation: cv,
            unit_constant_expected: spec.oracle_is_unit_constant(),
            pass,
        })
    } else {
        None
    };

    let gauge_points = points.clamp(1, 20);
    let mut max_residual = 0.0_f64;
    for _ in 0..gauge_points {
        let t = spec.sample_t(&mut rng);
        let g = spec.random_group_element(&mut rng, 0.5)?;
        max_residual = max_residual.max(gauge_invariance_check(spec, &g, &t, tol)?);
    }
    let gauge = GaugeCheck {
        points: gauge_points,
        max_residual,
        tolerance: tol.gauge_residual,
        pass: max_residual < tol.gauge_residual,
    };

    let all_pass = conditions.pass
        && cross_mode.pass
        && oracle_ratio.as_ref().is_none_or(|o| o.pass)
        && gauge.pass;
    Ok(ValidationReport {
        schema: "1".into(),
        instance: spec.name().to_string(),
        seed,
        conditions,
        cross_mode,
        oracle_ratio,
        gauge,
        all_pass,
    })
}
