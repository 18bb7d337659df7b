//! Sharpness sweeps over extremal families, seeded test-function corpora and
//! stability scans.

use crate::catalog::{evaluate, validate_params, CaseId, ParamSet, VerificationReport};
use crate::error::{Error, Result};
use crate::functionals::{c_p_constant, StabilityKind};
use crate::jet::{Jet, MAX_ORDER};
use crate::manifold::{sphere_area, ManifoldModel, Region};
use crate::quadrature::{integrate_adaptive, integrate_power_singular, integrate_to_infinity, QuadratureSpec};
use crate::radial::{extremal_boundary_family, extremal_log_family, step_jet, CutoffSpec, Plateau, RadialFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

/// Default sweep ladder for δ (or `t − (b−1)/p`).
pub const DEFAULT_SWEEP: [f64; 6] = [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3];

/// Cutoff width of the boundary family used in double-weight sweeps.
pub const BOUNDARY_WIDTH: f64 = 0.25;

/// Inner transition `|ln r| ∈ [u0, 2u0]` of the dual-log family.
pub const DUAL_LOG_U0: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the point could not be evaluated.
    pub ratio: Option<f64>,
    pub deficit: f64,
    pub slack: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub case_id: CaseId,
    pub model: String,
    pub params: ParamSet,
    /// Name of the swept parameter.
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub limit: f64,
    pub target: f64,
    pub relative_gap: f64,
}

impl SweepResult {
    /// Every evaluated point respects the inequality.
    pub fn all_points_hold(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Least-squares line through the three smallest parameter values, read at 0.
pub fn extrapolate_linear(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| (*x, *y))
        .collect();
    if pts.is_empty() {
        return Err(Error::Degenerate("no finite sweep ratios to extrapolate".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(3);
    if pts.len() == 1 {
        return Ok(pts[0].1);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Ok(my);
    }
    Ok(my - sxy / sxx * mx)
}

struct Sides {
    lhs: f64,
    lhs_err: f64,
    rhs: f64,
    rhs_err: f64,
}

/// `∫_lo^hi w(r) jac(r) dr`, surfacing the first error raised by `w`.
fn band(
    model: &ManifoldModel,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    w: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let res = integrate_adaptive(
        |r| match w(r) {
            Ok(0.0) => 0.0,
            Ok(v) => v * model.jacobian(r),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let res = res?;
    Ok((res.value, res.error_estimate))
}

fn log_family_point(s: &ParamSet, model: &ManifoldModel, delta: f64, spec: &QuadratureSpec) -> Result<Sides> {
    let (p, gamma, big_r) = (s.p, s.gamma, s.big_r);
    let n = model.dim() as f64;
    let f = extremal_log_family(gamma, p, delta, big_r)?;
    let kappa = (gamma - 1.0 - p * delta) / p;
    let e = p * delta;
    // plateau r < R/2 in u = ln(R/r): both sides reduce to ∫ u^{−1−pδ} J du
    let ln2 = std::f64::consts::LN_2;
    let mut plateau = ln2.powf(-e) / e;
    let mut plateau_err = 0.0;
    if model.has_constant_density() {
        plateau *= model.density(big_r)?;
    } else {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let corr = integrate_to_infinity(
            |u| match model.density(big_r * (-u).exp()) {
                // J − 1 = O(r²) is below rounding long before r underflows
                _ if big_r * (-u).exp() < 1e-9 => 0.0,
                Ok(j) => u.powf(-1.0 - e) * (j - 1.0),
                Err(err) => {
                    failure.borrow_mut().get_or_insert(err);
                    f64::NAN
                }
            },
            ln2,
            spec,
        );
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        let corr = corr?;
        plateau += corr.value;
        plateau_err = corr.error_estimate;
    }
    let (lo, hi) = (0.5 * big_r, 0.75 * big_r);
    let l = |r: f64| (big_r / r).ln();
    let (lt, lt_err) = band(model, lo, hi, spec, |r| Ok(f.value(r).norm().powf(p) / (r.powf(n) * l(r).powf(gamma))))?;
    let (rt, rt_err) = band(model, lo, hi, spec, |r| {
        Ok(r.powf(p - n) * l(r).powf(p - gamma) * f.derivative(r, 1)?.norm().powf(p))
    })?;
    let kp = kappa.powf(p);
    Ok(Sides {
        lhs: plateau + lt,
        lhs_err: plateau_err + lt_err,
        rhs: kp * plateau + rt,
        rhs_err: kp * plateau_err + rt_err,
    })
}

fn boundary_family_point(s: &ParamSet, model: &ManifoldModel, tau: f64, spec: &QuadratureSpec) -> Result<Sides> {
    let (p, a, b, c) = (s.p, s.a, s.b, s.c);
    let t = (b - 1.0) / p + tau;
    let eps = p * tau;
    let w = BOUNDARY_WIDTH;
    let f = extremal_boundary_family(t, c, w)?;
    // plateau [1 − w, 1] in s = 1 − r^c: integrand s^{ε−1} h(s)
    let r_of = |s: f64| (1.0 - s).powf(1.0 / c);
    let h_lhs = |s: f64| {
        let r = r_of(s);
        model.jacobian(r) * r.powf(1.0 - c - a) / c
    };
    let s_max = 1.0 - (1.0 - w).powf(c);
    let pl = integrate_power_singular(h_lhs, eps, s_max, spec)?;
    let tcp = (t * c).powf(p);
    let pr = integrate_power_singular(|s| tcp * r_of(s).powf(c * p) * h_lhs(s), eps, s_max, spec)?;
    let one_minus = |r: f64| -(c * r.ln()).exp_m1();
    let (lo, hi) = (1.0 - 2.0 * w, 1.0 - w);
    let (lt, lt_err) = band(model, lo, hi, spec, |r| Ok(f.value(r).norm().powf(p) / (r.powf(a) * one_minus(r).powf(b))))?;
    let (rt, rt_err) = band(model, lo, hi, spec, |r| {
        Ok(f.derivative(r, 1)?.norm().powf(p) / (r.powf(a - p) * one_minus(r).powf(b - p)))
    })?;
    Ok(Sides {
        lhs: pl.value + lt,
        lhs_err: pl.error_estimate + lt_err,
        rhs: pr.value + rt,
        rhs_err: pr.error_estimate + rt_err,
    })
}

/// `f_δ = |ln r|^{−(1+pδ)/p} χ(|ln r|)`, with χ vanishing for `|ln r| ≤ u0`
/// and equal to 1 for `|ln r| ≥ 2u0`. Not compactly supported; the sweep
/// takes its far plateau in closed form.
pub fn dual_log_family(p: f64, delta: f64, u0: f64) -> Result<RadialFunction> {
    if !(p > 1.0 && delta > 0.0 && u0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dual-log family needs p > 1, delta > 0, u0 > 0, got ({p}, {delta}, {u0})"
        )));
    }
    let kappa = (1.0 + p * delta) / p;
    Ok(RadialFunction::from_jet(
        format!("dual-log-family[p={p},d={delta},u0={u0}]"),
        Region::whole(),
        MAX_ORDER,
        move |r, o| {
            let l = r.ln();
            if l.abs() <= u0 {
                return Jet::zero(o);
            }
            let w = if l > 0.0 {
                Jet::variable(r, o).ln()
            } else {
                Jet::variable(r, o).ln() * -1.0
            };
            let chi = step_jet((w - u0) * (1.0 / u0));
            w.powf(-kappa) * chi
        },
    ))
}

fn dual_log_point(s: &ParamSet, model: &ManifoldModel, delta: f64, spec: &QuadratureSpec) -> Result<Sides> {
    let p = s.p;
    let n = model.dim() as f64;
    let u0 = DUAL_LOG_U0;
    let f = dual_log_family(p, delta, u0)?;
    let kappa = (1.0 + p * delta) / p;
    let e = p * delta;
    // both sides of |ln r| ≥ 2u0 give J ∫ u^{−1−pδ} du
    let plateau = 2.0 * model.density(1.0)? * (2.0 * u0).powf(-e) / e;
    let lhs_w = |r: f64| Ok(f.value(r).norm().powf(p) / r.powf(n));
    let rhs_w = |r: f64| Ok(r.ln().abs().powf(p) * r.powf(p - n) * f.derivative(r, 1)?.norm().powf(p));
    let mut lhs = (plateau, 0.0);
    let mut rhs = (kappa.powf(p) * plateau, 0.0);
    for (lo, hi) in [((-2.0 * u0).exp(), (-u0).exp()), (u0.exp(), (2.0 * u0).exp())] {
        let l = band(model, lo, hi, spec, lhs_w)?;
        let r = band(model, lo, hi, spec, rhs_w)?;
        lhs = (lhs.0 + l.0, lhs.1 + l.1);
        rhs = (rhs.0 + r.0, rhs.1 + r.1);
    }
    Ok(Sides {
        lhs: lhs.0,
        lhs_err: lhs.1,
        rhs: rhs.0,
        rhs_err: rhs.1,
    })
}

/// Ratios `RHS/LHS` along an extremal family, extrapolated linearly to the
/// end of the family.
///
/// `values` holds δ for the log families and `t − (b−1)/p` for the
/// double-weight family; it must be positive and strictly decreasing.
pub fn sharpness_sweep(
    id: CaseId,
    params: &ParamSet,
    model: &ManifoldModel,
    values: &[f64],
    spec: &QuadratureSpec,
) -> Result<SweepResult> {
    let (parameter, target) = match id {
        CaseId::CritLogGeneral => ("delta", ((params.gamma - 1.0) / params.p).powf(params.p)),
        CaseId::DoubleWeight => ("t - (b-1)/p", ((params.b - 1.0) * params.c / params.p).powf(params.p)),
        CaseId::CritDualLog => ("delta", params.p.powf(-params.p)),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no sharpness family for {id}; use CRIT_LOG_GENERAL, DOUBLE_WEIGHT or CRIT_DUAL_LOG"
            )))
        }
    };
    validate_params(id, params).map_err(|v| Error::Hypothesis {
        case: id.to_string(),
        violations: v,
    })?;
    if params.n != model.dim() {
        return Err(Error::InvalidArgument(format!(
            "parameter N = {} does not match model {}",
            params.n,
            model.name()
        )));
    }
    if id == CaseId::CritDualLog && !model.has_constant_density() {
        return Err(Error::Hypothesis {
            case: id.to_string(),
            violations: vec![format!("model {} must have constant density", model.name())],
        });
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !(*v > 0.0)) || values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "sweep values must be positive and strictly decreasing, got {values:?}"
        )));
    }
    if id == CaseId::CritLogGeneral {
        let top = values[0];
        if !(params.gamma - 1.0 - params.p * top > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta = {top} makes the log-family exponent non-positive"
            )));
        }
    }
    let area = sphere_area(model.dim())?;
    let points: Vec<SweepPoint> = values
        .par_iter()
        .map(|&v| {
            let sides = match id {
                CaseId::CritLogGeneral => log_family_point(params, model, v, spec),
                CaseId::DoubleWeight => boundary_family_point(params, model, v, spec),
                _ => dual_log_point(params, model, v, spec),
            };
            match sides {
                Ok(s) => {
                    let (lhs, rhs) = (area * s.lhs, area * s.rhs);
                    let ratio = rhs / lhs;
                    let deficit = rhs - target * lhs;
                    let slack = 10.0 * area * (target * s.lhs_err + s.rhs_err) + 1e-9 * rhs.abs();
                    SweepPoint {
                        value: v,
                        lhs,
                        rhs,
                        ratio: ratio.is_finite().then_some(ratio),
                        deficit,
                        slack,
                        pass: ratio.is_finite() && deficit >= -slack,
                        error: (!ratio.is_finite()).then(|| format!("non-finite ratio {rhs}/{lhs}")),
                    }
                }
                Err(e) => SweepPoint {
                    value: v,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    ratio: None,
                    deficit: f64::NAN,
                    slack: f64::NAN,
                    pass: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().filter_map(|p| p.ratio.map(|r| (p.value, r))).unzip();
    // a sweep with no evaluable point still reports its per-point errors
    let limit = extrapolate_linear(&xs, &ys).unwrap_or(f64::NAN);
    Ok(SweepResult {
        case_id: id,
        model: model.name().to_string(),
        params: params.clone(),
        parameter: parameter.to_string(),
        points,
        limit,
        target,
        relative_gap: (limit - target).abs() / target.abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueField {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub support: Region,
    /// Derivative depth carried in closed form.
    pub smoothness: usize,
    pub field: ValueField,
}

impl CorpusSpec {
    pub fn new(seed: u64, count: usize, support: Region) -> Self {
        CorpusSpec {
            seed,
            count,
            support,
            smoothness: MAX_ORDER,
            field: ValueField::Real,
        }
    }

    pub fn complex(mut self) -> Self {
        self.field = ValueField::Complex;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("corpus count must be at least 1".into()));
        }
        if self.smoothness > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "corpus smoothness {} exceeds the supported depth {MAX_ORDER}",
                self.smoothness
            )));
        }
        let (lo, hi) = self.support.bounds();
        if !hi.is_finite() || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "corpus support {} must be bounded and non-empty",
                self.support
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Bump {
    amp: f64,
    mu: f64,
    sigma: f64,
}

/// Seeded smooth test functions: sums of one to three Gaussians in `ln r`
/// under a smooth cutoff to the support, optionally with a phase
/// `e^{iθ(r)}` for polynomial θ.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<RadialFunction>> {
    spec.validate()?;
    let (lo, hi) = spec.support.bounds();
    let width = 0.25 * (hi - lo);
    let inner = if lo > 0.0 {
        Some(CutoffSpec::new(lo, lo + width, Plateau::Above)?)
    } else {
        None
    };
    let outer = CutoffSpec::new(hi - width, hi, Plateau::Below)?;
    let log_lo = if lo > 0.0 { lo.ln() } else { hi.ln() - 3.0 };
    let log_hi = hi.ln();
    let span = log_hi - log_lo;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let k = rng.gen_range(1..=3);
        let bumps: Vec<Bump> = (0..k)
            .map(|_| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Bump {
                    amp: sign * rng.gen_range(0.5..2.0),
                    mu: rng.gen_range(log_lo..log_hi),
                    sigma: span * rng.gen_range(0.15..0.5),
                }
            })
            .collect();
        let phase = match spec.field {
            ValueField::Real => None,
            ValueField::Complex => Some([rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 0.5 * (lo + hi)]),
        };
        let label = format!("corpus-s{}-{i:03}", spec.seed);
        let support = spec.support;
        out.push(RadialFunction::from_jet(label, support, spec.smoothness, move |r, o| {
            if r >= hi || r <= lo {
                return Jet::zero(o);
            }
            let x = Jet::variable(r, o);
            let lx = x.ln();
            let mut g = Jet::zero(o);
            for b in &bumps {
                let z = (lx - b.mu) * (1.0 / b.sigma);
                g = g + (z * z * -0.5).exp() * b.amp;
            }
            let mut v = g * outer.jet(r, o);
            if let Some(c) = &inner {
                v = v * c.jet(r, o);
            }
            if let Some([c1, c2, m]) = phase {
                let y = x - m;
                let theta = y * c1 + y * y * c2;
                v = v * (theta * Complex64::i()).exp();
            }
            v
        }));
    }
    Ok(out)
}

/// Stability reports of every corpus function for the given kind.
pub fn stability_deficit_scan(
    kind: StabilityKind,
    params: &ParamSet,
    model: &ManifoldModel,
    corpus: &[RadialFunction],
    spec: &QuadratureSpec,
) -> Result<Vec<VerificationReport>> {
    let id = match kind {
        StabilityKind::SubCritical => CaseId::StabSubcrit,
        StabilityKind::Critical => CaseId::StabCrit,
    };
    validate_params(id, params).map_err(|v| Error::Hypothesis {
        case: id.to_string(),
        violations: v,
    })?;
    corpus.par_iter().map(|f| evaluate(id, params, model, f, spec)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenProblemE {
    pub function: String,
    /// Hardy deficit over `sup_R d_H(f, R)^p`.
    pub value: f64,
    /// `c_p ((p−1)/p)^p`.
    pub lower_bound: f64,
    pub deficit: f64,
    pub sup_distance: f64,
    pub r_star: f64,
    pub slack: f64,
}

/// The quotient of the sub-critical Hardy deficit by `sup_R d_H(f, R)^p`.
pub fn open_problem_e(
    f: &RadialFunction,
    params: &ParamSet,
    model: &ManifoldModel,
    spec: &QuadratureSpec,
) -> Result<OpenProblemE> {
    let report = evaluate(CaseId::StabSubcrit, params, model, f, spec)?;
    open_problem_from_report(&report)
}

/// [`open_problem_e`] read off an existing `STAB_SUBCRIT` report.
pub fn open_problem_from_report(report: &VerificationReport) -> Result<OpenProblemE> {
    if report.case_id != CaseId::StabSubcrit {
        return Err(Error::InvalidArgument(format!(
            "open problem quotient needs a STAB_SUBCRIT report, got {}",
            report.case_id
        )));
    }
    if !(report.lhs > 0.0) {
        return Err(Error::Degenerate(format!(
            "sup_R d_H(f, R)^p vanishes for `{}`",
            report.function
        )));
    }
    let p = report.params.p;
    Ok(OpenProblemE {
        function: report.function.clone(),
        value: report.rhs / report.lhs,
        lower_bound: c_p_constant(p)? * ((p - 1.0) / p).powf(p),
        deficit: report.rhs,
        sup_distance: report.lhs,
        r_star: report.r_star.unwrap_or(f64::NAN),
        slack: report.slack / report.lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn euclid(n: usize) -> ManifoldModel {
        ManifoldModel::euclidean(n).unwrap()
    }

    #[test]
    fn extrapolation() {
        assert_eq!(extrapolate_linear(&[0.1], &[3.0]).unwrap(), 3.0);
        let xs = [0.1, 0.05, 0.02, 0.01];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 5.0 * x).collect();
        assert_relative_eq!(extrapolate_linear(&xs, &ys).unwrap(), 2.0, max_relative = 1e-13);
        // only the three smallest values enter the fit
        let mut ys2 = ys.clone();
        ys2[0] = 100.0;
        assert_relative_eq!(extrapolate_linear(&xs, &ys2).unwrap(), 2.0, max_relative = 1e-13);
        assert!(extrapolate_linear(&[], &[]).is_err());
    }

    #[test]
    fn log_sweep_quarter() {
        let mut s = ParamSet::base(3);
        s.gamma = 2.0;
        s.p = 2.0;
        let r = sharpness_sweep(CaseId::CritLogGeneral, &s, &euclid(3), &DEFAULT_SWEEP, &QuadratureSpec::default()).unwrap();
        assert!(r.relative_gap < 0.02, "{r:?}");
        assert!(r.all_points_hold());
        for p in &r.points {
            let k = (1.0 - 2.0 * p.value) / 2.0;
            assert!(p.ratio.unwrap() >= k * k);
        }
    }

    #[test]
    fn single_point_sweep_limit_is_its_ratio() {
        let s = ParamSet::base(5);
        let mut s = s;
        s.c = 3.0;
        let r = sharpness_sweep(CaseId::DoubleWeight, &s, &euclid(5), &[0.01], &QuadratureSpec::default()).unwrap();
        assert_eq!(r.limit, r.points[0].ratio.unwrap());
    }

    #[test]
    fn sweep_rejects_bad_ladders() {
        let mut s = ParamSet::base(5);
        s.c = 3.0;
        let spec = QuadratureSpec::default();
        assert!(sharpness_sweep(CaseId::DoubleWeight, &s, &euclid(5), &[0.01, 0.02], &spec).is_err());
        assert!(sharpness_sweep(CaseId::DoubleWeight, &s, &euclid(5), &[], &spec).is_err());
        assert!(sharpness_sweep(CaseId::ClassicalHardy, &s, &euclid(5), &[0.1], &spec).is_err());
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        assert!(sharpness_sweep(CaseId::CritDualLog, &ParamSet::base(3), &h, &[0.1], &spec).is_err());
    }

    #[test]
    fn dual_log_sweep_reaches_p_to_minus_p() {
        let r = sharpness_sweep(
            CaseId::CritDualLog,
            &ParamSet::base(3),
            &euclid(3),
            &DEFAULT_SWEEP,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(r.relative_gap < 0.02, "{r:?}");
        assert!(r.all_points_hold());
    }

    #[test]
    fn corpus_is_deterministic_and_supported() {
        let spec = CorpusSpec::new(7, 5, Region::Annulus { inner: 0.2, outer: 0.9 }).complex();
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        for (f, g) in a.iter().zip(&b) {
            assert_eq!(f.label(), g.label());
            for i in 0..100 {
                let r = 0.01 + 1.2 * i as f64 / 100.0;
                assert_eq!(f.value(r), g.value(r));
            }
            for r in [0.0001, 0.1, 0.2, 0.9, 0.95, 3.0] {
                assert!(f.value(r).norm() <= 1e-12);
            }
        }
        assert_eq!(a[3].label(), "corpus-s7-003");
        assert!(!a.iter().all(|f| f.is_real_valued()));
        let c = generate_corpus(&CorpusSpec::new(8, 5, Region::Annulus { inner: 0.2, outer: 0.9 })).unwrap();
        assert!(c.iter().all(|f| f.is_real_valued()));
        assert_ne!(a[0].value(0.5), c[0].value(0.5));
        assert!(generate_corpus(&CorpusSpec::new(1, 0, Region::Annulus { inner: 0.2, outer: 0.9 })).is_err());
    }

    #[test]
    fn ball_corpus_is_smooth_at_the_pole() {
        let c = generate_corpus(&CorpusSpec::new(3, 4, Region::Ball { radius: 1.0 })).unwrap();
        for f in &c {
            assert!(f.value(1e-6).norm() < 1e-3);
            assert!(f.value(1.0).norm() == 0.0);
        }
    }

    #[test]
    fn open_problem_quarter_bound() {
        let m = euclid(4);
        let p = ParamSet::defaults(CaseId::StabSubcrit, 4).unwrap();
        let corpus = generate_corpus(&CorpusSpec::new(11, 3, Region::Annulus { inner: 0.2, outer: 0.9 })).unwrap();
        for f in &corpus {
            let e = open_problem_e(f, &p, &m, &QuadratureSpec::default()).unwrap();
            assert_relative_eq!(e.lower_bound, 0.25, max_relative = 1e-12);
            assert!(e.value >= e.lower_bound - e.slack, "{e:?}");
            let scaled = f.scaled(Complex64::new(0.0, 3.0));
            let e2 = open_problem_e(&scaled, &p, &m, &QuadratureSpec::default()).unwrap();
            assert_relative_eq!(e.value, e2.value, max_relative = 1e-8);
        }
    }
}
