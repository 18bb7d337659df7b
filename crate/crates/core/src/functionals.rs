//! Scalar functionals and constants: the convexity remainder `R_p`, the
//! stability constant `c_p`, the products `Λ_i`, the stability distances
//! `d_H` and `d_C`, and the supremum over the scale `R`.

use crate::error::{Error, Result};
use crate::manifold::{sphere_area, ManifoldModel};
use crate::quadrature::{integrate_adaptive, IntegralResult, QuadratureSpec};
use crate::radial::{scaling_trace, RadialFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    SubCritical,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    pub p: f64,
    pub beta: f64,
    pub n: usize,
    pub kind: StabilityKind,
}

impl StabilityParams {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.n as f64;
        if !(self.p >= 2.0) {
            v.push(format!("need p >= 2, got p = {}", self.p));
        }
        if !(self.p < n) {
            v.push(format!("need p < N, got p = {}, N = {}", self.p, self.n));
        }
        if self.kind == StabilityKind::SubCritical && !(self.p + self.beta < n) {
            v.push(format!("need p + beta < N, got {} + {} >= {}", self.p, self.beta, self.n));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Hypothesis {
                case: match self.kind {
                    StabilityKind::SubCritical => "STAB_SUBCRIT".into(),
                    StabilityKind::Critical => "STAB_CRIT".into(),
                },
                violations: v,
            })
        }
    }
}

/// `R_p(ζ, η)·|ζ − η|² = |η|^p/p + ((p−1)/p)|ζ|^p − |ζ|^{p−2} Re(ζ η̄)`.
pub fn r_p_weighted(p: f64, zeta: Complex64, eta: Complex64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain {
            what: "R_p",
            requirement: "p > 1",
            value: p,
        });
    }
    let az = zeta.norm();
    let cross = if az == 0.0 {
        0.0
    } else {
        az.powf(p - 2.0) * (zeta * eta.conj()).re
    };
    Ok(eta.norm().powf(p) / p + (p - 1.0) / p * az.powf(p) - cross)
}

fn cp_objective(p: f64, t: f64) -> f64 {
    (1.0 - t).powf(p) - t.powf(p) + p * t.powf(p - 1.0)
}

/// `c_p = min_{0<t<1/2} (1−t)^p − t^p + p t^{p−1}` (infimum including the
/// endpoint limits).
pub fn c_p_constant(p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::Domain {
            what: "c_p",
            requirement: "p >= 2",
            value: p,
        });
    }
    let n = 10_000;
    let mut best = (0.0, cp_objective(p, 0.0));
    for i in 1..=n {
        let t = 0.5 * i as f64 / n as f64;
        let v = cp_objective(p, t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let h = 0.5 / n as f64;
    let (a, b) = ((best.0 - h).max(0.0), (best.0 + h).min(0.5));
    let (t, v) = golden_min(|t| cp_objective(p, t), a, b, 1e-12);
    Ok(v.min(best.1).min(cp_objective(p, t)))
}

fn golden_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// `Λ_i(N, p, β) = ((N(p−1) + β + i p)/p)^p`, with `Λ_{−1} = 1`.
pub fn lambda_constant(i: i32, n: usize, p: f64, beta: f64) -> Result<f64> {
    if i < -1 {
        return Err(Error::InvalidArgument(format!("Lambda index must be >= -1, got {i}")));
    }
    if i == -1 {
        return Ok(1.0);
    }
    let base = (n as f64 * (p - 1.0) + beta + i as f64 * p) / p;
    if !(base > 0.0) {
        return Err(Error::Domain {
            what: "Lambda base",
            requirement: "(N(p-1) + beta + i p)/p > 0",
            value: base,
        });
    }
    Ok(base.powf(p))
}

/// A stability distance and its `p`-th power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub value: f64,
    pub pth_power: f64,
    /// Error estimate of `pth_power`.
    pub error_estimate: f64,
}

impl Distance {
    fn from_power(p: f64, integral: IntegralResult<f64>, tails: f64) -> Self {
        let pth = (integral.value + tails).max(0.0);
        Distance {
            value: pth.powf(1.0 / p),
            pth_power: pth,
            error_estimate: integral.error_estimate + 4.0 * f64::EPSILON * tails.abs(),
        }
    }
}

fn compact_support(f: &RadialFunction, what: &str) -> Result<(f64, f64)> {
    let (lo, hi) = f.support().bounds();
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::Support {
            function: f.label().to_string(),
            reason: format!("{what} needs a compact support away from the pole, got {}", f.support()),
        });
    }
    Ok((lo, hi))
}

/// Width around a removable singularity where the analytic limit is used.
const REMOVABLE_BAND: f64 = 1e-8;

/// Sub-critical distance `d_H(f, R)`.
pub fn d_h(
    model: &ManifoldModel,
    f: &RadialFunction,
    big_r: f64,
    params: &StabilityParams,
    spec: &QuadratureSpec,
) -> Result<Distance> {
    if params.kind != StabilityKind::SubCritical {
        return Err(Error::InvalidArgument("d_H needs sub-critical parameters".into()));
    }
    if !(big_r > 0.0) {
        return Err(Error::Domain {
            what: "scale R",
            requirement: "R > 0",
            value: big_r,
        });
    }
    let (p, beta) = (params.p, params.beta);
    let n = model.dim() as f64;
    let kappa = (n - p - beta) / p;
    let (lo, hi) = compact_support(f, "d_H")?;
    let t = scaling_trace(f, big_r);
    let area = sphere_area(model.dim())?;
    let mut tails = 0.0;
    if t.norm() != 0.0 {
        if !model.has_constant_density() {
            return Err(Error::DivergentTail(format!(
                "d_H of `{}` at R = {big_r}: f(R) != 0 and the density of {} grows at infinity",
                f.label(),
                model.name()
            )));
        }
        let amp = (big_r.powf(kappa) * t.norm()).powf(p);
        tails = area * amp * ((big_r / lo).ln().powf(1.0 - p) + (hi / big_r).ln().powf(1.0 - p)) / (p - 1.0);
    }
    let limit = if t.norm() != 0.0 || f.support().contains(big_r) {
        let g1 = f.derivative(big_r, 1)? + t * (kappa / big_r);
        (big_r * g1.norm()).powf(p) / big_r.powf(p + beta) * model.jacobian(big_r)
    } else {
        0.0
    };
    let scale_t = t * big_r.powf(kappa);
    let integrand = |r: f64| -> f64 {
        if (r - big_r).abs() < REMOVABLE_BAND * big_r {
            return limit;
        }
        let g = f.value(r) - scale_t * r.powf(-kappa);
        let gn = g.norm();
        if gn == 0.0 {
            return 0.0;
        }
        gn.powf(p) / ((big_r / r).ln().abs().powf(p) * r.powf(p + beta)) * model.jacobian(r)
    };
    let res = integrate_adaptive(integrand, lo, hi, &spec.with_splits([big_r]))?.scaled(area);
    Ok(Distance::from_power(p, res, tails))
}

/// Critical distance `d_C(f, R)` on the unit ball, with trace taken at
/// `r* = e^{−1/R}`.
pub fn d_c(
    model: &ManifoldModel,
    f: &RadialFunction,
    big_r: f64,
    params: &StabilityParams,
    spec: &QuadratureSpec,
) -> Result<Distance> {
    if params.kind != StabilityKind::Critical {
        return Err(Error::InvalidArgument("d_C needs critical parameters".into()));
    }
    if !(big_r > 0.0) {
        return Err(Error::Domain {
            what: "scale R",
            requirement: "R > 0",
            value: big_r,
        });
    }
    if !model.has_constant_density() {
        return Err(Error::InvalidArgument(format!(
            "d_C requires a model with constant density, got {}",
            model.name()
        )));
    }
    let p = params.p;
    let n = model.dim() as f64;
    let (lo, hi) = compact_support(f, "d_C")?;
    if !(hi < 1.0) {
        return Err(Error::Support {
            function: f.label().to_string(),
            reason: format!("d_C needs support inside the open unit ball, got {}", f.support()),
        });
    }
    let r_star = (-1.0 / big_r).exp();
    let t = scaling_trace(f, r_star);
    let area = sphere_area(model.dim())?;
    let q = (p - 1.0) / p;
    let mut tails = 0.0;
    if t.norm() != 0.0 {
        let l_lo = -lo.ln();
        let l_hi = -hi.ln();
        let amp = t.norm().powf(p) * big_r.powf(p - 1.0);
        tails = area * amp * ((big_r * l_lo).ln().powf(1.0 - p) + (big_r * l_hi).ln().abs().powf(1.0 - p)) / (p - 1.0);
    }
    let limit = if f.support().contains(r_star) {
        let l_star = 1.0 / big_r;
        let g1 = f.derivative(r_star, 1)? + t * (q * big_r / r_star);
        (r_star * l_star * g1.norm()).powf(p) / (r_star.powf(n) * l_star.powf(p)) * model.jacobian(r_star)
    } else {
        0.0
    };
    let integrand = |r: f64| -> f64 {
        if (r - r_star).abs() < REMOVABLE_BAND * r_star {
            return limit;
        }
        let l = -r.ln();
        let g = f.value(r) - t * (big_r * l).powf(q);
        let gn = g.norm();
        if gn == 0.0 {
            return 0.0;
        }
        gn.powf(p) / (r.powf(n) * l.powf(p) * (big_r * l).ln().abs().powf(p)) * model.jacobian(r)
    };
    let res = integrate_adaptive(integrand, lo, hi, &spec.with_splits([r_star]))?.scaled(area);
    Ok(Distance::from_power(p, res, tails))
}

/// Log-spaced search range for the scale `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SearchRange {
    fn default() -> Self {
        SearchRange {
            lo: 1e-3,
            hi: 1e3,
            points: 61,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub r_star: f64,
    pub value: f64,
    /// Grid samples `(R, distance(R))`.
    pub samples: Vec<(f64, f64)>,
}

/// Maximize `distance` over `R`: log-spaced grid, then golden-section
/// refinement in `log R` around the best grid point.
pub fn sup_over_r<F>(distance: F, search: &SearchRange) -> Result<SupResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(search.lo > 0.0 && search.lo < search.hi && search.points >= 2) {
        return Err(Error::InvalidArgument(format!("invalid search range {search:?}")));
    }
    let (a, b) = (search.lo.ln(), search.hi.ln());
    let step = (b - a) / (search.points - 1) as f64;
    let grid: Vec<f64> = (0..search.points).map(|i| (a + step * i as f64).exp()).collect();
    let checked = |r: f64| -> Result<f64> {
        let v = distance(r)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Degenerate(format!("distance at R = {r} is not a finite nonnegative number ({v})")));
        }
        Ok(v)
    };
    let values: Vec<f64> = grid.par_iter().map(|&r| checked(r)).collect::<Result<_>>()?;
    let samples: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let (ibest, vbest) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if vbest <= 0.0 {
        return Err(Error::Degenerate("distance vanishes on the whole search grid".into()));
    }
    let lo = a + step * ibest.saturating_sub(1) as f64;
    let hi = a + step * (ibest + 1).min(search.points - 1) as f64;
    let mut err = None;
    let (u, v) = golden_min(
        |u| match checked(u.exp()) {
            Ok(v) => -v,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        1e-9,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let (r_star, value) = if -v >= vbest { (u.exp(), -v) } else { (grid[ibest], vbest) };
    Ok(SupResult { r_star, value, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use crate::manifold::Region;
    use approx::assert_relative_eq;

    #[test]
    fn r_p_examples() {
        let z = Complex64::new(0.3, -1.2);
        let e = Complex64::new(-0.7, 0.4);
        assert_relative_eq!(r_p_weighted(2.0, z, e).unwrap(), (z - e).norm_sqr() / 2.0, max_relative = 1e-14);
        assert_eq!(r_p_weighted(3.0, z, z).unwrap().abs() < 1e-15, true);
        let v = r_p_weighted(4.0, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-15);
        assert_relative_eq!(v / 4.0, 0.5, max_relative = 1e-15);
        assert_eq!(r_p_weighted(1.5, Complex64::new(0.0, 0.0), e).unwrap(), e.norm().powf(1.5) / 1.5);
        assert!(r_p_weighted(1.0, z, e).is_err());
    }

    #[test]
    fn c_p_values() {
        assert!((c_p_constant(2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((c_p_constant(3.0).unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-10);
        assert!((c_p_constant(4.0).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!(c_p_constant(1.5).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_constant(-1, 4, 2.0, 0.0).unwrap(), 1.0);
        assert_eq!(lambda_constant(0, 4, 2.0, 0.0).unwrap(), 4.0);
        assert_eq!(lambda_constant(2, 5, 2.0, 0.0).unwrap(), 20.25);
        assert!(lambda_constant(0, 3, 2.0, -10.0).is_err());
        assert!(lambda_constant(-2, 3, 2.0, 0.0).is_err());
    }

    fn bump(lo: f64, hi: f64) -> RadialFunction {
        // (r − lo)²(hi − r)² on [lo, hi]; C¹ at the ends, enough for d_H/d_C
        RadialFunction::from_jet("bump", Region::annulus(lo, hi).unwrap(), 4, move |r, o| {
            if r <= lo || r >= hi {
                return Jet::zero(o);
            }
            let x = Jet::variable(r, o);
            let a = x - lo;
            let b = hi - x;
            a * a * b * b
        })
    }

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (1..n).map(|i| f(a + h * i as f64)).sum::<f64>() * h + 0.5 * h * (f(a) + f(b))
    }

    #[test]
    fn d_h_reduces_without_trace() {
        let m = ManifoldModel::euclidean(4).unwrap();
        let f = bump(0.2, 0.8);
        let params = StabilityParams {
            p: 2.0,
            beta: 0.0,
            n: 4,
            kind: StabilityKind::SubCritical,
        };
        let d = d_h(&m, &f, 2.0, &params, &QuadratureSpec::default()).unwrap();
        let oracle = 2.0 * std::f64::consts::PI.powi(2)
            * trapezoid(
                |r| f.value(r).norm_sqr() / ((2.0 / r).ln().powi(2) * r * r) * r.powi(3),
                0.2,
                0.8,
                20_000,
            );
        assert_relative_eq!(d.pth_power, oracle, max_relative = 1e-6);
    }

    #[test]
    fn d_h_matches_trapezoid_with_trace() {
        let m = ManifoldModel::euclidean(4).unwrap();
        let f = bump(0.5, 2.0);
        let params = StabilityParams {
            p: 2.0,
            beta: 0.0,
            n: 4,
            kind: StabilityKind::SubCritical,
        };
        let big_r = 1.0;
        let d = d_h(&m, &f, big_r, &params, &QuadratureSpec::default()).unwrap();
        // κ = 1; oracle in u = ln r so that the infinite tails become finite
        // intervals of a bounded integrand, truncated far out
        let t = f.value(big_r).re;
        // |g|² r^{-2} r³ dr = (r g)² du
        let integrand = |u: f64| {
            let r = u.exp();
            let vr = if r > 0.5 && r < 2.0 { f.value(r).re * r } else { 0.0 };
            (vr - t).powi(2) / (u * u)
        };
        let inner = trapezoid(&integrand, -2000.0, -1e-7, 4_000_000);
        let outer = trapezoid(&integrand, 1e-7, 2000.0, 4_000_000);
        let far = 2.0 * t * t / 2000.0;
        let oracle = 2.0 * std::f64::consts::PI.powi(2) * (inner + outer + far);
        assert_relative_eq!(d.pth_power, oracle, max_relative = 1e-4);
    }

    #[test]
    fn d_c_matches_trapezoid() {
        let m = ManifoldModel::euclidean(3).unwrap();
        let f = bump(0.1, 0.9);
        let params = StabilityParams {
            p: 2.0,
            beta: 0.0,
            n: 3,
            kind: StabilityKind::Critical,
        };
        let big_r = 1.0;
        let d = d_c(&m, &f, big_r, &params, &QuadratureSpec::default()).unwrap();
        let rs = (-1.0f64).exp();
        let t = f.value(rs).re;
        // oracle in w = ln(R ln(1/r)), w ∈ (−∞, ∞); dr/(r L) = −dw
        let integrand = |w: f64| {
            if w.abs() < 1e-9 {
                return 0.0;
            }
            let l = w.exp() / big_r;
            let r = (-l).exp();
            let v = if r > 0.1 && r < 0.9 { f.value(r).re } else { 0.0 };
            let g = v - t * (big_r * l).sqrt();
            // |g|²/(r³ L² w²) r² dr = |g|²/(L w²) dw
            g * g / (l * w * w)
        };
        let far = 2.0 * t * t * big_r / 600.0;
        let oracle = 4.0 * std::f64::consts::PI
            * (trapezoid(&integrand, -600.0, -1e-7, 6_000_000) + trapezoid(&integrand, 1e-7, 600.0, 6_000_000) + far);
        assert_relative_eq!(d.pth_power, oracle, max_relative = 1e-4);
    }

    #[test]
    fn distances_are_homogeneous() {
        let m = ManifoldModel::euclidean(4).unwrap();
        let f = bump(0.3, 1.5);
        let lam = Complex64::new(-1.7, 0.6);
        let g = f.scaled(lam);
        let sp = StabilityParams {
            p: 2.5,
            beta: 0.5,
            n: 4,
            kind: StabilityKind::SubCritical,
        };
        let a = d_h(&m, &f, 0.9, &sp, &QuadratureSpec::default()).unwrap();
        let b = d_h(&m, &g, 0.9, &sp, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(b.value, lam.norm() * a.value, max_relative = 1e-9);
        let fc = bump(0.2, 0.8);
        let gc = fc.scaled(lam);
        let cp = StabilityParams {
            p: 2.0,
            beta: 0.0,
            n: 4,
            kind: StabilityKind::Critical,
        };
        let a = d_c(&m, &fc, 2.0, &cp, &QuadratureSpec::default()).unwrap();
        let b = d_c(&m, &gc, 2.0, &cp, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(b.value, lam.norm() * a.value, max_relative = 1e-9);
    }

    #[test]
    fn d_h_rejects_divergent_trace_on_curved_model() {
        let m = ManifoldModel::hyperbolic(4, 1.0).unwrap();
        let sp = StabilityParams {
            p: 2.0,
            beta: 0.0,
            n: 4,
            kind: StabilityKind::SubCritical,
        };
        let r = d_h(&m, &bump(0.5, 2.0), 1.0, &sp, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::DivergentTail(_))));
        assert!(d_h(&m, &bump(0.5, 2.0), 3.0, &sp, &QuadratureSpec::default()).is_ok());
    }

    #[test]
    fn sup_examples() {
        let s = sup_over_r(|_| Ok(2.5), &SearchRange::default()).unwrap();
        assert_eq!(s.value, 2.5);
        let s = sup_over_r(|r: f64| Ok((-r.ln().powi(2)).exp()), &SearchRange::default()).unwrap();
        assert!((s.r_star - 1.0).abs() < 1e-6);
        let s = sup_over_r(|r: f64| Ok((-(r.ln() - 0.37).powi(2)).exp()), &SearchRange::default()).unwrap();
        assert!((s.r_star - 0.37f64.exp()).abs() < 1e-6);
        assert!(s.samples.iter().all(|(_, v)| *v <= s.value));
        assert!(sup_over_r(|_| Ok(0.0), &SearchRange::default()).is_err());
        assert!(sup_over_r(|_| Ok(f64::NAN), &SearchRange::default()).is_err());
    }
}
