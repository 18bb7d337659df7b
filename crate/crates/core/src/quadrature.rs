//! Adaptive Gauss–Kronrod quadrature for radial integrals.
//!
//! Panels use the 21-point Kronrod extension of 10-point Gauss. All nodes are
//! interior, so integrable endpoint singularities are never evaluated. The
//! worst panel is bisected until the summed error estimate meets tolerance.

use crate::error::{Error, Result};
use crate::manifold::{sphere_area, ManifoldModel, Region};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525709846,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    fn to_complex(self) -> Complex64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Insets `(left, right)` removed from the ends of the interval.
    pub endpoint_offsets: (f64, f64),
    /// Interior points where the integrand is singular or non-smooth.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            endpoint_offsets: (0.0, 0.0),
            split_points: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_splits(&self, splits: impl IntoIterator<Item = f64>) -> Self {
        let mut s = self.clone();
        s.split_points.extend(splits);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 1".into()));
        }
        if !(self.endpoint_offsets.0 >= 0.0 && self.endpoint_offsets.1 >= 0.0) {
            return Err(Error::InvalidArgument("endpoint offsets must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult<T = Complex64> {
    pub value: T,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

impl<T: QuadValue> IntegralResult<T> {
    pub fn zero() -> Self {
        IntegralResult {
            value: T::zero(),
            error_estimate: 0.0,
            subdivisions_used: 0,
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        IntegralResult {
            value: self.value * s,
            error_estimate: self.error_estimate * s.abs(),
            subdivisions_used: self.subdivisions_used,
        }
    }

    pub fn combine(self, other: Self) -> Self {
        IntegralResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions_used: self.subdivisions_used + other.subdivisions_used,
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        // largest error first; ties go to the leftmost panel
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<(T, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [T::zero(); 21];
    let eval = |x: f64| -> Result<T> {
        let v = f(x);
        if v.is_finite_value() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x })
        }
    };
    fv[10] = eval(c)?;
    for j in 0..10 {
        let dx = h * XGK[j];
        fv[j] = eval(c - dx)?;
        fv[20 - j] = eval(c + dx)?;
    }
    let mut k = fv[10] * WGK[10];
    let mut g = T::zero();
    let mut abs_k = fv[10].magnitude() * WGK[10];
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        k = k + pair * WGK[j];
        abs_k += (fv[j].magnitude() + fv[20 - j].magnitude()) * WGK[j];
        if j % 2 == 1 {
            g = g + pair * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = (fv[10] - mean).magnitude() * WGK[10];
    for j in 0..10 {
        asc += ((fv[j] - mean).magnitude() + (fv[20 - j] - mean).magnitude()) * WGK[j];
    }
    let hl = h.abs();
    let (resasc, resabs) = (asc * hl, abs_k * hl);
    let mut err = (k - g).magnitude() * hl;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((k * h, err))
}

/// Integrate `f` over `[a, b]` adaptively.
pub fn integrate_adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    let (lo, hi) = (a + spec.endpoint_offsets.0, b - spec.endpoint_offsets.1);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration interval [{a}, {b}] with offsets {:?} is empty or unbounded",
            spec.endpoint_offsets
        )));
    }
    let mut cuts = vec![lo];
    let mut splits: Vec<f64> = spec
        .split_points
        .iter()
        .copied()
        .filter(|s| *s > lo && *s < hi)
        .collect();
    splits.sort_by(f64::total_cmp);
    splits.dedup();
    cuts.extend(splits);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1])?;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut subdivisions = 0usize;
    // panels too narrow to split are parked here
    let mut frozen: Vec<Panel<T>> = Vec::new();
    loop {
        let (total, err) = sum_panels(heap.iter().chain(frozen.iter()));
        let tol = spec.abs_tol.max(spec.rel_tol * total.magnitude());
        if err <= tol {
            return Ok(IntegralResult {
                value: total,
                error_estimate: err,
                subdivisions_used: subdivisions,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::NonConvergence {
                    best: total.to_complex(),
                    error: err,
                    subdivisions,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if too_narrow {
            frozen.push(worst);
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            let (total, err) = sum_panels(heap.iter().chain(frozen.iter()));
            return Err(Error::NonConvergence {
                best: total.to_complex(),
                error: err,
                subdivisions,
            });
        }
        subdivisions += 1;
        for (x0, x1) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk21(&f, x0, x1)?;
            heap.push(Panel {
                a: x0,
                b: x1,
                value: v,
                error: e,
            });
        }
    }
}

fn sum_panels<'a, T: QuadValue>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, f64) {
    // fixed left-to-right order keeps results bit-reproducible
    let mut v: Vec<&Panel<T>> = panels.collect();
    v.sort_by(|p, q| p.a.total_cmp(&q.a));
    v.iter().fold((T::zero(), 0.0), |(s, e), p| (s + p.value, e + p.error))
}

/// Integrate over `[a, ∞)` through `x = a + (1 − t)/t`, `t ∈ (0, 1]`.
pub fn integrate_to_infinity<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    let mut s = spec.clone();
    s.endpoint_offsets = (0.0, 0.0);
    s.split_points = spec
        .split_points
        .iter()
        .filter(|x| **x > a)
        .map(|x| 1.0 / (1.0 + x - a))
        .collect();
    integrate_adaptive(
        |t| {
            let x = a + (1.0 - t) / t;
            let v = f(x);
            if v.magnitude() == 0.0 {
                v
            } else {
                v * (1.0 / (t * t))
            }
        },
        0.0,
        1.0,
        &s,
    )
}

/// `∫_lo^hi g(r) dr` for `hi` finite or infinite.
pub fn integrate_interval<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    if hi.is_infinite() {
        integrate_to_infinity(f, lo, spec)
    } else {
        integrate_adaptive(f, lo, hi, spec)
    }
}

/// `|S^{N−1}| ∫_region integrand(r) r^{N−1} J(r) dr`.
pub fn ball_integral<T: QuadValue, F: Fn(f64) -> T>(
    model: &ManifoldModel,
    region: &Region,
    integrand: F,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    let (lo, hi) = region.bounds();
    let area = sphere_area(model.dim())?;
    let weighted = |r: f64| {
        let v = integrand(r);
        // skip the Jacobian where the integrand vanishes so that a large
        // density cannot turn 0 into NaN
        if v.magnitude() == 0.0 {
            v
        } else {
            v * model.jacobian(r)
        }
    };
    Ok(integrate_interval(weighted, lo, hi, spec)?.scaled(area))
}

/// `∫_0^{s_max} s^{ε−1} h(s) ds` for small `ε > 0`, with the singular part
/// `h(0) s_max^ε / ε` taken in closed form.
pub fn integrate_power_singular<F: Fn(f64) -> f64>(
    h: F,
    eps: f64,
    s_max: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<f64>> {
    if !(eps > 0.0 && s_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power-singular integral needs eps > 0 and s_max > 0, got ({eps}, {s_max})"
        )));
    }
    let h0 = h(0.0);
    let singular = h0 * s_max.powf(eps) / eps;
    let rest = integrate_adaptive(|s| s.powf(eps - 1.0) * (h(s) - h0), 0.0, s_max, spec)?;
    Ok(IntegralResult {
        value: singular + rest.value,
        error_estimate: rest.error_estimate + 4.0 * f64::EPSILON * singular.abs(),
        subdivisions_used: rest.subdivisions_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_exact_for_polynomials() {
        let f = |x: f64| x;
        for deg in 0..=31 {
            let (v, _) = gk21(&|x: f64| f(x).powi(deg), 0.0, 1.0).unwrap();
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
        // the embedded Gauss rule is exact to degree 19
        for deg in 0..=19 {
            let c = 0.5;
            let mut g = 0.0;
            for j in 0..5 {
                let x = XGK[2 * j + 1];
                g += WG[j] * ((c - c * x).powi(deg) + (c + c * x).powi(deg));
            }
            assert!((g * c - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "gauss degree {deg}");
        }
    }

    #[test]
    fn square_on_unit_interval() {
        let r = integrate_adaptive(|x: f64| x * x, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let r = integrate_adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_singular_weight_closed_form() {
        // ∫_0^{1/2} L^{-1-ε}/r dr with L = ln(1/r) equals (ln 2)^{-ε}/ε.
        // In r the mass sits below any representable radius, so integrate in
        // u = ln(1/r) on [ln 2, ∞).
        let eps = 0.1;
        let exact = 2f64.ln().powf(-eps) / eps;
        assert!((exact - 10.3733).abs() < 1e-4);
        let r = integrate_to_infinity(|u: f64| u.powf(-1.0 - eps), 2f64.ln(), &spec()).unwrap();
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_adaptive(|x: f64| Complex64::new(0.0, x).exp(), 0.0, PI, &spec()).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn split_points_respected() {
        let f = |x: f64| (x - 0.3).abs().sqrt();
        let s = spec().with_splits([0.3]);
        let whole = integrate_adaptive(f, 0.0, 1.0, &s).unwrap();
        let left = integrate_adaptive(f, 0.0, 0.3, &spec()).unwrap();
        let right = integrate_adaptive(f, 0.3, 1.0, &spec()).unwrap();
        let tol = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-14;
        assert!((whole.value - left.value - right.value).abs() <= tol);
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let s = QuadratureSpec {
            max_subdivisions: 3,
            ..spec()
        };
        match integrate_adaptive(|x: f64| (1.0 / x).sin() / x, 1e-6, 1.0, &s) {
            Err(Error::NonConvergence { subdivisions, .. }) => assert_eq!(subdivisions, 3),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_reported() {
        let err = integrate_adaptive(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &spec());
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn ball_integral_examples() {
        let m = ManifoldModel::euclidean(3).unwrap();
        let ball = Region::ball(1.0).unwrap();
        let a = ball_integral(&m, &ball, |r: f64| (r * (1.0 - r)).powi(2) / (r * r), &spec()).unwrap();
        assert_relative_eq!(a.value, 2.0 * PI / 15.0, max_relative = 1e-12);
        let b = ball_integral(&m, &ball, |r: f64| (1.0 - 2.0 * r).powi(2), &spec()).unwrap();
        assert_relative_eq!(b.value, 8.0 * PI / 15.0, max_relative = 1e-12);
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        let z = ball_integral(&h, &Region::exterior(1.0).unwrap(), |_r: f64| 0.0, &spec()).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn power_singular_matches_closed_form() {
        // ∫_0^1 s^{ε−1}(1+s) ds = 1/ε + 1/(1+ε)
        let eps = 2e-3;
        let r = integrate_power_singular(|s| 1.0 + s, eps, 1.0, &spec()).unwrap();
        assert_relative_eq!(r.value, 1.0 / eps + 1.0 / (1.0 + eps), max_relative = 1e-11);
    }

    #[test]
    fn deterministic_results() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp() / x.sqrt();
        let a = integrate_adaptive(f, 0.0, 5.0, &spec()).unwrap();
        let b = integrate_adaptive(f, 0.0, 5.0, &spec()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
