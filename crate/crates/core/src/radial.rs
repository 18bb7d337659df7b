//! Radial test functions, the radial Laplacian and its iterates, cutoffs and
//! the extremal families used for sharpness probing.

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::manifold::{ManifoldModel, Region};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// `(r, order) ↦` Taylor jet of the function at `r`.
pub type JetFn = Arc<dyn Fn(f64, usize) -> Jet + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    /// Exact derivatives up to `depth` via jets.
    Analytic { jet: JetFn, depth: usize },
    /// Value and optional derivative closures; anything missing falls back
    /// to central differences.
    Sampled { value: ScalarFn, derivs: Vec<ScalarFn> },
}

#[derive(Clone)]
pub struct RadialFunction {
    label: String,
    support: Region,
    repr: Repr,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("analytic_depth", &self.analytic_depth())
            .finish()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest relative disagreement tolerated between two Richardson levels.
pub const FD_REL_BOUND: f64 = 1e-6;

impl RadialFunction {
    pub fn from_jet(
        label: impl Into<String>,
        support: Region,
        depth: usize,
        jet: impl Fn(f64, usize) -> Jet + Send + Sync + 'static,
    ) -> Self {
        RadialFunction {
            label: label.into(),
            support,
            repr: Repr::Analytic {
                jet: Arc::new(jet),
                depth: depth.min(MAX_ORDER),
            },
        }
    }

    /// A function given by its value and the leading derivatives
    /// `f′, f″, …` that are known in closed form (possibly none).
    pub fn from_closures(
        label: impl Into<String>,
        support: Region,
        value: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        derivs: Vec<ScalarFn>,
    ) -> Self {
        RadialFunction {
            label: label.into(),
            support,
            repr: Repr::Sampled {
                value: Arc::new(value),
                derivs,
            },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Region {
        self.support
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Order up to which derivatives are exact.
    pub fn analytic_depth(&self) -> usize {
        match &self.repr {
            Repr::Analytic { depth, .. } => *depth,
            Repr::Sampled { derivs, .. } => derivs.len(),
        }
    }

    pub fn is_analytic(&self, order: usize) -> bool {
        self.analytic_depth() >= order
    }

    pub fn value(&self, r: f64) -> Complex64 {
        match &self.repr {
            Repr::Analytic { jet, .. } => jet(r, 0).value(),
            Repr::Sampled { value, .. } => value(r),
        }
    }

    fn exact_derivative(&self, r: f64, k: usize) -> Option<Complex64> {
        match &self.repr {
            Repr::Analytic { jet, depth } if k <= *depth => Some(jet(r, k).derivative(k)),
            Repr::Sampled { value, .. } if k == 0 => Some(value(r)),
            Repr::Sampled { derivs, .. } if k <= derivs.len() => Some(derivs[k - 1](r)),
            _ => None,
        }
    }

    /// `f^{(k)}(r)`, exact when available, else central differences of the
    /// highest exact derivative with one Richardson level.
    pub fn derivative(&self, r: f64, k: usize) -> Result<Complex64> {
        if let Some(v) = self.exact_derivative(r, k) {
            return Ok(v);
        }
        let base = self.analytic_depth().min(k - 1);
        let steps = k - base;
        let g = |x: f64| self.exact_derivative(x, base).expect("base order is exact");
        let h = 1e-6f64.max(1e-4 * r.abs());
        let d1 = central(&g, r, h, steps);
        let d2 = central(&g, r, h / 2.0, steps);
        let rich = d2 + (d2 - d1) / 3.0;
        let scale = rich.norm().max(d2.norm()).max(1e-300);
        let disagreement = (d2 - d1).norm() / 3.0;
        let floor = 1e-8 * g(r).norm().max(1.0);
        if disagreement > FD_REL_BOUND * scale && disagreement > floor {
            return Err(Error::Smoothness(format!(
                "finite-difference estimate of order {k} for `{}` at r = {r} is unstable \
                 (relative disagreement {:.3e})",
                self.label,
                disagreement / scale
            )));
        }
        Ok(rich)
    }

    /// Jet of order `order` at `r`.
    pub fn jet(&self, r: f64, order: usize) -> Result<Jet> {
        let order = order.min(MAX_ORDER);
        if let Repr::Analytic { jet, depth } = &self.repr {
            if order <= *depth {
                return Ok(jet(r, order));
            }
        }
        let mut d = Vec::with_capacity(order + 1);
        for k in 0..=order {
            d.push(self.derivative(r, k)?);
        }
        Ok(Jet::from_derivatives(&d))
    }

    /// False when any of 64 probe points inside the support has a
    /// non-zero imaginary part.
    pub fn is_real_valued(&self) -> bool {
        let (lo, hi) = self.support.bounds();
        let hi = if hi.is_finite() { hi } else { lo.max(1.0) * 10.0 };
        (1..64).all(|i| {
            let r = lo + (hi - lo) * i as f64 / 64.0;
            self.value(r).im == 0.0
        })
    }

    /// Maximum of `|f|` over sample points outside the support.
    pub fn exterior_residual(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .filter(|r| !self.support.contains(**r))
            .map(|r| self.value(*r).norm())
            .fold(0.0, f64::max)
    }

    /// Richardson slope `log2(e(h)/e(h/2))` of the central difference of
    /// `f` against `f′` at `r`; `None` when the error is already at rounding
    /// level.
    pub fn richardson_slope(&self, r: f64, h: f64) -> Option<f64> {
        let d = self.exact_derivative(r, 1)?;
        let v = |x: f64| self.value(x);
        let e1 = (central(&v, r, h, 1) - d).norm();
        let e2 = (central(&v, r, h / 2.0, 1) - d).norm();
        let noise = 1e3 * f64::EPSILON * self.value(r).norm().max(d.norm() * h).max(1e-300) / h;
        if e2 <= noise {
            return None;
        }
        Some((e1 / e2).log2())
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        let inner = self.clone();
        let label = format!("{}*({},{})", self.label, lambda.re, lambda.im);
        match &self.repr {
            Repr::Analytic { depth, .. } => {
                let d = *depth;
                Self::from_jet(label, self.support, d, move |r, o| {
                    inner.jet(r, o).expect("analytic within depth") * lambda
                })
            }
            Repr::Sampled { derivs, .. } => {
                let ds = derivs
                    .iter()
                    .map(|g| {
                        let g = g.clone();
                        Arc::new(move |r| g(r) * lambda) as ScalarFn
                    })
                    .collect();
                Self::from_closures(label, self.support, move |r| inner.value(r) * lambda, ds)
            }
        }
    }
}

fn central(g: &impl Fn(f64) -> Complex64, r: f64, h: f64, k: usize) -> Complex64 {
    match k {
        0 => g(r),
        1 => (g(r + h) - g(r - h)) / (2.0 * h),
        2 => (g(r + h) - g(r) * 2.0 + g(r - h)) / (h * h),
        3 => (g(r + 2.0 * h) - g(r + h) * 2.0 + g(r - h) * 2.0 - g(r - 2.0 * h)) / (2.0 * h * h * h),
        _ => {
            (g(r + 2.0 * h) - g(r + h) * 4.0 + g(r) * 6.0 - g(r - h) * 4.0 + g(r - 2.0 * h))
                / (h * h * h * h)
        }
    }
}

fn apply_laplacian(f: Jet, m: Jet) -> Jet {
    let d = f.differentiate();
    d.differentiate() + m * d
}

/// Jet of the order-`k` operator: `∂ Δ^{α−1} f` for odd `k = 2α − 1`,
/// `Δ^α f` for even `k = 2α`.
fn operator_jet(model: &ManifoldModel, r: f64, f: Jet, k: usize) -> Jet {
    let out_order = f.order() - k;
    let mut g = f;
    let laps = k / 2;
    for i in 0..laps {
        let m = model.laplacian_coefficient(r, out_order + k - 2 * (i + 1) + if k % 2 == 1 { 1 } else { 0 });
        g = apply_laplacian(g, m);
    }
    if k % 2 == 1 {
        g = g.differentiate();
    }
    g
}

/// `f″(r) + ((N−1)/r + J′/J) f′(r)`.
pub fn radial_laplacian(model: &ManifoldModel, f: &RadialFunction, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            what: "radial Laplacian",
            requirement: "r > 0",
            value: r,
        });
    }
    let (lo, hi) = f.support().bounds();
    if !(r > lo && r < hi) {
        return Ok(c(0.0));
    }
    let m = (model.dim() - 1) as f64 / r + model.log_density_derivative(r)?;
    Ok(f.derivative(r, 2)? + f.derivative(r, 1)? * m)
}

/// The order-`k` radial operator applied to `f`, as a new function.
pub fn iterate_operator(model: &ManifoldModel, f: &RadialFunction, k: usize) -> Result<RadialFunction> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "operator order must be in 1..={MAX_ORDER}, got {k}"
        )));
    }
    let label = format!("op{k}[{}]", f.label());
    let model = model.clone();
    let src = f.clone();
    if f.is_analytic(k) {
        let depth = f.analytic_depth() - k;
        return Ok(RadialFunction::from_jet(label, f.support(), depth, move |r, order| {
            let order = order.min(depth);
            let fj = src.jet(r, order + k).expect("analytic within depth");
            operator_jet(&model, r, fj, k)
        }));
    }
    // probe the finite-difference path before handing out the closure
    let (lo, hi) = f.support().bounds();
    let hi = if hi.is_finite() { hi } else { lo.max(1.0) * 10.0 };
    for i in 1..16 {
        let r = lo + (hi - lo) * i as f64 / 16.0;
        if r > 0.0 {
            f.jet(r, k)?;
        }
    }
    Ok(RadialFunction::from_closures(
        label,
        f.support(),
        move |r| match src.jet(r, k) {
            Ok(fj) => operator_jet(&model, r, fj, k).value(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        },
        Vec::new(),
    ))
}

/// Which side of the transition carries the plateau `χ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plateau {
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
    pub plateau: Plateau,
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64, plateau: Plateau) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff needs 0 <= inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(CutoffSpec { inner, outer, plateau })
    }

    /// Jet of χ at `r`.
    pub fn jet(&self, r: f64, order: usize) -> Jet {
        let w = self.outer - self.inner;
        let s = (Jet::variable(r, order) - self.inner) * (1.0 / w);
        match self.plateau {
            Plateau::Above => step_jet(s),
            Plateau::Below => step_jet(1.0 - s),
        }
    }
}

/// `S(s) = e^{−1/s}/(e^{−1/s} + e^{−1/(1−s)})`, exactly 0 for `s ≤ 0` and 1
/// for `s ≥ 1`.
pub fn step_jet(s: Jet) -> Jet {
    let order = s.order();
    let x = s.value().re;
    if x <= 0.0 {
        return Jet::zero(order);
    }
    if x >= 1.0 {
        return Jet::constant(1.0, order);
    }
    // S = 1/(1 + e^g) with g = 1/s − 1/(1−s)
    let g = s.recip() - (1.0 - s).recip();
    let gv = g.value().re;
    if gv > 200.0 {
        return Jet::zero(order);
    }
    if gv < -200.0 {
        return Jet::constant(1.0, order);
    }
    if gv > 0.0 {
        // e^{−g}/(1 + e^{−g}) keeps the jet coefficients bounded
        let e = (g * -1.0).exp();
        return e * (e + 1.0).recip();
    }
    (g.exp() + 1.0).recip()
}

pub fn smooth_cutoff(spec: CutoffSpec) -> RadialFunction {
    let support = match spec.plateau {
        Plateau::Below => Region::Ball { radius: spec.outer },
        Plateau::Above => Region::Exterior {
            radius: spec.inner.max(f64::MIN_POSITIVE),
        },
    };
    RadialFunction::from_jet(
        format!("cutoff[{},{}]", spec.inner, spec.outer),
        support,
        MAX_ORDER,
        move |r, o| spec.jet(r, o),
    )
}

/// `f_δ(r) = (ln(R/r))^{(γ−1−pδ)/p} χ(r)` with χ = 1 on `[0, R/2]` and
/// χ = 0 beyond `3R/4`.
pub fn extremal_log_family(gamma: f64, p: f64, delta: f64, big_r: f64) -> Result<RadialFunction> {
    if !(gamma > 1.0) || !(p > 1.0f64.max(gamma - 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "log family needs 1 < gamma and max(1, gamma - 1) < p, got gamma = {gamma}, p = {p}"
        )));
    }
    if !(delta >= 0.0) || !(big_r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "log family needs delta >= 0 and R > 0, got delta = {delta}, R = {big_r}"
        )));
    }
    let kappa = (gamma - 1.0 - p * delta) / p;
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "log family exponent (gamma - 1 - p delta)/p must be positive, got {kappa}"
        )));
    }
    let chi = CutoffSpec::new(0.5 * big_r, 0.75 * big_r, Plateau::Below)?;
    Ok(RadialFunction::from_jet(
        format!("log-family[g={gamma},p={p},d={delta},R={big_r}]"),
        Region::Ball { radius: big_r },
        MAX_ORDER,
        move |r, o| {
            if r >= chi.outer || r <= 0.0 {
                return Jet::zero(o);
            }
            let l = (Jet::variable(r, o).ln() - big_r.ln()) * -1.0;
            l.powf(kappa) * chi.jet(r, o)
        },
    ))
}

/// `f_t(r) = χ(r) (1 − r^c)^t` with χ = 1 on `[1 − δ, 1]` and χ = 0 below
/// `1 − 2δ`.
pub fn extremal_boundary_family(t: f64, c_exp: f64, delta: f64) -> Result<RadialFunction> {
    if !(c_exp > 0.0) {
        return Err(Error::InvalidArgument(format!("boundary family needs c > 0, got {c_exp}")));
    }
    if !(delta > 0.0 && 2.0 * delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "boundary family needs 2 delta in (0, 1), got delta = {delta}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("boundary family needs t > 0, got {t}")));
    }
    let chi = CutoffSpec::new(1.0 - 2.0 * delta, 1.0 - delta, Plateau::Above)?;
    Ok(RadialFunction::from_jet(
        format!("boundary-family[t={t},c={c_exp},d={delta}]"),
        Region::Annulus {
            inner: 1.0 - 2.0 * delta,
            outer: 1.0,
        },
        MAX_ORDER,
        move |r, o| {
            if r <= chi.inner || r >= 1.0 {
                return Jet::zero(o);
            }
            let x = Jet::variable(r, o);
            let base = 1.0 - (x.ln() * c_exp).exp();
            base.powf(t) * chi.jet(r, o)
        },
    ))
}

/// The constant value of the radial rescaling `f_R`, i.e. `f(R)`.
pub fn scaling_trace(f: &RadialFunction, big_r: f64) -> Complex64 {
    if !f.support().contains(big_r) {
        return c(0.0);
    }
    f.value(big_r)
}
