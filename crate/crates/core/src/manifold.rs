//! Rotationally symmetric Cartan–Hadamard models.

use crate::error::{Error, Result};
use crate::jet::Jet;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Closure returning `[ψ, ψ′, ψ″, ψ‴, ψ⁗]` at `r`.
pub type WarpFn = Arc<dyn Fn(f64) -> [f64; 5] + Send + Sync>;

/// A warping function ψ together with its first four derivatives.
#[derive(Clone)]
pub struct WarpedProfile {
    name: String,
    derivs: WarpFn,
}

impl fmt::Debug for WarpedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpedProfile").field("name", &self.name).finish()
    }
}

impl WarpedProfile {
    pub fn new(name: impl Into<String>, derivs: impl Fn(f64) -> [f64; 5] + Send + Sync + 'static) -> Self {
        WarpedProfile {
            name: name.into(),
            derivs: Arc::new(derivs),
        }
    }

    /// Profile from ψ, ψ′, ψ″ only; ψ‴ and ψ⁗ come from central differences of ψ″.
    pub fn from_second_order(
        name: impl Into<String>,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, move |r| {
            let h = 1e-4 * r.max(1e-2);
            let (lo, mid, hi) = (d2psi(r - h), d2psi(r), d2psi(r + h));
            [psi(r), dpsi(r), mid, (hi - lo) / (2.0 * h), (hi - 2.0 * mid + lo) / (h * h)]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> [f64; 5] {
        (self.derivs)(r)
    }

    /// ψ = sinh r, the hyperbolic space of curvature −1.
    pub fn sinh() -> Self {
        Self::new("sinh", |r| {
            let (s, c) = (r.sinh(), r.cosh());
            [s, c, s, c, s]
        })
    }

    /// ψ = r, flat space.
    pub fn flat() -> Self {
        Self::new("flat", |r| [r, 1.0, 0.0, 0.0, 0.0])
    }

    /// ψ = r + r³/6: curvature −r/(r + r³/6), vanishing at the pole and at infinity.
    pub fn cubic() -> Self {
        Self::new("cubic", |r| [r + r * r * r / 6.0, 1.0 + r * r / 2.0, r, 1.0, 0.0])
    }

    pub fn registered(name: &str) -> Option<Self> {
        match name {
            "sinh" => Some(Self::sinh()),
            "flat" => Some(Self::flat()),
            "cubic" => Some(Self::cubic()),
            _ => None,
        }
    }

    pub fn registry() -> &'static [&'static str] {
        &["sinh", "flat", "cubic"]
    }
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Euclidean,
    Hyperbolic { b: f64 },
    Warped(WarpedProfile),
}

#[derive(Clone, Debug)]
pub struct ManifoldModel {
    name: String,
    dim: usize,
    kind: ModelKind,
}

/// Radial regions around the pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { radius: f64 },
    Exterior { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl Region {
    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Region::Ball { radius })
    }

    pub fn exterior(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "exterior radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Region::Exterior { radius })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer) {
            return Err(Error::InvalidArgument(format!(
                "annulus needs 0 <= inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(Region::Annulus { inner, outer })
    }

    /// The whole manifold.
    pub fn whole() -> Self {
        Region::Annulus {
            inner: 0.0,
            outer: f64::INFINITY,
        }
    }

    /// Radial interval `[lo, hi]` covered by the region.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Region::Ball { radius } => (0.0, radius),
            Region::Exterior { radius } => (radius, f64::INFINITY),
            Region::Annulus { inner, outer } => (inner, outer),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.bounds();
        r >= lo && r <= hi
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        a >= c && b <= d
    }

    pub fn intersect(&self, other: &Region) -> Option<(f64, f64)> {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        let (lo, hi) = (a.max(c), b.min(d));
        (lo < hi).then_some((lo, hi))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Ball { radius } => write!(f, "ball({radius})"),
            Region::Exterior { radius } => write!(f, "exterior({radius})"),
            Region::Annulus { inner, outer } => write!(f, "annulus({inner}, {outer})"),
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "radius",
            requirement: "r > 0",
            value: r,
        })
    }
}

/// sinh(x)/x with a series near zero.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// The comparison function `C^b(t)`: `1/t` for `b = 0`, else `√b coth(√b t)`.
pub fn comparison_c(b: f64, t: f64) -> Result<f64> {
    check_r(t)?;
    if b < 0.0 {
        return Err(Error::Domain {
            what: "comparison_C",
            requirement: "b >= 0",
            value: b,
        });
    }
    if b == 0.0 {
        return Ok(1.0 / t);
    }
    Ok((comparison_d(b, t)? + 1.0) / t)
}

/// `D^b(t) = t C^b(t) − 1`, with `D^b(0) = 0`.
pub fn comparison_d(b: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || b < 0.0 {
        return Err(Error::Domain {
            what: "comparison_D",
            requirement: "t >= 0 and b >= 0",
            value: if b < 0.0 { b } else { t },
        });
    }
    if t == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    let x = b.sqrt() * t;
    if x < 1e-2 {
        let x2 = x * x;
        Ok(x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0)
    } else {
        Ok(x / x.tanh() - 1.0)
    }
}

fn gamma_half(n: usize) -> f64 {
    // Γ(n/2) by the recurrence from Γ(1) = 1 and Γ(1/2) = √π.
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit sphere `S^{N−1}`.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain {
            what: "dimension",
            requirement: "N >= 2",
            value: n as f64,
        });
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n))
}

impl ManifoldModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(format!("euclidean:{dim}"), dim, ModelKind::Euclidean)
    }

    pub fn hyperbolic(dim: usize, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain {
                what: "hyperbolic curvature magnitude",
                requirement: "b > 0",
                value: b,
            });
        }
        Self::new(format!("hyperbolic:{dim}:{b}"), dim, ModelKind::Hyperbolic { b })
    }

    /// A warped model; ψ is validated on a log-spaced grid over `(0, r_max]`.
    pub fn warped(dim: usize, profile: WarpedProfile) -> Result<Self> {
        let model = Self::new(
            format!("warped:{}:{dim}", profile.name()),
            dim,
            ModelKind::Warped(profile.clone()),
        )?;
        model.validate_warping(1e-3, 20.0, 512)?;
        Ok(model)
    }

    fn new(name: String, dim: usize, kind: ModelKind) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain {
                what: "dimension",
                requirement: "N >= 2",
                value: dim as f64,
            });
        }
        Ok(ManifoldModel { name, dim, kind })
    }

    /// Parse `euclidean:N`, `hyperbolic:N:b` or `warped:<name>:N`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let dim = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::UnknownModel(format!("{spec} (bad dimension `{s}`)")))
        };
        match parts.as_slice() {
            ["euclidean", n] => Self::euclidean(dim(n)?),
            ["hyperbolic", n, b] => {
                let b: f64 = b
                    .parse()
                    .map_err(|_| Error::UnknownModel(format!("{spec} (bad curvature `{b}`)")))?;
                Self::hyperbolic(dim(n)?, b)
            }
            ["warped", name, n] => {
                let profile =
                    WarpedProfile::registered(name).ok_or_else(|| Error::UnknownModel(spec.to_string()))?;
                Self::warped(dim(n)?, profile)
            }
            _ => Err(Error::UnknownModel(spec.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    fn warp(&self, r: f64) -> [f64; 5] {
        match &self.kind {
            ModelKind::Euclidean => [r, 1.0, 0.0, 0.0, 0.0],
            ModelKind::Hyperbolic { b } => {
                let s = b.sqrt();
                let (sh, ch) = ((s * r).sinh(), (s * r).cosh());
                [sh / s, ch, s * sh, b * ch, b * s * sh]
            }
            ModelKind::Warped(p) => p.eval(r),
        }
    }

    /// Density `J(r)` relative to Euclidean polar coordinates.
    pub fn density(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let m = (self.dim - 1) as i32;
        Ok(match &self.kind {
            ModelKind::Euclidean => 1.0,
            ModelKind::Hyperbolic { b } => sinhc(b.sqrt() * r).powi(m),
            ModelKind::Warped(p) => (p.eval(r)[0] / r.max(1e-300)).powi(m),
        })
    }

    /// `J′(r)/J(r)`.
    pub fn log_density_derivative(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        let m = (self.dim - 1) as f64;
        Ok(match &self.kind {
            ModelKind::Euclidean => 0.0,
            ModelKind::Hyperbolic { b } => m / r * comparison_d(*b, r)?,
            ModelKind::Warped(p) => {
                let w = p.eval(r);
                m * (w[1] / w[0] - 1.0 / r.max(1e-300))
            }
        })
    }

    /// Polar volume factor `r^{N−1} J(r) = ψ(r)^{N−1}`.
    pub fn jacobian(&self, r: f64) -> f64 {
        self.warp(r)[0].powi(self.dim as i32 - 1)
    }

    /// Mean-curvature coefficient `m(r) = (N−1)/r + J′/J = (N−1) ψ′/ψ` as a jet,
    /// so that the radial Laplacian is `f″ + m f′`.
    pub fn laplacian_coefficient(&self, r: f64, order: usize) -> Jet {
        let m = (self.dim - 1) as f64;
        match &self.kind {
            ModelKind::Euclidean => Jet::variable(r, order).recip() * m,
            ModelKind::Hyperbolic { b } => {
                let s = b.sqrt();
                let x = Jet::variable(r, order) * s;
                x.cosh() / x.sinh() * (m * s)
            }
            ModelKind::Warped(p) => {
                let w = p.eval(r);
                let d: Vec<_> = w.iter().map(|&v| v.into()).collect();
                let psi = Jet::from_derivatives(&d[..(order + 2).min(5)]);
                psi.differentiate() / psi.truncate(order) * m
            }
        }
    }

    /// True when the density is identically one.
    pub fn has_constant_density(&self) -> bool {
        match &self.kind {
            ModelKind::Euclidean => true,
            ModelKind::Hyperbolic { .. } => false,
            ModelKind::Warped(_) => log_grid(1e-3, 20.0, 256)
                .into_iter()
                .all(|r| self.log_density_derivative(r).map(|v| v.abs() < 1e-12).unwrap_or(false)),
        }
    }

    /// Largest `b ≥ 0` with `ψ″/ψ ≥ b` on `[r_lo, r_hi]` (sampled).
    pub fn curvature_bound(&self, r_lo: f64, r_hi: f64) -> f64 {
        match &self.kind {
            ModelKind::Euclidean => 0.0,
            ModelKind::Hyperbolic { b } => *b,
            ModelKind::Warped(p) => log_grid(r_lo.max(1e-6), r_hi, 512)
                .into_iter()
                .map(|r| {
                    let w = p.eval(r);
                    w[2] / w[0]
                })
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
        }
    }

    fn validate_warping(&self, r_lo: f64, r_hi: f64, n: usize) -> Result<()> {
        let ModelKind::Warped(p) = &self.kind else {
            return Ok(());
        };
        let r0 = 1e-7;
        let w0 = p.eval(r0);
        if ((w0[0] / r0) - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "warping `{}` must satisfy psi(r)/r -> 1 at the pole",
                p.name()
            )));
        }
        let mut prev = 0.0;
        for r in log_grid(r_lo, r_hi, n) {
            let w = p.eval(r);
            if !(w[0] > 0.0) || w[2] < -1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "warping `{}` violates psi > 0, psi'' >= 0 at r = {r}",
                    p.name()
                )));
            }
            let j = self.density(r)?;
            if j < 1.0 - 1e-12 || j < prev * (1.0 - 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "density of `{}` is not >= 1 and non-decreasing at r = {r}",
                    p.name()
                )));
            }
            prev = j;
        }
        Ok(())
    }
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_examples() {
        let e = ManifoldModel::euclidean(3).unwrap();
        assert_eq!(e.density(0.37).unwrap(), 1.0);
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        assert_relative_eq!(h.density(1e-9).unwrap(), 1.0, max_relative = 1e-15);
        let s1 = 1.0f64.sinh();
        assert_relative_eq!(h.density(1.0).unwrap(), s1 * s1, max_relative = 1e-14);
        assert!((h.density(1.0).unwrap() - 1.38109).abs() < 1e-5);
        assert!(e.density(0.0).is_err());
        assert!(e.density(-1.0).is_err());
    }

    #[test]
    fn log_density_examples() {
        let e = ManifoldModel::euclidean(4).unwrap();
        assert_eq!(e.log_density_derivative(0.5).unwrap(), 0.0);
        let h = ManifoldModel::hyperbolic(2, 1.0).unwrap();
        let v = h.log_density_derivative(1.0).unwrap();
        assert_relative_eq!(v, 1.0 / 1.0f64.tanh() - 1.0, max_relative = 1e-14);
        // central difference of log J as an independent check
        let hstep = 1e-5;
        let fd = (h.density(1.0 + hstep).unwrap().ln() - h.density(1.0 - hstep).unwrap().ln()) / (2.0 * hstep);
        assert_relative_eq!(v, fd, max_relative = 1e-8);
        assert!((v - 0.31304).abs() < 1e-5);
        let flat = ManifoldModel::warped(3, WarpedProfile::flat()).unwrap();
        assert_eq!(flat.log_density_derivative(0.8).unwrap(), 0.0);
        assert!(flat.has_constant_density());
        assert!(!h.has_constant_density());
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(comparison_c(0.0, 2.0).unwrap(), 0.5);
        assert_relative_eq!(comparison_c(1.0, 1.0).unwrap(), 1.0 / 1.0f64.tanh(), max_relative = 1e-14);
        assert_relative_eq!(comparison_c(4.0, 50.0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(comparison_c(1.0, 0.0).is_err());
        assert_eq!(comparison_d(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(comparison_d(0.0, 5.0).unwrap(), 0.0);
        assert!((comparison_d(1.0, 1.0).unwrap() - 0.31304).abs() < 1e-5);
        // series branch agrees with the direct formula across the switch
        let x: f64 = 0.0099;
        assert_relative_eq!(comparison_d(1.0, x).unwrap(), x / x.tanh() - 1.0, max_relative = 1e-9);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(5).unwrap(), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
        assert!(sphere_area(1).is_err());
    }

    #[test]
    fn parse_models() {
        assert_eq!(ManifoldModel::parse("euclidean:5").unwrap().dim(), 5);
        let h = ManifoldModel::parse("hyperbolic:3:1").unwrap();
        assert!(matches!(h.kind(), ModelKind::Hyperbolic { b } if *b == 1.0));
        assert_eq!(ManifoldModel::parse("warped:sinh:4").unwrap().name(), "warped:sinh:4");
        assert!(ManifoldModel::parse("warped:nope:4").is_err());
        assert!(ManifoldModel::parse("euclidean:1").is_err());
        assert!(ManifoldModel::parse("sphere:3").is_err());
        assert!(ManifoldModel::parse("hyperbolic:3:-1").is_err());
    }

    #[test]
    fn warped_sinh_matches_hyperbolic() {
        let w = ManifoldModel::warped(4, WarpedProfile::sinh()).unwrap();
        let h = ManifoldModel::hyperbolic(4, 1.0).unwrap();
        for r in log_grid(1e-2, 10.0, 200) {
            assert_relative_eq!(w.density(r).unwrap(), h.density(r).unwrap(), max_relative = 1e-12);
            assert_relative_eq!(
                w.log_density_derivative(r).unwrap(),
                h.log_density_derivative(r).unwrap(),
                max_relative = 1e-10
            );
            assert_relative_eq!(w.jacobian(r), h.jacobian(r), max_relative = 1e-12);
        }
    }

    #[test]
    fn invalid_warping_rejected() {
        let bad = WarpedProfile::new("shrinking", |r: f64| {
            let (s, c) = (r.sin(), r.cos());
            [s, c, -s, -c, s]
        });
        assert!(ManifoldModel::warped(3, bad).is_err());
        let offset = WarpedProfile::new("offset", |r| [r + 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(ManifoldModel::warped(3, offset).is_err());
    }

    #[test]
    fn laplacian_coefficient_matches_log_density() {
        for model in [
            ManifoldModel::euclidean(3).unwrap(),
            ManifoldModel::hyperbolic(3, 2.0).unwrap(),
            ManifoldModel::warped(5, WarpedProfile::cubic()).unwrap(),
        ] {
            for r in [0.05, 0.3, 1.0, 2.5] {
                let m = model.laplacian_coefficient(r, 2);
                let expect = (model.dim() - 1) as f64 / r + model.log_density_derivative(r).unwrap();
                assert_relative_eq!(m.value().re, expect, max_relative = 1e-12);
                let h = 1e-5;
                let fd = (model.laplacian_coefficient(r + h, 0).value().re
                    - model.laplacian_coefficient(r - h, 0).value().re)
                    / (2.0 * h);
                assert_relative_eq!(m.derivative(1).re, fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn curvature_bounds() {
        assert_eq!(ManifoldModel::hyperbolic(3, 2.0).unwrap().curvature_bound(0.1, 5.0), 2.0);
        let c = ManifoldModel::warped(3, WarpedProfile::cubic()).unwrap();
        let b = c.curvature_bound(1.0, 5.0);
        assert_relative_eq!(b, 5.0 / (5.0 + 125.0 / 6.0), max_relative = 1e-9);
    }
}
