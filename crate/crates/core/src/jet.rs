//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients `c_0..=c_order` of a complex
//! function of one real variable around a point. Arithmetic on jets
//! propagates exact derivatives, which is how radial test functions supply
//! derivatives up to fourth order without finite differences.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 4;
const LEN: usize = MAX_ORDER + 1;
const FACT: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [Complex64; LEN],
    order: usize,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Jet {
    pub fn constant(v: impl Into<Complex64>, order: usize) -> Self {
        let mut c = [zero(); LEN];
        c[0] = v.into();
        Jet {
            c,
            order: order.min(MAX_ORDER),
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The independent variable `x` expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if j.order >= 1 {
            j.c[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Build from derivative values `d[k] = f^{(k)}(x0)`.
    pub fn from_derivatives(d: &[Complex64]) -> Self {
        assert!(!d.is_empty() && d.len() <= LEN, "jet needs 1..=5 derivatives");
        let mut c = [zero(); LEN];
        for (k, v) in d.iter().enumerate() {
            c[k] = *v / FACT[k];
        }
        Jet {
            c,
            order: d.len() - 1,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        if k <= self.order {
            self.c[k]
        } else {
            zero()
        }
    }

    /// `f^{(k)}(x0)`; zero beyond the carried order.
    pub fn derivative(&self, k: usize) -> Complex64 {
        if k <= self.order {
            self.c[k] * FACT[k]
        } else {
            zero()
        }
    }

    pub fn truncate(mut self, order: usize) -> Self {
        let order = order.min(self.order);
        for k in order + 1..LEN {
            self.c[k] = zero();
        }
        self.order = order;
        self
    }

    /// Jet of the derivative; loses one order. An order-0 jet has no
    /// derivative information and yields NaN.
    pub fn differentiate(&self) -> Self {
        if self.order == 0 {
            return Self::constant(Complex64::new(f64::NAN, f64::NAN), 0);
        }
        let mut c = [zero(); LEN];
        for k in 0..self.order {
            c[k] = self.c[k + 1] * (k + 1) as f64;
        }
        Jet {
            c,
            order: self.order - 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c[..=self.order]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(mut self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        for k in 0..=self.order {
            self.c[k] *= s;
        }
        self
    }

    pub fn conj(mut self) -> Self {
        for k in 0..=self.order {
            self.c[k] = self.c[k].conj();
        }
        self
    }

    /// Compose with a scalar function `g`, given `g^{(k)}(u0)` for
    /// `k = 0..=order` where `u0` is this jet's value.
    pub fn compose(&self, g: &[Complex64]) -> Self {
        let n = self.order;
        debug_assert!(g.len() > n);
        let mut h = *self;
        h.c[0] = zero();
        let mut out = Self::constant(g[0], n);
        let mut hp = Self::constant(1.0, n);
        for (k, gk) in g.iter().enumerate().take(n + 1).skip(1) {
            hp = hp * h;
            let w = *gk / FACT[k];
            for i in k..=n {
                out.c[i] += w * hp.c[i];
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose(&[e; LEN])
    }

    pub fn ln(&self) -> Self {
        let u = self.c[0];
        let inv = u.inv();
        let mut g = [zero(); LEN];
        g[0] = u.ln();
        let mut p = inv;
        for (k, gk) in g.iter_mut().enumerate().skip(1) {
            // d^k ln u = (-1)^{k-1} (k-1)! u^{-k}
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *gk = p * (sign * FACT[k - 1]);
            p *= inv;
        }
        self.compose(&g)
    }

    pub fn recip(&self) -> Self {
        let u = self.c[0];
        let inv = u.inv();
        let mut g = [zero(); LEN];
        let mut p = inv;
        for (k, gk) in g.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *gk = p * (sign * FACT[k]);
            p *= inv;
        }
        self.compose(&g)
    }

    /// `u^a` for real `a`, principal branch.
    pub fn powf(&self, a: f64) -> Self {
        let u = self.c[0];
        let mut g = [zero(); LEN];
        let mut coef = 1.0;
        for (k, gk) in g.iter_mut().enumerate().take(self.order + 1) {
            *gk = if coef == 0.0 {
                zero()
            } else {
                u.powf(a - k as f64) * coef
            };
            coef *= a - k as f64;
        }
        self.compose(&g)
    }

    /// Integer power by repeated multiplication (exact at zero).
    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(1.0, self.order);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[s, c, s, c, s])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[c, s, c, s, c])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut c = [zero(); LEN];
        for (k, ck) in c.iter_mut().enumerate().take(order + 1) {
            *ck = self.c[k] + o.c[k];
        }
        Jet { c, order }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut c = [zero(); LEN];
        for i in 0..=order {
            for j in 0..=order - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c, order }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, s: f64) -> Jet {
        self.c[0] += s;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, s: f64) -> Jet {
        self.c[0] -= s;
        self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        (-j) + self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, s: Complex64) -> Jet {
        self.scale(s)
    }
}
