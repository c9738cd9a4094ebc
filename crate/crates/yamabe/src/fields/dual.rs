//! Forward-mode second-order dual numbers.
//!
//! [`Dual1`] carries (value, d/dξ, d²/dξ²) for one-variable profiles and
//! [`Dual2`] carries a full second-order jet in n variables (value, gradient,
//! packed upper-triangular Hessian), so Hessians come out exact to machine
//! precision — finite differences cannot reach the residual floors the
//! verification layer asserts.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// One-variable second-order dual number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual1 {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Dual1 {
    pub fn var(x: f64) -> Self {
        Self {
            v: x,
            d: 1.0,
            dd: 0.0,
        }
    }

    pub fn con(c: f64) -> Self {
        Self {
            v: c,
            d: 0.0,
            dd: 0.0,
        }
    }

    /// Chain rule through a scalar function with known first two derivatives
    /// at the primal value.
    fn lift(self, f: f64, df: f64, ddf: f64) -> Self {
        Self {
            v: f,
            d: df * self.d,
            dd: ddf * self.d * self.d + df * self.dd,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.lift(e, e, e)
    }

    pub fn ln(self) -> Self {
        self.lift(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.lift(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(self) -> Self {
        self.lift(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(self) -> Self {
        self.lift(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn powi(self, k: i32) -> Self {
        let kf = k as f64;
        self.lift(
            self.v.powi(k),
            kf * self.v.powi(k - 1),
            kf * (kf - 1.0) * self.v.powi(k - 2),
        )
    }

    pub fn powf(self, p: f64) -> Self {
        self.lift(
            self.v.powf(p),
            p * self.v.powf(p - 1.0),
            p * (p - 1.0) * self.v.powf(p - 2.0),
        )
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.lift(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Add for Dual1 {
    type Output = Dual1;
    fn add(self, o: Dual1) -> Dual1 {
        Dual1 {
            v: self.v + o.v,
            d: self.d + o.d,
            dd: self.dd + o.dd,
        }
    }
}

impl Sub for Dual1 {
    type Output = Dual1;
    fn sub(self, o: Dual1) -> Dual1 {
        Dual1 {
            v: self.v - o.v,
            d: self.d - o.d,
            dd: self.dd - o.dd,
        }
    }
}

impl Mul for Dual1 {
    type Output = Dual1;
    fn mul(self, o: Dual1) -> Dual1 {
        Dual1 {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}

impl Div for Dual1 {
    type Output = Dual1;
    // a/b as a·b⁻¹ so the quotient rule rides on the product rule.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Dual1) -> Dual1 {
        self * o.recip()
    }
}

impl Neg for Dual1 {
    type Output = Dual1;
    fn neg(self) -> Dual1 {
        Dual1 {
            v: -self.v,
            d: -self.d,
            dd: -self.dd,
        }
    }
}

impl Add<f64> for Dual1 {
    type Output = Dual1;
    fn add(self, c: f64) -> Dual1 {
        Dual1 {
            v: self.v + c,
            ..self
        }
    }
}

impl Sub<f64> for Dual1 {
    type Output = Dual1;
    fn sub(self, c: f64) -> Dual1 {
        Dual1 {
            v: self.v - c,
            ..self
        }
    }
}

impl Mul<f64> for Dual1 {
    type Output = Dual1;
    fn mul(self, c: f64) -> Dual1 {
        Dual1 {
            v: self.v * c,
            d: self.d * c,
            dd: self.dd * c,
        }
    }
}

impl Div<f64> for Dual1 {
    type Output = Dual1;
    fn div(self, c: f64) -> Dual1 {
        self * (1.0 / c)
    }
}

impl Mul<Dual1> for f64 {
    type Output = Dual1;
    fn mul(self, d: Dual1) -> Dual1 {
        d * self
    }
}

impl Add<Dual1> for f64 {
    type Output = Dual1;
    fn add(self, d: Dual1) -> Dual1 {
        d + self
    }
}

impl Sub<Dual1> for f64 {
    type Output = Dual1;
    fn sub(self, d: Dual1) -> Dual1 {
        -d + self
    }
}

impl Div<Dual1> for f64 {
    type Output = Dual1;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, d: Dual1) -> Dual1 {
        d.recip() * self
    }
}

fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Index of (i, j), i ≤ j, in packed upper-triangular storage.
fn pidx(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * (2 * n - i + 1) / 2 + (j - i)
}

/// n-variable second-order dual number: value, gradient, and the
/// n(n+1)/2 independent second-order components.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    n: usize,
    pub v: f64,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl Dual2 {
    pub fn var(n: usize, axis: usize, x: f64) -> Self {
        let mut g = vec![0.0; n];
        g[axis] = 1.0;
        Self {
            n,
            v: x,
            g,
            h: vec![0.0; packed_len(n)],
        }
    }

    pub fn con(n: usize, c: f64) -> Self {
        Self {
            n,
            v: c,
            g: vec![0.0; n],
            h: vec![0.0; packed_len(n)],
        }
    }

    /// Seed one dual variable per coordinate of `x`.
    pub fn seed(x: &[f64]) -> Vec<Dual2> {
        let n = x.len();
        x.iter()
            .enumerate()
            .map(|(i, &xi)| Dual2::var(n, i, xi))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn gradient(&self) -> &[f64] {
        &self.g
    }

    pub fn hessian_entry(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.h[pidx(self.n, a, b)]
    }

    fn lift(&self, f: f64, df: f64, ddf: f64) -> Self {
        let n = self.n;
        let g: Vec<f64> = self.g.iter().map(|gi| df * gi).collect();
        let mut h = vec![0.0; packed_len(n)];
        for i in 0..n {
            for j in i..n {
                h[pidx(n, i, j)] = df * self.h[pidx(n, i, j)] + ddf * self.g[i] * self.g[j];
            }
        }
        Self { n, v: f, g, h }
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.lift(e, e, e)
    }

    pub fn ln(&self) -> Self {
        self.lift(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        self.lift(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(&self) -> Self {
        self.lift(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(&self) -> Self {
        self.lift(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn powi(&self, k: i32) -> Self {
        let kf = k as f64;
        self.lift(
            self.v.powi(k),
            kf * self.v.powi(k - 1),
            kf * (kf - 1.0) * self.v.powi(k - 2),
        )
    }

    pub fn powf(&self, p: f64) -> Self {
        self.lift(
            self.v.powf(p),
            p * self.v.powf(p - 1.0),
            p * (p - 1.0) * self.v.powf(p - 2.0),
        )
    }

    pub fn recip(&self) -> Self {
        let inv = 1.0 / self.v;
        self.lift(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            v: self.v * c,
            g: self.g.iter().map(|x| x * c).collect(),
            h: self.h.iter().map(|x| x * c).collect(),
        }
    }

    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v += c;
        out
    }
}

impl Add for &Dual2 {
    type Output = Dual2;
    fn add(self, o: &Dual2) -> Dual2 {
        debug_assert_eq!(self.n, o.n);
        Dual2 {
            n: self.n,
            v: self.v + o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Dual2 {
    type Output = Dual2;
    fn sub(self, o: &Dual2) -> Dual2 {
        debug_assert_eq!(self.n, o.n);
        Dual2 {
            n: self.n,
            v: self.v - o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a - b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Dual2 {
    type Output = Dual2;
    fn mul(self, o: &Dual2) -> Dual2 {
        debug_assert_eq!(self.n, o.n);
        let n = self.n;
        let g: Vec<f64> = (0..n).map(|i| self.g[i] * o.v + self.v * o.g[i]).collect();
        let mut h = vec![0.0; packed_len(n)];
        for i in 0..n {
            for j in i..n {
                let k = pidx(n, i, j);
                h[k] = self.h[k] * o.v + self.v * o.h[k] + self.g[i] * o.g[j] + self.g[j] * o.g[i];
            }
        }
        Dual2 {
            n,
            v: self.v * o.v,
            g,
            h,
        }
    }
}

impl Div for &Dual2 {
    type Output = Dual2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Dual2) -> Dual2 {
        self * &o.recip()
    }
}

impl Neg for &Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        self.scale(-1.0)
    }
}

macro_rules! dual2_owned_ops {
    ($($trait:ident :: $m:ident),*) => {$(
        impl $trait for Dual2 {
            type Output = Dual2;
            fn $m(self, o: Dual2) -> Dual2 {
                $trait::$m(&self, &o)
            }
        }
        impl $trait<&Dual2> for Dual2 {
            type Output = Dual2;
            fn $m(self, o: &Dual2) -> Dual2 {
                $trait::$m(&self, o)
            }
        }
        impl $trait<Dual2> for &Dual2 {
            type Output = Dual2;
            fn $m(self, o: Dual2) -> Dual2 {
                $trait::$m(self, &o)
            }
        }
    )*};
}
dual2_owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Dual2 {
    type Output = Dual2;
    fn add(self, c: f64) -> Dual2 {
        self.shift(c)
    }
}

impl Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(self, c: f64) -> Dual2 {
        self.shift(c)
    }
}

impl Mul<f64> for &Dual2 {
    type Output = Dual2;
    fn mul(self, c: f64) -> Dual2 {
        self.scale(c)
    }
}

impl Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(self, c: f64) -> Dual2 {
        self.scale(c)
    }
}

impl Mul<Dual2> for f64 {
    type Output = Dual2;
    fn mul(self, d: Dual2) -> Dual2 {
        d.scale(self)
    }
}

impl Mul<&Dual2> for f64 {
    type Output = Dual2;
    fn mul(self, d: &Dual2) -> Dual2 {
        d.scale(self)
    }
}

impl Add<Dual2> for f64 {
    type Output = Dual2;
    fn add(self, d: Dual2) -> Dual2 {
        d.shift(self)
    }
}

impl Sub<Dual2> for f64 {
    type Output = Dual2;
    fn sub(self, d: Dual2) -> Dual2 {
        d.scale(-1.0).shift(self)
    }
}

impl Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(self, c: f64) -> Dual2 {
        self.shift(-c)
    }
}

impl Div<f64> for Dual2 {
    type Output = Dual2;
    fn div(self, c: f64) -> Dual2 {
        self.scale(1.0 / c)
    }
}

impl Div<Dual2> for f64 {
    type Output = Dual2;
    fn div(self, d: Dual2) -> Dual2 {
        d.recip().scale(self)
    }
}
