//! Twice-differentiable scalar functions on ℝⁿ and on ℝ (profiles), with
//! three interchangeable backends: closed-form analytic jets, forward-mode
//! second-order dual numbers, and central finite differences.
//!
//! Fields are immutable after construction and evaluation is pure, so they
//! can be shared freely across worker threads. Domain guards return `false`
//! for boundary-adjacent queries instead of raising; callers filter grids.

mod dual;

pub use dual::{Dual1, Dual2};

use crate::mat::SquareMatrix;
use std::sync::Arc;

/// Value and first two derivatives of a one-variable profile at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet1 {
    pub fn constant(c: f64) -> Self {
        Self {
            value: c,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl From<Dual1> for Jet1 {
    fn from(d: Dual1) -> Self {
        Self {
            value: d.v,
            d1: d.d,
            d2: d.dd,
        }
    }
}

/// Value, gradient and Hessian of a scalar field at a point of ℝⁿ.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: SquareMatrix,
}

impl Jet2 {
    pub fn constant(n: usize, c: f64) -> Self {
        Self {
            value: c,
            grad: vec![0.0; n],
            hess: SquareMatrix::zeros(n),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|v| v.is_finite()) && self.hess.is_finite()
    }
}

type JetFn = Arc<dyn Fn(&[f64]) -> Jet2 + Send + Sync>;
type GuardFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A scalar field on ℝⁿ exposing value, gradient and Hessian at a point.
#[derive(Clone)]
pub struct ScalarField2Jet {
    dim: usize,
    jet: JetFn,
    guard: GuardFn,
}

impl std::fmt::Debug for ScalarField2Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField2Jet")
            .field("dim", &self.dim)
            .finish()
    }
}

impl ScalarField2Jet {
    /// Closed-form backend: the caller supplies the full jet.
    pub fn analytic(dim: usize, jet: impl Fn(&[f64]) -> Jet2 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            jet: Arc::new(jet),
            guard: Arc::new(|_| true),
        }
    }

    /// Dual-number backend: write the field once over [`Dual2`] and get
    /// machine-exact gradients and Hessians.
    pub fn from_dual(dim: usize, f: impl Fn(&[Dual2]) -> Dual2 + Send + Sync + 'static) -> Self {
        Self::analytic(dim, move |x: &[f64]| {
            let seeded = Dual2::seed(x);
            let out = f(&seeded);
            let n = x.len();
            Jet2 {
                value: out.value(),
                grad: out.gradient().to_vec(),
                hess: SquareMatrix::from_fn(n, |i, j| out.hessian_entry(i, j)),
            }
        })
    }

    /// Central finite differences at relative step `step`·(|xᵢ|+1),
    /// O(step²) accurate for smooth functions.
    pub fn finite_difference(
        dim: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        step: f64,
    ) -> Self {
        assert!(step > 0.0, "finite difference step must be positive");
        Self::analytic(dim, move |x: &[f64]| {
            let n = x.len();
            let h: Vec<f64> = x.iter().map(|xi| step * (xi.abs() + 1.0)).collect();
            let fx = f(x);
            let mut grad = vec![0.0; n];
            let mut hess = SquareMatrix::zeros(n);
            let mut xp = x.to_vec();
            for i in 0..n {
                xp[i] = x[i] + h[i];
                let fp = f(&xp);
                xp[i] = x[i] - h[i];
                let fm = f(&xp);
                xp[i] = x[i];
                grad[i] = (fp - fm) / (2.0 * h[i]);
                hess[(i, i)] = (fp - 2.0 * fx + fm) / (h[i] * h[i]);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    xp[i] = x[i] + h[i];
                    xp[j] = x[j] + h[j];
                    let fpp = f(&xp);
                    xp[j] = x[j] - h[j];
                    let fpm = f(&xp);
                    xp[i] = x[i] - h[i];
                    let fmm = f(&xp);
                    xp[j] = x[j] + h[j];
                    let fmp = f(&xp);
                    xp[i] = x[i];
                    xp[j] = x[j];
                    let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
                    hess[(i, j)] = v;
                    hess[(j, i)] = v;
                }
            }
            Jet2 {
                value: fx,
                grad,
                hess,
            }
        })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::analytic(dim, move |x| Jet2::constant(x.len(), c))
    }

    /// The coordinate function x ↦ x_axis.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        assert!(axis < dim);
        Self::analytic(dim, move |x| {
            let n = x.len();
            let mut grad = vec![0.0; n];
            grad[axis] = 1.0;
            Jet2 {
                value: x[axis],
                grad,
                hess: SquareMatrix::zeros(n),
            }
        })
    }

    /// Restrict the field with an additional domain predicate
    /// (AND-composed with any existing guard).
    pub fn with_domain_guard(self, g: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        let old = self.guard;
        Self {
            dim: self.dim,
            jet: self.jet,
            guard: Arc::new(move |x| old(x) && g(x)),
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.dim
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim && (self.guard)(x)
    }

    /// Evaluate the jet. Outside the guard the result is unspecified
    /// (possibly non-finite); callers filter with [`Self::in_domain`].
    pub fn eval(&self, x: &[f64]) -> Jet2 {
        debug_assert_eq!(x.len(), self.dim, "point dimension mismatch");
        (self.jet)(x)
    }
}

type ProfileFn = Arc<dyn Fn(f64) -> Jet1 + Send + Sync>;

/// A one-variable profile ξ ↦ (value, first, second derivative) on an
/// explicit interval.
#[derive(Clone)]
pub struct Profile2Jet {
    domain: (f64, f64),
    jet: ProfileFn,
}

impl std::fmt::Debug for Profile2Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile2Jet")
            .field("domain", &self.domain)
            .finish()
    }
}

impl Profile2Jet {
    pub fn analytic(domain: (f64, f64), jet: impl Fn(f64) -> Jet1 + Send + Sync + 'static) -> Self {
        Self {
            domain,
            jet: Arc::new(jet),
        }
    }

    /// Dual-number backend for profiles.
    pub fn from_dual(
        domain: (f64, f64),
        f: impl Fn(Dual1) -> Dual1 + Send + Sync + 'static,
    ) -> Self {
        Self::analytic(domain, move |xi| f(Dual1::var(xi)).into())
    }

    pub fn constant(c: f64) -> Self {
        Self::analytic((f64::NEG_INFINITY, f64::INFINITY), move |_| {
            Jet1::constant(c)
        })
    }

    /// Σ cₖ ξᵏ with coefficients in ascending order (Horner evaluation).
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        Self::from_dual((f64::NEG_INFINITY, f64::INFINITY), move |xi| {
            let mut acc = Dual1::con(0.0);
            for &ck in c.iter().rev() {
                acc = acc * xi + ck;
            }
            acc
        })
    }

    /// a·e^{bξ}
    pub fn exponential(a: f64, b: f64) -> Self {
        Self::from_dual((f64::NEG_INFINITY, f64::INFINITY), move |xi| {
            (xi * b).exp() * a
        })
    }

    /// a·e^{bξ²}
    pub fn gaussian_exp(a: f64, b: f64) -> Self {
        Self::from_dual((f64::NEG_INFINITY, f64::INFINITY), move |xi| {
            (xi * xi * b).exp() * a
        })
    }

    /// a/(1 + bξ²)
    pub fn reciprocal_quadratic(a: f64, b: f64) -> Self {
        Self::from_dual((f64::NEG_INFINITY, f64::INFINITY), move |xi| {
            Dual1::con(a) / (xi * xi * b + 1.0)
        })
    }

    /// Same profile restricted to a narrower interval.
    pub fn restricted(&self, domain: (f64, f64)) -> Self {
        Self {
            domain: (self.domain.0.max(domain.0), self.domain.1.min(domain.1)),
            jet: Arc::clone(&self.jet),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn in_domain(&self, xi: f64) -> bool {
        xi >= self.domain.0 && xi <= self.domain.1
    }

    pub fn eval(&self, xi: f64) -> Jet1 {
        (self.jet)(xi)
    }

    /// Check value > 0 on `samples` uniform points of the domain clipped to
    /// a finite window. Returns the first offending ξ.
    pub fn check_positive(&self, samples: usize) -> Result<(), (f64, f64)> {
        let lo = self.domain.0.max(-1e6);
        let hi = self.domain.1.min(1e6);
        let k = samples.max(2);
        for s in 0..k {
            let xi = lo + (hi - lo) * s as f64 / (k - 1) as f64;
            let v = self.eval(xi).value;
            if !(v > 0.0) {
                return Err((xi, v));
            }
        }
        Ok(())
    }
}

/// Lift a profile to ℝⁿ along the direction α: the field x ↦ p(α·x).
///
/// By the chain rule the gradient is p′(ξ)αᵢ and the Hessian p″(ξ)αᵢαⱼ.
/// The guard rejects points whose ξ-image leaves the profile domain.
pub fn compose_with_direction(p: &Profile2Jet, alpha: &[f64]) -> ScalarField2Jet {
    let n = alpha.len();
    let a = alpha.to_vec();
    let a_guard = a.clone();
    let p_eval = p.clone();
    let p_guard = p.clone();
    ScalarField2Jet::analytic(n, move |x: &[f64]| {
        let xi: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        let j = p_eval.eval(xi);
        let grad: Vec<f64> = a.iter().map(|ai| j.d1 * ai).collect();
        let hess = SquareMatrix::from_fn(x.len(), |i, k| j.d2 * a[i] * a[k]);
        Jet2 {
            value: j.value,
            grad,
            hess,
        }
    })
    .with_domain_guard(move |x: &[f64]| {
        let xi: f64 = a_guard.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        p_guard.in_domain(xi)
    })
}

/// Lift only profile *values* to ℝⁿ and differentiate by central finite
/// differences — the FD backend counterpart of [`compose_with_direction`].
pub fn compose_with_direction_fd(p: &Profile2Jet, alpha: &[f64], step: f64) -> ScalarField2Jet {
    let n = alpha.len();
    let a = alpha.to_vec();
    let a_guard = a.clone();
    let p_val = p.clone();
    let p_guard = p.clone();
    ScalarField2Jet::finite_difference(
        n,
        move |x: &[f64]| {
            let xi: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
            p_val.eval(xi).value
        },
        step,
    )
    .with_domain_guard(move |x: &[f64]| {
        // Shrink the admissible region so every FD probe stays inside.
        let xi: f64 = a_guard.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        let margin: f64 = a_guard
            .iter()
            .zip(x)
            .map(|(ai, xi)| (ai * step * (xi.abs() + 1.0)).abs())
            .sum::<f64>()
            * 2.0;
        let (lo, hi) = p_guard.domain();
        xi - margin >= lo && xi + margin <= hi
    })
}

/// Default relative finite-difference step; balances truncation against
/// round-off for f64.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_square_profile() {
        // p(ξ) = ξ², α = (1, 0): at (3, 5) gradient (6, 0), hessian [[2,0],[0,0]]
        let p = Profile2Jet::polynomial(&[0.0, 0.0, 1.0]);
        let field = compose_with_direction(&p, &[1.0, 0.0]);
        let j = field.eval(&[3.0, 5.0]);
        assert_eq!(j.value, 9.0);
        assert_eq!(j.grad, vec![6.0, 0.0]);
        assert_eq!(j.hess[(0, 0)], 2.0);
        assert_eq!(j.hess[(0, 1)], 0.0);
        assert_eq!(j.hess[(1, 1)], 0.0);
    }

    #[test]
    fn compose_constant_profile() {
        let p = Profile2Jet::constant(4.25);
        let field = compose_with_direction(&p, &[0.3, -0.7, 1.1]);
        let j = field.eval(&[1.0, 2.0, -3.0]);
        assert_eq!(j.value, 4.25);
        assert!(j.grad.iter().all(|&g| g == 0.0));
        assert_eq!(j.hess.max_abs(), 0.0);
    }

    #[test]
    fn compose_gaussian_exponential() {
        // p(ξ) = e^{3ξ²/4} at ξ = 1: value e^{3/4}, p′ = (3/2)e^{3/4}
        let p = Profile2Jet::gaussian_exp(1.0, 0.75);
        let field = compose_with_direction(&p, &[0.5, 0.5]);
        let j = field.eval(&[1.0, 1.0]); // ξ = 1
        let e34 = (0.75f64).exp();
        assert!((j.value - e34).abs() < 1e-14);
        // gradient_i = p′ α_i = 1.5 e^{3/4} · 0.5
        assert!((j.grad[0] - 1.5 * e34 * 0.5).abs() < 1e-13);
    }

    #[test]
    fn fd_quadratic_hessian() {
        let f = ScalarField2Jet::finite_difference(2, |x: &[f64]| x[0] * x[0], 1e-4);
        let j = f.eval(&[0.4, -0.9]);
        assert!(
            (j.hess[(0, 0)] - 2.0).abs() < 1e-6,
            "got {}",
            j.hess[(0, 0)]
        );
        assert!(j.hess[(0, 1)].abs() < 1e-6);
    }

    #[test]
    fn fd_constant_field() {
        let f = ScalarField2Jet::finite_difference(3, |_| 7.0, 1e-4);
        let j = f.eval(&[1.0, 2.0, 3.0]);
        assert_eq!(j.value, 7.0);
        assert!(j.grad.iter().all(|g| g.abs() < 1e-8));
        assert!(j.hess.max_abs() < 1e-8);
    }

    #[test]
    fn fd_sin_product_gradient() {
        // f = sin(x₁)·x₂ at (1, 2): gradient (2cos1, sin1)
        let f = ScalarField2Jet::finite_difference(2, |x: &[f64]| x[0].sin() * x[1], 1e-4);
        let j = f.eval(&[1.0, 2.0]);
        assert!((j.grad[0] - 2.0 * 1.0f64.cos()).abs() < 1e-7);
        assert!((j.grad[1] - 1.0f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn guard_rejects_outside_profile_domain() {
        let p = Profile2Jet::polynomial(&[0.0, 1.0]).restricted((-1.0, 1.0));
        let field = compose_with_direction(&p, &[1.0, 1.0]);
        assert!(field.in_domain(&[0.25, 0.25]));
        assert!(!field.in_domain(&[0.75, 0.75])); // ξ = 1.5
    }

    #[test]
    fn fd_guard_shrinks_near_profile_boundary() {
        // The FD lift must refuse boundary-adjacent points whose probe
        // stencil would leave the profile domain.
        let p = Profile2Jet::polynomial(&[0.0, 1.0]).restricted((-1.0, 1.0));
        let exact = compose_with_direction(&p, &[1.0]);
        let fd = compose_with_direction_fd(&p, &[1.0], 1e-2);
        assert!(exact.in_domain(&[0.999]));
        assert!(!fd.in_domain(&[0.999])); // stencil reaches past ξ = 1
        assert!(fd.in_domain(&[0.5]));
        let j = fd.eval(&[0.5]);
        assert!((j.grad[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dual_field_matches_analytic() {
        let dual = ScalarField2Jet::from_dual(2, |x: &[Dual2]| &(&x[0] * &x[0]) * &x[1]);
        let j = dual.eval(&[2.0, 3.0]);
        assert_eq!(j.value, 12.0);
        assert_eq!(j.grad, vec![12.0, 4.0]);
        assert_eq!(j.hess[(0, 0)], 6.0);
        assert_eq!(j.hess[(0, 1)], 4.0);
        assert_eq!(j.hess[(1, 1)], 0.0);
    }

    #[test]
    fn catalog_reciprocal_quadratic_jet() {
        // 1/(1+ξ²) at ξ=2: 1/5, −4/25, 22/125
        let p = Profile2Jet::reciprocal_quadratic(1.0, 1.0);
        let j = p.eval(2.0);
        assert!((j.value - 0.2).abs() < 1e-15);
        assert!((j.d1 + 0.16).abs() < 1e-14);
        assert!((j.d2 - 0.176).abs() < 1e-14);
    }

    mod backend_agreement {
        use super::*;
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        /// One closed form written three ways; the three backends must agree.
        #[test]
        fn three_backends_agree_at_random_points() {
            let analytic = ScalarField2Jet::analytic(2, |x: &[f64]| {
                let (a, b) = (x[0], x[1]);
                let v = (0.3 * a * b).exp() + a * a * b;
                let e = (0.3 * a * b).exp();
                let grad = vec![0.3 * b * e + 2.0 * a * b, 0.3 * a * e + a * a];
                let mut hess = SquareMatrix::zeros(2);
                hess[(0, 0)] = 0.09 * b * b * e + 2.0 * b;
                hess[(1, 1)] = 0.09 * a * a * e;
                let cross = 0.3 * e + 0.09 * a * b * e + 2.0 * a;
                hess[(0, 1)] = cross;
                hess[(1, 0)] = cross;
                Jet2 {
                    value: v,
                    grad,
                    hess,
                }
            });
            let dual = ScalarField2Jet::from_dual(2, |x: &[Dual2]| {
                // Same multiplication order as the analytic closure, so the
                // primal value agrees bit-for-bit.
                (&x[0].scale(0.3) * &x[1]).exp() + &(&x[0] * &x[0]) * &x[1]
            });
            let fd = ScalarField2Jet::finite_difference(
                2,
                |x: &[f64]| (0.3 * x[0] * x[1]).exp() + x[0] * x[0] * x[1],
                DEFAULT_FD_STEP,
            );

            let mut rng = StdRng::seed_from_u64(7);
            for _ in 0..100 {
                let x = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
                let ja = analytic.eval(&x);
                let jd = dual.eval(&x);
                let jf = fd.eval(&x);
                assert_eq!(ja.value, jd.value, "value must agree exactly");
                assert_eq!(ja.value, jf.value);
                for i in 0..2 {
                    assert!((ja.grad[i] - jd.grad[i]).abs() < 1e-12);
                    assert!(
                        (ja.grad[i] - jf.grad[i]).abs() < 1e-6,
                        "fd grad off at {x:?}: {} vs {}",
                        ja.grad[i],
                        jf.grad[i]
                    );
                    for j in 0..2 {
                        assert!((ja.hess[(i, j)] - jd.hess[(i, j)]).abs() < 1e-12);
                        assert!(
                            (ja.hess[(i, j)] - jf.hess[(i, j)]).abs() < 1e-6,
                            "fd hess off at {x:?}"
                        );
                    }
                }
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Dual-backend Hessians are exactly symmetric.
            #[test]
            fn dual_hessian_symmetric(
                a in -2.0f64..2.0,
                b in -2.0f64..2.0,
                c in -2.0f64..2.0,
                x in -3.0f64..3.0,
                y in -3.0f64..3.0,
                z in -3.0f64..3.0,
            ) {
                let f = ScalarField2Jet::from_dual(3, move |v: &[Dual2]| {
                    (&(&v[0] * &v[1]).scale(a) + &(&v[1] * &v[2]).scale(b)).sin()
                        + &(&v[0] * &(&v[2] * &v[2])).scale(c)
                });
                let j = f.eval(&[x, y, z]);
                prop_assert_eq!(j.hess.asymmetry(), 0.0);
                prop_assert!(j.is_finite());
            }

            /// FD Hessians symmetric to the documented 1e-6.
            #[test]
            fn fd_hessian_nearly_symmetric(
                x in -2.0f64..2.0,
                y in -2.0f64..2.0,
            ) {
                let f = ScalarField2Jet::finite_difference(
                    2,
                    |v: &[f64]| (v[0] * v[1]).sin() + v[0] * v[0],
                    DEFAULT_FD_STEP,
                );
                let j = f.eval(&[x, y]);
                prop_assert!(j.hess.asymmetry() <= 1e-6);
            }
        }
    }
}
