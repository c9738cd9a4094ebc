//! Translation-invariant ansatz ξ = Σ αₖxₖ: causal typing of the direction,
//! the reduced ODE residual system, the monotone-potential law, and the sign
//! obstruction for lightlike directions.

use crate::error::{Error, Result};
use crate::fields::{compose_with_direction, compose_with_direction_fd, Profile2Jet};
use crate::geometry::{ConformalBase, Signature, PHI_FLOOR};
use crate::warped::WarpedSolitonData;

/// Causal class of a direction α under the signature: the sign of
/// s = Σ εₖαₖ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CausalType {
    Spacelike,
    Timelike,
    Lightlike,
    /// s is not in {−1, 0, +1}; the value is carried for rescaling.
    NonNormalized(f64),
}

const NORMALIZATION_TOL: f64 = 1e-12;

/// Classify the direction. A zero vector is reported as `NonNormalized(0)`
/// rather than lightlike: null directions require α ≠ 0.
pub fn causal_type(alpha: &[f64], sig: &Signature) -> CausalType {
    assert_eq!(alpha.len(), sig.n(), "direction length must equal n");
    let s: f64 = alpha
        .iter()
        .enumerate()
        .map(|(k, a)| sig.eps(k) * a * a)
        .sum();
    let norm_sq: f64 = alpha.iter().map(|a| a * a).sum();
    if norm_sq <= NORMALIZATION_TOL {
        return CausalType::NonNormalized(s);
    }
    if (s - 1.0).abs() <= NORMALIZATION_TOL {
        CausalType::Spacelike
    } else if (s + 1.0).abs() <= NORMALIZATION_TOL {
        CausalType::Timelike
    } else if s.abs() <= NORMALIZATION_TOL {
        CausalType::Lightlike
    } else {
        CausalType::NonNormalized(s)
    }
}

/// A translation-invariant candidate soliton: direction, causal type and
/// the three 1-D profiles with two derivatives each.
#[derive(Debug, Clone)]
pub struct InvariantProfile {
    alpha: Vec<f64>,
    sig: Signature,
    /// Σ εₖαₖ² after normalization; one of −1, 0, +1.
    eps_k0: i8,
    pub phi: Profile2Jet,
    pub f: Profile2Jet,
    pub h: Profile2Jet,
    pub m: usize,
    pub lambda_f: f64,
    pub rho: f64,
    /// The original Σ εₖαₖ² when the constructor had to rescale α.
    rescaled_from: Option<f64>,
}

impl InvariantProfile {
    /// Build and validate. Directions with s ∉ {−1, 0, +1} are rescaled by
    /// 1/√|s| (ξ-reparametrization invariance) and the original s recorded.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: Vec<f64>,
        sig: Signature,
        phi: Profile2Jet,
        f: Profile2Jet,
        h: Profile2Jet,
        m: usize,
        lambda_f: f64,
        rho: f64,
    ) -> Result<Self> {
        if alpha.len() != sig.n() {
            return Err(Error::DimensionMismatch {
                expected: sig.n(),
                got: alpha.len(),
            });
        }
        if m < 1 {
            return Err(Error::InvalidParam("fiber dimension m must be ≥ 1".into()));
        }
        let (alpha, eps_k0, rescaled_from) = match causal_type(&alpha, &sig) {
            CausalType::Spacelike => (alpha, 1, None),
            CausalType::Timelike => (alpha, -1, None),
            CausalType::Lightlike => (alpha, 0, None),
            CausalType::NonNormalized(s) => {
                if s.abs() <= NORMALIZATION_TOL {
                    return Err(Error::InvalidParam("direction α must be nonzero".into()));
                }
                let scale = 1.0 / s.abs().sqrt();
                let rescaled: Vec<f64> = alpha.iter().map(|a| a * scale).collect();
                (rescaled, if s > 0.0 { 1 } else { -1 }, Some(s))
            }
        };
        Ok(Self {
            alpha,
            sig,
            eps_k0,
            phi,
            f,
            h,
            m,
            lambda_f,
            rho,
            rescaled_from,
        })
    }

    pub fn n(&self) -> usize {
        self.sig.n()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    /// Stored causal factor ε_{k₀} ∈ {−1, 0, +1}; consistency with α is
    /// asserted at construction, not recomputed per call.
    pub fn eps_k0(&self) -> i8 {
        self.eps_k0
    }

    pub fn rescaled_from(&self) -> Option<f64> {
        self.rescaled_from
    }

    /// Swap in a different direction/signature (the profiles are reused).
    pub fn with_direction(&self, alpha: Vec<f64>, sig: Signature) -> Result<Self> {
        Self::new(
            alpha,
            sig,
            self.phi.clone(),
            self.f.clone(),
            self.h.clone(),
            self.m,
            self.lambda_f,
            self.rho,
        )
    }

    /// Intersection of the three profile domains.
    pub fn domain(&self) -> (f64, f64) {
        let (a1, b1) = self.phi.domain();
        let (a2, b2) = self.f.domain();
        let (a3, b3) = self.h.domain();
        (a1.max(a2).max(a3), b1.min(b2).min(b3))
    }

    /// Verify φ > 0 and f > 0 on a uniform sample of the domain.
    pub fn validate_positivity(&self, samples: usize) -> Result<()> {
        for (name, p) in [("phi", &self.phi), ("f", &self.f)] {
            if let Err((xi, v)) = p.check_positive(samples) {
                return Err(Error::NonPositive {
                    what: if name == "phi" { "phi" } else { "f" },
                    value: v,
                    at: format!("ξ = {xi}"),
                });
            }
        }
        Ok(())
    }
}

/// The three reduced residuals at one ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResiduals {
    /// h″ + 2φ′h′/φ
    pub r_h: f64,
    /// Diagonal equation residual (bracket form for ε_{k₀} = ±1, the
    /// constraint ρ − λ_F/f² in the null case).
    pub r_diag: f64,
    /// Fiber equation residual.
    pub r_fiber: f64,
}

impl OdeResiduals {
    pub fn max_abs(&self) -> f64 {
        self.r_h
            .abs()
            .max(self.r_diag.abs())
            .max(self.r_fiber.abs())
    }
}

fn profile_jet_checked(
    p: &Profile2Jet,
    what: &'static str,
    xi: f64,
    positive: bool,
) -> Result<crate::fields::Jet1> {
    if !p.in_domain(xi) {
        let (lo, hi) = p.domain();
        return Err(Error::OutOfDomain { what, xi, lo, hi });
    }
    let j = p.eval(xi);
    if positive && !(j.value >= PHI_FLOOR) {
        return Err(Error::NonPositive {
            what,
            value: j.value,
            at: format!("ξ = {xi}"),
        });
    }
    Ok(j)
}

/// Reduced soliton residuals at ξ.
///
/// For ε_{k₀} = ±1:
/// r_h = h″ + 2φ′h′/φ,
/// r_diag = ε_{k₀}[(n−1)(2φφ″ − n(φ′)²) − (2m/f)(φ²f″ − (n−2)φφ′f′)
///           − m(m−1)φ²(f′)²/f² + φφ′h′] − (ρ − λ_F/f²),
/// r_fiber = same bracket with φφ′h′ replaced by −(φ²/f)f′h′, minus
///           (ρ − λ_F/f²).
/// In the null case r_diag = r_fiber = ρ − λ_F/f².
pub fn ode_residuals(p: &InvariantProfile, xi: f64) -> Result<OdeResiduals> {
    let phi = profile_jet_checked(&p.phi, "phi", xi, true)?;
    let f = profile_jet_checked(&p.f, "f", xi, true)?;
    let h = profile_jet_checked(&p.h, "h", xi, false)?;

    let r_h = h.d2 + 2.0 * phi.d1 * h.d1 / phi.value;
    let constraint = p.rho - p.lambda_f / (f.value * f.value);

    if p.eps_k0 == 0 {
        return Ok(OdeResiduals {
            r_h,
            r_diag: constraint,
            r_fiber: constraint,
        });
    }

    let n = p.n() as f64;
    let m = p.m as f64;
    let eps = p.eps_k0 as f64;
    let bracket_common = (n - 1.0) * (2.0 * phi.value * phi.d2 - n * phi.d1 * phi.d1)
        - (2.0 * m / f.value)
            * (phi.value * phi.value * f.d2 - (n - 2.0) * phi.value * phi.d1 * f.d1)
        - m * (m - 1.0) * phi.value * phi.value * f.d1 * f.d1 / (f.value * f.value);
    let r_diag = eps * (bracket_common + phi.value * phi.d1 * h.d1) - constraint;
    let r_fiber =
        eps * (bracket_common - (phi.value * phi.value / f.value) * f.d1 * h.d1) - constraint;

    Ok(OdeResiduals {
        r_h,
        r_diag,
        r_fiber,
    })
}

/// The monotone-potential law h′(ξ) = α/φ²(ξ).
pub fn potential_slope(phi: &Profile2Jet, alpha_const: f64, xi: f64) -> Result<f64> {
    let j = profile_jet_checked(phi, "phi", xi, true)?;
    Ok(alpha_const / (j.value * j.value))
}

/// Admissibility of (λ_F, ρ) for a lightlike direction, where the system
/// forces ρ = λ_F/f².
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignObstruction {
    /// λ_F = ρ = 0: any positive warping constant works.
    AdmissibleAnyWarp,
    /// Strictly matching signs: the warping constant is pinned.
    Admissible { warp: f64 },
    /// Mismatched signs (or exactly one zero): no soliton exists.
    Inadmissible,
}

pub fn sign_obstruction(lambda_f: f64, rho: f64) -> SignObstruction {
    if lambda_f == 0.0 && rho == 0.0 {
        SignObstruction::AdmissibleAnyWarp
    } else if lambda_f > 0.0 && rho > 0.0 || lambda_f < 0.0 && rho < 0.0 {
        SignObstruction::Admissible {
            warp: (lambda_f / rho).sqrt(),
        }
    } else {
        SignObstruction::Inadmissible
    }
}

/// Exact interval image of a box under ξ = Σ αₖxₖ.
pub fn xi_image(alpha: &[f64], bbox: &[(f64, f64)]) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (a, (l, u)) in alpha.iter().zip(bbox) {
        let (p, q) = (a * l, a * u);
        lo += p.min(q);
        hi += p.max(q);
    }
    (lo, hi)
}

fn check_box(p: &InvariantProfile, bbox: &[(f64, f64)]) -> Result<()> {
    if bbox.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: bbox.len(),
        });
    }
    let (img_lo, img_hi) = xi_image(&p.alpha, bbox);
    let (lo, hi) = p.domain();
    if img_lo < lo || img_hi > hi {
        return Err(Error::DomainMismatch {
            img_lo,
            img_hi,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Lift the profile to full fields on ℝⁿ with exact profile jets. The box is
/// the region the caller intends to sweep; lifts reject boxes whose ξ-image
/// escapes the profile domain.
pub fn lift_to_field(p: &InvariantProfile, bbox: &[(f64, f64)]) -> Result<WarpedSolitonData> {
    check_box(p, bbox)?;
    let base = ConformalBase::new(p.sig.clone(), compose_with_direction(&p.phi, &p.alpha))?;
    WarpedSolitonData::new(
        base,
        compose_with_direction(&p.f, &p.alpha),
        compose_with_direction(&p.h, &p.alpha),
        p.m,
        p.lambda_f,
        p.rho,
    )
}

/// Same lift but with all three fields differentiated by central finite
/// differences from profile values only.
pub fn lift_to_field_fd(
    p: &InvariantProfile,
    bbox: &[(f64, f64)],
    step: f64,
) -> Result<WarpedSolitonData> {
    check_box(p, bbox)?;
    let base = ConformalBase::new(
        p.sig.clone(),
        compose_with_direction_fd(&p.phi, &p.alpha, step),
    )?;
    WarpedSolitonData::new(
        base,
        compose_with_direction_fd(&p.f, &p.alpha, step),
        compose_with_direction_fd(&p.h, &p.alpha, step),
        p.m,
        p.lambda_f,
        p.rho,
    )
}

/// One row of a ξ-sweep along a profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub xi: f64,
    pub phi: f64,
    pub f: f64,
    pub h: f64,
    pub r_h: f64,
    pub r_diag: f64,
    pub r_fiber: f64,
}

/// Evaluate profile values and residuals along the given ξ samples.
pub fn sweep_profile(p: &InvariantProfile, xis: &[f64]) -> Result<Vec<ProfileSample>> {
    if xis.is_empty() {
        return Err(Error::EmptyGrid);
    }
    xis.iter()
        .map(|&xi| {
            let r = ode_residuals(p, xi)?;
            Ok(ProfileSample {
                xi,
                phi: p.phi.eval(xi).value,
                f: p.f.eval(xi).value,
                h: p.h.eval(xi).value,
                r_h: r.r_h,
                r_diag: r.r_diag,
                r_fiber: r.r_fiber,
            })
        })
        .collect()
}

/// CSV body for a profile sweep: ξ, φ, f, h, r_h, r_diag, r_fiber.
pub fn profile_sweep_csv(samples: &[ProfileSample]) -> String {
    let mut out = String::from("xi,phi,f,h,r_h,r_diag,r_fiber\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.xi, s.phi, s.f, s.h, s.r_h, s.r_diag, s.r_fiber
        ));
    }
    out
}

/// Uniform ξ samples over an interval.
pub fn uniform_samples(domain: (f64, f64), count: usize) -> Vec<f64> {
    let k = count.max(2);
    (0..k)
        .map(|i| domain.0 + (domain.1 - domain.0) * i as f64 / (k - 1) as f64)
        .collect()
}
