//! Explicit invariant solution families: the steady quadrature family, the
//! Riccati family with constant potential, the lightlike family, and the
//! almost-soliton extension. Every construction is meant to be re-validated
//! through [`crate::reduction::ode_residuals`].

use crate::error::{Error, Result};
use crate::fields::{Jet1, Profile2Jet};
use crate::geometry::{Signature, PHI_FLOOR};
use crate::numerics::{
    integrate_to_points, quad_adaptive, root_bracketed, CumulativeQuad, HermiteSeries,
    IntegratorConfig,
};
use crate::reduction::{ode_residuals, uniform_samples, InvariantProfile};
use serde_json::json;

/// Absolute quadrature tolerance for potential and Riccati integrals.
const QUAD_TOL: f64 = 1e-10;
/// Segments of the left-accumulated quadrature ladder.
const QUAD_SEGMENTS: usize = 64;
/// Dense node count for ODE-backed profiles.
const ODE_NODES: usize = 1024;
/// Validation tolerance for supplied Riccati particular solutions.
const ZP_RESIDUAL_TOL: f64 = 1e-8;

/// Parameters of the steady family with nonconstant potential.
#[derive(Debug, Clone)]
pub struct SteadyFamilyParams {
    pub n: usize,
    pub m: usize,
    /// Quadrature constant α ≠ 0 (the potential slope is α/φ²).
    pub alpha_const: f64,
    /// First integration constant β of the φ-equation.
    pub beta: f64,
    /// f = e^c/φ.
    pub c: f64,
    /// Time shift of the closed-form β = 0 trajectory; kept for
    /// cross-checks, the initial-value anchor is (domain.0, phi0).
    pub nu: f64,
    /// φ(domain.0) > 0 — selects the positive branch.
    pub phi0: f64,
    pub domain: (f64, f64),
}

/// Parameters of the Riccati family (constant potential).
#[derive(Debug, Clone)]
pub struct RiccatiParams {
    pub n: usize,
    pub m: usize,
    pub phi: Profile2Jet,
    /// Particular solution of the Riccati equation; validated at
    /// construction to residual ≤ 1e-8 on the domain.
    pub z_p: Profile2Jet,
    /// Integration constant C of the general solution. `None` selects the
    /// pure-particular branch (the C → ∞ limit).
    pub c: Option<f64>,
    pub domain: (f64, f64),
}

/// Parameters of the lightlike family.
#[derive(Debug, Clone)]
pub struct LightlikeParams {
    pub n: usize,
    pub m: usize,
    pub alpha_const: f64,
    pub domain: (f64, f64),
}

/// Domain truncation record for constructions that hit a singularity.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub requested: (f64, f64),
    pub achieved: (f64, f64),
    pub reason: String,
}

/// A constructed profile plus its provenance.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub profile: InvariantProfile,
    pub family: &'static str,
    pub truncation: Option<Truncation>,
}

impl Constructed {
    /// Largest ODE residual over `samples` uniform points of the domain.
    pub fn max_residual(&self, samples: usize) -> Result<f64> {
        let xs = uniform_samples(self.profile.domain(), samples);
        let mut worst = 0.0f64;
        for xi in xs {
            worst = worst.max(ode_residuals(&self.profile, xi)?.max_abs());
        }
        Ok(worst)
    }

    /// Serialize as `{family, params, domain, samples: [{xi, phi, f, h}]}`.
    pub fn to_json(&self, params: serde_json::Value, sample_count: usize) -> String {
        let (lo, hi) = self.profile.domain();
        let xs = uniform_samples((lo, hi), sample_count.max(2));
        let samples: Vec<serde_json::Value> = xs
            .iter()
            .map(|&xi| {
                json!({
                    "xi": xi,
                    "phi": self.profile.phi.eval(xi).value,
                    "f": self.profile.f.eval(xi).value,
                    "h": self.profile.h.eval(xi).value,
                })
            })
            .collect();
        let v = json!({
            "family": self.family,
            "params": params,
            "domain": [lo, hi],
            "truncated": self.truncation.as_ref().map(|t| json!({
                "requested": [t.requested.0, t.requested.1],
                "achieved": [t.achieved.0, t.achieved.1],
                "reason": t.reason,
            })),
            "samples": samples,
        });
        serde_json::to_string_pretty(&v).expect("profile serialization")
    }
}

fn axis_direction(n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n];
    a[0] = 1.0;
    a
}

fn null_direction(n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n];
    a[0] = 1.0;
    a[1] = 1.0;
    a
}

/// Potential profile h(ξ) = α ∫ dξ/φ², accumulated from the left domain
/// endpoint with the integration constant fixed to 0. The derivatives come
/// from the slope law: h′ = α/φ², h″ = −2αφ′/φ³.
fn potential_from_slope(
    phi: &Profile2Jet,
    alpha_const: f64,
    domain: (f64, f64),
) -> Result<Profile2Jet> {
    let phi_for_quad = phi.clone();
    let antiderivative = CumulativeQuad::new(
        move |s| {
            let v = phi_for_quad.eval(s).value;
            alpha_const / (v * v)
        },
        domain,
        QUAD_SEGMENTS,
        QUAD_TOL,
    )?;
    let phi_inner = phi.clone();
    Ok(Profile2Jet::analytic(domain, move |xi| {
        let pj = phi_inner.eval(xi);
        let value = antiderivative.value_at(xi).unwrap_or(f64::NAN);
        Jet1 {
            value,
            d1: alpha_const / (pj.value * pj.value),
            d2: -2.0 * alpha_const * pj.d1 / (pj.value * pj.value * pj.value),
        }
    }))
}

/// Warping profile f = e^c/φ with derivatives derived from the φ jet.
fn warp_from_phi(phi: &Profile2Jet, c: f64, domain: (f64, f64)) -> Profile2Jet {
    let ec = c.exp();
    let inner = phi.clone();
    Profile2Jet::analytic(domain, move |xi| {
        let p = inner.eval(xi);
        let v = p.value;
        Jet1 {
            value: ec / v,
            d1: -ec * p.d1 / (v * v),
            d2: ec * (2.0 * p.d1 * p.d1 - v * p.d2) / (v * v * v),
        }
    })
}

/// Construct the steady family: φ integrated from the first-order form
/// φ′ = (α − Kφ^{(n+m+2)/2}) / ((n+m−1)(n+m+2)φ), K = 2β(n+m−1)(n+m+2)/(n+m−2),
/// then f = e^c/φ and h by quadrature of α/φ².
///
/// Integration halts with a truncated-domain report when φ approaches 0 or
/// blows up; φ(ξ₀) = phi0 picks the positive branch.
pub fn steady_family(p: &SteadyFamilyParams) -> Result<Constructed> {
    if p.alpha_const == 0.0 {
        return Err(Error::InvalidParam("steady family needs α ≠ 0".into()));
    }
    if p.n < 2 || p.m < 1 {
        return Err(Error::InvalidParam("need n ≥ 2 and m ≥ 1".into()));
    }
    if p.n + p.m < 3 {
        return Err(Error::InvalidParam(
            "need n + m ≥ 3 so the φ-equation exponents are defined".into(),
        ));
    }
    if !(p.phi0 > 0.0) {
        return Err(Error::InvalidParam(format!(
            "phi0 must be positive, got {}",
            p.phi0
        )));
    }
    let (lo, hi) = p.domain;
    if !(hi > lo) {
        return Err(Error::InvalidParam(format!("empty domain [{lo}, {hi}]")));
    }

    let nm = (p.n + p.m) as f64;
    let a_coef = (nm - 1.0) * (nm + 2.0);
    let k_coef = 2.0 * p.beta * a_coef / (nm - 2.0);
    let pow = (nm + 2.0) / 2.0;
    let alpha = p.alpha_const;

    let slope = move |phi: f64| (alpha - k_coef * phi.powf(pow)) / (a_coef * phi);
    let slope_d =
        move |phi: f64| -(alpha + k_coef * (pow - 1.0) * phi.powf(pow)) / (a_coef * phi * phi);

    let floor = 1e-8 * p.phi0.max(1.0);
    let ceiling = 1e8;
    let event = move |_xi: f64, y: &[f64]| y[0] <= floor || y[0] >= ceiling;
    if event(lo, &[p.phi0]) {
        return Err(Error::SingularConstruction {
            xi: lo,
            reason: "φ starts at the positivity floor".into(),
        });
    }

    let nodes: Vec<f64> = uniform_samples((lo, hi), ODE_NODES + 1);
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let run = integrate_to_points(
        |_xi, y: &[f64], dy: &mut [f64]| dy[0] = slope(y[0]),
        &[p.phi0],
        &nodes,
        &cfg,
        Some(event),
    )?;

    let reached = run.states.len();
    if reached < 2 {
        return Err(Error::SingularConstruction {
            xi: lo,
            reason: "φ-equation singular before the first output node".into(),
        });
    }
    let achieved_hi = nodes[reached - 1];
    let truncation = run.stopped_at.map(|xi| Truncation {
        requested: (lo, hi),
        achieved: (lo, achieved_hi),
        reason: format!("φ left the admissible range near ξ = {xi:.6}"),
    });

    let dx = nodes[1] - nodes[0];
    let values: Vec<f64> = run.states.iter().map(|s| s[0]).collect();
    let derivs: Vec<f64> = values.iter().map(|&v| slope(v)).collect();
    let series = HermiteSeries::new(lo, dx, values, derivs);
    let achieved = (lo, achieved_hi);

    let phi_profile = Profile2Jet::analytic(achieved, move |xi| {
        let v = series.value_at(xi);
        let d1 = slope(v);
        Jet1 {
            value: v,
            d1,
            d2: slope_d(v) * d1,
        }
    });

    let f_profile = warp_from_phi(&phi_profile, p.c, achieved);
    let h_profile = potential_from_slope(&phi_profile, p.alpha_const, achieved)?;

    let profile = InvariantProfile::new(
        axis_direction(p.n),
        Signature::euclidean(p.n),
        phi_profile,
        f_profile,
        h_profile,
        p.m,
        0.0,
        0.0,
    )?;
    profile.validate_positivity(128)?;

    Ok(Constructed {
        profile,
        family: "steady",
        truncation,
    })
}

/// The implicit quadrature identity the steady trajectory must satisfy:
/// (n+m−1)(n+m+2) ∫_{φ(ξ₀)}^{φ(ξ)} φ̃ dφ̃ / (α − Kφ̃^{(n+m)/2+1}) − (ξ − ξ₀).
///
/// Independent dual route for the integrated φ; vanishes to quadrature
/// accuracy along a correct trajectory.
pub fn steady_quadrature_identity(
    params: &SteadyFamilyParams,
    phi: &Profile2Jet,
    xi: f64,
) -> Result<f64> {
    let nm = (params.n + params.m) as f64;
    let a_coef = (nm - 1.0) * (nm + 2.0);
    let k_coef = 2.0 * params.beta * a_coef / (nm - 2.0);
    let pow = nm / 2.0 + 1.0;
    let alpha = params.alpha_const;
    let xi0 = params.domain.0;
    let phi0 = phi.eval(xi0).value;
    let phi1 = phi.eval(xi).value;
    let integral = quad_adaptive(
        |t: f64| t / (alpha - k_coef * t.powf(pow)),
        phi0,
        phi1,
        QUAD_TOL,
    )?;
    Ok(a_coef * integral - (xi - xi0))
}

/// Residual of the Riccati equation associated with constant-potential
/// steady solitons:
/// z² + (2/(m+1)) z′ + ((n+m−1)/(m(m+1)²)) (n(φ′/φ)² − 2φ″/φ).
pub fn riccati_residual(
    z: &Profile2Jet,
    phi: &Profile2Jet,
    n: usize,
    m: usize,
    xi: f64,
) -> Result<f64> {
    let pj = phi.eval(xi);
    if !(pj.value >= PHI_FLOOR) {
        return Err(Error::NonPositive {
            what: "phi",
            value: pj.value,
            at: format!("ξ = {xi}"),
        });
    }
    let zj = z.eval(xi);
    let nf = n as f64;
    let mf = m as f64;
    let ratio = pj.d1 / pj.value;
    let coeff = (nf + mf - 1.0) / (mf * (mf + 1.0) * (mf + 1.0));
    Ok(zj.value * zj.value
        + 2.0 / (mf + 1.0) * zj.d1
        + coeff * (nf * ratio * ratio - 2.0 * pj.d2 / pj.value))
}

/// Construct the Riccati family:
/// f = φ^{(n−2)/(m+1)} e^{∫z_p} (∫ e^{−(m+1)∫z_p} + 2C/(m+1))^{2/(m+1)},
/// h constant. `c = None` selects the pure-particular branch f = φ^…·e^{∫z_p}.
pub fn riccati_family(p: &RiccatiParams) -> Result<Constructed> {
    if p.n < 2 || p.m < 1 {
        return Err(Error::InvalidParam("need n ≥ 2 and m ≥ 1".into()));
    }
    let (lo, hi) = p.domain;
    if !(hi > lo) {
        return Err(Error::InvalidParam(format!("empty domain [{lo}, {hi}]")));
    }
    if let Err((xi, v)) = p.phi.restricted(p.domain).check_positive(128) {
        return Err(Error::NonPositive {
            what: "phi",
            value: v,
            at: format!("ξ = {xi}"),
        });
    }
    // The supplied z_p must actually solve the Riccati equation.
    for xi in uniform_samples(p.domain, 64) {
        let r = riccati_residual(&p.z_p, &p.phi, p.n, p.m, xi)?;
        if r.abs() > ZP_RESIDUAL_TOL {
            return Err(Error::InvalidParam(format!(
                "z_p is not a particular solution: Riccati residual {r:.3e} at ξ = {xi}"
            )));
        }
    }

    let mf = p.m as f64;
    let q_exp = (p.n as f64 - 2.0) / (mf + 1.0);
    let zp = p.z_p.clone();
    let zp_for_quad = p.z_p.clone();
    let accumulated_zp = CumulativeQuad::new(
        move |s| zp_for_quad.eval(s).value,
        p.domain,
        QUAD_SEGMENTS,
        QUAD_TOL,
    )?;

    // ∫ e^{−(m+1)∫z_p}; only needed on the general branch.
    let (j_quad, c_term, mut domain, mut truncation) = match p.c {
        Some(c_val) => {
            let acc = accumulated_zp.clone();
            let inner = CumulativeQuad::new(
                move |s| (-(mf + 1.0) * acc.value_at(s).unwrap_or(f64::NAN)).exp(),
                p.domain,
                QUAD_SEGMENTS,
                QUAD_TOL,
            )?;
            let c_term = 2.0 * c_val / (mf + 1.0);
            // J is strictly increasing; it must stay positive on the domain.
            let j_at = |xi: f64| inner.value_at(xi).unwrap_or(f64::NAN) + c_term;
            let mut domain = p.domain;
            let mut truncation = None;
            if j_at(lo) <= 0.0 {
                if j_at(hi) <= 0.0 {
                    return Err(Error::SingularConstruction {
                        xi: hi,
                        reason: "accumulated integral + 2C/(m+1) never becomes positive".into(),
                    });
                }
                let zero = root_bracketed(j_at, lo, hi, 1e-10)?;
                // Keep a real gap to the f = 0 edge: f″/f blows up like
                // 1/(ξ − ξ_zero)² there and the residual cancellation with it.
                let margin = 1e-3 * (hi - lo);
                let new_lo = (zero + margin).min(hi);
                domain = (new_lo, hi);
                truncation = Some(Truncation {
                    requested: p.domain,
                    achieved: domain,
                    reason: format!("accumulated integral hits 0 at ξ ≈ {zero:.6}; f would vanish"),
                });
            }
            (Some(inner), c_term, domain, truncation)
        }
        None => (None, 0.0, p.domain, None),
    };
    if !(domain.1 > domain.0) {
        return Err(Error::SingularConstruction {
            xi: domain.0,
            reason: "no admissible domain remains".into(),
        });
    }

    let phi_inner = p.phi.clone();
    let f_domain = domain;
    let f_profile = Profile2Jet::analytic(f_domain, move |xi| {
        let pj = phi_inner.eval(xi);
        let zpj = zp.eval(xi);
        let i_val = accumulated_zp.value_at(xi).unwrap_or(f64::NAN);
        let ratio = pj.d1 / pj.value;
        let ratio_d = pj.d2 / pj.value - ratio * ratio;
        let (value, w, w_d) = match &j_quad {
            Some(inner) => {
                let e_val = (-(mf + 1.0) * i_val).exp();
                let j_val = inner.value_at(xi).unwrap_or(f64::NAN) + c_term;
                let value = pj.value.powf(q_exp) * i_val.exp() * j_val.powf(2.0 / (mf + 1.0));
                let tail = 2.0 / (mf + 1.0) * e_val / j_val;
                let w = q_exp * ratio + zpj.value + tail;
                let tail_d = -2.0 / (mf + 1.0) * e_val * ((mf + 1.0) * zpj.value * j_val + e_val)
                    / (j_val * j_val);
                let w_d = q_exp * ratio_d + zpj.d1 + tail_d;
                (value, w, w_d)
            }
            None => {
                let value = pj.value.powf(q_exp) * i_val.exp();
                let w = q_exp * ratio + zpj.value;
                let w_d = q_exp * ratio_d + zpj.d1;
                (value, w, w_d)
            }
        };
        Jet1 {
            value,
            d1: value * w,
            d2: value * (w * w + w_d),
        }
    });

    // Positivity can still be lost to rounding right at a truncated edge;
    // nudge the domain if so.
    if let Err((xi, _)) = f_profile.restricted(domain).check_positive(128) {
        let margin = 1e-4 * (domain.1 - domain.0);
        domain = (domain.0.max(xi + margin), domain.1);
        truncation = Some(Truncation {
            requested: p.domain,
            achieved: domain,
            reason: "f positive only on a sub-interval".into(),
        });
    }

    let profile = InvariantProfile::new(
        axis_direction(p.n),
        Signature::euclidean(p.n),
        p.phi.restricted(domain),
        f_profile.restricted(domain),
        Profile2Jet::constant(0.0).restricted(domain),
        p.m,
        0.0,
        0.0,
    )?;
    profile.validate_positivity(128)?;

    Ok(Constructed {
        profile,
        family: "riccati",
        truncation,
    })
}

/// Construct the lightlike family: given φ, f > 0 on the domain, the
/// potential is h = α ∫ dξ/φ² and the direction is null.
pub fn lightlike_family(
    p: &LightlikeParams,
    phi: &Profile2Jet,
    f: &Profile2Jet,
) -> Result<Constructed> {
    if p.n < 2 || p.m < 1 {
        return Err(Error::InvalidParam("need n ≥ 2 and m ≥ 1".into()));
    }
    let (lo, hi) = p.domain;
    if !(hi > lo) {
        return Err(Error::InvalidParam(format!("empty domain [{lo}, {hi}]")));
    }
    for (name, prof) in [("phi", phi), ("f", f)] {
        if let Err((xi, v)) = prof.restricted(p.domain).check_positive(256) {
            return Err(Error::NonPositive {
                what: if name == "phi" { "phi" } else { "f" },
                value: v,
                at: format!("ξ = {xi}"),
            });
        }
    }
    let phi_r = phi.restricted(p.domain);
    let h_profile = potential_from_slope(&phi_r, p.alpha_const, p.domain)?;
    let profile = InvariantProfile::new(
        null_direction(p.n),
        Signature::lorentzian(p.n),
        phi_r,
        f.restricted(p.domain),
        h_profile,
        p.m,
        0.0,
        0.0,
    )?;

    Ok(Constructed {
        profile,
        family: "lightlike",
        truncation: None,
    })
}

/// Recover z = f′/f − ((n−2)/(m+1)) φ′/φ from a constructed warping profile,
/// with z′ assembled from the same jets. A correct general solution makes
/// [`riccati_residual`] of this profile vanish.
pub fn recovered_z(f: &Profile2Jet, phi: &Profile2Jet, n: usize, m: usize) -> Profile2Jet {
    let q = (n as f64 - 2.0) / (m as f64 + 1.0);
    let (f, phi) = (f.clone(), phi.clone());
    let domain = (
        f.domain().0.max(phi.domain().0),
        f.domain().1.min(phi.domain().1),
    );
    Profile2Jet::analytic(domain, move |xi| {
        let fj = f.eval(xi);
        let pj = phi.eval(xi);
        let rf = fj.d1 / fj.value;
        let rp = pj.d1 / pj.value;
        Jet1 {
            value: rf - q * rp,
            d1: (fj.d2 / fj.value - rf * rf) - q * (pj.d2 / pj.value - rp * rp),
            d2: 0.0, // not used by the Riccati residual
        }
    })
}

/// The almost-soliton extension for lightlike directions: given the warping
/// profile, ρ(ξ) = λ_F/f(ξ)².
pub fn almost_soliton_rho(f: &Profile2Jet, lambda_f: f64, xi: f64) -> Result<f64> {
    let j = f.eval(xi);
    if !(j.value >= PHI_FLOOR) {
        return Err(Error::NonPositive {
            what: "f",
            value: j.value,
            at: format!("ξ = {xi}"),
        });
    }
    Ok(lambda_f / (j.value * j.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{lift_to_field, potential_slope};
    use crate::warped::{lattice, residual_sweep};

    fn steady_params_beta0() -> SteadyFamilyParams {
        SteadyFamilyParams {
            n: 3,
            m: 2,
            alpha_const: 1.0,
            beta: 0.0,
            c: 0.0,
            nu: 0.0,
            phi0: (1.0f64 / 14.0).sqrt(),
            domain: (1.0, 10.0),
        }
    }

    #[test]
    fn steady_beta0_matches_closed_form() {
        // φ(ξ) = sqrt(2α(ξ+ν)/((n+m−1)(n+m+2))) = sqrt(ξ/14) for (3,2,α=1,ν=0)
        let c = steady_family(&steady_params_beta0()).unwrap();
        assert!(c.truncation.is_none());
        for xi in uniform_samples((1.0, 10.0), 200) {
            let got = c.profile.phi.eval(xi).value;
            let expect = (xi / 14.0).sqrt();
            assert!(
                (got - expect).abs() < 1e-6,
                "φ({xi}) = {got}, closed form {expect}"
            );
        }
    }

    #[test]
    fn steady_beta0_residuals_and_slope() {
        let c = steady_family(&steady_params_beta0()).unwrap();
        assert!(c.max_residual(200).unwrap() < 1e-7);
        // h slope at ξ = 1 is α/φ(1)² = 14, and h matches 14 ln ξ.
        let slope = potential_slope(&c.profile.phi, 1.0, 1.0).unwrap();
        assert!((slope - 14.0).abs() < 1e-6);
        for xi in [1.0, 2.0, 5.0, 10.0] {
            let h = c.profile.h.eval(xi).value;
            assert!(
                (h - 14.0 * xi.ln()).abs() < 1e-6,
                "h({xi}) = {h}, want {}",
                14.0 * xi.ln()
            );
        }
    }

    #[test]
    fn steady_beta0_warp_times_phi_constant() {
        let c = steady_family(&steady_params_beta0()).unwrap();
        for xi in uniform_samples((1.0, 10.0), 50) {
            let prod = c.profile.phi.eval(xi).value * c.profile.f.eval(xi).value;
            assert!((prod - 1.0).abs() < 1e-12, "f·φ = {prod} at ξ = {xi}");
            let h1 = c.profile.h.eval(xi).d1;
            let phi_sq = c.profile.phi.eval(xi).value.powi(2);
            assert!((h1 * phi_sq - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn printed_coefficient_variant_fails_residuals() {
        // The (n−1)(n+m+2) version of the β = 0 closed form does not solve
        // the φ-equation; its residual at ξ = 1 must exceed 1e-2.
        let (n, m, alpha) = (3usize, 2usize, 1.0f64);
        let bad_coef = (n as f64 - 1.0) * ((n + m) as f64 + 2.0); // 14, not 28
        let phi = Profile2Jet::from_dual((0.1, f64::INFINITY), move |xi| {
            (xi * (2.0 * alpha / bad_coef)).sqrt()
        });
        let f = warp_from_phi(&phi, 0.0, (0.1, 20.0));
        let h = potential_from_slope(&phi.restricted((0.1, 20.0)), alpha, (0.1, 20.0)).unwrap();
        let p = InvariantProfile::new(
            vec![1.0, 0.0, 0.0],
            Signature::euclidean(3),
            phi.restricted((0.1, 20.0)),
            f,
            h,
            m,
            0.0,
            0.0,
        )
        .unwrap();
        let r = ode_residuals(&p, 1.0).unwrap();
        assert!(
            r.max_abs() > 1e-2,
            "printed-coefficient profile unexpectedly passes: {:?}",
            r
        );
    }

    #[test]
    fn steady_beta_positive_quadrature_identity() {
        let params = SteadyFamilyParams {
            beta: 0.1,
            phi0: 1.0,
            domain: (0.0, 2.0),
            nu: 0.0,
            ..steady_params_beta0()
        };
        let c = steady_family(&params).unwrap();
        assert!(c.max_residual(200).unwrap() < 1e-7);
        for xi in uniform_samples(c.profile.domain(), 40) {
            let gap = steady_quadrature_identity(&params, &c.profile.phi, xi).unwrap();
            assert!(
                gap.abs() < 1e-6,
                "quadrature identity off by {gap:.3e} at ξ = {xi}"
            );
        }
    }

    #[test]
    fn steady_monotone_potential() {
        for alpha in [1.0, -0.5] {
            let params = SteadyFamilyParams {
                alpha_const: alpha,
                beta: 0.05,
                phi0: 1.0,
                domain: (0.0, 2.0),
                ..steady_params_beta0()
            };
            let c = steady_family(&params).unwrap();
            let mut sign = 0.0f64;
            for xi in uniform_samples(c.profile.domain(), 64) {
                let s = c.profile.h.eval(xi).d1.signum();
                if sign == 0.0 {
                    sign = s;
                } else {
                    assert_eq!(s, sign, "h′ changed sign at ξ = {xi}");
                }
            }
            assert_eq!(sign, alpha.signum());
        }
    }

    #[test]
    fn steady_truncates_when_phi_hits_zero() {
        // α < 0 drives φ² = φ0² + 2α(ξ−ξ₀)/A to zero at finite ξ.
        let params = SteadyFamilyParams {
            n: 3,
            m: 2,
            alpha_const: -1.0,
            beta: 0.0,
            c: 0.0,
            nu: 0.0,
            phi0: 0.3,
            domain: (0.0, 5.0),
        };
        let c = steady_family(&params).unwrap();
        let t = c.truncation.as_ref().expect("must truncate");
        // φ = sqrt(0.09 − 2ξ/28) hits 0 at ξ = 0.09·14 = 1.26
        assert!(t.achieved.1 < 1.3, "achieved {:?}", t.achieved);
        assert!(t.achieved.1 > 1.0);
        assert!(c.max_residual(50).unwrap() < 1e-7);
    }

    #[test]
    fn steady_truncates_on_blowup() {
        // β < 0 makes φ′ grow superlinearly in φ; φ reaches the ceiling at
        // finite ξ and the domain is truncated there.
        let params = SteadyFamilyParams {
            n: 3,
            m: 2,
            alpha_const: 1.0,
            beta: -0.5,
            c: 0.0,
            nu: 0.0,
            phi0: 1.0,
            domain: (0.0, 10.0),
        };
        let c = steady_family(&params).unwrap();
        let t = c.truncation.as_ref().expect("blowup must truncate");
        assert!(t.achieved.1 < 3.0, "achieved {:?}", t.achieved);
        assert!(c.max_residual(50).unwrap() < 1e-7);
        // φ is still monotone increasing on the surviving domain.
        let xs = uniform_samples(c.profile.domain(), 32);
        for w in xs.windows(2) {
            assert!(c.profile.phi.eval(w[1]).value > c.profile.phi.eval(w[0]).value);
        }
    }

    #[test]
    fn steady_rejects_bad_params() {
        let mut p = steady_params_beta0();
        p.alpha_const = 0.0;
        assert!(steady_family(&p).is_err());
        let mut p = steady_params_beta0();
        p.phi0 = -1.0;
        assert!(steady_family(&p).is_err());
        let mut p = steady_params_beta0();
        p.n = 2;
        p.m = 0;
        assert!(steady_family(&p).is_err());
    }

    #[test]
    fn riccati_residual_examples() {
        // Constant z = 1/2 against φ = e^{3ξ²/4} with (n, m) = (2, 3).
        let phi = Profile2Jet::gaussian_exp(1.0, 0.75);
        let z = Profile2Jet::constant(0.5);
        for xi in [-1.0, 0.0, 0.6, 2.0] {
            let r = riccati_residual(&z, &phi, 2, 3, xi).unwrap();
            assert!(r.abs() < 1e-12, "residual {r} at ξ = {xi}");
        }
        // φ ≡ 1: z ≡ 0 solves, z ≡ 1 leaves exactly z² = 1.
        let one = Profile2Jet::constant(1.0);
        assert_eq!(
            riccati_residual(&Profile2Jet::constant(0.0), &one, 3, 2, 0.3).unwrap(),
            0.0
        );
        assert_eq!(
            riccati_residual(&Profile2Jet::constant(1.0), &one, 3, 2, 0.3).unwrap(),
            1.0
        );
    }

    #[test]
    fn riccati_flat_phi_closed_form() {
        // φ ≡ 1, z_p ≡ 0, C = 1: f = (ξ − ξ₀ + 2C/(m+1))^{2/(m+1)}.
        let p = RiccatiParams {
            n: 3,
            m: 2,
            phi: Profile2Jet::constant(1.0),
            z_p: Profile2Jet::constant(0.0),
            c: Some(1.0),
            domain: (0.0, 2.0),
        };
        let c = riccati_family(&p).unwrap();
        assert!(c.truncation.is_none());
        for xi in uniform_samples((0.0, 2.0), 30) {
            let expect = (xi + 2.0 / 3.0).powf(2.0 / 3.0);
            let got = c.profile.f.eval(xi).value;
            assert!(
                (got - expect).abs() < 1e-8,
                "f({xi}) = {got}, want {expect}"
            );
        }
        assert!(c.max_residual(100).unwrap() < 1e-7);
    }

    #[test]
    fn riccati_gaussian_phi_both_branches() {
        // Particular branch reproduces f ∝ e^{ξ/2}; general branch stays a
        // solution of the reduced system.
        let phi = Profile2Jet::gaussian_exp(1.0, 0.75);
        let particular = RiccatiParams {
            n: 2,
            m: 3,
            phi: phi.clone(),
            z_p: Profile2Jet::constant(0.5),
            c: None,
            domain: (0.0, 2.0),
        };
        let cp = riccati_family(&particular).unwrap();
        let f0 = cp.profile.f.eval(0.0).value;
        for xi in uniform_samples((0.0, 2.0), 25) {
            let got = cp.profile.f.eval(xi).value;
            let expect = f0 * (xi / 2.0).exp();
            assert!(
                (got - expect).abs() < 1e-9 * expect.max(1.0),
                "particular branch f({xi}) = {got}"
            );
        }
        assert!(cp.max_residual(100).unwrap() < 1e-7);

        let general = RiccatiParams {
            c: Some(1.0),
            ..particular
        };
        let cg = riccati_family(&general).unwrap();
        assert!(cg.max_residual(100).unwrap() < 1e-7);
        // The recovered z of the general branch solves the Riccati equation.
        let z = recovered_z(&cg.profile.f, &cg.profile.phi, 2, 3);
        for xi in uniform_samples((0.0, 2.0), 25) {
            let r = riccati_residual(&z, &cg.profile.phi, 2, 3, xi).unwrap();
            assert!(r.abs() < 1e-7, "recovered z residual {r:.3e} at ξ = {xi}");
        }
    }

    #[test]
    fn riccati_rejects_bad_particular_solution() {
        let p = RiccatiParams {
            n: 3,
            m: 2,
            phi: Profile2Jet::constant(1.0),
            z_p: Profile2Jet::constant(1.0), // residual 1
            c: Some(1.0),
            domain: (0.0, 1.0),
        };
        assert!(matches!(riccati_family(&p), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn riccati_truncates_on_nonpositive_integral() {
        // C < 0 makes J start negative; the domain is trimmed to where
        // J > 0.
        let p = RiccatiParams {
            n: 3,
            m: 2,
            phi: Profile2Jet::constant(1.0),
            z_p: Profile2Jet::constant(0.0),
            c: Some(-0.3), // J = ξ − 0.2
            domain: (0.0, 2.0),
        };
        let c = riccati_family(&p).unwrap();
        let t = c.truncation.as_ref().expect("expected truncation");
        assert!(
            t.achieved.0 > 0.19 && t.achieved.0 < 0.25,
            "{:?}",
            t.achieved
        );
        assert!(c.max_residual(50).unwrap() < 1e-7);
    }

    #[test]
    fn lightlike_quadrature_matches_closed_form() {
        // φ = 1/(1+ξ²): h = α(ξ + 2ξ³/3 + ξ⁵/5) anchored at the left endpoint.
        let p = LightlikeParams {
            n: 3,
            m: 2,
            alpha_const: 1.0,
            domain: (-2.0, 2.0),
        };
        let phi = Profile2Jet::reciprocal_quadratic(1.0, 1.0);
        let f = Profile2Jet::exponential(1.0, 0.5);
        let c = lightlike_family(&p, &phi, &f).unwrap();
        let anti = |x: f64| x + 2.0 * x.powi(3) / 3.0 + x.powi(5) / 5.0;
        for xi in uniform_samples((-2.0, 2.0), 100) {
            let got = c.profile.h.eval(xi).value;
            let expect = anti(xi) - anti(-2.0);
            assert!(
                (got - expect).abs() < 1e-8,
                "h({xi}) = {got}, closed form {expect}"
            );
        }
        assert!(c.max_residual(100).unwrap() < 1e-12);
    }

    #[test]
    fn lightlike_flat_phi_linear_potential() {
        let p = LightlikeParams {
            n: 2,
            m: 1,
            alpha_const: 2.0,
            domain: (0.0, 3.0),
        };
        let c =
            lightlike_family(&p, &Profile2Jet::constant(1.0), &Profile2Jet::constant(1.0)).unwrap();
        for xi in [0.0, 1.0, 2.5] {
            assert!((c.profile.h.eval(xi).value - 2.0 * xi).abs() < 1e-10);
        }
    }

    #[test]
    fn lightlike_zero_alpha_gives_constant_potential() {
        let p = LightlikeParams {
            n: 3,
            m: 2,
            alpha_const: 0.0,
            domain: (-1.0, 1.0),
        };
        let c = lightlike_family(
            &p,
            &Profile2Jet::gaussian_exp(1.0, 0.2),
            &Profile2Jet::constant(2.0),
        )
        .unwrap();
        for xi in uniform_samples((-1.0, 1.0), 20) {
            assert!(c.profile.h.eval(xi).value.abs() < 1e-12);
            assert_eq!(c.profile.h.eval(xi).d1, 0.0);
        }
    }

    #[test]
    fn almost_soliton_rho_examples() {
        let f2 = Profile2Jet::constant(2.0);
        assert_eq!(almost_soliton_rho(&f2, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(almost_soliton_rho(&f2, 8.0, -3.0).unwrap(), 2.0);
        let fe = Profile2Jet::exponential(1.0, 0.5);
        let got = almost_soliton_rho(&fe, 1.0, 2.0).unwrap();
        assert!((got - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn almost_soliton_rho_closes_null_constraint() {
        // With ρ(ξ) = λ_F/f², the null constraint residual vanishes pointwise.
        let f = Profile2Jet::polynomial(&[2.0, 0.5]);
        for xi in [0.0, 0.5, 1.0] {
            let rho = almost_soliton_rho(&f, 3.0, xi).unwrap();
            let fv = f.eval(xi).value;
            assert!((rho - 3.0 / (fv * fv)).abs() < 1e-15);
        }
    }

    #[test]
    fn constructor_outputs_lift_and_pass_sweep() {
        let steady = steady_family(&steady_params_beta0()).unwrap();
        let bbox3 = [(2.0, 8.0), (-1.0, 1.0), (-1.0, 1.0)];
        let d = lift_to_field(&steady.profile, &bbox3).unwrap();
        let rep = residual_sweep(&d, &lattice(&bbox3, 10), 1e-7, "dual").unwrap();
        assert!(
            rep.pass,
            "steady lift max {:?}",
            rep.stats.map(|s| s.max_abs)
        );

        let riccati = riccati_family(&RiccatiParams {
            n: 3,
            m: 2,
            phi: Profile2Jet::constant(1.0),
            z_p: Profile2Jet::constant(0.0),
            c: Some(1.0),
            domain: (-4.0, 4.0),
        })
        .unwrap();
        let bbox = [(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)];
        let d = lift_to_field(&riccati.profile, &bbox).unwrap();
        let rep = residual_sweep(&d, &lattice(&bbox, 10), 1e-7, "dual").unwrap();
        assert!(
            rep.pass,
            "riccati lift max {:?}",
            rep.stats.map(|s| s.max_abs)
        );

        let riccati_gauss = riccati_family(&RiccatiParams {
            n: 2,
            m: 3,
            phi: Profile2Jet::gaussian_exp(1.0, 0.75),
            z_p: Profile2Jet::constant(0.5),
            c: Some(1.0),
            domain: (0.0, 2.0),
        })
        .unwrap();
        let bbox2 = [(0.1, 1.9), (-1.0, 1.0)];
        let d = lift_to_field(&riccati_gauss.profile, &bbox2).unwrap();
        let rep = residual_sweep(&d, &lattice(&bbox2, 32), 1e-7, "dual").unwrap();
        assert!(
            rep.pass,
            "gaussian riccati lift max {:?}",
            rep.stats.map(|s| s.max_abs)
        );
    }

    #[test]
    fn rescaled_potential_breaks_steady_profile() {
        // h ↦ 1.01·h is not a symmetry when h′ ≠ 0 and the direction is
        // non-null: the sweep must notice (the check is not vacuous).
        let c = steady_family(&steady_params_beta0()).unwrap();
        let h_scaled = {
            let inner = c.profile.h.clone();
            Profile2Jet::analytic(inner.domain(), move |xi| {
                let j = inner.eval(xi);
                Jet1 {
                    value: 1.01 * j.value,
                    d1: 1.01 * j.d1,
                    d2: 1.01 * j.d2,
                }
            })
        };
        let perturbed = InvariantProfile::new(
            c.profile.alpha().to_vec(),
            c.profile.sig().clone(),
            c.profile.phi.clone(),
            c.profile.f.clone(),
            h_scaled,
            c.profile.m,
            0.0,
            0.0,
        )
        .unwrap();
        let bbox = [(2.0, 8.0), (-1.0, 1.0), (-1.0, 1.0)];
        let d = lift_to_field(&perturbed, &bbox).unwrap();
        let rep = residual_sweep(&d, &lattice(&bbox, 10), 1e-7, "dual").unwrap();
        assert!(!rep.pass);
        assert!(
            rep.max_abs() > 1e-4,
            "1% potential rescaling only moved residuals to {:.3e}",
            rep.max_abs()
        );
    }

    #[test]
    fn constructed_json_shape() {
        let c = steady_family(&steady_params_beta0()).unwrap();
        let s = c.to_json(json!({"beta": 0.0}), 16);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["family"], "steady");
        assert_eq!(v["samples"].as_array().unwrap().len(), 16);
        assert!(v["samples"][0].get("xi").is_some());
        assert!(v["samples"][0].get("phi").is_some());
        assert!(v["domain"].is_array());
    }
}
