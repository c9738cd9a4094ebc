//! Differential geometry of the conformal metric ḡ = g/φ² on
//! pseudo-Euclidean ℝⁿ, g = diag(ε₁, …, εₙ).
//!
//! The signature is carried explicitly through every contraction; silent
//! Euclidean defaults are a correctness hazard in this setting.

use crate::error::{Error, Result};
use crate::fields::{Jet2, ScalarField2Jet};
use crate::mat::{Christoffel, SquareMatrix};

/// Queries with φ below this floor are rejected as positivity violations
/// rather than returning huge values.
pub const PHI_FLOOR: f64 = 1e-12;

/// The diagonal ±1 entries of the pseudo-Euclidean metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    eps: Vec<i8>,
}

impl Signature {
    pub fn new(eps: Vec<i8>) -> Result<Self> {
        if eps.len() < 2 {
            return Err(Error::BadSignature(format!(
                "need n ≥ 2, got n = {}",
                eps.len()
            )));
        }
        if let Some(bad) = eps.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::BadSignature(format!(
                "entries must be ±1, got {bad}"
            )));
        }
        Ok(Self { eps })
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new(vec![1; n]).expect("n >= 2")
    }

    /// ε₁ = −1, εₖ = 1 for k ≥ 2.
    pub fn lorentzian(n: usize) -> Self {
        let mut eps = vec![1; n];
        eps[0] = -1;
        Self::new(eps).expect("n >= 2")
    }

    pub fn n(&self) -> usize {
        self.eps.len()
    }

    /// εₖ as a float factor.
    pub fn eps(&self, k: usize) -> f64 {
        self.eps[k] as f64
    }

    pub fn entries(&self) -> &[i8] {
        &self.eps
    }
}

/// (ℝⁿ, ḡ) with ḡ = g/φ², φ > 0 wherever evaluated.
#[derive(Debug, Clone)]
pub struct ConformalBase {
    pub sig: Signature,
    pub phi: ScalarField2Jet,
}

impl ConformalBase {
    pub fn new(sig: Signature, phi: ScalarField2Jet) -> Result<Self> {
        if phi.domain_dim() != sig.n() {
            return Err(Error::DimensionMismatch {
                expected: sig.n(),
                got: phi.domain_dim(),
            });
        }
        Ok(Self { sig, phi })
    }

    pub fn n(&self) -> usize {
        self.sig.n()
    }

    /// Evaluate φ with the positivity floor and guard enforced.
    pub fn phi_jet(&self, x: &[f64]) -> Result<Jet2> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        if !self.phi.in_domain(x) {
            return Err(Error::NonPositive {
                what: "phi (outside domain guard)",
                value: f64::NAN,
                at: format!("{x:?}"),
            });
        }
        let j = self.phi.eval(x);
        if !(j.value >= PHI_FLOOR) {
            return Err(Error::NonPositive {
                what: "phi",
                value: j.value,
                at: format!("{x:?}"),
            });
        }
        Ok(j)
    }
}

fn field_jet(u: &ScalarField2Jet, what: &'static str, x: &[f64]) -> Result<Jet2> {
    if !u.in_domain(x) {
        return Err(Error::NonPositive {
            what,
            value: f64::NAN,
            at: format!("{x:?} (outside domain guard)"),
        });
    }
    Ok(u.eval(x))
}

/// Christoffel symbols Γ^k_{ij} of ḡ at `x`:
/// Γ^k_{ij} = 0 for distinct i, j, k; Γ^i_{ij} = −φ_{,j}/φ;
/// Γ^k_{ii} = εᵢεₖ φ_{,k}/φ (k ≠ i); Γ^i_{ii} = −φ_{,i}/φ.
pub fn christoffel(base: &ConformalBase, x: &[f64]) -> Result<Christoffel> {
    let n = base.n();
    let phi = base.phi_jet(x)?;
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                // Γ^k_{ij} = −(δ_{ki}φ_{,j} + δ_{kj}φ_{,i} − εᵢεₖδ_{ij}φ_{,k})/φ
                let mut v = 0.0;
                if k == i {
                    v -= phi.grad[j];
                }
                if k == j {
                    v -= phi.grad[i];
                }
                if i == j {
                    v += base.sig.eps(i) * base.sig.eps(k) * phi.grad[k];
                }
                gamma.set(k, i, j, v / phi.value);
            }
        }
    }
    Ok(gamma)
}

/// Covariant Hessian of `h` in ḡ by the closed-form conformal expression:
/// off-diagonal h_{,ij} + (φ_{,i}h_{,j} + φ_{,j}h_{,i})/φ, diagonal
/// h_{,ii} + 2φ_{,i}h_{,i}/φ − εᵢ Σₖ εₖ φ_{,k}h_{,k}/φ.
pub fn conformal_hessian(
    base: &ConformalBase,
    h: &ScalarField2Jet,
    x: &[f64],
) -> Result<SquareMatrix> {
    let n = base.n();
    let phi = base.phi_jet(x)?;
    let hj = field_jet(h, "field h", x)?;
    let trace_term: f64 = (0..n)
        .map(|k| base.sig.eps(k) * phi.grad[k] * hj.grad[k])
        .sum::<f64>()
        / phi.value;
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                out[(i, i)] = hj.hess[(i, i)] + 2.0 * phi.grad[i] * hj.grad[i] / phi.value
                    - base.sig.eps(i) * trace_term;
            } else {
                out[(i, j)] = hj.hess[(i, j)]
                    + (phi.grad[i] * hj.grad[j] + phi.grad[j] * hj.grad[i]) / phi.value;
            }
        }
    }
    Ok(out)
}

/// Covariant Hessian assembled the generic way,
/// Hess_ij = h_{,ij} − Σₖ Γ^k_{ij} h_{,k}.
///
/// Independent oracle for [`conformal_hessian`]; the two must agree to
/// 1e-9 with the dual backend.
pub fn covariant_hessian_generic(
    base: &ConformalBase,
    h: &ScalarField2Jet,
    x: &[f64],
) -> Result<SquareMatrix> {
    let n = base.n();
    let gamma = christoffel(base, x)?;
    let hj = field_jet(h, "field h", x)?;
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut v = hj.hess[(i, j)];
            for k in 0..n {
                v -= gamma.get(k, i, j) * hj.grad[k];
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Scalar curvature of ḡ:
/// S = (n−1)(2φ Δ_g φ − n|∇_g φ|²), with Δ_g φ = Σ εₖ φ_{,kk} and
/// |∇_g φ|² = Σ εₖ φ_{,k}².
pub fn conformal_scalar_curvature(base: &ConformalBase, x: &[f64]) -> Result<f64> {
    let n = base.n();
    let phi = base.phi_jet(x)?;
    let lap: f64 = (0..n).map(|k| base.sig.eps(k) * phi.hess[(k, k)]).sum();
    let grad_sq: f64 = (0..n)
        .map(|k| base.sig.eps(k) * phi.grad[k] * phi.grad[k])
        .sum();
    Ok((n as f64 - 1.0) * (2.0 * phi.value * lap - n as f64 * grad_sq))
}

/// Laplace–Beltrami of `u` in ḡ:
/// Δ_ḡ u = φ² Σ εₖ u_{,kk} − (n−2) φ Σ εₖ φ_{,k} u_{,k}.
pub fn conformal_laplacian(base: &ConformalBase, u: &ScalarField2Jet, x: &[f64]) -> Result<f64> {
    let n = base.n();
    let phi = base.phi_jet(x)?;
    let uj = field_jet(u, "field u", x)?;
    let lap: f64 = (0..n).map(|k| base.sig.eps(k) * uj.hess[(k, k)]).sum();
    let mixed: f64 = (0..n)
        .map(|k| base.sig.eps(k) * phi.grad[k] * uj.grad[k])
        .sum();
    Ok(phi.value * phi.value * lap - (n as f64 - 2.0) * phi.value * mixed)
}

/// |∇_ḡ u|² = φ² Σ εₖ u_{,k}².
pub fn conformal_grad_sq(base: &ConformalBase, u: &ScalarField2Jet, x: &[f64]) -> Result<f64> {
    let n = base.n();
    let phi = base.phi_jet(x)?;
    let uj = field_jet(u, "field u", x)?;
    let g: f64 = (0..n)
        .map(|k| base.sig.eps(k) * uj.grad[k] * uj.grad[k])
        .sum();
    Ok(phi.value * phi.value * g)
}
