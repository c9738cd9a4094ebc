//! Warped-product curvature and the full soliton residual system, plus the
//! structure diagnostics for separable potentials.
//!
//! Residuals are reported as LHS − RHS of the governing equations verbatim,
//! with no normalization, so tolerances compare like-for-like across
//! configurations.

use crate::error::{Error, Result};
use crate::fields::ScalarField2Jet;
use crate::geometry::{
    conformal_grad_sq, conformal_hessian, conformal_laplacian, conformal_scalar_curvature,
    ConformalBase, PHI_FLOOR,
};
use crate::mat::SquareMatrix;
use rayon::prelude::*;
use serde_json::json;

/// Full geometric configuration of a candidate warped-product soliton
/// (ℝⁿ, ḡ) ×_f F^m with fiber scalar curvature λ_F and soliton constant ρ.
#[derive(Debug, Clone)]
pub struct WarpedSolitonData {
    pub base: ConformalBase,
    /// Warping function, positive wherever evaluated.
    pub f: ScalarField2Jet,
    /// Potential function.
    pub h: ScalarField2Jet,
    /// Fiber dimension, ≥ 1.
    pub m: usize,
    pub lambda_f: f64,
    pub rho: f64,
}

impl WarpedSolitonData {
    pub fn new(
        base: ConformalBase,
        f: ScalarField2Jet,
        h: ScalarField2Jet,
        m: usize,
        lambda_f: f64,
        rho: f64,
    ) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParam("fiber dimension m must be ≥ 1".into()));
        }
        let n = base.n();
        for (name, field) in [("f", &f), ("h", &h)] {
            if field.domain_dim() != n {
                return Err(Error::InvalidParam(format!(
                    "field {name} has dimension {}, base has {n}",
                    field.domain_dim()
                )));
            }
        }
        Ok(Self {
            base,
            f,
            h,
            m,
            lambda_f,
            rho,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    fn f_value(&self, x: &[f64]) -> Result<f64> {
        if !self.f.in_domain(x) {
            return Err(Error::NonPositive {
                what: "f (outside domain guard)",
                value: f64::NAN,
                at: format!("{x:?}"),
            });
        }
        let v = self.f.eval(x).value;
        if !(v >= PHI_FLOOR) {
            return Err(Error::NonPositive {
                what: "f",
                value: v,
                at: format!("{x:?}"),
            });
        }
        Ok(v)
    }
}

/// Scalar curvature of the warped metric:
/// S̃ = S_ḡ + λ_F/f² − (2m/f) Δ_ḡ f − m(m−1)|∇_ḡ f|²/f².
pub fn warped_scalar_curvature(d: &WarpedSolitonData, x: &[f64]) -> Result<f64> {
    let fv = d.f_value(x)?;
    let s_base = conformal_scalar_curvature(&d.base, x)?;
    let lap_f = conformal_laplacian(&d.base, &d.f, x)?;
    let grad_f_sq = conformal_grad_sq(&d.base, &d.f, x)?;
    let m = d.m as f64;
    Ok(s_base + d.lambda_f / (fv * fv)
        - (2.0 * m / fv) * lap_f
        - m * (m - 1.0) * grad_f_sq / (fv * fv))
}

/// Pointwise soliton residuals.
///
/// `offdiag[(i,j)]` (i ≠ j) is the off-diagonal Hessian equation
/// Hess_ḡ(h)_ij = 0; `diag[i]` is (S̃ − ρ) εᵢ/φ² − Hess_ḡ(h)_ii; `fiber` is
/// (S̃ − ρ) − (φ²/f) Σ εₖ f_{,k} h_{,k}. All three vanish identically iff
/// the configuration is a gradient Yamabe soliton.
#[derive(Debug, Clone)]
pub struct SolitonResiduals {
    pub offdiag: SquareMatrix,
    pub diag: Vec<f64>,
    pub fiber: f64,
}

impl SolitonResiduals {
    /// Max |entry| per equation group: (offdiag, diag, fiber).
    pub fn magnitudes(&self) -> [f64; 3] {
        let diag_max = self.diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        [self.offdiag.max_abs_offdiag(), diag_max, self.fiber.abs()]
    }

    pub fn max_abs(&self) -> f64 {
        let m = self.magnitudes();
        m[0].max(m[1]).max(m[2])
    }
}

pub fn soliton_residuals(d: &WarpedSolitonData, x: &[f64]) -> Result<SolitonResiduals> {
    let n = d.n();
    let phi = d.base.phi_jet(x)?;
    let fv = d.f_value(x)?;
    let fj = d.f.eval(x);
    let hj = d.h.eval(x);
    let hess_h = conformal_hessian(&d.base, &d.h, x)?;
    let s_tilde = warped_scalar_curvature(d, x)?;

    let mut offdiag = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offdiag[(i, j)] = hess_h[(i, j)];
            }
        }
    }

    let deficit = s_tilde - d.rho;
    let diag: Vec<f64> = (0..n)
        .map(|i| deficit * d.base.sig.eps(i) / (phi.value * phi.value) - hess_h[(i, i)])
        .collect();

    let mixed: f64 = (0..n)
        .map(|k| d.base.sig.eps(k) * fj.grad[k] * hj.grad[k])
        .sum();
    let fiber = deficit - (phi.value * phi.value / fv) * mixed;

    Ok(SolitonResiduals {
        offdiag,
        diag,
        fiber,
    })
}

/// Per-equation statistics over a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Root mean square of the per-point magnitudes.
    pub l2: f64,
}

/// Run metadata carried alongside the numbers.
#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub backend: String,
    pub n: usize,
    pub m: usize,
    pub lambda_f: f64,
    pub rho: f64,
    /// Base dimension below the regime the structure theory assumes
    /// (n = 2 is admitted but flagged).
    pub low_dimension_warning: bool,
    /// Original Σ εₖαₖ² when the direction had to be rescaled.
    pub direction_rescaled: Option<f64>,
}

impl ReportMeta {
    pub fn for_data(d: &WarpedSolitonData, backend: &str) -> Self {
        Self {
            backend: backend.to_string(),
            n: d.n(),
            m: d.m,
            lambda_f: d.lambda_f,
            rho: d.rho,
            low_dimension_warning: d.n() < 3,
            direction_rescaled: None,
        }
    }
}

/// Aggregated residual statistics over a sample grid with pass/fail.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Retained sample points (excluded ones are only counted).
    pub grid: Vec<Vec<f64>>,
    /// Per retained point: (|eq offdiag|, |eq diag|, |eq fiber|) maxima.
    pub per_point: Vec<[f64; 3]>,
    /// Stats in the same order.
    pub stats: [EqStats; 3],
    pub excluded: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub meta: ReportMeta,
}

impl ResidualReport {
    pub fn max_abs(&self) -> f64 {
        self.stats.iter().fold(0.0f64, |a, s| a.max(s.max_abs))
    }

    /// JSON document with the stable key set
    /// grid_size/eq19_max/eq20_max/eq21_max/means/l2s/tol/pass.
    pub fn to_json(&self) -> String {
        let v = json!({
            "grid_size": self.grid.len(),
            "eq19_max": self.stats[0].max_abs,
            "eq20_max": self.stats[1].max_abs,
            "eq21_max": self.stats[2].max_abs,
            "means": [self.stats[0].mean_abs, self.stats[1].mean_abs, self.stats[2].mean_abs],
            "l2s": [self.stats[0].l2, self.stats[1].l2, self.stats[2].l2],
            "tol": self.tolerance,
            "pass": self.pass,
            "excluded": self.excluded,
            "metadata": {
                "backend": self.meta.backend,
                "n": self.meta.n,
                "m": self.meta.m,
                "lambda_f": self.meta.lambda_f,
                "rho": self.meta.rho,
                "low_dimension_warning": self.meta.low_dimension_warning,
                "direction_rescaled": self.meta.direction_rescaled,
            },
        });
        serde_json::to_string_pretty(&v).expect("report serialization")
    }

    /// CSV body: one row per retained point with coordinates and the three
    /// residual magnitudes. The header carries no run information.
    pub fn to_csv(&self) -> String {
        let n = self.meta.n;
        let mut out = String::new();
        for i in 1..=n {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("eq19,eq20,eq21\n");
        for (pt, mags) in self.grid.iter().zip(&self.per_point) {
            for c in pt {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&format!("{},{},{}\n", mags[0], mags[1], mags[2]));
        }
        out
    }
}

/// Uniform lattice over a box, `per_axis` points per axis, capped at 10⁵
/// total points (the per-axis count is reduced if the cap would be hit).
pub fn lattice(bbox: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    const CAP: usize = 100_000;
    let n = bbox.len();
    let mut k = per_axis.max(1);
    while k > 1 && (k as f64).powi(n as i32) > CAP as f64 {
        k -= 1;
    }
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<f64> = (0..n)
            .map(|d| {
                let (lo, hi) = bbox[d];
                if k == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * idx[d] as f64 / (k - 1) as f64
                }
            })
            .collect();
        points.push(p);
        let mut d = 0;
        loop {
            if d == n {
                return points;
            }
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Evaluate [`soliton_residuals`] over a grid and aggregate.
///
/// Points where a domain guard fails or φ/f sits within 1e-12 of zero are
/// excluded and counted, not treated as errors. Grid evaluation runs in
/// parallel; the reduction is ordered, so reports are deterministic.
pub fn residual_sweep(
    d: &WarpedSolitonData,
    grid: &[Vec<f64>],
    tol: f64,
    backend: &str,
) -> Result<ResidualReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let evaluated: Vec<(Vec<f64>, Option<[f64; 3]>)> = grid
        .par_iter()
        .map(|x| {
            let usable = d.base.phi.in_domain(x)
                && d.f.in_domain(x)
                && d.h.in_domain(x)
                && d.base.phi.eval(x).value >= PHI_FLOOR
                && d.f.eval(x).value >= PHI_FLOOR;
            if !usable {
                return (x.clone(), None);
            }
            match soliton_residuals(d, x) {
                Ok(r) => (x.clone(), Some(r.magnitudes())),
                Err(_) => (x.clone(), None),
            }
        })
        .collect();

    let excluded = evaluated.iter().filter(|(_, m)| m.is_none()).count();
    let mut retained_grid = Vec::with_capacity(grid.len() - excluded);
    let mut per_point = Vec::with_capacity(grid.len() - excluded);
    for (x, m) in evaluated {
        if let Some(mags) = m {
            retained_grid.push(x);
            per_point.push(mags);
        }
    }
    if retained_grid.is_empty() {
        return Err(Error::AllPointsExcluded { excluded });
    }

    let count = per_point.len() as f64;
    let stats: [EqStats; 3] = std::array::from_fn(|eq| {
        let mut max_abs = 0.0f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for m in &per_point {
            max_abs = max_abs.max(m[eq]);
            sum += m[eq];
            sum_sq += m[eq] * m[eq];
        }
        EqStats {
            max_abs,
            mean_abs: sum / count,
            l2: (sum_sq / count).sqrt(),
        }
    });
    let pass = stats.iter().all(|s| s.max_abs <= tol);

    Ok(ResidualReport {
        grid: retained_grid,
        per_point,
        stats,
        excluded,
        tolerance: tol,
        pass,
        meta: ReportMeta::for_data(d, backend),
    })
}

/// Outcome of the separable-potential structure dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureCase {
    /// Warping constant and fiber part of h constant: a product of a
    /// trivial soliton fiber with a gradient soliton base.
    ProductFiberTrivial,
    /// Warping constant, fiber part nonconstant: product of two gradient
    /// solitons.
    ProductBothGradient,
    /// Warping nonconstant, fiber part constant: genuinely warped, with an
    /// almost-soliton base and trivial soliton fiber.
    WarpedFiberTrivial,
    /// Warping nonconstant with nonconstant fiber part is inconsistent with
    /// the structure dichotomy for separable potentials.
    Inconsistent,
}

pub fn classify_structure(f_is_constant: bool, h_fiber_part_constant: bool) -> StructureCase {
    match (f_is_constant, h_fiber_part_constant) {
        (true, true) => StructureCase::ProductFiberTrivial,
        (true, false) => StructureCase::ProductBothGradient,
        (false, true) => StructureCase::WarpedFiberTrivial,
        (false, false) => StructureCase::Inconsistent,
    }
}

/// A grid point and index pair witnessing a nonzero mixed base Hessian of
/// the warping function.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedHessianWitness {
    pub point: Vec<f64>,
    pub pair: (usize, usize),
    pub value: f64,
}

const MIXED_HESSIAN_THRESHOLD: f64 = 1e-8;

/// Scan `grid` for the first point and orthogonal pair (i, j), i ≠ j, where
/// |Hess_ḡ(f)_ij| exceeds 1e-8. `None` means the hypothesis that the
/// potential must depend only on the base is not witnessed on this grid.
pub fn mixed_hessian_hypothesis(
    f: &ScalarField2Jet,
    base: &ConformalBase,
    grid: &[Vec<f64>],
) -> Option<MixedHessianWitness> {
    for x in grid {
        let Ok(hess) = conformal_hessian(base, f, x) else {
            continue;
        };
        let n = hess.n();
        for i in 0..n {
            for j in (i + 1)..n {
                if hess[(i, j)].abs() > MIXED_HESSIAN_THRESHOLD {
                    return Some(MixedHessianWitness {
                        point: x.clone(),
                        pair: (i, j),
                        value: hess[(i, j)],
                    });
                }
            }
        }
    }
    None
}
