//! Shared numerical kernels: adaptive embedded Runge–Kutta integration with
//! event detection, adaptive Simpson quadrature, and bracketed root finding.
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! outputs, which the reporting layer relies on.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Tolerances and step control for [`integrate_ivp`].
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size (defaults to the interval length).
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
        }
    }
}

/// Why the integrator stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    ReachedEnd,
    /// The event predicate fired; the crossing is localized to 1e-10 in ξ.
    Event {
        xi: f64,
    },
}

/// Accepted-step samples of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub xi: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
}

const EVENT_LOCALIZATION: f64 = 1e-10;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th order weights (same as the last A row) and the embedded 4th order weights.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One fixed Dormand–Prince step of size `h` from (`t`, `y`).
///
/// Returns the 5th-order solution and the embedded error estimate.
fn dopri_step<R>(rhs: &R, t: f64, y: &[f64], h: f64) -> (Vec<f64>, f64, Vec<f64>)
where
    R: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y.len();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut scratch = vec![0.0; dim];

    rhs(t, y, &mut k[0]);
    for s in 1..7 {
        for d in 0..dim {
            let mut acc = y[d];
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += h * A[s][j] * kj[d];
            }
            scratch[d] = acc;
        }
        let (head, tail) = k.split_at_mut(s);
        let _ = head;
        rhs(t + C[s] * h, &scratch, &mut tail[0]);
    }

    let mut y5 = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for d in 0..dim {
        let mut acc5 = y[d];
        let mut e = 0.0;
        for s in 0..7 {
            acc5 += h * B5[s] * k[s][d];
            e += h * (B5[s] - B4[s]) * k[s][d];
        }
        y5[d] = acc5;
        err[d] = e;
    }
    let err_norm = (err.iter().map(|e| e * e).sum::<f64>() / dim as f64).sqrt();
    (y5, err_norm, err)
}

/// Integrate `state' = rhs(ξ, state)` over `interval` with an embedded 4/5
/// pair and adaptive step control.
///
/// When `event` is supplied, integration halts as soon as the predicate turns
/// true, with the crossing ξ localized by bisection to 1e-10.
pub fn integrate_ivp<R, E>(
    rhs: R,
    state0: &[f64],
    interval: (f64, f64),
    cfg: &IntegratorConfig,
    event: Option<E>,
) -> Result<Trajectory>
where
    R: Fn(f64, &[f64], &mut [f64]),
    E: Fn(f64, &[f64]) -> bool,
{
    let (a, b) = interval;
    let mut t = a;
    let mut y = state0.to_vec();
    let span = b - a;
    if span == 0.0 {
        return Ok(Trajectory {
            xi: vec![a],
            states: vec![y],
            termination: Termination::ReachedEnd,
        });
    }
    let dir = span.signum();

    if let Some(ref ev) = event {
        if ev(t, &y) {
            return Ok(Trajectory {
                xi: vec![t],
                states: vec![y],
                termination: Termination::Event { xi: t },
            });
        }
    }

    let mut xi = vec![t];
    let mut states = vec![y.clone()];

    let mut h = (span.abs() / 100.0).min(cfg.max_step) * dir;
    loop {
        if (b - t) * dir <= 0.0 {
            return Ok(Trajectory {
                xi,
                states,
                termination: Termination::ReachedEnd,
            });
        }
        if h.abs() > (b - t).abs() {
            h = b - t;
        }
        if h.abs() < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { xi: t });
        }

        let (y_new, err, _) = dopri_step(&rhs, t, &y, h);
        let scale = {
            let mut s = 0.0f64;
            for d in 0..y.len() {
                s = s.max(y[d].abs().max(y_new[d].abs()));
            }
            cfg.abs_tol + cfg.rel_tol * s
        };
        let ratio = err / scale;

        if ratio <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
            // Accepted. Check the event before committing the full step.
            if let Some(ref ev) = event {
                if ev(t + h, &y_new) {
                    let (t_ev, y_ev) = localize_event(&rhs, ev, t, &y, h);
                    xi.push(t_ev);
                    states.push(y_ev);
                    return Ok(Trajectory {
                        xi,
                        states,
                        termination: Termination::Event { xi: t_ev },
                    });
                }
            }
            t += h;
            y = y_new;
            xi.push(t);
            states.push(y.clone());

            let grow = if ratio > 0.0 {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h.abs() * grow).min(cfg.max_step) * dir;
        } else {
            let shrink = if ratio.is_finite() && ratio > 0.0 {
                (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= shrink;
        }
    }
}

/// Bisect inside an accepted step to pin the first ξ where the event fires.
fn localize_event<R, E>(rhs: &R, event: &E, t0: f64, y0: &[f64], h: f64) -> (f64, Vec<f64>)
where
    R: Fn(f64, &[f64], &mut [f64]),
    E: Fn(f64, &[f64]) -> bool,
{
    let mut lo = 0.0f64; // event known false at t0
    let mut hi = h;
    let mut y_hi = dopri_step(rhs, t0, y0, h).0;
    while (hi - lo).abs() > EVENT_LOCALIZATION {
        let mid = 0.5 * (lo + hi);
        let y_mid = dopri_step(rhs, t0, y0, mid).0;
        if event(t0 + mid, &y_mid) {
            hi = mid;
            y_hi = y_mid;
        } else {
            lo = mid;
        }
    }
    (t0 + hi, y_hi)
}

/// Integrate while landing exactly on each point of `points` (ascending or
/// descending, first entry is the initial ξ). Returns the states at those
/// points; if an event or a singularity truncates the run, the output is
/// shortened accordingly.
pub struct GridRun {
    pub states: Vec<Vec<f64>>,
    /// `None` when every requested point was reached.
    pub stopped_at: Option<f64>,
}

pub fn integrate_to_points<R, E>(
    rhs: R,
    state0: &[f64],
    points: &[f64],
    cfg: &IntegratorConfig,
    event: Option<E>,
) -> Result<GridRun>
where
    R: Fn(f64, &[f64], &mut [f64]),
    E: Fn(f64, &[f64]) -> bool,
{
    if points.is_empty() {
        return Err(Error::InvalidParam("no output points requested".into()));
    }
    let mut states = Vec::with_capacity(points.len());
    states.push(state0.to_vec());
    let mut y = state0.to_vec();
    for w in points.windows(2) {
        let seg = (w[0], w[1]);
        match integrate_ivp(&rhs, &y, seg, cfg, event.as_ref()) {
            Ok(traj) => match traj.termination {
                Termination::ReachedEnd => {
                    y = traj.states.last().expect("nonempty trajectory").clone();
                    states.push(y.clone());
                }
                Termination::Event { xi } => {
                    return Ok(GridRun {
                        states,
                        stopped_at: Some(xi),
                    });
                }
            },
            Err(Error::StepUnderflow { xi }) => {
                return Ok(GridRun {
                    states,
                    stopped_at: Some(xi),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(GridRun {
        states,
        stopped_at: None,
    })
}

const QUAD_MAX_DEPTH: u32 = 50;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h * (fa + 4.0 * fm + fb) / 6.0
}

#[allow(clippy::too_many_arguments)]
fn quad_recurse<F>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= QUAD_MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    let l = quad_recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)?;
    let r = quad_recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `abs_tol`, with Richardson extrapolation on each accepted panel.
pub fn quad_adaptive<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quad_adaptive(f, b, a, abs_tol).map(|v| -v);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    quad_recurse(&f, a, fa, m, fm, b, fb, whole, abs_tol, 0)
}

/// Bracketed root of `f` on [a, b]; the bracket is narrowed by bisection
/// until its width is ≤ `tol`.
pub fn root_bracketed<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { a, b });
    }
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break; // interval below f64 resolution
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Antiderivative F(ξ) = ∫_a^ξ f ds realized as adaptive Simpson panels
/// accumulated from the left domain endpoint over a fixed ladder of segments,
/// plus one partial panel per query.
#[derive(Clone)]
pub struct CumulativeQuad {
    a: f64,
    step: f64,
    partials: Vec<f64>,
    tol: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CumulativeQuad {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
        segments: usize,
        abs_tol: f64,
    ) -> Result<Self> {
        let (a, b) = domain;
        if !(b > a) || segments == 0 {
            return Err(Error::InvalidParam(format!(
                "cumulative quadrature needs a nonempty domain, got [{a}, {b}]"
            )));
        }
        let step = (b - a) / segments as f64;
        let seg_tol = abs_tol / segments as f64;
        let mut partials = Vec::with_capacity(segments + 1);
        partials.push(0.0);
        let mut acc = 0.0;
        for k in 0..segments {
            let lo = a + k as f64 * step;
            let hi = a + (k + 1) as f64 * step;
            acc += quad_adaptive(&f, lo, hi, seg_tol)?;
            partials.push(acc);
        }
        Ok(Self {
            a,
            step,
            partials,
            tol: abs_tol,
            f: Arc::new(f),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.a,
            self.a + self.step * (self.partials.len() - 1) as f64,
        )
    }

    /// F(ξ); ξ may sit anywhere inside the ladder domain.
    pub fn value_at(&self, xi: f64) -> Result<f64> {
        let segs = self.partials.len() - 1;
        let pos = (xi - self.a) / self.step;
        let k = (pos.floor() as isize).clamp(0, segs as isize - 1) as usize;
        let base = self.a + k as f64 * self.step;
        let tail = quad_adaptive(self.f.as_ref(), base, xi, self.tol / segs as f64)?;
        Ok(self.partials[k] + tail)
    }
}

/// Piecewise cubic Hermite interpolant over uniform nodes with known values
/// and first derivatives. Used to evaluate ODE trajectories between the
/// points the integrator landed on exactly.
#[derive(Debug, Clone)]
pub struct HermiteSeries {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl HermiteSeries {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>, derivs: Vec<f64>) -> Self {
        assert_eq!(values.len(), derivs.len());
        assert!(values.len() >= 2, "need at least two nodes");
        assert!(dx > 0.0);
        Self {
            x0,
            dx,
            values,
            derivs,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.values.len() - 1) as f64)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let cells = self.values.len() - 1;
        let pos = (x - self.x0) / self.dx;
        let k = (pos.floor() as isize).clamp(0, cells as isize - 1) as usize;
        let t = pos - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.derivs[k] * self.dx, self.derivs[k + 1] * self.dx);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_anchor() {
        // y' = y, y(0) = 1 → y(1) = e
        let cfg = IntegratorConfig::default();
        let traj = integrate_ivp(
            |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0],
            &[1.0],
            (0.0, 1.0),
            &cfg,
            None::<fn(f64, &[f64]) -> bool>,
        )
        .unwrap();
        let y_end = traj.states.last().unwrap()[0];
        assert!(
            (y_end - std::f64::consts::E).abs() < 1e-8,
            "y(1) = {y_end}, expected e"
        );
        assert_eq!(traj.termination, Termination::ReachedEnd);
    }

    #[test]
    fn constant_rhs_is_exact() {
        let cfg = IntegratorConfig::default();
        let traj = integrate_ivp(
            |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 0.0,
            &[2.5],
            (0.0, 10.0),
            &cfg,
            None::<fn(f64, &[f64]) -> bool>,
        )
        .unwrap();
        for s in &traj.states {
            assert_eq!(s[0], 2.5);
        }
    }

    #[test]
    fn event_is_localized() {
        // y' = 1, event at y ≥ 0.5 → crossing at ξ = 0.5.
        let cfg = IntegratorConfig::default();
        let traj = integrate_ivp(
            |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0,
            &[0.0],
            (0.0, 2.0),
            &cfg,
            Some(|_t: f64, y: &[f64]| y[0] >= 0.5),
        )
        .unwrap();
        match traj.termination {
            Termination::Event { xi } => {
                assert!((xi - 0.5).abs() < 1e-9, "event at {xi}, expected 0.5");
            }
            Termination::ReachedEnd => panic!("event not detected"),
        }
    }

    #[test]
    fn integrate_to_points_lands_exactly() {
        let pts: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
        let cfg = IntegratorConfig::default();
        let run = integrate_to_points(
            |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0],
            &[1.0],
            &pts,
            &cfg,
            None::<fn(f64, &[f64]) -> bool>,
        )
        .unwrap();
        assert!(run.stopped_at.is_none());
        for (p, s) in pts.iter().zip(&run.states) {
            assert!((s[0] - p.exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn quad_linear() {
        let v = quad_adaptive(|x| x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quad_quartic_polynomial() {
        // ∫_{−2}^{2} (1+ξ²)² dξ = 412/15
        let v = quad_adaptive(|x| (1.0 + x * x).powi(2), -2.0, 2.0, 1e-10).unwrap();
        assert!((v - 412.0 / 15.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn quad_zero_and_reversed() {
        assert_eq!(quad_adaptive(|_| 0.0, -3.0, 7.0, 1e-12).unwrap(), 0.0);
        let fwd = quad_adaptive(|x| x.sin(), 0.0, 2.0, 1e-12).unwrap();
        let rev = quad_adaptive(|x| x.sin(), 2.0, 0.0, 1e-12).unwrap();
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn root_sqrt2() {
        let r = root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn root_linear_and_no_bracket() {
        let r = root_bracketed(|x| 2.0 * x - 1.0, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.5).abs() < 1e-13);
        assert!(root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn halving_tolerance_does_not_worsen_anchors() {
        let exact = 412.0 / 15.0;
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let v = quad_adaptive(|x| (1.0 + x * x).powi(2), -2.0, 2.0, tol).unwrap();
            let err = (v - exact).abs();
            assert!(err <= last + 1e-15, "error grew: {err} after {last}");
            last = err;
        }

        let mut last_ode = f64::INFINITY;
        for tol in [1e-6, 1e-8, 1e-10, 1e-12] {
            let cfg = IntegratorConfig {
                rel_tol: tol,
                abs_tol: tol,
                ..Default::default()
            };
            let traj = integrate_ivp(
                |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0],
                &[1.0],
                (0.0, 1.0),
                &cfg,
                None::<fn(f64, &[f64]) -> bool>,
            )
            .unwrap();
            let err = (traj.states.last().unwrap()[0] - std::f64::consts::E).abs();
            assert!(err <= last_ode * 1.5 + 1e-15, "ODE error grew at tol {tol}");
            last_ode = err;
        }
    }

    #[test]
    fn integrator_is_deterministic() {
        let run = || {
            let cfg = IntegratorConfig::default();
            integrate_ivp(
                |t, y: &[f64], dy: &mut [f64]| dy[0] = t.sin() * y[0],
                &[1.0],
                (0.0, 3.0),
                &cfg,
                None::<fn(f64, &[f64]) -> bool>,
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.xi.len(), b.xi.len());
        for (x, y) in a.states.iter().zip(&b.states) {
            assert_eq!(x[0].to_bits(), y[0].to_bits());
        }
    }

    #[test]
    fn cumulative_quad_matches_direct() {
        let cq = CumulativeQuad::new(|x: f64| x.cos(), (-2.0, 2.0), 16, 1e-10).unwrap();
        for xi in [-2.0, -1.3, 0.0, 0.77, 2.0] {
            let v = cq.value_at(xi).unwrap();
            let expect = xi.sin() - (-2.0f64).sin();
            assert!((v - expect).abs() < 1e-9, "F({xi}) = {v}, want {expect}");
        }
    }

    #[test]
    fn hermite_reproduces_cubic() {
        // Exact for cubics by construction.
        let f = |x: f64| x.powi(3) - 2.0 * x + 1.0;
        let d = |x: f64| 3.0 * x * x - 2.0;
        let n = 9;
        let (x0, dx) = (-1.0, 0.25);
        let xs: Vec<f64> = (0..n).map(|k| x0 + dx * k as f64).collect();
        let hs = HermiteSeries::new(
            x0,
            dx,
            xs.iter().map(|&x| f(x)).collect(),
            xs.iter().map(|&x| d(x)).collect(),
        );
        for k in 0..40 {
            let x = -1.0 + 0.05 * k as f64;
            assert!((hs.value_at(x) - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn step_underflow_reported() {
        // y' = y² from y(0)=1 blows up at ξ=1; integration must fail cleanly.
        let cfg = IntegratorConfig::default();
        let res = integrate_ivp(
            |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0],
            &[1.0],
            (0.0, 2.0),
            &cfg,
            None::<fn(f64, &[f64]) -> bool>,
        );
        match res {
            Err(Error::StepUnderflow { xi }) => {
                assert!(
                    (xi - 1.0).abs() < 0.05,
                    "underflow at {xi}, expected near 1"
                );
            }
            other => panic!("expected step underflow, got {other:?}"),
        }
    }
}
