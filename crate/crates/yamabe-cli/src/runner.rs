//! Mode drivers: verify, construct, sweep.

use crate::catalog::build_profile;
use crate::config::{Mode, OutputsBlock, RunConfig, SteadyBlock};
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use yamabe::constructors::{
    lightlike_family, riccati_family, steady_family, Constructed, LightlikeParams, RiccatiParams,
    SteadyFamilyParams,
};
use yamabe::fields::DEFAULT_FD_STEP;
use yamabe::geometry::Signature;
use yamabe::reduction::{
    lift_to_field, lift_to_field_fd, profile_sweep_csv, sweep_profile, uniform_samples,
    InvariantProfile,
};
use yamabe::warped::{lattice, residual_sweep};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

const DEFAULT_TOL: f64 = 1e-7;
const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Lib(yamabe::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use yamabe::Error::*;
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Lib(e) => match e {
                InvalidParam(_) | BadSignature(_) => EXIT_CONFIG,
                NonPositive { .. }
                | OutOfDomain { .. }
                | DimensionMismatch { .. }
                | DomainMismatch { .. }
                | EmptyGrid
                | AllPointsExcluded { .. } => EXIT_DOMAIN,
                StepUnderflow { .. }
                | SingularConstruction { .. }
                | QuadratureNonConvergence { .. }
                | NoSignChange { .. } => EXIT_SINGULAR,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<yamabe::Error> for CliError {
    fn from(e: yamabe::Error) -> Self {
        CliError::Lib(e)
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub backend: Option<String>,
}

pub struct Run {
    pub config: RunConfig,
    pub config_path: String,
    pub out_dir: PathBuf,
    pub tolerance: f64,
    pub backend: String,
}

impl Run {
    pub fn new(config_path: &str, overrides: Overrides) -> Result<Self, CliError> {
        let text = fs::read_to_string(config_path)
            .map_err(|e| CliError::Io(format!("{config_path}: {e}")))?;
        let config = RunConfig::parse(&text).map_err(CliError::Config)?;
        let tolerance = overrides
            .tolerance
            .or(config.tolerance)
            .unwrap_or(DEFAULT_TOL);
        if !(tolerance > 0.0) {
            return Err(CliError::Config("tolerance must be positive".into()));
        }
        let backend = overrides
            .backend
            .clone()
            .or_else(|| config.backend.clone())
            .unwrap_or_else(|| "dual".into());
        if backend != "dual" && backend != "fd" {
            return Err(CliError::Config(format!(
                "backend must be \"dual\" or \"fd\", got {backend:?}"
            )));
        }
        Ok(Self {
            config,
            config_path: config_path.to_string(),
            out_dir: overrides.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            tolerance,
            backend,
        })
    }

    pub fn execute(&self) -> Result<i32, CliError> {
        match self.config.mode {
            Mode::Verify => self.run_verify(),
            Mode::Construct => self.run_construct(),
            Mode::Sweep => self.run_sweep(),
        }
    }

    fn write_out(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(e.to_string()))?;
        }
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Run metadata lives in its own file so CSV bodies stay byte-identical
    /// across reruns.
    fn write_meta(&self, outputs: &[&str]) -> Result<(), CliError> {
        let meta = json!({
            "config": self.config_path,
            "mode": match self.config.mode {
                Mode::Verify => "verify",
                Mode::Construct => "construct",
                Mode::Sweep => "sweep",
            },
            "backend": self.backend,
            "tolerance": self.tolerance,
            "outputs": outputs,
        });
        self.write_out("meta.json", &serde_json::to_string_pretty(&meta).unwrap())
    }

    fn outputs(&self) -> OutputsBlock {
        self.config.outputs.clone().unwrap_or_default()
    }

    fn run_verify(&self) -> Result<i32, CliError> {
        let g = self.config.geometry.as_ref().expect("validated");
        let dir = self.config.direction.as_ref().expect("validated");
        let profs = self.config.profiles.as_ref().expect("validated");
        let dom = self.config.domain.expect("validated");
        let grid_block = self.config.grid.as_ref().expect("validated");

        let domain = (dom[0], dom[1]);
        let phi = build_profile(&profs.phi)
            .map_err(CliError::Config)?
            .restricted(domain);
        let f = build_profile(&profs.f)
            .map_err(CliError::Config)?
            .restricted(domain);
        let h = build_profile(&profs.h)
            .map_err(CliError::Config)?
            .restricted(domain);
        let sig = Signature::new(g.signature.clone())?;
        let profile = InvariantProfile::new(dir.clone(), sig, phi, f, h, g.m, g.lambda_f, g.rho)?;
        profile.validate_positivity(256)?;

        let bbox: Vec<(f64, f64)> = grid_block.bbox.iter().map(|b| (b[0], b[1])).collect();
        let data = if self.backend == "fd" {
            lift_to_field_fd(&profile, &bbox, DEFAULT_FD_STEP)?
        } else {
            lift_to_field(&profile, &bbox)?
        };
        let grid = lattice(&bbox, grid_block.points_per_axis);
        let mut report = residual_sweep(&data, &grid, self.tolerance, &self.backend)?;
        report.meta.direction_rescaled = profile.rescaled_from();

        let outs = self.outputs();
        let report_name = outs.report.as_deref().unwrap_or("report.json");
        let csv_name = outs.residuals.as_deref().unwrap_or("residuals.csv");
        self.write_out(report_name, &report.to_json())?;
        self.write_out(csv_name, &report.to_csv())?;
        self.write_meta(&[report_name, csv_name])?;

        println!(
            "verify: {} points ({} excluded), max residuals [{:.3e}, {:.3e}, {:.3e}], tol {:.1e} -> {}",
            report.grid.len(),
            report.excluded,
            report.stats[0].max_abs,
            report.stats[1].max_abs,
            report.stats[2].max_abs,
            self.tolerance,
            if report.pass { "PASS" } else { "FAIL" }
        );
        Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
    }

    fn build_family(&self) -> Result<(Constructed, serde_json::Value), CliError> {
        match self.config.family.as_deref().expect("validated") {
            "steady" => {
                let b = self.config.steady.as_ref().expect("validated");
                let params = SteadyFamilyParams {
                    n: b.n,
                    m: b.m,
                    alpha_const: b.alpha,
                    beta: b.beta,
                    c: b.c,
                    nu: b.nu,
                    phi0: b.phi0,
                    domain: (b.domain[0], b.domain[1]),
                };
                let c = steady_family(&params)?;
                let echo = json!({
                    "n": b.n, "m": b.m, "alpha": b.alpha, "beta": b.beta,
                    "c": b.c, "nu": b.nu, "phi0": b.phi0, "domain": b.domain,
                });
                Ok((c, echo))
            }
            "riccati" => {
                let b = self.config.riccati.as_ref().expect("validated");
                let domain = (b.domain[0], b.domain[1]);
                let params = RiccatiParams {
                    n: b.n,
                    m: b.m,
                    phi: build_profile(&b.phi)
                        .map_err(CliError::Config)?
                        .restricted(domain),
                    z_p: build_profile(&b.z_p)
                        .map_err(CliError::Config)?
                        .restricted(domain),
                    c: b.c,
                    domain,
                };
                let c = riccati_family(&params)?;
                let echo = json!({
                    "n": b.n, "m": b.m,
                    "phi": {"form": b.phi.form, "params": b.phi.params},
                    "z_p": {"form": b.z_p.form, "params": b.z_p.params},
                    "c": b.c, "domain": b.domain,
                });
                Ok((c, echo))
            }
            "lightlike" => {
                let b = self.config.lightlike.as_ref().expect("validated");
                let params = LightlikeParams {
                    n: b.n,
                    m: b.m,
                    alpha_const: b.alpha,
                    domain: (b.domain[0], b.domain[1]),
                };
                let phi = build_profile(&b.phi).map_err(CliError::Config)?;
                let f = build_profile(&b.f).map_err(CliError::Config)?;
                let c = lightlike_family(&params, &phi, &f)?;
                let echo = json!({
                    "n": b.n, "m": b.m, "alpha": b.alpha,
                    "phi": {"form": b.phi.form, "params": b.phi.params},
                    "f": {"form": b.f.form, "params": b.f.params},
                    "domain": b.domain,
                });
                Ok((c, echo))
            }
            other => Err(CliError::Config(format!("unknown family {other:?}"))),
        }
    }

    fn run_construct(&self) -> Result<i32, CliError> {
        let samples = self.config.samples.unwrap_or(DEFAULT_SAMPLES);
        let (constructed, params_echo) = self.build_family()?;

        let xs = uniform_samples(constructed.profile.domain(), samples.max(2));
        let rows = sweep_profile(&constructed.profile, &xs)?;
        let max_res = rows.iter().fold(0.0f64, |a, r| {
            a.max(r.r_h.abs()).max(r.r_diag.abs()).max(r.r_fiber.abs())
        });

        let outs = self.outputs();
        let profile_name = outs.profile.as_deref().unwrap_or("profile.json");
        let sweep_name = outs.sweep.as_deref().unwrap_or("profile_sweep.csv");
        self.write_out(profile_name, &constructed.to_json(params_echo, samples))?;
        self.write_out(sweep_name, &profile_sweep_csv(&rows))?;
        self.write_meta(&[profile_name, sweep_name])?;

        if let Some(t) = &constructed.truncation {
            println!(
                "construct[{}]: domain truncated to [{:.6}, {:.6}] ({}); max residual {:.3e}",
                constructed.family, t.achieved.0, t.achieved.1, t.reason, max_res
            );
            return Ok(EXIT_SINGULAR);
        }
        let pass = max_res <= self.tolerance;
        println!(
            "construct[{}]: {} samples, max residual {:.3e}, tol {:.1e} -> {}",
            constructed.family,
            rows.len(),
            max_res,
            self.tolerance,
            if pass { "PASS" } else { "FAIL" }
        );
        Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
    }

    fn run_sweep(&self) -> Result<i32, CliError> {
        let base: &SteadyBlock = self.config.steady.as_ref().expect("validated");
        let parameter = self.config.parameter.as_deref().expect("validated");
        let values = self.config.values.as_ref().expect("validated");

        let mut csv = String::from("parameter,max_residual,domain_min,domain_max\n");
        for &v in values {
            let mut params = SteadyFamilyParams {
                n: base.n,
                m: base.m,
                alpha_const: base.alpha,
                beta: base.beta,
                c: base.c,
                nu: base.nu,
                phi0: base.phi0,
                domain: (base.domain[0], base.domain[1]),
            };
            match parameter {
                "alpha" => params.alpha_const = v,
                "beta" => params.beta = v,
                "c" => params.c = v,
                "nu" => params.nu = v,
                "phi0" => params.phi0 = v,
                _ => unreachable!("validated"),
            }
            // Per-point failures are recorded in the row, not fatal.
            let row = match steady_family(&params) {
                Ok(c) => {
                    let (lo, hi) = c.profile.domain();
                    let res = c.max_residual(256).unwrap_or(f64::NAN);
                    format!("{v},{res},{lo},{hi}\n")
                }
                Err(e) => {
                    eprintln!("sweep point {parameter} = {v}: {e}");
                    format!("{v},nan,nan,nan\n")
                }
            };
            print!("sweep {parameter} = {v}: {row}");
            csv.push_str(&row);
        }

        let outs = self.outputs();
        let csv_name = outs.csv.as_deref().unwrap_or("sweep.csv");
        self.write_out(csv_name, &csv)?;
        self.write_meta(&[csv_name])?;
        Ok(EXIT_PASS)
    }
}

/// Install the global thread pool honoring the YAMABE_THREADS cap.
pub fn configure_threads() {
    if let Ok(v) = std::env::var("YAMABE_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            if k >= 1 {
                // Ignore the error if a pool already exists (tests).
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
}
