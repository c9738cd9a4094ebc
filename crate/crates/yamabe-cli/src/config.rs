//! JSON run configuration.
//!
//! The schema is documented in the repository README. Field and profile
//! shapes come from a fixed catalog of closed forms; there is deliberately
//! no expression parser.

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub geometry: Option<GeometryBlock>,
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    #[serde(default)]
    pub profiles: Option<ProfilesBlock>,
    /// ξ-interval the profiles live on.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// "dual" (exact jets) or "fd" (central finite differences).
    #[serde(default)]
    pub backend: Option<String>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub steady: Option<SteadyBlock>,
    #[serde(default)]
    pub riccati: Option<RiccatiBlock>,
    #[serde(default)]
    pub lightlike: Option<LightlikeBlock>,
    /// Sample count for serialized profiles.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Swept parameter name (sweep mode).
    #[serde(default)]
    pub parameter: Option<String>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub outputs: Option<OutputsBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verify,
    Construct,
    Sweep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub n: usize,
    pub signature: Vec<i8>,
    pub m: usize,
    #[serde(default)]
    pub lambda_f: f64,
    #[serde(default)]
    pub rho: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilesBlock {
    pub phi: FormSpec,
    pub f: FormSpec,
    pub h: FormSpec,
}

/// A named closed form from the catalog with its parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub form: String,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(rename = "box")]
    pub bbox: Vec<[f64; 2]>,
    #[serde(default = "default_points_per_axis")]
    pub points_per_axis: usize,
}

fn default_points_per_axis() -> usize {
    11
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyBlock {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    #[serde(default)]
    pub nu: f64,
    pub phi0: f64,
    pub domain: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiBlock {
    pub n: usize,
    pub m: usize,
    pub phi: FormSpec,
    pub z_p: FormSpec,
    /// Integration constant; omit for the pure-particular branch.
    #[serde(default)]
    pub c: Option<f64>,
    pub domain: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightlikeBlock {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub phi: FormSpec,
    pub f: FormSpec,
    pub domain: [f64; 2],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsBlock {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub residuals: Option<String>,
    #[serde(default)]
    pub profile: Option<String>,
    #[serde(default)]
    pub sweep: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if let Some(b) = &self.backend {
            if b != "dual" && b != "fd" {
                return Err(format!("backend must be \"dual\" or \"fd\", got {b:?}"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err("tolerance must be positive".into());
            }
        }
        match self.mode {
            Mode::Verify => {
                let g = self
                    .geometry
                    .as_ref()
                    .ok_or("verify needs a geometry block")?;
                if g.signature.len() != g.n {
                    return Err(format!(
                        "signature length {} must equal n = {}",
                        g.signature.len(),
                        g.n
                    ));
                }
                let dir = self.direction.as_ref().ok_or("verify needs a direction")?;
                if dir.len() != g.n {
                    return Err(format!(
                        "direction length {} must equal n = {}",
                        dir.len(),
                        g.n
                    ));
                }
                self.profiles
                    .as_ref()
                    .ok_or("verify needs a profiles block")?;
                self.domain.ok_or("verify needs a domain interval")?;
                let grid = self.grid.as_ref().ok_or("verify needs a grid block")?;
                if grid.bbox.len() != g.n {
                    return Err(format!(
                        "grid box has {} axes, n = {}",
                        grid.bbox.len(),
                        g.n
                    ));
                }
            }
            Mode::Construct => {
                let fam = self.family.as_deref().ok_or("construct needs a family")?;
                match fam {
                    "steady" => {
                        self.steady.as_ref().ok_or("missing steady block")?;
                    }
                    "riccati" => {
                        self.riccati.as_ref().ok_or("missing riccati block")?;
                    }
                    "lightlike" => {
                        self.lightlike.as_ref().ok_or("missing lightlike block")?;
                    }
                    other => return Err(format!("unknown family {other:?}")),
                }
            }
            Mode::Sweep => {
                if self.family.as_deref() != Some("steady") {
                    return Err("sweep currently supports the steady family only".into());
                }
                self.steady.as_ref().ok_or("missing steady block")?;
                let p = self.parameter.as_deref().ok_or("sweep needs a parameter")?;
                if !["alpha", "beta", "c", "nu", "phi0"].contains(&p) {
                    return Err(format!("unknown sweep parameter {p:?}"));
                }
                let vals = self.values.as_ref().ok_or("sweep needs values")?;
                if vals.is_empty() {
                    return Err("sweep values must be nonempty".into());
                }
            }
        }
        Ok(())
    }
}
