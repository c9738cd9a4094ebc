//! Fixed catalog of closed-form profile shapes referenced by name from run
//! configurations.

use crate::config::FormSpec;
use yamabe::fields::Profile2Jet;

fn need(spec: &FormSpec, count: usize) -> Result<(), String> {
    if spec.params.len() != count {
        return Err(format!(
            "form {:?} takes {count} parameter(s), got {}",
            spec.form,
            spec.params.len()
        ));
    }
    Ok(())
}

/// Instantiate a catalog form. Known names:
/// `constant c`, `polynomial c0 c1 …`, `power-series c0 c1 …`,
/// `exp a b` (a·e^{bξ}), `gaussian-exp a b` (a·e^{bξ²}),
/// `reciprocal-quadratic a b` (a/(1+bξ²)).
pub fn build_profile(spec: &FormSpec) -> Result<Profile2Jet, String> {
    match spec.form.as_str() {
        "constant" => {
            need(spec, 1)?;
            Ok(Profile2Jet::constant(spec.params[0]))
        }
        "polynomial" | "power-series" => {
            if spec.params.is_empty() {
                return Err("polynomial needs at least one coefficient".into());
            }
            Ok(Profile2Jet::polynomial(&spec.params))
        }
        "exp" => {
            need(spec, 2)?;
            Ok(Profile2Jet::exponential(spec.params[0], spec.params[1]))
        }
        "gaussian-exp" => {
            need(spec, 2)?;
            Ok(Profile2Jet::gaussian_exp(spec.params[0], spec.params[1]))
        }
        "reciprocal-quadratic" => {
            need(spec, 2)?;
            Ok(Profile2Jet::reciprocal_quadratic(
                spec.params[0],
                spec.params[1],
            ))
        }
        other => Err(format!("unknown catalog form {other:?}")),
    }
}
