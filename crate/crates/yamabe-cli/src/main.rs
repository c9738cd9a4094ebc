//! Command-line runner for warped-product Yamabe soliton verification and
//! construction.
//!
//! ```text
//! yamabe --config <path> [--out <dir>] [--tol <float>] [--backend dual|fd]
//! ```
//!
//! The mode (verify / construct / sweep) and everything else comes from the
//! JSON config; the flags override tolerance and differentiation backend.
//! Exit codes: 0 pass, 1 residual failure, 2 config error, 3 domain error,
//! 4 singular construction.

// Tolerance checks use `!(t > 0.0)` so NaN lands on the rejection path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod catalog;
mod config;
mod runner;

use runner::{configure_threads, Overrides, Run, EXIT_CONFIG};
use std::path::PathBuf;

fn usage() -> String {
    "usage: yamabe --config <path> [--out <dir>] [--tol <float>] [--backend dual|fd]".into()
}

fn parse_args(args: &[String]) -> Result<(String, Overrides), String> {
    let mut config: Option<String> = None;
    let mut over = Overrides::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                config = Some(it.next().ok_or_else(usage)?.clone());
            }
            "--out" => {
                over.out_dir = Some(PathBuf::from(it.next().ok_or_else(usage)?));
            }
            "--tol" => {
                let raw = it.next().ok_or_else(usage)?;
                let t: f64 = raw
                    .parse()
                    .map_err(|_| format!("--tol expects a float, got {raw:?}"))?;
                over.tolerance = Some(t);
            }
            "--backend" => {
                over.backend = Some(it.next().ok_or_else(usage)?.clone());
            }
            "--help" | "-h" => return Err(usage()),
            other => return Err(format!("unknown argument {other:?}\n{}", usage())),
        }
    }
    let config = config.ok_or_else(usage)?;
    Ok((config, over))
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (config_path, overrides) = match parse_args(&args) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("{msg}");
            std::process::exit(EXIT_CONFIG);
        }
    };
    configure_threads();

    let code = match Run::new(&config_path, overrides) {
        Ok(run) => match run.execute() {
            Ok(code) => code,
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

#[cfg(test)]
mod tests {
    use super::*;
    use runner::CliError;

    #[test]
    fn args_round_trip() {
        let (cfg, over) = parse_args(&[
            "--config".into(),
            "run.json".into(),
            "--tol".into(),
            "1e-6".into(),
            "--backend".into(),
            "fd".into(),
            "--out".into(),
            "results".into(),
        ])
        .unwrap();
        assert_eq!(cfg, "run.json");
        assert_eq!(over.tolerance, Some(1e-6));
        assert_eq!(over.backend.as_deref(), Some("fd"));
        assert_eq!(over.out_dir.unwrap(), PathBuf::from("results"));
    }

    #[test]
    fn missing_config_is_an_error() {
        assert!(parse_args(&[]).is_err());
        assert!(parse_args(&["--tol".into(), "1e-6".into()]).is_err());
        assert!(parse_args(&["--frobnicate".into()]).is_err());
    }

    #[test]
    fn bad_tol_rejected() {
        let err = parse_args(&[
            "--config".into(),
            "x.json".into(),
            "--tol".into(),
            "tiny".into(),
        ])
        .unwrap_err();
        assert!(err.contains("--tol"));
    }

    #[test]
    fn cli_error_exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Lib(yamabe::Error::EmptyGrid).exit_code(), 3);
        assert_eq!(
            CliError::Lib(yamabe::Error::StepUnderflow { xi: 0.0 }).exit_code(),
            4
        );
    }
}
