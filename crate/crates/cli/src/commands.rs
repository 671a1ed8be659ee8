//! Verb implementations behind the `qlayer` binary; each returns an exit code.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qlayer_core::certifier::{verify, Verification};
use qlayer_core::geometry::{build, catalog, LayerModel, SurfaceSpec};
use qlayer_core::Certificate;

use crate::exit;
use crate::{emit, parse_config, run, OUTPUT_DIR_ENV};

/// Output directory: the flag wins over the environment, which wins over the config.
pub fn resolve_output_dir(flag: Option<&Path>, env: Option<&str>, configured: &Path) -> PathBuf {
    match (flag, env) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(e)) if !e.is_empty() => PathBuf::from(e),
        _ => configured.to_path_buf(),
    }
}

pub fn run_verb(config: &Path, output_dir: Option<&Path>) -> u8 {
    let text = match fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", config.display());
            return exit::CONFIG_ERROR;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{}: {e}", config.display());
            return exit::CONFIG_ERROR;
        }
    };
    let env = std::env::var(OUTPUT_DIR_ENV).ok();
    let dir = resolve_output_dir(output_dir, env.as_deref(), &cfg.output_dir);
    let report = run(&cfg);
    match emit(&report, &dir) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("{e:#}");
            return exit::STAGE_ERROR;
        }
    }
    let failed = report.failed_stages();
    if failed.is_empty() {
        exit::OK
    } else {
        let names: Vec<&str> = failed.iter().map(|s| s.name()).collect();
        eprintln!("stages with errors: {}", names.join(", "));
        exit::STAGE_ERROR
    }
}

/// Rebuilds the certificate's layer and re-evaluates its form value.
pub fn verify_certificate(cert: &Certificate) -> qlayer_core::Result<Verification<f64>> {
    let surface = build::<f64>(&cert.surface, cert.orientation)?;
    let layer = LayerModel::new(surface, cert.thickness, cert.c0)?;
    verify(&layer, cert)
}

fn load_certificate(path: &Path) -> Result<Certificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn verify_verb(path: &Path) -> u8 {
    let cert = match load_certificate(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e:#}");
            return exit::CONFIG_ERROR;
        }
    };
    match verify_certificate(&cert) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("verification serializes"));
            if v.reproduced {
                exit::OK
            } else {
                eprintln!("stored value {:.6e} not reproduced: {:.6e} (bound {:.3e})", v.stored, v.value, v.bound);
                exit::STAGE_ERROR
            }
        }
        Err(e) => {
            eprintln!("verification failed: {e}");
            exit::STAGE_ERROR
        }
    }
}

pub fn catalog_list() -> u8 {
    for e in catalog() {
        println!("{:<20} {}", e.name, e.summary);
    }
    exit::OK
}

pub fn catalog_describe(name: &str) -> u8 {
    let Some(entry) = catalog().into_iter().find(|e| e.name == name) else {
        let hint = if SurfaceSpec::default_for(name).is_none() && name == "ruled" {
            " (user ruled surfaces are declared with beta_csv/delta_csv in the config)"
        } else {
            ""
        };
        eprintln!("unknown surface `{name}`{hint}");
        return exit::CONFIG_ERROR;
    };
    println!("{}: {}", entry.name, entry.summary);
    println!("degrees (deg P, deg Q): {}", entry.degrees);
    println!("parameters:");
    for (k, default, doc) in &entry.params {
        println!("  {k:<12} default {default:<10} {doc}");
    }
    exit::OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_dir_precedence() {
        let cfg = Path::new("from-config");
        assert_eq!(resolve_output_dir(None, None, cfg), PathBuf::from("from-config"));
        assert_eq!(resolve_output_dir(None, Some("env"), cfg), PathBuf::from("env"));
        assert_eq!(resolve_output_dir(Some(Path::new("flag")), Some("env"), cfg), PathBuf::from("flag"));
        assert_eq!(resolve_output_dir(None, Some(""), cfg), PathBuf::from("from-config"));
    }
}
