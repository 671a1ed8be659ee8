use std::fs;
use std::path::Path;
use std::process::Command;

use qlayer_cli::pipeline::{run, Outcome};
use qlayer_cli::{emit, parse_config, Stage, SCHEMA_ID};
use serde_json::Value;

const CYLINDER: &str = "seed = 5\n[surface]\nname = \"cylinder\"\nradius = 1.0\n[layer]\na = 0.2\n[stages]\nenabled = [\"certify\", \"spectrum\"]\n[spectrum]\nn_v = 12\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qlayer"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn closure_is_recorded_and_disabled_stages_are_absent() {
    let cfg = parse_config(CYLINDER).unwrap();
    let report = run(&cfg);
    let json: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["schema"], SCHEMA_ID);
    assert_eq!(json["closure_added"], serde_json::json!(["geometry"]));
    assert_eq!(json["stages"], serde_json::json!(["geometry", "certify", "spectrum"]));
    let obj = json.as_object().unwrap();
    assert!(!obj.contains_key("asymptotics") && !obj.contains_key("topology"));
    for stage in ["geometry", "certify", "spectrum"] {
        assert_eq!(json[stage]["status"], "ok", "{stage}");
    }
    let cc = &json["spectrum"]["result"]["cross_check"];
    assert_eq!(cc["below_rayleigh"], true);
    assert_eq!(cc["resolved"], true);
    assert_eq!(parse_config(json["config"].as_str().unwrap()).unwrap(), cfg);
}

#[test]
fn identical_runs_emit_identical_files() {
    let cfg = parse_config(CYLINDER).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = emit(&run(&cfg), a.path()).unwrap();
    let fb = emit(&run(&cfg), b.path()).unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        if x.ends_with("timings.json") {
            continue;
        }
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
    let parabola = fs::read_to_string(a.path().join("form_parabola.csv")).unwrap();
    assert_eq!(parabola.lines().count(), 42);
    assert!(parabola.starts_with("epsilon,value,value_error,norm,rayleigh_excess"));
}

#[test]
fn parabola_samples_follow_the_decomposition() {
    let cfg = parse_config(CYLINDER).unwrap();
    let report = run(&cfg);
    let cert = &report.certify.as_ref().and_then(Outcome::ok).unwrap().certificate;
    let d = &cert.decomposition;
    let rows = qlayer_cli::emit::parabola_samples(d);
    let (e_min, v_min) = rows.iter().fold((0.0, f64::INFINITY), |m, r| if r.1 < m.1 { (r.0, r.1) } else { m });
    assert_eq!(e_min, d.eps_star);
    assert!((v_min - d.value_at_star).abs() <= 1e-12 * d.value_at_star.abs());
}

#[test]
fn stage_errors_stay_inside_their_stage() {
    let text = "[surface]\nname = \"helicoid\"\n[layer]\na = 0.05\n[stages]\nenabled = [\"asymptotics\", \"certify\"]\n";
    let report = run(&parse_config(text).unwrap());
    assert!(matches!(report.asymptotics, Some(Outcome::Ok { .. })));
    assert!(matches!(&report.certify, Some(Outcome::Error { code, .. }) if code == "unsupported"));
    assert_eq!(report.failed_stages(), vec![Stage::Certify]);
}

#[test]
fn helicoid_is_minimal_with_sublinear_growth() {
    let text = "[surface]\nname = \"helicoid\"\n[layer]\na = 0.05\n[stages]\nenabled = [\"asymptotics\"]\n";
    let report = run(&parse_config(text).unwrap());
    let g = report.geometry.as_ref().and_then(Outcome::ok).unwrap();
    assert!(g.samples.iter().all(|s| s.mean_forms.abs() < 1e-9));
    let a = report.asymptotics.as_ref().and_then(Outcome::ok).unwrap();
    assert_eq!(a.growth.classification, qlayer_core::asymptotics::Growth::Sublinear);
}

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ok = write(dir.path(), "ok.toml", "[surface]\nname = \"plane\"\n[layer]\na = 0.5\n");
    let status = bin().args(["run", ok.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("report.json").exists());

    let bad = write(dir.path(), "bad.toml", "[surface]\nname = \"plane\"\n[layer]\na = 0.5\nc0 = 1.2\n");
    let o = bin().args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E009"));

    let failing = write(
        dir.path(),
        "fail.toml",
        "[surface]\nname = \"helicoid\"\n[layer]\na = 0.05\n[stages]\nenabled = [\"certify\"]\n",
    );
    let status = bin().args(["run", failing.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(1));

    assert_eq!(bin().args(["catalog", "list"]).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(["catalog", "describe", "capped_cone"]).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(["catalog", "describe", "torus"]).status().unwrap().code(), Some(2));
}

#[test]
fn environment_overrides_the_configured_directory() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let text = format!("[surface]\nname = \"plane\"\n[layer]\na = 0.5\n[output]\ndir = \"{}\"\n", dir.path().join("cfg").display());
    let cfg = write(dir.path(), "c.toml", &text);
    let status = bin().arg("run").arg(&cfg).env(qlayer_cli::OUTPUT_DIR_ENV, &env_dir).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(env_dir.join("report.json").exists());
    assert!(!dir.path().join("cfg").exists());
}

#[test]
fn verify_verb_reproduces_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&parse_config(CYLINDER).unwrap());
    emit(&report, dir.path()).unwrap();
    let cert = dir.path().join("certificate.json");
    assert_eq!(bin().arg("verify").arg(&cert).status().unwrap().code(), Some(0));

    let mut json: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let v = json["decomposition"]["value_at_star"].as_f64().unwrap();
    json["decomposition"]["value_at_star"] = (v * 0.5).into();
    let forged = write(dir.path(), "forged.json", &json.to_string());
    assert_eq!(bin().arg("verify").arg(&forged).status().unwrap().code(), Some(1));

    let junk = write(dir.path(), "junk.json", "{}");
    assert_eq!(bin().arg("verify").arg(&junk).status().unwrap().code(), Some(2));
}
