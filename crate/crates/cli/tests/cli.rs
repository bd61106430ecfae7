use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn cpi_sim(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cpi-sim"));
    cmd.args(args).env_remove("CPI_SIM_OUT");
    if let Some(dir) = env_out {
        cmd.env("CPI_SIM_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn demo_file(dir: &Path, name: &str) -> PathBuf {
    let out = cpi_sim(&["demo", name], None);
    assert!(out.status.success());
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, &out.stdout).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let result = cpi_sim(&args, None);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap()
}

fn digests(manifest: &Value) -> Vec<(String, String)> {
    manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["path"].as_str().unwrap().to_string(), f["sha256"].as_str().unwrap().to_string()))
        .collect()
}

fn digest_of(manifest: &Value, name: &str) -> String {
    digests(manifest).into_iter().find(|(p, _)| p == name).unwrap().1
}

#[test]
fn montecarlo_runs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "montecarlo");
    let a = run(&config, &dir.path().join("a"), &["--seed", "7", "--threads", "1"]);
    let b = run(&config, &dir.path().join("b"), &["--seed", "7", "--threads", "1"]);
    assert_eq!(digests(&a), digests(&b));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["seed"], 7);

    let threaded = run(&config, &dir.path().join("c"), &["--seed", "7", "--threads", "4"]);
    assert_eq!(digests(&a), digests(&threaded));
    let other = run(&config, &dir.path().join("d"), &["--seed", "8", "--threads", "1"]);
    assert_ne!(digest_of(&a, "gamma_mc.csv"), digest_of(&other, "gamma_mc.csv"));

    let report = &a["results"]["convergence"];
    assert!(report["l1"].as_f64().unwrap() < 3.0 * report["standard_error"].as_f64().unwrap());
}

#[test]
fn manifest_lists_every_file_with_its_digest() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "focused");
    let out = dir.path().join("out");
    let manifest = run(&config, &out, &[]);

    let mut listed: Vec<String> = digests(&manifest).into_iter().map(|(p, _)| p).collect();
    listed.push("manifest.json".into());
    listed.sort();
    let mut on_disk: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for (path, sha) in digests(&manifest) {
        assert_eq!(hex::encode(Sha256::digest(fs::read(out.join(&path)).unwrap())), sha, "{path}");
    }

    let peaks = manifest["results"]["ghost_peaks"].as_array().unwrap();
    assert!((peaks[0].as_f64().unwrap() + 75e-6).abs() <= 2.5e-6);
    assert!((peaks[1].as_f64().unwrap() - 75e-6).abs() <= 2.5e-6);
    assert!(manifest["results"]["ghost_contrast"].as_f64().unwrap() > 0.8);
    assert_eq!(manifest["config"]["run"]["seed"], 0);

    let pgm = fs::read(out.join("gamma.pgm")).unwrap();
    let header = b"P5\n64 121\n65535\n";
    assert_eq!(&pgm[..header.len()], header);
    assert_eq!(pgm.len(), header.len() + 2 * 64 * 121);
    let scale = &manifest["pgm_scaling"]["gamma.pgm"];
    assert!(scale["max"].as_f64().unwrap() > scale["min"].as_f64().unwrap());

    let csv = fs::read_to_string(out.join("gamma.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("rho_a,rho_b,gamma"));
    assert_eq!(lines.count(), 121 * 64);
}

#[test]
fn budget_mode_emits_both_curves() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "budget");
    let out = dir.path().join("out");
    let manifest = run(&config, &out, &[]);
    let csv = fs::read_to_string(out.join("tradeoff.csv")).unwrap();
    let rows: Vec<(String, usize, usize)> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    for (scheme, x, u) in &rows {
        match scheme.as_str() {
            "plenoptic" => assert_eq!(x * u, 50),
            "cpi" => assert_eq!(x + u, 50),
            other => panic!("unexpected scheme {other}"),
        }
    }
    assert!(rows.contains(&("plenoptic".into(), 10, 5)));
    assert!(rows.contains(&("cpi".into(), 10, 40)));
    assert_eq!(rows.iter().filter(|r| r.0 == "cpi").count(), 49);
    assert_eq!(rows.iter().filter(|r| r.0 == "plenoptic").count(), 6);
    let shared = manifest["results"]["shared_n_x"].as_array().unwrap();
    let at10 = shared.iter().find(|s| s["n_x"] == 10).unwrap();
    assert_eq!((at10["plenoptic_n_u"].as_u64(), at10["cpi_n_u"].as_u64()), (Some(5), Some(40)));
    assert!((manifest["results"]["delta_rho_a"].as_f64().unwrap() - 50e-6).abs() < 1e-15);
}

#[test]
fn defocused_demo_restores_the_slits() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "defocused");
    let manifest = run(&config, &dir.path().join("out"), &[]);
    let results = &manifest["results"];
    let blurred = results["ghost_contrast"].as_f64().unwrap();
    let sharp = results["refocused_contrast"].as_f64().unwrap();
    assert!(blurred < 0.3, "{blurred}");
    assert!(sharp > 0.8, "{sharp}");
    assert_eq!(results["refocused_valid_fraction"].as_f64(), Some(1.0));
}

#[test]
fn output_directory_precedence() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "budget");
    let env_dir = dir.path().join("env");
    let out = cpi_sim(&["run", config.to_str().unwrap()], Some(&env_dir));
    assert!(out.status.success());
    assert!(env_dir.join("manifest.json").exists());

    let flag_dir = dir.path().join("flag");
    let args = ["run", config.to_str().unwrap(), "--out", flag_dir.to_str().unwrap()];
    let other_env = dir.path().join("unused");
    assert!(cpi_sim(&args, Some(&other_env)).status.success());
    assert!(flag_dir.join("manifest.json").exists());
    assert!(!other_env.exists());
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = TempDir::new().unwrap();
    let base = fs::read_to_string(demo_file(dir.path(), "focused")).unwrap();

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, base.replace("z_a = 0.1", "z_a = -0.1")).unwrap();
    let out = cpi_sim(&["validate", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geometry.z_a"));

    let typo = dir.path().join("typo.toml");
    fs::write(&typo, base.replace("z_a = 0.1", "z_a = 0.1\nzz_a = 0.1")).unwrap();
    let out = cpi_sim(&["run", typo.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geometry.zz_a"));

    let coarse = dir.path().join("coarse.toml");
    fs::write(&coarse, base.replace("n_b = 64", "n_b = 64\nn_source = 16")).unwrap();
    let out_dir = dir.path().join("coarse-out");
    let out = cpi_sim(&["run", coarse.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("under-resolved"));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let good = dir.path().join("focused.toml");
    let target = blocker.join("out");
    let out = cpi_sim(&["run", good.to_str().unwrap(), "--out", target.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(4));

    let missing = cpi_sim(&["run", dir.path().join("nope.toml").to_str().unwrap()], None);
    assert_eq!(missing.status.code(), Some(4));
    assert_eq!(cpi_sim(&["demo", "nope"], None).status.code(), Some(2));
}

#[test]
fn validate_prints_a_resolved_config() {
    let dir = TempDir::new().unwrap();
    let config = demo_file(dir.path(), "budget");
    let out = cpi_sim(&["validate", config.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let resolved = cpi_sim::parse_config(&text).unwrap();
    assert_eq!(resolved, cpi_sim::load_config(&config).unwrap());
    assert!(text.contains("seed = 0"));
}

#[test]
fn sampled_masks_load_relative_to_the_config() {
    let dir = TempDir::new().unwrap();
    let mut samples = String::from("# two bumps\nrho,re,im\n");
    for i in 0..=400 {
        let x = -100e-6 + i as f64 * 0.5e-6;
        let t = (-((x.abs() - 50e-6) / 15e-6).powi(2)).exp();
        samples.push_str(&format!("{x:e},{t:e},0\n"));
    }
    fs::write(dir.path().join("mask.csv"), samples).unwrap();
    let base = fs::read_to_string(demo_file(dir.path(), "focused")).unwrap();
    let object = "[object]\nkind = \"sampled\"\nfile = \"mask.csv\"\nfeature_scale = 3e-5\n";
    let start = base.find("[object]").unwrap();
    let end = base.find("[grids]").unwrap();
    let text = format!("{}{object}\n{}", &base[..start], &base[end..]).replace("\"analytic\"", "\"geometric\"");
    let config = dir.path().join("sampled.toml");
    fs::write(&config, text).unwrap();
    let manifest = run(&config, &dir.path().join("out"), &[]);
    let peaks = manifest["results"]["ghost_peaks"].as_array().unwrap();
    assert!((peaks[1].as_f64().unwrap() - 50e-6).abs() <= 2.5e-6);
}
