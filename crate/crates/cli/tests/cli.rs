use std::path::Path;
use std::process::{Command, Output};

fn mixtri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixtri"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn help_matches_golden_file() {
    let o = mixtri(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/help.txt"));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();

    let o = mixtri(&[
        "--out",
        out,
        "--alpha-deg",
        "45",
        "--beta-deg",
        "45",
        "--n",
        "32",
        "verify",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("check.closed_form_mu = PASS"));

    assert_eq!(mixtri(&["--out", out, "sweep", "--k", "0"]).status.code(), Some(1));
    assert_eq!(mixtri(&["--bogus"]).status.code(), Some(1));
    assert_eq!(mixtri(&["--out", out, "eigen"]).status.code(), Some(1));
    assert_eq!(
        mixtri(&["--out", out, "--alpha-deg", "100", "--beta-deg", "90", "mesh"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(mixtri(&["--version"]).status.code(), Some(0));
}

#[test]
fn outputs_are_hashed_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |root: &Path| {
        let root = root.to_str().unwrap();
        for args in [
            &["geom"][..],
            &["mesh"][..],
            &["eigen"][..],
            &["semilinear", "--f", "power:3"][..],
        ] {
            let mut full = vec!["--out", root, "--alpha-deg", "48", "--beta-deg", "33", "--n", "16"];
            full.extend_from_slice(args);
            let o = mixtri(&full);
            assert!(
                matches!(o.status.code(), Some(0 | 2)),
                "{args:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        let o = mixtri(&[
            "--out",
            root,
            "--n",
            "8",
            "--workers",
            "2",
            "sweep",
            "--k",
            "3",
            "--lo-deg",
            "20",
            "--hi-deg",
            "60",
        ]);
        assert!(matches!(o.status.code(), Some(0 | 2)));
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&a);
    run(&b);
    for (sub, files) in [
        ("geom/48x33", &["geom.txt", "geom.svg"][..]),
        ("mesh/48x33", &["mesh.txt", "validation.txt"][..]),
        ("eigen/48x33", &["eigen.txt", "report.txt"][..]),
        ("semilinear/48x33", &["semilinear.txt"][..]),
        ("sweep/20-60_k3", &["sweep.csv", "phase.svg", "summary.txt"][..]),
    ] {
        let manifest = read(a.join(sub).join("manifest.txt"));
        assert_eq!(manifest.lines().count(), files.len(), "{sub}");
        for f in files {
            let line = manifest.lines().find(|l| l.ends_with(&format!("  {f}"))).expect(f);
            assert_eq!(line.split("  ").next().unwrap().len(), 64);
            assert_eq!(read(a.join(sub).join(f)), read(b.join(sub).join(f)), "{sub}/{f}");
        }
        assert_eq!(manifest, read(b.join(sub).join("manifest.txt")));
    }
    let csv = read(a.join("sweep/20-60_k3/sweep.csv"));
    assert!(csv.starts_with("alpha_deg,beta_deg,gamma_deg,"));
    assert_eq!(csv.lines().count(), 1 + 9);
}

#[test]
fn config_file_fills_missing_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "alpha_deg = 30\nbeta-deg = 40\nn = 12\n").unwrap();
    let out = tmp.path().join("o");
    let o = mixtri(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--beta-deg",
        "50",
        "mesh",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read(out.join("mesh/30x50/validation.txt"));
    assert!(v.contains("n = 12\n"), "{v}");

    std::fs::write(&cfg, "alpha_deg = 30\ncolour = red\n").unwrap();
    let o = mixtri(&["--config", cfg.to_str().unwrap(), "mesh"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains(":2:"));
}

#[test]
fn continuation_writes_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = mixtri(&[
        "--out", out, "--n", "12", "continue", "--t-stop", "2", "--t-step", "0.5",
    ]);
    assert!(matches!(o.status.code(), Some(0 | 2)));
    let csv = read(tmp.path().join("continue/a-1.1_b1.2/path.csv"));
    assert_eq!(csv.lines().count(), 1 + 3);
    assert_eq!(
        mixtri(&["--out", out, "continue", "--a", "0.5"]).status.code(),
        Some(1),
        "a must be negative"
    );
}
