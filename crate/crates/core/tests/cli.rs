use std::process::{Command, Output};

use serde_json::Value;

fn vhodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vhodge"))
        .args(args)
        .output()
        .expect("run vhodge")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

#[test]
fn verify_algebra_exit_codes() {
    let ok = vhodge(&[
        "verify-algebra",
        "--dim",
        "3",
        "--trials",
        "200",
        "--seed",
        "1",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let r = report(&ok);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["config"]["command"], "verify-algebra");
    assert_eq!(r["passed"], true);

    let zero = vhodge(&["verify-algebra", "--trials", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    let cap = vhodge(&["verify-algebra", "--dim", "9"]);
    assert_eq!(cap.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&cap.stderr).contains("dimension cap exceeded"));
}

#[test]
fn betti_tables_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("torus.off");
    let annulus = dir.path().join("annulus.off");
    for (name, path) in [("torus", &torus), ("annulus", &annulus)] {
        let out = vhodge(&[
            "generate-mesh",
            "--name",
            name,
            "--mesh-output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let t = vhodge(&[
        "betti",
        "--mesh",
        torus.to_str().unwrap(),
        "--field",
        "random",
    ]);
    assert_eq!(t.status.code(), Some(0));
    assert_eq!(
        report(&t)["result"]["dimensions"]["closed"],
        serde_json::json!({"k0": 1, "k1": 2, "k2": 1})
    );
    let a = vhodge(&[
        "betti",
        "--mesh",
        annulus.to_str().unwrap(),
        "--field",
        "random",
        "--bc",
        "normal",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        report(&a)["result"]["dimensions"]["normal"],
        serde_json::json!({"k0": 0, "k1": 1, "k2": 1})
    );

    let missing = dir.path().join("missing.off");
    let m = vhodge(&["betti", "--mesh", missing.to_str().unwrap()]);
    assert_eq!(m.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&m.stderr).contains(missing.to_str().unwrap()));
}

#[test]
fn decompose_inputs_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let vtk = dir.path().join("parts.vtk");
    let mm = dir.path().join("mm");
    let out = vhodge(&[
        "decompose",
        "--mesh",
        "builtin:annulus",
        "--field",
        "rotational",
        "--vtk",
        vtk.to_str().unwrap(),
        "--matrix-market",
        mm.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["residuals"]["reconstruction"].as_f64().unwrap() <= 1e-8);
    let text = std::fs::read_to_string(&vtk).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0"));
    assert!(text.contains("VECTORS harmonic double"));
    let m1 = std::fs::read_to_string(mm.join("Mv1.mtx")).unwrap();
    assert!(m1
        .to_lowercase()
        .starts_with("%%matrixmarket matrix coordinate real general"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2,").unwrap();
    let b = vhodge(&[
        "decompose",
        "--mesh",
        "builtin:annulus",
        "--form",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(b.status.code(), Some(1));
    let short = dir.path().join("short.json");
    std::fs::write(&short, "[1, 2]").unwrap();
    let s = vhodge(&[
        "decompose",
        "--mesh",
        "builtin:annulus",
        "--form",
        short.to_str().unwrap(),
    ]);
    assert_eq!(s.status.code(), Some(1));
}

#[test]
fn spectrum_and_isometry() {
    let s = vhodge(&[
        "spectrum",
        "--mesh",
        "builtin:torus",
        "--field",
        "random",
        "--k",
        "1",
        "--count",
        "6",
    ]);
    assert_eq!(s.status.code(), Some(0));
    let r = report(&s);
    assert_eq!(r["result"]["spectrum"]["zero_multiplicity"], 2);
    assert_eq!(r["resolved"]["bc"], "closed");
    let too_many = vhodge(&["spectrum", "--mesh", "builtin:triangle", "--count", "50"]);
    assert_eq!(too_many.status.code(), Some(1));

    let iso = vhodge(&[
        "isometry",
        "--mesh",
        "builtin:torus",
        "--field",
        "random",
        "--seed",
        "4",
    ]);
    assert_eq!(iso.status.code(), Some(0));
    assert!(
        report(&iso)["result"]["max_relative_discrepancy"]
            .as_f64()
            .unwrap()
            <= 1e-9
    );
    let id = vhodge(&[
        "isometry",
        "--mesh",
        "builtin:torus",
        "--field",
        "random",
        "--identity",
    ]);
    assert_eq!(id.status.code(), Some(0));
    assert_eq!(report(&id)["result"]["bitwise_equal"], true);
}

#[test]
fn scalar_studies() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("errors.csv");
    let c = vhodge(&[
        "scalar",
        "--study",
        "convergence",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
    let one = vhodge(&["scalar", "--levels", "16"]);
    assert_eq!(one.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&one.stderr).contains("need ≥ 2 levels"));
    let h = vhodge(&["scalar", "--study", "harmonicity"]);
    assert_eq!(h.status.code(), Some(0));
    let r = report(&h);
    assert!(r["result"]["d_residual"].as_f64().unwrap() <= 1e-10);
    assert!(r["result"]["delta_residual"].as_f64().unwrap() <= 1e-10);
    let bad = vhodge(&[
        "scalar",
        "--study",
        "harmonicity",
        "--mesh",
        "builtin:annulus",
        "--field",
        "rotational",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = [
        "decompose",
        "--mesh",
        "builtin:torus:8x6",
        "--field",
        "random:5",
        "--seed",
        "3",
        "--parts",
    ];
    let a = vhodge(&args);
    let b = vhodge(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["config"]["seed"], 3);
    assert_eq!(r["config"]["field"], "random:5");
}
