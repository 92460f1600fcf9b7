use std::path::PathBuf;
use std::process::{Command, Output};

fn eprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eprod")).args(args).env_remove("EPROD_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Reads column `name` of the first data row of a CSV output.
fn field(out: &str, name: &str) -> String {
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().next().unwrap().unwrap()[idx].to_string()
}

fn number(out: &str, name: &str) -> f64 {
    field(out, name).parse().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eprod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn operator_json(dims: &[usize], diag_or_full: &[(usize, f64)]) -> String {
    let d: usize = dims.iter().product();
    let mut entries = vec!["[0,0]".to_string(); d * d];
    for &(k, v) in diag_or_full {
        entries[k] = format!("[{v},0]");
    }
    format!(r#"{{"kind":"operator","dims":{dims:?},"entries":[{}]}}"#, entries.join(","))
}

#[test]
fn ghz_six_in_bits() {
    let o = eprod(&["compute", "--family", "ghz", "--n", "6", "--base", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((number(&s, "epsilon") - 5.0).abs() < 1e-9);
    assert_eq!(field(&s, "converged"), "true");
}

#[test]
fn fermionic_hartree_fock_three() {
    let o = eprod(&["compute", "--family", "hartree-fock", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((number(&stdout(&o), "epsilon") - 1.504077).abs() < 1e-6);
}

#[test]
fn product_multicat_has_no_production() {
    let o = eprod(&["compute", "--family", "multicat", "--n", "4", "--c1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(number(&stdout(&o), "epsilon").abs() < 1e-9);
}

#[test]
fn json_output_parses() {
    let o = eprod(&["compute", "--family", "mixed-multimode", "--n", "3", "--p", "2", "--coeffs", "0.5,0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v[0]["epsilon"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn measure_file_epr_and_product() {
    // |Φ+⟩⟨Φ+| on 2 ⊗ 2: entries (0,0), (0,3), (3,0), (3,3) equal 1/2
    let epr = scratch("epr.json", &operator_json(&[2, 2], &[(0, 0.5), (3, 0.5), (12, 0.5), (15, 0.5)]));
    let o = eprod(&["measure-file", epr.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!((number(&stdout(&o), "epsilon") - 2f64.ln()).abs() < 1e-9);

    let prod = scratch("prod.json", &operator_json(&[2, 2], &[(0, 1.0)]));
    let o = eprod(&["measure-file", prod.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(number(&stdout(&o), "epsilon").abs() < 1e-12);

    let ket = scratch("ket.json", r#"{"kind":"ket","dims":[2,2],"entries":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}"#);
    let o = eprod(&["measure-file", ket.to_str().unwrap(), "--base", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((number(&stdout(&o), "epsilon") - 1.0).abs() < 1e-9);
}

#[test]
fn measure_file_errors() {
    let zero = scratch("zero.json", &operator_json(&[2, 2], &[(0, 1.0), (15, -1.0)]));
    assert_eq!(eprod(&["measure-file", zero.to_str().unwrap()]).status.code(), Some(4));
    let bad = scratch("bad.json", "{not json");
    assert_eq!(eprod(&["measure-file", bad.to_str().unwrap()]).status.code(), Some(2));
    let short = scratch("short.json", r#"{"kind":"operator","dims":[2,2],"entries":[[1,0]]}"#);
    assert_eq!(eprod(&["measure-file", short.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(eprod(&["measure-file", "/nonexistent/eprod.json"]).status.code(), Some(2));
}

#[test]
fn thermal_grid_agrees() {
    let o = eprod(&["thermal", "--g-steps", "5", "--b-steps", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let grid = rows.iter().filter(|r| &r[0] == "ising").count();
    assert_eq!(grid, 20);
    assert!(rows.iter().any(|r| &r[0] == "ising_limit"));
}

#[test]
fn rabi_half_period_is_product() {
    let o = eprod(&["evolve", "--rabi", "1", "--t-max", "3.141592653589793", "--t-steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let eps: Vec<f64> = r.records().map(|r| r.unwrap()[6].parse().unwrap()).collect();
    assert!(eps[0].abs() < 1e-12 && eps[2].abs() < 1e-12);
    assert!((eps[1] - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn trajectory_file_validation() {
    let good = scratch("traj.csv", "t,w1,w2,w3\n# comment\n0,1,0,0\n1,0.5,0.25,0.25\n");
    let o = eprod(&["evolve", "--trajectory", good.to_str().unwrap(), "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = scratch("traj-bad.csv", "0,0.6,0.6\n");
    assert_eq!(eprod(&["evolve", "--trajectory", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn transitions_table() {
    let o = eprod(&["transitions", "--transition", "bec", "--n", "1000", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("transition,N,p,"));
    assert_eq!(s.lines().count(), 3);
    assert_eq!(eprod(&["transitions", "--magnetization", "0.9"]).status.code(), Some(2));
}

#[test]
fn reproduce_one_key() {
    assert_eq!(eprod(&["reproduce", "--only", "eq75"]).status.code(), Some(0));
    assert_eq!(eprod(&["reproduce", "--only", "eq9999"]).status.code(), Some(2));
}

#[test]
fn seed_from_environment_is_deterministic() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_eprod"))
            .args(["compute", "--family", "multimode", "--n", "3", "--coeffs", "0.6,0.8:0.0"])
            .env("EPROD_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b) = (run("17"), run("17"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("nope").status.code(), Some(2));
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("eprod-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ghz.csv");
    let o = eprod(&["compute", "--family", "ghz", "--n", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let s = std::fs::read_to_string(&path).unwrap();
    assert!((number(&s, "epsilon") - 4f64.ln()).abs() < 1e-9);
}

#[test]
fn measure_file_respects_sampled_lower_bound() {
    use eprod_core::dnorm::dnorm_bruteforce;
    use eprod_core::interchange::Document;

    // fixed Hermitian 2 ⊗ 2 operator: H[i][j] = conj(H[j][i])
    let mut entries = Vec::new();
    for i in 0..4usize {
        for j in 0..4usize {
            let (lo, hi) = (i.min(j), i.max(j));
            let re = ((lo * 7 + hi * 3) as f64 + 0.5).sin();
            let im = if i == j { 0.0 } else { ((lo * 5 + hi * 11) as f64).cos() * if i < j { 1.0 } else { -1.0 } };
            entries.push(format!("[{re},{im}]"));
        }
    }
    let path = scratch("herm.json", &format!(r#"{{"kind":"operator","dims":[2,2],"entries":[{}]}}"#, entries.join(",")));

    let o = eprod(&["measure-file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let norm = v[0]["norm_a"].as_f64().unwrap();
    let a = Document::read(&path).unwrap().to_operator().unwrap();
    let lower = dnorm_bruteforce(&a, 20_000, 3).unwrap();
    assert!(lower <= norm + 1e-9, "{lower} > {norm}");
}

#[test]
fn reproduce_ghz_rows_in_bits_are_integers() {
    let o = eprod(&["reproduce", "--only", "eq34", "--base", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let mut seen = 0;
    for rec in r.records().map(Result::unwrap).filter(|r| &r[1] == "eq34") {
        let v: f64 = rec[3].parse().unwrap();
        assert!((v - v.round()).abs() < 1e-9, "{v}");
        seen += 1;
    }
    assert!(seen >= 5);
}
