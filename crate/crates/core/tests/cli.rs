use std::path::PathBuf;
use std::process::{Command, Output};

use padic_gz::padic::{PrimeContext, QuadContext, QuadScalar};
use padic_gz::projline::{DiscAddress, Sampler};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_padic-gz"));
    c.env_remove("PADIC_GZ_MAXDEPTH");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn gen_file(name: &str, extra: &[&str]) -> String {
    let path = scratch(name).display().to_string();
    let mut args = vec!["gen", "-o", &path];
    args.extend(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

#[test]
fn integrate_zero_measure_prints_one() {
    let f = write("zero.toml", "schema_version = 1\np = 5\nprecision = 10\ndepth = 2\nrecords = []\n");
    let o = run(&["integrate", &f, "--tau1", "0,1", "--tau2", "0,-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("1"));
}

#[test]
fn integrate_dipole_matches_cross_ratio() {
    // δ_U - δ_V with U = std 2 1, V = std 2 7 at p = 5
    let f = write(
        "dipole.toml",
        "schema_version = 1\np = 5\nprecision = 10\ndepth = 2\n\
         records = [\"std 1 1 1\", \"std 1 2 -1\", \"std 2 1 1\", \"std 2 7 -1\"]\n",
    );
    let o = run(&["integrate", &f, "--tau1", "0,1", "--tau2", "0,-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let k = PrimeContext::new(5, 10).unwrap();
    let q = QuadContext::inert(k);
    let s = Sampler::new(k);
    let tau = q.from_ints(0, 1);
    let x = QuadScalar::from_base(q, s.sample(&DiscAddress::std(2, 1)));
    let y = QuadScalar::from_base(q, s.sample(&DiscAddress::std(2, 7)));
    // (x - τ̄)(y - τ) / ((x - τ)(y - τ̄))
    let want = x.sub(&tau.conj()).mul(&y.sub(&tau)).div(&x.sub(&tau).mul(&y.sub(&tau.conj()))).unwrap();
    assert_eq!(stdout(&o).lines().next(), Some(want.to_text().as_str()));
}

#[test]
fn integrate_bad_file_reports_location() {
    let f = write("bad.toml", "schema_version = 1\np = 5\nprecision = 8\ndepth = 2\nrecords = [\n");
    let o = run(&["integrate", &f, "--tau1", "0,1", "--tau2", "0,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));

    let f = write("badrec.toml", "schema_version = 1\np = 5\nprecision = 8\ndepth = 2\nrecords = [\"std 2 7 x\"]\n");
    let o = run(&["integrate", &f, "--tau1", "0,1", "--tau2", "0,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("records[0]"), "{}", stderr(&o));
}

#[test]
fn lfactor_examples() {
    let o = run(&["lfactor", "--inert", "--steinberg+", "--s=-1/2"]);
    assert_eq!(stdout(&o).trim(), "pole (exceptional zero)");
    let o = run(&["lfactor", "--split", "--chi-omega=1", "--s=1/2", "--q=5"]);
    assert_eq!(stdout(&o).trim(), "25/16");
    let o = run(&["lfactor", "--s=1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--split"));
    let o = run(&["lfactor", "--table"]);
    // 2 signs × 3 tori × 2 characters × 2 values of s
    assert_eq!(stdout(&o).lines().count(), 24);
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--seed", "11", "--r", "2", "--minus"]);
    let b = run(&["gen", "--seed", "11", "--r", "2", "--minus"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--seed", "12", "--r", "2", "--minus"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_respects_shape() {
    let o = run(&["gen", "--primes=3,5", "--cl=4", "--depth=3", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: toml::Value = toml::from_str(&stdout(&o)).unwrap();
    let primes: Vec<i64> = doc["primes"].as_array().unwrap().iter().map(|p| p["p"].as_integer().unwrap()).collect();
    assert_eq!(primes, vec![3, 5]);
    for p in doc["primes"].as_array().unwrap() {
        assert!(p["depth"].as_integer().unwrap() <= 3);
    }
    let cl: i64 = doc["galois_model"]["orders"].as_array().unwrap().iter().map(|n| n.as_integer().unwrap()).product();
    assert!(cl <= 4);
    for class in doc["measures"].as_array().unwrap() {
        for t in class["tensors"].as_array().unwrap() {
            for f in t["factors"].as_array().unwrap() {
                assert!(f["depth"].as_integer().unwrap() <= 3);
            }
        }
    }
}

#[test]
fn depth_cap_from_environment() {
    let o = bin().args(["gen", "--depth", "4"]).env("PADIC_GZ_MAXDEPTH", "3").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let f = gen_file("deep.toml", &["--seed", "4", "--depth", "4"]);
    let o = bin().args(["verify", &f]).env("PADIC_GZ_MAXDEPTH", "1").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("depth_cap"), "{}", stderr(&o));
}

#[test]
fn verify_generated_seed_one() {
    let f = gen_file("seed1.toml", &["--seed", "1"]);
    let o = run(&["verify", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn verify_plectic_instances() {
    let files: Vec<String> = (20..24)
        .map(|s| gen_file(&format!("plectic{s}.toml"), &["--seed", &s.to_string(), "--r", "2", "--minus"]))
        .collect();
    let mut args = vec!["--format", "json", "verify"];
    args.extend(files.iter().map(String::as_str));
    let serial = run(&args);
    assert_eq!(serial.status.code(), Some(0), "{}", stdout(&serial));
    args.extend(["--jobs", "3"]);
    let parallel = run(&args);
    assert_eq!(serial.stdout, parallel.stdout);
    for line in stdout(&serial).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["record"], "verdict");
        assert_eq!(v["theorem"], "plectic");
    }
}

#[test]
fn broken_additivity_fails_at_load() {
    let f = gen_file("additivity.toml", &["--seed", "1", "--mutate", "additivity"]);
    let o = run(&["verify", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("additivity"), "{}", stderr(&o));
}

#[test]
fn corrupted_rec_fails_with_diff() {
    // seed 5 is one where the moved image is visible in I/I²
    let f = gen_file("rec.toml", &["--seed", "5", "--mutate", "rec"]);
    let o = run(&["verify", &f]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("FAIL"));
    assert!(out.contains("coordinate"), "{out}");
}
