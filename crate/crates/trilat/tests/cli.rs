use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn trilat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trilat")).args(args).env("TRILAT_WORKERS", "2").output().expect("run trilat")
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(trilat(&["validate", &path("tetrahedron.tri")]).status.code(), Some(0));
    let bad = trilat(&["validate", &path("degree7.tri")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("vertex 0"));
    assert_eq!(trilat(&["validate", &path("no-such-file.tri")]).status.code(), Some(1));
}

#[test]
fn invariants_are_byte_stable() {
    let a = trilat(&["invariants", &path("icosahedron.tri")]);
    let b = trilat(&["invariants", &path("icosahedron.tri")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!((v["t"].as_str(), v["k"].as_str()), (Some("20"), Some("1")));
    assert_eq!(v["r_type"]["name"], "0");
    let t1: serde_json::Value = serde_json::from_slice(&trilat(&["invariants", &path("t1.tri")]).stdout).unwrap();
    assert_eq!(t1["p_fingerprint"]["root_type"]["roots"], "486");
    let tet: serde_json::Value = serde_json::from_slice(&trilat(&["invariants", &path("tetrahedron.tri")]).stdout).unwrap();
    assert_eq!(tet["r_type"]["name"], "D4^4");
}

#[test]
fn relabeled_copy_has_the_same_record() {
    let a = trilat(&["invariants", &path("octahedron.tri")]);
    let b = trilat(&["invariants", &path("octahedron-relabeled.tri")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compare_verdicts() {
    let o = trilat(&["compare", &path("octahedron.tri"), &path("octahedron-relabeled.tri")]);
    assert_eq!(stdout(&o).trim(), "isomorphic");
    let o = trilat(&["compare", "--json", &path("t1.tri"), &path("t2.tri")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "distinguished");
    assert!(v["differing_fields"].as_array().unwrap().iter().any(|f| f == "p_fingerprint"));
}

#[test]
fn corrupted_lift_is_a_located_breach() {
    let o = trilat(&["verify", &path("octahedron.tri"), "--inject-corrupt-lift", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "trilat-breach/1");
    assert_eq!(v["breaches"][0]["check"], "lift table");
    assert!(v["breaches"][0]["detail"].as_str().unwrap().starts_with("faces ["));
}

#[test]
fn deep_verify_icosahedron() {
    let o = trilat(&["verify", "--deep", &path("icosahedron.tri")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("pass   Re h equals the geodesic Gram"), "{s}");
    assert!(s.contains("pass   delta^E has norm t"), "{s}");
}

#[test]
fn corpus_verify_and_enumerate() {
    let o = trilat(&["verify", "--corpus", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified 26 triangulations"));
    let e = trilat(&["enumerate", "--t-max", "6"]);
    assert_eq!(stdout(&e).lines().count(), 13);
    // worker count does not change the output
    let one = Command::new(env!("CARGO_BIN_EXE_trilat"))
        .args(["verify", "--corpus", "6", "--json"])
        .env("TRILAT_WORKERS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_trilat"))
        .args(["verify", "--corpus", "6", "--json"])
        .env("TRILAT_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn enumerate_writes_parsable_files() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("enumerated");
    let _ = std::fs::remove_dir_all(&dir);
    let o = trilat(&["enumerate", "--t-max", "4", "--out", &dir.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0));
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        assert_eq!(trilat(&["validate", &p.to_string_lossy()]).status.code(), Some(0), "{}", p.display());
        n += 1;
    }
    assert_eq!(n, 6);
}
