use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_overconvergent"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn ramified_prime_is_an_invalid_config() {
    assert_eq!(run(&["slopes", "--p", "2"]).0, 2);
}

#[test]
fn malformed_weight_is_an_invalid_config() {
    assert_eq!(run(&["slopes", "--weight", "two"]).0, 2);
    assert_eq!(run(&["classical", "--weight", "0,3"]).0, 2);
}

#[test]
fn slopes_emits_json_and_csv() {
    let (code, out) = run(&["slopes", "--weight", "2,0", "--degree-cutoff", "30", "--t-degree", "8"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["operators"][0]["slopes"]["slopes"][0]["slope"], "1/1");
    let (code, csv) = run(&["slopes", "--weight", "2,0", "--degree-cutoff", "30", "--t-degree", "8", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("operator,weight,slope,mult\n"));
    assert!(csv.contains("U3,\"2,0\",1/1,1"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("oc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("job.conf");
    std::fs::write(&cfg, "# job\np = 2\nweight = 2,0\ndegree-cutoff = 30\nt-degree = 8\n").unwrap();
    assert_eq!(run(&["classical", "--config", cfg.to_str().unwrap()]).0, 2);
    let out = dir.join("out.json");
    let (code, _) = run(&["classical", "--config", cfg.to_str().unwrap(), "--p", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["operators"][0]["classical_dim"], 1);
}

#[test]
fn corrupted_cosets_fail_certification() {
    let dir = std::env::temp_dir().join(format!("oc-cosets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dq = overconvergent::quaternion::build_double_quotient(3, overconvergent::quaternion::Level::Iwahori, 35).unwrap();
    let mut data = overconvergent::quaternion::hecke_coset_data(overconvergent::quaternion::Operator::Up, &dq).unwrap();
    data.global[0][0].pop();
    data.local[0][0].pop();
    let path = dir.join("cosets.json");
    std::fs::write(&path, serde_json::to_string(&vec![data]).unwrap()).unwrap();
    let (code, _) = run(&["slopes", "--cosets", path.to_str().unwrap(), "--degree-cutoff", "20"]);
    assert_eq!(code, 3);
}

#[test]
fn verify_passes_at_small_scale() {
    let (code, out) = run(&["verify", "--degree-cutoff", "20", "--t-degree", "6", "--s-order", "4"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn family_accepts_disc_syntax() {
    let (code, out) = run(&["family", "--family", "center=0,0 radius=0 order=4 at=0|2", "--degree-cutoff", "20", "--t-degree", "6"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["s_degree"], 4);
    assert_eq!(run(&["family", "--family", "0,0 radius=x"]).0, 2);
}
