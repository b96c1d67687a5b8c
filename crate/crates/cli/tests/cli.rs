use std::path::PathBuf;
use std::process::{Command, Output};

fn mvl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvl"))
        .args(args)
        .env("MVL_SEED_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_inverter() {
    let o = mvl(&["run", &fixture("inverter.net"), "--inputs", "in=0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "out 0.9 V digit 1");
}

#[test]
fn missing_input_is_a_design_error() {
    let o = mvl(&["run", &fixture("inverter.net")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_net_is_a_design_error() {
    let o = mvl(&["run", &fixture("inverter.net"), "--inputs", "x=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conflict_exits_three() {
    let o = mvl(&["run", &fixture("fight.net"), "--inputs", "a=0,b=1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out"));
    let ok = mvl(&["run", &fixture("fight.net"), "--inputs", "a=1,b=1"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn verify_cells() {
    let o = mvl(&["verify", "qfa1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("32/32"));
    let o = mvl(&["verify", "tfa2,swing=reduced,digits=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("162/162"));
}

#[test]
fn bad_design_specs_exit_two() {
    for spec in ["qfa1,swing=full", "bfa2,vdd=0.7", "nope"] {
        let o = mvl(&["verify", spec]);
        assert_eq!(o.status.code(), Some(2), "{spec}");
    }
}

#[test]
fn bench_is_deterministic_csv() {
    let a = mvl(&["bench", "bfa2,vdd=0.45", "--cl", "1"]);
    let b = mvl(&["bench", "bfa2,vdd=0.45", "--cl", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "design,radix,digits,swing_v,vdd_v,cl_ff,d_in_cout_s,d_in_sum_s,d_cin_cout_s,d_cin_sum_s,power_w,pdp_j,area_nm"
    );
    assert!(lines.next().unwrap().starts_with("BFA2@0.45V,2,1,0.45,0.45,1,"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("calibrated-model"));
}

#[test]
fn sweep_reports_fits() {
    let o = mvl(&["sweep", "tfa2", "--cl", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("TFA2-full,")).count(), 3);
    assert_eq!(text.lines().filter(|l| l.starts_with("# fit")).count(), 4);
}

#[test]
fn dump_round_trips_through_run() {
    let o = mvl(&["dump", "bfa1"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("mvl-dump-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bfa1.net");
    std::fs::write(&file, &o.stdout).unwrap();
    let r = mvl(&["run", file.to_str().unwrap(), "--inputs", "A=1,B=1,Cin=1"]);
    assert_eq!(r.status.code(), Some(0));
    let out = stdout(&r);
    assert!(
        out.contains("Cout 0.9 V digit 1") && out.contains("Sum 0.9 V digit 1"),
        "{out}"
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn compare_cpa_writes_all_outputs() {
    let dir = std::env::temp_dir().join(format!("mvl-cmp-{}", std::process::id()));
    let o = mvl(&["compare-cpa", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "compare_cpa.csv",
        "compare_cpa.md",
        "delay.dat",
        "power.dat",
        "pdp.dat",
        "area.dat",
    ] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let md = std::fs::read_to_string(dir.join("compare_cpa.md")).unwrap();
    assert!(md.contains("calibrated-model values"));
    assert!(!md.contains("FAIL"), "{md}");
    let csv = std::fs::read_to_string(dir.join("compare_cpa.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    std::fs::remove_dir_all(dir).ok();
}
