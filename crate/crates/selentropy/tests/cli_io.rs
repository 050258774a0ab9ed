//! Black-box tests of the `sel` binary: outputs, exit codes, CSV
//! determinism and file round trips.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sel"))
}

fn fixture_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sel_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn bell_file(dir: &Path) -> PathBuf {
    let p = dir.join("bell.json");
    write(
        &p,
        r#"{"systems": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
           "matrix": {"re": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]]}}"#,
    );
    p
}

fn bernoulli_file(dir: &Path) -> PathBuf {
    let p = dir.join("bern02.json");
    write(
        &p,
        r#"{"systems": [{"label": "X", "dim": 2}],
           "matrix": {"re": [[0.8,0],[0,0.2]]},
           "classical": ["X"]}"#,
    );
    p
}

#[test]
fn entropy_min_of_bell_state() {
    let dir = fixture_dir();
    let out = bin()
        .args(["entropy", "--state"])
        .arg(bell_file(&dir))
        .args(["--kind", "min", "--a", "A", "--b", "B"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-1.000000"), "{text}");
}

#[test]
fn entropy_max_of_bernoulli() {
    let dir = fixture_dir();
    let out = bin()
        .args(["entropy", "--state"])
        .arg(bernoulli_file(&dir))
        .args(["--kind", "max", "--a", "X"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 2 log2(sqrt(0.8) + sqrt(0.2)) = log2(1.8)
    assert!(text.contains("0.847997"), "{text}");
}

#[test]
fn smooth_with_zero_eps_matches_plain_entropy() {
    let dir = fixture_dir();
    let state = bell_file(&dir);
    let plain = bin()
        .args(["entropy", "--state"])
        .arg(&state)
        .args(["--kind", "min", "--a", "A", "--b", "B"])
        .output()
        .unwrap();
    let smooth = bin()
        .args(["entropy", "--state"])
        .arg(&state)
        .args(["--kind", "min", "--a", "A", "--b", "B", "--eps", "0"])
        .output()
        .unwrap();
    let p = String::from_utf8(plain.stdout).unwrap();
    let s = String::from_utf8(smooth.stdout).unwrap();
    let value = |t: &str| t.split('=').nth(1).unwrap().trim().split(' ').next().unwrap().to_string();
    assert_eq!(value(&p), value(&s));
}

#[test]
fn distance_between_files() {
    let dir = fixture_dir();
    let bell = bell_file(&dir);
    let zero = dir.join("zero.json");
    write(
        &zero,
        r#"{"systems": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
           "matrix": {"re": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#,
    );
    let out = bin()
        .args(["distance", "--kind", "purified", "--state"])
        .arg(&bell)
        .arg("--state")
        .arg(&zero)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // F(bell, |00>) = 1/sqrt(2), P = sqrt(1 - 1/2)
    assert!(text.contains("0.7071"), "{text}");
}

#[test]
fn qkd_csv_deterministic_and_monotone() {
    let run = || {
        bin()
            .args(["qkd", "--q", "0.05", "--eps", "1e-3", "--eps2", "1e-3"])
            .args(["--n", "10000,100000,1000000,100000000"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "identical config must give identical CSV");
    let text = String::from_utf8(a.stdout).unwrap();
    let rates: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    assert!((rates.last().unwrap() - 0.4272).abs() < 0.01);
}

#[test]
fn exit_codes() {
    // 2: parse failure
    let out = bin()
        .args(["entropy", "--state", "/definitely/not/here.json", "--kind", "min", "--a", "A"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // 4: validity threshold
    let out = bin()
        .args(["aep", "--h", "0.7", "--v", "3.1", "--eps", "0.1", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    // 0: fine
    let out = bin()
        .args(["aep", "--h", "0.7", "--v", "3.1", "--eps", "0.1", "--n", "100,1000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn compress_and_extract_sims() {
    let dir = fixture_dir();
    let dist = dir.join("dist.json");
    write(&dist, r#"{"probs": [[0.4, 0.1], [0.1, 0.4]]}"#);
    let out = bin()
        .args(["compress-sim", "--dist"])
        .arg(&dist)
        .args(["--n", "4", "--m", "8", "--trials", "2000", "--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = String::from_utf8(out.stdout).unwrap();
    assert!(a.starts_with("p_err = "), "{a}");
    // deterministic per seed
    let out2 = bin()
        .args(["compress-sim", "--dist"])
        .arg(&dist)
        .args(["--n", "4", "--m", "8", "--trials", "2000", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(a, String::from_utf8(out2.stdout).unwrap());
    // sharded determinism: different worker counts, same result
    let out3 = bin()
        .args(["compress-sim", "--workers", "1", "--dist"])
        .arg(&dist)
        .args(["--n", "4", "--m", "8", "--trials", "2000", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(a, String::from_utf8(out3.stdout).unwrap());

    let parity = dir.join("parity.json");
    write(
        &parity,
        r#"{"probs": [[0.125,0],[0,0.125],[0,0.125],[0.125,0],[0,0.125],[0.125,0],[0.125,0],[0,0.125]]}"#,
    );
    let out = bin()
        .args(["extract-sim", "--dist"])
        .arg(&parity)
        .args(["--ell", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.trim().split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!(v <= 0.35356, "{v}");
}

#[test]
fn sdp_solve_fixture() {
    let dir = fixture_dir();
    let problem = dir.join("problem.json");
    // min tr(sigma) s.t. sigma >= diag(0.3, 0.7) via the identity map
    write(
        &problem,
        r#"{"objective": {"re": [[1,0],[0,1]]},
            "offset": {"re": [[0.3,0],[0,0.7]]},
            "choi": {"re": [[1,0,0,1],[0,0,0,0],[0,0,0,0],[1,0,0,1]]}}"#,
    );
    let out = bin().args(["sdp-solve", "--problem"]).arg(&problem).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let alpha: f64 = text
        .lines()
        .find(|l| l.starts_with("alpha"))
        .unwrap()
        .split('=')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let gap: f64 = text
        .lines()
        .find(|l| l.starts_with("gap"))
        .unwrap()
        .split('=')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((alpha - 1.0).abs() < 1e-6, "{text}");
    assert!(gap.abs() <= 1e-7, "{text}");
}

#[test]
fn ucr_fixture_residual_nonnegative() {
    let dir = fixture_dir();
    // random-ish pure 3-qubit state written by hand: |000> + |011> + |101>
    let s = 1.0 / 3.0f64.sqrt();
    let mut re = vec![vec![0.0; 8]; 8];
    let amps = [(0usize, s), (3, s), (5, s)];
    for (i, ai) in amps {
        for (j, aj) in amps {
            re[i][j] = ai * aj;
        }
    }
    let state = dir.join("tri.json");
    let json = serde_json::json!({
        "systems": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}, {"label": "C", "dim": 2}],
        "matrix": {"re": re}
    });
    write(&state, &json.to_string());
    let comp = dir.join("comp.json");
    write(&comp, r#"{"elements": [{"re": [[1,0],[0,0]]}, {"re": [[0,0],[0,1]]}]}"#);
    let had = dir.join("had.json");
    write(
        &had,
        r#"{"elements": [{"re": [[0.5,0.5],[0.5,0.5]]}, {"re": [[0.5,-0.5],[-0.5,0.5]]}]}"#,
    );
    let out = bin()
        .args(["ucr", "--state"])
        .arg(&state)
        .arg("--x")
        .arg(&comp)
        .arg("--y")
        .arg(&had)
        .args(["--a", "A", "--b", "B", "--c", "C"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.trim().split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!(v >= -5e-6, "{v}");
}

#[test]
fn figure61_csv_to_file() {
    let dir = fixture_dir();
    let out_path = dir.join("fig.csv");
    let out = bin()
        .args(["figure61", "--p", "0.2", "--n", "5,10", "--eps", "0.05", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("n,cumulative_probability,surprisal_per_round"));
    // 6 + 11 type classes
    assert_eq!(text.lines().count(), 1 + 6 + 11);
}

#[test]
fn gap_tol_env_override() {
    let dir = fixture_dir();
    let out = bin()
        .env("SEL_GAP_TOL", "1e-6")
        .args(["entropy", "--state"])
        .arg(bell_file(&dir))
        .args(["--kind", "min", "--a", "A", "--b", "B"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .env("SEL_GAP_TOL", "not-a-number")
        .args(["entropy", "--state"])
        .arg(bell_file(&dir))
        .args(["--kind", "min", "--a", "A", "--b", "B"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_file_round_trip_via_library() {
    use selentropy::cli::{load_state, save_state};
    use selentropy::operators::{random_state, SystemLayout};
    let dir = fixture_dir();
    let path = dir.join("round.json");
    let layout = SystemLayout::new(&[("A", 3), ("B", 2)]).unwrap();
    let rho = random_state(&layout, 4, 123).unwrap();
    save_state(&rho, &path).unwrap();
    let back = load_state(&path).unwrap();
    assert!(back.op().sub(rho.op()).max_abs() < 1e-12);
}
