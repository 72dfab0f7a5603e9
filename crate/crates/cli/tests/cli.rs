use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ostbc_precoder_cli::config::FileConfig;
use tempfile::TempDir;

const HEADER: &str = "power_db,qt,qr,snr_db,frac_interf_limited,interference,ber";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ostbc-precoder"));
    c.env_remove("PRECODER_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

/// Small sample counts so the binary finishes quickly.
fn small(body: &str) -> String {
    format!(
        "n_channel = 12\nn_tilt = 4\nn_corr_samples = 200\nn_noise = 500\nber_channels = 2\n{body}"
    )
}

fn run(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut c = bin();
    c.args(args).arg("--out").arg(out);
    if let Some(cfg) = config {
        c.arg("--config").arg(cfg);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Csv {
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(HEADER));
        Csv {
            rows: lines
                .map(|l| l.split(',').map(str::to_string).collect())
                .collect(),
        }
    }

    fn mode(&self, qt: &str, qr: &str) -> Vec<(f64, f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r[1] == qt && r[2] == qr)
            .map(|r| {
                (
                    r[0].parse().unwrap(),
                    r[3].parse().unwrap(),
                    r[4].parse().unwrap(),
                )
            })
            .collect()
    }
}

#[test]
fn minimal_sweep_writes_all_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small("power_db = [-10.0, 0.0, 10.0]\neta_db = 0.0\n"),
    );
    let out = dir.path().join("out");
    let o = run(&[], Some(&cfg), &out);
    assert!(o.status.success(), "{}", stderr(&o));

    let csv = Csv::read(&out.join("result.csv"));
    assert_eq!(csv.rows.len(), 3);
    assert!(csv.rows.iter().all(|r| r.len() == 7 && r[6].is_empty()));

    let svg = fs::read_to_string(out.join("snr_vs_power.svg")).unwrap();
    assert!(svg.contains("P_maxSU/P_noise (dB)") && svg.contains("Average SNR at SR (dB)"));
    // four modes plus the selected curve
    assert_eq!(svg.matches("<polyline").count(), 5);

    // chosen mode printed per power point
    let text = stdout(&o);
    assert_eq!(text.matches("chosen").count(), 3, "{text}");
    assert!(text.contains("seed 1"));

    let manifest = fs::read_to_string(out.join("run_manifest.txt")).unwrap();
    assert!(manifest.contains("# seed = 1"));
    let reloaded = FileConfig::from_toml(&manifest).unwrap();
    assert_eq!(reloaded.n_tilt, Some(4));
    assert_eq!(reloaded.sl.n_path, Some(2));
}

#[test]
fn csv_is_byte_identical_for_a_seed_and_thread_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small("power_db = [-10.0, 10.0, 30.0]\neta_db = 0.0\n[spl]\nn_path = 4\n"),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert!(run(&[], Some(&cfg), &a).status.success());
    let o = bin()
        .env("PRECODER_THREADS", "1")
        .args([
            "--out",
            b.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(run(&["--seed", "99"], Some(&cfg), &c).status.success());

    let bytes = |d: &Path| fs::read(d.join("result.csv")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&c));
    assert!(fs::read_to_string(c.join("run_manifest.txt"))
        .unwrap()
        .contains("seed = 99"));
}

#[test]
fn mode_comparison_puts_matched_above_mismatched() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small("code = \"C2\"\npower_db = [-10.0, 0.0, 10.0]\neta_db = 0.0\n[sl]\nn_r = 1\nn_path = 2\n[spl]\nn_r = 2\nn_path = 1\n"),
    );
    let out = dir.path().join("out");
    let o = run(&["--command", "compare-modes"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("matched minus mismatched").count(), 3);

    let csv = Csv::read(&out.join("result.csv"));
    assert_eq!(csv.rows.len(), 12);
    let svg = fs::read_to_string(out.join("snr_vs_power.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
    let (vv, hh, vh, hv) = (
        csv.mode("V", "V"),
        csv.mode("H", "H"),
        csv.mode("V", "H"),
        csv.mode("H", "V"),
    );
    for i in 0..3 {
        assert!(vv[i].1.min(hh[i].1) > vh[i].1.max(hv[i].1), "point {i}");
    }
}

/// Power at which the interference-limited fraction first reaches one half.
fn half_crossing(points: &[(f64, f64, f64)]) -> f64 {
    points
        .iter()
        .find(|p| p.2 >= 0.5)
        .map_or(f64::INFINITY, |p| p.0)
}

#[test]
fn four_antennas_delay_saturation() {
    let dir = TempDir::new().unwrap();
    let mut crossings = Vec::new();
    for code in ["C2", "C4"] {
        let cfg = write_config(
            dir.path(),
            &format!("{code}.toml"),
            &format!(
                "code = \"{code}\"\nmode = \"VV\"\nn_channel = 40\nn_tilt = 8\nn_corr_samples = 300\n\
                 power_db = {{ from = -20.0, to = 40.0, step = 4.0 }}\neta_db = 0.0\n\
                 [sl]\nn_r = 1\nn_path = 2\n[spl]\nn_r = 4\nn_path = 6\n"
            ),
        );
        let out = dir.path().join(code);
        let o = run(&[], Some(&cfg), &out);
        assert!(o.status.success(), "{}", stderr(&o));
        crossings.push(half_crossing(
            &Csv::read(&out.join("result.csv")).mode("V", "V"),
        ));
    }
    assert!(crossings[1] > crossings[0], "{crossings:?}");
}

#[test]
fn ber_command_fills_the_ber_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small("power_db = [0.0, 20.0]\neta_db = 0.0\n"),
    );
    let out = dir.path().join("out");
    let o = run(&["--command", "ber"], Some(&cfg), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = Csv::read(&out.join("result.csv"));
    let ber: Vec<f64> = csv.rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(ber.iter().all(|b| (0.0..=0.5).contains(b)));
    assert!(ber[1] < ber[0]);
}

#[test]
fn config_errors_exit_1_before_any_output() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("empty.toml", "power_db = []\neta_db = 0.0\n", "power_db"),
        (
            "typo.toml",
            "power_db = [0.0]\neta_db = 0.0\n[sl]\nxpdd_db = 8.0\n",
            "xpdd_db",
        ),
        ("noeta.toml", "power_db = [0.0]\n", "eta_db"),
        (
            "neg.toml",
            "power_db = [0.0]\neta_db = 0.0\nn_tilt = -1\n",
            "n_tilt",
        ),
    ];
    for (name, body, key) in cases {
        let cfg = write_config(dir.path(), name, body);
        let out = dir.path().join(name).with_extension("out");
        let o = run(&[], Some(&cfg), &out);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(stderr(&o).contains(key), "{name}: {}", stderr(&o));
        assert!(!out.exists(), "{name}");
    }

    let missing = run(
        &[],
        Some(&dir.path().join("nope.toml")),
        &dir.path().join("x"),
    );
    assert_eq!(missing.status.code(), Some(1));
    let no_config = run(&[], None, &dir.path().join("y"));
    assert_eq!(no_config.status.code(), Some(1));
    assert!(stderr(&no_config).contains("--config"));

    let cfg = write_config(
        dir.path(),
        "ok.toml",
        &small("power_db = [0.0]\neta_db = 0.0\n"),
    );
    let threads = bin()
        .env("PRECODER_THREADS", "many")
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("z").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn degenerate_sweep_exits_2_and_clears_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &small("power_db = [0.0]\neta_db = 0.0\nmode = \"VH\"\n[sl]\nxpd_db = inf\n"),
    );
    let out = dir.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("result.csv"), "stale").unwrap();
    let o = run(&[], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("degenerate"));
    assert!(!out.join("result.csv").exists());
    assert!(!out.join("snr_vs_power.svg").exists());
    assert!(!out.join("run_manifest.txt").exists());
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = run(&["--command", "verify", "--seed", "5"], None, dir.path());
    let b = run(&["--command", "verify", "--seed", "5"], None, dir.path());
    assert!(a.status.success(), "{}{}", stdout(&a), stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("verify seed=5"));
    assert!(!stdout(&a).contains("FAIL"));
}

#[test]
fn verify_with_printed_q_fails_with_replay_seed() {
    let dir = TempDir::new().unwrap();
    let o = run(
        &["--command", "verify", "--q-form", "printed"],
        None,
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL structure constraint"));
    assert!(stderr(&o).contains("replay seed"));
}
