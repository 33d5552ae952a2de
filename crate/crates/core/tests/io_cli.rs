use std::path::Path;
use std::process::{Command, Output};

use biphoton::analysis::{Mode, OperatingPoint, SweepRecord};
use biphoton::detection::CoincidenceHistogram;
use biphoton::io::{
    read_events, read_histogram, read_sweep, render_figure, write_events, write_histogram,
    write_sweep, Figure, RunConfig,
};
use proptest::prelude::*;

fn biphoton(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biphoton"))
        .args(args)
        .env("BIPHOTON_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn error_json(o: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let last = stderr.lines().last().expect("stderr has a line");
    serde_json::from_str(last).expect("last stderr line is JSON")
}

#[test]
fn default_config_round_trips_through_toml() {
    let cfg = RunConfig::default();
    assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn edited_config_round_trips(alpha in 0.0f64..1000.0, eff in 0.0f64..1.0, seed in 0..=i64::MAX as u64, pump in 0.0f64..64.0) {
        let mut cfg = RunConfig::default();
        cfg.physics.alpha = alpha;
        cfg.detector.eff_s = eff;
        cfg.sim.seed = seed;
        cfg.scenario.pump_mw = pump;
        prop_assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn histogram_csv_round_trip(counts in prop::collection::vec(0u64..100_000, 2..300)) {
        let dir = tempfile::tempdir().unwrap();
        let h = CoincidenceHistogram {
            bin_width_s: 0.8e-9,
            window_s: 0.8e-9 * counts.len() as f64,
            start_s: -0.2e-6,
            duration_s: 0.0,
            counts,
            n_triggers: 0,
        };
        let path = dir.path().join("h.csv");
        write_histogram(&path, &h).unwrap();
        let back = read_histogram(&path).unwrap();
        prop_assert_eq!(&back.counts, &h.counts);
        prop_assert!((back.bin_width_s / h.bin_width_s - 1.0).abs() < 1e-9);
        prop_assert!((back.start_s - h.start_s).abs() < 1e-15);
    }

    #[test]
    fn events_csv_round_trip(
        a in prop::collection::vec(0.0f64..10.0, 0..100),
        s in prop::collection::vec(0.0f64..10.0, 0..100),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_events(&path, &a, &s).unwrap();
        prop_assert_eq!(read_events(&path).unwrap(), (a, s));
    }
}

#[test]
fn sweep_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rec = SweepRecord {
        op: OperatingPoint::measured(2, 8.0),
        generation_rate: 1.23e5,
        linewidth_hz: 1.1e6,
        sbr: 7.5,
        brightness: 1.23e5 / 1.1,
        s_product: 7.5 * 1.23e5 / 1.1,
        background_per_bin: 0.01,
        r_t: 3000.0,
        r_s: 3100.0,
        mode: Mode::Theory,
        seed: 42,
    };
    let path = dir.path().join("s.csv");
    write_sweep(&path, &[rec.clone(), rec.clone()]).unwrap();
    let rows = read_sweep(&path).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].pump_mw, 8.0);
    assert_eq!(rows[0].linewidth_khz, 1100.0);
    assert_eq!(rows[0].mode, Mode::Theory);
}

#[test]
fn svg_axis_tops_out_above_the_data() {
    let fig = Figure::new("t", "x", "y").with_series("a", vec![0.0, 1.0, 2.0], vec![1.0, 4.0, 2.0]);
    let svg = render_figure(&fig).unwrap();
    let attr = svg.split("data-y-max=\"").nth(1).unwrap();
    let v: f64 = attr[..attr.find('"').unwrap()].parse().unwrap();
    assert!((v - 4.2).abs() < 1e-9, "{v}");
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn help_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(biphoton(&["--help"], dir.path()).status.code(), Some(0));
    let bad = biphoton(&["transmogrify"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(error_json(&bad)["error"]["kind"], "usage");
    let bad = biphoton(&["--mode", "mc", "spectrum"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn invalid_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[physics]\nalpha = -3.0\n").unwrap();
    let o = biphoton(&["--config", cfg.to_str().unwrap(), "spectrum"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let e = error_json(&o);
    assert_eq!(e["exit_code"], 1);
    assert!(e["error"]["message"]
        .as_str()
        .unwrap()
        .contains("physics.alpha"));
}

#[test]
fn seed_beyond_toml_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = biphoton(&["--seed", &u64::MAX.to_string(), "spectrum"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(error_json(&o)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("sim.seed"));
}

#[test]
fn flat_histogram_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    let h = CoincidenceHistogram {
        bin_width_s: 0.8e-9,
        window_s: 1.6e-6,
        start_s: -0.2e-6,
        duration_s: 0.0,
        counts: vec![50; 2000],
        n_triggers: 0,
    };
    write_histogram(&path, &h).unwrap();
    let o = biphoton(&["fit", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "numeric");
}

#[test]
fn simulate_is_reproducible_and_refittable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "3", "simulate", "--duration", "2"];
    let oa = biphoton(&args, a.path());
    let ob = biphoton(&args, b.path());
    assert_eq!(
        oa.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&oa.stderr)
    );
    assert_eq!(ob.status.code(), Some(0));
    let manifest = |d: &Path| std::fs::read_to_string(d.join("manifest.json")).unwrap();
    assert_eq!(manifest(a.path()), manifest(b.path()));
    for f in [
        "simulate.json",
        "simulate_histogram.csv",
        "simulate.svg",
        "simulate_events.csv",
    ] {
        assert!(a.path().join(f).exists(), "{f}");
    }
    let hist = a.path().join("simulate_histogram.csv");
    let fit_dir = tempfile::tempdir().unwrap();
    let o = biphoton(
        &["--format", "json", "fit", hist.to_str().unwrap()],
        fit_dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(fit_dir.path().join("fit.json").exists());
    assert!(!fit_dir.path().join("fit.svg").exists());
}

#[test]
fn out_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = biphoton(
        &[
            "--out",
            flag_dir.path().to_str().unwrap(),
            "--format",
            "json",
            "spectrum",
        ],
        env_dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("spectrum.json").exists());
    assert!(!env_dir.path().join("spectrum.json").exists());
}

#[test]
fn small_sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "[sweep]\npumps_mw = [8.0, 16.0]\ntemperatures_c = [60.0, 65.0]\nod = [4.96, 6.08]\n",
    )
    .unwrap();
    let o = biphoton(&["--config", cfg.to_str().unwrap(), "sweep"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rows = read_sweep(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .windows(2)
        .all(|w| (w[0].temp_c, w[0].pump_mw) <= (w[1].temp_c, w[1].pump_mw)));
    for panel in ["rate", "linewidth", "sbr", "brightness", "s"] {
        let svg = std::fs::read_to_string(dir.path().join(format!("sweep_{panel}.svg"))).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2, "{panel}");
    }
}
