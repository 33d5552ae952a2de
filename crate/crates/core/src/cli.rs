//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numeric or I/O
//! failure, 3 acceptance failure. Failures also print one JSON object to
//! stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::acceptance::{self, Criterion, Setup};
use crate::analysis::{
    fit_theory, simulate_point, sweep, AnalysisError, Mode, SweepRecord, SIM_MIN_PEAK_RATIO,
};
use crate::detection::{CoincidenceHistogram, Statistics};
use crate::fitting::{fit_histogram, WavePacketFit};
use crate::io::{
    load_config, read_histogram, render_figure, write_atomic, write_curve, write_events,
    write_histogram, write_sweep, ConfigError, Figure, OutputFormat, RunConfig, RunManifest,
};
use crate::waveform::{spectrum, wavepacket};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "BIPHOTON_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Doppler-broadened biphoton source model"
)]
pub struct Cli {
    /// TOML run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: `output.dir`, else ./out].
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Theory)]
    pub mode: Mode,
    /// Output formats, repeatable or comma separated [default: `output.formats`].
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// G²(τ) from the `[physics]` section, or a simulated histogram at `[scenario]` with --mode mc.
    Wavepacket,
    /// Two-photon spectrum from the `[physics]` section.
    Spectrum,
    /// Monte Carlo accumulation at the `[scenario]` operating point.
    Simulate {
        /// Overrides `sim.duration_s`.
        #[arg(long)]
        duration: Option<f64>,
        /// Overrides `sim.statistics`.
        #[arg(long, value_enum)]
        statistics: Option<Statistics>,
    },
    /// Fits a `delay_ns,counts` histogram.
    Fit {
        input: PathBuf,
        /// Minimum peak-to-baseline ratio accepted before fitting.
        #[arg(long, default_value_t = SIM_MIN_PEAK_RATIO)]
        min_peak_ratio: f64,
    },
    /// Pump-power sweep over the `[sweep]` grid.
    Sweep,
    /// Runs every acceptance measurement and prints one line per criterion.
    Check,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
    #[error("{0} acceptance criteria failed")]
    Acceptance(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Analysis(_) | CliError::Numeric(_) | CliError::Io(_) => 2,
            CliError::Acceptance(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Analysis(_) | CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
            CliError::Acceptance(_) => "acceptance",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() },
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn num_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    formats: Vec<OutputFormat>,
    written: Vec<String>,
}

impl Ctx {
    fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.out.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if self.wants(OutputFormat::Json) {
            let mut bytes = serde_json::to_vec_pretty(value).map_err(io_err)?;
            bytes.push(b'\n');
            let p = self.path(name);
            write_atomic(&p, &bytes).map_err(io_err)?;
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, fig: &Figure) -> Result<(), CliError> {
        if self.wants(OutputFormat::Svg) {
            let text = render_figure(fig).map_err(num_err)?;
            let p = self.path(name);
            write_atomic(&p, text.as_bytes()).map_err(io_err)?;
        }
        Ok(())
    }

    fn curve(&mut self, name: &str, x: &[f64], y: &[f64]) -> Result<(), CliError> {
        if self.wants(OutputFormat::Csv) {
            let p = self.path(name);
            write_curve(&p, x, y).map_err(io_err)?;
        }
        Ok(())
    }

    fn finish(self, command: &str) -> Result<(), CliError> {
        let mut manifest = RunManifest::new(command, &self.cfg.to_toml());
        manifest.record(&self.out, &self.written).map_err(io_err)?;
        manifest.write(&self.out).map_err(io_err)
    }
}

fn context(cli: &Cli) -> Result<Ctx, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Command::Simulate {
        duration,
        statistics,
    } = &cli.command
    {
        if let Some(d) = duration {
            cfg.sim.duration_s = *d;
        }
        if let Some(s) = statistics {
            cfg.sim.statistics = *s;
        }
    }
    cfg.validate()?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let formats = if cli.format.is_empty() {
        cfg.output.formats.clone()
    } else {
        cli.format.clone()
    };
    std::fs::create_dir_all(&out).map_err(io_err)?;
    Ok(Ctx {
        cfg,
        out,
        formats,
        written: Vec::new(),
    })
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let name = match &cli.command {
        Command::Wavepacket => "wavepacket",
        Command::Spectrum => "spectrum",
        Command::Simulate { .. } => "simulate",
        Command::Fit { .. } => "fit",
        Command::Sweep => "sweep",
        Command::Check => "check",
    };
    let theory_only = matches!(cli.command, Command::Spectrum | Command::Fit { .. });
    if theory_only && cli.mode == Mode::Mc {
        return Err(CliError::Usage(format!(
            "--mode mc is not available for `{name}`"
        )));
    }
    let mut ctx = context(cli)?;
    let outcome = match &cli.command {
        Command::Wavepacket => match cli.mode {
            Mode::Theory => cmd_wavepacket(&mut ctx),
            Mode::Mc => cmd_simulate(&mut ctx, "wavepacket"),
        },
        Command::Spectrum => cmd_spectrum(&mut ctx),
        Command::Simulate { .. } => cmd_simulate(&mut ctx, "simulate"),
        Command::Fit {
            input,
            min_peak_ratio,
        } => cmd_fit(&mut ctx, input, *min_peak_ratio),
        Command::Sweep => cmd_sweep(&mut ctx, cli.mode),
        Command::Check => cmd_check(&mut ctx),
    };
    let label = format!("{name} --mode {}", cli.mode);
    match outcome {
        Ok(()) => ctx.finish(&label),
        Err(CliError::Acceptance(n)) => {
            ctx.finish(&label)?;
            Err(CliError::Acceptance(n))
        }
        Err(e) => Err(e),
    }
}

/// Every `stride`-th sample inside [lo, hi].
fn window(x: &[f64], y: &[f64], lo: f64, hi: f64, max_points: usize) -> (Vec<f64>, Vec<f64>) {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
    let stride = idx.len().div_ceil(max_points.max(1)).max(1);
    idx.iter().step_by(stride).map(|&i| (x[i], y[i])).unzip()
}

#[derive(Serialize)]
struct WavepacketSummary {
    peak_s2: f64,
    sampled_fwhm_ns: f64,
    fit_fwhm_ns: f64,
    fit_linewidth_khz: f64,
    fit: WavePacketFit,
}

fn cmd_wavepacket(ctx: &mut Ctx) -> Result<(), CliError> {
    let params = ctx.cfg.physics;
    let wp = wavepacket(&params, &ctx.cfg.grid).map_err(AnalysisError::from)?;
    let fit = fit_theory(&wp, &ctx.cfg.histogram)?;
    let (t, g) = window(&wp.tau_grid, &wp.values, -0.2e-6, 2.0e-6, 4000);
    let t_ns: Vec<f64> = t.iter().map(|v| v * 1e9).collect();
    ctx.curve("wavepacket.csv", &t_ns, &g)?;
    let summary = WavepacketSummary {
        peak_s2: wp.peak(),
        sampled_fwhm_ns: wp.fwhm().map_err(AnalysisError::from)? * 1e9,
        fit_fwhm_ns: fit.temporal_fwhm * 1e9,
        fit_linewidth_khz: fit.linewidth_hz * 1e-3,
        fit,
    };
    println!(
        "G2 FWHM {:.1} ns (fit {:.1} ns), linewidth {:.1} kHz",
        summary.sampled_fwhm_ns, summary.fit_fwhm_ns, summary.fit_linewidth_khz
    );
    ctx.json("wavepacket.json", &summary)?;
    let peak = wp.peak();
    let fig = Figure::new("Biphoton wave packet", "delay (ns)", "G2 / peak").with_series(
        &format!("alpha = {}, gamma = {}", params.alpha, params.gamma_dec),
        t_ns,
        g.iter().map(|v| v / peak).collect(),
    );
    ctx.svg("wavepacket.svg", &fig)
}

#[derive(Serialize)]
struct SpectrumSummary {
    fwhm_khz: f64,
    single_peak: bool,
}

fn cmd_spectrum(ctx: &mut Ctx) -> Result<(), CliError> {
    let prof = spectrum(&ctx.cfg.physics, &ctx.cfg.grid).map_err(AnalysisError::from)?;
    let peak = prof.values.iter().cloned().fold(0.0, f64::max);
    let half = 10.0 * prof.fwhm * std::f64::consts::TAU;
    let (d, f) = window(&prof.delta_grid, &prof.values, -half, half, 4000);
    let d_mhz: Vec<f64> = d.iter().map(|v| v / std::f64::consts::TAU * 1e-6).collect();
    ctx.curve("spectrum.csv", &d_mhz, &f)?;
    let summary = SpectrumSummary {
        fwhm_khz: prof.fwhm * 1e-3,
        single_peak: prof.single_peak,
    };
    println!(
        "spectral FWHM {:.1} kHz{}",
        summary.fwhm_khz,
        if summary.single_peak {
            ""
        } else {
            " (multiple peaks)"
        }
    );
    ctx.json("spectrum.json", &summary)?;
    let fig = Figure::new("Two-photon spectrum", "detuning (MHz)", "F / peak").with_series(
        "F",
        d_mhz,
        f.iter().map(|v| v / peak).collect(),
    );
    ctx.svg("spectrum.svg", &fig)
}

fn histogram_figure(title: &str, hist: &CoincidenceHistogram, fit: &WavePacketFit) -> Figure {
    let t = hist.bin_centers();
    let t_ns: Vec<f64> = t.iter().map(|v| v * 1e9).collect();
    Figure::new(title, "delay (ns)", "coincidences per bin")
        .with_series(
            "data",
            t_ns.clone(),
            hist.counts.iter().map(|&c| c as f64).collect(),
        )
        .with_series("fit", t_ns, t.iter().map(|&v| fit.eval(v)).collect())
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    record: &'a SweepRecord,
    success_probability: f64,
    n_pairs: usize,
    coincident_pair_rate: f64,
    n_anti_stokes: usize,
    n_stokes: usize,
    n_triggers: u64,
    fit: &'a WavePacketFit,
}

fn cmd_simulate(ctx: &mut Ctx, stem: &str) -> Result<(), CliError> {
    let c = &ctx.cfg;
    let o = simulate_point(
        &c.scenario,
        &c.calibration,
        &c.detector,
        &c.histogram,
        &c.grid,
        &c.sim,
    )?;
    println!(
        "rate {:.4e} pairs/s, linewidth {:.1} kHz, SBR {:.3}, success {:.3}%",
        o.record.generation_rate,
        o.record.linewidth_hz * 1e-3,
        o.record.sbr,
        o.success_probability * 100.0
    );
    if ctx.wants(OutputFormat::Csv) {
        let p = ctx.path(&format!("{stem}_histogram.csv"));
        write_histogram(&p, &o.histogram).map_err(io_err)?;
        let p = ctx.path(&format!("{stem}_events.csv"));
        write_events(&p, &o.anti_stokes, &o.stokes).map_err(io_err)?;
    }
    let summary = SimulateSummary {
        record: &o.record,
        success_probability: o.success_probability,
        n_pairs: o.n_pairs,
        coincident_pair_rate: o.coincident_pair_rate,
        n_anti_stokes: o.anti_stokes.len(),
        n_stokes: o.stokes.len(),
        n_triggers: o.histogram.n_triggers,
        fit: &o.fit,
    };
    ctx.json(&format!("{stem}.json"), &summary)?;
    let fig = histogram_figure("Simulated coincidences", &o.histogram, &o.fit);
    ctx.svg(&format!("{stem}.svg"), &fig)
}

fn cmd_fit(ctx: &mut Ctx, input: &Path, min_peak_ratio: f64) -> Result<(), CliError> {
    let hist =
        read_histogram(input).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let fit = fit_histogram(&hist, min_peak_ratio).map_err(num_err)?;
    if !fit.converged {
        return Err(CliError::Numeric(format!(
            "fit did not converge; residual norm {:.3e}",
            fit.residual_norm
        )));
    }
    println!(
        "FWHM {:.1} ns, linewidth {:.1} kHz, SBR {:.3}",
        fit.temporal_fwhm * 1e9,
        fit.linewidth_hz * 1e-3,
        crate::detection::measure_sbr(&fit)
    );
    let t = hist.bin_centers();
    let model: Vec<f64> = t.iter().map(|&v| fit.eval(v)).collect();
    let t_ns: Vec<f64> = t.iter().map(|v| v * 1e9).collect();
    ctx.curve("fit.csv", &t_ns, &model)?;
    ctx.json("fit.json", &fit)?;
    let fig = histogram_figure("Fitted histogram", &hist, &fit);
    ctx.svg("fit.svg", &fig)
}

type Panel = (
    &'static str,
    &'static str,
    &'static str,
    fn(&SweepRecord) -> f64,
);

fn sweep_panel(
    records: &[SweepRecord],
    title: &str,
    y_label: &str,
    value: fn(&SweepRecord) -> f64,
) -> Figure {
    let mut temps: Vec<f64> = records.iter().map(|r| r.op.temp_c).collect();
    temps.dedup();
    let mut fig = Figure::new(title, "pump power (mW)", y_label);
    for t in temps {
        let rs: Vec<&SweepRecord> = records.iter().filter(|r| r.op.temp_c == t).collect();
        fig = fig.with_series(
            &format!("{t} C"),
            rs.iter().map(|r| r.op.pump_mw).collect(),
            rs.iter().map(|r| value(r)).collect(),
        );
    }
    fig
}

fn cmd_sweep(ctx: &mut Ctx, mode: Mode) -> Result<(), CliError> {
    let c = &ctx.cfg;
    let table = sweep(
        &c.sweep.points(),
        &c.calibration,
        &c.detector,
        &c.histogram,
        &c.grid,
        mode,
        &c.sim,
    )?;
    println!(
        "{} points evaluated, {} failed",
        table.records.len(),
        table.failures.len()
    );
    if ctx.wants(OutputFormat::Csv) {
        let p = ctx.path("sweep.csv");
        write_sweep(&p, &table.records).map_err(io_err)?;
    }
    ctx.json("sweep.json", &table)?;
    if !table.records.is_empty() {
        let r = &table.records;
        let panels: [Panel; 5] = [
            ("sweep_rate.svg", "Generation rate", "pairs/s", |r| {
                r.generation_rate
            }),
            ("sweep_linewidth.svg", "Linewidth", "kHz", |r| {
                r.linewidth_hz * 1e-3
            }),
            ("sweep_sbr.svg", "Signal-to-background ratio", "SBR", |r| {
                r.sbr
            }),
            (
                "sweep_brightness.svg",
                "Spectral brightness",
                "pairs/s/MHz",
                |r| r.brightness,
            ),
            ("sweep_s.svg", "Brightness x SBR", "pairs/s/MHz", |r| {
                r.s_product
            }),
        ];
        for (file, title, unit, value) in panels {
            let mut fig = sweep_panel(r, title, unit, value);
            if file == "sweep_sbr.svg" {
                fig = fig.log_y();
            }
            ctx.svg(file, &fig)?;
        }
    }
    if let Some(f) = table.failures.first() {
        return Err(CliError::Numeric(format!(
            "{} sweep points failed; first at {} mW, {} C: {}",
            table.failures.len(),
            f.op.pump_mw,
            f.op.temp_c,
            f.error
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow<'a> {
    id: usize,
    title: &'a str,
    passed: bool,
    checks: Vec<&'a acceptance::Check>,
}

fn cmd_check(ctx: &mut Ctx) -> Result<(), CliError> {
    let c = &ctx.cfg;
    let setup = Setup {
        calibration: c.calibration,
        detector: c.detector,
        histogram: c.histogram,
        grid: c.grid,
        seed: c.sim.seed,
        ..Setup::default()
    };
    let m = acceptance::measure(&setup)?;
    let criteria: Vec<Criterion> = acceptance::evaluate(&m);
    for cr in &criteria {
        println!("{}", cr.line());
    }
    let rows: Vec<CheckRow> = criteria
        .iter()
        .map(|cr| CheckRow {
            id: cr.id,
            title: &cr.title,
            passed: cr.passed(),
            checks: cr.checks.iter().filter(|c| !c.timing).collect(),
        })
        .collect();
    ctx.json("check.json", &rows)?;
    let failed = criteria.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        Err(CliError::Acceptance(failed))
    } else {
        Ok(())
    }
}
