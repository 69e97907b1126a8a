use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chlab::checks;
use chlab::config::{OutputFormat, SimulationConfig};
use chlab::diagnostics::dissipation_monitor;
use chlab::harness::{run_ensemble, verdicts, EnsembleReport, HarnessError};
use chlab::io::{
    load_ensemble, load_run, save_csv, save_json, Columns, EnsembleDocument, FinalState,
    RunDocument, SCHEMA_VERSION,
};
use chlab::{parse_config, run, ConfigError, Mode};

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VERDICT: u8 = 4;

#[derive(Parser)]
#[command(name = "chlab", version, about = "Spectral lab for the viscous Camassa–Holm equation")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for ensembles; overrides `ensemble.workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Added to every random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed_offset: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write its diagnostics.
    Simulate,
    /// Run the configured ensembles and write the report with verdicts.
    Ensemble,
    /// Randomized identity checks of the spectral kernels.
    Check {
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recompute verdicts from a stored JSON file.
    Report {
        /// A `*.json` file written by `simulate` or `ensemble`.
        input: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_CONFIG, format!("configuration rejected: {e}"))
    }
}

impl From<chlab::io::IoError> for Failure {
    fn from(e: chlab::io::IoError) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Integration(_) => EXIT_NUMERIC,
            _ => EXIT_CONFIG,
        };
        Failure::new(code, e.to_string())
    }
}

fn load_config(cli: &Cli) -> Result<(SimulationConfig, String), Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::new(EXIT_USAGE, "--config is required"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    let normalized = cfg.to_toml();
    Ok((cfg, normalized))
}

fn out_dir(cli: &Cli, cfg: &SimulationConfig) -> Result<PathBuf, Failure> {
    let dir = cli
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    fs::create_dir_all(&dir)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn simulate(cli: &Cli) -> Result<(), Failure> {
    let (cfg, text) = load_config(cli)?;
    let exp = cfg.experiment(cli.seed_offset)?;
    let traj = run(&exp).map_err(|e| Failure::new(EXIT_NUMERIC, e.to_string()))?;
    let dissipation = (cfg.mode == Mode::Viscous)
        .then(|| {
            dissipation_monitor(
                &traj.records,
                exp.profile.epsilon(),
                exp.forcing.g().l2_norm(),
                cfg.mode,
            )
            .ok()
        })
        .flatten();
    let dir = out_dir(cli, &cfg)?;
    let columns = Columns::new(&cfg.diagnostics, cfg.n(), cfg.length());
    let last = traj.final_state();
    if cfg.output.formats.contains(&OutputFormat::Csv) {
        save_csv(&dir.join(format!("{}.csv", cfg.output.name)), &text, &columns, &traj.records)?;
    }
    if cfg.output.formats.contains(&OutputFormat::Json) {
        let doc = RunDocument {
            schema_version: SCHEMA_VERSION,
            config: text,
            columns,
            records: traj.records.clone(),
            dissipation: dissipation.clone(),
            final_state: Some(FinalState::new(last.t, &last.u)),
        };
        save_json(&dir.join(format!("{}.json", cfg.output.name)), &doc)?;
    }
    let first = &traj.records[0];
    let end = traj.records.last().expect("initial record");
    println!(
        "simulate: t = {} after {} steps, I: {:.6e} -> {:.6e}",
        last.t, last.step_count, first.energy, end.energy
    );
    dissipation_verdict(dissipation.as_ref())
}

fn dissipation_verdict(d: Option<&chlab::diagnostics::DissipationReport>) -> Result<(), Failure> {
    let Some(d) = d else { return Ok(()) };
    if let Some(c) = d.c_star {
        println!("dissipation: C* = {c:.6e}");
    }
    if let Some(rate) = d.decay_rate {
        println!("dissipation: decay rate {rate:.6e} (needs >= {:.6e})", d.epsilon / 2.0);
    }
    match d.rate_ok {
        Some(false) => Err(Failure::new(EXIT_VERDICT, "energy decays slower than ε/2")),
        _ => Ok(()),
    }
}

fn print_verdicts(v: &chlab::harness::Verdicts) {
    let show = |name: &str, ok: Option<bool>, detail: String| {
        if let Some(ok) = ok {
            println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        }
    };
    show(
        "plateau",
        v.plateau_ok,
        format!("ratio {:?}", v.plateau_ratio),
    );
    if let Some(c) = &v.highfreq {
        show(
            "high frequencies",
            v.highfreq_ok,
            format!(
                "ratios {:?}, decreasing {}, geometric {}, stable {}",
                c.ratios, c.decreasing, c.geometric, c.stable
            ),
        );
    }
    show("smoothing", v.smoothing_ok, v.smoothing.verdict());
    show("tail", v.tail_ok, format!("J at t_end {:?}", v.tail));
}

fn ensemble(cli: &Cli) -> Result<(), Failure> {
    let (cfg, text) = load_config(cli)?;
    let specs = cfg
        .ensemble_specs(cli.seed_offset)
        .ok_or_else(|| Failure::new(EXIT_CONFIG, "configuration has no [ensemble] section"))?;
    let p = cfg.profile()?;
    let f = cfg.forcing()?;
    let settings = cfg.run_settings(cli.workers)?;
    let mut merged: Option<EnsembleReport> = None;
    for spec in &specs {
        let r = run_ensemble(spec, &settings, &p, &f)?;
        println!(
            "ensemble B = {}: {} trajectories, sup I = {:.6e}",
            spec.radius, spec.count, r.sup_energy
        );
        merged = Some(match merged {
            None => r,
            Some(m) => m.merge(&r)?,
        });
    }
    let report = merged.expect("at least one radius");
    let v = verdicts(&report, &cfg.verdict_thresholds())?;
    print_verdicts(&v);
    let dir = out_dir(cli, &cfg)?;
    let passed = v.passed;
    let doc = EnsembleDocument {
        schema_version: SCHEMA_VERSION,
        config: text,
        report,
        verdicts: v,
    };
    save_json(&dir.join(format!("{}_ensemble.json", cfg.output.name)), &doc)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VERDICT, "an ensemble verdict failed"))
    }
}

fn check(resolution: usize, samples: usize, seed: u64) -> Result<(), Failure> {
    if !(resolution >= 8 && resolution.is_power_of_two()) {
        return Err(Failure::new(EXIT_USAGE, "--resolution must be a power of two ≥ 8"));
    }
    let mut ok = true;
    for c in checks::suite(resolution, samples, seed) {
        println!(
            "{} {}: worst {:.3e} (tolerance {:.0e}, {} samples)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.samples
        );
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VERDICT, "a check failed"))
    }
}

fn report(input: &Path) -> Result<(), Failure> {
    if let Ok(doc) = load_ensemble(input) {
        let cfg = parse_config(&doc.config)?;
        let v = verdicts(&doc.report, &cfg.verdict_thresholds())?;
        print_verdicts(&v);
        if v != doc.verdicts {
            println!("note: recomputed verdicts differ from the stored ones");
        }
        return if v.passed {
            Ok(())
        } else {
            Err(Failure::new(EXIT_VERDICT, "an ensemble verdict failed"))
        };
    }
    let doc = load_run(input)?;
    let cfg = parse_config(&doc.config)?;
    if cfg.mode != Mode::Viscous {
        println!("report: {} records, no verdicts for {:?} runs", doc.records.len(), cfg.mode);
        return Ok(());
    }
    let d = dissipation_monitor(
        &doc.records,
        cfg.viscosity.epsilon,
        cfg.forcing()?.g().l2_norm(),
        cfg.mode,
    )
    .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    dissipation_verdict(Some(&d))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate => simulate(&cli),
        Command::Ensemble => ensemble(&cli),
        Command::Check {
            resolution,
            samples,
            seed,
        } => check(*resolution, *samples, *seed),
        Command::Report { input } => report(input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
