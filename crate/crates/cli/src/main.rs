use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use infrapol_core::config::{ExperimentKind, RunConfig};
use infrapol_core::experiments::{
    classify_equilibrium, example_presets, find_preset, prepare_run, run_specs, simulate_spec,
    standard_regimes, summarize_run, summarize_stochastic, tail_averages, RunRecord, TAIL_WINDOW,
};
use infrapol_core::model::PoliticalVariant;
use infrapol_core::output::{
    create_file, read_series, trajectory_from_samples, write_runs, write_series, Manifest,
};
use infrapol_core::Error;

/// Shared/private infrastructure and tax-politics simulator.
#[derive(Parser, Debug)]
#[command(name = "infrapol", version, arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Configuration file (flat `key = value`).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `run.out`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Base seed; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores); overrides `run.workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one trajectory and write series.csv.
    Simulate {
        /// Named post-shock example: full-shared, collapse, elites-abandon, distinct-societies.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Deterministic grid over shock sizes and politics settings.
    SweepDet,
    /// Stochastic shock-series sweep.
    SweepStoch {
        /// Install the three standard shock regimes and election/repulsion axes.
        #[arg(long)]
        paper_regimes: bool,
        /// Series per (regime, T_e, sigma_R) cell; overrides `stoch.n_series`.
        #[arg(long)]
        n_series: Option<usize>,
    },
    /// Re-classify an existing series file.
    Classify {
        /// Path to a series.csv written by `simulate`.
        series: PathBuf,
    },
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Run or I/O failure: exit 1.
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Range { .. } | Error::Parse(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load_config(g: &Global, kind: ExperimentKind) -> Result<RunConfig, Failure> {
    let text = match &g.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text).map_err(|e| match &g.config {
        Some(path) => Failure::Usage(format!("{}: {e}", path.display())),
        None => Failure::from(e),
    })?;
    cfg.kind = kind;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    if let Some(o) = &g.out {
        cfg.out = o.display().to_string();
    }
    Ok(cfg)
}

fn write_outputs(
    cfg: &RunConfig,
    records: &[RunRecord],
    started: Instant,
    extra: impl FnOnce(&mut Manifest),
) -> Result<(), Failure> {
    let dir = Path::new(&cfg.out);
    write_runs(create_file(&dir.join("runs.csv"))?, records)?;
    std::fs::write(dir.join("config.cfg"), cfg.render())
        .map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    let mut m = Manifest::new(cfg, records, started.elapsed().as_secs_f64());
    extra(&mut m);
    m.write(create_file(&dir.join("manifest.json"))?)?;
    Ok(())
}

fn finish(records: &[RunRecord]) -> Result<(), Failure> {
    let failed = records.iter().filter(|r| r.failed).count();
    if failed > 0 {
        return Err(Failure::Run(format!(
            "{failed} of {} runs failed",
            records.len()
        )));
    }
    Ok(())
}

fn simulate(g: &Global, preset: Option<String>) -> Result<(), Failure> {
    let started = Instant::now();
    let mut cfg = load_config(g, ExperimentKind::Simulate)?;
    if let Some(name) = preset {
        let p = find_preset(&name).ok_or_else(|| {
            let names: Vec<_> = example_presets().iter().map(|p| p.name).collect();
            Failure::Usage(format!(
                "unknown preset `{name}` (one of {})",
                names.join(", ")
            ))
        })?;
        cfg.params = p.params;
        cfg.d_is = p.spec.d_is;
        cfg.d_mu = p.spec.d_mu;
        cfg.incumbent = p.spec.incumbent;
        cfg.grid_te = vec![cfg.params.election_period];
        cfg.grid_sigma_r = vec![cfg.params.repulsion];
        cfg.grid_variants = vec![cfg.params.variant];
        cfg.validate()?;
    }
    let spec = cfg.single_run();
    let result = simulate_spec(&cfg.params, &spec, &cfg.controls, 0.0);
    let record = summarize_run(0, &cfg.params, &spec, result.as_ref().map(|(t, i)| (t, *i)));
    if let Ok((traj, _)) = &result {
        write_series(
            create_file(&Path::new(&cfg.out).join("series.csv"))?,
            &traj.samples,
        )?;
    }
    println!(
        "class {} | I_s final {:.6} | welfare {:.6} | gini {:.6}",
        record.class, record.shared_final, record.welfare, record.gini
    );
    let records = vec![record];
    write_outputs(&cfg, &records, started, |_| {})?;
    finish(&records)
}

fn sweep_det(g: &Global) -> Result<(), Failure> {
    let started = Instant::now();
    let cfg = load_config(g, ExperimentKind::SweepDet)?;
    let grid = cfg.deterministic_grid();
    let specs = grid.specs();
    log::info!("deterministic sweep: {} runs", specs.len());
    let records = run_specs(&cfg.params, &specs, &cfg.controls, cfg.workers)?;
    let persisted = records.iter().filter(|r| r.persisted).count();
    println!("{} runs, {persisted} persisted", records.len());
    write_outputs(&cfg, &records, started, |_| {})?;
    finish(&records)
}

fn sweep_stoch(g: &Global, standard: bool, n_series: Option<usize>) -> Result<(), Failure> {
    let started = Instant::now();
    let mut cfg = load_config(g, ExperimentKind::SweepStoch)?;
    if standard {
        cfg.regimes = standard_regimes(cfg.horizon)
            .iter()
            .map(|r| (r.mean_period, r.mean_magnitude))
            .collect();
        cfg.grid_te = vec![2.0, 5.0, 10.0, 20.0, 30.0];
        cfg.grid_sigma_r = vec![0.075, 0.15, 0.225, 0.3];
        if cfg.params.variant == PoliticalVariant::NoPolitics {
            // elections are inert without politics
            cfg.params.variant = PoliticalVariant::from_name("polcomp-eq").expect("known");
            cfg.grid_variants = vec![cfg.params.variant];
        }
    }
    if let Some(n) = n_series {
        cfg.n_series = n;
    }
    cfg.validate()?;
    let plan = cfg.stochastic_plan();
    let specs = plan.specs(&cfg.params);
    log::info!("stochastic sweep: {} runs", specs.len());
    let records = run_specs(&cfg.params, &specs, &cfg.controls, cfg.workers)?;
    let summary = summarize_stochastic(&plan, &records);
    for m in summary
        .by_election_period
        .iter()
        .chain(&summary.by_repulsion)
    {
        log::info!(
            "T_s {} a {} value {}: robustness {:.3}",
            m.shock_period,
            m.shock_magnitude,
            m.value,
            m.mean_robustness
        );
    }
    println!("{} runs", records.len());
    println!("T_s\ta\tT_e\trobustness");
    for m in &summary.by_election_period {
        println!(
            "{}\t{}\t{}\t{:.3}",
            m.shock_period, m.shock_magnitude, m.value, m.mean_robustness
        );
    }
    write_outputs(&cfg, &records, started, |m| m.stochastic = Some(summary))?;
    finish(&records)
}

fn classify(g: &Global, series: &Path) -> Result<(), Failure> {
    let cfg = load_config(g, ExperimentKind::Simulate)?;
    let file = std::fs::File::open(series)
        .map_err(|e| Failure::Usage(format!("{}: {e}", series.display())))?;
    let samples = read_series(std::io::BufReader::new(file))?;
    // thresholds come from the post-shock parameters of the configured run
    let (_, p, _, _) = prepare_run(&cfg.params, &cfg.single_run())?;
    let traj = trajectory_from_samples(samples, &p)?;
    let avg = tail_averages(&traj, TAIL_WINDOW)?;
    let class = classify_equilibrium(&traj, &p);
    println!("{class}");
    log::info!("tail averages: {avg:?}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let g = &cli.global;
    let result = match cli.command {
        Command::Simulate { preset } => simulate(g, preset),
        Command::SweepDet => sweep_det(g),
        Command::SweepStoch {
            paper_regimes,
            n_series,
        } => sweep_stoch(g, paper_regimes, n_series),
        Command::Classify { series } => classify(g, &series),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
