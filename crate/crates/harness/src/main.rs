use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ustash_core::analytics::{write_cdf_csv, LabelledRequests, SourceMode};
use ustash_core::sim::write_outcomes_csv;
use ustash_harness::analyze::{analyze, split_trace};
use ustash_harness::experiment::{self, Plan};
use ustash_harness::figures::{scenario_rows, write_table};
use ustash_harness::{emit_figures, ExperimentConfig, HarnessError, OutputFormat, Result, SweepParam, SweepSpec};

#[derive(Parser)]
#[command(name = "ustash", version, about = "Collaborative on-vehicle content stash: model, simulator and sweeps")]
struct Cli {
    /// TOML configuration file; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of the main output table.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a request trace.
    Generate {
        #[arg(long)]
        n_requests: Option<u64>,
        #[arg(long)]
        r_v: Option<f64>,
    },
    /// Pairwise Jaccard similarity and per-item source entropy.
    Analyze {
        /// CSV with header `label,content_id`; without it a trace is cut into groups.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        groups: usize,
        /// Normalize entropy by the sources that requested the item.
        #[arg(long)]
        observed_sources: bool,
    },
    /// Evaluate the analytical model over a grid of splits.
    Model {
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Replay a trace with the configured split policy.
    Simulate {
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Split strategy, e.g. `optimal`, `fixed:0.5`, `no-stash`, `all-stash`.
        #[arg(long)]
        policy: Option<String>,
        /// Also write the per-request outcome log.
        #[arg(long)]
        log: bool,
    },
    /// Run the configured scenarios on one trace.
    Compare {
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep one parameter.
    Sweep {
        #[arg(value_enum)]
        param: Option<SweepParam>,
        /// Comma-separated grid; defaults depend on the parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Compute every table and emit all figure files.
    Reproduce,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn prepare_out(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out).map_err(HarnessError::io(&cfg.out))?;
    let echo = cfg.out.join("config.toml");
    std::fs::write(&echo, cfg.to_toml()).map_err(HarnessError::io(&echo))
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(
        std::fs::File::create(path).map_err(HarnessError::io(path))?,
    ))
}

fn finish(cfg: &ExperimentConfig, report: &ustash_harness::Report) -> Result<()> {
    report.write_json(&cfg.out.join("report.json"))?;
    for p in emit_figures(report, &cfg.out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load(&cli)?;
    match cli.command {
        Command::Generate { n_requests, r_v } => {
            if let Some(r) = r_v {
                cfg.r_v = r;
            }
            if let Some(n) = n_requests {
                cfg.n_requests = n;
            }
            cfg.validate()?;
            prepare_out(&cfg)?;
            let trace = ustash_core::workload::Trace::generate(&cfg.workload())?;
            let path = cfg.out.join(format!("trace.{}", cfg.format.as_str()));
            let w = create(&path)?;
            match cfg.format {
                OutputFormat::Csv => trace.write_csv(w)?,
                OutputFormat::Json => trace.write_json(w)?,
            }
            println!(
                "{} requests, {} distinct items -> {}",
                trace.len(),
                trace.unique_contents(),
                path.display()
            );
        }
        Command::Analyze {
            input,
            groups,
            observed_sources,
        } => {
            prepare_out(&cfg)?;
            let requests = match &input {
                Some(p) => LabelledRequests::read_csv(std::fs::File::open(p).map_err(HarnessError::io(p))?)?,
                None => split_trace(&experiment::load_or_generate_trace(&cfg)?.0, groups)?,
            };
            let mode = if observed_sources {
                SourceMode::Observed
            } else {
                SourceMode::Declared
            };
            let an = analyze(&requests, mode)?;
            match cfg.format {
                OutputFormat::Csv => {
                    an.matrix.write_csv(create(&cfg.out.join("similarity.csv"))?)?;
                    write_cdf_csv(&an.entropy_cdf, create(&cfg.out.join("entropy_cdf.csv"))?)?;
                }
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(create(&cfg.out.join("analysis.json"))?, &an)
                        .map_err(|e| HarnessError::Core(e.into()))?;
                }
            }
            println!(
                "{} groups, {} items, mean pairwise Jaccard {:.4}",
                an.matrix.size(),
                an.items,
                an.mean_pairwise_jaccard
            );
        }
        Command::Model { steps } => {
            prepare_out(&cfg)?;
            let model = experiment::analytic_model(&cfg)?;
            let mut report = ustash_harness::Report::new(&cfg);
            let summary = experiment::model_summary(&model)?;
            report.model_curve = experiment::model_curve(&model, steps)?;
            write_table(&cfg.out, "model", cfg.format, &report.model_curve)?;
            println!(
                "E(Y) = {:.1}, hit rate = {:.4}, x_opt = {:.4}{}, E(T) min = {:.6} s (x=0: {:.6} s, x=1: {:.6} s), H argmin = {:.4}",
                summary.expected_unique,
                summary.expected_hit_rate,
                summary.x_optimal,
                if summary.x_optimal_capped { " (capped)" } else { "" },
                summary.expected_t_min_s,
                summary.expected_t_user_only_s,
                summary.expected_t_stash_only_s,
                summary.h_argmin.x,
            );
            report.model = Some(summary);
            finish(&cfg, &report)?;
        }
        Command::Simulate { trace, policy, log } => {
            if let Some(t) = trace {
                cfg.trace = Some(t);
            }
            if let Some(p) = policy {
                cfg.policy = p;
            }
            cfg.validate()?;
            prepare_out(&cfg)?;
            let (t, source) = experiment::load_or_generate_trace(&cfg)?;
            let out = experiment::run_simulation(&cfg, &t, log)?;
            let mut report = ustash_harness::Report::new(&cfg);
            report.trace = Some(experiment::summarize_trace(&t, source));
            report.hit_rate_curve = experiment::hit_rate_curve(&cfg, &out);
            if log {
                write_outcomes_csv(&out.outcomes, create(&cfg.out.join("outcomes.csv"))?)?;
            }
            let m = &out.metrics;
            serde_json::to_writer_pretty(create(&cfg.out.join("metrics.json"))?, m)
                .map_err(|e| HarnessError::Core(e.into()))?;
            println!(
                "{} requests: hit rate {:.4}, partial {:.4}, byte hit rate {:.4}, user cost {:.1} c, stash cost {:.1} c",
                m.total, m.hit_rate, m.partial_hit_rate, m.byte_hit_rate, m.user_cost_cents, m.stash_cost_cents
            );
            report.simulation = Some(out.metrics);
            finish(&cfg, &report)?;
        }
        Command::Compare { trace } => {
            if let Some(t) = trace {
                cfg.trace = Some(t);
            }
            prepare_out(&cfg)?;
            let plan = Plan {
                compare: true,
                ..Plan::default()
            };
            let report = experiment::run_experiment(&cfg, &plan)?;
            write_table(&cfg.out, "compare", cfg.format, &scenario_rows(&report))?;
            for s in &report.scenarios {
                println!(
                    "{:<13} user {:>12.1} c  stash {:>12.1} c  hit rate {:.4}  mean T {:.4} s",
                    s.scenario,
                    s.metrics.user_cost_cents,
                    s.metrics.stash_cost_cents,
                    s.metrics.hit_rate,
                    s.metrics.mean_completion_s
                );
            }
            finish(&cfg, &report)?;
        }
        Command::Sweep { param, values } => {
            let spec = match (param, cfg.sweep.clone()) {
                (Some(p), Some(s)) if s.param == p && values.is_empty() => s,
                (Some(p), _) => SweepSpec {
                    param: p,
                    values: if values.is_empty() { p.default_values() } else { values },
                },
                (None, Some(mut s)) => {
                    if !values.is_empty() {
                        s.values = values;
                    }
                    s
                }
                (None, None) => {
                    return Err(HarnessError::Domain {
                        key: "sweep.param".into(),
                        msg: "name a parameter (x, s, r_v, omega_ratio) or set sweep.param".into(),
                    })
                }
            };
            cfg.sweep = Some(spec.clone());
            cfg.validate()?;
            prepare_out(&cfg)?;
            let plan = Plan {
                sweeps: vec![spec.clone()],
                ..Plan::default()
            };
            let report = experiment::run_experiment(&cfg, &plan)?;
            let stem = format!("sweep_{}", spec.param.as_str());
            let path = match spec.param {
                SweepParam::X => write_table(&cfg.out, &stem, cfg.format, &report.x_sweep)?,
                SweepParam::S => write_table(&cfg.out, &stem, cfg.format, &report.s_sweep)?,
                SweepParam::RV => write_table(&cfg.out, &stem, cfg.format, &report.rv_sweep)?,
                SweepParam::OmegaRatio => write_table(&cfg.out, &stem, cfg.format, &report.h_surface)?,
            };
            println!("wrote {}", path.display());
            finish(&cfg, &report)?;
        }
        Command::Reproduce => {
            prepare_out(&cfg)?;
            let report = experiment::run_experiment(&cfg, &Plan::everything())?;
            finish(&cfg, &report)?;
        }
    }
    Ok(())
}
