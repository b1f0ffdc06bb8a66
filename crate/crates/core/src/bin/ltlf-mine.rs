use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use ltlf_mine::automata::{characteristic_sample, formula_to_dfa};
use ltlf_mine::baseline::{exact_learner, max_accuracy_learner, ExactOutcome, SearchBudget};
use ltlf_mine::data::{build_dataset, inject_noise, Dataset, DatasetSpec};
use ltlf_mine::extract::network_to_formula;
use ltlf_mine::ltl::{parse, random_formula, PropSet};
use ltlf_mine::neural::{hard_accuracy, train, Checkpoint, Network, TrainConfig};
use ltlf_mine::pipeline::{
    formula_accuracy, run_experiment, run_learn, summarize, write_rows, write_summary, ExperimentConfig, LearnConfig,
    ResultRow, RESULT_COLUMNS, SUMMARY_COLUMNS,
};
use ltlf_mine::{seed, Error, Result};

#[derive(Parser)]
#[command(name = "ltlf-mine", version, about = "Learn LTLf formulas from labeled traces")]
struct Cli {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    Exact,
    MaxAccuracy,
}

#[derive(Subcommand)]
enum Command {
    /// Print random formulas of a given size.
    GenFormulas {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        props: usize,
        /// Allow the next-step operators.
        #[arg(long)]
        metric: bool,
    },
    /// Build a labeled dataset for a target formula.
    GenData {
        #[arg(long)]
        formula: String,
        /// Comma-separated proposition names.
        #[arg(long, default_value = "a,b,c")]
        props: String,
        #[arg(long, default_value_t = 100)]
        positives: usize,
        #[arg(long, default_value_t = 100)]
        negatives: usize,
        #[arg(long, default_value_t = 15)]
        length: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Leave out the characteristic sample.
        #[arg(long)]
        random_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one network and save a checkpoint.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Filters per layer, e.g. 3,1.
        #[arg(long, default_value = "3,1", value_delimiter = ',')]
        arch: Vec<usize>,
        /// JSON training configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        /// Train metric weights too.
        #[arg(long)]
        metric: bool,
        #[arg(long)]
        out: PathBuf,
        /// Per-epoch CSV log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Extract a formula from a checkpoint.
    Extract {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value = "a,b,c")]
        props: String,
    },
    /// Train several networks and select a formula.
    Learn {
        #[arg(long)]
        data: PathBuf,
        /// JSON learning configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run an enumerative baseline learner.
    Baseline {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "max-accuracy")]
        method: BaselineMethod,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Run the full experiment sweep.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for results.csv and summary.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a formula or a checkpoint on a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, conflicts_with = "checkpoint")]
        formula: Option<String>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Summarize a results CSV.
    Report {
        #[arg(long, required_unless_present = "schema")]
        results: Option<PathBuf>,
        /// Print the CSV column names instead.
        #[arg(long)]
        schema: bool,
    },
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn prop_names(list: &str) -> Result<PropSet> {
    Ok(PropSet::new(list.split(',').map(str::trim))?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenFormulas { size, count, props, metric } => {
            let props = PropSet::alphabetic(props);
            let mut rng = seed::rng(cli.seed);
            for _ in 0..count {
                println!("{}", random_formula(size, &props, !metric, &mut rng)?.to_text(&props));
            }
        }
        Command::GenData { formula, props, positives, negatives, length, noise, random_only, out } => {
            let props = prop_names(&props)?;
            let target = parse(&formula, &props)?;
            let sample =
                if random_only { Vec::new() } else { characteristic_sample(&formula_to_dfa(&target, props.len())?) };
            let spec = DatasetSpec { n_pos: positives, n_neg: negatives, length, seed: seed::derive(cli.seed, &[1]) };
            let mut data = build_dataset(&target, &props, &sample, spec)?;
            if noise > 0.0 {
                data = inject_noise(&data, noise, seed::derive(cli.seed, &[3]))?;
            }
            data.save(&out)?;
            eprintln!(
                "wrote {} traces ({} from the characteristic sample) to {}",
                data.len(),
                data.provenance.char_count,
                out.display()
            );
        }
        Command::Train { data, arch, config, epochs, metric, out, log } => {
            let data = Dataset::load(&data)?;
            let mut cfg: TrainConfig = config.as_deref().map(load_json).transpose()?.unwrap_or_default();
            cfg.seed = seed::derive(cli.seed, &[1]);
            if let Some(e) = epochs {
                cfg.max_epochs = e;
            }
            let net = Network::random(data.width(), &arch, !metric, &mut seed::rng(seed::derive(cli.seed, &[0])))?;
            let outcome = train(net, &data, &cfg)?;
            if let Some(path) = log {
                outcome.write_log(BufWriter::new(File::create(path)?))?;
            }
            Checkpoint::new(outcome.network, outcome.best_epoch, cli.seed).save(&out)?;
            eprintln!(
                "best hard accuracy {:.4} at epoch {} ({:?}); checkpoint at {}",
                outcome.best_accuracy,
                outcome.best_epoch,
                outcome.stop,
                out.display()
            );
        }
        Command::Extract { checkpoint, props } => {
            let c = Checkpoint::load(&checkpoint)?;
            let props = prop_names(&props)?;
            print_json(&network_to_formula(&c.network, &props)?.report)?;
        }
        Command::Learn { data, config } => {
            let data = Dataset::load(&data)?;
            let cfg: LearnConfig = config.as_deref().map(load_json).transpose()?.unwrap_or_default();
            cfg.validate()?;
            print_json(&run_learn(&data, &cfg, cli.seed)?)?;
        }
        Command::Baseline { data, method, config, max_size, time_limit } => {
            let data = Dataset::load(&data)?;
            let mut budget: SearchBudget = config.as_deref().map(load_json).transpose()?.unwrap_or_default();
            if let Some(s) = max_size {
                budget.max_size = s;
            }
            if let Some(t) = time_limit {
                budget.time_limit = Some(Duration::from_secs_f64(t));
            }
            match method {
                BaselineMethod::Exact => match exact_learner(&data, &budget)? {
                    ExactOutcome::Found(f) => println!("{}", f.to_text(&data.props)),
                    other => println!("no consistent formula: {other:?}"),
                },
                BaselineMethod::MaxAccuracy => {
                    let r = max_accuracy_learner(&data, &budget)?;
                    println!(
                        "{}\naccuracy {:.4}, size {}",
                        r.formula.to_text(&data.props),
                        r.accuracy,
                        r.formula.size()
                    );
                }
            }
        }
        Command::Experiment { config, out } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            cfg.seed = cli.seed;
            let results = run_experiment(&cfg)?;
            std::fs::create_dir_all(&out)?;
            write_rows(&results.rows, BufWriter::new(File::create(out.join("results.csv"))?))?;
            write_summary(&results.summary, BufWriter::new(File::create(out.join("summary.csv"))?))?;
            write_summary(&results.summary, io::stdout().lock())?;
        }
        Command::Eval { data, formula, checkpoint } => {
            let data = Dataset::load(&data)?;
            if let Some(text) = formula {
                let f = parse(&text, &data.props)?;
                println!("accuracy {:.4}", formula_accuracy(&f, &data));
            } else if let Some(path) = checkpoint {
                let m = hard_accuracy(&Checkpoint::load(&path)?.network, &data)?;
                println!("accuracy {:.4} precision {:.4} recall {:.4}", m.accuracy, m.precision, m.recall);
            } else {
                return Err(Error::Config("eval needs --formula or --checkpoint".into()));
            }
        }
        Command::Report { results, schema } => {
            if schema {
                println!("results: {}", RESULT_COLUMNS.join(","));
                println!("summary: {}", SUMMARY_COLUMNS.join(","));
                return Ok(());
            }
            let path = results.expect("clap enforces --results");
            let rows =
                csv::Reader::from_path(path)?.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
            let mut out = io::stdout().lock();
            write_summary(&summarize(&rows), &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
