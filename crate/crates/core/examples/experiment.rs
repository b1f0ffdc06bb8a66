//! A miniature version of the experiment sweep with every method.

use ltlf_mine::pipeline::{run_experiment, write_summary, ExperimentConfig};

fn main() -> ltlf_mine::Result<()> {
    env_logger::init();
    let cfg = ExperimentConfig {
        max_size: 3,
        formulas_per_size: 2,
        n_train: 100,
        n_test: 60,
        trace_length: 8,
        budget_secs: 10.0,
        noise: 0.01,
        seed: 3,
        ..ExperimentConfig::default()
    };
    let results = run_experiment(&cfg)?;
    for r in &results.rows {
        println!(
            "{:>12} size {} #{}: {:.3}  {}  (target {})",
            r.method.name(),
            r.target_size,
            r.index,
            r.accuracy,
            r.formula,
            r.target
        );
    }
    write_summary(&results.summary, std::io::stdout().lock())
}
