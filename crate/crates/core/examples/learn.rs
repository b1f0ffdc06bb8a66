//! The full learning pipeline on one target: train several architectures,
//! extract, and select the best readable formula.

use std::time::Duration;

use ltlf_mine::automata::{characteristic_sample, formula_to_dfa};
use ltlf_mine::data::{build_dataset, DatasetSpec};
use ltlf_mine::ltl::{parse, PropSet};
use ltlf_mine::pipeline::{run_learn, LearnConfig};

fn main() -> ltlf_mine::Result<()> {
    env_logger::init();
    let props = PropSet::alphabetic(3);
    let target = parse("a W (b & !c)", &props)?;
    let sample = characteristic_sample(&formula_to_dfa(&target, 3)?);
    let data = build_dataset(&target, &props, &sample, DatasetSpec { n_pos: 100, n_neg: 100, length: 15, seed: 8 })?;

    let cfg = LearnConfig { budget: Some(Duration::from_secs(60)), ..LearnConfig::default() };
    let report = run_learn(&data, &cfg, 11)?;
    for c in &report.candidates {
        println!(
            "{:?}: network {:.3}, formula {:.3}, size {:3}  {}",
            c.architecture, c.network_accuracy, c.formula_accuracy, c.size, c.formula
        );
    }
    println!("selected {} (size {}, accuracy {:.3})", report.formula_text, report.size, report.train_accuracy);
    Ok(())
}
