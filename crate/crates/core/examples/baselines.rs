//! Enumerative baselines: the smallest consistent formula, and the most
//! accurate formula under a size cap, on clean and noisy data.

use std::time::Duration;

use ltlf_mine::baseline::{exact_learner, max_accuracy_learner, ExactOutcome, SearchBudget};
use ltlf_mine::data::{build_dataset, inject_noise, DatasetSpec};
use ltlf_mine::ltl::{parse, PropSet};

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::alphabetic(3);
    let target = parse("!a U (b | c)", &props)?;
    let clean = build_dataset(&target, &props, &[], DatasetSpec { n_pos: 60, n_neg: 60, length: 10, seed: 4 })?;
    let noisy = inject_noise(&clean, 0.02, 5)?;
    let budget = SearchBudget { max_size: 6, time_limit: Some(Duration::from_secs(20)), ..SearchBudget::default() };

    for (name, data) in [("clean", &clean), ("noisy", &noisy)] {
        match exact_learner(data, &budget)? {
            ExactOutcome::Found(f) => println!("{name}: exact found {}", f.to_text(&props)),
            other => println!("{name}: exact failed ({other:?})"),
        }
        let best = max_accuracy_learner(data, &budget)?;
        println!("{name}: max-accuracy {} at {:.3}", best.formula.to_text(&props), best.accuracy);
    }
    Ok(())
}
