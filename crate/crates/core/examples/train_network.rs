//! Train a small filter network on one target and inspect it.

use ltlf_mine::data::{build_dataset, DatasetSpec};
use ltlf_mine::extract::network_to_formula;
use ltlf_mine::ltl::{parse, PropSet};
use ltlf_mine::neural::{hard_accuracy, train, Network, TrainConfig};
use ltlf_mine::seed;

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::alphabetic(2);
    let target = parse("F (a & b)", &props)?;
    let data = build_dataset(&target, &props, &[], DatasetSpec { n_pos: 100, n_neg: 100, length: 8, seed: 3 })?;

    let net = Network::random(2, &[2, 1], true, &mut seed::rng(1))?;
    println!("architecture {:?}, {} parameters", net.architecture(), net.param_count());
    let outcome = train(net, &data, &TrainConfig { max_epochs: 1500, seed: 6, ..TrainConfig::default() })?;
    for r in outcome.log.iter().step_by(100) {
        println!("epoch {:4}  loss {:.4}  hard accuracy {:.3}  beta {:.2}", r.epoch, r.loss, r.hard_acc, r.beta);
    }
    let m = hard_accuracy(&outcome.network, &data)?;
    println!(
        "{:?} at epoch {}: accuracy {:.3} precision {:.3} recall {:.3}",
        outcome.stop, outcome.best_epoch, m.accuracy, m.precision, m.recall
    );
    let extracted = network_to_formula(&outcome.network, &props)?;
    println!("extracted {}", extracted.formula.to_text(&props));
    Ok(())
}
