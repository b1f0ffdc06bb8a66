//! Encode a formula as a network, discretize a filter into its temporal
//! truth table and extract the formula back.

use ltlf_mine::automata::{dfa_equivalent, formula_to_dfa};
use ltlf_mine::extract::{filter_to_table, network_to_formula, table_to_formula};
use ltlf_mine::ltl::{parse, PropSet};
use ltlf_mine::neural::teacher_network;

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::alphabetic(2);
    let net = teacher_network(&parse("a U b", &props)?, 2)?;
    let table = filter_to_table(&net, 0, 0)?;
    println!("x1 x2 tau | f");
    for x in 0..4 {
        for tau in [false, true] {
            println!(" {}  {}  {}  | {}", x & 1, x >> 1, tau as u8, table.get(x, 0, tau) as u8);
        }
    }
    println!("table formula: {}", table_to_formula(&table)?);

    let props = PropSet::alphabetic(3);
    let target = parse("G (a | F b) & !c W b", &props)?;
    let e = network_to_formula(&teacher_network(&target, 3)?, &props)?;
    println!(
        "{} -> {}  (raw {}, minimized {}, final {})",
        target.to_text(&props),
        e.formula.to_text(&props),
        e.report.raw_size,
        e.report.minimized_size,
        e.report.final_size
    );
    let same = dfa_equivalent(&formula_to_dfa(&target, 3)?, &formula_to_dfa(&e.formula, 3)?)?;
    println!("equivalent: {}", same.is_equal());
    Ok(())
}
