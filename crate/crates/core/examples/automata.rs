//! Compile formulas to minimal DFAs, compare them and build a
//! characteristic sample.

use ltlf_mine::automata::{characteristic_sample, dfa_equivalent, formula_to_dfa, Equivalence};
use ltlf_mine::ltl::{parse, PropSet};

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::alphabetic(2);
    let until = formula_to_dfa(&parse("a U b", &props)?, 2)?;
    print!("a U b\n{}", until.dump());

    let weak = formula_to_dfa(&parse("a W b", &props)?, 2)?;
    match dfa_equivalent(&until, &weak)? {
        Equivalence::Equal => println!("a U b and a W b agree"),
        Equivalence::Counterexample(t) => println!("a U b and a W b differ on {:?}", t.to_bools()),
    }
    let dual = formula_to_dfa(&parse("!(!a R !b)", &props)?, 2)?;
    println!("a U b == !(!a R !b): {}", dfa_equivalent(&until, &dual)?.is_equal());

    for (trace, label) in characteristic_sample(&until) {
        println!("{} {:?}", if label { "+" } else { "-" }, trace.to_bools());
    }
    Ok(())
}
