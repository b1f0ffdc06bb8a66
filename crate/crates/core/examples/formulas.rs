//! Parse, print, evaluate, simplify and sample formulas.

use ltlf_mine::data::Trace;
use ltlf_mine::ltl::{parse, random_formula, simplify, truth_vector, PropSet};
use ltlf_mine::seed;

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::new(["req", "grant"])?;
    let f = parse("G (!req | F grant)", &props)?;
    println!("formula  {}  (size {})", f.to_text(&props), f.size());
    println!("nnf      {}", f.to_nnf().to_text(&props));

    // A request answered at step 2, then one that is never answered.
    let served = Trace::from_bools(vec![vec![true, false], vec![false, false], vec![false, true]])?;
    let dropped = Trace::from_bools(vec![vec![true, false], vec![false, true], vec![true, false]])?;
    println!("served  {:?}", truth_vector(&f, &served));
    println!("dropped {:?}", truth_vector(&f, &dropped));

    let ab = PropSet::alphabetic(2);
    let messy = parse("(a | !a) & (b U (b | false)) & !!F a", &ab)?;
    println!("simplify {}  ->  {}", messy.to_text(&ab), simplify(&messy)?.to_text(&ab));

    let abc = PropSet::alphabetic(3);
    let mut rng = seed::rng(7);
    for size in 2..=6 {
        println!("random size {size}: {}", random_formula(size, &abc, true, &mut rng)?.to_text(&abc));
    }
    Ok(())
}
