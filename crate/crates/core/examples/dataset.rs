//! Build a balanced dataset around a characteristic sample, add label
//! noise and round-trip it through the JSON-lines format.

use ltlf_mine::automata::{characteristic_sample, formula_to_dfa};
use ltlf_mine::data::{build_dataset, inject_noise, read_dataset, write_dataset, DatasetSpec};
use ltlf_mine::ltl::{parse, PropSet};

fn main() -> ltlf_mine::Result<()> {
    let props = PropSet::alphabetic(3);
    let target = parse("a U (b & c)", &props)?;
    let sample = characteristic_sample(&formula_to_dfa(&target, 3)?);
    let spec = DatasetSpec { n_pos: 50, n_neg: 50, length: 10, seed: 1 };
    let clean = build_dataset(&target, &props, &sample, spec)?;
    println!(
        "{} traces, {} positive, {:.0}% from the characteristic sample",
        clean.len(),
        clean.positives(),
        clean.char_fraction() * 100.0
    );

    let noisy = inject_noise(&clean, 0.05, 2)?;
    println!("flipped labels at {:?}", noisy.provenance.flipped);

    let mut buf = Vec::new();
    write_dataset(&noisy, &mut buf)?;
    let text = String::from_utf8(buf).expect("datasets are UTF-8");
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    assert_eq!(read_dataset(text.as_bytes())?, noisy);
    Ok(())
}
