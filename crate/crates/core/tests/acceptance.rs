//! End-to-end acceptance checks, one per criterion. Runs without the test
//! harness so that every `criterion N: PASS|FAIL` line reaches the output.
//! Arguments that do not start with `-` filter criteria by name.
//!
//! Criteria 5 to 8 share one experiment sweep (clean and noisy) that is
//! computed once and written as CSV under the cargo tmp dir.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;

use rand::Rng;

use ltlf_mine::automata::{dfa_equivalent, formula_to_dfa};
use ltlf_mine::baseline::SearchBudget;
use ltlf_mine::data::{build_dataset, random_trace, DatasetSpec, LabeledTrace, Trace};
use ltlf_mine::extract::{filter_to_table, network_to_formula, table_to_formula, validate_table, TableVerdict};
use ltlf_mine::ltl::{evaluate, parse, random_formula, satisfies, simplify, Formula, PropSet, RULES};
use ltlf_mine::neural::{gradients, loss, teacher_network, train, FilterWeights, Layer, Mode, Network, TrainConfig};
use ltlf_mine::pipeline::{
    draw_target, run_experiment, write_rows, write_summary, ExperimentConfig, ExperimentResults, Method, ResultRow,
};
use ltlf_mine::seed;

/// Set once the running criterion has printed its verdict.
static REPORTED: AtomicBool = AtomicBool::new(false);

fn report(n: usize, pass: bool, detail: &str) {
    REPORTED.store(true, Ordering::SeqCst);
    println!("criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn equivalent(a: &Formula, b: &Formula, n_props: usize) -> bool {
    let (da, db) = (formula_to_dfa(a, n_props).unwrap(), formula_to_dfa(b, n_props).unwrap());
    dfa_equivalent(&da, &db).unwrap().is_equal()
}

fn criterion_01_teacher_fidelity() {
    let props = PropSet::alphabetic(2);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for text in ["a U b", "a W b", "X a", "WX a", "F a", "G a"] {
        let f = parse(text, &props).unwrap();
        let net = teacher_network(&f, 2).unwrap();
        for trace in Trace::enumerate_up_to(2, 4) {
            let acts = net.forward(&trace, Mode::Hard).unwrap();
            let out = &acts.layers.last().unwrap()[0];
            for (t, &value) in out.iter().take(trace.len()).enumerate() {
                checked += 1;
                if (value == 1.0) != evaluate(&f, &trace, t).unwrap() {
                    mismatches.push(format!("{text} on {:?} at {t}", trace.steps()));
                }
            }
        }
    }
    report(1, mismatches.is_empty(), &format!("{checked} evaluations, {} mismatches", mismatches.len()));
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

fn criterion_02_until_filter_table() {
    // Until weights with every end-of-trace value off.
    let filter = FilterWeights { prop: vec![1.0, 2.0], metric: vec![0.0, 0.0], qual: 1.0, bias: -1.5, out_base: -0.5 };
    let net = Network {
        n_props: 2,
        layers: vec![Layer { filters: vec![filter], input_base: vec![-0.5, -0.5] }],
        beta: 1.0,
        alpha: 0.0,
        qualitative: false,
    };
    let table = filter_to_table(&net, 0, 0).unwrap();

    // The hold row x1 = 1, x2 = 0, m = 0, τ = 1.
    let hold_row = table.get(0b01, 0b00, true);
    let hold_by_hand = (1.0 * 1.0 + 0.0 * 2.0) + (0.0 * 0.0 + 0.0 * 0.0) + f64::max(0.0, 1.0) * 1.0 - 1.5 >= 0.0;

    // (x1, x2, m1, m2, τ) for every row with f = 1.
    #[rustfmt::skip]
    let expected: BTreeSet<[u8; 5]> = [
        [0, 1, 0, 0, 0], [0, 1, 0, 0, 1], [0, 1, 0, 1, 0], [0, 1, 0, 1, 1],
        [0, 1, 1, 0, 0], [0, 1, 1, 0, 1], [0, 1, 1, 1, 0], [0, 1, 1, 1, 1],
        [1, 0, 0, 0, 1], [1, 0, 0, 1, 1], [1, 0, 1, 0, 1], [1, 0, 1, 1, 1],
        [1, 1, 0, 0, 0], [1, 1, 0, 0, 1], [1, 1, 0, 1, 0], [1, 1, 0, 1, 1],
        [1, 1, 1, 0, 0], [1, 1, 1, 0, 1], [1, 1, 1, 1, 0], [1, 1, 1, 1, 1],
    ]
    .into_iter()
    .collect();
    let mut ones = BTreeSet::new();
    for k in 0..table.rows() {
        if table.f[k] {
            let bit = |b: usize| (k >> b & 1) as u8;
            ones.insert([bit(0), bit(1), bit(2), bit(3), bit(4)]);
        }
    }
    let ends_off = !table.end && table.input_end == [false, false];

    let props = PropSet::alphabetic(2);
    let tnf = table_to_formula(&table).unwrap();
    let got = simplify(&tnf.to_formula(&[Formula::prop(0), Formula::prop(1)])).unwrap();
    let until = equivalent(&got, &parse("a U b", &props).unwrap(), 2);

    let pass = hold_row && hold_by_hand && ones == expected && ends_off && until;
    report(
        2,
        pass,
        &format!(
            "hold row {hold_row}, {} rows with f=1, ends off {ends_off}, extracted {}",
            ones.len(),
            got.to_text(&props)
        ),
    );
    assert!(pass);
}

fn criterion_03_round_trip_extraction() {
    let props = PropSet::alphabetic(3);
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let size = 2 + (k % 5) as usize;
        let f = random_formula(size, &props, true, &mut seed::rng(seed::derive(3, &[k]))).unwrap();
        let net = teacher_network(&f, 3).unwrap();
        match network_to_formula(&net, &props) {
            Ok(e) if equivalent(&e.formula, &f, 3) => {}
            Ok(e) => failures.push(format!("{} -> {}", f.to_text(&props), e.formula.to_text(&props))),
            Err(err) => failures.push(format!("{}: {err}", f.to_text(&props))),
        }
    }
    report(3, failures.is_empty(), &format!("{}/100 equivalent", 100 - failures.len()));
    assert!(failures.is_empty(), "{failures:?}");
}

fn criterion_04_gradient_check() {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = seed::rng(seed::derive(4, &[k]));
        let arch: &[usize] = match k % 3 {
            0 => &[1],
            1 => &[3, 1],
            _ => &[3, 3, 1],
        };
        let n_props = 1 + (k % 3) as usize;
        let mut net = Network::random(n_props, arch, false, &mut rng).unwrap();
        net.beta = rng.gen_range(0.5..3.0);
        net.alpha = rng.gen_range(0.0..0.3);
        let data: Vec<LabeledTrace> = (0..5)
            .map(|_| {
                let len = rng.gen_range(1..=6);
                LabeledTrace { trace: random_trace(n_props, len, &mut rng).unwrap(), label: rng.gen() }
            })
            .collect();
        let refs: Vec<&LabeledTrace> = data.iter().collect();
        let (_, analytic) = gradients(&net, &refs);
        let p = net.params();
        for (i, a) in analytic.iter().enumerate() {
            let mut probe = net.clone();
            let mut q = p.clone();
            q[i] = p[i] + h;
            probe.set_params(&q);
            let up = loss(&probe, &data);
            q[i] = p[i] - h;
            probe.set_params(&q);
            let numeric = (up - loss(&probe, &data)) / (2.0 * h);
            worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-7));
        }
    }
    let pass = worst < 1e-4;
    report(4, pass, &format!("max relative error {worst:.2e}"));
    assert!(pass);
}

/// Clean and noisy sweeps over the same targets and test sets.
struct Sweeps {
    clean: ExperimentResults,
    noisy: ExperimentResults,
}

fn sweep_config(noise: f64, methods: Vec<Method>) -> ExperimentConfig {
    ExperimentConfig { noise, methods, seed: 2024, ..ExperimentConfig::default() }
}

fn sweeps() -> &'static Sweeps {
    static SWEEPS: OnceLock<Sweeps> = OnceLock::new();
    SWEEPS.get_or_init(|| {
        let clean = run_experiment(&sweep_config(0.0, vec![Method::Neural])).unwrap();
        let noisy =
            run_experiment(&sweep_config(0.01, vec![Method::Neural, Method::Exact, Method::MaxAccuracy])).unwrap();
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
        std::fs::create_dir_all(&dir).unwrap();
        for (name, r) in [("clean", &clean), ("noisy", &noisy)] {
            write_rows(&r.rows, File::create(dir.join(format!("{name}_rows.csv"))).unwrap()).unwrap();
            write_summary(&r.summary, File::create(dir.join(format!("{name}_summary.csv"))).unwrap()).unwrap();
        }
        println!("sweep results written to {}", dir.display());
        Sweeps { clean, noisy }
    })
}

fn rows_of(r: &ExperimentResults, m: Method) -> Vec<&ResultRow> {
    r.rows.iter().filter(|row| row.method == m).collect()
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_05_learning_accuracy() {
    let rows = rows_of(&sweeps().clean, Method::Neural);
    let errors: Vec<&str> = rows.iter().filter(|r| !r.error.is_empty()).map(|r| r.error.as_str()).collect();
    let acc = mean(rows.iter().map(|r| if r.accuracy.is_nan() { 0.0 } else { r.accuracy }));
    let perfect = rows.iter().filter(|r| r.accuracy == 1.0).count() as f64 / rows.len() as f64;
    let pass = rows.len() == 50 && errors.is_empty() && acc >= 0.90 && perfect >= 0.5;
    report(
        5,
        pass,
        &format!(
            "{} runs, mean test accuracy {acc:.3}, {:.0}% perfect, {} errors",
            rows.len(),
            perfect * 100.0,
            errors.len()
        ),
    );
    assert!(pass, "{errors:?}");
}

fn criterion_06_noise_robustness() {
    let clean = mean(rows_of(&sweeps().clean, Method::Neural).iter().map(|r| r.accuracy));
    let noisy = mean(rows_of(&sweeps().noisy, Method::Neural).iter().map(|r| r.accuracy));
    let drop = (clean - noisy) * 100.0;
    let pass = drop <= 5.0;
    report(6, pass, &format!("clean {clean:.3}, noisy {noisy:.3}, drop {drop:.1} pp"));
    assert!(pass);
}

fn criterion_07_baseline_contrast() {
    let budget = SearchBudget::default().time_limit.unwrap().as_secs_f64();
    let exact = rows_of(&sweeps().noisy, Method::Exact);
    let max_acc = rows_of(&sweeps().noisy, Method::MaxAccuracy);
    let failed = exact.iter().filter(|r| r.timeout).count() as f64 / exact.len() as f64;
    // Within budget, allowing for the final scoring pass after the deadline.
    let returned = max_acc.iter().filter(|r| r.error.is_empty() && r.runtime_secs <= budget + 5.0).count();
    let acc = mean(max_acc.iter().map(|r| r.accuracy));
    let worst = max_acc.iter().map(|r| r.accuracy).fold(f64::INFINITY, f64::min);
    let pass = failed >= 0.9 && returned == max_acc.len() && acc >= 0.75;
    report(
        7,
        pass,
        &format!(
            "exact failed on {:.0}%, max-accuracy returned {returned}/{} with mean accuracy {acc:.3} (worst {worst:.3})",
            failed * 100.0,
            max_acc.len()
        ),
    );
    assert!(pass);
}

fn criterion_08_pipeline_shrinkage() {
    let rows = rows_of(&sweeps().clean, Method::Neural);
    let mut violations = Vec::new();
    for r in &rows {
        let (Ok(raw), Ok(min)) = (r.raw_size.parse::<u128>(), r.minimized_size.parse::<u128>()) else {
            violations.push(format!("size {} #{}: no stage sizes", r.target_size, r.index));
            continue;
        };
        let fin = r.formula_size as u128;
        if raw < min || min < fin || (!r.fallback && fin > 25) {
            violations.push(format!("size {} #{}: {raw} -> {min} -> {fin}", r.target_size, r.index));
        }
    }
    let max_raw = rows.iter().filter_map(|r| r.raw_size.parse::<u128>().ok()).max().unwrap_or(0);
    report(8, violations.is_empty(), &format!("{} runs, largest raw size {max_raw}", rows.len()));
    assert!(violations.is_empty(), "{violations:?}");
}

/// Substitution pool over two propositions. Metric members are only used
/// for the Boolean rules.
fn pool(props: &PropSet, metric: bool) -> Vec<Formula> {
    let mut texts = vec![
        "true", "false", "a", "b", "!a", "!b", "a & b", "a | !b", "F a", "G b", "F !b", "a U b", "b W !a", "a R b",
    ];
    if metric {
        texts.extend(["X a", "WX !b", "X (a | b)"]);
    }
    texts.into_iter().map(|t| parse(t, props).unwrap()).collect()
}

fn criterion_09_rewrite_and_stutter_soundness() {
    let props = PropSet::alphabetic(2);
    let meta = PropSet::new(["p", "q", "r"]).unwrap();
    let traces: Vec<Trace> = Trace::enumerate_up_to(2, 4).collect();
    let mut instances = 0;
    let mut violations = Vec::new();
    for rule in RULES {
        let (lhs, rhs) = (parse(rule.lhs, &meta).unwrap(), parse(rule.rhs, &meta).unwrap());
        let items = pool(&props, rule.boolean);
        let vars = lhs.max_prop().map_or(0, |m| m + 1);
        let combos = items.len().pow(vars as u32);
        for c in 0..combos {
            let pick = |v: usize| items[c / items.len().pow(v as u32) % items.len()].clone();
            let (l, r) = (lhs.substitute(&pick), rhs.substitute(&pick));
            if l.size() > 5 {
                continue;
            }
            instances += 1;
            let by_eval = traces.iter().all(|t| satisfies(&l, t) == satisfies(&r, t));
            if !by_eval || !equivalent(&l, &r, 2) {
                violations.push(format!("{}: {} vs {}", rule.name, l.to_text(&props), r.to_text(&props)));
            }
        }
    }

    // Whole-formula simplification and stutter padding.
    let short: Vec<Trace> = Trace::enumerate_up_to(2, 3).collect();
    for k in 0..300u64 {
        let f = random_formula(2 + (k % 4) as usize, &props, true, &mut seed::rng(seed::derive(9, &[k]))).unwrap();
        let s = simplify(&f).unwrap();
        if !equivalent(&f, &s, 2) {
            violations.push(format!("simplify {} -> {}", f.to_text(&props), s.to_text(&props)));
        }
        for t in &short {
            for len in t.len()..=4 {
                if satisfies(&f, &t.pad_stutter(len).unwrap()) != satisfies(&f, t) {
                    violations.push(format!("stutter {} on {:?} to {len}", f.to_text(&props), t.steps()));
                }
            }
        }
    }
    report(
        9,
        violations.is_empty(),
        &format!("{} rules, {instances} rule instances, {} violations", RULES.len(), violations.len()),
    );
    assert!(violations.is_empty(), "{violations:?}");
}

fn criterion_10_tables_are_valid() {
    let mut invalid = 0;
    let mut check = |net: &Network| -> usize {
        let mut n = 0;
        for (l, layer) in net.layers.iter().enumerate() {
            for i in 0..layer.filters.len() {
                n += 1;
                if validate_table(&filter_to_table(net, l, i).unwrap()) != TableVerdict::Valid {
                    invalid += 1;
                }
            }
        }
        n
    };

    let mut random = 0;
    let mut rng = seed::rng(10);
    while random < 1000 {
        let qualitative = rng.gen();
        random += check(&Network::random(3, &[3, 1], qualitative, &mut rng).unwrap());
    }

    let props = PropSet::alphabetic(3);
    let mut trained = 0;
    for k in 0..25u64 {
        let cell = seed::derive(10, &[k]);
        let (target, _) = draw_target(3, &props, 8, cell).unwrap();
        let spec = DatasetSpec { n_pos: 40, n_neg: 40, length: 8, seed: seed::derive(cell, &[1]) };
        let data = build_dataset(&target, &props, &[], spec).unwrap();
        let net = Network::random(3, &[3, 1], k % 2 == 0, &mut seed::rng(seed::derive(cell, &[2]))).unwrap();
        let cfg = TrainConfig { max_epochs: 60, seed: cell, ..TrainConfig::default() };
        trained += check(&train(net, &data, &cfg).unwrap().network);
    }

    let pass = invalid == 0 && random >= 1000 && trained >= 100;
    report(10, pass, &format!("{random} random and {trained} trained filters, {invalid} invalid"));
    assert!(pass);
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("criterion_01_teacher_fidelity", criterion_01_teacher_fidelity),
        ("criterion_02_until_filter_table", criterion_02_until_filter_table),
        ("criterion_03_round_trip_extraction", criterion_03_round_trip_extraction),
        ("criterion_04_gradient_check", criterion_04_gradient_check),
        ("criterion_05_learning_accuracy", criterion_05_learning_accuracy),
        ("criterion_06_noise_robustness", criterion_06_noise_robustness),
        ("criterion_07_baseline_contrast", criterion_07_baseline_contrast),
        ("criterion_08_pipeline_shrinkage", criterion_08_pipeline_shrinkage),
        ("criterion_09_rewrite_and_stutter_soundness", criterion_09_rewrite_and_stutter_soundness),
        ("criterion_10_tables_are_valid", criterion_10_tables_are_valid),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        REPORTED.store(false, Ordering::SeqCst);
        if std::panic::catch_unwind(check).is_err() {
            if !REPORTED.load(Ordering::SeqCst) {
                println!("criterion {}: FAIL (aborted before a verdict)", i + 1);
            }
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
