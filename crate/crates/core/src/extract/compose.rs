//! Whole-network extraction: one TNF formula per filter, composed bottom-up
//! by substituting each layer's formulas for the next layer's inputs.

use serde::{Deserialize, Serialize};

use super::{filter_to_table, table_to_formula, ExtractError, TnfFormula};
use crate::ltl::{canonicalize, simplify, Formula, PropSet};
use crate::neural::Network;

/// Sizes for one filter, with inputs counted at their composed sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub layer: usize,
    pub filter: usize,
    pub raw_size: u128,
    pub minimized_size: u128,
    pub hold_clauses: usize,
    pub goal_clauses: usize,
}

/// Formula sizes after each stage: the literal table formulas, the
/// per-table minimized formulas, and the rewritten result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub raw_size: u128,
    pub minimized_size: u128,
    pub final_size: usize,
    pub formula: String,
    pub filters: Vec<FilterReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub formula: Formula,
    pub report: ExtractionReport,
}

fn rewrite(f: &Formula) -> Result<Formula, ExtractError> {
    if f.is_qualitative() {
        Ok(simplify(f)?)
    } else {
        Ok(canonicalize(f))
    }
}

/// Extracts every filter and composes the results into one formula over the
/// network's input propositions. Each composed intermediate formula is
/// rewritten before substitution so that sizes stay manageable; the raw and
/// minimized sizes are computed arithmetically without building the
/// unreduced formulas.
pub fn network_to_formula(net: &Network, props: &PropSet) -> Result<Extraction, ExtractError> {
    let mut atoms: Vec<Formula> = (0..net.n_props).map(Formula::prop).collect();
    let mut raw_sizes = vec![1u128; net.n_props];
    let mut min_sizes = vec![1u128; net.n_props];
    let mut filters = Vec::new();
    for (l, layer) in net.layers.iter().enumerate() {
        let mut next_atoms = Vec::with_capacity(layer.filters.len());
        let mut next_raw = Vec::with_capacity(layer.filters.len());
        let mut next_min = Vec::with_capacity(layer.filters.len());
        for i in 0..layer.filters.len() {
            let table = filter_to_table(net, l, i)?;
            let raw = TnfFormula::raw(&table)?.size_with(&raw_sizes);
            let tnf = table_to_formula(&table)?;
            let minimized = tnf.size_with(&min_sizes);
            filters.push(FilterReport {
                layer: l,
                filter: i,
                raw_size: raw,
                minimized_size: minimized,
                hold_clauses: tnf.hold.len(),
                goal_clauses: tnf.goal.len(),
            });
            next_atoms.push(rewrite(&tnf.to_formula(&atoms))?);
            next_raw.push(raw);
            next_min.push(minimized);
        }
        atoms = next_atoms;
        raw_sizes = next_raw;
        min_sizes = next_min;
    }
    let formula = atoms.pop().expect("the final layer has one filter");
    let report = ExtractionReport {
        raw_size: raw_sizes[0],
        minimized_size: min_sizes[0],
        final_size: formula.size(),
        formula: formula.to_text(props),
        filters,
    };
    Ok(Extraction { formula, report })
}
