use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ast::*;

/// A def/use pair: formula `def` writes `array`, occurrence `occurrence` of
/// formula `use_formula`'s operands reads it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepEdge {
    pub array: String,
    pub def: usize,
    pub use_formula: usize,
    pub occurrence: usize,
    /// Per-position displacement of the use relative to the def.
    pub displacement: Vec<u32>,
    /// Per-position `(result index, operand index)` pairs.
    pub positions: Vec<(String, String)>,
}

impl DepEdge {
    /// True when every position pairs an index with itself.
    pub fn is_aligned(&self) -> bool {
        self.positions.iter().all(|(r, o)| r == o)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCycle {
    /// Indexes along the cycle, starting from the earliest declared one.
    pub indexes: Vec<String>,
}

impl IndexCycle {
    pub fn len(&self) -> usize {
        self.indexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indexes.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub edges: Vec<DepEdge>,
    pub cycles: Vec<IndexCycle>,
}

impl DependencyGraph {
    pub fn max_cycle_len(&self) -> usize {
        self.cycles.iter().map(IndexCycle::len).max().unwrap_or(0)
    }

    pub fn has_displacement(&self) -> bool {
        self.edges.iter().any(|e| e.displacement.iter().any(|&d| d > 0))
    }
}

/// Builds def/use edges between formula results and operand occurrences of
/// the same array, and the index cycles induced by matching positions.
pub fn extract_dependencies(spec: &ComputationSpec) -> DependencyGraph {
    let mut edges = Vec::new();
    for (def, df) in spec.formulas.iter().enumerate() {
        for (use_formula, uf) in spec.formulas.iter().enumerate() {
            for (occurrence, r) in uf.operands.refs().into_iter().enumerate() {
                if r.array != df.result.array || r.factors.len() != df.result.factors.len() {
                    continue;
                }
                edges.push(DepEdge {
                    array: r.array.clone(),
                    def,
                    use_formula,
                    occurrence,
                    displacement: r.factors.iter().map(|f| f.displacement).collect(),
                    positions: df
                        .result
                        .factors
                        .iter()
                        .zip(&r.factors)
                        .map(|(a, b)| (a.index.clone(), b.index.clone()))
                        .collect(),
                });
            }
        }
    }

    let mut succ: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for e in &edges {
        for (r, o) in &e.positions {
            if let (Some(a), Some(b)) = (spec.index_position(r), spec.index_position(o)) {
                succ.entry(a).or_default().insert(b);
            }
        }
    }
    let cycles = elementary_cycles(&succ)
        .into_iter()
        .map(|c| IndexCycle { indexes: c.into_iter().map(|i| spec.indexes[i].name.clone()).collect() })
        .collect();
    DependencyGraph { edges, cycles }
}

/// Enumerates elementary cycles, each reported once starting at its smallest
/// node. Exponential in the worst case; index graphs are tiny.
fn elementary_cycles(succ: &BTreeMap<usize, BTreeSet<usize>>) -> Vec<Vec<usize>> {
    fn walk(
        start: usize,
        node: usize,
        succ: &BTreeMap<usize, BTreeSet<usize>>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for &next in succ.get(&node).into_iter().flatten() {
            if next == start {
                out.push(path.clone());
            } else if next > start && !path.contains(&next) {
                path.push(next);
                walk(start, next, succ, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for &start in succ.keys() {
        let mut path = vec![start];
        walk(start, start, succ, &mut path, &mut out);
    }
    out
}
