use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::enumerate::VisitTrace;
use crate::ir::{AssignOp, ComputationSpec};

/// Exact share of the visits falling in each color class.
pub type Measure = BTreeMap<u32, Ratio<u64>>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelismProfile {
    /// `widths[l]`, for each convolution level `l` reached by the trace:
    /// largest number of points sharing the time-point prefix left after
    /// dropping the `l` innermost enumerated variables.
    pub widths: Vec<u64>,
    pub colors: BTreeMap<u32, u64>,
    /// Consecutive visits whose lattice points differ by +1 in exactly one
    /// coordinate.
    pub locality: u64,
    pub measure: Measure,
}

pub fn analyze(trace: &VisitTrace) -> ParallelismProfile {
    let levels = trace.records.iter().map(|r| (r.level as usize + 1).min(r.time_point.len())).max().unwrap_or(0);
    let widths = (0..levels)
        .map(|l| {
            let mut groups: HashMap<(u32, &[u64]), u64> = HashMap::new();
            for r in &trace.records {
                let keep = r.time_point.len().saturating_sub(l);
                *groups.entry((r.copy, &r.time_point[..keep])).or_insert(0) += 1;
            }
            groups.into_values().max().unwrap_or(0)
        })
        .collect();
    let mut colors = BTreeMap::new();
    for r in &trace.records {
        *colors.entry(r.color.0).or_insert(0u64) += 1;
    }
    let total = trace.records.len() as u64;
    let measure = colors.iter().map(|(&c, &n)| (c, Ratio::new(n, total))).collect();
    let locality = trace
        .records
        .windows(2)
        .filter(|w| {
            let (a, b) = (&w[0].lattice_point, &w[1].lattice_point);
            a.len() == b.len() && {
                let diffs: Vec<(u64, u64)> = a.iter().zip(b).filter(|(x, y)| x != y).map(|(x, y)| (*x, *y)).collect();
                matches!(diffs.as_slice(), [(x, y)] if y == &(x + 1))
            }
        })
        .count() as u64;
    ParallelismProfile { widths, colors, locality, measure }
}

/// Locations one unfold copy writes and another copy touches, ignoring
/// accumulations (they commute and are merged by the epilogue or by
/// privatization).
pub fn parallel_conflicts(trace: &VisitTrace, spec: &ComputationSpec) -> Vec<(String, Vec<u64>)> {
    let mut writers: BTreeMap<(String, Vec<u64>), u32> = BTreeMap::new();
    let mut touched: BTreeMap<(String, Vec<u64>), Vec<u32>> = BTreeMap::new();
    let shapes = spec.array_shapes();
    for r in &trace.records {
        for f in &spec.formulas {
            for op in f.operands.refs() {
                let loc = op.location(spec, &r.lattice_point);
                if loc.iter().zip(&shapes[&op.array]).all(|(a, b)| a < b) {
                    touched.entry((op.array.clone(), loc)).or_default().push(r.copy);
                }
            }
            if f.op == AssignOp::Assign {
                let key = (f.result.array.clone(), f.result.location(spec, &r.lattice_point));
                touched.entry(key.clone()).or_default().push(r.copy);
                writers.insert(key, r.copy);
            }
        }
    }
    writers.into_iter().filter(|(k, c)| touched.get(k).is_some_and(|cs| cs.iter().any(|x| x != c))).map(|(k, _)| k).collect()
}
