use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::enumerate::VisitTrace;
use crate::ir::ComputationSpec;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub expected: u64,
    pub visited: u64,
    pub missing: Vec<Vec<u64>>,
    pub duplicated: Vec<Vec<u64>>,
    /// Visited points outside the declared space.
    pub foreign: Vec<Vec<u64>>,
}

impl CoverageReport {
    pub fn pass(&self) -> bool {
        self.missing.is_empty() && self.duplicated.is_empty() && self.foreign.is_empty()
    }
}

/// Compares the visited lattice points with the declared space.
pub fn check_coverage(trace: &VisitTrace, spec: &ComputationSpec) -> CoverageReport {
    let mut seen: BTreeMap<&[u64], u64> = BTreeMap::new();
    for r in &trace.records {
        *seen.entry(&r.lattice_point).or_insert(0) += 1;
    }
    let all = spec.lattice_points();
    let mut report = CoverageReport { expected: all.len() as u64, visited: trace.records.len() as u64, ..Default::default() };
    for p in &all {
        match seen.remove(p.as_slice()) {
            None => report.missing.push(p.clone()),
            Some(1) => {}
            Some(_) => report.duplicated.push(p.clone()),
        }
    }
    report.foreign = seen.into_keys().map(<[u64]>::to_vec).collect();
    report
}
