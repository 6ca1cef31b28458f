use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::VisitTrace;
use crate::ir::{AssignOp, ComputationSpec};

use super::ExecContext;

type Loc = (String, Vec<u64>);
type Inst = (usize, Vec<u64>);

/// Writes a location has seen: the last assignment and every accumulation
/// applied after it, in application order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct History {
    assigned: Option<Inst>,
    accumulated: Vec<Inst>,
}

impl History {
    fn write(&mut self, op: AssignOp, inst: Inst) {
        match op {
            AssignOp::Assign => {
                self.assigned = Some(inst);
                self.accumulated.clear();
            }
            AssignOp::Accumulate => self.accumulated.push(inst),
        }
    }

    /// Same value under exact arithmetic: accumulation order is irrelevant.
    fn same_value(&self, other: &History) -> bool {
        let mut a = self.accumulated.clone();
        let mut b = other.accumulated.clone();
        a.sort();
        b.sort();
        self.assigned == other.assigned && a == b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepViolation {
    /// Record at which the stale value was read; `None` for a wrong final
    /// value.
    pub seq: Option<u64>,
    pub formula: Option<usize>,
    pub array: String,
    pub location: Vec<u64>,
}

impl fmt::Display for DepViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.seq, self.formula) {
            (Some(seq), Some(fi)) => {
                write!(f, "{}{:?} clobbered before its use by formula {} at record {}", self.array, self.location, fi + 1, seq)
            }
            _ => write!(f, "{}{:?} ends with a different value", self.array, self.location),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyReport {
    pub violations: Vec<DepViolation>,
    /// Some accumulations ran in a different order than in the
    /// lexicographic execution; harmless under exact arithmetic.
    pub commutes: bool,
}

impl DependencyReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn in_bounds(shapes: &std::collections::BTreeMap<String, Vec<u64>>, array: &str, loc: &[u64]) -> bool {
    shapes.get(array).is_some_and(|s| s.len() == loc.len() && loc.iter().zip(s).all(|(a, b)| a < b))
}

struct Expected {
    reads: HashMap<(Vec<u64>, usize, usize), History>,
    finals: HashMap<Loc, History>,
}

fn expected(spec: &ComputationSpec) -> Expected {
    let shapes = spec.array_shapes();
    let mut mem: HashMap<Loc, History> = HashMap::new();
    let mut reads = HashMap::new();
    for p in spec.lattice_points() {
        for (fi, f) in spec.formulas.iter().enumerate() {
            for (o, r) in f.operands.refs().into_iter().enumerate() {
                let loc = r.location(spec, &p);
                if !in_bounds(&shapes, &r.array, &loc) {
                    continue;
                }
                let h = if r.array == f.result.array {
                    History::default()
                } else {
                    mem.get(&(r.array.clone(), loc)).cloned().unwrap_or_default()
                };
                reads.insert((p.clone(), fi, o), h);
            }
            let loc = (f.result.array.clone(), f.result.location(spec, &p));
            mem.entry(loc).or_default().write(f.op, (fi, p.clone()));
        }
    }
    Expected { reads, finals: mem }
}

/// Replays the trace on write histories instead of values. A read that
/// does not see the history the lexicographic execution would have seen
/// is a violation, as is a location ending with a different history.
pub fn check_dependencies(trace: &VisitTrace, ctx: &ExecContext) -> DependencyReport {
    let spec = ctx.spec;
    let shapes = spec.array_shapes();
    let want = expected(spec);
    let saves = ctx.saves();
    let loads = ctx.loads();
    let mut mem: HashMap<Loc, History> = HashMap::new();
    let mut cells: Vec<Option<History>> = vec![None; ctx.plan.locations as usize];
    let mut partials: HashMap<(u32, Loc), History> = HashMap::new();
    let mut report = DependencyReport::default();

    for rec in &trace.records {
        let p = &rec.lattice_point;
        for (fi, f) in spec.formulas.iter().enumerate() {
            for (o, r) in f.operands.refs().into_iter().enumerate() {
                let loc = r.location(spec, p);
                if !in_bounds(&shapes, &r.array, &loc) {
                    continue;
                }
                let got = match loads.get(&(rec.seq, fi, o)) {
                    Some(&cell) => cells.get(cell as usize).cloned().flatten(),
                    None => Some(mem.get(&(r.array.clone(), loc.clone())).cloned().unwrap_or_default()),
                };
                let ok = match (got, want.reads.get(&(p.clone(), fi, o))) {
                    (Some(g), Some(w)) => g.same_value(w),
                    _ => false,
                };
                if !ok {
                    report.violations.push(DepViolation {
                        seq: Some(rec.seq),
                        formula: Some(fi),
                        array: r.array.clone(),
                        location: loc,
                    });
                }
            }
            let loc = (f.result.array.clone(), f.result.location(spec, p));
            if ctx.private.contains(&f.result.array) {
                partials.entry((rec.copy, loc)).or_default().write(f.op, (fi, p.clone()));
                continue;
            }
            if let Some(&cell) = saves.get(&(rec.seq, fi)) {
                if let Some(slot) = cells.get_mut(cell as usize) {
                    *slot = Some(mem.get(&loc).cloned().unwrap_or_default());
                }
            }
            mem.entry(loc).or_default().write(f.op, (fi, p.clone()));
        }
    }
    let mut partials: Vec<_> = partials.into_iter().collect();
    partials.sort_by(|a, b| a.0.cmp(&b.0));
    for ((_, loc), h) in partials {
        mem.entry(loc).or_default().accumulated.extend(h.accumulated);
    }

    let mut locs: Vec<&Loc> = mem.keys().chain(want.finals.keys()).collect();
    locs.sort();
    locs.dedup();
    for loc in locs {
        let got = mem.get(loc).cloned().unwrap_or_default();
        let w = want.finals.get(loc).cloned().unwrap_or_default();
        if !got.same_value(&w) {
            report.violations.push(DepViolation { seq: None, formula: None, array: loc.0.clone(), location: loc.1.clone() });
        } else if got.accumulated != w.accumulated {
            report.commutes = true;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate;
    use crate::ir::parse_spec;
    use crate::schedule::{sequential_schedule, sequential_schedule_with_order};

    #[test]
    fn transpose_needs_its_temp() {
        let spec = parse_spec("space I[2],J[2]; a(I,J) = a(J,I);").unwrap();
        let tree = sequential_schedule(&spec).unwrap();
        let trace = enumerate(&tree).unwrap();
        assert!(check_dependencies(&trace, &ExecContext::of(&tree)).pass());
        let report = check_dependencies(&trace, &ExecContext::of(&tree).without_temps());
        assert!(!report.pass());
        assert_eq!(report.violations[0].array, "a");
        assert_eq!(report.violations[0].location, vec![1, 0]);
    }

    #[test]
    fn reordered_reduction_commutes() {
        let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
        let order: Vec<String> = ["K", "I", "J"].iter().map(|s| s.to_string()).collect();
        let tree = sequential_schedule_with_order(&spec, &order).unwrap();
        let report = check_dependencies(&enumerate(&tree).unwrap(), &ExecContext::of(&tree));
        assert!(report.pass());
        let mut rev = enumerate(&sequential_schedule(&spec).unwrap()).unwrap();
        rev.records.reverse();
        let report = check_dependencies(&rev, &ExecContext::plain(&spec));
        assert!(report.pass());
        assert!(report.commutes);
    }
}
