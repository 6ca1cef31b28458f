//! Temporary binding by version simulation.
//!
//! A version names the value held by a location: the assignment that last
//! wrote it plus the accumulations applied since. The reference versions
//! come from executing the spec point by point in lexicographic order; a
//! schedule is correct when each read sees its reference version, either
//! in memory or in a temporary saved before the location was overwritten.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::enumerate::{enumerate, VisitRecord};
use crate::ir::{AssignOp, ComputationSpec, DependencyGraph};

use super::{sequential_schedule, BuildError, ScheduleTree, TempOp, TempPlan};

type Event = (usize, u64);
type Loc = (String, Vec<u64>);

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Version {
    base: Option<Event>,
    acc: BTreeSet<Event>,
}

impl Version {
    fn apply(&mut self, op: AssignOp, ev: Event) {
        match op {
            AssignOp::Assign => {
                self.base = Some(ev);
                self.acc.clear();
            }
            AssignOp::Accumulate => {
                self.acc.insert(ev);
            }
        }
    }
}

struct Reference {
    /// (lattice rank, formula, occurrence) -> version read
    reads: HashMap<(u64, usize, usize), Version>,
    finals: HashMap<Loc, Version>,
}

fn in_bounds(shapes: &BTreeMap<String, Vec<u64>>, array: &str, loc: &[u64]) -> bool {
    loc.iter().zip(&shapes[array]).all(|(a, b)| a < b)
}

fn reference(spec: &ComputationSpec) -> Reference {
    let shapes = spec.array_shapes();
    let mut live: HashMap<Loc, Version> = HashMap::new();
    let mut reads = HashMap::new();
    for p in spec.lattice_points() {
        let r = spec.rank(&p);
        for (fi, f) in spec.formulas.iter().enumerate() {
            for (o, rf) in f.operands.refs().into_iter().enumerate() {
                let loc = rf.location(spec, &p);
                if !in_bounds(&shapes, &rf.array, &loc) {
                    continue;
                }
                let v = if rf.array == f.result.array {
                    Version::default()
                } else {
                    live.get(&(rf.array.clone(), loc)).cloned().unwrap_or_default()
                };
                reads.insert((r, fi, o), v);
            }
            let loc = (f.result.array.clone(), f.result.location(spec, &p));
            live.entry(loc).or_default().apply(f.op, (fi, r));
        }
    }
    Reference { reads, finals: live }
}

struct Read {
    loc: Loc,
    version: Version,
}

/// Binds temporaries for `tree` and returns the plan, or the first
/// dependency the schedule cannot honour.
pub fn bind_temporaries(tree: &ScheduleTree, budget: Option<u32>) -> Result<TempPlan, BuildError> {
    let spec = &tree.spec;
    let shapes = spec.array_shapes();
    let trace = enumerate(tree)?;
    let reference = reference(spec);
    let copies = tree.copies().max(1) as usize;

    // reads per event in execution order, and last event needing each version
    let reads_at = |rec: &VisitRecord, fi: usize| -> Vec<(usize, Read)> {
        let f = &spec.formulas[fi];
        let r = spec.rank(&rec.lattice_point);
        f.operands
            .refs()
            .into_iter()
            .enumerate()
            .filter_map(|(o, rf)| {
                let loc = rf.location(spec, &rec.lattice_point);
                if !in_bounds(&shapes, &rf.array, &loc) {
                    return None;
                }
                let version = reference.reads[&(r, fi, o)].clone();
                Some((o, Read { loc: (rf.array.clone(), loc), version }))
            })
            .collect()
    };
    let mut last_need: HashMap<(Loc, Version), usize> = HashMap::new();
    let mut t = 0usize;
    for rec in &trace.records {
        for fi in 0..spec.formulas.len() {
            for (_, read) in reads_at(rec, fi) {
                last_need.insert((read.loc, read.version), t);
            }
            t += 1;
        }
    }

    let mut live: HashMap<Loc, Version> = HashMap::new();
    let mut partial: Vec<HashMap<Loc, Version>> = vec![HashMap::new(); copies];
    let mut cells: Vec<Vec<Option<(Loc, Version, usize)>>> = vec![Vec::new(); copies];
    let mut peak = 0usize;
    // (copy, local cell) pending the per-copy offset
    let mut ops: Vec<(usize, TempOp)> = Vec::new();
    let mut t = 0usize;
    for rec in &trace.records {
        let c = rec.copy as usize;
        let r = spec.rank(&rec.lattice_point);
        for (fi, f) in spec.formulas.iter().enumerate() {
            for (o, read) in reads_at(rec, fi) {
                let current = live.get(&read.loc).cloned().unwrap_or_default();
                if current == read.version {
                    continue;
                }
                let cell = cells[c].iter().position(|x| x.as_ref().is_some_and(|(l, v, _)| *l == read.loc && *v == read.version));
                match cell {
                    Some(cell) => ops.push((c, TempOp::Load { seq: rec.seq, formula: fi, occurrence: o, cell: cell as u32 })),
                    None => {
                        return Err(BuildError::DependencyBroken {
                            array: read.loc.0,
                            location: read.loc.1,
                            reason: format!("read by formula {} at {:?} after it was overwritten", fi + 1, rec.lattice_point),
                        })
                    }
                }
            }
            for pool in cells.iter_mut() {
                for slot in pool.iter_mut() {
                    if slot.as_ref().is_some_and(|(_, _, last)| *last <= t) {
                        *slot = None;
                    }
                }
            }

            let loc = (f.result.array.clone(), f.result.location(spec, &rec.lattice_point));
            if tree.is_private(&f.result.array) {
                partial[c].entry(loc).or_default().apply(f.op, (fi, r));
            } else {
                let entry = live.entry(loc.clone()).or_default();
                let old = entry.clone();
                if let Some(&last) = last_need.get(&(loc.clone(), old.clone())) {
                    let held = cells[c].iter().any(|x| x.as_ref().is_some_and(|(l, v, _)| *l == loc && *v == old));
                    if last > t && !held {
                        let pool = &mut cells[c];
                        let cell = match pool.iter().position(Option::is_none) {
                            Some(i) => i,
                            None => {
                                pool.push(None);
                                pool.len() - 1
                            }
                        };
                        pool[cell] = Some((loc.clone(), old, last));
                        peak = peak.max(pool.iter().filter(|x| x.is_some()).count());
                        ops.push((c, TempOp::Save { seq: rec.seq, formula: fi, cell: cell as u32 }));
                    }
                }
                live.get_mut(&loc).unwrap().apply(f.op, (fi, r));
            }
            t += 1;
        }
    }

    // epilogue: partials merge into their target
    for part in &partial {
        for (loc, v) in part {
            let entry = live.entry(loc.clone()).or_default();
            entry.acc.extend(v.acc.iter().copied());
        }
    }
    let locs: BTreeSet<&Loc> = live.keys().chain(reference.finals.keys()).collect();
    for loc in locs {
        let got = live.get(loc).cloned().unwrap_or_default();
        let want = reference.finals.get(loc).cloned().unwrap_or_default();
        if got != want {
            return Err(BuildError::DependencyBroken {
                array: loc.0.clone(),
                location: loc.1.clone(),
                reason: "final value differs from the lexicographic execution".into(),
            });
        }
    }

    let per_copy = peak as u32;
    let locations = per_copy * copies as u32;
    if let Some(b) = budget {
        if locations > b {
            return Err(BuildError::BudgetTooSmall { budget: b, minimal: locations });
        }
    }
    let ops = ops
        .into_iter()
        .map(|(c, op)| {
            let off = c as u32 * per_copy;
            match op {
                TempOp::Save { seq, formula, cell } => TempOp::Save { seq, formula, cell: cell + off },
                TempOp::Load { seq, formula, occurrence, cell } => TempOp::Load { seq, formula, occurrence, cell: cell + off },
            }
        })
        .collect();
    Ok(TempPlan { locations, per_copy, max_unfold: max_unfold(budget, per_copy), ops })
}

fn max_unfold(budget: Option<u32>, per_copy: u32) -> Option<u32> {
    let b = budget?;
    if per_copy == 0 {
        return None;
    }
    let n = b / per_copy;
    Some(if n == 0 { 0 } else { 1 << (31 - n.leading_zeros()) })
}

/// Minimal temporary plan of the lexicographic schedule under `budget`
/// cells. Fails with the minimal requirement when the budget is short.
pub fn allocate_temporaries(spec: &ComputationSpec, deps: &DependencyGraph, budget: u32) -> Result<TempPlan, BuildError> {
    let mut plan = if deps.edges.is_empty() { TempPlan::default() } else { sequential_schedule(spec)?.temp_plan };
    if plan.locations > budget {
        return Err(BuildError::BudgetTooSmall { budget, minimal: plan.locations });
    }
    plan.max_unfold = max_unfold(Some(budget), plan.per_copy);
    Ok(plan)
}
