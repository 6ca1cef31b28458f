use std::collections::HashMap;

use crate::enumerate::VisitTrace;
use crate::ir::{AssignOp, ComputationSpec};
use crate::schedule::{ScheduleTree, TempOp, TempPlan};

use super::{ArrayStore, Scalar, VerifyError};

/// What the interpreter needs besides the trace: the formulas, the
/// temporary plan and the privatized accumulators.
#[derive(Clone, Debug)]
pub struct ExecContext<'a> {
    pub spec: &'a ComputationSpec,
    pub plan: TempPlan,
    pub private: Vec<String>,
}

impl<'a> ExecContext<'a> {
    pub fn of(tree: &'a ScheduleTree) -> Self {
        ExecContext {
            spec: &tree.spec,
            plan: tree.temp_plan.clone(),
            private: tree.unfold.as_ref().map(|u| u.private.clone()).unwrap_or_default(),
        }
    }

    /// No temporaries, nothing privatized.
    pub fn plain(spec: &'a ComputationSpec) -> Self {
        ExecContext { spec, plan: TempPlan::default(), private: Vec::new() }
    }

    pub fn without_temps(mut self) -> Self {
        self.plan = TempPlan::default();
        self
    }

    pub(crate) fn saves(&self) -> HashMap<(u64, usize), u32> {
        self.plan
            .ops
            .iter()
            .filter_map(|op| match *op {
                TempOp::Save { seq, formula, cell } => Some(((seq, formula), cell)),
                TempOp::Load { .. } => None,
            })
            .collect()
    }

    pub(crate) fn loads(&self) -> HashMap<(u64, usize, usize), u32> {
        self.plan
            .ops
            .iter()
            .filter_map(|op| match *op {
                TempOp::Load { seq, formula, occurrence, cell } => Some(((seq, formula, occurrence), cell)),
                TempOp::Save { .. } => None,
            })
            .collect()
    }

    pub(crate) fn check_point(&self, p: &[u64]) -> Result<(), VerifyError> {
        let sizes = self.spec.sizes();
        if p.len() != sizes.len() || p.iter().zip(&sizes).any(|(x, n)| x >= n) {
            return Err(VerifyError::OutOfBounds(p.to_vec()));
        }
        Ok(())
    }
}

/// Applies every formula at every visited point in trace order. Temporary
/// cells are written and read as the plan says; privatized accumulators
/// collect per-copy partials that the epilogue adds to the target.
pub fn interpret<S: Scalar>(ctx: &ExecContext, trace: &VisitTrace, inputs: &ArrayStore<S>) -> Result<ArrayStore<S>, VerifyError> {
    let spec = ctx.spec;
    let saves = ctx.saves();
    let loads = ctx.loads();
    let mut store = inputs.clone();
    let mut temps = vec![S::zero(); ctx.plan.locations as usize];
    let mut partials: HashMap<(u32, String, Vec<u64>), S> = HashMap::new();
    for rec in &trace.records {
        ctx.check_point(&rec.lattice_point)?;
        for (fi, f) in spec.formulas.iter().enumerate() {
            let value: S = f.operands.eval(&mut |o, r| match loads.get(&(rec.seq, fi, o)) {
                Some(&cell) => temps[cell as usize].clone(),
                None => store.get(&r.array, &r.location(spec, &rec.lattice_point)),
            });
            let loc = f.result.location(spec, &rec.lattice_point);
            if ctx.private.contains(&f.result.array) {
                let slot = partials.entry((rec.copy, f.result.array.clone(), loc)).or_insert_with(S::zero);
                *slot = slot.clone() + value;
                continue;
            }
            if let Some(&cell) = saves.get(&(rec.seq, fi)) {
                temps[cell as usize] = store.get(&f.result.array, &loc);
            }
            let new = match f.op {
                AssignOp::Assign => value,
                AssignOp::Accumulate => store.get(&f.result.array, &loc) + value,
            };
            if !store.set(&f.result.array, &loc, new) {
                return Err(VerifyError::OutOfBounds(loc));
            }
        }
    }
    let mut partials: Vec<_> = partials.into_iter().collect();
    partials.sort_by(|a, b| a.0.cmp(&b.0));
    for ((_, array, loc), v) in partials {
        let new = store.get(&array, &loc) + v;
        store.set(&array, &loc, new);
    }
    Ok(store)
}

/// The oracle: every point in lexicographic order, formulas in listed
/// order. A formula reading its own target sees the values from before the
/// computation; other arrays are read live.
pub fn reference_interpret<S: Scalar>(spec: &ComputationSpec, inputs: &ArrayStore<S>) -> ArrayStore<S> {
    let mut store = inputs.clone();
    let sizes = spec.sizes();
    if sizes.contains(&0) {
        return store;
    }
    let mut p = vec![0u64; sizes.len()];
    loop {
        for f in &spec.formulas {
            let value: S = f.operands.eval(&mut |_, r| {
                let loc: Vec<u64> =
                    r.factors.iter().map(|x| p[spec.index_position(&x.index).unwrap()] + u64::from(x.displacement)).collect();
                if r.array == f.result.array {
                    inputs.get(&r.array, &loc)
                } else {
                    store.get(&r.array, &loc)
                }
            });
            let loc: Vec<u64> = f.result.factors.iter().map(|x| p[spec.index_position(&x.index).unwrap()]).collect();
            let new = match f.op {
                AssignOp::Assign => value,
                AssignOp::Accumulate => store.get(&f.result.array, &loc) + value,
            };
            store.set(&f.result.array, &loc, new);
        }
        // odometer
        let mut d = sizes.len();
        loop {
            if d == 0 {
                return store;
            }
            d -= 1;
            p[d] += 1;
            if p[d] < sizes[d] {
                break;
            }
            p[d] = 0;
        }
    }
}

/// Merges the copies of an unfolded trace round-robin, the way concurrent
/// copies could be observed by a single memory. Sequence numbers are kept
/// so temporary operations still apply.
pub fn interleave(trace: &VisitTrace) -> VisitTrace {
    let copies = trace.records.iter().map(|r| r.copy).max().map_or(0, |c| c + 1) as usize;
    let mut per: Vec<std::collections::VecDeque<_>> = vec![Default::default(); copies];
    for r in &trace.records {
        per[r.copy as usize].push_back(r.clone());
    }
    let mut records = Vec::with_capacity(trace.records.len());
    while per.iter().any(|q| !q.is_empty()) {
        for q in per.iter_mut() {
            if let Some(r) = q.pop_front() {
                records.push(r);
            }
        }
    }
    VisitTrace { records, ..trace.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_spec;

    #[test]
    fn reference_matmul_and_stencil() {
        let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
        let inputs =
            ArrayStore::<i64>::zeros(&spec).with_array("b", vec![2, 2], &[1, 2, 3, 4]).with_array("c", vec![2, 2], &[5, 6, 7, 8]);
        let out = reference_interpret(&spec, &inputs);
        // naive triple loop
        let (b, c) = ([[1, 2], [3, 4]], [[5, 6], [7, 8]]);
        let mut a = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    a[i][j] += b[i][k] * c[k][j];
                }
            }
        }
        assert_eq!(out.rows("a"), a.iter().map(|r| r.to_vec()).collect::<Vec<_>>());

        let spec = parse_spec("space I[2]; a(I) += a(I+1);").unwrap();
        let inputs = ArrayStore::<i64>::zeros(&spec).with_array("a", vec![2], &[1, 10]);
        // snapshot: a(0) sees the old a(1)
        assert_eq!(reference_interpret(&spec, &inputs).arrays["a"].data, vec![11, 10]);
    }

    #[test]
    fn other_arrays_read_live() {
        let spec = parse_spec("space I[2]; t(I) = x(I)*x(I); y(I) = t(I)+x(I);").unwrap();
        let inputs = ArrayStore::<i64>::zeros(&spec).with_array("x", vec![2], &[2, 3]);
        assert_eq!(reference_interpret(&spec, &inputs).arrays["y"].data, vec![6, 12]);
    }
}
