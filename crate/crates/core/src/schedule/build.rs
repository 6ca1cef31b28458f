use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::clock::Clock;
use crate::enumerate::enumerate;
use crate::ir::{check_legality, AssignOp, ComputationSpec, Expr};

use super::temps::bind_temporaries;
use super::*;

/// Spec with every index size rounded up to a power of two, plus the
/// declared sizes the guards compare against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padded {
    pub spec: ComputationSpec,
    pub declared: Vec<u64>,
}

impl Padded {
    pub fn guards(&self) -> Vec<Guard> {
        self.spec
            .indexes
            .iter()
            .zip(&self.declared)
            .filter(|(d, &size)| d.size != size)
            .map(|(d, &size)| Guard::Below { index: d.name.clone(), size })
            .collect()
    }

    /// Points of the padded space that pass every guard.
    pub fn unguarded_count(&self) -> u64 {
        self.declared.iter().product()
    }
}

pub fn pad_and_guard(spec: &ComputationSpec) -> Padded {
    let mut padded = spec.clone();
    for d in &mut padded.indexes {
        d.size = d.size.next_power_of_two();
    }
    Padded { spec: padded, declared: spec.sizes() }
}

struct Level {
    var: String,
    index: String,
    step: u64,
    count: u64,
    lower: Affine,
}

fn check_legal(spec: &ComputationSpec) -> Result<(), BuildError> {
    let report = check_legality(spec);
    if report.is_legal() {
        Ok(())
    } else {
        Err(BuildError::Illegal(report.render(spec).trim_end().to_string()))
    }
}

/// Detects a pure data-movement formula `x(r) = x(perm r)` whose index
/// cycles are unravelled by executing whole orbits with one temporary.
fn detect_orbit(spec: &ComputationSpec) -> Option<Orbit> {
    let [formula] = spec.formulas.as_slice() else { return None };
    let Expr::Ref(operand) = &formula.operands else { return None };
    let result = &formula.result;
    if operand.array != result.array || operand.factors.len() != result.factors.len() {
        return None;
    }
    if operand.factors.iter().any(|f| f.displacement != 0) {
        return None;
    }
    let res: Vec<usize> = result.factors.iter().map(|f| spec.index_position(&f.index)).collect::<Option<_>>()?;
    let ops: Vec<usize> = operand.factors.iter().map(|f| spec.index_position(&f.index)).collect::<Option<_>>()?;
    let distinct: BTreeSet<usize> = res.iter().copied().collect();
    if distinct.len() != res.len() || ops.iter().copied().collect::<BTreeSet<_>>() != distinct {
        return None;
    }
    let mut perm: Vec<usize> = (0..spec.indexes.len()).collect();
    for (&r, &o) in res.iter().zip(&ops) {
        perm[r] = o;
        if spec.indexes[r].size != spec.indexes[o].size {
            return None;
        }
    }
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return None;
    }
    Some(Orbit { perm })
}

fn assemble(
    levels: Vec<Level>,
    spec: &ComputationSpec,
    padded: &Padded,
    reverse: &BTreeMap<String, Vec<Digit>>,
    orbit: bool,
) -> EnumNode {
    let mut guards: Vec<Vec<Guard>> = levels.iter().map(|_| Vec::new()).collect();
    for g in padded.guards() {
        let Guard::Below { index, .. } = &g else { continue };
        let deepest =
            reverse[index].iter().filter_map(|d| levels.iter().position(|l| l.var == d.var)).max().unwrap_or(levels.len() - 1);
        guards[deepest].push(g);
    }
    if orbit {
        guards.last_mut().unwrap().push(Guard::OrbitRep);
    }
    let _ = spec;
    let mut body = Body::Leaf;
    for (level, guards) in levels.into_iter().zip(guards).rev() {
        body = Body::Node(Box::new(EnumNode {
            var: level.var,
            index: level.index,
            step: level.step,
            lower: level.lower,
            extent: level.step * level.count,
            guards,
            body,
        }));
    }
    match body {
        Body::Node(n) => *n,
        Body::Leaf => unreachable!("spec without indexes"),
    }
}

/// Lexicographic nest over the declared indexes, step 1, with the minimal
/// temporary plan attached.
pub fn sequential_schedule(spec: &ComputationSpec) -> Result<ScheduleTree, BuildError> {
    sequential_schedule_with_order(spec, &spec.index_names())
}

pub fn sequential_schedule_with_order(spec: &ComputationSpec, order: &[String]) -> Result<ScheduleTree, BuildError> {
    check_legal(spec)?;
    let names: BTreeSet<&String> = order.iter().collect();
    if order.len() != spec.indexes.len() || names.len() != order.len() || order.iter().any(|n| spec.index_position(n).is_none()) {
        return Err(BuildError::BadOrder);
    }
    let padded = pad_and_guard(spec);
    let levels: Vec<Level> = order
        .iter()
        .map(|name| Level {
            var: name.clone(),
            index: name.clone(),
            step: 1,
            count: padded.spec.indexes[spec.index_position(name).unwrap()].size,
            lower: Affine::default(),
        })
        .collect();
    let reverse: BTreeMap<String, Vec<Digit>> =
        spec.indexes.iter().map(|d| (d.name.clone(), vec![Digit { var: d.name.clone(), weight: 1 }])).collect();
    let orbit = detect_orbit(spec);
    let max_time: u64 = padded.spec.indexes.iter().map(|d| d.size - 1).sum();
    let root = assemble(levels, spec, &padded, &reverse, orbit.is_some());
    let mut tree = ScheduleTree {
        spec: spec.clone(),
        clock: None,
        mapping: None,
        roots: vec![root],
        reverse_map: reverse,
        orbit,
        unfold: None,
        temp_plan: TempPlan::default(),
        unit_span: (max_time + 1).next_power_of_two(),
    };
    tree.temp_plan = bind_temporaries(&tree, None)?;
    Ok(tree)
}

/// Replaces the lexicographic nest by the clock skeleton: one node per
/// assigned name, ordered by decreasing graduation, step equal to the
/// graduation. Indexes sharing a graduation are reached from the first one
/// (in declaration order) through a convolution.
pub fn map_indexes(spec: &ComputationSpec, clock: &Clock, mapping: &GradMapping) -> Result<ScheduleTree, BuildError> {
    check_legal(spec)?;
    let padded = pad_and_guard(spec);
    let mut seen = BTreeSet::new();
    for (name, g) in &mapping.assignments {
        if !seen.insert(name.clone()) {
            return Err(BuildError::DuplicateAssignment(name.clone()));
        }
        let is_index = spec.index_position(name).is_some();
        match mapping.splits.get(name) {
            Some(target) if is_index || spec.index_position(target).is_none() => {
                return Err(BuildError::UnknownIndex(if is_index { name.clone() } else { target.clone() }))
            }
            None if !is_index => return Err(BuildError::MissingSplitTarget { name: name.clone() }),
            _ => {}
        }
        if !clock.contains(*g) {
            return Err(BuildError::GraduationNotInClock { name: name.clone(), graduation: *g, clock: clock.to_string() });
        }
    }
    for d in &spec.indexes {
        if mapping.graduation(&d.name).is_none() {
            return Err(BuildError::Unassigned(d.name.clone()));
        }
    }

    let target_of = |name: &str| mapping.splits.get(name).cloned().unwrap_or_else(|| name.to_string());
    let mut order: Vec<(usize, &String, u64)> = mapping.assignments.iter().enumerate().map(|(i, (n, g))| (i, n, *g)).collect();
    order.sort_by_key(|&(i, n, g)| {
        let target = target_of(n);
        (std::cmp::Reverse(g), spec.index_position(&target), !mapping.splits.contains_key(n), i)
    });

    let mut reps: BTreeMap<u64, String> = BTreeMap::new();
    for &(_, n, g) in &order {
        reps.entry(g).or_insert_with(|| n.clone());
    }

    // digit counts and weights
    let rate = clock.rate();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut reverse: BTreeMap<String, Vec<Digit>> = BTreeMap::new();
    for (pos, d) in spec.indexes.iter().enumerate() {
        let p = padded.spec.indexes[pos].size;
        let splits: Vec<&String> = order.iter().map(|&(_, n, _)| n).filter(|n| mapping.splits.get(*n) == Some(&d.name)).collect();
        let high = rate.checked_pow(splits.len() as u32).filter(|h| p.is_multiple_of(*h));
        let own = match high {
            Some(h) => p / h,
            None => return Err(BuildError::BadSplit { index: d.name.clone(), padded: p, digits: splits.len() + 1, rate }),
        };
        counts.insert(&d.name, own);
        let mut weight = own;
        let mut digits = vec![Digit { var: d.name.clone(), weight: 1 }];
        for s in splits.iter().rev() {
            counts.insert(s, rate);
            digits.push(Digit { var: (*s).clone(), weight });
            weight *= rate;
        }
        // nest order
        digits.sort_by_key(|dg| order.iter().position(|&(_, n, _)| *n == dg.var));
        reverse.insert(d.name.clone(), digits);
    }

    let levels: Vec<Level> = order
        .iter()
        .map(|&(_, n, g)| Level {
            var: n.clone(),
            index: target_of(n),
            step: g,
            count: counts[n.as_str()],
            lower: if reps[&g] == *n { Affine::default() } else { Affine::var(reps[&g].clone()) },
        })
        .collect();

    let orbit = detect_orbit(spec);
    let root = assemble(levels, spec, &padded, &reverse, orbit.is_some());
    let mut mapping = mapping.clone();
    mapping.representatives = reps;
    Ok(ScheduleTree {
        spec: spec.clone(),
        clock: Some(clock.clone()),
        mapping: Some(mapping),
        roots: vec![root],
        reverse_map: reverse,
        orbit,
        unfold: None,
        temp_plan: TempPlan::default(),
        unit_span: clock.span(),
    })
}

/// Converts the first `levels` nodes below the root: each node's lower
/// bound gains its parent's current value (`X -> X + parent`). In a bare
/// clock skeleton (no formulas) converted time indexes are renamed `XN`.
pub fn apply_convolutions(tree: &ScheduleTree, levels: usize) -> Result<ScheduleTree, BuildError> {
    let mut out = tree.clone();
    if levels == 0 {
        return Ok(out);
    }
    let max = tree.roots[0].depth() - 1;
    if levels > max {
        return Err(BuildError::TooManyLevels { levels, max });
    }
    let rename = tree.spec.formulas.is_empty();
    let mut renames: BTreeMap<String, String> = BTreeMap::new();
    for root in &mut out.roots {
        let mut parent = root.var.clone();
        let mut node = root.child_mut();
        let mut depth = 1;
        while let Some(n) = node {
            if depth > levels {
                break;
            }
            if !n.lower.vars.contains(&parent) {
                n.lower.vars.insert(0, parent.clone());
            }
            if rename && !n.var.ends_with('N') {
                renames.insert(n.var.clone(), format!("{}N", n.var));
            }
            parent = n.var.clone();
            depth += 1;
            node = n.child_mut();
        }
    }
    if !renames.is_empty() {
        let rn = |v: &mut String| {
            if let Some(new) = renames.get(v) {
                *v = new.clone();
            }
        };
        for root in &mut out.roots {
            let mut node = Some(root);
            while let Some(n) = node {
                rn(&mut n.var);
                n.lower.vars.iter_mut().for_each(rn);
                node = n.child_mut();
            }
        }
        for digits in out.reverse_map.values_mut() {
            digits.iter_mut().for_each(|d| rn(&mut d.var));
        }
    }
    out.temp_plan = TempPlan::default();
    Ok(out)
}

/// Splits the outermost node into `copies` independent sub-ranges. Partial
/// accumulators are privatized per copy when the unfolded index does not
/// appear in an accumulated result.
pub fn unfold(tree: &ScheduleTree, var: &str, copies: u32) -> Result<ScheduleTree, BuildError> {
    let not = |reason: String| BuildError::NotUnfoldable { index: var.to_string(), copies, reason };
    if tree.roots.len() != 1 || tree.unfold.is_some() {
        return Err(not("schedule is already unfolded".into()));
    }
    let root = &tree.roots[0];
    if root.var != var {
        return Err(BuildError::NotOutermost(var.to_string()));
    }
    if !copies.is_power_of_two() || !root.count().is_multiple_of(u64::from(copies)) {
        return Err(not(format!("copies must be a power of two dividing {}", root.count())));
    }
    let private: Vec<String> = tree
        .spec
        .formulas
        .iter()
        .filter(|f| f.op == AssignOp::Accumulate && !f.result.factors.iter().any(|x| x.index == root.index))
        .map(|f| f.result.array.clone())
        .collect();
    for f in &tree.spec.formulas {
        if let Some(r) = f.operands.refs().into_iter().find(|r| private.contains(&r.array)) {
            return Err(not(format!("partial accumulator `{}` is read by a formula", r.array)));
        }
    }

    let width = root.extent / u64::from(copies);
    let mut out = tree.clone();
    out.roots = (0..u64::from(copies))
        .map(|c| {
            let mut r = root.clone();
            r.lower.constant += c * width;
            r.extent = width;
            r
        })
        .collect();
    out.unfold = Some(Unfolding { var: var.to_string(), copies, private: private.clone() });
    out.temp_plan = TempPlan::default();

    // copies must not share any location outside their private partials
    let trace = enumerate(&out)?;
    let spec = &tree.spec;
    let shapes = spec.array_shapes();
    let mut writes: Vec<HashMap<(String, Vec<u64>), ()>> = vec![HashMap::new(); copies as usize];
    let mut touches: Vec<HashMap<(String, Vec<u64>), ()>> = vec![HashMap::new(); copies as usize];
    for rec in &trace.records {
        let c = rec.copy as usize;
        for f in &spec.formulas {
            for r in f.operands.refs() {
                let loc = r.location(spec, &rec.lattice_point);
                if loc.iter().zip(&shapes[&r.array]).all(|(a, b)| a < b) {
                    touches[c].insert((r.array.clone(), loc), ());
                }
            }
            if !private.contains(&f.result.array) {
                let key = (f.result.array.clone(), f.result.location(spec, &rec.lattice_point));
                writes[c].insert(key.clone(), ());
                touches[c].insert(key, ());
            }
        }
    }
    for a in 0..copies as usize {
        for b in 0..copies as usize {
            if a == b {
                continue;
            }
            if let Some((arr, loc)) = writes[a].keys().find(|k| touches[b].contains_key(*k)) {
                return Err(not(format!("copies {a} and {b} both touch {arr}{loc:?}")));
            }
        }
    }
    Ok(out)
}

/// Knobs of the clock transformation pipeline.
#[derive(Clone, Debug)]
pub struct TransformOptions {
    pub clock: Clock,
    pub mapping: GradMapping,
    pub convolutions: usize,
    pub unfold: Option<(String, u32)>,
    pub temp_budget: Option<u32>,
}

/// `map_indexes`, `apply_convolutions`, optional `unfold`, then temporary
/// binding under the budget.
pub fn transform(spec: &ComputationSpec, opts: &TransformOptions) -> Result<ScheduleTree, BuildError> {
    let mapped = map_indexes(spec, &opts.clock, &opts.mapping)?;
    let mut tree = apply_convolutions(&mapped, opts.convolutions)?;
    if let Some((var, copies)) = &opts.unfold {
        tree = unfold(&tree, var, *copies)?;
    }
    tree.temp_plan = bind_temporaries(&tree, opts.temp_budget)?;
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::make_clock;
    use crate::ir::parse_spec;

    fn chain_summary(node: &EnumNode) -> Vec<String> {
        node.chain().iter().map(|n| format!("{}:[{},+{}) step {}", n.var, n.lower, n.extent, n.step)).collect()
    }

    #[test]
    fn padding() {
        let spec = parse_spec("space I[3]; a(I) = b(I);").unwrap();
        let p = pad_and_guard(&spec);
        assert_eq!(p.spec.indexes[0].size, 4);
        assert_eq!(p.guards(), vec![Guard::Below { index: "I".into(), size: 3 }]);
        let spec = parse_spec("space I[4]; a(I) = b(I);").unwrap();
        assert!(pad_and_guard(&spec).guards().is_empty());
        let spec = parse_spec("space I[3],J[5]; a(I,J) = b(I);").unwrap();
        let p = pad_and_guard(&spec);
        assert_eq!(p.spec.sizes(), vec![4, 8]);
        // brute force over the padded box
        let mut n = 0;
        for i in 0..4 {
            for j in 0..8 {
                if i < 3 && j < 5 {
                    n += 1;
                }
            }
        }
        assert_eq!(p.unguarded_count(), n);
        assert_eq!(n, 15);
    }

    #[test]
    fn sequential_matmul() {
        let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
        let t = sequential_schedule(&spec).unwrap();
        assert_eq!(chain_summary(&t.roots[0]), vec!["I:[0,+2) step 1", "J:[0,+2) step 1", "K:[0,+2) step 1"]);
        assert_eq!(t.temp_plan.locations, 0);
        let spec = parse_spec("space I[4]; a(I) = b(I);").unwrap();
        assert_eq!(chain_summary(&sequential_schedule(&spec).unwrap().roots[0]), vec!["I:[0,+4) step 1"]);
    }

    #[test]
    fn sequential_transpose_uses_one_temp() {
        let spec = parse_spec("space I[2],J[2]; a(I,J) = a(J,I);").unwrap();
        let t = sequential_schedule(&spec).unwrap();
        assert_eq!(t.orbit, Some(Orbit { perm: vec![1, 0] }));
        assert_eq!(t.roots[0].chain()[1].guards, vec![Guard::OrbitRep]);
        assert_eq!(t.temp_plan.locations, 1);
        let spec = parse_spec("space I[4],J[4]; a(I,J) = a(J,I);").unwrap();
        assert_eq!(sequential_schedule(&spec).unwrap().temp_plan.locations, 1);
    }

    #[test]
    fn order_override() {
        let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
        let order: Vec<String> = ["K", "I", "J"].iter().map(|s| s.to_string()).collect();
        let t = sequential_schedule_with_order(&spec, &order).unwrap();
        assert_eq!(t.roots[0].var, "K");
        assert_eq!(sequential_schedule_with_order(&spec, &order[..2]), Err(BuildError::BadOrder));
    }

    #[test]
    fn mapping_four_indexes() {
        let spec = parse_spec("space M[2],N[2],P[2],Q[2]; f(M,N) = g(M,N)*h(P,Q);").unwrap();
        let clock = make_clock(4, 2).unwrap();
        let m = GradMapping::new([("M", 8), ("N", 4), ("P", 2), ("Q", 1)]);
        let t = map_indexes(&spec, &clock, &m).unwrap();
        assert_eq!(chain_summary(&t.roots[0]), vec!["M:[0,+16) step 8", "N:[0,+8) step 4", "P:[0,+4) step 2", "Q:[0,+2) step 1"]);
        let c = apply_convolutions(&t, 3).unwrap();
        assert_eq!(chain_summary(&c.roots[0]), vec!["M:[0,+16) step 8", "N:[M,+8) step 4", "P:[N,+4) step 2", "Q:[P,+2) step 1"]);
    }

    #[test]
    fn mapping_single_index() {
        let spec = parse_spec("space I[2]; a(I) = b(I);").unwrap();
        let t = map_indexes(&spec, &make_clock(1, 2).unwrap(), &GradMapping::new([("I", 1)])).unwrap();
        assert_eq!(chain_summary(&t.roots[0]), vec!["I:[0,+2) step 1"]);
    }

    #[test]
    fn matmul_join_product() {
        let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
        let clock = make_clock(3, 2).unwrap().scaled(2).unwrap();
        let m = GradMapping::new([("K", 8), ("I", 4), ("J", 2)]);
        let t = apply_convolutions(&map_indexes(&spec, &clock, &m).unwrap(), 2).unwrap();
        assert_eq!(chain_summary(&t.roots[0]), vec!["K:[0,+16) step 8", "I:[K,+8) step 4", "J:[I,+4) step 2"]);

        // shared graduation: J reached from representative I
        let clock = Clock::new(vec![8, 4], 2).unwrap();
        let m = GradMapping::new([("K", 8), ("I", 4), ("J", 4)]);
        let t = map_indexes(&spec, &clock, &m).unwrap();
        assert_eq!(t.mapping.as_ref().unwrap().representatives[&4], "I");
        let t = apply_convolutions(&t, 1).unwrap();
        assert_eq!(chain_summary(&t.roots[0]), vec!["K:[0,+16) step 8", "I:[K,+8) step 4", "J:[I,+8) step 4"]);
    }

    #[test]
    fn mapping_errors() {
        let spec = parse_spec("space I[2],J[2]; a(I,J) = b(I,J);").unwrap();
        let clock = make_clock(2, 2).unwrap();
        let err = |m: &str| map_indexes(&spec, &clock, &m.parse().unwrap()).unwrap_err();
        assert_eq!(err("I=2"), BuildError::Unassigned("J".into()));
        assert_eq!(err("I=2,J=1,Z=1"), BuildError::MissingSplitTarget { name: "Z".into() });
        assert_eq!(err("I=2,J=1,Z=1:Q"), BuildError::UnknownIndex("Q".into()));
        assert!(matches!(err("I=2,J=8"), BuildError::GraduationNotInClock { .. }));
        assert!(matches!(err("I=2,I=1,J=1"), BuildError::DuplicateAssignment(_)));
        assert!(matches!(err("I=2,J=1,S=1:I,T=2:I"), BuildError::BadSplit { .. }));
    }

    #[test]
    fn convolution_levels() {
        let spec = parse_spec("space T[2],TX[2],TY[2];").unwrap();
        let t = map_indexes(&spec, &make_clock(3, 2).unwrap(), &"T=4,TX=2,TY=1".parse().unwrap()).unwrap();
        assert_eq!(apply_convolutions(&t, 0).unwrap(), t);
        let c = apply_convolutions(&t, 2).unwrap();
        assert_eq!(chain_summary(&c.roots[0]), vec!["T:[0,+8) step 4", "TXN:[T,+4) step 2", "TYN:[TXN,+2) step 1"]);
        assert_eq!(c.reverse_map["TY"], vec![Digit { var: "TYN".into(), weight: 1 }]);
        assert_eq!(apply_convolutions(&t, 3).unwrap_err(), BuildError::TooManyLevels { levels: 3, max: 2 });
    }

    #[test]
    fn split_digits() {
        let spec = parse_spec("space I[4],J[4]; a(I,J) += a(I,J+1)+a(I+1,J)+a(I+1,J+1);").unwrap();
        let clock = make_clock(4, 2).unwrap().scaled(2).unwrap();
        let t = map_indexes(&spec, &clock, &"S=16:I,I=8,T=4:J,J=2".parse().unwrap()).unwrap();
        assert_eq!(t.reverse_map["I"], vec![Digit { var: "S".into(), weight: 2 }, Digit { var: "I".into(), weight: 1 }]);
        assert_eq!(t.roots[0].chain().iter().map(|n| n.index.as_str()).collect::<Vec<_>>(), vec!["I", "I", "J", "J"]);
    }

    #[test]
    fn unfold_rules() {
        let spec = parse_spec("space T[2],TX[2],TY[2]; s += a(T,TX,TY);").unwrap();
        let clock = make_clock(4, 2).unwrap();
        let t = map_indexes(&spec, &clock, &"TMP=8:T,T=4,TX=2,TY=1".parse().unwrap()).unwrap();
        let t = apply_convolutions(&t, 3).unwrap();
        let u = unfold(&t, "TMP", 2).unwrap();
        assert_eq!(u.roots.len(), 2);
        assert_eq!(u.unfold.as_ref().unwrap().private, vec!["s".to_string()]);
        assert_eq!(u.roots[1].lower, Affine::constant(8));
        assert_eq!(unfold(&t, "TMP", 1).unwrap().roots.len(), 1);
        assert!(matches!(unfold(&t, "T", 2), Err(BuildError::NotOutermost(_))));
        assert!(matches!(unfold(&t, "TMP", 4), Err(BuildError::NotUnfoldable { .. })));

        // assignments to a shared location cannot run in parallel copies
        let spec = parse_spec("space I[2],J[2]; f(I) = g(J);").unwrap();
        let t = map_indexes(&spec, &make_clock(2, 2).unwrap(), &"J=2,I=1".parse().unwrap()).unwrap();
        assert!(matches!(unfold(&t, "J", 2), Err(BuildError::NotUnfoldable { .. })));
    }

    #[test]
    fn illegal_spec_rejected() {
        let spec = parse_spec("space I[2]; a(I^2) = b(I);").unwrap();
        assert!(matches!(sequential_schedule(&spec), Err(BuildError::Illegal(_))));
    }
}
