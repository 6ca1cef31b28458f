//! Acceptance criteria. Each criterion prints one `pass`/`FAIL` line; the
//! test fails if any criterion fails. All comparisons are exact: integer
//! and rational arithmetic only, tolerance zero.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_rational::Ratio;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mrclock::enumerate::SparseOrder;
use mrclock::ir::extract_dependencies;
use mrclock::schedule::sequential_schedule;
use mrclock::verify::{check_coverage, check_dependencies, equivalent_runs, interleave, ExecContext};
use mrclock::{
    allocate_temporaries, analyze, clock_points, clock_tuples, color_histogram, compose, emit, enumerate, enumerate_sparse,
    factorize, interpret, make_clock, reference_interpret, verify, BuildError, Clock, IntStore, Notation, SparseGraph,
};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

const TRIALS: u32 = 10;
const SEED: u64 = 20;

fn c1_clock_skeleton() -> Outcome {
    let clock = Clock::new(vec![4, 2, 1], 2).map_err(|e| e.to_string())?;
    // (0,0,0),(0,0,TY),(0,TX,0),(0,TX,TY),(T,0,0),(T,0,TY),(T,TX,0),(T,TX,TY)
    let (t, tx, ty) = (4, 2, 1);
    let listed = vec![[0, 0, 0], [0, 0, ty], [0, tx, 0], [0, tx, ty], [t, 0, 0], [t, 0, ty], [t, tx, 0], [t, tx, ty]];
    let got: Vec<[u64; 3]> = clock_tuples(&clock)
        .iter()
        .map(|c| [c[0] * clock.graduations()[0], c[1] * clock.graduations()[1], c[2] * clock.graduations()[2]])
        .collect();
    ensure(got == listed, || format!("tuples {got:?}"))?;
    let points = clock_points(&clock);
    let sums: Vec<u64> = listed.iter().map(|p| p.iter().sum()).collect();
    ensure(points == sums, || format!("points {points:?}"))
}

fn c2_convolutions() -> Outcome {
    let text = emit(&common::skeleton(2), Notation::For).text;
    ensure(text == golden("convolved_skeleton_for.txt"), || format!("emitted:\n{text}"))?;
    for needle in ["for (TXN=T;TXN<T+4;TXN+=2)", "for (TYN=TXN;TYN<TXN+2;TYN+=1)", "(T,TXN-T,TYN-TXN)"] {
        ensure(text.contains(needle), || format!("missing `{needle}`"))?;
    }
    Ok(())
}

fn c3_mapping() -> Outcome {
    let tree = common::mapping_example();
    let text = emit(&tree, Notation::For).text;
    ensure(text == golden("mapping_for.txt"), || format!("emitted:\n{text}"))?;
    let first_loop = text.lines().find(|l| l.starts_with("for")).unwrap_or_default();
    ensure(first_loop == "for (M=0;M<16;M+=8)", || format!("outer loop `{first_loop}`"))?;
    let trace = enumerate(&tree).map_err(|e| e.to_string())?;
    let cov = check_coverage(&trace, &tree.spec);
    ensure(cov.pass() && cov.expected == 16 && cov.visited == 16, || format!("{cov:?}"))
}

fn naive_matmul(b: &[i64], c: &[i64]) -> Vec<i64> {
    let mut a = vec![0i64; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                a[i * 2 + j] += b[i * 2 + k] * c[k * 2 + j];
            }
        }
    }
    a
}

fn c4_matmul() -> Outcome {
    let tree = common::matmul();
    let trace = enumerate(&tree).map_err(|e| e.to_string())?;
    let ctx = ExecContext::of(&tree);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for trial in 0..TRIALS {
        let inputs = IntStore::random(&tree.spec, &mut rng, 1000);
        let out = interpret(&ctx, &trace, &inputs).map_err(|e| e.to_string())?;
        let mut want = naive_matmul(&inputs.arrays["b"].data, &inputs.arrays["c"].data);
        for (w, a0) in want.iter_mut().zip(&inputs.arrays["a"].data) {
            *w += a0;
        }
        ensure(out.arrays["a"].data == want, || format!("trial {trial}: {:?} != {want:?}", out.arrays["a"].data))?;
    }
    let fixed = IntStore::zeros(&tree.spec).with_array("b", vec![2, 2], &[1, 2, 3, 4]).with_array("c", vec![2, 2], &[5, 6, 7, 8]);
    let out = interpret(&ctx, &trace, &fixed).map_err(|e| e.to_string())?;
    ensure(out.arrays["a"].data == vec![19, 22, 43, 50], || format!("{:?}", out.arrays["a"].data))
}

fn c5_transpose() -> Outcome {
    let tree = common::transpose(2).map_err(|e| e.to_string())?;
    ensure(tree.copies() == 2, || format!("{} copies", tree.copies()))?;
    ensure(tree.temp_plan.locations <= 2, || format!("{} temps", tree.temp_plan.locations))?;
    let trace = enumerate(&tree).map_err(|e| e.to_string())?;
    let mut touched: Vec<BTreeSet<Vec<u64>>> = vec![BTreeSet::new(); 2];
    for r in &trace.records {
        let p = &r.lattice_point;
        touched[r.copy as usize].insert(p.clone());
        touched[r.copy as usize].insert(vec![p[1], p[0]]);
    }
    ensure(touched[0].is_disjoint(&touched[1]), || {
        format!("copies share {:?}", touched[0].intersection(&touched[1]).collect::<Vec<_>>())
    })?;

    let ctx = ExecContext::of(&tree);
    let fixed = IntStore::default().with_array("a", vec![2, 2], &[1, 2, 3, 4]);
    let out = interpret(&ctx, &trace, &fixed).map_err(|e| e.to_string())?;
    ensure(out.rows("a") == vec![vec![1, 3], vec![2, 4]], || format!("{:?}", out.rows("a")))?;
    let mixed = interleave(&trace);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..TRIALS {
        let inputs = IntStore::random(&tree.spec, &mut rng, 1000);
        let a = &inputs.arrays["a"].data;
        let direct = vec![a[0], a[2], a[1], a[3]];
        for t in [&trace, &mixed] {
            let out = interpret(&ctx, t, &inputs).map_err(|e| e.to_string())?;
            ensure(out.arrays["a"].data == direct, || format!("{:?} != {direct:?}", out.arrays["a"].data))?;
        }
    }

    match common::transpose(0) {
        Err(e @ BuildError::BudgetTooSmall { budget: 0, minimal }) if minimal > 0 => {
            ensure(e.to_string().contains(&format!("minimal {minimal}")), || e.to_string())?
        }
        other => return Err(format!("budget 0 gave {other:?}")),
    }
    let spec = common::spec(common::TRANSPOSE);
    match allocate_temporaries(&spec, &extract_dependencies(&spec), 0) {
        Err(BuildError::BudgetTooSmall { minimal: 1, .. }) => Ok(()),
        other => Err(format!("sequential budget 0 gave {other:?}")),
    }
}

fn c6_stencil() -> Outcome {
    let tree = common::stencil();
    let clock = tree.clock.clone().unwrap();
    ensure(clock.graduations() == [16, 8, 4, 2], || format!("clock {clock}"))?;
    let trace = enumerate(&tree).map_err(|e| e.to_string())?;
    let ones = IntStore::default().with_array("a", vec![4, 4], &[1; 16]);
    let out = interpret(&ExecContext::of(&tree), &trace, &ones).map_err(|e| e.to_string())?;
    let snapshot = reference_interpret(&tree.spec, &ones);
    ensure(out == snapshot, || out.diff(&snapshot).join("; "))?;
    // 1 + number of in-grid neighbours among (i,j+1), (i+1,j), (i+1,j+1)
    let mut hand = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            hand.push(1 + i64::from(j < 3) + i64::from(i < 3) + i64::from(i < 3 && j < 3));
        }
    }
    ensure(out.arrays["a"].data == hand, || format!("{:?}", out.arrays["a"].data))
}

fn c7_factorization() -> Outcome {
    let six = make_clock(6, 2).map_err(|e| e.to_string())?;
    let base: BTreeSet<u64> = clock_points(&six).into_iter().collect();
    ensure(base == (0..64).collect(), || "6-clock is not 0..64".into())?;
    let factors = factorize(&six, &make_clock(3, 2).unwrap()).map_err(|e| e.to_string())?;
    let composed = compose(&factors);
    ensure(composed.len() == 64, || format!("{} composed points", composed.len()))?;
    ensure(composed.iter().copied().collect::<BTreeSet<_>>() == base, || "3-clock x 3-clock differs".into())?;
    // (32,8,2) with each coefficient itself a (2,1) clock: g*a + g/2*b
    let rate4 = compose(&[Clock::new(vec![32, 8, 2], 2).unwrap(), Clock::new(vec![16, 4, 1], 2).unwrap()]);
    ensure(rate4.len() == 64 && rate4.iter().copied().collect::<BTreeSet<_>>() == base, || "(32,8,2) rate 4 differs".into())?;
    let dense4 = clock_points(&make_clock(3, 4).unwrap());
    ensure(dense4.iter().copied().collect::<BTreeSet<_>>() == base, || "rate-4 3-clock differs".into())
}

fn c8_coloring() -> Outcome {
    let k = 4;
    let hist = color_histogram((1..=16u64).map(|t| t % 16), k);
    // 2-adic valuation by repeated halving
    let mut oracle = BTreeMap::new();
    for t in 1..=16u64 {
        let mut v = t;
        let mut c = 0;
        while v % 2 == 0 && c < k {
            v /= 2;
            c += 1;
        }
        *oracle.entry(c).or_insert(0u64) += 1;
    }
    ensure(hist == oracle, || format!("{hist:?} vs {oracle:?}"))?;
    let want = BTreeMap::from([(0, 8), (1, 4), (2, 2), (3, 1), (4, 1)]);
    ensure(hist == want, || format!("{hist:?}"))?;
    // the same classes measured on an enumerated 16-point unit
    let spec = common::spec("space A[2],B[2],C[2],D[2];");
    let tree = mrclock::schedule::map_indexes(&spec, &make_clock(4, 2).unwrap(), &"A=8,B=4,C=2,D=1".parse().unwrap())
        .map_err(|e| e.to_string())?;
    let profile = analyze(&enumerate(&tree).map_err(|e| e.to_string())?);
    ensure(profile.colors == want, || format!("trace colors {:?}", profile.colors))?;
    let total: Ratio<u64> = profile.measure.values().copied().sum();
    ensure(total == Ratio::from_integer(1), || format!("measure sums to {total}"))?;
    ensure(profile.measure[&0] == Ratio::new(8, 16), || "class 0 is not 8/16".into())
}

fn c9_property_suite() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let accepted = std::cell::Cell::new(0u32);
    let clocked = std::cell::Cell::new(0u32);
    let strategy = (common::gen::spec_text(), common::gen::knobs());
    let result = runner.run(&strategy, |(text, knobs)| {
        let spec = common::spec(&text);
        let mut trees = vec![sequential_schedule(&spec).map_err(|e| TestCaseError::fail(format!("sequential: {e}")))?];
        if let Ok(t) = common::gen::build(&spec, &knobs) {
            clocked.set(clocked.get() + 1);
            trees.push(t);
        }
        for tree in trees {
            let report = verify(&tree, TRIALS, SEED).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if !report.pass() {
                return Err(TestCaseError::fail(format!("{text} with {:?}: {report:?}", tree.mapping)));
            }
            if tree.copies() > 1 {
                let trace = enumerate(&tree).unwrap();
                let ctx = ExecContext::of(&tree);
                let eq = equivalent_runs((&ctx, &trace), (&ctx, &interleave(&trace)), 3, SEED).unwrap();
                if !eq.pass() || !check_dependencies(&interleave(&trace), &ctx).pass() {
                    return Err(TestCaseError::fail(format!("{text}: interleaved copies differ")));
                }
            }
            accepted.set(accepted.get() + 1);
        }
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    println!("    {} schedules verified, {} of them clock schedules", accepted.get(), clocked.get());
    ensure(accepted.get() >= 200, || format!("only {} schedules checked", accepted.get()))
}

fn plain_dfs(graph: &SparseGraph, u: usize, seen: &mut Vec<bool>, out: &mut Vec<usize>) {
    seen[u] = true;
    out.push(u);
    for &(a, b) in &graph.edges {
        if a == u && !seen[b] {
            plain_dfs(graph, b, seen, out);
        }
    }
}

fn c10_sparse() -> Outcome {
    let graph: SparseGraph = "0 1\n0 2\n1 3\n1 4\n2 5\n2 6\n".parse().map_err(|e: mrclock::EnumError| e.to_string())?;
    let unit = Clock::new(vec![2, 1], 2).unwrap();
    let trace = enumerate_sparse(&graph, &unit, SparseOrder::DepthFirst).map_err(|e| e.to_string())?;
    let mut order = Vec::new();
    plain_dfs(&graph, 0, &mut vec![false; 7], &mut order);
    let got: Vec<usize> = trace.records.iter().map(|r| r.lattice_point[0] as usize).collect();
    ensure(got == order, || format!("{got:?} vs dfs {order:?}"))?;
    ensure(got.iter().collect::<BTreeSet<_>>().len() == 7, || "vertex repeated".into())?;
    let slots: Vec<(u64, u64)> = trace.records.iter().map(|r| (r.time_point[0], r.time_point[1])).collect();
    let want: Vec<(u64, u64)> = (0..7u64).map(|i| (i / 4, [0, 1, 2, 3][(i % 4) as usize])).collect();
    ensure(slots == want, || format!("slots {slots:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("clock skeleton points in lexicographic order", c1_clock_skeleton),
        ("convolved skeleton golden nest", c2_convolutions),
        ("4-index mapping golden nest and coverage", c3_mapping),
        ("join-product matmul equals triple loop", c4_matmul),
        ("transpose unfolded with 2 temps, budget 0 infeasible", c5_transpose),
        ("stencil clock schedule equals snapshot oracle", c6_stencil),
        ("6-clock factorizations conserve the point set", c7_factorization),
        ("2-adic color classes and exact measure", c8_coloring),
        ("property suite over generated specs", c9_property_suite),
        ("sparse DFS slot packing", c10_sparse),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {:>2} pass  {name}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
