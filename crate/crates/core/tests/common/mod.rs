#![allow(dead_code)]

use mrclock::schedule::{apply_convolutions, map_indexes};
use mrclock::{make_clock, parse_spec, transform, Clock, ComputationSpec, ScheduleTree, TransformOptions};

pub const MATMUL: &str = "space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);";
pub const TRANSPOSE: &str = "space I[2],J[2]; a(I,J) = a(J,I);";
pub const STENCIL: &str = "space I[4],J[4]; a(I,J) += a(I,J+1)+a(I+1,J)+a(I+1,J+1);";
pub const SUM: &str = "space T[2],TX[2],TY[2]; s += a(T,TX,TY);";
pub const MAPPING: &str = "space M[2],N[2],P[2],Q[2]; f(M,N) = g(M,N)*h(P,Q);";

pub fn spec(text: &str) -> ComputationSpec {
    parse_spec(text).unwrap()
}

pub fn opts(clock: Clock, map: &str, convolutions: usize) -> TransformOptions {
    TransformOptions { clock, mapping: map.parse().unwrap(), convolutions, unfold: None, temp_budget: None }
}

/// 3-clock skeleton over T, TX, TY with `levels` convolutions.
pub fn skeleton(levels: usize) -> ScheduleTree {
    let s = spec("space T[2],TX[2],TY[2];");
    let t = map_indexes(&s, &make_clock(3, 2).unwrap(), &"T=4,TX=2,TY=1".parse().unwrap()).unwrap();
    apply_convolutions(&t, levels).unwrap()
}

pub fn mapping_example() -> ScheduleTree {
    transform(&spec(MAPPING), &opts(make_clock(4, 2).unwrap(), "M=8,N=4,P=2,Q=1", 3)).unwrap()
}

/// The (8,4,2) clock with K -> 8, I -> 4, J -> 2.
pub fn matmul() -> ScheduleTree {
    let clock = make_clock(3, 2).unwrap().scaled(2).unwrap();
    transform(&spec(MATMUL), &opts(clock, "K=8,I=4,J=2", 2)).unwrap()
}

pub fn transpose(budget: u32) -> Result<ScheduleTree, mrclock::BuildError> {
    let clock = make_clock(3, 2).unwrap().scaled(2).unwrap();
    let mut o = opts(clock, "T=8:I,I=4,J=2", 2);
    o.unfold = Some(("T".into(), 2));
    o.temp_budget = Some(budget);
    transform(&spec(TRANSPOSE), &o)
}

/// The (16,8,4,2) clock with S, T carrying the high digits of I, J.
pub fn stencil() -> ScheduleTree {
    let clock = make_clock(4, 2).unwrap().scaled(2).unwrap();
    transform(&spec(STENCIL), &opts(clock, "S=16:I,I=8,T=4:J,J=2", 3)).unwrap()
}

pub fn sum_unfolded() -> ScheduleTree {
    let mut o = opts(make_clock(4, 2).unwrap(), "TMP=8:T,T=4,TX=2,TY=1", 3);
    o.unfold = Some(("TMP".into(), 2));
    transform(&spec(SUM), &o).unwrap()
}

pub mod gen {
    use mrclock::schedule::BuildError;
    use mrclock::{check_legality, make_clock, parse_spec, transform, ComputationSpec, ScheduleTree, TransformOptions};
    use proptest::prelude::*;

    const NAMES: [&str; 3] = ["I", "J", "K"];

    fn factor(n: usize) -> impl Strategy<Value = String> {
        (0..n, 0u32..2).prop_map(|(i, d)| if d == 0 { NAMES[i].to_string() } else { format!("{}+{d}", NAMES[i]) })
    }

    fn reference(n: usize, arrays: Vec<(String, usize)>) -> impl Strategy<Value = String> {
        (0..arrays.len()).prop_flat_map(move |a| {
            let (name, arity) = arrays[a].clone();
            proptest::collection::vec(factor(n), arity).prop_map(move |fs| {
                if fs.is_empty() {
                    name.clone()
                } else {
                    format!("{name}({})", fs.join(","))
                }
            })
        })
    }

    /// One formula writing `r{f}`; returns its text and the result arity.
    fn formula(n: usize, f: usize, readable: Vec<(String, usize)>) -> impl Strategy<Value = (String, usize)> {
        let result_idx = Just((0..n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_flat_map(move |perm| (0..=perm.len()).prop_map(move |k| perm[..k].to_vec()));
        (result_idx, any::<bool>(), any::<bool>(), 1usize..=3).prop_flat_map(move |(ri, acc, sum, nops)| {
            let mut arrays = readable.clone();
            arrays.push((format!("r{f}"), ri.len()));
            proptest::collection::vec(reference(n, arrays), nops).prop_map(move |ops| {
                let result = if ri.is_empty() {
                    format!("r{f}")
                } else {
                    format!("r{f}({})", ri.iter().map(|&i| NAMES[i]).collect::<Vec<_>>().join(","))
                };
                let op = if acc { "+=" } else { "=" };
                (format!("{result} {op} {};", ops.join(if sum { "+" } else { "*" })), ri.len())
            })
        })
    }

    /// Source text of a small legal spec: up to three indexes of size 1..=8
    /// and one or two formulas over inputs `x(.)`, `y(.,.)`, the first
    /// result and self references.
    pub fn spec_text() -> impl Strategy<Value = String> {
        (1usize..=3, proptest::collection::vec(1u64..=8, 3), any::<bool>())
            .prop_flat_map(|(n, sizes, two)| {
                let header =
                    format!("space {};", (0..n).map(|i| format!("{}[{}]", NAMES[i], sizes[i])).collect::<Vec<_>>().join(","));
                let inputs = vec![("x".to_string(), 1), ("y".to_string(), 2)];
                formula(n, 0, inputs.clone()).prop_flat_map(move |(first, arity)| {
                    let header = header.clone();
                    let mut readable = inputs.clone();
                    readable.push(("r0".to_string(), arity));
                    let second =
                        if two { formula(n, 1, readable).prop_map(|(t, _)| t).boxed() } else { Just(String::new()).boxed() };
                    second.prop_map(move |second| format!("{header}\n{first}\n{second}\n"))
                })
            })
            .prop_filter("legal", |text| parse_spec(text).is_ok_and(|s| check_legality(&s).is_legal()))
    }

    /// Raw choices turned into transform options by [`options`].
    #[derive(Clone, Debug)]
    pub struct Knobs {
        pub grads: Vec<u8>,
        pub split: Vec<Option<u8>>,
        pub convolutions: u8,
        pub unfold: bool,
    }

    pub fn knobs() -> impl Strategy<Value = Knobs> {
        (
            proptest::collection::vec(0u8..4, 3),
            proptest::collection::vec(proptest::option::weighted(0.3, 0u8..4), 3),
            0u8..6,
            proptest::bool::weighted(0.3),
        )
            .prop_map(|(grads, split, convolutions, unfold)| Knobs { grads, split, convolutions, unfold })
    }

    /// Mapping onto the (8,4,2,1) clock chosen by `k`.
    pub fn options(spec: &ComputationSpec, k: &Knobs) -> TransformOptions {
        let clock = make_clock(4, 2).unwrap();
        let g = |x: u8| 8u64 >> x;
        let mut pairs = Vec::new();
        let mut text = Vec::new();
        for (i, d) in spec.indexes.iter().enumerate() {
            pairs.push((d.name.clone(), g(k.grads[i])));
            text.push(format!("{}={}", d.name, g(k.grads[i])));
            if let Some(s) = k.split[i].filter(|_| d.size.next_power_of_two() >= 2) {
                text.push(format!("S{}={}:{}", d.name, g(s), d.name));
            }
        }
        let mapping = text.join(",").parse().unwrap();
        let depth = text.len();
        TransformOptions { clock, mapping, convolutions: usize::from(k.convolutions) % depth, unfold: None, temp_budget: None }
    }

    /// Builds the clock schedule, unfolding the outermost node when asked.
    /// Rejections by the builder are returned as errors.
    pub fn build(spec: &ComputationSpec, k: &Knobs) -> Result<ScheduleTree, BuildError> {
        let mut o = options(spec, k);
        if k.unfold {
            let probe = mrclock::schedule::map_indexes(spec, &o.clock, &o.mapping)?;
            let root = &probe.roots[0];
            if root.count() >= 2 {
                o.unfold = Some((root.var.clone(), 2));
            }
        }
        transform(spec, &o)
    }
}
