//! Scheduling of map-reduce formulas over Cartesian index spaces with
//! power-of-two clocks.
//!
//! A computation is a set of formulas applied at every point of an index
//! space. The builder maps indexes onto the graduations of a clock, adds
//! convolutions, unfolds accumulators into parallel copies and binds the
//! temporaries needed to keep every def before its uses. The verifier
//! enumerates the result and checks it against a lexicographic reference
//! with exact arithmetic.
//!
//! ```
//! use mrclock::{parse_spec, make_clock, transform, verify, TransformOptions};
//!
//! let spec = parse_spec("space I[2],J[2],K[2]; a(I,J) += b(I,K)*c(K,J);").unwrap();
//! let opts = TransformOptions {
//!     clock: make_clock(3, 2).unwrap().scaled(2).unwrap(),
//!     mapping: "K=8,I=4,J=2".parse().unwrap(),
//!     convolutions: 2,
//!     unfold: None,
//!     temp_budget: None,
//! };
//! let tree = transform(&spec, &opts).unwrap();
//! assert!(verify(&tree, 10, 7).unwrap().pass());
//! ```

pub mod clock;
pub mod emit;
pub mod enumerate;
pub mod ir;
pub mod schedule;
pub mod verify;

pub use clock::{
    clock_points, clock_tuples, color_histogram, color_of, compose, cube_to_clock, decode_time, factorize, make_clock, Clock,
    ClockError, Color, Cube,
};
pub use emit::{emit, from_json, to_json, EmittedProgram, Notation};
pub use enumerate::{enumerate, enumerate_sparse, EnumError, SparseGraph, SparseOrder, VisitRecord, VisitTrace};
pub use ir::{check_legality, extract_dependencies, parse_spec, ComputationSpec, DependencyGraph};
pub use schedule::{
    allocate_temporaries, apply_convolutions, map_indexes, sequential_schedule, transform, unfold, BuildError, GradMapping,
    ScheduleTree, TempPlan, TransformOptions,
};
pub use verify::{
    analyze, check_coverage, check_dependencies, equivalent, interpret, reference_interpret, verify, ArrayStore, ExecContext,
    Measure, ParallelismProfile, Scalar,
};

/// Store of exact 64-bit integers.
pub type IntStore = verify::ArrayStore<i64>;
/// Store of exact rationals.
pub type RationalStore = verify::ArrayStore<num_rational::Rational64>;

/// Store of arbitrary-precision integers, as used by the verifier.
pub type BigIntStore = verify::ArrayStore<num_bigint::BigInt>;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x6d72_636c;
