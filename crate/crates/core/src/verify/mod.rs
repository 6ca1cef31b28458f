//! Brute-force checks of a schedule: coverage of the index space,
//! dependency preservation, equivalence by exact interpretation, and a
//! parallelism profile.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{enumerate, EnumError, VisitTrace};
use crate::schedule::ScheduleTree;

mod analyze;
mod coverage;
mod deps;
mod interp;
mod store;

pub use analyze::{analyze, parallel_conflicts, Measure, ParallelismProfile};
pub use coverage::{check_coverage, CoverageReport};
pub use deps::{check_dependencies, DepViolation, DependencyReport};
pub use interp::{interleave, interpret, reference_interpret, ExecContext};
pub use store::{ArrayStore, DenseArray, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("lattice point {0:?} is outside the declared space")]
    OutOfBounds(Vec<u64>),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

/// Input store on which two schedules disagree, with the differing cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u32,
    pub inputs: ArrayStore<i64>,
    pub diff: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub trials: u32,
    pub counterexample: Option<Counterexample>,
}

impl EquivalenceReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Magnitude of the random integers filling input stores.
pub const RANDOM_RANGE: i64 = 1000;

/// Random integer store of `spec`, widened to arbitrary precision so that
/// products of accumulated values cannot overflow.
fn random_inputs(spec: &crate::ir::ComputationSpec, rng: &mut ChaCha8Rng) -> (ArrayStore<i64>, ArrayStore<BigInt>) {
    let small = ArrayStore::<i64>::random(spec, rng, RANDOM_RANGE);
    let big = small.map(|&x| BigInt::from(x));
    (small, big)
}

/// Interprets both runs on `trials` seeded random integer stores and
/// stops at the first disagreement.
pub fn equivalent_runs(
    a: (&ExecContext, &VisitTrace),
    b: (&ExecContext, &VisitTrace),
    trials: u32,
    seed: u64,
) -> Result<EquivalenceReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let (inputs, big) = random_inputs(a.0.spec, &mut rng);
        let left = interpret(a.0, a.1, &big)?;
        let right = interpret(b.0, b.1, &big)?;
        if left != right {
            let diff = left.diff(&right);
            return Ok(EquivalenceReport { trials: trial + 1, counterexample: Some(Counterexample { trial, inputs, diff }) });
        }
    }
    Ok(EquivalenceReport { trials, counterexample: None })
}

pub fn equivalent(a: &ScheduleTree, b: &ScheduleTree, trials: u32, seed: u64) -> Result<EquivalenceReport, VerifyError> {
    let (ta, tb) = (enumerate(a)?, enumerate(b)?);
    equivalent_runs((&ExecContext::of(a), &ta), (&ExecContext::of(b), &tb), trials, seed)
}

/// Everything `verify` reports about one schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub coverage: CoverageReport,
    pub dependencies: DependencyReport,
    pub equivalence: EquivalenceReport,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.coverage.pass() && self.dependencies.pass() && self.equivalence.pass()
    }
}

/// Coverage, dependencies, and equivalence against the reference
/// interpreter.
pub fn verify(tree: &ScheduleTree, trials: u32, seed: u64) -> Result<VerifyReport, VerifyError> {
    let trace = enumerate(tree)?;
    let ctx = ExecContext::of(tree);
    let coverage = check_coverage(&trace, &tree.spec);
    let dependencies = check_dependencies(&trace, &ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut equivalence = EquivalenceReport { trials, counterexample: None };
    for trial in 0..trials {
        let (inputs, big) = random_inputs(&tree.spec, &mut rng);
        let got = interpret(&ctx, &trace, &big)?;
        let want = reference_interpret(&tree.spec, &big);
        if got != want {
            equivalence = EquivalenceReport {
                trials: trial + 1,
                counterexample: Some(Counterexample { trial, diff: want.diff(&got), inputs }),
            };
            break;
        }
    }
    Ok(VerifyReport { coverage, dependencies, equivalence })
}
