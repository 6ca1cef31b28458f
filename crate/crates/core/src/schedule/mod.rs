//! Schedule trees and the transformations that produce them: lexicographic
//! baseline, mapping to clock graduations, convolutions, unfolding and
//! temporary-space allocation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{Clock, ClockError};
use crate::enumerate::EnumError;
use crate::ir::ComputationSpec;

mod build;
mod mapping;
mod temps;

pub use build::{
    apply_convolutions, map_indexes, pad_and_guard, sequential_schedule, sequential_schedule_with_order, transform, unfold,
    Padded, TransformOptions,
};
pub use mapping::GradMapping;
pub use temps::{allocate_temporaries, bind_temporaries};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("illegal spec: {0}")]
    Illegal(String),
    #[error("unknown index `{0}` in mapping")]
    UnknownIndex(String),
    #[error("index `{0}` has no graduation assigned")]
    Unassigned(String),
    #[error("`{0}` is assigned more than once")]
    DuplicateAssignment(String),
    #[error("graduation {graduation} of `{name}` is not in clock {clock}")]
    GraduationNotInClock { name: String, graduation: u64, clock: String },
    #[error("synthetic index `{name}` must name the index it splits (`{name}=G:INDEX`)")]
    MissingSplitTarget { name: String },
    #[error("index `{index}` of padded size {padded} cannot be split into {digits} digits of rate {rate}")]
    BadSplit { index: String, padded: u64, digits: usize, rate: u64 },
    #[error("{levels} convolution levels requested but the nest only allows {max}")]
    TooManyLevels { levels: usize, max: usize },
    #[error("`{0}` is not the outermost enumerated index")]
    NotOutermost(String),
    #[error("cannot unfold `{index}` into {copies} copies: {reason}")]
    NotUnfoldable { index: String, copies: u32, reason: String },
    #[error("temporary budget {budget} is below the minimal {minimal} cells")]
    BudgetTooSmall { budget: u32, minimal: u32 },
    #[error("schedule breaks a dependency on {array}{location:?}: {reason}")]
    DependencyBroken { array: String, location: Vec<u64>, reason: String },
    #[error("order must list every declared index exactly once")]
    BadOrder,
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

/// `vars[0] + vars[1] + ... + constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    pub vars: Vec<String>,
    pub constant: u64,
}

impl Affine {
    pub fn constant(c: u64) -> Self {
        Affine { vars: Vec::new(), constant: c }
    }

    pub fn var(v: impl Into<String>) -> Self {
        Affine { vars: vec![v.into()], constant: 0 }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return write!(f, "{}", self.constant);
        }
        write!(f, "{}", self.vars.join("+"))?;
        if self.constant != 0 {
            write!(f, "+{}", self.constant)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guard {
    /// Reverse-mapped coordinate of `index` is below its declared size.
    Below { index: String, size: u64 },
    /// The lattice point is the lexicographic maximum of its orbit.
    OrbitRep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Body {
    Node(Box<EnumNode>),
    Leaf,
}

/// `enum(var, step, [lower, lower + extent))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumNode {
    pub var: String,
    /// Lattice index this node contributes a digit to.
    pub index: String,
    pub step: u64,
    pub lower: Affine,
    pub extent: u64,
    #[serde(default)]
    pub guards: Vec<Guard>,
    pub body: Body,
}

impl EnumNode {
    pub fn child(&self) -> Option<&EnumNode> {
        match &self.body {
            Body::Node(n) => Some(n),
            Body::Leaf => None,
        }
    }

    pub fn child_mut(&mut self) -> Option<&mut EnumNode> {
        match &mut self.body {
            Body::Node(n) => Some(n),
            Body::Leaf => None,
        }
    }

    /// Nodes from this one down to the leaf.
    pub fn chain(&self) -> Vec<&EnumNode> {
        let mut out = vec![self];
        while let Some(c) = out.last().unwrap().child() {
            out.push(c);
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.chain().len()
    }

    pub fn count(&self) -> u64 {
        self.extent / self.step
    }
}

/// One positional digit of a lattice coordinate:
/// `weight * (var - convolution base) / step`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digit {
    pub var: String,
    pub weight: u64,
}

/// Permutation of lattice coordinates: the instance at `p` reads the
/// location written by the instance at `q`, where `q[i] = p[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub perm: Vec<usize>,
}

impl Orbit {
    pub fn apply(&self, p: &[u64]) -> Vec<u64> {
        self.perm.iter().map(|&i| p[i]).collect()
    }

    /// `p, σp, σ²p, ...` until the orbit closes.
    pub fn members(&self, p: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![p.to_vec()];
        loop {
            let next = self.apply(out.last().unwrap());
            if next == p {
                return out;
            }
            out.push(next);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unfolding {
    pub var: String,
    pub copies: u32,
    /// Accumulated arrays given one private partial per copy and summed in
    /// the epilogue.
    pub private: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TempOp {
    /// Before `formula` writes at record `seq`, copy the old value of its
    /// result location into `cell`.
    Save { seq: u64, formula: usize, cell: u32 },
    /// Operand `occurrence` of `formula` at record `seq` reads `cell`
    /// instead of memory.
    Load { seq: u64, formula: usize, occurrence: usize, cell: u32 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TempPlan {
    /// Total temporary cells.
    pub locations: u32,
    /// Cells owned by each unfold copy; copy `c` uses
    /// `c * per_copy .. (c + 1) * per_copy`.
    pub per_copy: u32,
    /// Widest unfolding the budget supports; `None` when temporaries do not
    /// limit it.
    pub max_unfold: Option<u32>,
    pub ops: Vec<TempOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTree {
    pub spec: ComputationSpec,
    pub clock: Option<Clock>,
    pub mapping: Option<GradMapping>,
    /// One root per unfold copy.
    pub roots: Vec<EnumNode>,
    pub reverse_map: BTreeMap<String, Vec<Digit>>,
    pub orbit: Option<Orbit>,
    pub unfold: Option<Unfolding>,
    pub temp_plan: TempPlan,
    /// Size of the time unit used for coloring.
    pub unit_span: u64,
}

impl ScheduleTree {
    pub fn copies(&self) -> u32 {
        self.roots.len() as u32
    }

    /// Node binding `var` in the first root, with its depth.
    pub fn node(&self, var: &str) -> Option<&EnumNode> {
        self.roots.first()?.chain().into_iter().find(|n| n.var == var)
    }

    pub fn is_private(&self, array: &str) -> bool {
        self.unfold.as_ref().is_some_and(|u| u.private.iter().any(|a| a == array))
    }
}
