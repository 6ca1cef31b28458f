use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;

/// Deepest operand parenthesization the builder understands.
pub const MAX_GROUP_DEPTH: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    ResultExponent { index: String, exponent: u32 },
    ResultDisplacement { index: String },
    OperandExponent { index: String, exponent: u32 },
    ArityMismatch { array: String, expected: usize, found: usize },
    MultipleWriters { array: String },
    GroupingTooDeep { depth: usize },
    UndeclaredIndex { index: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Formula the violation belongs to, in source order.
    pub formula: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::ResultExponent { index, exponent } => {
                write!(f, "exponent > 1 on result index `{index}` ({index}^{exponent})")
            }
            ViolationKind::ResultDisplacement { index } => {
                write!(f, "result index `{index}` carries a displacement")
            }
            ViolationKind::OperandExponent { index, exponent } => {
                write!(f, "exponent > 1 on operand index `{index}` ({index}^{exponent})")
            }
            ViolationKind::ArityMismatch { array, expected, found } => {
                write!(f, "array `{array}` used with {found} indexes, earlier with {expected}")
            }
            ViolationKind::MultipleWriters { array } => {
                write!(f, "array `{array}` is the result of more than one formula")
            }
            ViolationKind::GroupingTooDeep { depth } => {
                write!(f, "operand parenthesization depth {depth} exceeds {MAX_GROUP_DEPTH}")
            }
            ViolationKind::UndeclaredIndex { index } => write!(f, "undeclared index `{index}`"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalityReport {
    pub violations: Vec<Violation>,
}

impl LegalityReport {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }

    /// One diagnostic line per violation, prefixed with the formula position.
    pub fn render(&self, spec: &ComputationSpec) -> String {
        self.violations
            .iter()
            .map(|v| {
                let pos = spec.formulas.get(v.formula).map(|f| f.pos).unwrap_or_default();
                format!("{pos}: {}\n", v.kind)
            })
            .collect()
    }
}

/// Checks the syntactic restrictions on results and operands. Never fails;
/// every violation found becomes a report entry.
pub fn check_legality(spec: &ComputationSpec) -> LegalityReport {
    let mut violations = Vec::new();
    let mut arity: BTreeMap<&str, usize> = BTreeMap::new();
    let mut writers: BTreeMap<&str, usize> = BTreeMap::new();

    for (fi, formula) in spec.formulas.iter().enumerate() {
        let mut push = |kind| violations.push(Violation { formula: fi, kind });

        for factor in &formula.result.factors {
            if factor.exponent != 1 {
                push(ViolationKind::ResultExponent { index: factor.index.clone(), exponent: factor.exponent });
            }
            if factor.displacement != 0 {
                push(ViolationKind::ResultDisplacement { index: factor.index.clone() });
            }
        }
        let refs = formula.operands.refs();
        for r in &refs {
            for factor in &r.factors {
                if factor.exponent != 1 {
                    push(ViolationKind::OperandExponent { index: factor.index.clone(), exponent: factor.exponent });
                }
            }
        }
        for r in std::iter::once(&formula.result).chain(refs.iter().copied()) {
            for factor in &r.factors {
                if spec.index_position(&factor.index).is_none() {
                    push(ViolationKind::UndeclaredIndex { index: factor.index.clone() });
                }
            }
            match arity.get(r.array.as_str()) {
                Some(&n) if n != r.factors.len() => {
                    push(ViolationKind::ArityMismatch { array: r.array.clone(), expected: n, found: r.factors.len() })
                }
                Some(_) => {}
                None => {
                    arity.insert(&r.array, r.factors.len());
                }
            }
        }
        let depth = formula.operands.group_depth();
        if depth > MAX_GROUP_DEPTH {
            push(ViolationKind::GroupingTooDeep { depth });
        }
        if writers.insert(&formula.result.array, fi).is_some() {
            push(ViolationKind::MultipleWriters { array: formula.result.array.clone() });
        }
    }
    LegalityReport { violations }
}
