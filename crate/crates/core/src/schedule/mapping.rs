use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Assignment of lattice and synthetic indexes to clock graduations.
///
/// Textual form: `M=8,N=4,S=16:I` where `S=16:I` introduces a synthetic
/// index `S` carrying the high-order digit of `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradMapping {
    pub assignments: Vec<(String, u64)>,
    /// Synthetic index -> lattice index it splits.
    pub splits: BTreeMap<String, String>,
    /// Graduation -> representative index, filled in by `map_indexes`.
    #[serde(default)]
    pub representatives: BTreeMap<u64, String>,
}

impl GradMapping {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u64)>) -> Self {
        GradMapping { assignments: pairs.into_iter().map(|(n, g)| (n.into(), g)).collect(), ..Default::default() }
    }

    pub fn with_split(mut self, synthetic: &str, graduation: u64, target: &str) -> Self {
        self.assignments.push((synthetic.to_string(), graduation));
        self.splits.insert(synthetic.to_string(), target.to_string());
        self
    }

    pub fn graduation(&self, name: &str) -> Option<u64> {
        self.assignments.iter().find(|(n, _)| n == name).map(|&(_, g)| g)
    }

    pub fn finest(&self) -> Option<u64> {
        self.assignments.iter().map(|&(_, g)| g).min()
    }
}

impl FromStr for GradMapping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut m = GradMapping::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (name, rest) = item.split_once('=').ok_or_else(|| format!("expected NAME=GRAD, got `{item}`"))?;
            let (grad, target) = match rest.split_once(':') {
                Some((g, t)) => (g, Some(t.trim())),
                None => (rest, None),
            };
            let grad: u64 = grad.trim().parse().map_err(|_| format!("bad graduation in `{item}`"))?;
            let name = name.trim().to_string();
            if let Some(t) = target {
                m.splits.insert(name.clone(), t.to_string());
            }
            m.assignments.push((name, grad));
        }
        if m.assignments.is_empty() {
            return Err("empty mapping".into());
        }
        Ok(m)
    }
}

impl fmt::Display for GradMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignments
            .iter()
            .map(|(n, g)| match self.splits.get(n) {
                Some(t) => format!("{n}={g}:{t}"),
                None => format!("{n}={g}"),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}
