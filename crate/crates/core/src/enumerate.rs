//! Execution of schedule trees into visit traces, and the dynamic mapping
//! of sparse graphs onto a unit clock.

use std::collections::{BTreeMap, VecDeque};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{clock_tuples, color_of, Clock, Color};
use crate::schedule::{EnumNode, Guard, ScheduleTree};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("malformed schedule tree: {0}")]
    MalformedTree(String),
    #[error("cycle through edge {from} -> {to}")]
    Cycle { from: usize, to: usize },
    #[error("vertex {0} is not reachable from the origin")]
    Unreachable(usize),
    #[error("edge list line {line}: {message}")]
    BadEdgeList { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitRecord {
    pub seq: u64,
    pub copy: u32,
    /// Values of the enumerated variables, outermost first.
    pub time_point: Vec<u64>,
    /// Offset of the point inside its copy's time range.
    pub time: u64,
    pub lattice_point: Vec<u64>,
    pub color: Color,
    /// Number of convolution bases on the path to this point.
    pub level: u32,
    /// Position inside the orbit executed at this time point; 0 when the
    /// schedule has no orbit grouping.
    #[serde(default)]
    pub orbit: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitTrace {
    /// Names of the lattice coordinates.
    pub indexes: Vec<String>,
    pub unit_span: u64,
    pub records: Vec<VisitRecord>,
}

impl VisitTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

struct Walker<'a> {
    tree: &'a ScheduleTree,
    k: u32,
    copy: u32,
    /// var -> (value, digit)
    env: BTreeMap<String, (u64, u64)>,
    path: Vec<(u64, bool)>,
    out: Vec<VisitRecord>,
}

impl Walker<'_> {
    fn coordinate(&self, index: &str) -> Result<u64, EnumError> {
        let digits =
            self.tree.reverse_map.get(index).ok_or_else(|| EnumError::MalformedTree(format!("no reverse map for `{index}`")))?;
        digits.iter().try_fold(0, |acc, d| {
            let &(_, digit) =
                self.env.get(&d.var).ok_or_else(|| EnumError::MalformedTree(format!("`{}` is not bound", d.var)))?;
            Ok(acc + digit * d.weight)
        })
    }

    fn lattice_point(&self) -> Result<Vec<u64>, EnumError> {
        self.tree.spec.indexes.iter().map(|d| self.coordinate(&d.name)).collect()
    }

    fn is_orbit_rep(&self, p: &[u64]) -> bool {
        match &self.tree.orbit {
            Some(orbit) => orbit.members(p).iter().all(|q| q.as_slice() <= p),
            None => true,
        }
    }

    fn visit(&mut self, node: &EnumNode) -> Result<(), EnumError> {
        if node.step == 0 || !node.extent.is_multiple_of(node.step) {
            return Err(EnumError::MalformedTree(format!(
                "node `{}` has step {} and extent {}",
                node.var, node.step, node.extent
            )));
        }
        let mut base = 0;
        for v in &node.lower.vars {
            let &(value, _) =
                self.env.get(v).ok_or_else(|| EnumError::MalformedTree(format!("bound of `{}` uses unbound `{v}`", node.var)))?;
            base += value;
        }
        let lower = base + node.lower.constant;
        let mut value = lower;
        while value < lower + node.extent {
            let digit = (value - base) / node.step;
            self.env.insert(node.var.clone(), (value, digit));
            self.path.push((value - base, !node.lower.vars.is_empty()));
            if self.guards_pass(node)? {
                match node.child() {
                    Some(child) => self.visit(child)?,
                    None => self.leaf()?,
                }
            }
            self.path.pop();
            value += node.step;
        }
        self.env.remove(&node.var);
        Ok(())
    }

    fn guards_pass(&self, node: &EnumNode) -> Result<bool, EnumError> {
        for g in &node.guards {
            let ok = match g {
                Guard::Below { index, size } => self.coordinate(index)? < *size,
                Guard::OrbitRep => self.is_orbit_rep(&self.lattice_point()?),
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn leaf(&mut self) -> Result<(), EnumError> {
        let root = &self.tree.roots[self.copy as usize];
        let time_point: Vec<u64> = root.chain().iter().map(|n| self.env[&n.var].0).collect();
        let time: u64 = self.path.iter().map(|&(off, _)| off).sum();
        let level = self.path.iter().filter(|&&(_, conv)| conv).count() as u32;
        let color = color_of(time % self.tree.unit_span.max(1), self.k);
        let p = self.lattice_point()?;
        let members = match &self.tree.orbit {
            Some(orbit) => orbit.members(&p),
            None => vec![p],
        };
        for (i, lattice_point) in members.into_iter().enumerate() {
            self.out.push(VisitRecord {
                seq: 0,
                copy: self.copy,
                time_point: time_point.clone(),
                time,
                lattice_point,
                color,
                level,
                orbit: i as u32,
            });
        }
        Ok(())
    }
}

/// Depth-first execution of every copy of `tree`, copies in order.
pub fn enumerate(tree: &ScheduleTree) -> Result<VisitTrace, EnumError> {
    let k = tree.unit_span.max(1).trailing_zeros();
    let mut out = Vec::new();
    for (c, root) in tree.roots.iter().enumerate() {
        let mut w = Walker { tree, k, copy: c as u32, env: BTreeMap::new(), path: Vec::new(), out: Vec::new() };
        w.visit(root)?;
        out.append(&mut w.out);
    }
    for (i, r) in out.iter_mut().enumerate() {
        r.seq = i as u64;
    }
    Ok(VisitTrace { indexes: tree.spec.index_names(), unit_span: tree.unit_span, records: out })
}

/// Directed graph given by its edge list; vertex 0 is the origin.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseGraph {
    pub vertex_count: usize,
    /// Sorted, deduplicated.
    pub edges: Vec<(usize, usize)>,
}

impl SparseGraph {
    pub fn new(mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let vertex_count = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        SparseGraph { vertex_count, edges }
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.edges.partition_point(|&(a, _)| a < u);
        self.edges[start..].iter().take_while(move |&&(a, _)| a == u).map(|&(_, b)| b)
    }
}

impl FromStr for SparseGraph {
    type Err = EnumError;

    /// One `u v` pair per line; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self, EnumError> {
        let mut edges = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: &str| EnumError::BadEdgeList { line: i + 1, message: message.to_string() };
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(&format!("`{t}` is not a vertex number"))))
                .collect::<Result<_, _>>()?;
            match nums.as_slice() {
                [u, v] => edges.push((*u, *v)),
                _ => return Err(bad("expected `u v`")),
            }
        }
        Ok(SparseGraph::new(edges))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SparseOrder {
    #[default]
    DepthFirst,
    BreadthFirst,
}

fn check_acyclic(graph: &SparseGraph) -> Result<(), EnumError> {
    // 0 white, 1 on stack, 2 done
    let mut state = vec![0u8; graph.vertex_count.max(1)];
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, graph.successors(0).collect())];
    state[0] = 1;
    while let Some((u, succ)) = stack.last_mut() {
        let u = *u;
        match succ.pop() {
            Some(v) => match state[v] {
                0 => {
                    state[v] = 1;
                    stack.push((v, graph.successors(v).collect()));
                }
                1 => return Err(EnumError::Cycle { from: u, to: v }),
                _ => {}
            },
            None => {
                state[u] = 2;
                stack.pop();
            }
        }
    }
    match state.iter().position(|&s| s == 0) {
        Some(v) => Err(EnumError::Unreachable(v)),
        None => Ok(()),
    }
}

/// Discovery order from the origin, successors taken in increasing order.
pub fn discovery_order(graph: &SparseGraph, order: SparseOrder) -> Vec<usize> {
    let mut seen = vec![false; graph.vertex_count.max(1)];
    let mut out = Vec::with_capacity(graph.vertex_count);
    match order {
        SparseOrder::DepthFirst => {
            let mut stack = vec![0];
            while let Some(u) = stack.pop() {
                if std::mem::replace(&mut seen[u], true) {
                    continue;
                }
                out.push(u);
                let succ: Vec<usize> = graph.successors(u).filter(|&v| !seen[v]).collect();
                stack.extend(succ.into_iter().rev());
            }
        }
        SparseOrder::BreadthFirst => {
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                out.push(u);
                for v in graph.successors(u) {
                    if !std::mem::replace(&mut seen[v], true) {
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    out
}

/// Assigns each discovered vertex the next free slot of the current unit
/// clock. A full unit opens the next one; `time_point` is `[unit, slot]`.
pub fn enumerate_sparse(graph: &SparseGraph, unit: &Clock, order: SparseOrder) -> Result<VisitTrace, EnumError> {
    check_acyclic(graph)?;
    let tuples = clock_tuples(unit);
    let span = unit.span();
    let k = span.trailing_zeros();
    let records = discovery_order(graph, order)
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let unit_no = (i / tuples.len()) as u64;
            let tuple = &tuples[i % tuples.len()];
            let slot: u64 = tuple.iter().zip(unit.graduations()).map(|(c, g)| c * g).sum();
            VisitRecord {
                seq: i as u64,
                copy: 0,
                time_point: vec![unit_no, slot],
                time: unit_no * span + slot,
                lattice_point: vec![v as u64],
                color: color_of(slot, k),
                level: tuple.iter().filter(|&&c| c != 0).count() as u32,
                orbit: 0,
            }
        })
        .collect();
    Ok(VisitTrace { indexes: vec!["V".into()], unit_span: span, records })
}
