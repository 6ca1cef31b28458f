use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Source position of a parsed item (1-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDecl {
    pub name: String,
    /// Number of values the index takes, `0..size`.
    pub size: u64,
}

/// One index occurrence inside an array reference: `I`, `I+1`, or the
/// illegal `I^2` which is kept around so legality checking can report it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub index: String,
    pub displacement: u32,
    pub exponent: u32,
}

impl Factor {
    pub fn bare(index: impl Into<String>) -> Self {
        Factor { index: index.into(), displacement: 0, exponent: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayRef {
    pub array: String,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Ref(ArrayRef),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    /// Explicit parentheses, preserved as written.
    Group(Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssignOp {
    Assign,
    Accumulate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub result: ArrayRef,
    pub op: AssignOp,
    pub operands: Expr,
    #[serde(default)]
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputationSpec {
    pub indexes: Vec<IndexDecl>,
    pub formulas: Vec<Formula>,
}

impl ArrayRef {
    pub fn new(array: impl Into<String>, factors: Vec<Factor>) -> Self {
        ArrayRef { array: array.into(), factors }
    }

    /// Memory coordinates touched by this reference at a lattice point.
    /// `point` is indexed by declaration order.
    pub fn location(&self, spec: &ComputationSpec, point: &[u64]) -> Vec<u64> {
        self.factors
            .iter()
            .map(|f| {
                let pos = spec.index_position(&f.index).expect("undeclared index in reference");
                point[pos] + u64::from(f.displacement)
            })
            .collect()
    }
}

impl Expr {
    /// Array references in left-to-right order; the position in this list
    /// is the reference's occurrence number.
    pub fn refs(&self) -> Vec<&ArrayRef> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a ArrayRef>) {
        match self {
            Expr::Ref(r) => out.push(r),
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_refs(out)),
            Expr::Group(x) => x.collect_refs(out),
        }
    }

    /// Maximum parenthesis nesting depth.
    pub fn group_depth(&self) -> usize {
        match self {
            Expr::Ref(_) => 0,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().map(Expr::group_depth).max().unwrap_or(0),
            Expr::Group(x) => 1 + x.group_depth(),
        }
    }

    /// Evaluates the expression; `read` receives each reference together with
    /// its occurrence number.
    pub fn eval<S, F>(&self, read: &mut F) -> S
    where
        S: num_traits::Num + Clone,
        F: FnMut(usize, &ArrayRef) -> S,
    {
        let mut counter = 0;
        self.eval_inner(read, &mut counter)
    }

    fn eval_inner<S, F>(&self, read: &mut F, counter: &mut usize) -> S
    where
        S: num_traits::Num + Clone,
        F: FnMut(usize, &ArrayRef) -> S,
    {
        match self {
            Expr::Ref(r) => {
                let k = *counter;
                *counter += 1;
                read(k, r)
            }
            Expr::Sum(xs) => xs.iter().fold(S::zero(), |acc, x| acc + x.eval_inner(read, counter)),
            Expr::Product(xs) => xs.iter().fold(S::one(), |acc, x| acc * x.eval_inner(read, counter)),
            Expr::Group(x) => x.eval_inner(read, counter),
        }
    }
}

impl ComputationSpec {
    pub fn index_position(&self, name: &str) -> Option<usize> {
        self.indexes.iter().position(|d| d.name == name)
    }

    pub fn index_names(&self) -> Vec<String> {
        self.indexes.iter().map(|d| d.name.clone()).collect()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.indexes.iter().map(|d| d.size).collect()
    }

    /// Number of points in the declared index space.
    pub fn point_count(&self) -> u64 {
        self.indexes.iter().map(|d| d.size).product()
    }

    /// All lattice points in lexicographic order of declared indexes.
    pub fn lattice_points(&self) -> Vec<Vec<u64>> {
        let sizes = self.sizes();
        let total = self.point_count();
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0u64; sizes.len()];
        for _ in 0..total {
            out.push(cur.clone());
            for k in (0..sizes.len()).rev() {
                cur[k] += 1;
                if cur[k] < sizes[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
        out
    }

    /// Lexicographic rank of a lattice point.
    pub fn rank(&self, point: &[u64]) -> u64 {
        self.indexes.iter().zip(point).fold(0, |acc, (d, &v)| acc * d.size + v)
    }

    /// Extent of each array dimension, taken from the sizes of the indexes
    /// that address it. Zero-dimensional arrays are scalars.
    pub fn array_shapes(&self) -> BTreeMap<String, Vec<u64>> {
        let mut shapes: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        let mut visit = |r: &ArrayRef| {
            let dims: Vec<u64> =
                r.factors.iter().map(|f| self.index_position(&f.index).map_or(1, |p| self.indexes[p].size)).collect();
            let entry = shapes.entry(r.array.clone()).or_insert_with(|| vec![0; dims.len()]);
            for (e, d) in entry.iter_mut().zip(dims) {
                *e = (*e).max(d);
            }
        };
        for f in &self.formulas {
            visit(&f.result);
            f.operands.refs().into_iter().for_each(&mut visit);
        }
        shapes
    }

    /// Arrays that are never written by a formula.
    pub fn input_arrays(&self) -> Vec<String> {
        let written: Vec<&str> = self.formulas.iter().map(|f| f.result.array.as_str()).collect();
        self.array_shapes().into_keys().filter(|a| !written.contains(&a.as_str())).collect()
    }

    /// Index of the formula writing `array`, if any.
    pub fn writer_of(&self, array: &str) -> Option<usize> {
        self.formulas.iter().position(|f| f.result.array == array)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)?;
        if self.exponent != 1 {
            write!(f, "^{}", self.exponent)?;
        }
        if self.displacement != 0 {
            write!(f, "+{}", self.displacement)?;
        }
        Ok(())
    }
}

impl fmt::Display for ArrayRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.array)?;
        if !self.factors.is_empty() {
            let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ref(r) => write!(f, "{r}"),
            Expr::Sum(xs) => write_joined(f, xs, "+"),
            Expr::Product(xs) => write_joined(f, xs, "*"),
            Expr::Group(x) => write!(f, "({x})"),
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, xs: &[Expr], sep: &str) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for AssignOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssignOp::Assign => "=",
            AssignOp::Accumulate => "+=",
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {};", self.result, self.op, self.operands)
    }
}

impl fmt::Display for ComputationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let decls: Vec<String> = self.indexes.iter().map(|d| format!("{}[{}]", d.name, d.size)).collect();
        writeln!(f, "space {};", decls.join(", "))?;
        for formula in &self.formulas {
            writeln!(f, "{formula}")?;
        }
        Ok(())
    }
}
