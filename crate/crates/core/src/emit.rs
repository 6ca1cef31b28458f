//! Text renderings of a schedule tree (`for` nests, `form` blocks, `enum`
//! chains) and its JSON document.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ir::{ArrayRef, Expr, Formula};
use crate::schedule::{Affine, EnumNode, Guard, ScheduleTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Notation {
    For,
    Form,
    Enum,
}

impl FromStr for Notation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "for" => Ok(Notation::For),
            "form" => Ok(Notation::Form),
            "enum" => Ok(Notation::Enum),
            _ => Err(format!("unknown notation `{s}` (expected for, form or enum)")),
        }
    }
}

impl fmt::Display for Notation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notation::For => "for",
            Notation::Form => "form",
            Notation::Enum => "enum",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmittedProgram {
    pub notation: Notation,
    pub text: String,
}

pub const SHIFT_NOTE: &str = "// x/2^l is a right shift by l";

fn upper(lower: &Affine, extent: u64) -> String {
    Affine { vars: lower.vars.clone(), constant: lower.constant + extent }.to_string()
}

/// `var` minus its convolution base.
fn offset(node: &EnumNode) -> String {
    if node.lower.vars.is_empty() {
        node.var.clone()
    } else {
        format!("{}-{}", node.var, node.lower.vars.join("-"))
    }
}

struct Renderer<'a> {
    tree: &'a ScheduleTree,
    nodes: Vec<&'a EnumNode>,
    divides: bool,
}

impl Renderer<'_> {
    /// Lattice coordinate of `index` as an expression of the enumerated
    /// variables.
    fn coordinate(&mut self, index: &str) -> String {
        let digits = &self.tree.reverse_map[index];
        let terms: Vec<String> = digits
            .iter()
            .map(|d| {
                let node = self.nodes.iter().find(|n| n.var == d.var).expect("digit of an enumerated variable");
                let off = offset(node);
                let mut term = if node.step > 1 {
                    self.divides = true;
                    let off = if node.lower.vars.is_empty() { off } else { format!("({off})") };
                    format!("{off}/2^{}", node.step.trailing_zeros())
                } else {
                    off
                };
                if d.weight > 1 {
                    if term.contains(['+', '-']) {
                        term = format!("({term})");
                    }
                    term = format!("{term}*{}", d.weight);
                }
                term
            })
            .collect();
        terms.join("+")
    }

    fn reference(&mut self, r: &ArrayRef, shifted: Option<&[usize]>) -> String {
        let spec = &self.tree.spec;
        let coords: Vec<String> = r
            .factors
            .iter()
            .map(|f| {
                let mut pos = spec.index_position(&f.index).unwrap();
                if let Some(perm) = shifted {
                    pos = perm[pos];
                }
                let mut c = self.coordinate(&spec.indexes[pos].name);
                if f.exponent != 1 {
                    c = format!("({c})^{}", f.exponent);
                }
                if f.displacement != 0 {
                    c = format!("{c}+{}", f.displacement);
                }
                c
            })
            .collect();
        if coords.is_empty() {
            r.array.clone()
        } else {
            format!("{}({})", r.array, coords.join(","))
        }
    }

    fn expr(&mut self, e: &Expr) -> String {
        match e {
            Expr::Ref(r) => self.reference(r, None),
            Expr::Sum(xs) => xs.iter().map(|x| self.expr(x)).collect::<Vec<_>>().join("+"),
            Expr::Product(xs) => xs.iter().map(|x| self.expr(x)).collect::<Vec<_>>().join("*"),
            Expr::Group(x) => format!("({})", self.expr(x)),
        }
    }

    fn formula(&mut self, f: &Formula, copy: usize) -> String {
        let result = if self.tree.is_private(&f.result.array) {
            let mut coords = vec![copy.to_string()];
            for x in &f.result.factors {
                coords.push(self.coordinate(&x.index));
            }
            format!("{}_part({})", f.result.array, coords.join(","))
        } else {
            self.reference(&f.result, None)
        };
        format!("{result}{}{}", f.op, self.expr(&f.operands))
    }

    fn orbit_members(&self) -> Vec<Vec<usize>> {
        let orbit = self.tree.orbit.as_ref().unwrap();
        let n = orbit.perm.len();
        let mut out = vec![(0..n).collect::<Vec<_>>()];
        loop {
            let next: Vec<usize> = orbit.perm.iter().map(|&i| out.last().unwrap()[i]).collect();
            if next == out[0] {
                return out;
            }
            out.push(next);
        }
    }

    fn body(&mut self, copy: usize) -> Vec<String> {
        let spec = &self.tree.spec;
        if spec.formulas.is_empty() {
            let parts: Vec<String> = self.nodes.iter().map(|n| offset(n)).collect();
            return vec![format!("({})", parts.join(","))];
        }
        if let Some(orbit) = &self.tree.orbit {
            let _ = orbit;
            let f = &spec.formulas[0];
            let cell = copy as u32 * self.tree.temp_plan.per_copy;
            let members = self.orbit_members();
            let at = |r: &mut Self, k: usize| r.reference(&f.result, Some(&members[k]));
            let mut lines = vec![format!("tmp({cell})={}", at(self, 0))];
            for k in 0..members.len() - 1 {
                lines.push(format!("{}={}", at(self, k), at(self, k + 1)));
            }
            lines.push(format!("{}=tmp({cell})", at(self, members.len() - 1)));
            return lines;
        }
        spec.formulas.iter().map(|f| self.formula(f, copy)).collect()
    }

    fn guard(&mut self, g: &Guard) -> String {
        match g {
            Guard::Below { index, size } => format!("{}<{size}", self.coordinate(index)),
            Guard::OrbitRep => {
                let spec = &self.tree.spec;
                let members = self.orbit_members();
                let tuple = |r: &mut Self, perm: &[usize]| {
                    let cs: Vec<String> = perm.iter().map(|&p| r.coordinate(&spec.indexes[p].name)).collect();
                    format!("({})", cs.join(","))
                };
                let me = tuple(self, &members[0]);
                let rest: Vec<String> = members[1..].iter().map(|m| format!("{me}>={}", tuple(self, m))).collect();
                rest.join("&&")
            }
        }
    }
}

fn guard_line(r: &mut Renderer, node: &EnumNode) -> Option<String> {
    if node.guards.is_empty() {
        return None;
    }
    let conds: Vec<String> = node.guards.iter().map(|g| r.guard(g)).collect();
    Some(format!("if ({})", conds.join(" && ")))
}

fn render_copy(tree: &ScheduleTree, copy: usize, notation: Notation, divides: &mut bool) -> Vec<String> {
    let root = &tree.roots[copy];
    let nodes = root.chain();
    let mut r = Renderer { tree, nodes: nodes.clone(), divides: false };
    let mut lines = Vec::new();
    let headers: Vec<String> = nodes
        .iter()
        .map(|n| match notation {
            Notation::Enum => format!("enum({},{},[{},{}))", n.var, n.step, n.lower, upper(&n.lower, n.extent)),
            _ => format!("({v}={lo};{v}<{hi};{v}+={s})", v = n.var, lo = n.lower, hi = upper(&n.lower, n.extent), s = n.step),
        })
        .collect();
    let guards: Vec<Option<String>> = nodes.iter().map(|n| guard_line(&mut r, n)).collect();
    let body = r.body(copy);
    *divides |= r.divides;
    match notation {
        Notation::For => {
            let mut depth = 0;
            for (h, g) in headers.iter().zip(&guards) {
                lines.push(format!("{}for {h}", "  ".repeat(depth)));
                depth += 1;
                if let Some(g) = g {
                    lines.push(format!("{}{g}", "  ".repeat(depth)));
                    depth += 1;
                }
            }
            lines.extend(body.iter().map(|b| format!("{}{b}", "  ".repeat(depth))));
        }
        Notation::Form => {
            let n = headers.len();
            for (i, h) in headers.iter().enumerate() {
                let lead = if i == 0 { "form [" } else { "      " };
                let close = if i + 1 == n { "]" } else { "" };
                lines.push(format!("{lead}{h}{close}"));
            }
            let conds: Vec<&str> = guards.iter().flatten().map(String::as_str).collect();
            let mut indent = "  ".to_string();
            if !conds.is_empty() {
                let joined: Vec<&str> = conds.iter().map(|c| &c[4..c.len() - 1]).collect();
                lines.push(format!("  if ({})", joined.join(" && ")));
                indent.push_str("  ");
            }
            lines.extend(body.iter().map(|b| format!("{indent}{b}")));
        }
        Notation::Enum => {
            let mut parts = Vec::new();
            for (h, g) in headers.iter().zip(&guards) {
                parts.push(h.clone());
                if let Some(g) = g {
                    parts.push(g.clone());
                }
            }
            lines.push(format!("{} {}", parts.join(" "), body.join("; ")));
        }
    }
    lines
}

/// Renders `tree` in `notation`. Output is deterministic.
pub fn emit(tree: &ScheduleTree, notation: Notation) -> EmittedProgram {
    let mut divides = false;
    let mut blocks = Vec::new();
    let copies = tree.roots.len();
    for c in 0..copies {
        let mut lines = Vec::new();
        if copies > 1 {
            lines.push(format!("// copy {c}"));
        }
        lines.extend(render_copy(tree, c, notation, &mut divides));
        blocks.push(lines);
    }
    let mut out: Vec<String> = Vec::new();
    if divides {
        out.push(SHIFT_NOTE.to_string());
    }
    let cells = tree.temp_plan.locations;
    if cells > 0 && tree.orbit.is_none() {
        out.push(format!("// temporaries: {cells} cells"));
    }
    for b in blocks {
        out.extend(b);
    }
    if let Some(u) = &tree.unfold {
        for array in &u.private {
            let f = &tree.spec.formulas[tree.spec.writer_of(array).unwrap()];
            let tail = if f.result.factors.is_empty() { String::new() } else { ",*".to_string() };
            let parts: Vec<String> = (0..u.copies).map(|c| format!("{array}_part({c}{tail})")).collect();
            let target = if f.result.factors.is_empty() { array.clone() } else { format!("{array}(*)") };
            out.push(format!("{target}+={}", parts.join("+")));
        }
    }
    let mut text = out.join("\n");
    text.push('\n');
    EmittedProgram { notation, text }
}

pub fn to_json(tree: &ScheduleTree) -> String {
    let mut s = serde_json::to_string_pretty(tree).expect("schedule trees serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<ScheduleTree, serde_json::Error> {
    serde_json::from_str(text)
}
