//! Flat JSON layout of a [`MiConvexProblem`] for cross-checking with other solvers.
//!
//! ```text
//! minimize    1/2 x' P x + q' x + constant
//! subject to  A x = b                       ("equalities")
//!             G x <= h                      ("inequalities")
//!             || F_k x + f_k || <= g_k' x + h_k   ("socs")
//!             lower <= x <= upper, binaries in {0, 1}, one-hot groups sum to 1
//! ```
//! Matrices are 0-based `[row, col, value]` triplets; `P` holds only its upper triangle.

use std::collections::BTreeMap;

use serde::Serialize;

use super::standard::{LinExpr, MiConvexProblem, Objective, Sense, VarKind};

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticForm {
    /// Upper-triangular `(row, col, value)` entries of `P`.
    pub p_upper: Vec<(usize, usize, f64)>,
    pub q: Vec<f64>,
    pub constant: f64,
}

impl Objective {
    /// Expands the weighted squares into `1/2 x' P x + q' x + c`.
    pub fn to_quadratic(&self, num_vars: usize) -> QuadraticForm {
        let mut p: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut q = vec![0.0; num_vars];
        let mut constant = self.linear.constant;
        for (v, c) in &self.linear.terms {
            q[v.0] += c;
        }
        for term in &self.squares {
            let w = term.weight;
            let b = term.expr.constant;
            for &(vi, ci) in &term.expr.terms {
                q[vi.0] += 2.0 * w * b * ci;
                for &(vj, cj) in &term.expr.terms {
                    if vi.0 <= vj.0 {
                        *p.entry((vi.0, vj.0)).or_default() += 2.0 * w * ci * cj;
                    }
                }
            }
            constant += w * b * b;
        }
        QuadraticForm {
            p_upper: p.into_iter().filter(|(_, v)| *v != 0.0).map(|((i, j), v)| (i, j, v)).collect(),
            q,
            constant,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DumpVariable {
    pub index: usize,
    pub name: String,
    pub kind: VarKind,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SparseRows {
    pub labels: Vec<String>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl SparseRows {
    fn push(&mut self, label: &str, expr: &LinExpr) {
        let row = self.rhs.len();
        self.labels.push(label.to_string());
        self.triplets.extend(expr.terms.iter().map(|(v, c)| (row, v.0, *c)));
        self.rhs.push(-expr.constant);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DumpSoc {
    pub label: String,
    /// `F` triplets; `f` is `inner_offset`.
    pub inner: Vec<(usize, usize, f64)>,
    pub inner_offset: Vec<f64>,
    pub bound: Vec<(usize, f64)>,
    pub bound_offset: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StandardFormDump {
    pub variables: Vec<DumpVariable>,
    pub objective: QuadraticForm,
    pub equalities: SparseRows,
    pub inequalities: SparseRows,
    pub socs: Vec<DumpSoc>,
    pub one_hot: Vec<Vec<usize>>,
}

impl MiConvexProblem {
    pub fn standard_form(&self) -> StandardFormDump {
        let finite = |v: f64| v.is_finite().then_some(v);
        let mut equalities = SparseRows::default();
        let mut inequalities = SparseRows::default();
        for c in &self.affine {
            match c.sense {
                Sense::Eq => equalities.push(&c.label, &c.expr),
                Sense::Le => inequalities.push(&c.label, &c.expr),
            }
        }
        StandardFormDump {
            variables: self
                .variables
                .iter()
                .enumerate()
                .map(|(index, v)| DumpVariable {
                    index,
                    name: v.name.clone(),
                    kind: v.kind,
                    lower: finite(v.lower),
                    upper: finite(v.upper),
                })
                .collect(),
            objective: self.objective.to_quadratic(self.num_vars()),
            equalities,
            inequalities,
            socs: self
                .socs
                .iter()
                .map(|s| DumpSoc {
                    label: s.label.clone(),
                    inner: s
                        .inner
                        .iter()
                        .enumerate()
                        .flat_map(|(r, e)| e.terms.iter().map(move |(v, c)| (r, v.0, *c)))
                        .collect(),
                    inner_offset: s.inner.iter().map(|e| e.constant).collect(),
                    bound: s.bound.terms.iter().map(|(v, c)| (v.0, *c)).collect(),
                    bound_offset: s.bound.constant,
                })
                .collect(),
            one_hot: self.one_hot.iter().map(|g| g.members.iter().map(|v| v.0).collect()).collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.standard_form()).expect("standard form serializes")
    }
}
