use serde::{Deserialize, Serialize};

use super::config::PolygonConfig;
use super::layout::VariableLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// `sum(coef * x) + constant`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn var(v: VarId) -> Self {
        Self { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn scaled(v: VarId, coef: f64) -> Self {
        Self { terms: vec![(v, coef)], constant: 0.0 }
    }

    pub fn with(mut self, v: VarId, coef: f64) -> Self {
        self.push(v, coef);
        self
    }

    pub fn plus(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    /// Adds a term, skipping exact zeros.
    pub fn push(&mut self, v: VarId, coef: f64) {
        if coef != 0.0 {
            self.terms.push((v, coef));
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * x[v.0]).sum::<f64>() + self.constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `expr == 0`
    Eq,
    /// `expr <= 0`
    Le,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineConstraint {
    pub label: String,
    pub expr: LinExpr,
    pub sense: Sense,
}

/// `|| inner || <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocConstraint {
    pub label: String,
    pub inner: Vec<LinExpr>,
    pub bound: LinExpr,
}

impl SocConstraint {
    /// `bound - ||inner||`; negative when violated.
    pub fn slack(&self, x: &[f64]) -> f64 {
        let norm = self.inner.iter().map(|e| e.eval(x).powi(2)).sum::<f64>().sqrt();
        self.bound.eval(x) - norm
    }
}

/// Binaries of which exactly one is 1 (polygon side selection at one bus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotGroup {
    pub bus: usize,
    /// Members in side order k = 1..n.
    pub members: Vec<VarId>,
}

/// `weight * expr^2` with `weight >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquaredTerm {
    pub weight: f64,
    pub expr: LinExpr,
}

/// Sum of weighted squares of affine expressions plus a linear part, which
/// is positive semidefinite by construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub squares: Vec<SquaredTerm>,
    pub linear: LinExpr,
}

impl Objective {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.squares.iter().map(|t| t.weight * t.expr.eval(x).powi(2)).sum::<f64>() + self.linear.eval(x)
    }
}

/// Worst violation of each constraint family at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub equality: f64,
    pub inequality: f64,
    pub bounds: f64,
    pub soc: f64,
    /// Largest distance of a binary from {0, 1}.
    pub integrality: f64,
}

impl Residuals {
    /// Largest continuous violation (integrality excluded).
    pub fn primal(&self) -> f64 {
        self.equality.max(self.inequality).max(self.bounds).max(self.soc)
    }
}

/// Mixed-integer second-order cone program in a solver-neutral form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiConvexProblem {
    pub variables: Vec<Variable>,
    pub objective: Objective,
    pub affine: Vec<AffineConstraint>,
    pub socs: Vec<SocConstraint>,
    pub one_hot: Vec<OneHotGroup>,
    pub layout: VariableLayout,
    pub polygon: Option<PolygonConfig>,
}

impl MiConvexProblem {
    pub fn empty() -> Self {
        Self {
            variables: Vec::new(),
            objective: Objective::default(),
            affine: Vec::new(),
            socs: Vec::new(),
            one_hot: Vec::new(),
            layout: VariableLayout::default(),
            polygon: None,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable { name: name.into(), kind, lower, upper });
        VarId(self.variables.len() - 1)
    }

    pub fn add_affine(&mut self, label: impl Into<String>, expr: LinExpr, sense: Sense) {
        self.affine.push(AffineConstraint { label: label.into(), expr, sense });
    }

    pub fn add_soc(&mut self, label: impl Into<String>, inner: Vec<LinExpr>, bound: LinExpr) {
        self.socs.push(SocConstraint { label: label.into(), inner, bound });
    }

    /// Registers a one-hot group and its `sum = 1` row.
    pub fn add_one_hot(&mut self, bus: usize, members: Vec<VarId>) {
        let expr = members.iter().fold(LinExpr::constant(-1.0), |e, &v| e.with(v, 1.0));
        self.add_affine(format!("onehot[{bus}]"), expr, Sense::Eq);
        self.one_hot.push(OneHotGroup { bus, members });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
    }

    pub fn evaluate(&self, x: &[f64]) -> Residuals {
        assert_eq!(x.len(), self.num_vars(), "point has wrong dimension");
        let mut r = Residuals::default();
        for c in &self.affine {
            let v = c.expr.eval(x);
            match c.sense {
                Sense::Eq => r.equality = r.equality.max(v.abs()),
                Sense::Le => r.inequality = r.inequality.max(v),
            }
        }
        for (var, &xi) in self.variables.iter().zip(x) {
            r.bounds = r.bounds.max(var.lower - xi).max(xi - var.upper);
            if var.kind == VarKind::Binary {
                r.integrality = r.integrality.max(xi.abs().min((xi - 1.0).abs()));
            }
        }
        for s in &self.socs {
            r.soc = r.soc.max(-s.slack(x));
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soc_slack_sign() {
        let mut p = MiConvexProblem::empty();
        let x = p.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let y = p.add_var("y", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let t = p.add_var("t", VarKind::Continuous, 0.0, 1.0);
        p.add_soc("c", vec![LinExpr::var(x), LinExpr::var(y)], LinExpr::var(t));
        // exactly on the cone
        assert!(p.evaluate(&[0.6, 0.8, 1.0]).soc.abs() < 1e-15);
        // radius below magnitude
        assert!((p.evaluate(&[0.6, 0.8, 0.9]).soc - 0.1).abs() < 1e-12);
    }

    #[test]
    fn one_hot_row_and_integrality() {
        let mut p = MiConvexProblem::empty();
        let a = p.add_var("a", VarKind::Binary, 0.0, 1.0);
        let b = p.add_var("b", VarKind::Binary, 0.0, 1.0);
        p.add_one_hot(1, vec![a, b]);
        let r = p.evaluate(&[0.3, 0.7]);
        assert!(r.equality < 1e-15);
        assert!((r.integrality - 0.3).abs() < 1e-15);
        assert!(p.evaluate(&[1.0, 1.0]).equality > 0.9);
    }
}
