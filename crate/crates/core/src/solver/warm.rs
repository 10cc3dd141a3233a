use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::convex::NodeBounds;
use crate::model::normalize_angle;
use crate::problem::{MiConvexProblem, VoltageEstimate};

/// Selected side (0-based) for every one-hot group, in group order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    /// Node bounds with every group fixed to its selected side.
    pub fn fix(&self, problem: &MiConvexProblem, base: &NodeBounds) -> NodeBounds {
        let mut bounds = base.clone();
        for (group, &k) in problem.one_hot.iter().zip(&self.0) {
            for (j, v) in group.members.iter().enumerate() {
                let val = if j == k { 1.0 } else { 0.0 };
                bounds[v.0] = (val, val);
            }
        }
        bounds
    }

    /// Reads the selection out of an (integral) primal point.
    pub fn from_point(problem: &MiConvexProblem, x: &[f64]) -> Self {
        Assignment(
            problem
                .one_hot
                .iter()
                .map(|g| {
                    g.members
                        .iter()
                        .enumerate()
                        .max_by(|a, b| x[a.1 .0].total_cmp(&x[b.1 .0]).then(b.0.cmp(&a.0)))
                        .map(|(k, _)| k)
                        .unwrap_or(0)
                })
                .collect(),
        )
    }
}

/// Side whose outward normal is angularly closest to `(vd, vq)`, among the
/// allowed sides. A zero vector selects the first allowed side.
pub fn nearest_side(vd: f64, vq: f64, sides: usize, allowed: &[bool]) -> usize {
    let first_allowed = allowed.iter().position(|&a| a).unwrap_or(0);
    if vd == 0.0 && vq == 0.0 {
        return first_allowed;
    }
    let angle = vq.atan2(vd);
    (0..sides)
        .filter(|&k| allowed[k])
        .map(|k| (k, normalize_angle(2.0 * k as f64 * PI / sides as f64 - angle).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .unwrap_or(first_allowed)
}

/// Nearest-normal side selection from a voltage estimate.
pub fn warm_start(problem: &MiConvexProblem, estimate: &VoltageEstimate) -> Assignment {
    Assignment(
        problem
            .one_hot
            .iter()
            .map(|g| {
                let v = estimate.at(g.bus);
                let allowed: Vec<bool> = g.members.iter().map(|m| problem.variables[m.0].upper > 0.0).collect();
                nearest_side(v.vd_pos, v.vq_pos, g.members.len(), &allowed)
            })
            .collect(),
    )
}
