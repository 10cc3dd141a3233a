use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::topology::{build_path_sets, PathSets};
use crate::error::ModelError;

pub type CMatrix = DMatrix<Complex64>;

/// Pivot ratio beyond which `I + Z_net * Y_L` is treated as singular.
const SINGULAR_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sequence {
    Positive,
    Negative,
}

/// Sequence-domain matrices of a radial network.
///
/// Negative-sequence matrices are the elementwise conjugates of the positive
/// ones: the DQ- frame rotates backwards, which conjugates every phasor.
#[derive(Debug, Clone)]
pub struct SequenceNetworkModel {
    m: usize,
    z_net: CMatrix,
    y_l: CMatrix,
    h: CMatrix,
    z_eq: CMatrix,
    z_net_neg: CMatrix,
    y_l_neg: CMatrix,
    h_neg: CMatrix,
    z_eq_neg: CMatrix,
    inversion_residual: f64,
}

impl SequenceNetworkModel {
    pub fn build(scenario: &Scenario) -> Result<Self, ModelError> {
        scenario.validate()?;
        let paths = build_path_sets(scenario).map_err(crate::error::ScenarioError::from)?;
        let z_net = build_impedance_matrix(scenario, &paths);
        let y_l = load_matrix(scenario);
        let (h, z_eq) = build_equivalent_matrices(&z_net, &y_l)?;
        let inversion_residual = identity_residual(&z_net, &y_l, &h);
        Ok(Self {
            m: scenario.m,
            z_net_neg: z_net.map(|z| z.conj()),
            y_l_neg: y_l.map(|z| z.conj()),
            h_neg: h.map(|z| z.conj()),
            z_eq_neg: z_eq.map(|z| z.conj()),
            z_net,
            y_l,
            h,
            z_eq,
            inversion_residual,
        })
    }

    pub fn bus_count(&self) -> usize {
        self.m
    }

    pub fn z_net(&self, seq: Sequence) -> &CMatrix {
        match seq {
            Sequence::Positive => &self.z_net,
            Sequence::Negative => &self.z_net_neg,
        }
    }

    pub fn y_l(&self, seq: Sequence) -> &CMatrix {
        match seq {
            Sequence::Positive => &self.y_l,
            Sequence::Negative => &self.y_l_neg,
        }
    }

    pub fn h(&self, seq: Sequence) -> &CMatrix {
        match seq {
            Sequence::Positive => &self.h,
            Sequence::Negative => &self.h_neg,
        }
    }

    pub fn z_eq(&self, seq: Sequence) -> &CMatrix {
        match seq {
            Sequence::Positive => &self.z_eq,
            Sequence::Negative => &self.z_eq_neg,
        }
    }

    /// `max |(I + Z_net Y_L) H - I|` of the positive-sequence inversion.
    pub fn inversion_residual(&self) -> f64 {
        self.inversion_residual
    }

    /// Row sums of `H`, i.e. the zero-injection voltage per unit slack voltage.
    pub fn h_row_sums(&self, seq: Sequence) -> Vec<Complex64> {
        let h = self.h(seq);
        (0..self.m).map(|i| h.row(i).iter().sum()).collect()
    }
}

/// `Z_ij` is the summed impedance of the lines shared by the paths to `i` and `j`.
pub fn build_impedance_matrix(scenario: &Scenario, paths: &PathSets) -> CMatrix {
    let m = scenario.m;
    let z_line: Vec<Complex64> = scenario.lines.iter().map(|l| l.impedance()).collect();
    let mut z = CMatrix::zeros(m, m);
    for i in 1..=m {
        for j in i..=m {
            let zij: Complex64 = paths.common(i, j).map(|&l| z_line[l]).sum();
            z[(i - 1, j - 1)] = zij;
            z[(j - 1, i - 1)] = zij;
        }
    }
    z
}

fn load_matrix(scenario: &Scenario) -> CMatrix {
    let mut y = CMatrix::zeros(scenario.m, scenario.m);
    for (&bus, &adm) in &scenario.loads {
        y[(bus - 1, bus - 1)] = adm;
    }
    y
}

/// Returns `H = (I + Z_net Y_L)^-1` and `Z_eq = H Z_net`.
///
/// `H` comes from one LU factorization followed by `m` column solves against
/// the identity.
pub fn build_equivalent_matrices(z_net: &CMatrix, y_l: &CMatrix) -> Result<(CMatrix, CMatrix), ModelError> {
    let m = z_net.nrows();
    let a = CMatrix::identity(m, m) + z_net * y_l;
    let lu = a.lu();
    let pivots: Vec<f64> = {
        let u = lu.u();
        (0..m).map(|k| u[(k, k)].norm()).collect()
    };
    let max_pivot = pivots.iter().copied().fold(0.0, f64::max);
    let min_pivot = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_estimate = if min_pivot > 0.0 { max_pivot / min_pivot } else { f64::INFINITY };
    if !(condition_estimate < SINGULAR_CONDITION) {
        return Err(ModelError::Singular { condition_estimate });
    }
    let h = lu
        .solve(&CMatrix::identity(m, m))
        .ok_or(ModelError::Singular { condition_estimate })?;
    let z_eq = &h * z_net;
    Ok((h, z_eq))
}

fn identity_residual(z_net: &CMatrix, y_l: &CMatrix, h: &CMatrix) -> f64 {
    let m = z_net.nrows();
    let r = (CMatrix::identity(m, m) + z_net * y_l) * h - CMatrix::identity(m, m);
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
