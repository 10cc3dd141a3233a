//! Synthetic scenarios: random radial feeders and a fixed 23-bus community
//! feeder used by the examples, tests and benchmarks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    IbrSpec, Line, Phasor, RegulatedKeyword, RegulatedSet, Scenario, SlackVoltages, DEFAULT_POLYGON_SIDES,
};

/// Upstream unbalance settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackCase {
    /// 0.8∠0° positive, 0.1∠−90° negative.
    Moderate,
    /// 0.6∠0° positive, 0.4∠−30° negative.
    Severe,
    /// 1.0∠0° positive, no negative sequence.
    Balanced,
}

impl SlackCase {
    pub fn slack(self) -> SlackVoltages {
        let (p, n) = match self {
            SlackCase::Moderate => ((0.8, 0.0), (0.1, -90.0)),
            SlackCase::Severe => ((0.6, 0.0), (0.4, -30.0)),
            SlackCase::Balanced => ((1.0, 0.0), (0.0, 0.0)),
        };
        SlackVoltages { v0_plus: Phasor::from_degrees(p.0, p.1), v0_minus: Phasor::from_degrees(n.0, n.1) }
    }
}

fn base_scenario(m: usize, slack: SlackVoltages) -> Scenario {
    Scenario {
        m,
        v_ph_pk: 1.0,
        polygon_sides: DEFAULT_POLYGON_SIDES,
        big_m: 1.0,
        slack,
        lines: Vec::new(),
        loads: BTreeMap::new(),
        ibrs: Vec::new(),
        regulated: RegulatedSet::default(),
        bases: None,
    }
}

/// Slack and one bus carrying a single IBR and a light load.
pub fn two_bus(case: SlackCase) -> Scenario {
    let mut s = base_scenario(1, case.slack());
    s.lines.push(Line { from: 0, to: 1, r: 0.04, x: 0.12 });
    s.loads.insert(1, Complex64::new(0.3, -0.1));
    s.ibrs.push(IbrSpec { bus: 1, i_max: 0.4, s_max: 0.4, p_min: 0.05, q_min: -0.3 });
    s
}

/// Trunk 0..=10 with laterals at buses 3, 6 and 8; IBRs near the ends.
pub fn feeder23(case: SlackCase) -> Scenario {
    let mut s = base_scenario(23, case.slack());
    let trunk = (0.010, 0.022);
    let lateral = (0.016, 0.018);
    for b in 1..=10 {
        s.lines.push(Line { from: b - 1, to: b, r: trunk.0, x: trunk.1 });
    }
    for (root, buses) in [(3, 11..=14), (6, 15..=18), (8, 19..=23)] {
        let mut prev = root;
        for b in buses {
            s.lines.push(Line { from: prev, to: b, r: lateral.0, x: lateral.1 });
            prev = b;
        }
    }
    for b in 1..=23 {
        // a few heavier customers on the laterals
        let scale = if matches!(b, 13 | 17 | 21) { 2.0 } else { 1.0 };
        s.loads.insert(b, Complex64::new(0.03 * scale, -0.012 * scale));
    }
    for (bus, i_max) in [(4, 0.18), (7, 0.15), (10, 0.2), (12, 0.12), (14, 0.15), (17, 0.12), (20, 0.15), (23, 0.18)] {
        s.ibrs.push(IbrSpec { bus, i_max, s_max: 0.9 * i_max, p_min: 0.2 * i_max, q_min: -0.9 * i_max });
    }
    s.bases = Some(crate::model::Bases { v_kv: 0.4, s_kva: 500.0 });
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomOptions {
    pub max_buses: usize,
    pub max_ibrs: usize,
}

impl Default for RandomOptions {
    fn default() -> Self {
        Self { max_buses: 10, max_ibrs: 3 }
    }
}

/// Random radial feeder: each bus hangs off a uniformly chosen earlier bus.
pub fn random_radial(seed: u64, opts: RandomOptions) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=opts.max_buses);
    let slack = SlackVoltages {
        v0_plus: Phasor::new(rng.gen_range(0.6..1.0), rng.gen_range(-0.3..0.3)),
        v0_minus: Phasor::new(rng.gen_range(0.0..0.3), rng.gen_range(-3.1..3.1)),
    };
    let mut s = base_scenario(m, slack);
    for b in 1..=m {
        let parent = rng.gen_range(0..b);
        s.lines.push(Line { from: parent, to: b, r: rng.gen_range(0.005..0.05), x: rng.gen_range(0.005..0.08) });
        if rng.gen_bool(0.7) {
            s.loads.insert(b, Complex64::new(rng.gen_range(0.0..0.2), rng.gen_range(-0.08..0.02)));
        }
    }
    let n_ibr = rng.gen_range(1..=opts.max_ibrs.min(m));
    let mut buses: Vec<usize> = (1..=m).collect();
    for _ in 0..n_ibr {
        let bus = buses.swap_remove(rng.gen_range(0..buses.len()));
        let i_max = rng.gen_range(0.05..0.4);
        s.ibrs.push(IbrSpec {
            bus,
            i_max,
            s_max: i_max * rng.gen_range(0.6..1.0),
            p_min: i_max * rng.gen_range(-0.1..0.2),
            q_min: -i_max * rng.gen_range(0.3..0.9),
        });
    }
    s.ibrs.sort_by_key(|i| i.bus);
    if rng.gen_bool(0.2) {
        s.regulated = RegulatedSet::Keyword(RegulatedKeyword::AllBuses);
    }
    s
}

/// Named scenarios covering both unbalance cases at several sizes.
pub fn scenario_suite() -> Vec<(String, Scenario)> {
    let mut out = vec![
        ("two_bus_moderate".to_string(), two_bus(SlackCase::Moderate)),
        ("two_bus_severe".to_string(), two_bus(SlackCase::Severe)),
        ("feeder23_moderate".to_string(), feeder23(SlackCase::Moderate)),
        ("feeder23_severe".to_string(), feeder23(SlackCase::Severe)),
    ];
    for seed in 0..8u64 {
        let mut s = random_radial(seed, RandomOptions { max_buses: 6, max_ibrs: 3 });
        s.slack = if seed % 2 == 0 { SlackCase::Moderate } else { SlackCase::Severe }.slack();
        out.push((format!("random_{seed}"), s));
    }
    out
}
