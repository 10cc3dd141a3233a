//! Runs the three strategies on the built-in scenarios and prints a summary.

use std::time::Instant;

use vum_core::synth::{feeder23, two_bus, SlackCase};
use vum_core::{compare_strategies, RunSettings};

fn main() {
    let settings = RunSettings::default();
    for (name, scenario) in [
        ("two_bus moderate", two_bus(SlackCase::Moderate)),
        ("two_bus severe", two_bus(SlackCase::Severe)),
        ("feeder23 moderate", feeder23(SlackCase::Moderate)),
        ("feeder23 severe", feeder23(SlackCase::Severe)),
    ] {
        let start = Instant::now();
        let report = compare_strategies(&scenario, &settings).expect("valid scenario");
        println!("{name} ({:.2?})", start.elapsed());
        for e in &report.entries {
            match &e.report {
                Some(r) => {
                    let vpos_min = r.buses.iter().map(|b| b.v_pos).fold(f64::INFINITY, f64::min);
                    let vneg_max = r.buses.iter().map(|b| b.v_neg).fold(0.0, f64::max);
                    println!(
                        "  {} J={:.6} common={:.6} status={:?} feasible={} iters={} nodes={} min V+={:.4} max V-={:.4}",
                        e.strategy,
                        r.objective,
                        r.common_objective,
                        r.status,
                        r.feasible,
                        r.iterations.len(),
                        r.solver.total_nodes,
                        vpos_min,
                        vneg_max
                    );
                }
                None => println!("  {} failed: {}", e.strategy, e.error.as_deref().unwrap_or("")),
            }
        }
        if let Some(d) = report.dominance {
            println!("  dominance holds={} margin={:.3e}", d.holds, d.margin);
        }
    }
}

