//! Bounds on the trace distance to the ideal Bell measurement, compared with
//! the true distance of randomly rotated Bell measurements.

use swapcert::certification::{
    bounds_curve, distance_bounds, threshold_for_distance, trace_distance,
};
use swapcert::protocol::{chsh_report, ideal_scenario};
use swapcert::random::{random_rotated_bell, seeded_rng};

fn main() -> swapcert::Result<()> {
    let s05 = threshold_for_distance(0.05)?;
    println!("min_c S_AB|c ≥ {s05:.4} guarantees distance ≤ 5%");
    for row in bounds_curve(2.0, 2.0 * 2f64.sqrt(), 5, &[s05])? {
        println!(
            "  S = {:.4}: {:.4} ≤ t ≤ {:.4}",
            row.s, row.lower, row.upper
        );
    }

    println!("random rotations of the Bell basis:");
    for k in 0..5 {
        let m = random_rotated_bell(&mut seeded_rng(2024, k));
        let r = chsh_report(&ideal_scenario().with_charlie3(m.clone())?)?;
        let b = distance_bounds(r.complete_ab_values()?)?;
        let t = trace_distance(&m, &r.relabeling)?;
        println!("  {:.4} ≤ t = {t:.4} ≤ {:.4}", b.lower, b.upper);
    }
    Ok(())
}
