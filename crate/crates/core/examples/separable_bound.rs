//! Closed-form separable bound versus a see-saw search over product states.

use swapcert::bell_decomposition::{
    decompose, planted_observables, separable_bound, DEFAULT_ITERS,
};
use swapcert::protocol::ideal_ab_settings;
use swapcert::random::seeded_rng;

fn main() -> swapcert::Result<()> {
    let (alice, bob) = ideal_ab_settings();
    let d = decompose(&alice, &bob, 1e-9)?.with_oracle(32, DEFAULT_ITERS, 0)?;
    let oracle = d
        .sep_bound
        .oracle
        .as_ref()
        .map(|o| o.value)
        .unwrap_or(f64::NAN);
    println!(
        "ideal settings: λ = {:.6}, formula {:.9}, see-saw {oracle:.9}",
        d.structure.lambda, d.sep_bound.formula_value
    );

    for k in 0..4 {
        let mut rng = seeded_rng(11, k);
        let a = planted_observables(3, &mut rng);
        let b = planted_observables(2, &mut rng);
        let d = decompose(&a, &b, 1e-9)?.with_oracle(32, DEFAULT_ITERS, k)?;
        let o = d.sep_bound.oracle.as_ref().expect("oracle ran");
        println!(
            "planted 6x4 #{k}: λ = {:.6}, formula {:.9}, see-saw {:.9} (restart {})",
            d.structure.lambda, d.sep_bound.formula_value, o.value, o.restart
        );
    }
    println!(
        "endpoints: S(2) = {}, S(2√2) = {:.12}",
        separable_bound(2.0),
        separable_bound(2.0 * 2f64.sqrt())
    );
    Ok(())
}
