//! Samples outcome counts, estimates the CHSH values with standard errors
//! and certifies with a tolerance of five standard errors.

use swapcert::certification::{certify_crit1, certify_crit2};
use swapcert::protocol::noisy_scenario;
use swapcert::sampling::{estimate_report, sample_counts, Counts};

fn main() -> swapcert::Result<()> {
    for (v, n) in [(1.0, 1_000_000), (0.995, 1_000_000), (1.0, 10_000)] {
        let counts = sample_counts(&noisy_scenario(v, 1.0, 0.0)?, n, 42)?;
        // the CSV is the exchange format of the command line tool
        let counts = Counts::read_csv(counts.to_csv().as_bytes())?;
        let est = estimate_report(&counts)?;
        let tol = est.tolerance(5.0);
        let r = &est.report;
        println!("v_AC = {v}, n = {n}:");
        println!(
            "  S_AC = {:.5} ± {:.5}, S_BC = {:.5} ± {:.5}",
            r.s_ac, est.se_ac, r.s_bc, est.se_bc
        );
        for c in 0..4 {
            println!(
                "  S_AB|{} = {:.5} ± {:.5}",
                c + 1,
                r.s_ab_given_c[c].unwrap_or(f64::NAN),
                est.se_ab[c].unwrap_or(f64::NAN)
            );
        }
        let c1 = certify_crit1(r.s_ac, r.s_bc, r.s_ab_given_c, tol);
        let c2 = certify_crit2(r.s_ac, r.s_bc, r.s_ab_given_c, tol);
        println!("  tol = {tol:.5}: Crit1 {}, Crit2 {}", c1.passed, c2.passed);
    }
    Ok(())
}
