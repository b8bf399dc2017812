//! How Werner noise on the sources and a misaligned C₃ affect the statistics.

use swapcert::certification::{certify_crit1, certify_crit2};
use swapcert::protocol::{chsh_report, noisy_scenario};

fn main() -> swapcert::Result<()> {
    println!(
        "{:>6} {:>6} {:>10} {:>10} {:>10} {:>6} {:>6}",
        "v", "theta", "S_AC", "min S_AB", "max S_AB", "Crit1", "Crit2"
    );
    for v in [1.0, 0.99, 0.9, 0.8, 0.71] {
        for theta in [0.0, 0.1, 0.2618] {
            let r = chsh_report(&noisy_scenario(v, 1.0, theta)?)?;
            let vals = r.defined_ab_values();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let c1 = certify_crit1(r.s_ac, r.s_bc, r.s_ab_given_c, 1e-9).passed;
            let c2 = certify_crit2(r.s_ac, r.s_bc, r.s_ab_given_c, 1e-9).passed;
            println!(
                "{v:>6.2} {theta:>6.3} {:>10.6} {min:>10.6} {max:>10.6} {c1:>6} {c2:>6}",
                r.s_ac
            );
        }
    }
    Ok(())
}
