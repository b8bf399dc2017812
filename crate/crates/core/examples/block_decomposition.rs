//! Splits a pair of ±1 observables on C⁶ into invariant blocks of dimension
//! at most two and prints the block CHSH norms.

use swapcert::bell_decomposition::{block_chsh, jordan_blocks, planted_observables};
use swapcert::random::{random_dichotomic, seeded_rng};

fn main() -> swapcert::Result<()> {
    let mut rng = seeded_rng(7, 0);
    let alice = [
        random_dichotomic(6, &mut rng),
        random_dichotomic(6, &mut rng),
    ];
    let blocks = jordan_blocks(&alice[0], &alice[1], 1e-9)?;
    println!(
        "Alice: {} blocks, dims {:?}",
        blocks.blocks.len(),
        blocks.blocks.iter().map(|b| b.dim()).collect::<Vec<_>>()
    );
    println!(
        "  reconstruction error {:.2e}",
        blocks.reconstruction_error(&alice[0], &alice[1])
    );

    let bob = planted_observables(2, &mut rng);
    let bob_blocks = jordan_blocks(&bob[0], &bob[1], 1e-9)?;
    let s = block_chsh(&blocks, &bob_blocks)?;
    for p in &s.pairs {
        println!(
            "  block ({}, {}) dims {:?}: α = {:.6}",
            p.i, p.j, p.dims, p.alpha
        );
    }
    println!("λ = {:.6}", s.lambda);
    Ok(())
}
