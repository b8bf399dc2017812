//! Seeded random ensembles: Haar unitaries and states, random observables,
//! random density matrices and random measurements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, re, ComplexMatrix, DensityMatrix, PureState, ZERO};
use crate::measurements::{
    rotated_bell_measurement, BinnedMeasurement, DichotomicObservable, FourOutcomeMeasurement,
};

/// Deterministic generator for stream `stream` of a seed.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a, b)
}

pub fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| gaussian(rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, rng).qr();
    let (q, r) = qr.unpack();
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                re(1.0)
            }
        } else {
            ZERO
        }
    });
    ComplexMatrix::from(q * phases)
}

/// Haar-random pure state.
pub fn haar_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> PureState {
    let d: usize = dims.iter().product();
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(v, dims).expect("nonzero gaussian vector")
}

/// Random mixed state `G G† / Tr(G G†)` with `G` Ginibre.
pub fn random_density<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = ginibre(d, rng);
    let m = ComplexMatrix::from(&g * g.adjoint());
    DensityMatrix::from_unnormalized(m.hermitian_part(), dims).expect("full-rank positive")
}

/// Uniform random unit vector in R³.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_qubit_observable<R: Rng + ?Sized>(rng: &mut R) -> DichotomicObservable {
    DichotomicObservable::qubit(random_bloch(rng)).expect("unit Bloch vector")
}

/// `U diag(±1) U†` with Haar `U` and independently uniform signs.
pub fn random_dichotomic<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DichotomicObservable {
    let signs: Vec<f64> = (0..d)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let u = haar_unitary(d, rng);
    let m = &(&u * &ComplexMatrix::from_diagonal(&signs)) * &u.adjoint();
    DichotomicObservable::new(m.hermitian_part()).expect("unitarily rotated signs")
}

/// Rank-1 measurement whose eigenstates are a Haar-rotated Bell basis.
pub fn random_rotated_bell<R: Rng + ?Sized>(rng: &mut R) -> FourOutcomeMeasurement {
    rotated_bell_measurement(&haar_unitary(4, rng)).expect("unitary rotation")
}

/// Product of two Haar-random qubit bases.
pub fn random_product_measurement<R: Rng + ?Sized>(rng: &mut R) -> FourOutcomeMeasurement {
    let ma = random_qubit_observable(rng);
    let mb = random_qubit_observable(rng);
    crate::measurements::product_measurement(&ma, &mb).expect("valid factors")
}

/// Four-outcome projective measurement on `d_a ⊗ d_b` (`d_a·d_b ≥ 4`): a Haar
/// basis split into four nonempty groups of columns.
pub fn random_four_outcome<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rng: &mut R,
) -> FourOutcomeMeasurement {
    let d = d_a * d_b;
    assert!(d >= 4, "need at least four basis vectors");
    let u = haar_unitary(d, rng);
    // first four columns seed the groups, the rest are assigned at random
    let mut groups: Vec<Vec<usize>> = (0..4).map(|k| vec![k]).collect();
    for col in 4..d {
        groups[rng.random_range(0..4)].push(col);
    }
    let projectors = projectors_from_groups(&groups, &u);
    FourOutcomeMeasurement::new(projectors, (d_a, d_b)).expect("orthonormal groups")
}

/// Random binning of a random four-outcome measurement.
pub fn random_binned<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> BinnedMeasurement {
    let base = random_four_outcome(d_a, d_b, rng);
    let mut bits =
        || -> [i8; 4] { std::array::from_fn(|_| if rng.random::<bool>() { 1 } else { -1 }) };
    let bit_for_a = bits();
    let bit_for_b = bits();
    BinnedMeasurement::new(base, bit_for_a, bit_for_b).expect("±1 bits")
}

fn projectors_from_groups(groups: &[Vec<usize>], u: &ComplexMatrix) -> [ComplexMatrix; 4] {
    std::array::from_fn(|k| {
        let cols: Vec<_> = groups[k]
            .iter()
            .map(|&j| u.inner().column(j).into_owned())
            .collect();
        ComplexMatrix::projector_onto(&DMatrix::from_columns(&cols))
    })
}
