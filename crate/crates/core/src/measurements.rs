//! Measurement objects: ±1 observables, four-outcome projective measurements,
//! the Bell basis and its perturbed, rotated and product variants.
//!
//! Outcome arrays are zero-indexed: index `k` holds outcome `k + 1`, so the
//! Bell basis is `[Φ⁺, Φ⁻, Ψ⁺, Ψ⁻]`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, re, schmidt_rank, tensor, ComplexMatrix, DensityMatrix, PureState, DEFAULT_TOL,
    ZERO,
};

/// Hermitian operator squaring to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomicObservable(ComplexMatrix);

impl DichotomicObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotDichotomic(format!(
                "non-square {}x{} matrix",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotDichotomic(format!("Hermiticity defect {herm:e}")));
        }
        let sq = (&matrix * &matrix).max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if sq > tol {
            return Err(Error::NotDichotomic(format!("‖M² − I‖_max = {sq:e}")));
        }
        Ok(Self(matrix))
    }

    /// `n·(X, Y, Z)` for a unit Bloch vector `n`.
    pub fn qubit(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let [nx, ny, nz] = bloch;
        let m = &(&ComplexMatrix::pauli_x().scale(nx) + &ComplexMatrix::pauli_y().scale(ny))
            + &ComplexMatrix::pauli_z().scale(nz);
        Self::new(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(ComplexMatrix::identity(d))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// Projector `(I + s·M)/2` onto the eigenspace with eigenvalue `sign`.
    pub fn projector(&self, sign: i8) -> ComplexMatrix {
        let s = if sign >= 0 { 1.0 } else { -1.0 };
        (&ComplexMatrix::identity(self.dim()) + &self.0.scale(s)).scale(0.5)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.scale(-1.0))
    }

    /// `U M U†`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new((&(u * &self.0) * &u.adjoint()).hermitian_part())
    }
}

/// `n·(X, Y, Z)` for a unit Bloch vector.
pub fn qubit_observable(bloch: [f64; 3]) -> Result<DichotomicObservable> {
    DichotomicObservable::qubit(bloch)
}

impl Serialize for DichotomicObservable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DichotomicObservable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        DichotomicObservable::new(m).map_err(D::Error::custom)
    }
}

/// Four orthogonal projectors summing to the identity on `d_a ⊗ d_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourOutcomeMeasurement {
    projectors: [ComplexMatrix; 4],
    dims: (usize, usize),
}

impl FourOutcomeMeasurement {
    pub fn new(projectors: [ComplexMatrix; 4], dims: (usize, usize)) -> Result<Self> {
        let m = Self { projectors, dims };
        m.validate(DEFAULT_TOL)?;
        Ok(m)
    }

    /// Rank-1 measurement from four orthonormal vectors.
    pub fn from_basis(
        vectors: &[DVector<num_complex::Complex64>; 4],
        dims: (usize, usize),
    ) -> Result<Self> {
        let projectors = std::array::from_fn(|k| ComplexMatrix::outer(&vectors[k], &vectors[k]));
        Self::new(projectors, dims)
    }

    /// Checks idempotence, Hermiticity, mutual orthogonality and completeness.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.dims.0 * self.dims.1;
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, p) in self.projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {} is {}x{}, expected {d}x{d}",
                    k + 1,
                    p.rows(),
                    p.cols()
                )));
            }
            let herm = p.hermiticity_defect();
            if herm > tol {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {} not Hermitian ({herm:e})",
                    k + 1
                )));
            }
            let idem = (p * p).max_abs_diff(p);
            if idem > tol {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {} not idempotent ({idem:e})",
                    k + 1
                )));
            }
            for (j, q) in self.projectors.iter().enumerate().skip(k + 1) {
                let overlap = (p * q).max_abs();
                if overlap > tol {
                    return Err(Error::InvalidMeasurement(format!(
                        "projectors {} and {} not orthogonal ({overlap:e})",
                        k + 1,
                        j + 1
                    )));
                }
            }
            sum = &sum + p;
        }
        let complete = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if complete > tol {
            return Err(Error::InvalidMeasurement(format!(
                "projectors do not sum to identity ({complete:e})"
            )));
        }
        Ok(())
    }

    pub fn projectors(&self) -> &[ComplexMatrix; 4] {
        &self.projectors
    }

    pub fn projector(&self, outcome: usize) -> &ComplexMatrix {
        &self.projectors[outcome]
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn rank(&self, outcome: usize) -> usize {
        self.projectors[outcome].trace().re.round() as usize
    }

    /// Eigenstate `|e_c⟩` of a rank-1 projector (phase fixed by the eigensolver).
    pub fn eigenstate(&self, outcome: usize) -> Result<PureState> {
        let rank = self.rank(outcome);
        if rank != 1 {
            return Err(Error::InvalidMeasurement(format!(
                "outcome {} has rank {rank}, eigenstate undefined",
                outcome + 1
            )));
        }
        let (_, v) = eig_hermitian(&self.projectors[outcome])?.top();
        PureState::new(v, vec![self.dims.0, self.dims.1])
    }

    /// Measurement whose outcome `k` is this measurement's outcome `perm[k]`.
    pub fn relabeled(&self, perm: &[usize; 4]) -> Self {
        Self {
            projectors: std::array::from_fn(|k| self.projectors[perm[k]].clone()),
            dims: self.dims,
        }
    }

    /// Whether every projector factorizes as `P_A ⊗ P_B`.
    pub fn is_separable(&self, tol: f64) -> bool {
        let (da, db) = self.dims;
        self.projectors.iter().all(|p| {
            let tr = p.trace().re;
            if tr < 0.5 {
                return true;
            }
            let dm = match DensityMatrix::from_unnormalized(p.clone(), vec![da, db]) {
                Ok(dm) => dm,
                Err(_) => return false,
            };
            let (Ok(a), Ok(b)) = (dm.partial_trace(&[0]), dm.partial_trace(&[1])) else {
                return false;
            };
            tensor(a.matrix(), b.matrix()).scale(tr).max_abs_diff(p) <= tol
        })
    }

    /// Whether every rank-1 eigenstate has Schmidt rank 1.
    pub fn has_product_eigenstates(&self, tol: f64) -> Result<bool> {
        for k in 0..4 {
            let e = self.eigenstate(k)?;
            if schmidt_rank(e.vector(), self.dims.0, self.dims.1, tol)? != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Serialize, Deserialize)]
struct FourOutcomeRepr {
    dims: [usize; 2],
    projectors: Vec<ComplexMatrix>,
}

impl Serialize for FourOutcomeMeasurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FourOutcomeRepr {
            dims: [self.dims.0, self.dims.1],
            projectors: self.projectors.to_vec(),
        }
        .serialize(serializer)
    }
}

fn four_projectors(v: Vec<ComplexMatrix>) -> Result<[ComplexMatrix; 4]> {
    let n = v.len();
    v.try_into()
        .map_err(|_| Error::InvalidMeasurement(format!("expected 4 projectors, got {n}")))
}

impl<'de> Deserialize<'de> for FourOutcomeMeasurement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = FourOutcomeRepr::deserialize(deserializer)?;
        let projectors = four_projectors(r.projectors).map_err(D::Error::custom)?;
        FourOutcomeMeasurement::new(projectors, (r.dims[0], r.dims[1])).map_err(D::Error::custom)
    }
}

/// Four-outcome measurement whose outcomes are mapped to one bit for Alice
/// and one bit for Bob.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedMeasurement {
    base: FourOutcomeMeasurement,
    bit_for_a: [i8; 4],
    bit_for_b: [i8; 4],
}

impl BinnedMeasurement {
    pub fn new(
        base: FourOutcomeMeasurement,
        bit_for_a: [i8; 4],
        bit_for_b: [i8; 4],
    ) -> Result<Self> {
        if bit_for_a
            .iter()
            .chain(&bit_for_b)
            .any(|&b| b != 1 && b != -1)
        {
            return Err(Error::InvalidMeasurement(format!(
                "bit maps must be ±1, got {bit_for_a:?} / {bit_for_b:?}"
            )));
        }
        Ok(Self {
            base,
            bit_for_a,
            bit_for_b,
        })
    }

    pub fn base(&self) -> &FourOutcomeMeasurement {
        &self.base
    }

    pub fn bit_for_a(&self) -> &[i8; 4] {
        &self.bit_for_a
    }

    pub fn bit_for_b(&self) -> &[i8; 4] {
        &self.bit_for_b
    }

    fn marginal(&self, bits: &[i8; 4]) -> ComplexMatrix {
        let d = self.base.dim();
        self.base
            .projectors
            .iter()
            .zip(bits)
            .fold(ComplexMatrix::zeros(d, d), |acc, (p, &b)| {
                &acc + &p.scale(b as f64)
            })
    }

    /// `Σ_c bit_for_A(c)·P_c`.
    pub fn marginal_observable_a(&self) -> ComplexMatrix {
        self.marginal(&self.bit_for_a)
    }

    /// `Σ_c bit_for_B(c)·P_c`.
    pub fn marginal_observable_b(&self) -> ComplexMatrix {
        self.marginal(&self.bit_for_b)
    }
}

#[derive(Serialize, Deserialize)]
struct BinnedRepr {
    dims: [usize; 2],
    projectors: Vec<ComplexMatrix>,
    #[serde(rename = "bit_for_A")]
    bit_for_a: [i8; 4],
    #[serde(rename = "bit_for_B")]
    bit_for_b: [i8; 4],
}

impl Serialize for BinnedMeasurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BinnedRepr {
            dims: [self.base.dims.0, self.base.dims.1],
            projectors: self.base.projectors.to_vec(),
            bit_for_a: self.bit_for_a,
            bit_for_b: self.bit_for_b,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinnedMeasurement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = BinnedRepr::deserialize(deserializer)?;
        let projectors = four_projectors(r.projectors).map_err(D::Error::custom)?;
        let base = FourOutcomeMeasurement::new(projectors, (r.dims[0], r.dims[1]))
            .map_err(D::Error::custom)?;
        BinnedMeasurement::new(base, r.bit_for_a, r.bit_for_b).map_err(D::Error::custom)
    }
}

/// `[Φ⁺, Φ⁻, Ψ⁺, Ψ⁻]`.
pub fn bell_basis() -> [PureState; 4] {
    let h = re(FRAC_1_SQRT_2);
    let amps = [
        [h, ZERO, ZERO, h],
        [h, ZERO, ZERO, -h],
        [ZERO, h, h, ZERO],
        [ZERO, h, -h, ZERO],
    ];
    amps.map(|a| PureState::from_amplitudes(&a, vec![2, 2]).expect("normalized Bell state"))
}

pub fn bell_measurement() -> FourOutcomeMeasurement {
    let basis = bell_basis().map(|s| s.vector().clone());
    FourOutcomeMeasurement::from_basis(&basis, (2, 2)).expect("Bell basis is orthonormal")
}

/// Bell measurement with the plane `{Φ_c, Φ_{5−c}}` rotated by `theta`.
///
/// `pair` selects the plane: 0 for `{Φ⁺, Ψ⁻}`, 1 for `{Φ⁻, Ψ⁺}`.
pub fn perturbed_bell_measurement(theta: f64, pair: usize) -> Result<FourOutcomeMeasurement> {
    if pair > 1 {
        return Err(Error::OutOfRange(format!(
            "rotation plane {pair}, expected 0 or 1"
        )));
    }
    let bell = bell_basis().map(|s| s.vector().clone());
    let partner = 3 - pair;
    let (s, c) = theta.sin_cos();
    let mut basis = bell.clone();
    basis[pair] = &bell[pair] * re(c) + &bell[partner] * re(s);
    basis[partner] = &bell[pair] * re(-s) + &bell[partner] * re(c);
    FourOutcomeMeasurement::from_basis(&basis, (2, 2))
}

/// Rank-1 measurement with eigenstates `U|Φ_c⟩`.
pub fn rotated_bell_measurement(u: &ComplexMatrix) -> Result<FourOutcomeMeasurement> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch("rotation must be 4x4".into()));
    }
    let basis = bell_basis().map(|s| u.mul_vec(s.vector()));
    FourOutcomeMeasurement::from_basis(&basis, (2, 2))
}

/// Product measurement `P_a ⊗ Q_b` with outcome index `2a + b`, where index 0
/// of each factor is its +1 eigenspace.
pub fn product_measurement(
    ma: &DichotomicObservable,
    mb: &DichotomicObservable,
) -> Result<FourOutcomeMeasurement> {
    let pa = [ma.projector(1), ma.projector(-1)];
    let pb = [mb.projector(1), mb.projector(-1)];
    let projectors = std::array::from_fn(|k| tensor(&pa[k / 2], &pb[k % 2]));
    FourOutcomeMeasurement::new(projectors, (ma.dim(), mb.dim()))
}

/// Joint eigenbasis of `o1 ⊗ o2`, binned so that Alice's bit is the sign of
/// the first factor and Bob's bit the sign of the second.
pub fn joint_sign_measurement(
    o1: &DichotomicObservable,
    o2: &DichotomicObservable,
) -> Result<BinnedMeasurement> {
    let base = product_measurement(o1, o2)?;
    BinnedMeasurement::new(base, [1, 1, -1, -1], [1, -1, 1, -1])
}

/// Charlie's CHSH settings `C₁ = (Z+X)/√2 ⊗ Z` and `C₂ = (Z−X)/√2 ⊗ X`.
pub fn charlie_settings_ideal() -> (BinnedMeasurement, BinnedMeasurement) {
    let z = DichotomicObservable::qubit([0.0, 0.0, 1.0]).expect("Z");
    let x = DichotomicObservable::qubit([1.0, 0.0, 0.0]).expect("X");
    let zpx = DichotomicObservable::qubit([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).expect("(Z+X)/√2");
    let zmx = DichotomicObservable::qubit([-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).expect("(Z−X)/√2");
    (
        joint_sign_measurement(&zpx, &z).expect("qubit factors"),
        joint_sign_measurement(&zmx, &x).expect("qubit factors"),
    )
}
