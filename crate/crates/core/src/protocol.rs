//! The three-party swapping scenario and its exact statistics.
//!
//! Settings are zero-indexed: Alice `x ∈ {0, 1}` (A₁, A₂), Bob `y ∈ {0, 1}`
//! (B₁, B₂), Charlie `z ∈ {0, 1, 2}` (C₁, C₂, C₃). Binary outcomes are stored
//! with index 0 for `+1` and index 1 for `−1`; Charlie's outcomes use index
//! `k` for outcome `k + 1`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certification::{relabel, Relabeling};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, ZERO};
use crate::measurements::{
    bell_basis, bell_measurement, charlie_settings_ideal, perturbed_bell_measurement,
    BinnedMeasurement, DichotomicObservable, FourOutcomeMeasurement,
};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// Outcomes with probability below this are treated as never occurring.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;

/// Signs of the binary outcome indices.
pub const SIGNS: [f64; 2] = [1.0, -1.0];

/// Full description of the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    state: DensityMatrix,
    alice: [DichotomicObservable; 2],
    bob: [DichotomicObservable; 2],
    charlie12: [BinnedMeasurement; 2],
    charlie3: FourOutcomeMeasurement,
}

impl Scenario {
    /// `state` lives on `(A, B, C_A, C_B)`.
    pub fn new(
        state: DensityMatrix,
        alice: [DichotomicObservable; 2],
        bob: [DichotomicObservable; 2],
        charlie12: [BinnedMeasurement; 2],
        charlie3: FourOutcomeMeasurement,
    ) -> Result<Self> {
        let dims = state.dims();
        if dims.len() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "scenario state needs 4 subsystems (A, B, C_A, C_B), got dims {dims:?}"
            )));
        }
        for (k, a) in alice.iter().enumerate() {
            if a.dim() != dims[0] {
                return Err(Error::DimensionMismatch(format!(
                    "A{} acts on dimension {}, Alice holds {}",
                    k + 1,
                    a.dim(),
                    dims[0]
                )));
            }
        }
        for (k, b) in bob.iter().enumerate() {
            if b.dim() != dims[1] {
                return Err(Error::DimensionMismatch(format!(
                    "B{} acts on dimension {}, Bob holds {}",
                    k + 1,
                    b.dim(),
                    dims[1]
                )));
            }
        }
        let charlie_dims = (dims[2], dims[3]);
        for (k, m) in charlie12
            .iter()
            .map(|m| m.base())
            .chain([&charlie3])
            .enumerate()
        {
            if m.dims() != charlie_dims {
                return Err(Error::DimensionMismatch(format!(
                    "C{} acts on {:?}, Charlie holds {charlie_dims:?}",
                    k + 1,
                    m.dims()
                )));
            }
        }
        Ok(Self {
            state,
            alice,
            bob,
            charlie12,
            charlie3,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn alice(&self) -> &[DichotomicObservable; 2] {
        &self.alice
    }

    pub fn bob(&self) -> &[DichotomicObservable; 2] {
        &self.bob
    }

    pub fn charlie12(&self) -> &[BinnedMeasurement; 2] {
        &self.charlie12
    }

    pub fn charlie3(&self) -> &FourOutcomeMeasurement {
        &self.charlie3
    }

    /// `(d_A, d_B, d_CA, d_CB)`.
    pub fn dims(&self) -> [usize; 4] {
        let d = self.state.dims();
        [d[0], d[1], d[2], d[3]]
    }

    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        Self::new(
            state,
            self.alice.clone(),
            self.bob.clone(),
            self.charlie12.clone(),
            self.charlie3.clone(),
        )
    }

    pub fn with_charlie3(&self, charlie3: FourOutcomeMeasurement) -> Result<Self> {
        Self::new(
            self.state.clone(),
            self.alice.clone(),
            self.bob.clone(),
            self.charlie12.clone(),
            charlie3,
        )
    }

    pub fn with_observables(
        &self,
        alice: [DichotomicObservable; 2],
        bob: [DichotomicObservable; 2],
    ) -> Result<Self> {
        Self::new(
            self.state.clone(),
            alice,
            bob,
            self.charlie12.clone(),
            self.charlie3.clone(),
        )
    }

    fn charlie_projector(&self, z: usize, c: usize) -> &ComplexMatrix {
        match z {
            0 | 1 => self.charlie12[z].base().projector(c),
            _ => self.charlie3.projector(c),
        }
    }

    /// Unnormalized steered operator `Tr_C[(I ⊗ P) ρ]` on `A ⊗ B`.
    fn steer(&self, projector: &ComplexMatrix) -> ComplexMatrix {
        let [da, db, dca, dcb] = self.dims();
        let dab = da * db;
        let dc = dca * dcb;
        let rho = self.state.matrix().inner();
        let p = projector.inner();
        let mut out = DMatrix::from_element(dab, dab, ZERO);
        for r in 0..dab {
            for s in 0..dab {
                let mut acc = ZERO;
                for k in 0..dc {
                    for l in 0..dc {
                        acc += p[(l, k)] * rho[(r * dc + k, s * dc + l)];
                    }
                }
                out[(r, s)] = acc;
            }
        }
        ComplexMatrix::from(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    state: DensityMatrix,
    alice: [DichotomicObservable; 2],
    bob: [DichotomicObservable; 2],
    charlie12: [BinnedMeasurement; 2],
    charlie3: FourOutcomeMeasurement,
}

impl Serialize for Scenario {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScenarioRepr {
            state: self.state.clone(),
            alice: self.alice.clone(),
            bob: self.bob.clone(),
            charlie12: self.charlie12.clone(),
            charlie3: self.charlie3.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = ScenarioRepr::deserialize(deserializer)?;
        Scenario::new(r.state, r.alice, r.bob, r.charlie12, r.charlie3)
            .map_err(serde::de::Error::custom)
    }
}

/// `p(a, b, c | x, y, z)`, indexed `[a][b][c]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDistribution(pub [[[f64; 4]; 2]; 2]);

impl JointDistribution {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.0[a][b][c]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().flatten().flatten().sum()
    }

    pub fn p_a(&self, a: usize) -> f64 {
        self.0[a].iter().flatten().sum()
    }

    pub fn p_b(&self, b: usize) -> f64 {
        (0..2).map(|a| self.0[a][b].iter().sum::<f64>()).sum()
    }

    pub fn p_c(&self, c: usize) -> f64 {
        (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| self.0[a][b][c])
            .sum()
    }

    /// `Σ a·bits(c)·p(a, ·, c)`.
    pub fn correlator_a_with(&self, bits: &[i8; 4]) -> f64 {
        let mut e = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..4 {
                    e += SIGNS[a] * bits[c] as f64 * self.0[a][b][c];
                }
            }
        }
        e
    }

    /// `Σ b·bits(c)·p(·, b, c)`.
    pub fn correlator_b_with(&self, bits: &[i8; 4]) -> f64 {
        let mut e = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..4 {
                    e += SIGNS[b] * bits[c] as f64 * self.0[a][b][c];
                }
            }
        }
        e
    }

    /// `E_{xy|c}` by Bayes rule, `None` when `p(c)` is negligible.
    pub fn conditional_correlator(&self, c: usize) -> Option<f64> {
        let pc = self.p_c(c);
        if pc < NEGLIGIBLE_PROBABILITY {
            return None;
        }
        let mut e = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                e += SIGNS[a] * SIGNS[b] * self.0[a][b][c];
            }
        }
        Some(e / pc)
    }
}

fn check_settings(x: usize, y: usize, z: usize) -> Result<()> {
    if x > 1 || y > 1 || z > 2 {
        return Err(Error::OutOfRange(format!(
            "settings (x, y, z) = ({x}, {y}, {z}); expected x, y ∈ {{0, 1}}, z ∈ {{0, 1, 2}}"
        )));
    }
    Ok(())
}

/// Born-rule distribution `p(a,b,c) = Tr[(Π_a^x ⊗ Π_b^y ⊗ P_c^z) ρ]`.
pub fn joint_distribution(
    sc: &Scenario,
    x: usize,
    y: usize,
    z: usize,
) -> Result<JointDistribution> {
    check_settings(x, y, z)?;
    let pa = [sc.alice[x].projector(1), sc.alice[x].projector(-1)];
    let pb = [sc.bob[y].projector(1), sc.bob[y].projector(-1)];
    let mut p = [[[0.0; 4]; 2]; 2];
    for c in 0..4 {
        let steered = sc.steer(sc.charlie_projector(z, c));
        for a in 0..2 {
            for b in 0..2 {
                let op = pa[a].tensor(&pb[b]);
                p[a][b][c] = steered.trace_product(&op).re.max(0.0);
            }
        }
    }
    Ok(JointDistribution(p))
}

/// Which pair of parties a correlation table belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Context {
    #[serde(rename = "AC")]
    AliceCharlie,
    #[serde(rename = "BC")]
    BobCharlie,
    #[serde(rename = "AB|c")]
    AliceBobGiven(usize),
}

/// Correlators `E[x][y]` for one context.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub context: Context,
    pub e: [[f64; 2]; 2],
}

impl CorrelationRecord {
    /// `E₁₁ + E₁₂ + E₂₁ − E₂₂`.
    pub fn chsh(&self) -> f64 {
        chsh_version(&self.e, 0)
    }
}

/// Evaluates CHSH version `v` on a correlator table:
/// `v = 0: E₁₁+E₁₂+E₂₁−E₂₂`, `v = 1: E₁₁+E₁₂−E₂₁+E₂₂`, `v = 2: −(v=1)`, `v = 3: −(v=0)`.
pub fn chsh_version(e: &[[f64; 2]; 2], v: usize) -> f64 {
    let v1 = e[0][0] + e[0][1] + e[1][0] - e[1][1];
    let v2 = e[0][0] + e[0][1] - e[1][0] + e[1][1];
    match v {
        0 => v1,
        1 => v2,
        2 => -v2,
        3 => -v1,
        _ => panic!("CHSH version index {v} out of range"),
    }
}

/// Correlators between Alice's outcome and Charlie's `bit_for_A` under C₁, C₂.
pub fn correlators_ac(sc: &Scenario) -> Result<CorrelationRecord> {
    let mut e = [[0.0; 2]; 2];
    for x in 0..2 {
        for z in 0..2 {
            let dist = joint_distribution(sc, x, 0, z)?;
            e[x][z] = dist.correlator_a_with(sc.charlie12[z].bit_for_a());
        }
    }
    Ok(CorrelationRecord {
        context: Context::AliceCharlie,
        e,
    })
}

/// Correlators between Bob's outcome and Charlie's `bit_for_B` under C₁, C₂.
pub fn correlators_bc(sc: &Scenario) -> Result<CorrelationRecord> {
    let mut e = [[0.0; 2]; 2];
    for y in 0..2 {
        for z in 0..2 {
            let dist = joint_distribution(sc, 0, y, z)?;
            e[y][z] = dist.correlator_b_with(sc.charlie12[z].bit_for_b());
        }
    }
    Ok(CorrelationRecord {
        context: Context::BobCharlie,
        e,
    })
}

pub fn chsh_ac(sc: &Scenario) -> Result<f64> {
    Ok(correlators_ac(sc)?.chsh())
}

pub fn chsh_bc(sc: &Scenario) -> Result<f64> {
    Ok(correlators_bc(sc)?.chsh())
}

/// Alice–Bob CHSH values conditioned on each outcome of C₃.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalChsh {
    /// `versions[c][v]`: version `v` evaluated on the correlators given outcome `c`;
    /// `None` for outcomes that never occur.
    pub versions: [Option<[f64; 4]>; 4],
    pub outcome_probs: [f64; 4],
    /// Conditional correlator tables, `None` for outcomes that never occur.
    pub correlators: [Option<CorrelationRecord>; 4],
}

impl ConditionalChsh {
    /// Value of the version assigned to each outcome without relabeling.
    pub fn raw(&self) -> [Option<f64>; 4] {
        std::array::from_fn(|c| self.versions[c].map(|v| v[c]))
    }
}

pub fn conditional_chsh_ab(sc: &Scenario) -> Result<ConditionalChsh> {
    let mut dists = [[JointDistribution([[[0.0; 4]; 2]; 2]); 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            dists[x][y] = joint_distribution(sc, x, y, 2)?;
        }
    }
    let outcome_probs: [f64; 4] = std::array::from_fn(|c| dists[0][0].p_c(c));
    let mut versions = [None; 4];
    let mut correlators = [None; 4];
    for c in 0..4 {
        if outcome_probs[c] < NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let mut e = [[0.0; 2]; 2];
        let mut defined = true;
        for x in 0..2 {
            for y in 0..2 {
                match dists[x][y].conditional_correlator(c) {
                    Some(v) => e[x][y] = v,
                    None => defined = false,
                }
            }
        }
        if defined {
            versions[c] = Some(std::array::from_fn(|v| chsh_version(&e, v)));
            correlators[c] = Some(CorrelationRecord {
                context: Context::AliceBobGiven(c),
                e,
            });
        }
    }
    Ok(ConditionalChsh {
        versions,
        outcome_probs,
        correlators,
    })
}

/// Exact CHSH statistics of a scenario with relabeled conditional values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    #[serde(rename = "S_AC")]
    pub s_ac: f64,
    #[serde(rename = "S_BC")]
    pub s_bc: f64,
    /// Slot `c` holds the version-`c` value of the outcome assigned to it.
    #[serde(rename = "S_AB_given_c", deserialize_with = "four_optional")]
    pub s_ab_given_c: [Option<f64>; 4],
    pub outcome_probs: [f64; 4],
    /// `relabeling[c]` is the measured outcome assigned to slot `c`.
    #[serde(
        serialize_with = "serialize_one_based",
        deserialize_with = "deserialize_one_based"
    )]
    pub relabeling: [usize; 4],
}

fn four_optional<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<[Option<f64>; 4], D::Error> {
    let v: Vec<Option<f64>> = Vec::deserialize(d)?;
    let mut out = [None; 4];
    for (k, x) in v.into_iter().take(4).enumerate() {
        out[k] = x;
    }
    Ok(out)
}

fn serialize_one_based<S: Serializer>(
    p: &[usize; 4],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    p.map(|k| k + 1).serialize(s)
}

fn deserialize_one_based<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<[usize; 4], D::Error> {
    let p: [usize; 4] = Deserialize::deserialize(d)?;
    if p.iter().any(|&k| k == 0 || k > 4) {
        return Err(serde::de::Error::custom(
            "relabeling entries must be in 1..=4",
        ));
    }
    Ok(p.map(|k| k - 1))
}

impl ChshReport {
    /// Conditional values that are defined.
    pub fn defined_ab_values(&self) -> Vec<f64> {
        self.s_ab_given_c.iter().flatten().copied().collect()
    }

    /// All four conditional values, or an error naming the first missing one.
    pub fn complete_ab_values(&self) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (c, v) in self.s_ab_given_c.iter().enumerate() {
            out[c] = v.ok_or_else(|| {
                Error::Undefined(format!(
                    "conditional CHSH value for outcome {} is missing",
                    c + 1
                ))
            })?;
        }
        Ok(out)
    }
}

/// `S_AC`, `S_BC` and relabeled conditional values.
pub fn chsh_report(sc: &Scenario) -> Result<ChshReport> {
    let s_ac = chsh_ac(sc)?;
    let s_bc = chsh_bc(sc)?;
    let cond = conditional_chsh_ab(sc)?;
    let Relabeling {
        permutation,
        values,
    } = relabel(&cond.versions);
    Ok(ChshReport {
        s_ac,
        s_bc,
        s_ab_given_c: values,
        outcome_probs: cond.outcome_probs,
        relabeling: permutation,
    })
}

/// Normalized state of `A ⊗ B` conditioned on one outcome of C₃.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeredState {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Steered states for every outcome of C₃ that occurs.
pub fn steered_states(sc: &Scenario) -> Result<Vec<SteeredState>> {
    let [da, db, _, _] = sc.dims();
    let mut out = Vec::new();
    for c in 0..4 {
        let unnorm = sc.steer(sc.charlie3.projector(c));
        let p = unnorm.trace().re;
        if p < NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let state = DensityMatrix::new(unnorm.scale(1.0 / p).hermitian_part(), vec![da, db], 1e-8)?;
        out.push(SteeredState {
            outcome: c,
            probability: p,
            state,
        });
    }
    Ok(out)
}

/// `v·|Φ⁺⟩⟨Φ⁺| + (1−v)·I/4`.
pub fn werner_state(v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!(
            "Werner visibility {v} not in [0, 1]"
        )));
    }
    let phi = bell_basis()[0].density();
    phi.mix(&DensityMatrix::maximally_mixed(vec![2, 2]), v)
}

/// `ρ_{A C_A} ⊗ ρ_{B C_B}` reordered to `(A, B, C_A, C_B)`.
pub fn swapping_state(rho_ac: &DensityMatrix, rho_bc: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_ac.dims().len() != 2 || rho_bc.dims().len() != 2 {
        return Err(Error::DimensionMismatch(
            "source states must be bipartite".into(),
        ));
    }
    rho_ac.tensor(rho_bc).permute(&[0, 2, 1, 3])
}

fn ideal_observables() -> ([DichotomicObservable; 2], [DichotomicObservable; 2]) {
    let q = |n| DichotomicObservable::qubit(n).expect("unit Bloch vector");
    (
        [q([0.0, 0.0, 1.0]), q([1.0, 0.0, 0.0])],
        [
            q([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]),
            q([-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]),
        ],
    )
}

/// Alice's `(Z, X)` and Bob's `((Z+X)/√2, (Z−X)/√2)`.
pub fn ideal_ab_settings() -> ([DichotomicObservable; 2], [DichotomicObservable; 2]) {
    ideal_observables()
}

/// Four-qubit construction reaching `2√2` on every test.
pub fn ideal_scenario() -> Scenario {
    let phi = bell_basis()[0].density();
    let state = swapping_state(&phi, &phi).expect("two-qubit sources");
    let (alice, bob) = ideal_observables();
    let (c1, c2) = charlie_settings_ideal();
    Scenario::new(state, alice, bob, [c1, c2], bell_measurement()).expect("consistent dims")
}

/// Ideal scenario with Werner sources of visibility `v_ac`, `v_bc` and C₃
/// rotated by `theta` in the `{Φ⁺, Ψ⁻}` plane.
pub fn noisy_scenario(v_ac: f64, v_bc: f64, theta: f64) -> Result<Scenario> {
    if !theta.is_finite() {
        return Err(Error::OutOfRange(format!("rotation angle {theta}")));
    }
    let state = swapping_state(&werner_state(v_ac)?, &werner_state(v_bc)?)?;
    let (alice, bob) = ideal_observables();
    let (c1, c2) = charlie_settings_ideal();
    Scenario::new(
        state,
        alice,
        bob,
        [c1, c2],
        perturbed_bell_measurement(theta, 0)?,
    )
}
