//! Decision criteria, outcome relabeling, trace distance to the Bell
//! measurement and the two-sided distance bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{overlap_sq, ComplexMatrix};
use crate::measurements::{bell_basis, DichotomicObservable, FourOutcomeMeasurement};
use crate::protocol::TSIRELSON;

/// Classical CHSH bound.
pub const LOCAL_BOUND: f64 = 2.0;

/// Separable bound under maximal Alice–Charlie and Bob–Charlie violation.
pub const SEPARABLE_BOUND: f64 = std::f64::consts::SQRT_2;

/// Conditional values per slot; `None` marks an outcome that never occurred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalValues(pub [Option<f64>; 4]);

impl From<[f64; 4]> for ConditionalValues {
    fn from(v: [f64; 4]) -> Self {
        Self(v.map(Some))
    }
}

impl From<[Option<f64>; 4]> for ConditionalValues {
    fn from(v: [Option<f64>; 4]) -> Self {
        Self(v)
    }
}

impl ConditionalValues {
    fn defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.map(|v| (c, v)))
    }

    fn max(&self) -> Option<f64> {
        self.defined().map(|(_, v)| v).reduce(f64::max)
    }
}

/// Outcome-to-version assignment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relabeling {
    /// `permutation[c]` is the measured outcome assigned to version `c`.
    pub permutation: [usize; 4],
    /// Version-`c` value of the assigned outcome, `None` if that outcome never occurred.
    pub values: [Option<f64>; 4],
}

/// All permutations of four items in lexicographic order.
fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

/// Assigns outcomes to CHSH versions so that the total assigned value is
/// maximal, by exhaustive search over all 24 bijections.
///
/// `versions[o][v]` is version `v` evaluated on outcome `o`'s conditional
/// correlators. Outcomes that never occurred contribute nothing and leave
/// their slot undefined. Ties go to the lexicographically smallest permutation.
pub fn relabel(versions: &[Option<[f64; 4]>; 4]) -> Relabeling {
    let score = |perm: &[usize; 4]| -> f64 {
        (0..4)
            .filter_map(|slot| versions[perm[slot]].map(|v| v[slot]))
            .sum()
    };
    let mut best = [0, 1, 2, 3];
    let mut best_score = f64::NEG_INFINITY;
    for perm in permutations4() {
        let s = score(&perm);
        if s > best_score + 1e-12 * (1.0 + best_score.abs()) || best_score == f64::NEG_INFINITY {
            best = perm;
            best_score = s;
        }
    }
    Relabeling {
        permutation: best,
        values: std::array::from_fn(|slot| versions[best[slot]].map(|v| v[slot])),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// One maximal violation with Charlie plus a conditional violation above 2.
    Crit1,
    /// Both maximal violations plus a conditional violation above √2.
    Crit2,
}

/// Which conditions held.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "S_AC_hit")]
    pub s_ac_hit: bool,
    #[serde(rename = "S_BC_hit")]
    pub s_bc_hit: bool,
    /// `|S_AC − 2√2|`.
    #[serde(rename = "S_AC_deviation")]
    pub s_ac_deviation: f64,
    #[serde(rename = "S_BC_deviation")]
    pub s_bc_deviation: f64,
    /// Bound the conditional values must exceed.
    pub threshold: f64,
    /// Slots (1-based) whose value exceeds `threshold`.
    pub violating_outcomes: Vec<usize>,
    /// `max_c S_AB|c − threshold`, `None` if no value is defined.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: Criterion,
    pub passed: bool,
    pub witness: Witness,
    pub tol: f64,
}

fn witness(s_ac: f64, s_bc: f64, values: &ConditionalValues, threshold: f64, tol: f64) -> Witness {
    let s_ac_deviation = (s_ac - TSIRELSON).abs();
    let s_bc_deviation = (s_bc - TSIRELSON).abs();
    Witness {
        s_ac_hit: s_ac_deviation <= tol,
        s_bc_hit: s_bc_deviation <= tol,
        s_ac_deviation,
        s_bc_deviation,
        threshold,
        violating_outcomes: values
            .defined()
            .filter(|&(_, v)| v > threshold)
            .map(|(c, _)| c + 1)
            .collect(),
        margin: values.max().map(|m| m - threshold),
    }
}

/// `(S_AC = 2√2 or S_BC = 2√2) and max_c S_AB|c > 2`, equalities within `tol`.
pub fn certify_crit1(
    s_ac: f64,
    s_bc: f64,
    values: impl Into<ConditionalValues>,
    tol: f64,
) -> Verdict {
    let values = values.into();
    let w = witness(s_ac, s_bc, &values, LOCAL_BOUND, tol);
    let passed = (w.s_ac_hit || w.s_bc_hit) && w.margin.is_some_and(|m| m > 0.0);
    Verdict {
        criterion: Criterion::Crit1,
        passed,
        witness: w,
        tol,
    }
}

/// `S_AC = 2√2 and S_BC = 2√2 and max_c S_AB|c > √2`, equalities within `tol`.
pub fn certify_crit2(
    s_ac: f64,
    s_bc: f64,
    values: impl Into<ConditionalValues>,
    tol: f64,
) -> Verdict {
    let values = values.into();
    let w = witness(s_ac, s_bc, &values, SEPARABLE_BOUND, tol);
    let passed = w.s_ac_hit && w.s_bc_hit && w.margin.is_some_and(|m| m > 0.0);
    Verdict {
        criterion: Criterion::Crit2,
        passed,
        witness: w,
        tol,
    }
}

/// `max_c √(1 − |⟨e_c|Φ_c⟩|²)` with `e_c` the eigenstate of outcome
/// `relabeling[c]`.
pub fn trace_distance(meas: &FourOutcomeMeasurement, relabeling: &[usize; 4]) -> Result<f64> {
    check_two_qubit(meas)?;
    let bell = bell_basis();
    let mut t: f64 = 0.0;
    for (c, phi) in bell.iter().enumerate() {
        let e = meas.eigenstate(relabeling[c])?;
        let o = overlap_sq(&e, phi)?;
        t = t.max((1.0 - o).max(0.0).sqrt());
    }
    Ok(t)
}

fn check_two_qubit(meas: &FourOutcomeMeasurement) -> Result<()> {
    if meas.dims() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "expected a measurement on 2⊗2, got {:?}",
            meas.dims()
        )));
    }
    Ok(())
}

/// `versions[o][v] = 2√2(|⟨e_o|Φ_v⟩|² − |⟨e_o|Φ_{5−v}⟩|²)` for a rank-1 measurement.
pub fn overlap_versions(meas: &FourOutcomeMeasurement) -> Result<[[f64; 4]; 4]> {
    check_two_qubit(meas)?;
    let bell = bell_basis();
    let mut out = [[0.0; 4]; 4];
    for (o, row) in out.iter_mut().enumerate() {
        let e = meas.eigenstate(o)?;
        let overlaps: Vec<f64> = bell
            .iter()
            .map(|phi| overlap_sq(&e, phi))
            .collect::<Result<_>>()?;
        for (v, val) in row.iter_mut().enumerate() {
            *val = TSIRELSON * (overlaps[v] - overlaps[3 - v]);
        }
    }
    Ok(out)
}

/// Conditional CHSH values predicted from eigenstate overlaps on the ideal
/// sources and settings, without relabeling.
pub fn overlap_chsh(meas: &FourOutcomeMeasurement) -> Result<[f64; 4]> {
    let v = overlap_versions(meas)?;
    Ok(std::array::from_fn(|c| v[c][c]))
}

/// Relabeling of a rank-1 measurement computed from its overlap prediction.
pub fn measurement_relabeling(meas: &FourOutcomeMeasurement) -> Result<Relabeling> {
    let v = overlap_versions(meas)?;
    Ok(relabel(&v.map(Some)))
}

/// Bounds on the trace distance implied by the conditional CHSH values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds at the default tolerance for values above `2√2`.
pub fn distance_bounds(values: impl Into<ConditionalValues>) -> Result<DistanceBounds> {
    distance_bounds_with_tol(values, crate::linalg::DEFAULT_TOL)
}

/// `lower = √(½(1 − max_c S/2√2))`, `upper = √(1 − min_c S/2√2)`.
///
/// Values up to `tol` above `2√2` are clamped; larger ones are rejected, as are
/// undefined values.
pub fn distance_bounds_with_tol(
    values: impl Into<ConditionalValues>,
    tol: f64,
) -> Result<DistanceBounds> {
    let values = values.into();
    let mut clamped = [0.0; 4];
    for (c, v) in values.0.iter().enumerate() {
        let v = v.ok_or_else(|| {
            Error::Undefined(format!(
                "conditional CHSH value for outcome {} is undefined",
                c + 1
            ))
        })?;
        if !v.is_finite() || v > TSIRELSON + tol {
            return Err(Error::OutOfRange(format!(
                "conditional CHSH value {v} for outcome {} exceeds 2√2",
                c + 1
            )));
        }
        clamped[c] = v.min(TSIRELSON);
    }
    let max = clamped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = clamped.iter().copied().fold(f64::INFINITY, f64::min);
    let lower = (0.5 * (1.0 - max / TSIRELSON)).max(0.0).sqrt();
    let upper = (1.0 - min / TSIRELSON).max(0.0).sqrt().min(1.0);
    Ok(DistanceBounds {
        lower: lower.min(upper),
        upper,
    })
}

/// Smallest common conditional value whose upper bound is at most `t_target`:
/// `2√2·(1 − t²)`.
pub fn threshold_for_distance(t_target: f64) -> Result<f64> {
    if !(t_target > 0.0 && t_target <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "target distance {t_target} not in (0, 1]"
        )));
    }
    Ok(TSIRELSON * (1.0 - t_target * t_target))
}

/// One row of the bounds curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "S")]
    pub s: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds with all four conditional values equal to `s`.
pub fn curve_point(s: f64) -> Result<CurvePoint> {
    let b = distance_bounds([s; 4])?;
    Ok(CurvePoint {
        s,
        lower: b.lower,
        upper: b.upper,
    })
}

/// `steps` evenly spaced rows from `s_min` to `s_max` inclusive, plus any
/// `extra` points, sorted by `S`.
pub fn bounds_curve(
    s_min: f64,
    s_max: f64,
    steps: usize,
    extra: &[f64],
) -> Result<Vec<CurvePoint>> {
    if !(0.0 <= s_min && s_min <= s_max && s_max <= TSIRELSON) {
        return Err(Error::OutOfRange(format!(
            "curve range [{s_min}, {s_max}] must satisfy 0 ≤ s_min ≤ s_max ≤ 2√2"
        )));
    }
    if steps == 0 {
        return Err(Error::OutOfRange("curve needs at least one step".into()));
    }
    let mut points: Vec<f64> = if steps == 1 {
        vec![s_min]
    } else {
        (0..steps)
            .map(|k| s_min + (s_max - s_min) * k as f64 / (steps - 1) as f64)
            .collect()
    };
    for &s in extra {
        if !(0.0..=TSIRELSON).contains(&s) {
            return Err(Error::OutOfRange(format!(
                "curve point {s} outside [0, 2√2]"
            )));
        }
        points.push(s);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points.into_iter().map(curve_point).collect()
}

/// Signs `σ_v(x, y)` of the four CHSH versions.
pub fn version_signs(v: usize) -> [[f64; 2]; 2] {
    match v {
        0 => [[1.0, 1.0], [1.0, -1.0]],
        1 => [[1.0, 1.0], [-1.0, 1.0]],
        2 => [[-1.0, -1.0], [1.0, -1.0]],
        3 => [[-1.0, -1.0], [-1.0, 1.0]],
        _ => panic!("CHSH version index {v} out of range"),
    }
}

/// `Σ_xy σ_v(x,y) A_x ⊗ B_y`.
pub fn version_operator(
    alice: &[DichotomicObservable; 2],
    bob: &[DichotomicObservable; 2],
    v: usize,
) -> ComplexMatrix {
    let signs = version_signs(v);
    let (da, db) = (alice[0].dim(), bob[0].dim());
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for x in 0..2 {
        for y in 0..2 {
            out = &out + &alice[x].matrix().tensor(bob[y].matrix()).scale(signs[x][y]);
        }
    }
    out
}

/// `2√2(|Φ_c⟩⟨Φ_c| − |Φ_{5−c}⟩⟨Φ_{5−c}|)`.
pub fn bell_projector_difference(c: usize) -> ComplexMatrix {
    let bell = bell_basis();
    (&bell[c].projector() - &bell[3 - c].projector()).scale(TSIRELSON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{bell_measurement, perturbed_bell_measurement};
    use crate::protocol::{chsh_report, ideal_ab_settings, ideal_scenario, noisy_scenario};
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    const S: f64 = TSIRELSON;

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations4();
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], [0, 1, 2, 3]);
        assert_eq!(p[1], [0, 1, 3, 2]);
        assert_eq!(p[23], [3, 2, 1, 0]);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn relabel_ideal_is_identity() {
        let r = chsh_report(&ideal_scenario()).unwrap();
        assert_eq!(r.relabeling, [0, 1, 2, 3]);
        for v in r.s_ab_given_c {
            assert!((v.unwrap() - S).abs() < 1e-9);
        }
    }

    #[test]
    fn relabel_swapped_outcomes() {
        let ideal = bell_measurement();
        let swapped = ideal.relabeled(&[3, 1, 2, 0]);
        let sc = ideal_scenario().with_charlie3(swapped).unwrap();
        let r = chsh_report(&sc).unwrap();
        assert_eq!(r.relabeling, [3, 1, 2, 0]);
        for v in r.s_ab_given_c {
            assert!((v.unwrap() - S).abs() < 1e-9);
        }
    }

    #[test]
    fn relabel_all_zero_tie_break() {
        let r = relabel(&[Some([0.0; 4]); 4]);
        assert_eq!(r.permutation, [0, 1, 2, 3]);
        assert_eq!(r.values, [Some(0.0); 4]);
    }

    #[test]
    fn relabel_partial() {
        let versions = [Some([S, 0.0, 0.0, -S]), None, None, None];
        let r = relabel(&versions);
        assert_eq!(r.permutation[0], 0);
        assert_eq!(r.values[0], Some(S));
        assert!(r.values[1..].iter().all(Option::is_none));
    }

    #[test]
    fn crit1_examples() {
        assert!(certify_crit1(S, S, [S; 4], 1e-9).passed);
        assert!(!certify_crit1(S, S, [SQRT_2; 4], 1e-9).passed);
        assert!(!certify_crit1(2.5, 2.5, [S; 4], 1e-9).passed);
        // one side suffices
        assert!(certify_crit1(2.5, S, [2.1, 0.0, 0.0, 0.0], 1e-9).passed);
    }

    #[test]
    fn crit2_examples() {
        let v = certify_crit2(S, S, [1.5; 4], 1e-9);
        assert!(v.passed);
        assert!(v.witness.margin.unwrap() > 0.0);
        assert_eq!(v.witness.violating_outcomes, vec![1, 2, 3, 4]);
        assert!(!certify_crit2(S, S, [1.4; 4], 1e-9).passed);
        assert!(!certify_crit2(2.5, S, [S; 4], 1e-9).passed);
    }

    #[test]
    fn crit_with_undefined_values() {
        let vals = [Some(2.5), None, None, None];
        assert!(certify_crit1(S, S, vals, 1e-9).passed);
        let none: [Option<f64>; 4] = [None; 4];
        let v = certify_crit1(S, S, none, 1e-9);
        assert!(!v.passed);
        assert_eq!(v.witness.margin, None);
    }

    #[test]
    fn trace_distance_examples() {
        let id = [0, 1, 2, 3];
        assert!(trace_distance(&bell_measurement(), &id).unwrap() < 1e-12);
        let m = perturbed_bell_measurement(PI / 12.0, 0).unwrap();
        let t = trace_distance(&m, &id).unwrap();
        assert!((t - (PI / 12.0).sin()).abs() < 1e-12);
        assert!((t - 0.2588).abs() < 1e-4);
        let quarter = perturbed_bell_measurement(FRAC_PI_2, 0).unwrap();
        let r = measurement_relabeling(&quarter).unwrap();
        assert_eq!(r.permutation, [3, 1, 2, 0]);
        assert!(trace_distance(&quarter, &r.permutation).unwrap() < 1e-7);
    }

    #[test]
    fn trace_distance_rejects_higher_rank() {
        let z = DichotomicObservable::qubit([0.0, 0.0, 1.0]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let p = [z.projector(1), z.projector(-1)];
        let zero = ComplexMatrix::zeros(4, 4);
        let m = FourOutcomeMeasurement::new(
            [p[0].tensor(&i2), p[1].tensor(&i2), zero.clone(), zero],
            (2, 2),
        )
        .unwrap();
        assert!(trace_distance(&m, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn distance_bound_examples() {
        let b = distance_bounds([S; 4]).unwrap();
        assert!(b.lower.abs() < 1e-12 && b.upper.abs() < 1e-12);
        // 2.8214 is the threshold rounded up, so its bound sits just under 5%
        let b = distance_bounds([2.8214; 4]).unwrap();
        assert!(b.upper < 0.05 && b.upper > 0.0498);
        let b = distance_bounds([threshold_for_distance(0.05).unwrap(); 4]).unwrap();
        assert!((b.upper - 0.05).abs() < 1e-12);

        let theta = PI / 12.0;
        let m = perturbed_bell_measurement(theta, 0).unwrap();
        let values = overlap_chsh(&m).unwrap();
        let b = distance_bounds(values).unwrap();
        assert!(b.lower.abs() < 1e-12);
        assert!((b.upper - (1.0 - (PI / 6.0).cos()).sqrt()).abs() < 1e-12);
        assert!((b.upper - 0.3660).abs() < 1e-4);
        let t = trace_distance(&m, &[0, 1, 2, 3]).unwrap();
        assert!(b.lower <= t && t <= b.upper);
    }

    #[test]
    fn distance_bounds_errors() {
        assert!(matches!(
            distance_bounds([Some(S), None, Some(S), Some(S)]),
            Err(Error::Undefined(_))
        ));
        assert!(distance_bounds([3.0; 4]).is_err());
        // tiny excess is clamped
        let b = distance_bounds([S + 5e-10; 4]).unwrap();
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn threshold_examples() {
        let s = threshold_for_distance(0.05).unwrap();
        assert_eq!(format!("{s:.4}"), "2.8214");
        assert_eq!(threshold_for_distance(1.0).unwrap(), 0.0);
        assert!((threshold_for_distance(0.5).unwrap() - S * 0.75).abs() < 1e-15);
        assert!((threshold_for_distance(0.5).unwrap() - 2.1213).abs() < 1e-4);
        assert!(threshold_for_distance(0.0).is_err());
        assert!(threshold_for_distance(1.5).is_err());
    }

    #[test]
    fn overlap_chsh_examples() {
        for v in overlap_chsh(&bell_measurement()).unwrap() {
            assert!((v - S).abs() < 1e-12);
        }
        let theta = 0.37;
        let v = overlap_chsh(&perturbed_bell_measurement(theta, 0).unwrap()).unwrap();
        assert!((v[0] - S * (2.0 * theta).cos()).abs() < 1e-12);
    }

    #[test]
    fn overlap_chsh_matches_simulation_on_rotation() {
        let theta = 0.2;
        let sc = noisy_scenario(1.0, 1.0, theta).unwrap();
        let simulated = crate::protocol::conditional_chsh_ab(&sc).unwrap().raw();
        let predicted = overlap_chsh(sc.charlie3()).unwrap();
        for c in 0..4 {
            assert!((simulated[c].unwrap() - predicted[c]).abs() < 1e-10);
        }
    }

    #[test]
    fn version_operators_are_bell_projector_differences() {
        let (alice, bob) = ideal_ab_settings();
        for c in 0..4 {
            let op = version_operator(&alice, &bob, c);
            assert!(op.max_abs_diff(&bell_projector_difference(c)) < 1e-12);
        }
    }

    #[test]
    fn curve_rows() {
        let s05 = threshold_for_distance(0.05).unwrap();
        let rows = bounds_curve(2.0, S, 5, &[s05]).unwrap();
        assert_eq!(rows.len(), 6);
        assert!((rows[0].upper - (1.0 - 2.0 / S).sqrt()).abs() < 1e-12);
        assert!((rows[0].upper - 0.5412).abs() < 1e-4);
        let last = rows.last().unwrap();
        assert_eq!((last.lower, last.upper), (0.0, 0.0));
        let at = rows.iter().find(|r| r.s == s05).unwrap();
        assert!((at.upper - 0.05).abs() < 1e-4);
        assert_eq!(format!("{:.4}", at.s), "2.8214");
        assert!(bounds_curve(2.0, 3.0, 5, &[]).is_err());
        assert!(bounds_curve(2.5, 2.0, 5, &[]).is_err());
    }
}
