//! Finite-statistics simulation: sampling outcome counts from a scenario
//! and estimating CHSH values with standard errors.
//!
//! Counts are indexed by the settings `(x, y, z)` and outcomes `(a, b, c)`.
//! For `z ∈ {0, 1}` the outcome `c` is the index of Charlie's fine-grained
//! outcome; the estimator turns it into his bits through the binning.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::certification::relabel;
use crate::error::{Error, Result};
use crate::protocol::{chsh_version, joint_distribution, ChshReport, Scenario, SIGNS};
use crate::random::seeded_rng;

/// Number of `(x, y, z)` settings.
pub const SETTINGS: usize = 12;

/// Number of `(a, b, c)` outcomes per setting.
pub const CELLS: usize = 16;

/// Binning of the ideal C₁/C₂ measurements: outcome `c` carries
/// `(bit_for_A, bit_for_B) = ([+,+,−,−][c], [+,−,+,−][c])`.
pub const STANDARD_BITS: ([i8; 4], [i8; 4]) = ([1, 1, -1, -1], [1, -1, 1, -1]);

/// Index of setting `(x, y, z)`, 0-based.
pub fn setting_index(x: usize, y: usize, z: usize) -> usize {
    (x * 2 + y) * 3 + z
}

/// Outcome counts for every setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts(Vec<u64>);

impl Default for Counts {
    fn default() -> Self {
        Self(vec![0; SETTINGS * CELLS])
    }
}

fn cell(a: usize, b: usize, c: usize) -> usize {
    (a * 2 + b) * 4 + c
}

impl Counts {
    pub fn get(&self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> u64 {
        self.0[setting_index(x, y, z) * CELLS + cell(a, b, c)]
    }

    #[allow(clippy::too_many_arguments)]
    pub fn set(&mut self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize, n: u64) {
        self.0[setting_index(x, y, z) * CELLS + cell(a, b, c)] = n;
    }

    /// The 16 cells of one setting, indexed `(a·2 + b)·4 + c`.
    pub fn setting(&self, x: usize, y: usize, z: usize) -> &[u64] {
        let s = setting_index(x, y, z) * CELLS;
        &self.0[s..s + CELLS]
    }

    pub fn setting_total(&self, x: usize, y: usize, z: usize) -> u64 {
        self.setting(x, y, z).iter().sum()
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        Self(self.0.iter().map(|n| n * k).collect())
    }

    /// CSV with header `x,y,z,a,b,c,count`; settings and `c` 1-based, `a, b = ±1`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z", "a", "b", "c", "count"])
            .map_err(csv_error)?;
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..3 {
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..4 {
                                w.write_record([
                                    (x + 1).to_string(),
                                    (y + 1).to_string(),
                                    (z + 1).to_string(),
                                    (SIGNS[a] as i64).to_string(),
                                    (SIGNS[b] as i64).to_string(),
                                    (c + 1).to_string(),
                                    self.get(x, y, z, a, b, c).to_string(),
                                ])
                                .map_err(csv_error)?;
                            }
                        }
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    /// Parses the CSV written by [`Self::write_csv`]. Missing rows count as
    /// zero; repeated rows are rejected. Errors carry the line number.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = r.headers().map_err(csv_error)?.clone();
        let expected = ["x", "y", "z", "a", "b", "c", "count"];
        if header.iter().ne(expected.iter().copied()) {
            return Err(Error::Parse(format!(
                "line 1: expected header {}, found {}",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut counts = Self::default();
        let mut seen = [false; SETTINGS * CELLS];
        for record in r.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            let err = |msg: String| Error::Parse(format!("line {line}: {msg}"));
            if record.len() != 7 {
                return Err(err(format!("expected 7 fields, found {}", record.len())));
            }
            let int = |k: usize| -> Result<i64> {
                record[k].parse::<i64>().map_err(|_| {
                    err(format!(
                        "field {} = {:?} is not an integer",
                        expected[k], &record[k]
                    ))
                })
            };
            let index = |k: usize, max: i64| -> Result<usize> {
                let v = int(k)?;
                if (1..=max).contains(&v) {
                    Ok((v - 1) as usize)
                } else {
                    Err(err(format!("{} = {v} out of range 1..={max}", expected[k])))
                }
            };
            let sign = |k: usize| -> Result<usize> {
                match int(k)? {
                    1 => Ok(0),
                    -1 => Ok(1),
                    v => Err(err(format!("{} = {v} must be +1 or -1", expected[k]))),
                }
            };
            let (x, y, z) = (index(0, 2)?, index(1, 2)?, index(2, 3)?);
            let (a, b, c) = (sign(3)?, sign(4)?, index(5, 4)?);
            let n: u64 = record[6].parse().map_err(|_| {
                err(format!(
                    "count {:?} is not a nonnegative integer",
                    &record[6]
                ))
            })?;
            let k = setting_index(x, y, z) * CELLS + cell(a, b, c);
            if seen[k] {
                return Err(err("duplicate row".into()));
            }
            seen[k] = true;
            counts.0[k] = n;
        }
        Ok(counts)
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse(format!("line {}: {e}", p.line())),
        None => Error::Parse(e.to_string()),
    }
}

/// Draws `n_per_setting` outcomes for each of the 12 settings from the exact
/// distribution. Setting `k` uses stream `k` of `seed`, so counts do not
/// depend on the number of threads.
pub fn sample_counts(sc: &Scenario, n_per_setting: u64, seed: u64) -> Result<Counts> {
    let mut dists = Vec::with_capacity(SETTINGS);
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..3 {
                let p = joint_distribution(sc, x, y, z)?;
                let flat: Vec<f64> = (0..CELLS)
                    .map(|k| p.get(k / 8, (k / 4) % 2, k % 4))
                    .collect();
                dists.push(flat);
            }
        }
    }
    let per_setting: Vec<Vec<u64>> = dists
        .par_iter()
        .enumerate()
        .map(|(k, p)| sample_setting(p, n_per_setting, &mut seeded_rng(seed, k as u64)))
        .collect();
    Ok(Counts(per_setting.concat()))
}

fn sample_setting<R: Rng>(p: &[f64], n: u64, rng: &mut R) -> Vec<u64> {
    let total: f64 = p.iter().sum();
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &q in p {
        acc += q / total;
        cdf.push(acc);
    }
    let mut out = vec![0u64; p.len()];
    for _ in 0..n {
        let u: f64 = rng.random();
        let k = cdf.partition_point(|&c| c <= u).min(p.len() - 1);
        out[k] += 1;
    }
    out
}

/// Plug-in estimates with standard errors from the independent-multinomial
/// approximation `Var Ê = (1 − Ê²)/N` per correlator.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatedReport {
    pub report: ChshReport,
    pub se_ac: f64,
    pub se_bc: f64,
    /// Standard error of each relabeled conditional value.
    pub se_ab: [Option<f64>; 4],
}

impl EstimatedReport {
    /// `k · max(σ̂_AC, σ̂_BC)`.
    pub fn tolerance(&self, k: f64) -> f64 {
        k * self.se_ac.max(self.se_bc)
    }
}

/// Estimates with the standard binning of C₁ and C₂.
pub fn estimate_report(counts: &Counts) -> Result<EstimatedReport> {
    estimate_report_with_bits(counts, &STANDARD_BITS.0, &STANDARD_BITS.1)
}

pub fn estimate_report_with_bits(
    counts: &Counts,
    bits_a: &[i8; 4],
    bits_b: &[i8; 4],
) -> Result<EstimatedReport> {
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..3 {
                if counts.setting_total(x, y, z) == 0 {
                    return Err(Error::Undefined(format!(
                        "no counts for setting (x, y, z) = ({}, {}, {})",
                        x + 1,
                        y + 1,
                        z + 1
                    )));
                }
            }
        }
    }

    // S_AC: pool over y; S_BC: pool over x.
    let mut e_ac = [[0.0; 2]; 2];
    let mut e_bc = [[0.0; 2]; 2];
    let mut var_ac = 0.0;
    let mut var_bc = 0.0;
    for s in 0..2 {
        for z in 0..2 {
            let (mut sum_a, mut sum_b, mut n_a, mut n_b) = (0.0, 0.0, 0u64, 0u64);
            for other in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..4 {
                            let na = counts.get(s, other, z, a, b, c);
                            sum_a += SIGNS[a] * bits_a[c] as f64 * na as f64;
                            n_a += na;
                            let nb = counts.get(other, s, z, a, b, c);
                            sum_b += SIGNS[b] * bits_b[c] as f64 * nb as f64;
                            n_b += nb;
                        }
                    }
                }
            }
            e_ac[s][z] = sum_a / n_a as f64;
            e_bc[s][z] = sum_b / n_b as f64;
            var_ac += (1.0 - e_ac[s][z].powi(2)) / n_a as f64;
            var_bc += (1.0 - e_bc[s][z].powi(2)) / n_b as f64;
        }
    }

    let mut versions = [None; 4];
    let mut var_ab = [None; 4];
    let mut n_c = [0u64; 4];
    let mut n_total = 0u64;
    for c in 0..4 {
        let mut e = [[0.0; 2]; 2];
        let mut var = 0.0;
        let mut defined = true;
        for x in 0..2 {
            for y in 0..2 {
                let mut n = 0u64;
                let mut sum = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let k = counts.get(x, y, 2, a, b, c);
                        n += k;
                        sum += SIGNS[a] * SIGNS[b] * k as f64;
                    }
                }
                n_c[c] += n;
                if n == 0 {
                    defined = false;
                    continue;
                }
                e[x][y] = sum / n as f64;
                var += (1.0 - e[x][y].powi(2)) / n as f64;
            }
        }
        if defined {
            versions[c] = Some(std::array::from_fn(|v| chsh_version(&e, v)));
            var_ab[c] = Some(var);
        }
        n_total += n_c[c];
    }
    let outcome_probs = n_c.map(|n| n as f64 / n_total as f64);
    let relabeling = relabel(&versions);
    let se_ab = std::array::from_fn(|slot| {
        relabeling.values[slot].and_then(|_| var_ab[relabeling.permutation[slot]].map(f64::sqrt))
    });
    Ok(EstimatedReport {
        report: ChshReport {
            s_ac: chsh_version(&e_ac, 0),
            s_bc: chsh_version(&e_bc, 0),
            s_ab_given_c: relabeling.values,
            outcome_probs,
            relabeling: relabeling.permutation,
        },
        se_ac: var_ac.sqrt(),
        se_bc: var_bc.sqrt(),
        se_ab,
    })
}

/// Counts `round(scale · p)` from the exact distribution, for consistency checks.
pub fn expected_counts(sc: &Scenario, scale: f64) -> Result<Counts> {
    let mut counts = Counts::default();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..3 {
                let p = joint_distribution(sc, x, y, z)?;
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..4 {
                            counts.set(x, y, z, a, b, c, (scale * p.get(a, b, c)).round() as u64);
                        }
                    }
                }
            }
        }
    }
    Ok(counts)
}
