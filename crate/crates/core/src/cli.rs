//! Command-line front end.
//!
//! Exit codes: 0 success (or certification passed), 1 certification failed,
//! 2 usage error, 3 validation error. Floats are written with 9 significant
//! digits.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bell_decomposition::{
    decompose, planted_observables, Decomposition, DEFAULT_ITERS, DEFAULT_RESTARTS,
};
use crate::certification::{
    bounds_curve, certify_crit1, certify_crit2, distance_bounds_with_tol, DistanceBounds, Verdict,
};
use crate::error::Error;
use crate::linalg::PureState;
use crate::measurements::DichotomicObservable;
use crate::protocol::{
    chsh_report, ideal_ab_settings, ideal_scenario, noisy_scenario, ChshReport, Scenario, TSIRELSON,
};
use crate::random::seeded_rng;
use crate::sampling::{estimate_report, sample_counts, Counts, EstimatedReport};

/// Environment variable holding the default equality tolerance.
pub const TOL_ENV: &str = "SWAPCERT_TOL";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "swapcert",
    version,
    about = "Certify Bell-state measurements from CHSH statistics in entanglement swapping"
)]
pub struct Cli {
    /// Output format; defaults to csv for `bounds-curve` and `sample`, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct TolArg {
    /// Tolerance for the equalities S = 2√2.
    #[arg(long, env = TOL_ENV, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct NoiseArgs {
    /// Werner visibility of the Alice–Charlie source.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v_ac: f64,
    /// Werner visibility of the Bob–Charlie source.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v_bc: f64,
    /// Rotation angle of C₃ in the {Φ⁺, Ψ⁻} plane.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// The qubit settings of the ideal scenario.
    Ideal,
    /// A0 = A1 = Z and B0 = B1 = Z.
    Commuting,
    /// Two random qubit blocks per party in a random basis of C⁴.
    PlantedD4,
}

#[derive(Args, Debug, Clone)]
pub struct SettingsArgs {
    /// JSON file `{"alice": [A0, A1], "bob": [B0, B1]}`.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub settings: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Seed for building the planted preset.
    #[arg(long, default_value_t = 0)]
    pub preset_seed: u64,
    /// Tolerance for validating the observables.
    #[arg(long, env = TOL_ENV, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact report and verdicts for the ideal four-qubit scenario.
    Ideal(TolArg),
    /// Exact report and verdicts with Werner noise and a misaligned C₃.
    Noisy {
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Verdicts and distance bounds from a counts CSV or a report JSON.
    Certify {
        /// Counts CSV (`x,y,z,a,b,c,count`) or report JSON.
        input: PathBuf,
        /// Equality tolerance; defaults to the environment value or 1e-9.
        #[arg(long, env = TOL_ENV)]
        tol: Option<f64>,
        /// For counts: tolerance = k·max(σ̂_AC, σ̂_BC).
        #[arg(long, conflicts_with = "tol")]
        sigmas: Option<f64>,
    },
    /// Distance bounds as a function of a common conditional CHSH value.
    BoundsCurve {
        #[arg(long, default_value_t = 2.0)]
        s_min: f64,
        #[arg(long, default_value_t = TSIRELSON)]
        s_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Extra S values to include (repeatable).
        #[arg(long)]
        include: Vec<f64>,
    },
    /// Block decomposition of the CHSH operator and the separable bound formula.
    Decompose(SettingsArgs),
    /// Separable bound: closed form and see-saw certificate.
    SepBound {
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_ITERS)]
        iters: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte Carlo counts for every setting.
    Sample {
        /// Samples per setting.
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
        /// Scenario JSON; noise parameters are used when absent.
        #[arg(long, conflicts_with_all = ["v_ac", "v_bc", "theta"])]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

/// Text to emit and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::OutOfRange(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Self {
            message: e.to_string(),
            exit_code,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        exit_code: EXIT_USAGE,
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        exit_code: EXIT_INVALID,
    }
}

/// Rounds to 9 significant digits; `-0` becomes `0`.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig9(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable output");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

fn fmt_float(x: f64) -> String {
    sig9(x).to_string()
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn opt_float(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_float)
}

/// Parses arguments and runs the command, returning the exit code.
/// Output goes to `--out` or stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => match write_output(cli.out.as_deref(), &out.text) {
            Ok(()) => out.exit_code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Runs a parsed command without touching stdout.
pub fn execute(cli: &Cli) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Ideal(tol) => exact_report(&ideal_scenario(), tol.tol, cli.format),
        Command::Noisy { noise, tol } => {
            let sc = noisy_scenario(noise.v_ac, noise.v_bc, noise.theta)?;
            exact_report(&sc, tol.tol, cli.format)
        }
        Command::Certify { input, tol, sigmas } => certify(input, *tol, *sigmas, cli.format),
        Command::BoundsCurve {
            s_min,
            s_max,
            steps,
            include,
        } => curve(*s_min, *s_max, *steps, include, cli.format),
        Command::Decompose(settings) => {
            let d = load_decomposition(settings)?;
            Ok(pass(decomposition_output(&d, None, cli.format)))
        }
        Command::SepBound {
            settings,
            restarts,
            iters,
            seed,
        } => {
            let d = load_decomposition(settings)?.with_oracle(*restarts, *iters, *seed)?;
            Ok(pass(decomposition_output(
                &d,
                Some((*restarts, *seed)),
                cli.format,
            )))
        }
        Command::Sample {
            n,
            seed,
            scenario,
            noise,
        } => {
            if *n == 0 {
                return Err(usage("--n must be positive"));
            }
            let sc = match scenario {
                Some(path) => load_scenario(path)?,
                None => noisy_scenario(noise.v_ac, noise.v_bc, noise.theta)?,
            };
            let counts = sample_counts(&sc, *n, *seed)?;
            Ok(pass(counts_output(&counts, cli.format)))
        }
    }
}

fn pass(text: String) -> CommandOutput {
    CommandOutput {
        text,
        exit_code: EXIT_PASS,
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| invalid(format!("{}: line {}: {e}", path.display(), e.line())))
}

#[derive(Serialize)]
struct ExactOutput<'a> {
    report: &'a ChshReport,
    verdicts: [Verdict; 2],
}

fn exact_report(
    sc: &Scenario,
    tol: f64,
    format: Option<Format>,
) -> Result<CommandOutput, CliError> {
    check_tol(tol)?;
    let report = chsh_report(sc)?;
    let verdicts = [
        certify_crit1(report.s_ac, report.s_bc, report.s_ab_given_c, tol),
        certify_crit2(report.s_ac, report.s_bc, report.s_ab_given_c, tol),
    ];
    let exit_code = if verdicts.iter().all(|v| v.passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&ExactOutput {
            report: &report,
            verdicts: verdicts.clone(),
        }),
        Format::Csv => {
            let mut rows = report_rows(&report);
            rows.extend(verdict_rows(&verdicts));
            csv_table(&["quantity", "value"], &rows)
        }
    };
    Ok(CommandOutput { text, exit_code })
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "tolerance {tol} must be a nonnegative number"
        )))
    }
}

fn report_rows(r: &ChshReport) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["S_AC".into(), fmt_float(r.s_ac)],
        vec!["S_BC".into(), fmt_float(r.s_bc)],
    ];
    for c in 0..4 {
        rows.push(vec![
            format!("S_AB|{}", c + 1),
            opt_float(r.s_ab_given_c[c]),
        ]);
    }
    for c in 0..4 {
        rows.push(vec![format!("p({})", c + 1), fmt_float(r.outcome_probs[c])]);
    }
    for c in 0..4 {
        rows.push(vec![
            format!("relabeling[{}]", c + 1),
            (r.relabeling[c] + 1).to_string(),
        ]);
    }
    rows
}

fn verdict_rows(verdicts: &[Verdict]) -> Vec<Vec<String>> {
    verdicts
        .iter()
        .map(|v| {
            vec![
                format!("{:?}", v.criterion),
                if v.passed { "passed" } else { "failed" }.into(),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    input: &'static str,
    #[serde(rename = "S_AC")]
    s_ac: f64,
    #[serde(rename = "S_BC")]
    s_bc: f64,
    #[serde(rename = "S_AB_given_c")]
    s_ab_given_c: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors: Option<StandardErrors>,
    tol: f64,
    verdicts: &'a [Verdict; 2],
    distance_bounds: DistanceBounds,
}

#[derive(Serialize)]
struct StandardErrors {
    #[serde(rename = "S_AC")]
    s_ac: f64,
    #[serde(rename = "S_BC")]
    s_bc: f64,
    #[serde(rename = "S_AB_given_c")]
    s_ab_given_c: [Option<f64>; 4],
}

fn certify(
    input: &Path,
    tol: Option<f64>,
    sigmas: Option<f64>,
    format: Option<Format>,
) -> Result<CommandOutput, CliError> {
    let text = read_file(input)?;
    let trimmed = text.trim_start();
    let (kind, report, estimate) = if trimmed.starts_with('{') {
        if sigmas.is_some() {
            return Err(usage("--sigmas needs a counts CSV with standard errors"));
        }
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("{}: line {}: {e}", input.display(), e.line())))?;
        // accept the output of `ideal`/`noisy`, which nests the report
        if let Some(inner) = value.get_mut("report") {
            value = inner.take();
        }
        let report: ChshReport = serde_json::from_value(value)
            .map_err(|e| invalid(format!("{}: {e}", input.display())))?;
        ("report", report, None)
    } else {
        let counts = Counts::read_csv(text.as_bytes())
            .map_err(|e| invalid(format!("{}: {e}", input.display())))?;
        let est = estimate_report(&counts)?;
        ("counts", est.report.clone(), Some(est))
    };
    let values = report.complete_ab_values()?;
    let tol = match (tol, sigmas, &estimate) {
        (Some(t), _, _) => t,
        (None, Some(k), Some(est)) => est.tolerance(k),
        _ => 1e-9,
    };
    check_tol(tol)?;
    let verdicts = [
        certify_crit1(report.s_ac, report.s_bc, values, tol),
        certify_crit2(report.s_ac, report.s_bc, values, tol),
    ];
    // sampled conditional values may overshoot 2√2 by a few standard errors
    let bound_tol = match (sigmas, &estimate) {
        (Some(k), Some(est)) => est
            .se_ab
            .iter()
            .flatten()
            .fold(tol, |acc, se| acc.max(k * se)),
        _ => tol,
    };
    let bounds = distance_bounds_with_tol(values, bound_tol)?;
    let exit_code = if verdicts[0].passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    let standard_errors = estimate.as_ref().map(|e: &EstimatedReport| StandardErrors {
        s_ac: e.se_ac,
        s_bc: e.se_bc,
        s_ab_given_c: e.se_ab,
    });
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&CertifyOutput {
            input: kind,
            s_ac: report.s_ac,
            s_bc: report.s_bc,
            s_ab_given_c: values,
            standard_errors,
            tol,
            verdicts: &verdicts,
            distance_bounds: bounds,
        }),
        Format::Csv => {
            let mut rows = vec![
                vec!["S_AC".into(), fmt_float(report.s_ac)],
                vec!["S_BC".into(), fmt_float(report.s_bc)],
            ];
            for (c, v) in values.iter().enumerate() {
                rows.push(vec![format!("S_AB|{}", c + 1), fmt_float(*v)]);
            }
            if let Some(se) = &standard_errors {
                rows.push(vec!["se(S_AC)".into(), fmt_float(se.s_ac)]);
                rows.push(vec!["se(S_BC)".into(), fmt_float(se.s_bc)]);
                for c in 0..4 {
                    rows.push(vec![
                        format!("se(S_AB|{})", c + 1),
                        opt_float(se.s_ab_given_c[c]),
                    ]);
                }
            }
            rows.push(vec!["tol".into(), fmt_float(tol)]);
            rows.extend(verdict_rows(&verdicts));
            rows.push(vec!["distance_lower".into(), fmt_float(bounds.lower)]);
            rows.push(vec!["distance_upper".into(), fmt_float(bounds.upper)]);
            csv_table(&["quantity", "value"], &rows)
        }
    };
    Ok(CommandOutput { text, exit_code })
}

fn curve(
    s_min: f64,
    s_max: f64,
    steps: usize,
    include: &[f64],
    format: Option<Format>,
) -> Result<CommandOutput, CliError> {
    // accept 2√2 typed with fewer digits
    let snap = |s: f64| {
        if (s - TSIRELSON).abs() <= 1e-9 {
            TSIRELSON
        } else {
            s
        }
    };
    let include: Vec<f64> = include.iter().map(|&s| snap(s)).collect();
    let rows = bounds_curve(snap(s_min), snap(s_max), steps, &include)?;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => csv_table(
            &["S", "lower", "upper"],
            &rows
                .iter()
                .map(|r| vec![fmt_float(r.s), fmt_float(r.lower), fmt_float(r.upper)])
                .collect::<Vec<_>>(),
        ),
    };
    Ok(pass(text))
}

/// Settings file: `{"alice": [A0, A1], "bob": [B0, B1]}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SettingsFile {
    pub alice: [DichotomicObservable; 2],
    pub bob: [DichotomicObservable; 2],
}

fn preset_settings(preset: Preset, seed: u64) -> SettingsFile {
    match preset {
        Preset::Ideal => {
            let (alice, bob) = ideal_ab_settings();
            SettingsFile { alice, bob }
        }
        Preset::Commuting => {
            let z = DichotomicObservable::qubit([0.0, 0.0, 1.0]).expect("Pauli Z");
            SettingsFile {
                alice: [z.clone(), z.clone()],
                bob: [z.clone(), z],
            }
        }
        Preset::PlantedD4 => {
            let mut rng = seeded_rng(seed, 0);
            let alice = planted_observables(2, &mut rng);
            let bob = planted_observables(2, &mut rng);
            SettingsFile { alice, bob }
        }
    }
}

fn load_decomposition(args: &SettingsArgs) -> Result<Decomposition, CliError> {
    check_tol(args.tol)?;
    let settings = match (&args.settings, args.preset) {
        (Some(path), _) => serde_json::from_str::<SettingsFile>(&read_file(path)?)
            .map_err(|e| invalid(format!("{}: line {}: {e}", path.display(), e.line())))?,
        (None, Some(p)) => preset_settings(p, args.preset_seed),
        (None, None) => return Err(usage("either --settings or --preset is required")),
    };
    Ok(decompose(&settings.alice, &settings.bob, args.tol)?)
}

#[derive(Serialize)]
struct AlphaRow {
    i: usize,
    j: usize,
    dims: (usize, usize),
    alpha: f64,
}

#[derive(Serialize)]
struct OracleOutput {
    value: f64,
    restarts: usize,
    seed: u64,
    best_restart: usize,
    factor_a: Vec<[f64; 2]>,
    factor_b: Vec<[f64; 2]>,
    formula_minus_oracle: f64,
}

fn amplitudes(s: &PureState) -> Vec<[f64; 2]> {
    s.vector().iter().map(|z| [z.re, z.im]).collect()
}

fn decomposition_output(
    d: &Decomposition,
    oracle: Option<(usize, u64)>,
    format: Option<Format>,
) -> String {
    let alpha: Vec<AlphaRow> = d
        .structure
        .pairs
        .iter()
        .map(|p| AlphaRow {
            i: p.i,
            j: p.j,
            dims: p.dims,
            alpha: p.alpha,
        })
        .collect();
    let oracle_out = match (oracle, &d.sep_bound.oracle) {
        (Some((restarts, seed)), Some(o)) => Some(OracleOutput {
            value: o.value,
            restarts,
            seed,
            best_restart: o.restart,
            factor_a: amplitudes(&o.factor_a),
            factor_b: amplitudes(&o.factor_b),
            formula_minus_oracle: d.sep_bound.formula_value - o.value,
        }),
        _ => None,
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "alice_blocks": d.alice,
                "bob_blocks": d.bob,
                "block_pairs": d.structure.pairs,
                "alpha": alpha,
                "lambda": d.structure.lambda,
                "S_Sep_formula": d.sep_bound.formula_value,
            });
            if let Some(o) = oracle_out {
                v["oracle"] = serde_json::to_value(o).expect("oracle json");
            }
            to_json(&v)
        }
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = alpha
                .iter()
                .map(|a| {
                    vec![
                        a.i.to_string(),
                        a.j.to_string(),
                        a.dims.0.to_string(),
                        a.dims.1.to_string(),
                        fmt_float(a.alpha),
                    ]
                })
                .collect();
            let mut text = csv_table(&["i", "j", "dim_a", "dim_b", "alpha"], &rows);
            rows = vec![
                vec!["lambda".into(), fmt_float(d.structure.lambda)],
                vec!["S_Sep_formula".into(), fmt_float(d.sep_bound.formula_value)],
            ];
            if let Some(o) = oracle_out {
                rows.push(vec!["S_Sep_oracle".into(), fmt_float(o.value)]);
                rows.push(vec![
                    "formula_minus_oracle".into(),
                    fmt_float(o.formula_minus_oracle),
                ]);
            }
            text.push('\n');
            text.push_str(&csv_table(&["quantity", "value"], &rows));
            text
        }
    }
}

#[derive(Serialize)]
struct CountRow {
    x: usize,
    y: usize,
    z: usize,
    a: i8,
    b: i8,
    c: usize,
    count: u64,
}

fn counts_output(counts: &Counts, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => counts.to_csv(),
        Format::Json => {
            let mut rows = Vec::with_capacity(192);
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..3 {
                        for a in 0..2 {
                            for b in 0..2 {
                                for c in 0..4 {
                                    rows.push(CountRow {
                                        x: x + 1,
                                        y: y + 1,
                                        z: z + 1,
                                        a: if a == 0 { 1 } else { -1 },
                                        b: if b == 0 { 1 } else { -1 },
                                        c: c + 1,
                                        count: counts.get(x, y, z, a, b, c),
                                    });
                                }
                            }
                        }
                    }
                }
            }
            to_json(&rows)
        }
    }
}
