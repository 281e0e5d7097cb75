//! The `sqrtnot` command-line interface.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check, 2 on
//! usage errors, 3 on I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::Error;
use crate::oracle::{brute_scan, derive_seed, mc_exit_covariance, mc_partition_batch};
use crate::plot::line_plot;
use crate::smatrix::{
    build_sqrt_not, norm_diagnostics, GateParameter, Lead, ScatteringMatrix,
};
use crate::sweep::{
    evaluate, find_extrema, find_roots, sweep_kappa, Curve, ExtremumReport, FeatureKind,
    KappaRange, SweepRecord, DEFAULT_POINTS,
};
use crate::transport::{
    noise_prefactor, output_probabilities, shot_noise_auto, BiasConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CSV_HEADER: &str = "kappa,P_A,P_B,P_C,P_D,F,S_DD,S_CD,unitarity_dev,norm_error";
pub const CSV_COLUMNS: [&str; 9] = [
    "P_A",
    "P_B",
    "P_C",
    "P_D",
    "F",
    "S_DD",
    "S_CD",
    "unitarity_dev",
    "norm_error",
];

#[derive(Debug, Parser)]
#[command(
    name = "sqrtnot",
    version,
    about = "Output probabilities, fidelity and shot noise of an electron-waveguide sqrt(NOT) gate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the gate at a single kappa.
    Gate(GateArgs),
    /// Sweep kappa over a uniform grid and write CSV (and optional SVG plots).
    Sweep(SweepArgs),
    /// Locate noise and fidelity extrema and half-transmission roots.
    Extrema(ExtremaArgs),
    /// Check the closed-form results against Monte-Carlo and brute-force oracles.
    Verify(VerifyArgs),
}

fn parse_lead(s: &str) -> Result<Lead, String> {
    s.parse::<Lead>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct GateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Lead the electrons are injected through.
    #[arg(long, default_value = "A", value_parser = parse_lead)]
    pub input: Lead,
    /// Bias voltage in volts; enables SI noise output.
    #[arg(long)]
    pub bias_voltage: Option<f64>,
    /// Temperature in kelvin (default 0 when a bias is given).
    #[arg(long, requires = "bias_voltage")]
    pub temperature: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true,
          default_values_t = [-10.0, 10.0])]
    pub range: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long, default_value = "A", value_parser = parse_lead)]
    pub input: Lead,
    /// CSV destination; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Decimal digits per CSV field.
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
    /// Write one `<column>.svg` per curve.
    #[arg(long)]
    pub plot: bool,
    /// Directory for plots; defaults to the CSV's directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtremaArgs {
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true,
          default_values_t = [-10.0, 10.0])]
    pub range: Vec<f64>,
    /// Scan points before refinement.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long, default_value = "A", value_parser = parse_lead)]
    pub input: Lead,
    /// Also write the features as CSV.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Electrons per Monte-Carlo trial.
    #[arg(long, default_value_t = 1_000_000)]
    pub electrons: u64,
    /// Samples in each brute-force scan.
    #[arg(long, default_value_t = 1_000_000)]
    pub scan_points: usize,
    /// Corrupt the matrices fed to the conservation check (exercises the failure path).
    #[arg(long, hide = true)]
    pub inject_corrupt: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the requested command.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Gate(a) => cmd_gate(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Extrema(a) => cmd_extrema(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(path, e)) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            EXIT_IO
        }
    }
}

fn stdout_io(e: io::Error) -> Failure {
    Failure::Io(PathBuf::from("<stdout>"), e)
}

/// Fixed-precision formatting that never prints a negative zero.
pub fn format_fixed(value: f64, precision: usize) -> String {
    let s = format!("{value:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn format_complex(z: Complex64, precision: usize) -> String {
    let re = format_fixed(z.re, precision);
    let im = format_fixed(z.im, precision);
    let re = if re.starts_with('-') { re } else { format!("+{re}") };
    let im = if im.starts_with('-') { im } else { format!("+{im}") };
    format!("{re}{im}i")
}

fn range_of(values: &[f64]) -> Result<KappaRange, Failure> {
    match values {
        [min, max] => Ok(KappaRange::new(*min, *max)?),
        _ => Err(Failure::Usage("--range takes exactly two values".into())),
    }
}

fn cmd_gate(args: &GateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = args.precision;
    let kappa = GateParameter::new(args.kappa)?;
    let record = evaluate(kappa, args.input)?;
    let s = build_sqrt_not(kappa);
    let bias = match args.bias_voltage {
        Some(v) => Some(BiasConfig::new(v, args.temperature.unwrap_or(0.0), args.input)?),
        None => None,
    };
    let prefactor = bias.as_ref().map(noise_prefactor).transpose()?;
    let diag = norm_diagnostics(&s);

    let mut text = String::new();
    text.push_str(&format!("kappa: {}\n", args.kappa));
    text.push_str(&format!("input lead: {}\n", args.input));
    text.push_str("scattering matrix (row = outgoing lead, column = incoming lead):\n");
    let rows: Vec<Vec<String>> = Lead::ALL
        .iter()
        .map(|&lead| s.row(lead).iter().map(|&z| format_complex(z, p)).collect())
        .collect();
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(0);
    let header: Vec<String> = Lead::ALL.iter().map(|l| format!("{:^width$}", l.to_string())).collect();
    text.push_str(&format!("     {}\n", header.join("  ").trim_end()));
    for (lead, row) in Lead::ALL.iter().zip(&rows) {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        text.push_str(&format!("  {lead}: {}\n", cells.join("  ")));
    }
    text.push_str("output probabilities:\n");
    for lead in Lead::ALL {
        text.push_str(&format!(
            "  P_{lead} = {}\n",
            format_fixed(record.probabilities[lead.index()], p)
        ));
    }
    text.push_str(&format!("fidelity F = {}\n", format_fixed(record.fidelity, p)));
    text.push_str(&format!(
        "S_DD = {} (prefactor units)\n",
        format_fixed(record.s_dd, p)
    ));
    text.push_str(&format!(
        "S_CD = {} (prefactor units)\n",
        format_fixed(record.s_cd, p)
    ));
    if let (Some(bias), Some(pref)) = (bias, prefactor) {
        text.push_str(&format!(
            "noise prefactor (e^3 V/h) coth(eV/2kT) = {pref:.6e} A^2/Hz (V = {} V, T = {} K)\n",
            bias.bias_voltage(),
            bias.temperature()
        ));
        text.push_str(&format!("S_DD = {:.6e} A^2/Hz\n", record.s_dd * pref));
        text.push_str(&format!("S_CD = {:.6e} A^2/Hz\n", record.s_cd * pref));
    }
    text.push_str(&format!(
        "unitarity deviation max|S^dag S - I| = {}\n",
        format_fixed(record.unitarity_dev, p)
    ));
    text.push_str(&format!(
        "norm error: rows {}, columns {}\n",
        format_fixed(diag.row_norm_error, p),
        format_fixed(diag.col_norm_error, p)
    ));
    out.write_all(text.as_bytes()).map_err(stdout_io)?;
    Ok(EXIT_OK)
}

/// One CSV line (without terminator) for a sweep record.
pub fn csv_row(r: &SweepRecord, precision: usize) -> String {
    let fields = [
        r.kappa,
        r.probabilities[0],
        r.probabilities[1],
        r.probabilities[2],
        r.probabilities[3],
        r.fidelity,
        r.s_dd,
        r.s_cd,
        r.unitarity_dev,
        r.norm_error,
    ];
    fields
        .iter()
        .map(|&v| format_fixed(v, precision))
        .collect::<Vec<_>>()
        .join(",")
}

/// Full CSV document for a sweep, LF-terminated.
pub fn sweep_csv(records: &[SweepRecord], precision: usize) -> String {
    let mut csv = String::with_capacity((records.len() + 1) * (10 * (precision + 4)));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for r in records {
        csv.push_str(&csv_row(r, precision));
        csv.push('\n');
    }
    csv
}

fn column_values(records: &[SweepRecord], column: usize) -> Vec<f64> {
    records
        .iter()
        .map(|r| match column {
            0..=3 => r.probabilities[column],
            4 => r.fidelity,
            5 => r.s_dd,
            6 => r.s_cd,
            7 => r.unitarity_dev,
            _ => r.norm_error,
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let range = range_of(&args.range)?;
    let records = sweep_kappa(range, args.points, args.input)?;
    let csv = sweep_csv(&records, args.precision);
    match &args.output {
        Some(path) => write_file(path, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(stdout_io)?,
    }
    if args.plot {
        let dir = match (&args.plot_dir, &args.output) {
            (Some(dir), _) => dir.clone(),
            (None, Some(path)) => path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(".")),
            (None, None) => PathBuf::from("."),
        };
        let kappas: Vec<f64> = records.iter().map(|r| r.kappa).collect();
        for (i, column) in CSV_COLUMNS.iter().enumerate() {
            let svg = line_plot(&kappas, &column_values(&records, i), "kappa", column);
            write_file(&dir.join(format!("{column}.svg")), &svg)?;
        }
    }
    Ok(EXIT_OK)
}

/// All features reported by `extrema`, in a fixed order.
pub fn gate_features(range: KappaRange, points: usize, input: Lead) -> Result<Vec<ExtremumReport>, Error> {
    let mut all = Vec::new();
    for curve in [Curve::AutoNoise, Curve::CrossNoiseMagnitude, Curve::Fidelity] {
        all.extend(find_extrema(&curve.name(), curve.function(input), range, points)?);
    }
    let pd = Curve::Probability(Lead::D);
    all.extend(find_roots(
        &format!("{} - 1/2", pd.name()),
        pd.function(input),
        0.5,
        range,
        points,
    )?);
    Ok(all)
}

fn cmd_extrema(args: &ExtremaArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let range = range_of(&args.range)?;
    // Validate the input lead before evaluating curves that would panic on it.
    evaluate(GateParameter::new(range.min)?, args.input)?;
    let p = args.precision;
    let features = gate_features(range, args.points, args.input)?;

    let count = |curve: &str, kind: FeatureKind| {
        features
            .iter()
            .filter(|f| f.curve == curve && f.kind == kind)
            .count()
    };
    let mut text = String::new();
    text.push_str(&format!(
        "range: [{}, {}], scan points: {}, input lead: {}\n",
        range.min, range.max, args.points, args.input
    ));
    for f in &features {
        text.push_str(&format!(
            "{:<10} {:<8} kappa = {}  value = {}  bracket = [{}, {}]\n",
            f.curve,
            f.kind.as_str(),
            format_fixed(f.location, p),
            format_fixed(f.value, p),
            format_fixed(f.bracket.0, p),
            format_fixed(f.bracket.1, p),
        ));
    }
    text.push_str(&format!(
        "S_DD maxima: {}\n|S_CD| maxima: {}\nF maxima: {}\nP_D = 1/2 roots: {}\n",
        count("S_DD", FeatureKind::Maximum),
        count("|S_CD|", FeatureKind::Maximum),
        count("F", FeatureKind::Maximum),
        count("P_D - 1/2", FeatureKind::Root),
    ));
    out.write_all(text.as_bytes()).map_err(stdout_io)?;

    if let Some(path) = &args.output {
        let mut csv = String::from("curve,kind,location,value,bracket_lo,bracket_hi\n");
        for f in &features {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                f.curve,
                f.kind.as_str(),
                format_fixed(f.location, p),
                format_fixed(f.value, p),
                format_fixed(f.bracket.0, p),
                format_fixed(f.bracket.1, p),
            ));
        }
        write_file(path, &csv)?;
    }
    Ok(EXIT_OK)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub expected: String,
    pub passed: bool,
}

impl Check {
    fn line(&self) -> String {
        format!(
            "[{}] {}: measured {}, expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected
        )
    }
}

/// kappa values at which Monte-Carlo partition noise is compared with the closed form.
pub const MC_KAPPAS: [f64; 10] = [-10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0];

fn corrupt(s: &ScatteringMatrix) -> ScatteringMatrix {
    let mut m = *s.entries();
    for row in m.iter_mut() {
        row[0] *= 1.01;
    }
    ScatteringMatrix::new(m).expect("finite entries")
}

/// Runs the oracle suite.
pub fn verification_checks(args: &VerifyArgs) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    let range = KappaRange::default();

    let worst = range
        .grid(DEFAULT_POINTS)
        .into_iter()
        .map(|k| {
            let s = build_sqrt_not(GateParameter::new(k)?);
            let s = if args.inject_corrupt { corrupt(&s) } else { s };
            Ok(norm_diagnostics(&s).max_error())
        })
        .collect::<Result<Vec<f64>, Error>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check {
        name: format!("conservation over {DEFAULT_POINTS} kappa in [-10, 10]"),
        measured: format!("max norm error {worst:.3e}"),
        expected: "< 1e-12".into(),
        passed: worst < 1e-12,
    });

    let probabilities: Vec<f64> = MC_KAPPAS
        .iter()
        .map(|&k| Ok(output_probabilities(&build_sqrt_not(GateParameter::new(k)?), Lead::A)[3]))
        .collect::<Result<_, Error>>()?;
    let estimates = mc_partition_batch(&probabilities, args.electrons, args.seed)?;
    for ((&k, &t), est) in MC_KAPPAS.iter().zip(&probabilities).zip(&estimates) {
        let closed =
            shot_noise_auto(&build_sqrt_not(GateParameter::new(k)?), Lead::D, Lead::A)?
                .value_prefactor_units;
        let sigmas = est.sigmas_from(closed);
        checks.push(Check {
            name: format!("partition noise S_DD at kappa = {k} (T = {t:.6})"),
            measured: format!("{:.9} +/- {:.3e} ({sigmas:.2} sigma)", est.value, est.standard_error),
            expected: format!("{closed:.9} within 3 sigma"),
            passed: sigmas <= 3.0,
        });
    }

    for (i, k) in [0.0, 0.5].into_iter().enumerate() {
        let p = output_probabilities(&build_sqrt_not(GateParameter::new(k)?), Lead::A);
        let expected = -p[2] * p[3];
        let est = mc_exit_covariance(
            p,
            Lead::C.index(),
            Lead::D.index(),
            args.electrons,
            derive_seed(args.seed, 1000 + i as u64),
        )?;
        let sigmas = est.sigmas_from(expected);
        checks.push(Check {
            name: format!("exit covariance C,D at kappa = {k}"),
            measured: format!("{:.9} +/- {:.3e} ({sigmas:.2} sigma)", est.value, est.standard_error),
            expected: format!("-P_C P_D = {expected:.9} within 3 sigma"),
            passed: sigmas <= 3.0,
        });
    }

    let table = |curve: Curve| brute_scan(curve.function(Lead::A), range, args.scan_points);
    let s_dd = table(Curve::AutoNoise)?;
    let n = s_dd.count_local_maxima();
    checks.push(Check {
        name: format!("S_DD local maxima ({} samples)", args.scan_points),
        measured: n.to_string(),
        expected: "2".into(),
        passed: n == 2,
    });
    let pd = table(Curve::Probability(Lead::D))?;
    let n = pd.count_sign_changes(0.5);
    checks.push(Check {
        name: "P_D - 1/2 sign changes".into(),
        measured: n.to_string(),
        expected: "2".into(),
        passed: n == 2,
    });
    for curve in [Curve::CrossNoiseMagnitude, Curve::Fidelity] {
        let t = table(curve)?;
        let n = t.count_local_maxima() + t.count_local_minima();
        let (at, _) = t.argmax();
        let step = (range.max - range.min) / (args.scan_points - 1) as f64;
        checks.push(Check {
            name: format!("{} extrema", curve.name()),
            measured: format!("{n} (largest sample at kappa = {at:.6})"),
            expected: "1 at kappa = 0".into(),
            passed: n == 1 && at.abs() <= step,
        });
    }

    let p0 = output_probabilities(&build_sqrt_not(GateParameter::new(0.0)?), Lead::A);
    let reflected = p0[0] + p0[1];
    checks.push(Check {
        name: "reflection at resonance".into(),
        measured: format!("P_A + P_B = {reflected:.3e}"),
        expected: "< 1e-12".into(),
        passed: reflected < 1e-12,
    });
    Ok(checks)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if args.electrons < 2 {
        return Err(Failure::Usage("--electrons must be at least 2".into()));
    }
    let checks = verification_checks(args)?;
    let mut text = format!("verify (seed {}, {} electrons per trial)\n", args.seed, args.electrons);
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    text.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out.write_all(text.as_bytes()).map_err(stdout_io)?;
    Ok(if passed == checks.len() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
