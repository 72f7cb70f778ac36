//! Command-line front end.
//!
//! Every angle on the command line is in degrees and is converted to radians
//! while the arguments are parsed. Exit codes: 0 success, 1 I/O failure,
//! 2 usage error, 3 invalid data, 4 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    chsh_s, classify_bell, visibility_from_records, ChshAngles, ChshResult, ClassificationResult,
    DEFAULT_RESAMPLES,
};
use crate::error::{Error, Result};
use crate::io;
use crate::jones::{
    apply_plan, bell_state, express_in_basis, hwp_plan, Basis, BellLabel, Port, TwoQubitState, WaveplatePlacement,
    C64,
};
use crate::measurement::{format_degrees, sweep, visibility_curve, AnalyzerSetting, CurvePoint};
use crate::source::{basic_settings, expected_count, generate_dataset, make_source_state, transform_source, CountRecord, SourceConfig};
use crate::tomography::{reconstruct, tomo_settings, Method, MleConfig, TomographyData, TomographyResult};

#[derive(Debug, Parser)]
#[command(name = "bellkit", version, about = "Polarization-entanglement simulation and analysis")]
pub struct Cli {
    /// Seed for simulation and bootstrap resampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply waveplates or Pauli gates to a Bell state and report the result.
    Transform(TransformArgs),
    /// Simulate a coincidence-count data set.
    Simulate(SimulateArgs),
    /// Correlation curves P(α, β) over a sweep of the port-b plate.
    Curve(CurveArgs),
    /// CHSH parameter S with bootstrap uncertainty.
    Chsh(ChshArgs),
    /// Identify the Bell state behind H/V and D/A counts.
    Classify(AnalysisArgs),
    /// Reconstruct the density matrix from the 36-setting data set.
    Tomo(TomoArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_parser = parse_label)]
    pub input: BellLabel,
    /// Half-wave plate `port:degrees`, e.g. `a:0`; applied in the order given.
    #[arg(long = "hwp", value_parser = parse_placement)]
    pub hwp: Vec<WaveplatePlacement>,
    /// Gate `[port:]I|X|Z|XZ` (port defaults to a); applied after the plates.
    #[arg(long = "gate", value_parser = parse_gate)]
    pub gate: Vec<Vec<WaveplatePlacement>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SettingsKind {
    Basic,
    Chsh,
    Tomo,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Target Bell state, prepared from the ψ⁺ source with the matching plates.
    #[arg(long, value_parser = parse_label, default_value = "psi+")]
    pub state: BellLabel,
    #[arg(long, default_value_t = 0.9618)]
    pub purity: f64,
    /// Pair rate, coincidences per second.
    #[arg(long, default_value_t = 715.0)]
    pub rate: f64,
    /// Background rate per setting, counts per second.
    #[arg(long, default_value_t = 0.0)]
    pub bg: f64,
    /// Integration time per setting, seconds.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    /// Extra source phase between |HV⟩ and |VH⟩, degrees.
    #[arg(long, default_value_t = 0.0, value_parser = parse_degrees)]
    pub phase: f64,
}

impl SourceArgs {
    fn config(&self, seed: u64) -> Result<SourceConfig> {
        let cfg = SourceConfig {
            base_label: BellLabel::PsiPlus,
            relative_phase: self.phase,
            purity: self.purity,
            pair_rate: self.rate,
            background_rate: self.bg,
            integration_time: self.time,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn plan(&self) -> Vec<WaveplatePlacement> {
        hwp_plan(self.state)
    }

    fn simulate(&self, seed: u64, settings: &[(AnalyzerSetting, AnalyzerSetting)]) -> Result<Vec<CountRecord>> {
        let mut records = generate_dataset(&self.config(seed)?, &self.plan(), settings)?;
        for r in &mut records {
            r.label = Some(self.state.token().to_string());
        }
        Ok(records)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = SettingsKind::Basic)]
    pub settings: SettingsKind,
    /// CHSH polarizer angles `a,a',b,b'` in degrees (for `--settings chsh`).
    #[arg(long, value_parser = parse_chsh_angles)]
    pub angles: Option<ChshAngles>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Port-a plate angles in degrees; one curve each.
    #[arg(long, value_delimiter = ',', value_parser = parse_degrees, default_values = ["0", "22.5", "45", "67.5"])]
    pub alpha: Vec<f64>,
    /// First port-b plate angle β, degrees.
    #[arg(long, default_value_t = 0.0, value_parser = parse_degrees)]
    pub start: f64,
    /// Last β, degrees (inclusive).
    #[arg(long, default_value_t = 180.0, value_parser = parse_degrees)]
    pub stop: f64,
    #[arg(long, default_value_t = 2.5, value_parser = parse_degrees)]
    pub step: f64,
    /// Emit sampled counts instead of probabilities.
    #[arg(long, conflicts_with = "counts")]
    pub simulate: bool,
    /// Fit the visibility of a measured sweep (fixed port a, plate angles on port b).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Data set file (CSV or JSON).
    #[arg(long, required_unless_present = "simulate", conflicts_with = "simulate")]
    pub counts: Option<PathBuf>,
    /// Simulate the data set instead of reading one.
    #[arg(long)]
    pub simulate: bool,
    #[command(flatten)]
    pub source: SourceArgs,
}

impl AnalysisArgs {
    fn records(&self, seed: u64, settings: &[(AnalyzerSetting, AnalyzerSetting)]) -> Result<Vec<CountRecord>> {
        match &self.counts {
            Some(path) => read_records(path),
            None => self.source.simulate(seed, settings),
        }
    }
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[command(flatten)]
    pub input: AnalysisArgs,
    /// Polarizer angles `a,a',b,b'` in degrees.
    #[arg(long, value_parser = parse_chsh_angles)]
    pub angles: Option<ChshAngles>,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    #[command(flatten)]
    pub input: AnalysisArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Mle)]
    pub method: MethodArg,
    /// Reference state for the fidelity; defaults to `--state`.
    #[arg(long, value_parser = parse_label)]
    pub target: Option<BellLabel>,
    #[arg(long, default_value_t = 0.1)]
    pub dilution: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Linear,
    Mle,
}

fn parse_label(s: &str) -> std::result::Result<BellLabel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_degrees(s: &str) -> std::result::Result<f64, String> {
    let deg: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not an angle in degrees"))?;
    if !deg.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(deg.to_radians())
}

fn parse_port(s: &str) -> std::result::Result<Port, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_placement(s: &str) -> std::result::Result<WaveplatePlacement, String> {
    let (port, deg) = s
        .split_once(':')
        .ok_or_else(|| format!("expected port:degrees, got '{s}'"))?;
    Ok(WaveplatePlacement::new(parse_port(port)?, parse_degrees(deg)?))
}

/// Gate token as half-wave plates: `Z` is the plate at 0°, `X` at 45°. `XZ`
/// applies `X` first and then `Z`, giving the operator `Z·X = iY`.
fn parse_gate(s: &str) -> std::result::Result<Vec<WaveplatePlacement>, String> {
    let (port, gate) = match s.split_once(':') {
        Some((p, g)) => (parse_port(p)?, g),
        None => (Port::A, s),
    };
    let deg = |d: f64| WaveplatePlacement::new(port, d.to_radians());
    match gate.trim().to_ascii_uppercase().as_str() {
        "I" => Ok(vec![]),
        "Z" => Ok(vec![deg(0.0)]),
        "X" => Ok(vec![deg(45.0)]),
        "XZ" => Ok(vec![deg(45.0), deg(0.0)]),
        other => Err(format!("unknown gate '{other}' (expected I, X, Z or XZ)")),
    }
}

fn parse_chsh_angles(s: &str) -> std::result::Result<ChshAngles, String> {
    let v = s
        .split(',')
        .map(parse_degrees)
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    match v[..] {
        [a, a_prime, b, b_prime] => Ok(ChshAngles {
            a,
            a_prime,
            b,
            b_prime,
        }),
        _ => Err(format!("expected four angles a,a',b,b', got {}", v.len())),
    }
}

/// Failure of a command: the message and the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        // the reader went away (e.g. `| head`): nothing left to report
        if let Error::Io(io) = &e {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return CliError {
                    code: 0,
                    message: String::new(),
                };
            }
        }
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) => 1,
        Error::Domain(_) | Error::InvalidConfig(_) | Error::MissingSettings(_) | Error::ZeroTotal(_) | Error::Parse { .. } => 3,
        Error::Numerical(_) => 4,
    }
}

/// Runs the command line `args` (program name first), writing results that
/// have no `--out` to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> std::result::Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError {
        code: if e.use_stderr() { 2 } else { 0 },
        message: e.to_string(),
    })?;
    execute(&cli, stdout).map_err(CliError::from)
}

/// Entry point for the binary; returns the exit code.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(std::env::args_os(), &mut lock) {
        Ok(()) => 0,
        Err(e) if e.code == 0 => {
            print!("{}", e.message);
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message.trim_end());
            e.code
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Transform(args) => cmd_transform(cli, args, stdout),
        Command::Simulate(args) => cmd_simulate(cli, args, stdout),
        Command::Curve(args) => cmd_curve(cli, args, stdout),
        Command::Chsh(args) => cmd_chsh(cli, args, stdout),
        Command::Classify(args) => cmd_classify(cli, args, stdout),
        Command::Tomo(args) => cmd_tomo(cli, args, stdout),
    }
}

fn read_records(path: &Path) -> Result<Vec<CountRecord>> {
    io::read_dataset(File::open(path)?)
}

fn with_output(cli: &Cli, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

#[derive(Serialize)]
struct Amplitude {
    component: String,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Serialize)]
struct TransformReport {
    input: BellLabel,
    plan: Vec<String>,
    result: Option<BellLabel>,
    best_overlap: f64,
    hv: Vec<Amplitude>,
    da: Vec<Amplitude>,
    bell_overlaps: std::collections::BTreeMap<&'static str, f64>,
}

fn amplitudes(state: &TwoQubitState, basis: Basis) -> Vec<Amplitude> {
    let [l0, l1] = basis.labels();
    let names = [[l0, l0], [l0, l1], [l1, l0], [l1, l1]];
    express_in_basis(state, basis, basis)
        .iter()
        .zip(names)
        .map(|(z, n): (&C64, [char; 2])| Amplitude {
            component: n.iter().collect(),
            re: clean(z.re),
            im: clean(z.im),
            probability: clean(z.norm_sqr()),
        })
        .collect()
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

fn placement_token(p: &WaveplatePlacement) -> String {
    let port = match p.port {
        Port::A => "a",
        Port::B => "b",
    };
    format!("{port}:{}", format_degrees(p.theta.to_degrees()))
}

fn cmd_transform(cli: &Cli, args: &TransformArgs, stdout: &mut dyn Write) -> Result<()> {
    let plan: Vec<WaveplatePlacement> = args
        .hwp
        .iter()
        .copied()
        .chain(args.gate.iter().flatten().copied())
        .collect();
    let state = apply_plan(&bell_state(args.input), &plan)?;
    let (best, overlap) = state.closest_bell();
    let report = TransformReport {
        input: args.input,
        plan: plan.iter().map(placement_token).collect(),
        result: ((overlap - 1.0).abs() < 1e-9).then_some(best),
        best_overlap: overlap,
        hv: amplitudes(&state, Basis::HV),
        da: amplitudes(&state, Basis::DA),
        bell_overlaps: state.bell_overlaps().iter().map(|(l, o)| (l.token(), clean(*o))).collect(),
    };
    with_output(cli, stdout, |w| match cli.format {
        Format::Json => io::write_json(&report, w),
        Format::Csv => write_transform_text(&report, w),
    })
}

fn write_transform_text(r: &TransformReport, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "input: {}", r.input)?;
    let plan = if r.plan.is_empty() { "none".to_string() } else { r.plan.join(" ") };
    writeln!(w, "plates: {plan}")?;
    match r.result {
        Some(l) => writeln!(w, "result: {l} (overlap {:.12})", r.best_overlap)?,
        None => writeln!(w, "result: not a Bell state (best overlap {:.12})", r.best_overlap)?,
    }
    for (title, amps) in [("H/V basis", &r.hv), ("D/A basis", &r.da)] {
        writeln!(w, "{title}:")?;
        for a in amps.iter() {
            writeln!(w, "  {}  {:+.12} {:+.12}i", a.component, a.re, a.im)?;
        }
    }
    writeln!(w, "Bell overlaps:")?;
    for l in BellLabel::ALL {
        writeln!(w, "  {:<5}{:.12}", l.token(), r.bell_overlaps[l.token()])?;
    }
    Ok(())
}

fn settings_for(kind: SettingsKind, angles: &ChshAngles) -> Vec<(AnalyzerSetting, AnalyzerSetting)> {
    match kind {
        SettingsKind::Basic => basic_settings(),
        SettingsKind::Chsh => angles.settings(),
        SettingsKind::Tomo => tomo_settings(),
    }
}

fn write_records(cli: &Cli, records: &[CountRecord], stdout: &mut dyn Write) -> Result<()> {
    with_output(cli, stdout, |w| match cli.format {
        Format::Csv => io::write_dataset_csv(records, w),
        Format::Json => io::write_dataset_json(records, w),
    })
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let settings = settings_for(args.settings, &args.angles.unwrap_or_default());
    let records = args.source.simulate(cli.seed, &settings)?;
    write_records(cli, &records, stdout)
}

#[derive(Serialize)]
struct CurveReport {
    alpha_deg: f64,
    column: &'static str,
    points: Vec<CurveRow>,
}

#[derive(Serialize)]
struct CurveRow {
    two_beta_deg: f64,
    value: f64,
}

#[derive(Serialize)]
struct VisibilityReport {
    visibility: f64,
    sigma: f64,
    points: usize,
}

fn cmd_curve(cli: &Cli, args: &CurveArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(path) = &args.counts {
        let records = read_records(path)?;
        let (visibility, sigma) = visibility_from_records(&records, args.resamples, cli.seed)?;
        let report = VisibilityReport {
            visibility,
            sigma,
            points: records.len(),
        };
        return with_output(cli, stdout, |w| match cli.format {
            Format::Json => io::write_json(&report, w),
            Format::Csv => {
                writeln!(w, "visibility,sigma,points")?;
                writeln!(w, "{},{},{}", report.visibility, report.sigma, report.points)?;
                Ok(())
            }
        });
    }

    let betas = sweep(args.start, args.stop, args.step)?;
    let cfg = args.source.config(cli.seed)?;
    let rho = transform_source(&make_source_state(&cfg)?, &args.source.plan());
    let column = if args.simulate { "counts" } else { "probability" };
    let mut curves = Vec::with_capacity(args.alpha.len());
    for (k, &alpha) in args.alpha.iter().enumerate() {
        let mut points = visibility_curve(&rho, alpha, &betas)?;
        if args.simulate {
            let a = AnalyzerSetting::Hwp(alpha);
            for (i, p) in points.iter_mut().enumerate() {
                let b = AnalyzerSetting::Hwp(p.two_beta / 2.0);
                let mean = expected_count(&rho, &a, &b, &cfg)?;
                let index = (k * betas.len() + i) as u64;
                p.value = crate::source::sample_counts(mean, &mut crate::source::substream(cli.seed, index)) as f64;
            }
        }
        curves.push((alpha, points));
    }

    match (cli.format, &cli.out) {
        (Format::Json, _) => {
            let report: Vec<CurveReport> = curves
                .iter()
                .map(|(alpha, pts)| CurveReport {
                    alpha_deg: alpha.to_degrees(),
                    column,
                    points: pts
                        .iter()
                        .map(|p| CurveRow {
                            two_beta_deg: p.two_beta.to_degrees(),
                            value: p.value,
                        })
                        .collect(),
                })
                .collect();
            with_output(cli, stdout, |w| io::write_json(&report, w))
        }
        (Format::Csv, Some(path)) if curves.len() > 1 => {
            for (alpha, pts) in &curves {
                let file = curve_path(path, *alpha);
                let mut w = BufWriter::new(File::create(&file)?);
                io::write_curve_csv(pts, column, &mut w)?;
                w.flush()?;
            }
            Ok(())
        }
        (Format::Csv, _) => with_output(cli, stdout, |w| write_curve_blocks(&curves, column, w)),
    }
}

/// `curves.csv` with α = 22.5° becomes `curves_alpha22.5.csv`.
pub fn curve_path(base: &Path, alpha: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_alpha{}.{ext}", format_degrees(alpha.to_degrees())))
}

fn write_curve_blocks(curves: &[(f64, Vec<CurvePoint>)], column: &str, w: &mut dyn Write) -> Result<()> {
    let single = curves.len() == 1;
    for (i, (alpha, pts)) in curves.iter().enumerate() {
        if !single {
            if i > 0 {
                writeln!(w)?;
            }
            writeln!(w, "# alpha_deg={}", format_degrees(alpha.to_degrees()))?;
        }
        io::write_curve_csv(pts, column, &mut *w)?;
    }
    Ok(())
}

fn cmd_chsh(cli: &Cli, args: &ChshArgs, stdout: &mut dyn Write) -> Result<()> {
    let angles = args.angles.unwrap_or_default();
    let records = args.input.records(cli.seed, &angles.settings())?;
    let result = chsh_s(&records, args.input.source.state, &angles, args.resamples, cli.seed)?;
    with_output(cli, stdout, |w| match cli.format {
        Format::Json => io::write_json(&result, w),
        Format::Csv => write_chsh_csv(&result, w),
    })
}

fn write_chsh_csv(r: &ChshResult, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "quantity,a_deg,b_deg,sign,value")?;
    for t in &r.terms {
        writeln!(
            w,
            "E,{},{},{},{}",
            format_degrees(t.a),
            format_degrees(t.b),
            t.sign,
            t.e
        )?;
    }
    writeln!(w, "S,,,,{}", r.s)?;
    writeln!(w, "sigma_S,,,,{}", r.sigma_s)?;
    Ok(())
}

fn cmd_classify(cli: &Cli, args: &AnalysisArgs, stdout: &mut dyn Write) -> Result<()> {
    let records = args.records(cli.seed, &basic_settings())?;
    let result = classify_bell(&records)?;
    with_output(cli, stdout, |w| match cli.format {
        Format::Json => io::write_json(&result, w),
        Format::Csv => write_classification_csv(&result, w),
    })
}

fn write_classification_csv(r: &ClassificationResult, w: &mut dyn Write) -> Result<()> {
    let header: Vec<String> = BellLabel::ALL.iter().map(|l| format!("score_{l}")).collect();
    writeln!(w, "label,confident,{}", header.join(","))?;
    let scores: Vec<String> = BellLabel::ALL.iter().map(|l| r.score(*l).to_string()).collect();
    writeln!(w, "{},{},{}", r.label, r.confident, scores.join(","))?;
    Ok(())
}

fn cmd_tomo(cli: &Cli, args: &TomoArgs, stdout: &mut dyn Write) -> Result<()> {
    let records = args.input.records(cli.seed, &tomo_settings())?;
    let data = TomographyData::from_records(&records)?;
    let target = bell_state(args.target.unwrap_or(args.input.source.state));
    let method = match args.method {
        MethodArg::Linear => Method::Linear,
        MethodArg::Mle => Method::Mle,
    };
    let mle = MleConfig {
        dilution: args.dilution,
        max_iterations: args.max_iter,
        ..MleConfig::default()
    };
    let result = reconstruct(&data, method, &target, &mle)?;
    with_output(cli, stdout, |w| match cli.format {
        Format::Json => io::write_json(&result, w),
        Format::Csv => write_tomo_csv(&result, w),
    })
}

fn write_tomo_csv(r: &TomographyResult, w: &mut dyn Write) -> Result<()> {
    writeln!(
        w,
        "# target={} fidelity={} purity={} method={} iterations={}",
        r.target_name(),
        r.fidelity,
        r.purity,
        match r.method {
            Method::Linear => "linear",
            Method::Mle => "mle",
        },
        r.iterations
    )?;
    io::write_density_table_csv(r, w)
}
