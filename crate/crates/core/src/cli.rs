//! `combderate` command-line front end.
//!
//! Every table is written as CSV: one `#` comment line recording the full
//! configuration, a header row, then data rows with 6 decimal places.
//!
//! Exit codes: 0 success, 1 selftest or oracle failure, 2 argument or
//! validity error, 3 input-data error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compensator::{maxflat_coeffs, maxflat_coeffs_derated, narrowband_warning};
use crate::derating::{coefficient_table, DeratingSpec};
use crate::response::{
    comb_response, deviation_sweep, sinc_limit, uniform_grid, BandContext, BranchSum, CombSpec,
    FrequencyResponse, Variant, DEFAULT_POINTS_PER_PI,
};
use crate::stream::{
    direct_fir_oracle, plan_wordlength, run_chain_with, FirPlacement, SampleStream,
};
use crate::{compensated_response, selftest, Error, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "combderate",
    version,
    about = "Derated comb decimator design and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derating filter coefficients and word growth
    Coeffs(CoeffsArgs),
    /// Sampled magnitude responses
    Response(ResponseArgs),
    /// Pass-band deviation against M
    Deviation(DeviationArgs),
    /// Deviation sweep of the sharpened comb 3H^2 - 2H^3
    Sharpen(SweepArgs),
    /// Deviation sweep of a bifurcated-zero cascade
    Cascade(CascadeArgs),
    /// Maximally flat compensator coefficients and edge gains
    Compensate(CompensateArgs),
    /// Run the bit-exact integer decimator on a sample file
    Simulate(SimulateArgs),
    /// Run the built-in invariant suites
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, conflicts_with = "all")]
    pub order: Option<u32>,
    /// Emit every row N = 1..=11 (the default when no order is given)
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Both,
    Derated,
    Underated,
}

impl Which {
    fn flags(self) -> Vec<bool> {
        match self {
            Which::Both => vec![false, true],
            Which::Derated => vec![true],
            Which::Underated => vec![false],
        }
    }

    fn label(self) -> &'static str {
        match self {
            Which::Both => "both",
            Which::Derated => "derated",
            Which::Underated => "underated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stages {
    Both,
    Single,
    Two,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[arg(long, default_value_t = 3)]
    pub order: u32,
    #[arg(long, default_value_t = 4)]
    pub m: u32,
    /// Add the M -> infinity limit column
    #[arg(long)]
    pub limit: bool,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub variants: Which,
    #[arg(long, conflicts_with_all = ["cascade", "compensate"])]
    pub sharpened: bool,
    /// Cascade preset such as "3+1"
    #[arg(long, conflicts_with = "compensate")]
    pub cascade: Option<String>,
    /// Composite response with the maximally flat compensator
    #[arg(long)]
    pub compensate: bool,
    #[arg(long, value_enum, default_value_t = Stages::Both)]
    pub two_stage: Stages,
    /// Points per unit of omega/pi
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_PI)]
    pub grid: usize,
    /// Upper end of the grid in units of pi (default min(M, 8))
    #[arg(long)]
    pub span: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Decimation sweep "start:stop:step", a comma list, or one value
    #[arg(long, default_value = "4:32:4")]
    pub m: String,
    #[arg(long, default_value_t = 2)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub variants: Which,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeviationArgs {
    #[arg(long, default_value_t = 3)]
    pub order: u32,
    #[arg(long, conflicts_with = "cascade")]
    pub sharpened: bool,
    #[arg(long)]
    pub cascade: Option<String>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct CascadeArgs {
    #[arg(long, default_value = "3+1")]
    pub preset: String,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct CompensateArgs {
    #[arg(long, default_value_t = 3)]
    pub order: u32,
    #[arg(long, default_value = "4:32:4")]
    pub m: String,
    #[arg(long, default_value_t = 8)]
    pub l: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Placement {
    Input,
    Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub order: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub derated: bool,
    /// Input word length B_in
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
    /// Newline-delimited signed integers ("-" for standard input)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Placement::Input)]
    pub placement: Placement,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SampleOutOfRange { .. } => Self::data(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// Parses `start:stop:step` (inclusive of `stop` when aligned), `a,b,c` or a
/// single value into a non-empty, strictly increasing list of `M ≥ 2`.
pub fn parse_sweep(spec: &str) -> std::result::Result<Vec<u32>, String> {
    let bad = || format!("invalid sweep `{spec}`");
    let values: Vec<u32> = if spec.contains(':') {
        let parts: Vec<u32> = spec
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step == 0 || stop < start {
            return Err(bad());
        }
        (start..=stop).step_by(step as usize).collect()
    } else {
        spec.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?
    };
    if values.is_empty() || values.iter().any(|&m| m < 2) || values.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(bad());
    }
    Ok(values)
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn open_output<'a>(
    path: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

/// Writes the provenance comment, header and rows.
fn write_table(
    out: &mut dyn Write,
    config: &str,
    header: &[String],
    rows: &[Vec<String>],
) -> std::result::Result<(), CliError> {
    writeln!(out, "# combderate {config}")?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    match command {
        Command::Coeffs(a) => cmd_coeffs(&a, stdout),
        Command::Response(a) => cmd_response(&a, stdout),
        Command::Deviation(a) => {
            let structure = match (&a.cascade, a.sharpened) {
                (Some(p), _) => Structure::Cascade(p.clone()),
                (None, true) => Structure::Sharpened,
                (None, false) => Structure::Comb(a.order),
            };
            cmd_deviation(structure, &a.sweep, stdout)
        }
        Command::Sharpen(a) => cmd_deviation(Structure::Sharpened, &a, stdout),
        Command::Cascade(a) => {
            cmd_deviation(Structure::Cascade(a.preset.clone()), &a.sweep, stdout)
        }
        Command::Compensate(a) => cmd_compensate(&a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(&a, stdout, stderr),
        Command::Selftest(a) => cmd_selftest(&a, stdout),
    }
}

fn coeff_row(s: &DeratingSpec) -> Vec<String> {
    let [t0, t1, t2] = s.int_taps();
    vec![
        s.order().to_string(),
        s.b().numer().to_string(),
        s.b().denom().to_string(),
        s.scale().to_string(),
        format!("({t0},{t1},{t2})"),
        s.norm().to_string(),
        s.extra_bits().to_string(),
    ]
}

pub fn cmd_coeffs(a: &CoeffsArgs, stdout: &mut dyn Write) -> CliResult {
    let (rows, config) = match a.order {
        Some(n) if !a.all => {
            let spec = DeratingSpec::new(n).map_err(|e| match e {
                Error::Degenerate => {
                    CliError::usage(format!("{e}; use the delay taps (0,1,0) with norm 1"))
                }
                other => CliError::from(other),
            })?;
            (vec![coeff_row(&spec)], format!("coeffs order={n}"))
        }
        _ => (
            coefficient_table().iter().map(coeff_row).collect(),
            "coeffs all".to_string(),
        ),
    };
    let header: Vec<String> = ["N", "b_num", "b_den", "A", "taps", "norm", "W_b"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut out = open_output(&a.out, stdout)?;
    write_table(&mut out, &config, &header, &rows)?;
    Ok(EXIT_OK)
}

type Column = (String, Box<dyn Fn(f64) -> crate::Result<f64>>);

pub fn cmd_response(a: &ResponseArgs, stdout: &mut dyn Write) -> CliResult {
    if a.grid < 2 {
        return Err(CliError::usage("grid density must be at least 2 points"));
    }
    let m = a.m;
    let order = a.order;
    CombSpec::new(order.max(1), m)?;
    let mut columns: Vec<Column> = Vec::new();
    let structure;

    if a.compensate {
        let spec = CombSpec::new(order, m)?;
        DeratingSpec::new(order)?;
        structure = format!("compensate two_stage={:?}", a.two_stage).to_lowercase();
        if matches!(a.two_stage, Stages::Both | Stages::Single) {
            columns.push((
                "mag_db_single_stage".into(),
                Box::new(move |w| Ok(compensated_response(spec, false, w)?.norm())),
            ));
        }
        if matches!(a.two_stage, Stages::Both | Stages::Two) {
            columns.push((
                "mag_db_two_stage".into(),
                Box::new(move |w| Ok(compensated_response(spec, true, w)?.norm())),
            ));
        }
    } else {
        let (base, limit_order): (Variant, u32) = if a.sharpened {
            structure = "sharpened".to_string();
            (Variant::Sharpened, 0)
        } else if let Some(p) = &a.cascade {
            let sum = BranchSum::preset(p)
                .ok_or_else(|| CliError::usage(format!("unknown cascade preset `{p}`")))?;
            structure = format!("cascade={p}");
            (Variant::Cascade, sum.branches()[0].order)
        } else {
            structure = "comb".to_string();
            (Variant::Conventional, order)
        };
        for derated in a.variants.flags() {
            let v = base.with_derating(derated);
            v.response::<f64>(limit_order, m, 0.0)?;
            columns.push((
                format!("mag_db_{}", v.label()),
                Box::new(move |w| Ok(v.response(limit_order, m, w)?.norm())),
            ));
        }
        if a.limit {
            let v = base;
            columns.push((
                "mag_db_limit".into(),
                Box::new(move |w| v.limit_magnitude(limit_order, w)),
            ));
        }
    }

    let span = a.span.unwrap_or(m.min(8)).max(1);
    let grid = uniform_grid::<f64>(span, a.grid);
    let responses = columns
        .iter()
        .map(|(_, f)| {
            FrequencyResponse::evaluate(grid.clone(), |w| Ok(crate::Complex::new(f(w)?, 0.0)))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let dbs: Vec<Vec<f64>> = responses.iter().map(|r| r.magnitude_db()).collect();

    let mut header = vec!["omega_over_pi".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    let rows: Vec<Vec<String>> = grid
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut row = vec![fmt6(w / std::f64::consts::PI)];
            row.extend(dbs.iter().map(|col| fmt6(col[i])));
            row
        })
        .collect();
    let config = format!(
        "response order={order} m={m} structure={structure} variants={} limit={} grid={} span={span}",
        a.variants.label(),
        a.limit,
        a.grid
    );
    let mut out = open_output(&a.out, stdout)?;
    write_table(&mut out, &config, &header, &rows)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub enum Structure {
    Comb(u32),
    Sharpened,
    Cascade(String),
}

pub fn cmd_deviation(structure: Structure, a: &SweepArgs, stdout: &mut dyn Write) -> CliResult {
    let ms = parse_sweep(&a.m).map_err(CliError::usage)?;
    let band = BandContext::new(a.l)?;
    let (base, order, label) = match &structure {
        Structure::Comb(n) => (Variant::Conventional, *n, format!("comb order={n}")),
        Structure::Sharpened => (Variant::Sharpened, 0, "sharpened".to_string()),
        Structure::Cascade(p) => {
            let sum = BranchSum::preset(p)
                .ok_or_else(|| CliError::usage(format!("unknown cascade preset `{p}`")))?;
            (
                Variant::Cascade,
                sum.branches()[0].order,
                format!("cascade={p}"),
            )
        }
    };
    let mut header = vec!["M".to_string()];
    let mut curves = Vec::new();
    for derated in a.variants.flags() {
        let v = base.with_derating(derated);
        header.push(format!(
            "deviation_db_{}",
            if derated { "derated" } else { "underated" }
        ));
        curves.push(deviation_sweep::<f64>(v, order, &ms, band)?);
    }
    if matches!(structure, Structure::Cascade(_)) {
        header.push("deviation_db_conventional".into());
        curves.push(deviation_sweep::<f64>(
            Variant::Conventional,
            order,
            &ms,
            band,
        )?);
    }
    let rows: Vec<Vec<String>> = ms
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut row = vec![m.to_string()];
            row.extend(curves.iter().map(|c| fmt6(c.deviation_db[i])));
            row
        })
        .collect();
    let config = format!(
        "deviation {label} m={} l={} variants={}",
        a.m,
        a.l,
        a.variants.label()
    );
    let mut out = open_output(&a.out, stdout)?;
    write_table(&mut out, &config, &header, &rows)?;
    Ok(EXIT_OK)
}

fn rational_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn cmd_compensate(
    a: &CompensateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult {
    let ms = parse_sweep(&a.m).map_err(CliError::usage)?;
    let band = BandContext::new(a.l)?;
    DeratingSpec::new(a.order)?;
    let warning = narrowband_warning(a.l);
    if let Some(w) = &warning {
        writeln!(stderr, "{w}")?;
    }
    let edge = band.band_edge::<f64>();
    let derated = maxflat_coeffs_derated(a.order);
    let mut rows = Vec::new();
    for &m in &ms {
        let spec = CombSpec::new(a.order, m)?;
        let single = maxflat_coeffs(a.order, m);
        let gs = compensated_response(spec, false, edge)?.norm();
        let gt = compensated_response(spec, true, edge)?.norm();
        rows.push(vec![
            m.to_string(),
            format!("{:.10}", rational_f64(single.c0)),
            format!("{:.10}", rational_f64(single.c1)),
            format!("{:.10}", rational_f64(derated.c0)),
            format!("{:.10}", rational_f64(derated.c1)),
            fmt6(20.0 * gs.log10()),
            fmt6(20.0 * gt.log10()),
            fmt6(20.0 * comb_response(spec, edge).norm().log10()),
            fmt6(20.0 * sinc_limit(a.order, edge).log10()),
        ]);
    }
    let header: Vec<String> = [
        "M",
        "c0_single",
        "c1_single",
        "c0_two_stage",
        "c1_two_stage",
        "edge_db_single",
        "edge_db_two_stage",
        "edge_db_uncompensated",
        "edge_db_limit",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut config = format!("compensate order={} m={} l={}", a.order, a.m, a.l);
    if warning.is_some() {
        config.push_str(" narrowband_warning=true");
    }
    let mut out = open_output(&a.out, stdout)?;
    write_table(&mut out, &config, &header, &rows)?;
    Ok(EXIT_OK)
}

fn read_samples(path: &PathBuf) -> std::result::Result<Vec<i128>, CliError> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::new(File::open(path)?))
    };
    let mut samples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: i128 = t
            .parse()
            .map_err(|_| CliError::data(format!("line {}: `{t}` is not an integer", i + 1)))?;
        samples.push(v);
    }
    Ok(samples)
}

pub fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    let plan = plan_wordlength(a.order, a.m, a.bits)?;
    let input = SampleStream::new(read_samples(&a.input)?, a.bits)?;
    let placement = match a.placement {
        Placement::Input => FirPlacement::Input,
        Placement::Output => FirPlacement::Output,
    };
    let output = run_chain_with(&input, plan, a.derated, placement)?;
    let oracle = direct_fir_oracle(&input, a.order, a.m, a.derated)?;
    let matches = output.samples() == oracle.samples();

    let mut out = open_output(&a.out, stdout)?;
    for v in output.samples() {
        writeln!(out, "{v}")?;
    }
    out.flush()?;

    writeln!(
        stderr,
        "# plan: order={} decim={} input_bits={} comb_growth_bits={} derate_bits={} total_bits={}",
        plan.order,
        plan.decim,
        plan.input_bits,
        plan.comb_growth_bits,
        plan.derate_bits,
        plan.total_bits
    )?;
    writeln!(
        stderr,
        "# derated: {} placement: {:?}",
        a.derated, a.placement
    )?;
    writeln!(stderr, "# gain: {}", plan.gain(a.derated))?;
    writeln!(
        stderr,
        "# samples: {} in, {} out",
        input.len(),
        output.len()
    )?;
    writeln!(stderr, "# oracle match: {matches}")?;
    Ok(if matches { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_selftest(a: &SelftestArgs, stdout: &mut dyn Write) -> CliResult {
    let outcomes = selftest::run_all(a.seed);
    let mut failed = 0;
    for o in &outcomes {
        match &o.result {
            Ok(detail) => writeln!(stdout, "PASS {:<22} {detail}", o.name)?,
            Err(msg) => {
                failed += 1;
                writeln!(stdout, "FAIL {:<22} {msg}", o.name)?
            }
        }
    }
    writeln!(
        stdout,
        "{} suites, {} failed (seed {})",
        outcomes.len(),
        failed,
        a.seed
    )?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
