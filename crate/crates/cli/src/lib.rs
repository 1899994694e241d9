//! Library side of the CLI: scenario loading, the analysis pipeline,
//! report rendering, and the preset catalogue. The binary in `main.rs` is a
//! thin shell around [`run`].

pub mod analyze;
pub mod presets;
pub mod report;
pub mod scenario;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use supercyc_core::criteria::{
    quotient_family_verdict, quotient_sequence, spectral_obstruction, OperatorMatrix,
    QuotientError, SpectralError,
};
use supercyc_core::domains::DomainPoint;
use supercyc_core::dynamics::iterate;
use supercyc_core::expr::Expression;
use supercyc_core::params::Params;

use analyze::Analysis;
use report::{render_fact, sig, sig_complex, verdict_label, Csv};

/// Everything that can stop a run, sorted by exit code. Usage and scenario
/// problems exit with 2, internal numeric failures with 3; a completed
/// analysis exits with 0 no matter what the verdicts say.
#[derive(Clone, Debug)]
pub enum CliError {
    Usage(String),
    Scenario(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Scenario(m) => write!(f, "scenario error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(
    name = "supercyc",
    version,
    about = "decides whether a weighted composition operator can be supercyclic, with cited numeric evidence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full check pipeline over a scenario file.
    Analyze {
        scenario: PathBuf,
        /// Directory for the text report, JSON sidecar, and CSV traces.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the symbol from a starting point and print the orbit as CSV.
    Orbit {
        scenario: PathBuf,
        /// Starting point, a constant expression such as "0.5+0.1*i".
        #[arg(long)]
        from: String,
        /// Number of iteration steps.
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print one quotient sequence as CSV and classify it.
    Quotient {
        scenario: PathBuf,
        /// First seed, a constant expression.
        #[arg(long)]
        z1: String,
        /// Second seed, a constant expression.
        #[arg(long)]
        z2: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run only the shift experiments of a scenario.
    Witness {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue obstruction for a matrix truncation stored as JSON.
    Spectrum { matrix: PathBuf },
    /// Re-run a shipped preset and print its report.
    Reproduce {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplies every grid resolution; the verdict set must not change.
        #[arg(long, default_value_t = 1)]
        grid_scale: u32,
    },
}

/// What a completed run prints: the primary payload for stdout and side
/// notes for stderr.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub stdout: String,
    pub notes: Vec<String>,
}

fn timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    format!("{secs} (unix seconds)")
}

fn write_file(dir: &Path, filename: &str, content: &str, notes: &mut Vec<String>) -> Result<(), CliError> {
    let path = dir.join(filename);
    fs::write(&path, content)
        .map_err(|e| CliError::Usage(format!("--out {}: {e}", path.display())))?;
    notes.push(format!("wrote {}", path.display()));
    Ok(())
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("--out {}: {e}", dir.display())))
}

/// Prints the timestamped report to stdout and, with `--out`, writes the
/// timestamp-free text report, the JSON sidecar, and every CSV trace.
fn emit_analysis(analysis: &Analysis, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let mut notes = Vec::new();
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        let name = &analysis.report.name;
        write_file(dir, &format!("{name}.report.txt"), &analysis.report.text(None), &mut notes)?;
        write_file(dir, &format!("{name}.report.json"), &analysis.report.json(), &mut notes)?;
        for csv in &analysis.csvs {
            write_file(dir, &csv.filename, &csv.content, &mut notes)?;
        }
    }
    Ok(RunOutput {
        stdout: analysis.report.text(Some(&timestamp())),
        notes,
    })
}

/// Parses a constant expression given for a point flag and evaluates it.
fn parse_point(flag: &str, src: &str) -> Result<Complex64, CliError> {
    let expr = Expression::parse(src)
        .map_err(|e| CliError::Usage(format!("{flag}: {e} (in {src:?})")))?;
    expr.eval(Complex64::new(0.0, 0.0))
        .map_err(|e| CliError::Usage(format!("{flag}: {e}; the flag takes a constant expression")))
}

fn run_orbit(
    path: &Path,
    from: &str,
    steps: usize,
    out: Option<&Path>,
) -> Result<RunOutput, CliError> {
    let s = scenario::load_scenario(path)?;
    let c = parse_point("--from", from)?;
    let start = if s.domain.kind.is_lattice() && c.im.abs() <= 1e-9 && (c.re - c.re.round()).abs() <= 1e-9
    {
        DomainPoint::Index(c.re.round() as i64)
    } else {
        DomainPoint::Complex(c)
    };
    if !s.domain.contains(start) {
        return Err(CliError::Usage(format!(
            "--from: point {} lies outside the domain",
            sig_complex(c)
        )));
    }
    let trace = iterate(&s.symbol, &s.domain, start, steps, &s.params);
    let rows = trace
        .points
        .iter()
        .enumerate()
        .map(|(n, z)| format!("{n},{},{}", sig(z.re), sig(z.im)))
        .collect();
    let csv = Csv::new(format!("{}.orbit.csv", s.name), "step,re,im", rows);
    let mut notes = vec![
        format!("orbit classification: {:?}", trace.class),
        format!("last-step residual = {}", sig(trace.residual)),
    ];
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_file(dir, &csv.filename, &csv.content, &mut notes)?;
    }
    Ok(RunOutput { stdout: csv.content, notes })
}

fn run_quotient(
    path: &Path,
    z1: &str,
    z2: &str,
    out: Option<&Path>,
) -> Result<RunOutput, CliError> {
    let s = scenario::load_scenario(path)?;
    let (src, f) = s.test_functions.first().ok_or_else(|| {
        CliError::Scenario(
            "the quotient subcommand needs at least one entry in testFunctions".to_string(),
        )
    })?;
    let a = parse_point("--z1", z1)?;
    let b = parse_point("--z2", z2)?;
    let diag = match quotient_sequence(&s.symbol, &s.weight, f, &s.domain, (a, b), &s.params) {
        Ok(diag) => diag,
        Err(QuotientError::SeedOutsideDomain(z)) => {
            return Err(CliError::Usage(format!(
                "seed {} lies outside the domain",
                sig_complex(z)
            )));
        }
        Err(QuotientError::AllSkipped) => {
            return Err(CliError::Scenario(
                "the quotient sequence is undefined for this pair: every index was skipped"
                    .to_string(),
            ));
        }
    };
    let csv = analyze::quotient_csv(&s.name, 0, 0, &diag);
    let mut notes = vec![format!(
        "f = {src}: {}",
        analyze::describe_quotient_class(&diag.class)
    )];
    if let Some(at) = diag.truncated_at {
        notes.push(format!("sequence truncated at index {at}"));
    }
    notes.push(format!(
        "verdict: {}",
        verdict_label(&quotient_family_verdict(&[diag]))
    ));
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_file(dir, &csv.filename, &csv.content, &mut notes)?;
    }
    Ok(RunOutput { stdout: csv.content, notes })
}

fn run_spectrum(path: &Path) -> Result<RunOutput, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&raw).map_err(|e| {
        CliError::Scenario(format!(
            "{}: expected a JSON array of rows of [re, im] pairs: {e}",
            path.display()
        ))
    })?;
    let rows: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let matrix = OperatorMatrix::from_rows(&rows).map_err(|e| match e {
        SpectralError::Eigensolver => CliError::Numeric(e.to_string()),
        other => CliError::Scenario(format!("{}: {other}", path.display())),
    })?;
    let verdict = spectral_obstruction(&matrix, &Params::default())
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut eigenvalues = matrix
        .eigenvalues()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()));

    let mut out = String::new();
    out.push_str(&format!("supercyc spectrum: {}\n", path.display()));
    out.push_str(&format!("dimension: {}\n", matrix.dimension()));
    out.push_str(&format!("norm estimate: {}\n", sig(matrix.norm_estimate())));
    out.push_str("eigenvalues (descending modulus):\n");
    for ev in &eigenvalues {
        out.push_str(&format!("  {}\n", sig_complex(*ev)));
    }
    out.push_str(&format!("outcome: {}\n", verdict_label(&verdict)));
    for fact in &verdict.evidence {
        out.push_str(&format!("  evidence: {}\n", render_fact(fact)));
    }
    for caveat in &verdict.caveats {
        out.push_str(&format!("  caveat: {caveat}\n"));
    }
    Ok(RunOutput { stdout: out, notes: Vec::new() })
}

/// Dispatches one parsed command line. All file writing happens here; the
/// caller only prints.
pub fn run(cli: Cli) -> Result<RunOutput, CliError> {
    match cli.command {
        Command::Analyze { scenario, out } => {
            let s = scenario::load_scenario(&scenario)?;
            let analysis = analyze::analyze(&s)?;
            emit_analysis(&analysis, out.as_deref())
        }
        Command::Orbit { scenario, from, steps, out } => {
            run_orbit(&scenario, &from, steps, out.as_deref())
        }
        Command::Quotient { scenario, z1, z2, out } => {
            run_quotient(&scenario, &z1, &z2, out.as_deref())
        }
        Command::Witness { scenario, out } => {
            let s = scenario::load_scenario(&scenario)?;
            let analysis = analyze::witness_only(&s)?;
            emit_analysis(&analysis, out.as_deref())
        }
        Command::Spectrum { matrix } => run_spectrum(&matrix),
        Command::Reproduce { id, out, grid_scale } => {
            let analysis = presets::reproduce(&id, grid_scale)?;
            emit_analysis(&analysis, out.as_deref())
        }
    }
}
