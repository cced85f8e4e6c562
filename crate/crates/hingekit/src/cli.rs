//! Command-line interface.
//!
//! [`run`] takes its arguments and streams explicitly so the binary and the
//! tests drive the same code. Exit codes: 0 success, 2 malformed or invalid
//! input, 3 degenerate or non-generic geometry, 4 internal consistency
//! failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use hingekit_core::analysis::{
    cycle_mobility, cycle_mobility_exact, endpoint_singularity, endpoint_singularity_exact, frame_singularity,
    frame_singularity_exact, platform_flexibility, platform_flexibility_exact,
};
use hingekit_core::chain::{closure_residual, trace_flex, Chain, Configuration};
use hingekit_core::linkage::{check_linkage_invariance, cycle_to_linkage, moduli_invariants, Linkage};
use hingekit_core::scalar::Rational;
use hingekit_core::scenario::{classical_scenario, Model, Scenario, ScenarioKind, ScenarioParams, CLASSICAL_SCENARIOS};
use hingekit_core::DEFAULT_RANK_TOL;
use serde::Serialize;

use crate::json::{emit_linkage, emit_scenario, parse_linkage, parse_scenario, FormatError};
use crate::report::{exact_outcome, numeric_outcome, Report, Subject};
use crate::sweep::{sweep, write_csv, SweepOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hingekit", version, about = "Singularity, mobility and linkage analysis of hinge mechanisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Scenario file, or `-` for standard input.
    file: String,

    /// Relative rank tolerance (overrides the file's `tol`).
    #[arg(long)]
    tol: Option<f64>,

    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Singularity of the end-point or end-frame map of an open chain.
    AnalyzeChain {
        #[command(flatten)]
        input: Input,
        /// Joint angles, comma separated (default: all zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        /// Require an exact rational verdict.
        #[arg(long)]
        exact: bool,
    },
    /// Rank of the axis span and mobility of a closed cycle.
    AnalyzeCycle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        exact: bool,
    },
    /// Infinitesimal flexibility of a two-body platform.
    AnalyzePlatform {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        exact: bool,
    },
    /// Build the bar-and-joint linkage of a cycle at its reference placement.
    ConvertLinkage {
        /// Scenario file, or `-` for standard input.
        file: String,
        /// Print the linkage as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Independent and dependent edge lengths of a linkage file.
    Moduli {
        /// Linkage file, or `-` for standard input.
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Follow a one-parameter motion of a cycle from the reference placement.
    Flex {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        step_size: f64,
        /// Write the path as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Seeded Monte-Carlo sweep of chain singularities.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the table to this file instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads (default: one per core).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        threads: Option<u32>,
    },
    /// Print a classical scenario as JSON.
    Example {
        /// One of the names printed by `example --list`.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Scenario parameters as integers or fractions `a/b`, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<String>>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Degenerate(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Degenerate(_) => EXIT_DEGENERATE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Degenerate(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<hingekit_core::Error> for Failure {
    fn from(e: hingekit_core::Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else if e.is_degeneracy() {
            Failure::Degenerate(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Semantic(e) => Failure::Input(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("i/o error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, file: &str) -> Result<String, Failure> {
        let mut text = String::new();
        if file == "-" {
            self.stdin.read_to_string(&mut text)?;
        } else {
            text = std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("cannot read {file}: {e}")))?;
        }
        Ok(text)
    }

    fn scenario(&mut self, file: &str) -> Result<Scenario, Failure> {
        let text = self.read(file)?;
        parse_scenario(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))
    }

    fn print(&mut self, s: &str) -> Outcome {
        self.stdout.write_all(s.as_bytes())?;
        Ok(())
    }
}

fn expect_kind(s: &Scenario, kind: ScenarioKind) -> Outcome {
    if s.kind != kind {
        return Err(Failure::Input(format!("expected a {} scenario, found {}", kind.as_str(), s.kind.as_str())));
    }
    Ok(())
}

fn tolerance(flag: Option<f64>, s: &Scenario) -> Result<f64, Failure> {
    let t = flag.or(s.tol).unwrap_or(DEFAULT_RANK_TOL);
    if !(t.is_finite() && t > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

fn chain_of(s: &Scenario) -> Result<Chain, Failure> {
    match s.to_model()? {
        Model::Chain(c) => Ok(c),
        Model::Platform(_) => Err(Failure::Input("expected a chain or cycle scenario, found platform".into())),
    }
}

/// An exact outcome when every coordinate is rational, `Err` when
/// `required` and some coordinate is not.
fn optional_exact<T>(required: bool, f: impl FnOnce() -> hingekit_core::Result<T>) -> Result<Option<T>, Failure> {
    match f() {
        Ok(v) => Ok(Some(v)),
        Err(e) if !required && is_not_rational(&e) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn is_not_rational(e: &hingekit_core::Error) -> bool {
    match e {
        hingekit_core::Error::NotRational(_) => true,
        hingekit_core::Error::Scenario { source, .. } => is_not_rational(source),
        _ => false,
    }
}

fn emit(io: &mut Io<'_>, report: &Report, json: bool) -> Outcome {
    let text = if json { report.to_json() } else { report.to_text() };
    io.print(&text)
}

fn analyze_chain(io: &mut Io<'_>, input: &Input, theta: Option<Vec<f64>>, exact: bool) -> Outcome {
    let s = io.scenario(&input.file)?;
    expect_kind(&s, ScenarioKind::Chain)?;
    let tol = tolerance(input.tol, &s)?;
    let c = chain_of(&s)?;
    let at_reference = theta.as_ref().is_none_or(|t| t.iter().all(|&x| x == 0.0));
    let theta = Configuration::new(theta.unwrap_or_else(|| vec![0.0; c.joints()]));
    let k = c.end_frame().k();
    let subject = if k == 0 { Subject::EndpointMap } else { Subject::FrameMap };
    let v = if k == 0 { endpoint_singularity(&c, &theta, tol)? } else { frame_singularity(&c, &theta, tol)? };
    if exact && !at_reference {
        return Err(Failure::Input("exact analysis is only available at theta = 0".into()));
    }
    let ex = if at_reference {
        optional_exact(exact, || {
            let axes = s.exact_axes()?;
            let (origin, vecs) = s.exact_frame()?;
            if k == 0 {
                endpoint_singularity_exact(&axes, &origin)
            } else {
                frame_singularity_exact(&axes, &origin, &vecs)
            }
        })?
    } else {
        None
    };
    let report = Report {
        subject,
        d: s.d,
        theta: Some(theta.angles().to_vec()),
        numeric: Some(numeric_outcome(subject, &v)),
        exact: ex.map(|e| exact_outcome(subject, &e)),
    };
    emit(io, &report, input.json)
}

fn analyze_cycle(io: &mut Io<'_>, input: &Input, exact: bool) -> Outcome {
    let s = io.scenario(&input.file)?;
    expect_kind(&s, ScenarioKind::Cycle)?;
    let tol = tolerance(input.tol, &s)?;
    let v = cycle_mobility(&s.axes()?, tol)?;
    let ex = optional_exact(exact, || cycle_mobility_exact(&s.exact_axes()?))?;
    let report = Report {
        subject: Subject::Cycle,
        d: s.d,
        theta: None,
        numeric: Some(numeric_outcome(Subject::Cycle, &v)),
        exact: ex.map(|e| exact_outcome(Subject::Cycle, &e)),
    };
    emit(io, &report, input.json)
}

fn analyze_platform(io: &mut Io<'_>, input: &Input, exact: bool) -> Outcome {
    let s = io.scenario(&input.file)?;
    expect_kind(&s, ScenarioKind::Platform)?;
    let tol = tolerance(input.tol, &s)?;
    let Model::Platform(pf) = s.to_model()? else {
        return Err(Failure::Internal("platform scenario produced a chain".into()));
    };
    let v = platform_flexibility(&pf, tol)?;
    let ex = optional_exact(exact, || platform_flexibility_exact(s.d, &s.exact_legs()?))?;
    let report = Report {
        subject: Subject::Platform,
        d: s.d,
        theta: None,
        numeric: Some(numeric_outcome(Subject::Platform, &v)),
        exact: ex.map(|e| exact_outcome(Subject::Platform, &e)),
    };
    emit(io, &report, input.json)
}

#[derive(Serialize)]
struct ModuliReport<'a> {
    d: usize,
    n: usize,
    vertices: usize,
    edges: usize,
    independent: Vec<EdgeRow>,
    dependent: Vec<EdgeRow>,
    note: &'a str,
}

#[derive(Serialize)]
struct EdgeRow {
    a: String,
    b: String,
    length: f64,
}

fn edge_rows(es: &[hingekit_core::linkage::Edge]) -> Vec<EdgeRow> {
    es.iter().map(|e| EdgeRow { a: e.a.to_string(), b: e.b.to_string(), length: e.length }).collect()
}

fn moduli_text(lk: &Linkage, json: bool) -> Result<String, Failure> {
    let m = moduli_invariants(lk)?;
    let r = ModuliReport {
        d: lk.d,
        n: lk.n,
        vertices: lk.vertices.len(),
        edges: lk.edges.len(),
        independent: edge_rows(&m.independent),
        dependent: edge_rows(&m.dependent),
        note: m.note,
    };
    if json {
        let mut s = serde_json::to_string_pretty(&r).map_err(|e| Failure::Internal(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }
    let mut out = format!(
        "linkage in R^{} from {} hinges\nvertices: {}\nedges: {}\nindependent lengths: {}\ndependent lengths: {}\n",
        r.d,
        r.n,
        r.vertices,
        r.edges,
        r.independent.len(),
        r.dependent.len()
    );
    if !lk.edges.is_empty() && lk.d > 2 {
        let signs: Vec<&str> = lk.simplex_orientations().iter().map(|&o| if o > 0 { "+" } else { "-" }).collect();
        out.push_str(&format!("orientations: {}\n", signs.join(" ")));
    }
    for e in &r.independent {
        out.push_str(&format!("  {} {} {:.9}\n", e.a, e.b, e.length));
    }
    if !r.dependent.is_empty() {
        out.push_str(&format!("dependent ({}):\n", r.note));
        for e in &r.dependent {
            out.push_str(&format!("  {} {} {:.9}\n", e.a, e.b, e.length));
        }
    }
    Ok(out)
}

fn convert_linkage(io: &mut Io<'_>, file: &str, json: bool) -> Outcome {
    let s = io.scenario(file)?;
    expect_kind(&s, ScenarioKind::Cycle)?;
    let lk = cycle_to_linkage(&s.axes()?, s.d)?;
    let text = if json { emit_linkage(&lk) } else { moduli_text(&lk, false)? };
    io.print(&text)
}

fn moduli(io: &mut Io<'_>, file: &str, json: bool) -> Outcome {
    let text = io.read(file)?;
    let lk = parse_linkage(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let out = moduli_text(&lk, json)?;
    io.print(&out)
}

#[derive(Serialize)]
struct FlexReport {
    steps: usize,
    step_size: f64,
    path: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linkage_note: Option<String>,
}

fn flex(io: &mut Io<'_>, input: &Input, steps: usize, step_size: f64, csv_path: Option<&PathBuf>) -> Outcome {
    let s = io.scenario(&input.file)?;
    expect_kind(&s, ScenarioKind::Cycle)?;
    let tol = tolerance(input.tol, &s)?;
    if !(step_size.is_finite() && step_size > 0.0) {
        return Err(Failure::Input(format!("step size must be positive, got {step_size}")));
    }
    let c = chain_of(&s)?;
    let path = trace_flex(&c, &Configuration::zeros(c.joints()), steps, step_size, tol)?;
    let residuals =
        path.iter().map(|t| closure_residual(&c, t).map(|r| r.norm())).collect::<hingekit_core::Result<Vec<_>>>()?;
    let (length_drift, linkage_note) = match check_linkage_invariance(&c, &path, tol) {
        Ok(x) => (Some(x), None),
        Err(e) if e.is_internal() => return Err(e.into()),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(p) = csv_path {
        let f = File::create(p).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(f));
        let mut header = vec!["step".to_string()];
        header.extend((1..=c.joints()).map(|j| format!("theta_{j}")));
        header.push("residual".into());
        w.write_record(&header).map_err(|e| Failure::Input(e.to_string()))?;
        for (i, (t, r)) in path.iter().zip(&residuals).enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(t.angles().iter().map(|x| x.to_string()));
            rec.push(format!("{r:e}"));
            w.write_record(&rec).map_err(|e| Failure::Input(e.to_string()))?;
        }
        w.flush()?;
    }
    let report = FlexReport {
        steps,
        step_size,
        path: path.iter().map(|t| t.angles().to_vec()).collect(),
        residuals,
        length_drift,
        linkage_note,
    };
    if input.json {
        let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
        text.push('\n');
        return io.print(&text);
    }
    let mut out = format!("flex: {} steps of size {:e}\n", report.steps, report.step_size);
    for (i, (t, r)) in report.path.iter().zip(&report.residuals).enumerate() {
        let angles: Vec<String> = t.iter().map(|x| format!("{x:.6}")).collect();
        out.push_str(&format!("step {i}: ({}) residual {r:.3e}\n", angles.join(", ")));
    }
    let worst = report.residuals.iter().copied().fold(0.0, f64::max);
    out.push_str(&format!("max closure residual: {worst:.3e}\n"));
    match (&report.length_drift, &report.linkage_note) {
        (Some(x), _) => out.push_str(&format!("max edge-length drift: {x:.3e}\n")),
        (None, Some(n)) => out.push_str(&format!("linkage unavailable: {n}\n")),
        _ => {}
    }
    io.print(&out)
}

fn run_sweep(
    io: &mut Io<'_>,
    input: &Input,
    samples: u64,
    seed: u64,
    csv_path: Option<&PathBuf>,
    threads: Option<u32>,
) -> Outcome {
    let s = io.scenario(&input.file)?;
    if s.kind == ScenarioKind::Platform {
        return Err(Failure::Input("expected a chain or cycle scenario, found platform".into()));
    }
    let tol = tolerance(input.tol, &s)?;
    let c = chain_of(&s)?;
    let opts = SweepOptions { samples, seed, tol, threads: threads.map(|t| t as usize) };
    let report = sweep(&c, &opts)?;
    let summary = format!(
        "samples: {}\nseed: {}\nsingular: {}\nsigma_min: min {:.6e}, mean {:.6e}\n",
        report.samples, report.seed, report.singular_count, report.sigma_min_min, report.sigma_min_mean
    );
    let csv_err = |e: csv::Error| Failure::Input(format!("csv: {e}"));
    match csv_path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
            write_csv(&report, c.joints(), BufWriter::new(f)).map_err(csv_err)?;
            if input.json {
                let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
                text.push('\n');
                io.print(&text)
            } else {
                io.print(&summary)
            }
        }
        None if input.json => {
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
            text.push('\n');
            io.print(&text)
        }
        None => {
            write_csv(&report, c.joints(), &mut *io.stdout).map_err(csv_err)?;
            io.stderr.write_all(summary.as_bytes())?;
            Ok(())
        }
    }
}

fn example(
    io: &mut Io<'_>,
    name: Option<&str>,
    list: bool,
    seed: u64,
    d: Option<usize>,
    n: Option<usize>,
    values: Option<Vec<String>>,
) -> Outcome {
    if list {
        let mut out = CLASSICAL_SCENARIOS.join("\n");
        out.push('\n');
        return io.print(&out);
    }
    let name = name.unwrap_or_default();
    let values = values
        .unwrap_or_default()
        .iter()
        .map(|v| Rational::from_str(v.trim()).map_err(|_| Failure::Input(format!("invalid rational `{v}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let params = ScenarioParams { seed, d, n, values };
    let s = classical_scenario(name, &params)?;
    io.print(&emit_scenario(&s))
}

fn dispatch(io: &mut Io<'_>, cmd: Command) -> Outcome {
    match cmd {
        Command::AnalyzeChain { input, theta, exact } => analyze_chain(io, &input, theta, exact),
        Command::AnalyzeCycle { input, exact } => analyze_cycle(io, &input, exact),
        Command::AnalyzePlatform { input, exact } => analyze_platform(io, &input, exact),
        Command::ConvertLinkage { file, json } => convert_linkage(io, &file, json),
        Command::Moduli { file, json } => moduli(io, &file, json),
        Command::Flex { input, steps, step_size, csv } => flex(io, &input, steps, step_size, csv.as_ref()),
        Command::Sweep { input, samples, seed, csv, threads } => {
            run_sweep(io, &input, samples, seed, csv.as_ref(), threads)
        }
        Command::Example { name, list, seed, d, n, values } => example(io, name.as_deref(), list, seed, d, n, values),
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    match dispatch(&mut io, cli.command) {
        Ok(()) => {
            let _ = io.stdout.flush();
            EXIT_OK
        }
        Err(f) => {
            let _ = io.stdout.flush();
            let _ = writeln!(io.stderr, "error: {}", f.message());
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        use hingekit_core::Error;
        assert_eq!(Failure::from(Error::InternalConsistency("x".into())).code(), EXIT_INTERNAL);
        assert_eq!(Failure::from(Error::RigidCycle).code(), EXIT_DEGENERATE);
        assert_eq!(Failure::from(Error::NonGeneric { window: 1, reason: "r".into() }).code(), EXIT_DEGENERATE);
        assert_eq!(Failure::from(Error::UnknownScenario("x".into())).code(), EXIT_INPUT);
        let nested = Error::PathPoint { index: 2, source: Box::new(Error::InternalConsistency("x".into())) };
        assert_eq!(Failure::from(nested).code(), EXIT_INTERNAL);
    }
}
