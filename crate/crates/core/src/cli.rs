//! `bbqram` command line: JSON documents in, JSON reports out.
//!
//! Exit codes: 0 success, 1 internal error, 2 input error, 3 degenerate
//! input (zero vector, row or matrix), 4 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{BitPath, SparseMatrix, SparseVector, Tolerance};
use crate::error::Error;
use crate::kptree::{KpForest, KpTree};
use crate::qram::{bucket_brigade_activations, fanout_activations, QramInstance, RouteCounters, RoutingLog};
use crate::stateprep::{self, PrepMetrics, PrepOptions, PrepResult, SignMethod};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bbqram", version, about = "Bucket-brigade qRAM and tree-based state preparation")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the partial-sum tree(s) for an input document.
    Build { input: PathBuf },
    /// Prepare the encoded state and verify it against the input.
    Prep(PrepArgs),
    /// Route one address through an empty switch tree.
    Route {
        /// Address width.
        #[arg(long)]
        n: usize,
        /// Address bits, most significant first, e.g. 110.
        address: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        trace_file: Option<PathBuf>,
    },
    /// Prepare random vectors and check fidelity and ancilla hygiene.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vectors per dimension.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
        dims: Vec<usize>,
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Debug, clap::Args)]
struct PrepArgs {
    input: PathBuf,
    /// Write the preparation trace to stderr.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    trace_file: Option<PathBuf>,
    /// Include aggregate qRAM and gate counts.
    #[arg(long)]
    metrics: bool,
    /// Include target and prepared amplitudes.
    #[arg(long)]
    target_check: bool,
    /// Matrix input: prepare this row only.
    #[arg(long, conflicts_with = "norms")]
    row: Option<usize>,
    /// Matrix input: prepare the row-norm state only.
    #[arg(long)]
    norms: bool,
    /// Overrides both amplitude and norm tolerances.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = SignArg::Kickback)]
    sign: SignArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Kickback,
    Cnot,
}

/// Input file schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputDocument {
    Vector { dim: usize, entries: Vec<VectorEntry> },
    Matrix { rows: usize, cols: usize, entries: Vec<MatrixEntry> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorEntry {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub index: [usize; 2],
    pub value: f64,
}

pub enum Input {
    Vector(SparseVector),
    Matrix(SparseMatrix),
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Input, String> {
        let doc: InputDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
        doc.validate().map_err(|e| e.to_string())
    }

    fn validate(self) -> Result<Input, Error> {
        Ok(match self {
            InputDocument::Vector { dim, entries } => {
                Input::Vector(SparseVector::new(dim, entries.into_iter().map(|e| (e.index, e.value)).collect())?)
            }
            InputDocument::Matrix { rows, cols, entries } => Input::Matrix(SparseMatrix::new(
                rows,
                cols,
                entries.into_iter().map(|e| (e.index[0], e.index[1], e.value)).collect(),
            )?),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct TreeSummary {
    pub depth: usize,
    pub levels: Vec<Vec<f64>>,
    pub signs: Vec<u8>,
}

impl From<&KpTree> for TreeSummary {
    fn from(t: &KpTree) -> Self {
        Self { depth: t.depth(), levels: t.levels().to_vec(), signs: t.sign_cells().to_vec() }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum BuildReport {
    Vector(TreeSummary),
    Matrix { rows: Vec<TreeSummary>, norms: TreeSummary },
}

#[derive(Debug, Default, Serialize)]
pub struct LevelMetrics {
    pub level: usize,
    pub queries: usize,
    pub routing_ops: usize,
    pub entangled_switches: usize,
    pub time_steps: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub fidelity: f64,
    pub ancilla_clean: bool,
    pub max_amplitude_error: f64,
    pub levels: Vec<LevelMetrics>,
    pub tree: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<PrepMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudeCheck>,
}

#[derive(Debug, Serialize)]
pub struct AmplitudeCheck {
    pub target: Vec<f64>,
    pub prepared: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct RouteReport {
    n: usize,
    address: String,
    route: RouteCounters,
    unroute: RouteCounters,
    entangled_switches: usize,
    expected_routing_ops: usize,
    bucket_brigade_activations: u64,
    fanout_activations: u64,
}

#[derive(Debug, Serialize)]
struct SelftestReport {
    seed: u64,
    preparations: usize,
    min_fidelity: f64,
    max_amplitude_error: f64,
    all_ancilla_clean: bool,
    failures: usize,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self { code: EXIT_INPUT, message: message.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroVector | Error::ZeroRow(_) | Error::ZeroMatrix => EXIT_DEGENERATE,
            Error::DirtyAncilla(_) => EXIT_VERIFY,
            Error::IndexOutOfRange { .. } | Error::InvalidBitPath(_) | Error::AddressWidth { .. } => EXIT_INPUT,
            Error::InvalidTolerance(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_INTERNAL, message: e.to_string() }
    }
}

/// Runs the CLI with explicit arguments and output streams; returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Build { input } => cmd_build(&input, out, err),
        Command::Prep(args) => cmd_prep(&args, out, err),
        Command::Route { n, address, trace, trace_file } => {
            cmd_route(n, &address, trace, trace_file.as_deref(), out, err)
        }
        Command::Selftest { seed, count, dims, eps } => cmd_selftest(seed, count, &dims, eps, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    InputDocument::parse(&text).map_err(Failure::input)
}

fn tolerance(eps: Option<f64>) -> Result<Tolerance, Failure> {
    match eps {
        Some(e) => Ok(Tolerance::new(e, e)?),
        None => Ok(Tolerance::default()),
    }
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn emit_trace(text: &str, to_stderr: bool, file: Option<&Path>, err: &mut dyn Write) -> Result<(), Failure> {
    if let Some(path) = file {
        fs::write(path, text)?;
    } else if to_stderr {
        err.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn cmd_build(input: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let report = match read_input(input)? {
        Input::Vector(v) => {
            if v.is_zero() {
                writeln!(err, "warning: zero vector; it cannot be prepared")?;
            }
            BuildReport::Vector(TreeSummary::from(&KpTree::build(&v)))
        }
        Input::Matrix(m) => {
            if m.nnz() == 0 {
                writeln!(err, "warning: zero matrix; it cannot be prepared")?;
            }
            let f = KpForest::build(&m);
            BuildReport::Matrix {
                rows: f.row_trees().iter().map(TreeSummary::from).collect(),
                norms: TreeSummary::from(f.norm_tree()),
            }
        }
    };
    print_json(out, &report)?;
    Ok(EXIT_OK)
}

fn level_metrics(result: &PrepResult) -> Vec<LevelMetrics> {
    let mut levels: Vec<LevelMetrics> = Vec::new();
    for q in &result.log.queries {
        if q.kind.starts_with("SIGN") {
            continue;
        }
        if levels.last().is_none_or(|l| l.level != q.level) {
            levels.push(LevelMetrics { level: q.level, ..Default::default() });
        }
        let l = levels.last_mut().expect("pushed above");
        l.queries += 1;
        l.routing_ops += q.metrics.routing_ops;
        l.entangled_switches = l.entangled_switches.max(q.metrics.entangled_switches);
        l.time_steps += q.metrics.time_steps;
    }
    levels
}

fn cmd_prep(args: &PrepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let tol = tolerance(args.eps)?;
    let opts = PrepOptions {
        tolerance: tol,
        sign_method: match args.sign {
            SignArg::Kickback => SignMethod::PhaseKickback,
            SignArg::Cnot => SignMethod::CnotFlip,
        },
    };
    let (result, tree, registers): (PrepResult, serde_json::Value, &[&str]) = match read_input(&args.input)? {
        Input::Vector(v) => {
            if args.row.is_some() || args.norms {
                return Err(Failure::input("--row and --norms need a matrix input"));
            }
            let t = KpTree::build(&v);
            let summary = serde_json::to_value(TreeSummary::from(&t)).expect("plain data");
            (stateprep::prepare_vector(&t, &opts)?, summary, &["dir"])
        }
        Input::Matrix(m) => {
            let f = KpForest::build(&m);
            let summary = serde_json::json!({
                "rows": f.row_trees().iter().map(TreeSummary::from).collect::<Vec<_>>(),
                "norms": TreeSummary::from(f.norm_tree()),
            });
            if let Some(i) = args.row {
                if i >= f.rows() {
                    return Err(Failure::input(format!("row {i} out of range for {} rows", f.rows())));
                }
                (stateprep::prepare_row(&f, i, &opts)?, summary, &["row", "col"])
            } else if args.norms {
                (stateprep::prepare_norms(&f, &opts)?, summary, &["row"])
            } else {
                (stateprep::prepare_matrix(&f, &opts)?, summary, &["row", "col"])
            }
        }
    };

    emit_trace(&result.log.trace_text(), args.trace, args.trace_file.as_deref(), err)?;

    let amplitudes = if args.target_check {
        Some(AmplitudeCheck {
            target: result.target.iter().map(|c| c.re).collect(),
            prepared: result.amplitudes(registers)?.iter().map(|c| c.re).collect(),
        })
    } else {
        None
    };
    let report = Report {
        fidelity: result.fidelity,
        ancilla_clean: result.ancilla_clean,
        max_amplitude_error: result.max_amplitude_error,
        levels: level_metrics(&result),
        tree,
        metrics: args.metrics.then(|| result.log.metrics.clone()),
        amplitudes,
    };
    print_json(out, &report)?;

    if report.fidelity < 1.0 - tol.eps_norm || !report.ancilla_clean {
        writeln!(err, "verification failed: fidelity {} ancilla_clean {}", report.fidelity, report.ancilla_clean)?;
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn cmd_route(
    n: usize,
    address: &str,
    trace: bool,
    trace_file: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let addr: BitPath = address.parse().map_err(|e: Error| Failure::input(e))?;
    if addr.depth() != n {
        return Err(Failure::input(format!("address {address:?} has {} bits, expected {n}", addr.depth())));
    }
    if n > 20 {
        return Err(Failure::input("n above 20 is not supported"));
    }
    let mut q = QramInstance::new(vec![0u8; 1 << n])?;
    let mut log = RoutingLog::new();
    q.route_address(&addr, &mut log)?;
    let entangled = q.active_switches();
    q.unroute(&mut log);
    emit_trace(&log.trace_text(), trace, trace_file, err)?;
    print_json(
        out,
        &RouteReport {
            n,
            address: addr.to_string(),
            route: log.forward,
            unroute: log.reverse,
            entangled_switches: entangled,
            expected_routing_ops: n * n.saturating_sub(1) / 2,
            bucket_brigade_activations: bucket_brigade_activations(n),
            fanout_activations: fanout_activations(n),
        },
    )?;
    Ok(EXIT_OK)
}

/// Vectors with entries uniform in `[-1, 1)`, a quarter of them zeroed,
/// never all zero.
pub fn random_vector(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

fn cmd_selftest(
    seed: u64,
    count: usize,
    dims: &[usize],
    eps: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let tol = tolerance(eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for &d in dims {
        if d == 0 {
            return Err(Failure::input("dimensions must be positive"));
        }
        for _ in 0..count {
            cases.push(random_vector(&mut rng, d));
        }
    }
    let opts = PrepOptions { tolerance: tol, ..Default::default() };
    let results: Vec<Result<(f64, f64, bool), Error>> = cases
        .par_iter()
        .map(|v| {
            let tree = KpTree::build(&SparseVector::from_dense(v)?);
            let r = stateprep::prepare_vector(&tree, &opts)?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let got = r.amplitudes(&["dir"])?;
            let err = got.iter().zip(v).map(|(g, x)| (g.re - x / norm).abs() + g.im.abs()).fold(0.0, f64::max);
            Ok((r.fidelity, err, r.ancilla_clean))
        })
        .collect();

    let mut report = SelftestReport {
        seed,
        preparations: results.len(),
        min_fidelity: 1.0,
        max_amplitude_error: 0.0,
        all_ancilla_clean: true,
        failures: 0,
    };
    for r in results {
        let (f, e, clean) = r?;
        report.min_fidelity = report.min_fidelity.min(f);
        report.max_amplitude_error = report.max_amplitude_error.max(e);
        report.all_ancilla_clean &= clean;
        if f < 1.0 - tol.eps_norm || !clean {
            report.failures += 1;
        }
    }
    print_json(out, &report)?;
    Ok(if report.failures == 0 { EXIT_OK } else { EXIT_VERIFY })
}
