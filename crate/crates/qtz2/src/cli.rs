//! Batch front-end. `run` parses arguments, does the work and returns the
//! exit status: 0 on success, 1 when the data or an R-matrix fails a
//! mathematical check, 2 on usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cocycle::{check_necessary, validate, ExtensionData, QtContext};
use crate::families::{self, classify_a, classify_k, recognize, Family, FamilyError};
use crate::hopf::HopfAlgebra;
use crate::io::{self, IoError};
use crate::rmatrix::{
    is_phi_symmetric, to_tensor, verify_qybe, verify_quasitriangular_with, RMatrix, VerifyMode,
};
use crate::solver::{
    enumerate_all_nontrivial, enumerate_general_tuples, enumerate_phi_symmetric,
    enumerate_special_tuples, enumerate_trivial, tuple_to_rmatrix, untwisted_context, Budget,
    SolveOptions, SolverError,
};

#[derive(Parser, Debug)]
#[command(name = "qtz2", version, about = "Quasitriangular structures on Z2-extensions of dual group algebras")]
struct Cli {
    /// Largest number of candidates any single search may visit.
    #[arg(long, global = true, default_value_t = Budget::default().max_candidates)]
    budget: u64,
    /// Largest group order accepted for enumeration and verification.
    #[arg(long, global = true, default_value_t = 256)]
    max_group_order: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Use a built-in data set instead of a data file
    /// (kac-paljutkin, K8n:n=<k>:untwisted|kp, A8n:n=<k>:paper|untwisted).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the cocycle identities and the necessary conditions.
    Validate {
        data: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
        /// Also run the exhaustive Hopf-axiom check.
        #[arg(long)]
        axioms: bool,
    },
    /// Print the group, fixed set, shift element and presentation.
    Info {
        data: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
    /// Enumerate R-matrices of one kind.
    Enumerate {
        data: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Re-certify every result with the brute-force verifier.
        #[arg(long)]
        verify: bool,
        /// Write the solution set as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write each R-matrix to its own file in this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check a supplied R-matrix: `verify DATA R` or `verify --preset NAME R`.
    Verify {
        #[arg(num_args = 1..=2, required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        input: Input,
        /// Also check the quantum Yang-Baxter equation.
        #[arg(long)]
        qybe: bool,
        /// Check commutation with the coproduct on every basis element.
        #[arg(long)]
        full: bool,
    },
    /// Closed-form classification for the K(8n) and A(8n) families.
    Classify {
        data: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
        /// Write the classification report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export data or an R-matrix: `export DATA [R]` or `export --preset NAME [R]`.
    Export {
        #[arg(num_args = 0..=2)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Trivial,
    General,
    Special,
    All,
    PhiSymmetric,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Matrix,
    Complex,
}

/// Why a command stopped early.
enum Stop {
    Usage(String),
    Failed(String),
}

impl From<IoError> for Stop {
    fn from(e: IoError) -> Self {
        Stop::Usage(e.to_string())
    }
}

impl From<FamilyError> for Stop {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Preset(_) | FamilyError::ZeroN => Stop::Usage(e.to_string()),
            FamilyError::Solver(s) => s.into(),
            _ => Stop::Failed(e.to_string()),
        }
    }
}

impl From<SolverError> for Stop {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Budget { .. } => Stop::Usage(format!("refused: {}; raise --budget to proceed", e)),
            _ => Stop::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Stop {
    fn from(e: std::io::Error) -> Self {
        Stop::Usage(format!("write failed: {}", e))
    }
}

type Outcome = Result<bool, Stop>;

/// Runs one command line. The report goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", text);
                    0
                }
                _ => {
                    let _ = write!(err, "{}", text);
                    2
                }
            };
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {}", msg);
        return 2;
    }
    match dispatch(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Stop::Failed(msg)) => {
            let _ = writeln!(err, "{}", msg);
            1
        }
        Err(Stop::Usage(msg)) => {
            let _ = writeln!(err, "error: {}", msg);
            2
        }
    }
}

/// Applies `RMATRIX_THREADS` to the global pool. A pool that is already
/// configured is left alone.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("RMATRIX_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("RMATRIX_THREADS must be a positive integer, got {:?}", v))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let opts = SolveOptions {
        budget: Budget {
            max_candidates: cli.budget,
        },
        ..Default::default()
    };
    match &cli.command {
        Command::Validate { data, input, axioms } => {
            let d = load(data.as_deref(), input)?;
            cmd_validate(&d, *axioms, cli.max_group_order, out)
        }
        Command::Info { data, input } => cmd_info(&load(data.as_deref(), input)?, out),
        Command::Enumerate {
            data,
            input,
            kind,
            verify,
            out: file,
            out_dir,
        } => {
            let d = load(data.as_deref(), input)?;
            guard_order(&d, cli.max_group_order)?;
            cmd_enumerate(&d, *kind, *verify, &opts, file.as_deref(), out_dir.as_deref(), out)
        }
        Command::Verify {
            files,
            input,
            qybe,
            full,
        } => {
            let (d, r) = load_with_rmatrix(files, input, true)?;
            guard_order(&d, cli.max_group_order)?;
            let mode = if *full { VerifyMode::FullBasis } else { VerifyMode::Generators };
            cmd_verify(&d, &r.expect("required"), *qybe, mode, out)
        }
        Command::Classify { data, input, out: file } => {
            let d = load(data.as_deref(), input)?;
            guard_order(&d, cli.max_group_order)?;
            cmd_classify(&d, input.preset.as_deref(), file.as_deref(), out)
        }
        Command::Export {
            files,
            input,
            format,
            out: file,
        } => {
            let (d, r) = load_with_rmatrix(files, input, false)?;
            cmd_export(&d, r.as_ref(), *format, file.as_deref(), out)
        }
    }
}

fn load(path: Option<&Path>, input: &Input) -> Result<ExtensionData, Stop> {
    match (path, &input.preset) {
        (Some(_), Some(_)) => Err(Stop::Usage("give either a data file or --preset, not both".into())),
        (None, None) => Err(Stop::Usage("a data file or --preset is required".into())),
        (Some(p), None) => Ok(io::read_data(p)?),
        (None, Some(name)) => Ok(families::preset(name)?),
    }
}

fn load_with_rmatrix(
    files: &[PathBuf],
    input: &Input,
    need_r: bool,
) -> Result<(ExtensionData, Option<RMatrix>), Stop> {
    let (data_path, r_path) = match (&input.preset, files) {
        (Some(_), []) => (None, None),
        (Some(_), [r]) => (None, Some(r)),
        (None, [d]) => (Some(d.as_path()), None),
        (None, [d, r]) => (Some(d.as_path()), Some(r)),
        _ => return Err(Stop::Usage("expected DATA [R] or --preset NAME [R]".into())),
    };
    let d = load(data_path, input)?;
    let r = match r_path {
        Some(p) => Some(io::read_rmatrix(&d, p)?),
        None if need_r => return Err(Stop::Usage("an R-matrix file is required".into())),
        None => None,
    };
    Ok((d, r))
}

fn guard_order(d: &ExtensionData, max: usize) -> Result<(), Stop> {
    let n = d.group().order();
    if n > max {
        return Err(Stop::Usage(format!(
            "refused: |G| = {} exceeds --max-group-order {}",
            n, max
        )));
    }
    Ok(())
}

fn write_file(path: &Path, v: &Value) -> Result<(), Stop> {
    std::fs::write(path, io::to_pretty(v)).map_err(|e| Stop::Usage(format!("cannot write {}: {}", path.display(), e)))
}

fn cmd_validate(d: &ExtensionData, axioms: bool, max_order: usize, out: &mut dyn Write) -> Outcome {
    let rep = validate(d);
    write!(out, "{}", rep)?;
    if !rep.is_valid() {
        return Ok(false);
    }
    let nec = check_necessary(d);
    if nec.holds() {
        writeln!(out, "necessary conditions for non-trivial R-matrices hold")?;
    } else {
        for line in nec.diagnostics() {
            writeln!(out, "necessary condition fails: {}", line)?;
        }
    }
    if axioms {
        guard_order(d, max_order)?;
        let hopf = HopfAlgebra::new(d, 1);
        let h = hopf.verify_hopf_axioms();
        writeln!(out, "{}", h.describe(d))?;
        writeln!(out, "hopf axioms: {}", if h.passed() { "pass" } else { "FAIL" })?;
        return Ok(h.passed());
    }
    Ok(true)
}

fn cmd_info(d: &ExtensionData, out: &mut dyn Write) -> Outcome {
    let g = d.group();
    let el = |x: usize| g.fmt_element(x);
    let list = |xs: &[usize]| xs.iter().map(|&x| el(x)).collect::<Vec<_>>().join(" ");
    writeln!(out, "|G| = {}  factors {:?}", g.order(), g.factor_orders())?;
    let rep = validate(d);
    if !rep.is_valid() {
        write!(out, "{}", rep)?;
        return Ok(false);
    }
    writeln!(out, "|S| = {}: {}", d.s_set().len(), list(d.s_set()))?;
    writeln!(out, "|T| = {}: {}", d.t_set().len(), list(d.t_set()))?;
    let eta_nontrivial = g
        .elements()
        .flat_map(|x| g.elements().map(move |y| (x, y)))
        .filter(|&(x, y)| !d.eta(x, y).is_one())
        .count();
    writeln!(
        out,
        "eta: {} of {} values differ from 1; values lie in mu_{}",
        eta_nontrivial,
        g.order() * g.order(),
        d.value_order()
    )?;
    match QtContext::new(d.clone()) {
        Ok(ctx) => {
            let p = ctx.presentation();
            writeln!(out, "b = {}", el(ctx.shift()))?;
            writeln!(out, "a = {}", el(ctx.base_point()))?;
            for (i, (&s, &k)) in p.s_gens.iter().zip(&p.orders).enumerate() {
                writeln!(
                    out,
                    "s{} = {} of order {}; eta(a, s{}) = {}",
                    i + 1,
                    el(s),
                    k,
                    i + 1,
                    d.eta(ctx.base_point(), s)
                )?;
            }
            writeln!(out, "a^2 = s^{:?}, b = s^{:?}", p.m_exps, p.p_exps)?;
            writeln!(out, "eta(a, b) = {}", d.eta(ctx.base_point(), ctx.shift()))?;
        }
        Err(_) => {
            for line in check_necessary(d).diagnostics() {
                writeln!(out, "necessary condition fails: {}", line)?;
            }
        }
    }
    Ok(true)
}

fn cmd_enumerate(
    d: &ExtensionData,
    kind: Kind,
    verify: bool,
    opts: &SolveOptions,
    file: Option<&Path>,
    out_dir: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let rep = validate(d);
    if !rep.is_valid() {
        write!(out, "{}", rep)?;
        return Ok(false);
    }
    // General tuples give R-matrices of the untwisted algebra, so they are
    // exported and verified against that data.
    let mut target = d.clone();
    let mut found: Vec<(&str, RMatrix)> = vec![];
    let mut diagnostics = vec![];
    if matches!(kind, Kind::Trivial | Kind::All) {
        found.extend(enumerate_trivial(d, opts)?.into_iter().map(|r| ("trivial", r)));
    }
    match kind {
        Kind::All => {
            let e = enumerate_all_nontrivial(d, opts)?;
            diagnostics = e.diagnostics;
            found.extend(e.rmatrices.into_iter().map(|r| ("special", r)));
        }
        Kind::PhiSymmetric => {
            let e = enumerate_phi_symmetric(d, opts)?;
            diagnostics = e.diagnostics;
            found.extend(e.rmatrices.into_iter().map(|r| ("phi-symmetric", r)));
        }
        Kind::Special | Kind::General => match QtContext::new(d.clone()) {
            Ok(ctx) => {
                let (ctx, label, tuples) = if kind == Kind::Special {
                    let t = enumerate_special_tuples(&ctx, &opts.budget)?;
                    (ctx, "special", t)
                } else {
                    let plain = untwisted_context(&ctx);
                    let t = enumerate_general_tuples(&plain, &opts.budget)?;
                    (plain, "general", t)
                };
                let mut rs: Vec<RMatrix> = tuples.iter().map(|t| tuple_to_rmatrix(&ctx, t)).collect();
                rs.sort();
                rs.dedup();
                target = ctx.data().clone();
                found.extend(rs.into_iter().map(|r| (label, r)));
            }
            Err(crate::cocycle::ContextError::Necessary(n)) => diagnostics = n.diagnostics(),
            Err(e) => return Err(Stop::Failed(e.to_string())),
        },
        Kind::Trivial => {}
    }
    if kind == Kind::General {
        writeln!(out, "general solutions are R-matrices of the untwisted algebra on the same group and action")?;
    }
    for line in &diagnostics {
        writeln!(out, "necessary condition fails: {}", line)?;
    }
    let mut ok = true;
    for (i, (label, r)) in found.iter().enumerate() {
        if verify {
            let rep = verify_quasitriangular_with(&target, r, VerifyMode::Generators);
            writeln!(out, "R{} {}: {}", i, label, if rep.passed() { "verified" } else { "FAILED" })?;
            if !rep.passed() {
                writeln!(out, "{}", rep.describe(&target))?;
                ok = false;
            }
        }
    }
    let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
    for (label, _) in &found {
        *counts.entry(label).or_default() += 1;
    }
    let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{} {}", v, k)).collect();
    writeln!(
        out,
        "found {} R-matrices{}",
        found.len(),
        if summary.is_empty() { String::new() } else { format!(" ({})", summary.join(", ")) }
    )?;
    let entries: Vec<(&str, &RMatrix)> = found.iter().map(|(k, r)| (*k, r)).collect();
    if let Some(path) = file {
        write_file(path, &io::solution_set_to_json(&target, &entries))?;
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Stop::Usage(format!("cannot create {}: {}", dir.display(), e)))?;
        if kind == Kind::General {
            write_file(&dir.join("data.json"), &io::data_to_json(&target))?;
        }
        for (i, (_, r)) in found.iter().enumerate() {
            write_file(&dir.join(format!("r{:04}.json", i)), &io::rmatrix_to_json(r))?;
        }
    }
    Ok(ok)
}

fn cmd_verify(d: &ExtensionData, r: &RMatrix, qybe: bool, mode: VerifyMode, out: &mut dyn Write) -> Outcome {
    let rep = validate(d);
    if !rep.is_valid() {
        write!(out, "{}", rep)?;
        return Ok(false);
    }
    let qt = verify_quasitriangular_with(d, r, mode);
    writeln!(out, "{}", qt.describe(d))?;
    if let Some(s) = qt.antipode_gives_inverse {
        writeln!(out, "(S ⊗ id)(R) equals the inverse: {}", s)?;
    }
    let mut ok = qt.passed();
    if qybe {
        let c = verify_qybe(d, r);
        writeln!(out, "{}", c.describe(d))?;
        ok &= c.passed();
    }
    writeln!(out, "verdict: {}", if ok { "pass" } else { "FAIL" })?;
    Ok(ok)
}

fn cmd_classify(d: &ExtensionData, preset: Option<&str>, file: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let Some((fam, n)) = recognize(d) else {
        return Err(Stop::Failed("data is not a K(8n) or A(8n) family member".into()));
    };
    let classified = match fam {
        Family::K => classify_k(d)?,
        Family::A => classify_a(d)?,
    };
    writeln!(out, "{} with n = {}: {} non-trivial R-matrices", fam, n, classified.len())?;
    let mut ok = true;
    let mut entries = vec![];
    for (i, c) in classified.iter().enumerate() {
        let qt = verify_quasitriangular_with(d, &c.rmatrix, VerifyMode::Generators).passed();
        let yb = verify_qybe(d, &c.rmatrix).passed();
        let phi = is_phi_symmetric(d, &c.rmatrix);
        ok &= qt && yb;
        let params: Vec<String> = c.params.iter().map(|p| p.to_string()).collect();
        writeln!(
            out,
            "R{} params ({}): quasitriangular {}, qybe {}, phi-symmetric {}",
            i,
            params.join(", "),
            qt,
            yb,
            phi
        )?;
        entries.push(json!({
            "params": c.params.iter().map(|&p| io::root_to_json(p)).collect::<Vec<_>>(),
            "tuple": io::tuple_to_json(&c.tuple),
            "rmatrix": io::rmatrix_to_json(&c.rmatrix),
            "verified": { "quasitriangular": qt, "qybe": yb, "phi_symmetric": phi },
        }));
    }
    writeln!(out, "all verified: {}", ok)?;
    if let Some(path) = file {
        let report = json!({
            "family": fam.to_string(),
            "n": n,
            "preset": preset,
            "data_fingerprint": io::fingerprint(d),
            "count": classified.len(),
            "all_verified": ok,
            "entries": entries,
        });
        write_file(path, &report)?;
    }
    Ok(ok)
}

fn cmd_export(d: &ExtensionData, r: Option<&RMatrix>, format: Format, file: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let v = match (format, r) {
        (Format::Json, None) => io::data_to_json(d),
        (_, None) => return Err(Stop::Usage("matrix and complex exports need an R-matrix file".into())),
        (_, Some(r)) => {
            let hopf = HopfAlgebra::new(d, r.value_order());
            let t = to_tensor(&hopf, r);
            match format {
                Format::Json => {
                    let mut v = io::rmatrix_to_json(r);
                    v["tensor"] = io::tensor_to_json(d, &t);
                    v
                }
                Format::Matrix => io::matrix_to_json(d, &t)?,
                Format::Complex => io::complex_to_json(d, &t)?,
            }
        }
    };
    match file {
        Some(p) => write_file(p, &v)?,
        None => write!(out, "{}", io::to_pretty(&v))?,
    }
    Ok(true)
}
