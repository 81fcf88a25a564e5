//! Command-line jobs. Each subcommand reads an algebra in the JSON schema,
//! runs one pipeline stage, checks the exact identities that stage promises
//! and emits a JSON document.
//!
//! Exit status: 0 when every requested identity holds exactly, 1 when one
//! fails, 2 when the input or the options are invalid.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebras::{validate_dg, validate_dlie, AlgebraSpec, Report};
use crate::graded::TruncatedSeries;
use crate::hochschild::{hochschild_spec, AssocAlgebra, HochschildWindow};
use crate::master::{chen_solve, chen_square, euler_eigenvalue, master_residual, verify_unit_normalization};
use crate::schema::{
    operation_doc, parse_spec, spec_to_json, to_json, BundleDoc, CohomologyDoc, CoordinateDoc, FinfDoc, GaugeDoc,
    GaugeTrialDoc, SchemaError, SolveDoc, TransferDoc, ValidateDoc,
};
use crate::splitting::build_splitting;
use crate::tangent::{
    compute_bundle, shuffle_defects, spec_digest, validate_finf, GaugeProbe, TangentError, TangentSolution,
};
use crate::transfer::{extract_linf, verify_minimal};

#[derive(Parser, Debug, Clone)]
#[command(name = "finf", version, about = "Exact F∞ data for finite-dimensional dG algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct Options {
    /// Work modulo I^{N+1}.
    #[arg(long, global = true, default_value_t = 4)]
    pub truncation: usize,
    /// Highest arity of induced operations.
    #[arg(long = "arity-cap", global = true, default_value_t = 3)]
    pub arity_cap: usize,
    #[arg(long = "check-level", global = true, value_enum, default_value_t = CheckLevel::Full)]
    pub check_level: CheckLevel,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the random gauge generator of `gauge-check`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckLevel {
    /// Only the identities the stage cannot do without.
    Fast,
    /// Every applicable validator.
    Full,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Check the algebra axioms.
    Validate { input: PathBuf },
    /// Cohomology classes and representatives.
    Cohomology { input: PathBuf },
    /// Versal solution (Γ, ∂) of the Master equation.
    Solve { input: PathBuf },
    /// Minimal L∞ operations on cohomology.
    Transfer { input: PathBuf },
    /// Induced products μ₂…μ_cap with the tangent-complex identities.
    Tangent { input: PathBuf },
    /// The full bundle, validated against every F∞ clause.
    Finf { input: PathBuf },
    /// Truncated Hochschild cochains of a unital associative algebra.
    HochschildGen {
        input: PathBuf,
        /// Largest cochain arity kept.
        #[arg(long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Recompute μ₂ after random gauge transformations.
    GaugeCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: u64,
    },
}

impl Command {
    pub fn input(&self) -> &Path {
        match self {
            Command::Validate { input }
            | Command::Cohomology { input }
            | Command::Solve { input }
            | Command::Transfer { input }
            | Command::Tangent { input }
            | Command::Finf { input }
            | Command::HochschildGen { input, .. }
            | Command::GaugeCheck { input, .. } => input,
        }
    }
}

/// Everything a job needs, checked for consistency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobConfig {
    pub command: Command,
    pub truncation: usize,
    pub arity_cap: usize,
    pub check_level: CheckLevel,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl JobConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, JobError> {
        let o = cli.options;
        if o.arity_cap < 2 || o.arity_cap > o.truncation {
            return Err(JobError::Options(format!(
                "need truncation ≥ arity cap ≥ 2, got truncation {} and arity cap {}",
                o.truncation, o.arity_cap
            )));
        }
        Ok(JobConfig {
            command: cli.command,
            truncation: o.truncation,
            arity_cap: o.arity_cap,
            check_level: o.check_level,
            out: o.out,
            seed: o.seed,
        })
    }

    fn full(&self) -> bool {
        self.check_level == CheckLevel::Full
    }
}

#[derive(Debug)]
pub enum JobError {
    Options(String),
    Io(PathBuf, std::io::Error),
    Schema(PathBuf, SchemaError),
    /// The input parsed but cannot be processed by this stage.
    Input(String),
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobError::Options(m) => write!(f, "invalid options: {m}"),
            JobError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            JobError::Schema(p, e) => write!(f, "{}: {e}", p.display()),
            JobError::Input(m) => write!(f, "invalid input: {m}"),
        }
    }
}

/// What a job produced: a JSON document and the identities that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub document: String,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(document: String) -> Self {
        Outcome { document, failures: Vec::new(), notes: Vec::new() }
    }

    fn fail(&mut self, m: impl Into<String>) {
        self.failures.push(m.into());
    }

    fn absorb(&mut self, label: &str, rep: &Report) {
        if let Some(v) = rep.failures().next() {
            let n = rep.failures().count();
            self.fail(format!("{label}: {n} violation(s), first: {} on {:?}: {}", v.identity, v.indices, v.detail));
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

pub fn load_spec(path: &Path) -> Result<AlgebraSpec, JobError> {
    let text = std::fs::read_to_string(path).map_err(|e| JobError::Io(path.to_path_buf(), e))?;
    parse_spec(&text).map_err(|e| JobError::Schema(path.to_path_buf(), e))
}

fn first_bad_order(s: &TruncatedSeries) -> Option<usize> {
    s.min_degree()
}

/// Run one job. `Err` means the input or options are invalid; identity
/// failures are reported inside the outcome.
pub fn run(cfg: &JobConfig) -> Result<Outcome, JobError> {
    let spec = load_spec(cfg.command.input())?;
    match &cfg.command {
        Command::Validate { .. } => Ok(validate(cfg, &spec)),
        Command::Cohomology { .. } => cohomology(cfg, &spec),
        Command::Solve { .. } => solve(cfg, &spec),
        Command::Transfer { .. } => transfer(cfg, &spec),
        Command::Tangent { .. } => tangent(cfg, &spec, false),
        Command::Finf { .. } => tangent(cfg, &spec, true),
        Command::HochschildGen { n_max, .. } => hochschild_gen(&spec, *n_max),
        Command::GaugeCheck { trials, .. } => gauge_check(cfg, &spec, *trials),
    }
}

fn validate(cfg: &JobConfig, spec: &AlgebraSpec) -> Outcome {
    let mut reports = std::collections::BTreeMap::new();
    let structural = if spec.dot.is_some() { validate_dg(spec) } else { validate_dlie(spec) };
    reports.insert(if spec.dot.is_some() { "dg" } else { "dlie" }.to_string(), structural);
    if cfg.full() && spec.bv.is_some() {
        let mut rep = Report::new();
        match crate::algebras::bracket_from_bv(spec) {
            Ok(b) if b == spec.bracket => {}
            Ok(_) => rep.push("bracket equals the BV-derived bracket", &[], "structure constants differ"),
            Err(e) => rep.push("BV operator preconditions", &[], e.to_string()),
        }
        reports.insert("bv".to_string(), rep);
    }
    let valid = reports.values().all(Report::is_valid);
    let doc = ValidateDoc { spec_digest: spec_digest(spec), reports: reports.clone(), valid };
    let mut out = Outcome::new(to_json(&doc));
    for (k, r) in &reports {
        out.absorb(k, r);
        let info = r.violations.iter().filter(|v| v.informational).count();
        if info > 0 {
            out.notes.push(format!("{k}: {info} informational entr(ies)"));
        }
    }
    out
}

fn structural_check(cfg: &JobConfig, spec: &AlgebraSpec, out: &mut Outcome) {
    if cfg.full() {
        let rep = if spec.dot.is_some() { validate_dg(spec) } else { validate_dlie(spec) };
        out.absorb("input axioms", &rep);
    }
}

fn cohomology(cfg: &JobConfig, spec: &AlgebraSpec) -> Result<Outcome, JobError> {
    let s = build_splitting(spec).map_err(|e| JobError::Input(e.to_string()))?;
    let mut out = Outcome::new(to_json(&CohomologyDoc::from_basis(&s.cohomology)));
    if cfg.full() {
        out.absorb("splitting", &s.verify(spec));
    }
    Ok(out)
}

fn solve(cfg: &JobConfig, spec: &AlgebraSpec) -> Result<Outcome, JobError> {
    let s = build_splitting(spec).map_err(|e| JobError::Input(e.to_string()))?;
    let sol = match chen_solve(spec, &s, cfg.truncation) {
        Ok(sol) => sol,
        Err(e) => {
            let mut out = Outcome::new(String::new());
            out.fail(format!("solve: {e}"));
            return Ok(out);
        }
    };
    let residual = master_residual(spec, &sol.gamma, &sol.chen).map_err(|e| JobError::Input(e.to_string()))?;
    let square = chen_square(&sol);
    let doc = SolveDoc {
        spec_digest: spec_digest(spec),
        truncation: sol.truncation,
        cohomology: CohomologyDoc::from_basis(&sol.cohomology),
        gamma: crate::schema::gelement_doc(&spec.basis, &sol.gamma),
        chen: crate::schema::derivation_doc(&sol.chen),
        residual_zero: residual.is_zero(),
        chen_square_zero: square.iter().all(TruncatedSeries::is_zero),
        euler_eigenvalue: euler_eigenvalue(&sol.chen),
    };
    let mut out = Outcome::new(to_json(&doc));
    if let Some((a, m, c)) = residual.first_nonzero() {
        out.fail(format!(
            "Master residual: order {}, component {}, coefficient {c}",
            m.degree(),
            spec.basis.names[a]
        ));
    }
    if cfg.full() {
        structural_check(cfg, spec, &mut out);
        for (k, sq) in square.iter().enumerate() {
            if let Some(order) = first_bad_order(sq) {
                out.fail(format!("chen^2 = 0: order {order}, coordinate {}", sol.ring().names[k]));
                break;
            }
        }
        if spec.unit.is_some() {
            out.absorb("unit normalization", &verify_unit_normalization(spec, &sol));
        }
        match &doc.euler_eigenvalue {
            Some(l) => out.notes.push(format!("[E, chen] = {l} chen")),
            None => out.fail("chen is not an eigenvector of ad E"),
        }
    }
    Ok(out)
}

fn transfer(cfg: &JobConfig, spec: &AlgebraSpec) -> Result<Outcome, JobError> {
    let s = build_splitting(spec).map_err(|e| JobError::Input(e.to_string()))?;
    let sol = match chen_solve(spec, &s, cfg.truncation) {
        Ok(sol) => sol,
        Err(e) => {
            let mut out = Outcome::new(String::new());
            out.fail(format!("solve: {e}"));
            return Ok(out);
        }
    };
    let m = extract_linf(&sol, cfg.arity_cap).map_err(|e| JobError::Options(e.to_string()))?;
    let names = &sol.cohomology.graded_basis().names;
    let doc = TransferDoc {
        spec_digest: spec_digest(spec),
        truncation: sol.truncation,
        classes: sol
            .cohomology
            .classes
            .iter()
            .map(|c| CoordinateDoc { name: c.name.clone(), degree: c.degree })
            .collect(),
        operations: (1..=cfg.arity_cap).map(|n| operation_doc(names, m.op(n))).collect(),
        lowest_nonzero_arity: m.lowest_arity(),
    };
    let mut out = Outcome::new(to_json(&doc));
    structural_check(cfg, spec, &mut out);
    out.absorb("minimal L-infinity relations", &verify_minimal(&m));
    Ok(out)
}

fn tangent_failure(e: TangentError) -> Result<Outcome, JobError> {
    match e {
        TangentError::NotDg(m) => Err(JobError::Input(format!("not a strict dG algebra: {m}"))),
        TangentError::CapAboveTruncation { .. } | TangentError::Truncation(_) => Err(JobError::Options(e.to_string())),
        other => {
            let mut out = Outcome::new(String::new());
            out.fail(format!("tangent: {other}"));
            Ok(out)
        }
    }
}

/// Identities of the tangent complex itself: cyclicity of Υ and the
/// A-chain relations Bₖ = Υ∘μₖ + D^Γ Aₖ.
fn complex_checks(sol: &TangentSolution, out: &mut Outcome) {
    let c = &sol.complex;
    let u = c.upsilon_tensor();
    let checks = [
        ("D^Gamma Upsilon = 0", c.d_gamma_tensor(&u)),
        ("D^Gamma (Upsilon . Upsilon) = 0", c.d_gamma_tensor(&c.product(&u, &u))),
    ];
    for (name, t) in checks {
        if let Some((order, tuple)) = t.first_nonzero() {
            out.fail(format!("{name}: order {order}, inputs {tuple:?}"));
        }
    }
    let mus = &sol.bundle.products;
    for k in 2..=sol.bundle.arity_cap() {
        let b = if k == 2 { c.product(&u, &u) } else { c.b_k(mus, &sol.a_chain, k) };
        let rhs = c.upsilon_after(&mus[k - 2]);
        let mut lhs = b.sub(&rhs);
        lhs.add_scaled(&c.d_gamma_tensor(&sol.a_chain[k - 2]), &crate::exactq::Rational::from_int(-1));
        if let Some((order, tuple)) = lhs.first_nonzero() {
            out.fail(format!("B_{k} = Upsilon∘mu_{k} + D^Gamma A_{k}: order {order}, inputs {tuple:?}"));
        }
    }
}

fn tangent(cfg: &JobConfig, spec: &AlgebraSpec, end_to_end: bool) -> Result<Outcome, JobError> {
    let sol = match compute_bundle(spec, cfg.truncation, cfg.arity_cap) {
        Ok(s) => s,
        Err(e) => return tangent_failure(e),
    };
    let fr = validate_finf(&sol.bundle);
    let mut report = if end_to_end || cfg.full() { fr.report.clone() } else { Report::new() };
    if cfg.full() && sol.bundle.commutative {
        report.extend(shuffle_defects(&sol.bundle));
    }
    let doc = FinfDoc {
        bundle: BundleDoc::from_bundle(&sol.bundle),
        valid: report.is_valid(),
        report: report.clone(),
        lambda: fr.lambda.clone(),
    };
    let mut out = Outcome::new(to_json(&doc));
    if !end_to_end || cfg.full() {
        complex_checks(&sol, &mut out);
    }
    out.absorb("F-infinity clauses", &report);
    if let Some(l) = &fr.lambda {
        out.notes.push(format!("[E, chen] = {l} chen"));
    }
    let info = report.violations.iter().filter(|v| v.informational).count();
    if info > 0 {
        out.notes.push(format!("{info} informational entr(ies), e.g. shuffle sums"));
    }
    Ok(out)
}

fn hochschild_gen(spec: &AlgebraSpec, n_max: usize) -> Result<Outcome, JobError> {
    let mult = spec.dot.clone().ok_or_else(|| JobError::Input("the algebra needs a \"dot\" product".into()))?;
    let unit = spec.unit.ok_or_else(|| JobError::Input("the algebra needs a \"unit\"".into()))?;
    let a = AssocAlgebra::new(spec.basis.clone(), mult, unit).map_err(|e| JobError::Input(e.to_string()))?;
    let h = hochschild_spec(&a, HochschildWindow { n_max }).map_err(|e| JobError::Input(e.to_string()))?;
    let mut out = Outcome::new(spec_to_json(&h));
    // identities that leave the window are skipped; the rest must hold exactly
    out.absorb("Hochschild window", &validate_dg(&h));
    Ok(out)
}

fn gauge_check(cfg: &JobConfig, spec: &AlgebraSpec, trials: u64) -> Result<Outcome, JobError> {
    let rep = validate_dg(spec);
    if let Some(v) = rep.failures().next() {
        return Err(JobError::Input(format!("not a strict dG algebra: {} on {:?}", v.identity, v.indices)));
    }
    let probe = match GaugeProbe::new(spec, cfg.truncation) {
        Ok(p) => p,
        Err(e) => return tangent_failure(e),
    };
    let mut docs = Vec::new();
    for k in 0..trials {
        let seed = cfg.seed.wrapping_add(k);
        let g = match probe.check(seed) {
            Ok(g) => g,
            Err(e) => return tangent_failure(e),
        };
        docs.push(GaugeTrialDoc {
            seed,
            master_holds: g.master_holds,
            mu2_identical: g.mu2_identical,
            difference_closed: g.difference_closed,
        });
    }
    let doc = GaugeDoc { spec_digest: spec_digest(spec), truncation: cfg.truncation, trials: docs.clone() };
    let mut out = Outcome::new(to_json(&doc));
    for t in &docs {
        if !t.master_holds {
            out.fail(format!("seed {}: Master equation fails after the gauge transformation", t.seed));
        }
        if !t.mu2_identical {
            out.fail(format!(
                "seed {}: recomputed mu_2 differs (difference is {}delta-closed)",
                t.seed,
                if t.difference_closed { "" } else { "not " }
            ));
        }
    }
    Ok(out)
}

/// Parse arguments, run, write artifacts and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match JobConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if !out.document.is_empty() {
        match &cfg.out {
            Some(p) => {
                if let Err(e) = std::fs::write(p, &out.document) {
                    eprintln!("error: {}: {e}", p.display());
                    return 2;
                }
            }
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(out.document.as_bytes()).and_then(|_| stdout.flush()) {
                    Ok(()) => {}
                    // a closed pipe (`finf ... | head`) is not a failure of the computation
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                    Err(e) => {
                        eprintln!("error: stdout: {e}");
                        return 2;
                    }
                }
            }
        }
    }
    for n in &out.notes {
        eprintln!("note: {n}");
    }
    for f in &out.failures {
        eprintln!("FAIL {f}");
    }
    out.exit_code()
}
