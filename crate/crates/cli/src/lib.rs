//! Command implementations behind the `uqp` binary. Each command returns an
//! exit code and the rendered output document.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use uqp_core::arith::{real, AlgebraParams, Eta, HalfInt, Scalar};
use uqp_core::export::{num, reports_to_table, to_structured, CoefficientDocument, CoproductDocument, IrrepDocument};
use uqp_core::hopf::{build_induced_coproduct, build_tensor, check_coproduct, CoproductTolerances};
use uqp_core::irrep::{build_classical, build_mapped, check_relations};
use uqp_core::verify::oracle::oracle_theta_sum;
use uqp_core::verify::{all_passed, run_suite, Check, CheckReport, ParamsEcho, SuiteConfig};
use uqp_core::weightfn::{solve_psi, ChiSpec, PsiSeries, WeightFunction};

/// Environment variable naming the directory for output files when `--output` is absent.
pub const OUT_DIR_ENV: &str = "UQP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "uqp", version, about = "Representations of U_{q,p}(sl(2)) through a nonlinear map from U_q(sl(2))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight-function and ψ-series coefficient tables.
    Coeffs(CoeffsArgs),
    /// One mapped irrep with its relation check.
    Rep(RepArgs),
    /// Base and induced coproduct on a tensor product, with its check.
    Coproduct(CoproductArgs),
    /// The verification suite.
    Check(CheckArgs),
    /// Direct theta-series summation against the truncated table.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Structured,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChiArg {
    Standard,
    Beta,
    Elliptic,
    Custom,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value = "elliptic")]
    pub chi: ChiArg,
    /// Deformation parameter, `re` or `re,im`.
    #[arg(long, default_value = "1.2", value_parser = parse_scalar)]
    pub q: Scalar,
    /// Elliptic nome, `re` or `re,im`; required for `--chi elliptic`.
    #[arg(long, value_parser = parse_scalar)]
    pub p: Option<Scalar>,
    /// Required for `--chi beta`.
    #[arg(long, value_parser = parse_scalar)]
    pub beta: Option<Scalar>,
    /// Regularization constant fixing the ψ-series constant term.
    #[arg(long, value_parser = parse_scalar)]
    pub c0: Option<Scalar>,
    /// Tab-separated `k re im` table for `--chi custom`.
    #[arg(long)]
    pub coeff_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-16)]
    pub trunc_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub match_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub spectral_tol: f64,
    #[arg(long, value_enum, default_value = "structured")]
    pub format: Format,
    /// Output file; defaults to `$UQP_OUT_DIR/<command>.<ext>` or stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest `|2m|` the elliptic truncation must cover.
    #[arg(long, default_value_t = 10.0)]
    pub weight_bound: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Spin, e.g. `2` or `3/2`.
    #[arg(long, value_parser = parse_spin)]
    pub j: HalfInt,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub eta: i64,
}

#[derive(Debug, Clone, Args)]
pub struct CoproductArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_parser = parse_spin)]
    pub j1: HalfInt,
    #[arg(long, value_parser = parse_spin)]
    pub j2: HalfInt,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub eta: i64,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Irrep spins to check; repeatable. With neither `--j` nor `--pair`, the default suite runs.
    #[arg(long, value_parser = parse_spin)]
    pub j: Vec<HalfInt>,
    /// Tensor pairs `j1:j2`; repeatable.
    #[arg(long, value_parser = parse_pair)]
    pub pair: Vec<(HalfInt, HalfInt)>,
    /// Single eta; all three when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Weights `|2m| <= max_twice_m` are compared.
    #[arg(long, default_value_t = 10)]
    pub max_twice_m: i64,
    /// Summation order; defaults to the table's truncation order plus two.
    #[arg(long)]
    pub n: Option<usize>,
}

fn parse_scalar(s: &str) -> Result<Scalar, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{s}` is not `re` or `re,im`"));
    let z = match s.split_once(',') {
        Some((re, im)) => Scalar::new(parse(re)?, parse(im)?),
        None => real(parse(s)?),
    };
    if !z.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(z)
}

fn parse_spin(s: &str) -> Result<HalfInt, String> {
    HalfInt::parse_spin(s).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(HalfInt, HalfInt), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("`{s}` is not `j1:j2`"))?;
    Ok((parse_spin(a)?, parse_spin(b)?))
}

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<uqp_core::Error> for CliError {
    fn from(e: uqp_core::Error) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Exit code and rendered document of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub document: String,
}

impl Outcome {
    fn from_pass(passed: bool, document: String) -> Self {
        Outcome { code: if passed { 0 } else { 1 }, document }
    }
}

/// Exit code for invalid input or failed construction.
pub const EXIT_ERROR: u8 = 2;

impl CommonArgs {
    fn params(&self, eta: Eta) -> CliResult<AlgebraParams> {
        let chi = self.chi;
        if chi == ChiArg::Elliptic && self.p.is_none() {
            return Err(CliError("`--chi elliptic` requires --p".into()));
        }
        if chi == ChiArg::Beta && self.beta.is_none() {
            return Err(CliError("`--chi beta` requires --beta".into()));
        }
        let params = AlgebraParams {
            q: self.q,
            p: self.p.unwrap_or(real(0.0)),
            beta: self.beta.unwrap_or(real(0.0)),
            trunc_tol: self.trunc_tol,
            match_tol: self.match_tol,
            spectral_tol: self.spectral_tol,
            eta,
            c0: self.c0,
        };
        params.validate()?;
        Ok(params)
    }

    fn chi_spec(&self) -> CliResult<ChiSpec> {
        Ok(match self.chi {
            ChiArg::Standard => ChiSpec::Standard,
            ChiArg::Beta => ChiSpec::Beta,
            ChiArg::Elliptic => ChiSpec::Elliptic,
            ChiArg::Custom => {
                let path = self.coeff_file.as_ref().ok_or_else(|| CliError("`--chi custom` requires --coeff-file".into()))?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
                ChiSpec::Custom(WeightFunction::parse_table(&text)?)
            }
        })
    }

    fn weight_function(&self, params: &AlgebraParams, weight_bound: f64) -> CliResult<(WeightFunction, Arc<PsiSeries>)> {
        let chi = self.chi_spec()?.build(params, weight_bound)?;
        let psi = Arc::new(solve_psi(&chi, params.q, params.c0)?);
        Ok((chi, psi))
    }

    /// Where the document goes: `--output`, else `$UQP_OUT_DIR/<name>.<ext>`, else stdout.
    pub fn output_path(&self, name: &str, out_dir: Option<&Path>) -> Option<PathBuf> {
        let ext = match self.format {
            Format::Structured => "json",
            Format::Table => "tsv",
        };
        self.output.clone().or_else(|| out_dir.map(|d| d.join(format!("{name}.{ext}"))))
    }
}

fn eta_of(v: i64) -> CliResult<Eta> {
    Ok(Eta::try_from(v)?)
}

pub fn cmd_coeffs(args: &CoeffsArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let params = c.params(Eta::Zero)?;
    let (chi, psi) = c.weight_function(&params, args.weight_bound)?;
    let doc = CoefficientDocument::new(&chi, &psi);
    let document = match c.format {
        Format::Structured => to_structured(&doc),
        Format::Table => doc.to_table(),
    };
    Ok(Outcome { code: 0, document })
}

pub fn cmd_rep(args: &RepArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let params = c.params(eta_of(args.eta)?)?;
    let (chi, psi) = c.weight_function(&params, (args.j.twice() + 2) as f64)?;
    let rep = build_mapped(build_classical(args.j, params.eta, params.q)?, psi)?;
    let echo = ParamsEcho::from_params(&params, &chi).with_spin(args.j);
    let report = check_relations(&rep, &chi, echo, params.match_tol)?;
    let passed = report.passed();
    let document = match c.format {
        Format::Structured => to_structured(&IrrepDocument::new(&rep, Some(report))),
        Format::Table => reports_to_table(&[report]),
    };
    Ok(Outcome::from_pass(passed, document))
}

pub fn cmd_coproduct(args: &CoproductArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let params = c.params(eta_of(args.eta)?)?;
    let (chi, psi) = c.weight_function(&params, (args.j1.twice() + args.j2.twice() + 2) as f64)?;
    let left = Arc::new(build_mapped(build_classical(args.j1, params.eta, params.q)?, psi.clone())?);
    let right = Arc::new(build_mapped(build_classical(args.j2, params.eta, params.q)?, psi.clone())?);
    let tensor = build_tensor(left, right)?;
    let induced = build_induced_coproduct(&tensor, &psi, params.spectral_tol)?;
    let echo = ParamsEcho::from_params(&params, &chi).with_pair(args.j1, args.j2);
    let report = check_coproduct(&tensor, &induced, &chi, echo, CoproductTolerances::from_params(&params))?;
    let passed = report.passed();
    let document = match c.format {
        Format::Structured => to_structured(&CoproductDocument::new(&tensor, &induced, Some(report))),
        Format::Table => reports_to_table(&[report]),
    };
    Ok(Outcome::from_pass(passed, document))
}

#[derive(serde::Serialize)]
struct SuiteDocument<'a> {
    passed: bool,
    reports: &'a [CheckReport],
}

pub fn cmd_check(args: &CheckArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let etas = match args.eta {
        Some(v) => vec![eta_of(v)?],
        None => Eta::ALL.to_vec(),
    };
    let chi = c.chi_spec()?;
    let mut reports = Vec::new();
    for eta in etas {
        let params = c.params(eta)?;
        let mut config = SuiteConfig::default_suite(params.clone(), chi.clone());
        if !args.j.is_empty() || !args.pair.is_empty() {
            config.spins = args.j.clone();
            config.pairs = args.pair.clone();
        }
        reports.extend(run_suite(&config)?);
    }
    let passed = all_passed(&reports);
    let document = match c.format {
        Format::Structured => to_structured(&SuiteDocument { passed, reports: &reports }),
        Format::Table => reports_to_table(&reports),
    };
    Ok(Outcome::from_pass(passed, document))
}

#[derive(serde::Serialize)]
struct OracleRow {
    m: HalfInt,
    #[serde(serialize_with = "uqp_core::export::ser_complex")]
    oracle: Scalar,
    #[serde(serialize_with = "uqp_core::export::ser_complex")]
    table: Scalar,
}

#[derive(serde::Serialize)]
struct OracleDocument {
    order: usize,
    rows: Vec<OracleRow>,
    report: CheckReport,
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<Outcome> {
    let c = &args.common;
    if c.chi != ChiArg::Elliptic {
        return Err(CliError("`oracle` compares the elliptic table; use --chi elliptic".into()));
    }
    let params = c.params(Eta::Zero)?;
    let max = args.max_twice_m.abs();
    let (chi, _) = c.weight_function(&params, max as f64)?;
    let order = args.n.unwrap_or_else(|| chi.truncation().map_or(0, |t| t.order) + 2);
    let rows: Vec<OracleRow> = (-max..=max)
        .map(|tm| {
            let m = HalfInt::from_twice(tm);
            OracleRow { m, oracle: oracle_theta_sum(m, params.q, params.p, order), table: chi.eval(m, params.q) }
        })
        .collect();
    let worst = rows.iter().map(|r| (r.oracle - r.table).norm() / (1.0 + r.oracle.norm())).fold(0.0, f64::max);
    let mut report = CheckReport::new(ParamsEcho::from_params(&params, &chi));
    report.push(Check::new("table_vs_direct_sum", worst, params.match_tol));
    let passed = report.passed();
    let document = match c.format {
        Format::Structured => to_structured(&OracleDocument { order, rows, report }),
        Format::Table => {
            let mut s = String::from("# m\toracle_re\toracle_im\ttable_re\ttable_im\n");
            for r in &rows {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    r.m,
                    num(r.oracle.re),
                    num(r.oracle.im),
                    num(r.table.re),
                    num(r.table.im)
                ));
            }
            s + &reports_to_table(&[report])
        }
    };
    Ok(Outcome::from_pass(passed, document))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::Rep(_) => "rep",
            Command::Coproduct(_) => "coproduct",
            Command::Check(_) => "check",
            Command::Oracle(_) => "oracle",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Coeffs(a) => &a.common,
            Command::Rep(a) => &a.common,
            Command::Coproduct(a) => &a.common,
            Command::Check(a) => &a.common,
            Command::Oracle(a) => &a.common,
        }
    }

    pub fn run(&self) -> CliResult<Outcome> {
        match self {
            Command::Coeffs(a) => cmd_coeffs(a),
            Command::Rep(a) => cmd_rep(a),
            Command::Coproduct(a) => cmd_coproduct(a),
            Command::Check(a) => cmd_check(a),
            Command::Oracle(a) => cmd_oracle(a),
        }
    }
}

/// Runs a parsed command and writes its document. Returns the process exit code.
pub fn execute(cli: &Cli, out_dir: Option<&Path>, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> u8 {
    let result = cli.command.run().and_then(|outcome| {
        match cli.command.common().output_path(cli.command.name(), out_dir) {
            Some(path) => std::fs::write(&path, &outcome.document)
                .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(outcome.document.as_bytes())
                .map_err(|e| CliError(format!("cannot write output: {e}")))?,
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "uqp: error: {}", e.0.replace('\n', " "));
            EXIT_ERROR
        }
    }
}
