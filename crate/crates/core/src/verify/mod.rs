//! Residual reports, the eigenvalue oracle and the verification suite driver.

pub mod oracle;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{AlgebraParams, HalfInt, Scalar};
use crate::error::{Error, Result};
use crate::export::ser_complex_opt;
use crate::hopf::{build_induced_coproduct, build_tensor, check_coproduct, CoproductTolerances};
use crate::irrep::{build_classical, build_mapped, check_relations};
use crate::linalg::{eigen_decompose, sort_spectrum, CMatrix};
use crate::weightfn::{solve_psi, ChiKind, ChiSpec, PsiSeries, WeightFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `pass` is `residual <= tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, pass: residual <= tolerance }
    }
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub chi: Option<ChiKind>,
    #[serde(serialize_with = "ser_complex_opt", skip_serializing_if = "Option::is_none")]
    pub q: Option<Scalar>,
    #[serde(serialize_with = "ser_complex_opt", skip_serializing_if = "Option::is_none")]
    pub p: Option<Scalar>,
    #[serde(serialize_with = "ser_complex_opt", skip_serializing_if = "Option::is_none")]
    pub beta: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<HalfInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j1: Option<HalfInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j2: Option<HalfInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<usize>,
}

impl ParamsEcho {
    pub fn from_params(params: &AlgebraParams, chi: &WeightFunction) -> Self {
        let kind = chi.kind();
        ParamsEcho {
            chi: Some(kind),
            q: Some(params.q),
            p: (kind == ChiKind::Elliptic).then_some(params.p),
            beta: (kind == ChiKind::Beta).then_some(params.beta),
            eta: Some(params.eta.value()),
            truncation_order: chi.truncation().map(|t| t.order),
            ..ParamsEcho::default()
        }
    }

    pub fn with_spin(mut self, j: HalfInt) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_pair(mut self, j1: HalfInt, j2: HalfInt) -> Self {
        self.j1 = Some(j1);
        self.j2 = Some(j2);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub params: ParamsEcho,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new(params: ParamsEcho) -> Self {
        CheckReport { params, checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        debug_assert!(self.get(&check.name).is_none(), "duplicate check {}", check.name);
        self.checks.push(check);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// A report recording that construction itself failed.
    pub fn construction_failure(params: ParamsEcho, err: &Error) -> Self {
        let mut r = CheckReport::new(params);
        r.push(Check::new(format!("construction: {err}"), f64::INFINITY, 0.0));
        r
    }

    /// A short label for table output, e.g. `j=3/2,eta=0` or `j1=1,j2=1/2,eta=0`.
    pub fn label(&self) -> String {
        let p = &self.params;
        let mut parts = Vec::new();
        if let Some(j) = p.j {
            parts.push(format!("j={j}"));
        }
        if let (Some(a), Some(b)) = (p.j1, p.j2) {
            parts.push(format!("j1={a},j2={b}"));
        }
        if let Some(eta) = p.eta {
            parts.push(format!("eta={eta}"));
        }
        parts.join(",")
    }
}

/// Eigenvalues of `m`, sorted, each certified by `||A v - λ v|| <= spectral_tol ||A||`.
pub fn oracle_eigensolve(m: &CMatrix, spectral_tol: f64) -> Result<Vec<Scalar>> {
    let scale = m.norm();
    let pairs = eigen_decompose(m)?;
    let mut values = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let r = (m * &pair.vector - &pair.vector * pair.value).norm();
        if !(r <= spectral_tol * scale) {
            return Err(Error::Eigensolver(format!(
                "eigenpair residual {r:e} exceeds {spectral_tol:e} * {scale:e} for eigenvalue {}",
                pair.value
            )));
        }
        values.push(pair.value);
    }
    sort_spectrum(&mut values);
    Ok(values)
}

/// What to verify.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub params: AlgebraParams,
    pub chi: ChiSpec,
    pub spins: Vec<HalfInt>,
    pub pairs: Vec<(HalfInt, HalfInt)>,
}

impl SuiteConfig {
    /// `2j <= 9` and every pair with `2j1, 2j2 <= 4`.
    pub fn default_suite(params: AlgebraParams, chi: ChiSpec) -> Self {
        let spins = (0..=9).map(HalfInt::from_twice).collect();
        let pairs = (0..=4)
            .flat_map(|a| (0..=4).map(move |b| (HalfInt::from_twice(a), HalfInt::from_twice(b))))
            .collect();
        SuiteConfig { params, chi, spins, pairs }
    }

    /// Largest `|2m|` at which χ or ψ will be evaluated; lowering reaches `m = -j - 1`.
    pub fn weight_bound(&self) -> f64 {
        let single = self.spins.iter().map(|j| j.twice()).max().unwrap_or(0);
        let paired = self.pairs.iter().map(|(a, b)| a.twice() + b.twice()).max().unwrap_or(0);
        (single.max(paired) + 2) as f64
    }
}

enum Job {
    Irrep(HalfInt),
    Pair(HalfInt, HalfInt),
}

/// Runs irrep checks for each spin, then coproduct checks for each pair, in
/// configuration order. Construction failures are reported as failing checks.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let params = &config.params;
    params.validate()?;
    let chi = config.chi.build(params, config.weight_bound())?;
    let psi = Arc::new(solve_psi(&chi, params.q, params.c0)?);
    let echo = ParamsEcho::from_params(params, &chi);

    let jobs: Vec<Job> = config
        .spins
        .iter()
        .map(|&j| Job::Irrep(j))
        .chain(config.pairs.iter().map(|&(a, b)| Job::Pair(a, b)))
        .collect();

    let reports = jobs
        .par_iter()
        .map(|job| match *job {
            Job::Irrep(j) => {
                let echo = echo.clone().with_spin(j);
                irrep_report(params, &chi, &psi, j, echo.clone())
                    .unwrap_or_else(|e| CheckReport::construction_failure(echo, &e))
            }
            Job::Pair(a, b) => {
                let echo = echo.clone().with_pair(a, b);
                pair_report(params, &chi, &psi, a, b, echo.clone())
                    .unwrap_or_else(|e| CheckReport::construction_failure(echo, &e))
            }
        })
        .collect();
    Ok(reports)
}

fn irrep_report(
    params: &AlgebraParams,
    chi: &WeightFunction,
    psi: &Arc<PsiSeries>,
    j: HalfInt,
    echo: ParamsEcho,
) -> Result<CheckReport> {
    let rep = build_mapped(build_classical(j, params.eta, params.q)?, psi.clone())?;
    check_relations(&rep, chi, echo, params.match_tol)
}

fn pair_report(
    params: &AlgebraParams,
    chi: &WeightFunction,
    psi: &Arc<PsiSeries>,
    j1: HalfInt,
    j2: HalfInt,
    echo: ParamsEcho,
) -> Result<CheckReport> {
    let left = Arc::new(build_mapped(build_classical(j1, params.eta, params.q)?, psi.clone())?);
    let right = Arc::new(build_mapped(build_classical(j2, params.eta, params.q)?, psi.clone())?);
    let tensor = build_tensor(left, right)?;
    let induced = build_induced_coproduct(&tensor, psi, params.spectral_tol)?;
    check_coproduct(&tensor, &induced, chi, echo, CoproductTolerances::from_params(params))
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::passed)
}
