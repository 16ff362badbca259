//! Weight functions `chi(J0)` and their ψ-series, both held as Laurent
//! coefficient tables in `t = q^{2 J0}`.
//!
//! A weight function is `chi(t) = Σ_{k≠0} b_k t^k`. The ψ-series solving
//! `ψ(m) - ψ(m-1) = chi(m)` is `ψ(t) = a0 + Σ_{k≠0} a_k t^k` with
//! `a_k = q^k b_k / (q^k - q^-k)`, valid for either sign of `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{check_generic_q, invert_casimir, real, AlgebraParams, HalfInt, Scalar};
use crate::error::{Error, Result};

/// Relative size of `q^k - q^-k` below which `k` is treated as resonant.
const RESONANCE_TOL: f64 = 1e-10;

/// Upper limit on the theta truncation order search.
const MAX_THETA_ORDER: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiKind {
    Standard,
    Beta,
    Elliptic,
    Custom,
}

impl fmt::Display for ChiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChiKind::Standard => "standard",
            ChiKind::Beta => "beta",
            ChiKind::Elliptic => "elliptic",
            ChiKind::Custom => "custom",
        })
    }
}

impl FromStr for ChiKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(ChiKind::Standard),
            "beta" => Ok(ChiKind::Beta),
            "elliptic" => Ok(ChiKind::Elliptic),
            "custom" => Ok(ChiKind::Custom),
            other => Err(format!("unknown chi kind `{other}`")),
        }
    }
}

/// How an elliptic table was cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    /// `N`: the table holds the series terms `n = -N..N-1`, i.e. odd `|k| <= 2N-1`.
    pub order: usize,
    /// Largest `|2m|` the bound was certified for.
    pub weight_bound: f64,
    /// `|p|^{(N+1/2)^2} |q|^{(2N+1) weight_bound}` (with `|q|` replaced by
    /// `max(|q|, 1/|q|)`), the magnitude bound of the first omitted term.
    pub first_omitted_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    coeffs: BTreeMap<i64, Scalar>,
    kind: ChiKind,
    truncation: Option<Truncation>,
}

fn insert_nonzero(table: &mut BTreeMap<i64, Scalar>, k: i64, v: Scalar) {
    if v != real(0.0) {
        table.insert(k, v);
    }
}

impl WeightFunction {
    /// Builds a table, rejecting `k = 0` and non-finite entries. Exact zeros are dropped.
    pub fn from_coeffs(kind: ChiKind, coeffs: impl IntoIterator<Item = (i64, Scalar)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (k, b) in coeffs {
            if k == 0 {
                return Err(Error::CoefficientTable { line: 0, message: "k = 0 is not allowed".into() });
            }
            if !b.is_finite() {
                return Err(Error::NonFinite("weight function coefficient"));
            }
            insert_nonzero(&mut table, k, b);
        }
        Ok(WeightFunction { coeffs: table, kind, truncation: None })
    }

    pub fn kind(&self) -> ChiKind {
        self.kind
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Scalar> {
        &self.coeffs
    }

    /// `b_k`, zero when absent.
    pub fn coeff(&self, k: i64) -> Scalar {
        self.coeffs.get(&k).copied().unwrap_or(real(0.0))
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sums `b_k x_k + b_{-k} x_{-k}` pair by pair, so antisymmetric tables
    /// vanish exactly where `x_k = x_{-k}`.
    fn paired_sum(&self, power: impl Fn(i64) -> Scalar) -> Scalar {
        let mut total = real(0.0);
        for (&k, &b) in self.coeffs.range(1..) {
            total += b * power(k) + self.coeff(-k) * power(-k);
        }
        for (&k, &b) in self.coeffs.range(..0) {
            if !self.coeffs.contains_key(&-k) {
                total += b * power(k);
            }
        }
        total
    }

    /// `chi(t) = Σ b_k t^k`.
    pub fn eval_at(&self, t: Scalar) -> Scalar {
        self.paired_sum(|k| t.powi(k as i32))
    }

    /// `chi` at the weight `m`, i.e. at `t = q^{2m}`.
    pub fn eval(&self, m: HalfInt, q: Scalar) -> Scalar {
        let tm = m.twice();
        self.paired_sum(|k| q.powi((k * tm) as i32))
    }

    /// Parses the tab-separated `k re im` table format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::CoefficientTable { line, message };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let k: i64 = fields[0].parse().map_err(|_| err(format!("bad index `{}`", fields[0])))?;
            if k == 0 {
                return Err(err("k = 0 is not allowed".into()));
            }
            let re: f64 = fields[1].parse().map_err(|_| err(format!("bad real part `{}`", fields[1])))?;
            let im: f64 = fields[2].parse().map_err(|_| err(format!("bad imaginary part `{}`", fields[2])))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err("non-finite coefficient".into()));
            }
            if table.insert(k, Scalar::new(re, im)).is_some() {
                return Err(err(format!("duplicate k = {k}")));
            }
        }
        WeightFunction::from_coeffs(ChiKind::Custom, table)
    }

    pub fn to_table(&self) -> String {
        self.coeffs.iter().map(|(k, b)| format!("{k}\t{:e}\t{:e}\n", b.re, b.im)).collect()
    }
}

/// `chi = [2 J0]`: `b_{±1} = ±1/(q - q^-1)`.
pub fn chi_standard(q: Scalar) -> Result<WeightFunction> {
    check_generic_q(q)?;
    let b1 = (q - q.inv()).inv();
    WeightFunction::from_coeffs(ChiKind::Standard, [(-1, -b1), (1, b1)])
}

/// `chi = [2 J0] (1 + beta [J0]^2)`.
///
/// In `t` this is `(t - 1/t)/d + beta (t^2 - 2t + 2/t - 1/t^2)/d^3` with
/// `d = q - 1/q`, so `b_{±1} = ±(1/d - 2 beta/d^3)` and `b_{±2} = ±beta/d^3`.
/// Solving gives `a_{±1} = q^{±1} d^-2 (1 - 2 beta d^-2)` and
/// `a_{±2} = q^{±2} d^-4 beta/(q + 1/q)`. The quadratic map
/// `phi(x) = x + b x^2` corresponds to `beta = b [2]`.
pub fn chi_beta(q: Scalar, beta: Scalar) -> Result<WeightFunction> {
    check_generic_q(q)?;
    if !beta.is_finite() {
        return Err(Error::NonFinite("beta"));
    }
    let d = q - q.inv();
    let d3 = d * d * d;
    let b1 = d.inv() - 2.0 * beta / d3;
    let b2 = beta / d3;
    WeightFunction::from_coeffs(ChiKind::Beta, [(-2, -b2), (-1, -b1), (1, b1), (2, b2)])
}

/// Smallest `N` whose first omitted term is below `trunc_tol`, with that bound.
pub fn theta_truncation_order(q: Scalar, p: Scalar, trunc_tol: f64, weight_bound: f64) -> Result<(usize, f64)> {
    let pn = p.norm();
    if !(pn < 1.0) {
        return Err(Error::NonConvergent(pn));
    }
    if !(trunc_tol > 0.0) {
        return Err(Error::InvalidTolerance { name: "trunc_tol", value: trunc_tol });
    }
    let growth = q.norm().max(q.norm().recip()).ln() * weight_bound.max(0.0);
    let log_p = pn.ln();
    let log_tol = trunc_tol.ln();
    for n in 0..MAX_THETA_ORDER {
        let h = n as f64 + 0.5;
        let log_term = h * h * log_p + 2.0 * h * growth;
        if log_term < log_tol {
            return Ok((n, log_term.exp()));
        }
    }
    Err(Error::NonConvergent(pn))
}

/// Table of `Σ_{n∈Z} (-1)^n t^{2n+1} p^{(n+1/2)^2}` truncated to `n = -N..N-1`.
///
/// `k = 2n+1` runs over odd integers, `b_k = (-1)^{(k-1)/2} p^{k^2/4}` and
/// `b_{-k} = -b_k`; even `k` never appear. `p^{1/4}` is the principal root.
pub fn chi_elliptic(q: Scalar, p: Scalar, trunc_tol: f64, weight_bound: f64) -> Result<WeightFunction> {
    check_generic_q(q)?;
    let (order, bound) = theta_truncation_order(q, p, trunc_tol, weight_bound)?;
    let p4 = p.sqrt().sqrt();
    let n_max = order as i64;
    let mut table = BTreeMap::new();
    for n in -n_max..n_max {
        let k = 2 * n + 1;
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        insert_nonzero(&mut table, k, sign * p4.powi((k * k) as i32));
    }
    let mut chi = WeightFunction::from_coeffs(ChiKind::Elliptic, table)?;
    chi.truncation = Some(Truncation { order, weight_bound, first_omitted_bound: bound });
    Ok(chi)
}

/// Which weight function to build from a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ChiSpec {
    Standard,
    Beta,
    Elliptic,
    Custom(WeightFunction),
}

impl ChiSpec {
    pub fn kind(&self) -> ChiKind {
        match self {
            ChiSpec::Standard => ChiKind::Standard,
            ChiSpec::Beta => ChiKind::Beta,
            ChiSpec::Elliptic => ChiKind::Elliptic,
            ChiSpec::Custom(_) => ChiKind::Custom,
        }
    }

    /// Builds the table; `weight_bound` is the largest `|2m|` the elliptic
    /// truncation must cover.
    pub fn build(&self, params: &AlgebraParams, weight_bound: f64) -> Result<WeightFunction> {
        match self {
            ChiSpec::Standard => chi_standard(params.q),
            ChiSpec::Beta => chi_beta(params.q, params.beta),
            ChiSpec::Elliptic => chi_elliptic(params.q, params.p, params.trunc_tol, weight_bound),
            ChiSpec::Custom(chi) => {
                check_generic_q(params.q)?;
                Ok(chi.clone())
            }
        }
    }
}

/// `ψ(t) = a0 + Σ a_k t^k`, a particular solution of `ψ(m) - ψ(m-1) = chi(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiSeries {
    coeffs: BTreeMap<i64, Scalar>,
    a0: Scalar,
    c0: Option<Scalar>,
    q: Scalar,
    kind: ChiKind,
}

/// Solves for the ψ-series coefficients of `chi`.
///
/// Without `c0` the constant `a0` is 0. With `c0`,
/// `a0 = c0 - Σ_{k>=1} (b_k - b_{-k})/(q^k - q^-k)`.
pub fn solve_psi(chi: &WeightFunction, q: Scalar, c0: Option<Scalar>) -> Result<PsiSeries> {
    check_generic_q(q)?;
    let mut coeffs = BTreeMap::new();
    let mut regularizer = real(0.0);
    for (&k, &b) in chi.coeffs() {
        let qk = q.powi(k as i32);
        let den = qk - qk.inv();
        if den.norm() < RESONANCE_TOL * qk.norm().max(qk.norm().recip()) {
            return Err(Error::Resonance { k });
        }
        insert_nonzero(&mut coeffs, k, qk * b / den);
        // Σ_{k>=1} (b_k - b_{-k})/(q^k - q^-k): the denominator is odd in k.
        regularizer += b / den;
    }
    let a0 = match c0 {
        Some(c) => c - regularizer,
        None => real(0.0),
    };
    if !a0.is_finite() {
        return Err(Error::NonFinite("a0"));
    }
    Ok(PsiSeries { coeffs, a0, c0, q, kind: chi.kind() })
}

impl PsiSeries {
    pub fn coeffs(&self) -> &BTreeMap<i64, Scalar> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Scalar {
        self.coeffs.get(&k).copied().unwrap_or(real(0.0))
    }

    pub fn a0(&self) -> Scalar {
        self.a0
    }

    pub fn c0(&self) -> Option<Scalar> {
        self.c0
    }

    pub fn q(&self) -> Scalar {
        self.q
    }

    pub fn kind(&self) -> ChiKind {
        self.kind
    }

    /// Same coefficients with a different constant term.
    pub fn with_a0(&self, a0: Scalar) -> PsiSeries {
        PsiSeries { a0, ..self.clone() }
    }

    pub fn eval_at(&self, t: Scalar) -> Scalar {
        self.a0 + self.series_at(t)
    }

    fn series_at(&self, t: Scalar) -> Scalar {
        self.coeffs.iter().map(|(&k, &a)| a * t.powi(k as i32)).sum()
    }

    /// `ψ(m)`.
    pub fn eval(&self, m: HalfInt) -> Scalar {
        self.eval_at(self.q.powi(m.twice() as i32))
    }

    /// `ψ(t1) - ψ(t2)`, summed termwise so that `a0` never enters.
    pub fn difference_at(&self, t1: Scalar, t2: Scalar) -> Scalar {
        self.coeffs.iter().map(|(&k, &a)| a * (t1.powi(k as i32) - t2.powi(k as i32))).sum()
    }

    /// `ψ(m1) - ψ(m2)`, independent of `a0` bit for bit.
    pub fn difference(&self, m1: HalfInt, m2: HalfInt) -> Scalar {
        self.difference_at(self.q.powi(m1.twice() as i32), self.q.powi(m2.twice() as i32))
    }

    /// `dψ/dt`.
    pub fn derivative_at(&self, t: Scalar) -> Scalar {
        self.coeffs.iter().map(|(&k, &a)| a * (k as f64) * t.powi((k - 1) as i32)).sum()
    }

    /// `phi(c) = ψ(J_op)` where `[J_op][J_op + 1] = c`.
    pub fn eval_phi_of_casimir(&self, c: Scalar) -> Result<Scalar> {
        Ok(self.eval_at(invert_casimir(c, self.q)?))
    }

    /// `phi'(c)`, via `dψ/dt` over `dc/dt = (q - 1/(q t^2))/(q - 1/q)^2`.
    pub fn phi_derivative(&self, c: Scalar) -> Result<Scalar> {
        let q = self.q;
        let t = invert_casimir(c, q)?;
        let d = q - q.inv();
        let dc_dt = (q - (q * t * t).inv()) / (d * d);
        let v = self.derivative_at(t) / dc_dt;
        if !v.is_finite() {
            return Err(Error::NonFinite("phi_derivative"));
        }
        Ok(v)
    }
}
