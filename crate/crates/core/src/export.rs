//! Structured (JSON) and flat-table output documents.
//!
//! Complex numbers are written as `[re, im]`. JSON numbers use the shortest
//! representation that round-trips the binary64 value; table columns use 17
//! significant digits.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::arith::{HalfInt, Scalar};
use crate::hopf::{InducedCoproduct, TensorRep};
use crate::irrep::Irrep;
use crate::linalg::CMatrix;
use crate::verify::CheckReport;
use crate::weightfn::{ChiKind, PsiSeries, Truncation, WeightFunction};

/// Maps `-0.0` to `0.0` so output does not depend on the sign of zero.
pub fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn pair(z: Scalar) -> [f64; 2] {
    [unsigned_zero(z.re), unsigned_zero(z.im)]
}

pub fn ser_complex<S: Serializer>(z: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    pair(*z).serialize(s)
}

pub fn ser_complex_opt<S: Serializer>(z: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
    z.map(pair).serialize(s)
}

/// A matrix as a list of rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRows(pub CMatrix);

impl Serialize for MatrixRows {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = &self.0;
        let rows: Vec<Vec<[f64; 2]>> =
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect()).collect();
        rows.serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub k: i64,
    #[serde(serialize_with = "ser_complex")]
    pub b: Scalar,
    #[serde(serialize_with = "ser_complex")]
    pub a: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientDocument {
    pub chi: ChiKind,
    #[serde(serialize_with = "ser_complex")]
    pub q: Scalar,
    #[serde(serialize_with = "ser_complex")]
    pub a0: Scalar,
    #[serde(serialize_with = "ser_complex_opt")]
    pub c0: Option<Scalar>,
    pub truncation: Option<Truncation>,
    pub rows: Vec<CoefficientRow>,
}

impl CoefficientDocument {
    pub fn new(chi: &WeightFunction, psi: &PsiSeries) -> Self {
        let mut keys: Vec<i64> = chi.coeffs().keys().chain(psi.coeffs().keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        CoefficientDocument {
            chi: chi.kind(),
            q: psi.q(),
            a0: psi.a0(),
            c0: psi.c0(),
            truncation: chi.truncation().copied(),
            rows: keys.into_iter().map(|k| CoefficientRow { k, b: chi.coeff(k), a: psi.coeff(k) }).collect(),
        }
    }

    /// One `k b_re b_im a_re a_im` line per coefficient, tab separated.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# k\tb_re\tb_im\ta_re\ta_im\n");
        let _ = writeln!(out, "# a0\t{}\t{}", num(self.a0.re), num(self.a0.im));
        if let Some(t) = &self.truncation {
            let _ = writeln!(out, "# order\t{}\tbound\t{}", t.order, num(t.first_omitted_bound));
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.k, num(r.b.re), num(r.b.im), num(r.a.re), num(r.a.im));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IrrepMatrices {
    #[serde(rename = "K2")]
    pub k2: MatrixRows,
    #[serde(rename = "K2inv")]
    pub k2_inv: MatrixRows,
    #[serde(rename = "Jplus")]
    pub j_plus: MatrixRows,
    #[serde(rename = "Jminus")]
    pub j_minus: MatrixRows,
    #[serde(rename = "JhatPlus")]
    pub jhat_plus: MatrixRows,
    #[serde(rename = "JhatMinus")]
    pub jhat_minus: MatrixRows,
    #[serde(rename = "C")]
    pub casimir: MatrixRows,
    #[serde(rename = "Chat")]
    pub casimir_hat: MatrixRows,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrrepDocument {
    pub j: HalfInt,
    pub eta: i64,
    pub dim: usize,
    pub chi: ChiKind,
    #[serde(serialize_with = "ser_complex")]
    pub q: Scalar,
    #[serde(serialize_with = "ser_complex")]
    pub a0: Scalar,
    #[serde(serialize_with = "ser_complex")]
    pub casimir_hat_eigenvalue: Scalar,
    pub matrices: IrrepMatrices,
    pub report: Option<CheckReport>,
}

impl IrrepDocument {
    pub fn new(rep: &Irrep, report: Option<CheckReport>) -> Self {
        let b = &rep.base;
        IrrepDocument {
            j: rep.j(),
            eta: rep.eta().value(),
            dim: rep.dim(),
            chi: rep.psi.kind(),
            q: rep.q(),
            a0: rep.psi.a0(),
            casimir_hat_eigenvalue: rep.casimir_hat_value(),
            matrices: IrrepMatrices {
                k2: MatrixRows(b.k2.clone()),
                k2_inv: MatrixRows(b.k2_inv.clone()),
                j_plus: MatrixRows(b.j_plus.clone()),
                j_minus: MatrixRows(b.j_minus.clone()),
                jhat_plus: MatrixRows(rep.jhat_plus.clone()),
                jhat_minus: MatrixRows(rep.jhat_minus.clone()),
                casimir: MatrixRows(rep.casimir.clone()),
                casimir_hat: MatrixRows(rep.casimir_hat.clone()),
            },
            report,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockEntry {
    pub weight: HalfInt,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoproductMatrices {
    #[serde(rename = "DJ0exp")]
    pub k2: MatrixRows,
    #[serde(rename = "DJplus")]
    pub j_plus: MatrixRows,
    #[serde(rename = "DJminus")]
    pub j_minus: MatrixRows,
    #[serde(rename = "DC")]
    pub casimir: MatrixRows,
    #[serde(rename = "DJhatPlus")]
    pub jhat_plus: MatrixRows,
    #[serde(rename = "DJhatMinus")]
    pub jhat_minus: MatrixRows,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoproductDocument {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub eta: i64,
    pub dim: usize,
    pub chi: ChiKind,
    #[serde(serialize_with = "ser_complex")]
    pub q: Scalar,
    pub blocks: Vec<BlockEntry>,
    pub matrices: CoproductMatrices,
    pub report: Option<CheckReport>,
}

impl CoproductDocument {
    pub fn new(t: &TensorRep, ind: &InducedCoproduct, report: Option<CheckReport>) -> Self {
        CoproductDocument {
            j1: t.left.j(),
            j2: t.right.j(),
            eta: t.left.eta().value(),
            dim: t.dim(),
            chi: t.left.psi.kind(),
            q: t.q(),
            blocks: t.blocks.iter().map(|b| BlockEntry { weight: b.weight, indices: b.indices.clone() }).collect(),
            matrices: CoproductMatrices {
                k2: MatrixRows(t.k2.clone()),
                j_plus: MatrixRows(t.j_plus.clone()),
                j_minus: MatrixRows(t.j_minus.clone()),
                casimir: MatrixRows(t.casimir.clone()),
                jhat_plus: MatrixRows(ind.jhat_plus.clone()),
                jhat_minus: MatrixRows(ind.jhat_minus.clone()),
            },
            report,
        }
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{:.16e}", unsigned_zero(x))
}

/// Pretty JSON with a trailing newline.
pub fn to_structured<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// One check per line: `label name residual tolerance pass`.
pub fn reports_to_table(reports: &[CheckReport]) -> String {
    let mut out = String::from("# instance\tcheck\tresidual\ttolerance\tpass\n");
    for r in reports {
        let label = r.label();
        for c in r.checks() {
            let _ = writeln!(out, "{label}\t{}\t{}\t{}\t{}", c.name, num(c.residual), num(c.tolerance), c.pass);
        }
    }
    out
}
