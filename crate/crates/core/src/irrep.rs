//! Finite-dimensional irreps of U_q(sl(2)) and their images under the
//! nonlinear map.
//!
//! Basis vectors are ordered `m = j, j-1, ..., -j`; matrices act on coordinate
//! columns, so a raising operator is strictly one-superdiagonal.

use std::sync::Arc;

use crate::arith::{classical_casimir_value, real, Eta, HalfInt, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{commutator_residual, diag, scaled_residual, CMatrix};
use crate::verify::{Check, CheckReport, ParamsEcho};
use crate::weightfn::{PsiSeries, WeightFunction};

/// Generators of U_q(sl(2)) on the spin-`j` irrep.
#[derive(Debug, Clone)]
pub struct ClassicalRep {
    pub j: HalfInt,
    pub eta: Eta,
    pub q: Scalar,
    /// `q^{2 J0}`.
    pub k2: CMatrix,
    pub k2_inv: CMatrix,
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
}

/// A complete mapped irrep: the classical generators, the hatted ones and both Casimirs.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub base: ClassicalRep,
    pub jhat_plus: CMatrix,
    pub jhat_minus: CMatrix,
    /// `J- J+ + [J0][J0+1]`.
    pub casimir: CMatrix,
    /// `Ĵ- Ĵ+ + ψ(J0)`.
    pub casimir_hat: CMatrix,
    pub psi: Arc<PsiSeries>,
}

/// How the lowering operator's matrix element is read off the ψ-series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoweringConvention {
    /// `Ĵ-|j,m> = (ψ(j) - ψ(m-1))^{(1-eta)/2} |j,m-1>`, the form that satisfies the commutator.
    Shifted,
    /// `Ĵ-|j,m> = (ψ(j) - ψ(m))^{(1-eta)/2} |j,m-1>`; kept only as a negative control.
    Literal,
}

fn index(j: HalfInt, m: HalfInt) -> usize {
    ((j.twice() - m.twice()) / 2) as usize
}

pub fn dimension(j: HalfInt) -> usize {
    (j.twice() + 1) as usize
}

fn ensure_spin(j: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    Ok(())
}

pub fn build_classical(j: HalfInt, eta: Eta, q: Scalar) -> Result<ClassicalRep> {
    ensure_spin(j)?;
    let n = dimension(j);
    let top = classical_casimir_value(j, q)?;
    let weights: Vec<HalfInt> = j.weights_descending().collect();
    let k2 = diag(&weights.iter().map(|m| q.powi(m.twice() as i32)).collect::<Vec<_>>());
    let k2_inv = diag(&weights.iter().map(|m| q.powi(-m.twice() as i32)).collect::<Vec<_>>());
    let mut j_plus = CMatrix::zeros(n, n);
    let mut j_minus = CMatrix::zeros(n, n);
    for &m in &weights {
        if m != j {
            let up = m + HalfInt::ONE;
            j_plus[(index(j, up), index(j, m))] = eta.raising().apply(top - classical_casimir_value(m, q)?);
        }
        if m != -j {
            let down = m - HalfInt::ONE;
            j_minus[(index(j, down), index(j, m))] = eta.lowering().apply(top - classical_casimir_value(down, q)?);
        }
    }
    Ok(ClassicalRep { j, eta, q, k2, k2_inv, j_plus, j_minus })
}

pub fn build_mapped(base: ClassicalRep, psi: Arc<PsiSeries>) -> Result<Irrep> {
    build_mapped_with(base, psi, LoweringConvention::Shifted)
}

pub fn build_mapped_with(base: ClassicalRep, psi: Arc<PsiSeries>, convention: LoweringConvention) -> Result<Irrep> {
    if (psi.q() - base.q).norm() > 0.0 {
        return Err(Error::ParameterMismatch("q"));
    }
    let (j, eta) = (base.j, base.eta);
    let n = dimension(j);
    let mut jhat_plus = CMatrix::zeros(n, n);
    let mut jhat_minus = CMatrix::zeros(n, n);
    for m in j.weights_descending() {
        if m != j {
            let v = eta.raising().apply(psi.difference(j, m));
            jhat_plus[(index(j, m + HalfInt::ONE), index(j, m))] = v;
        }
        if m != -j {
            let down = m - HalfInt::ONE;
            let arg = match convention {
                LoweringConvention::Shifted => psi.difference(j, down),
                LoweringConvention::Literal => psi.difference(j, m),
            };
            jhat_minus[(index(j, down), index(j, m))] = eta.lowering().apply(arg);
        }
    }
    let (casimir, casimir_hat) = build_casimirs(&base, &jhat_plus, &jhat_minus, &psi)?;
    let rep = Irrep { base, jhat_plus, jhat_minus, casimir, casimir_hat, psi };
    if !rep.all_finite() {
        return Err(Error::NonFinite("irrep matrices"));
    }
    Ok(rep)
}

/// `(C, Ĉ)` with `C = J- J+ + [J0][J0+1]` and `Ĉ = Ĵ- Ĵ+ + ψ(J0)`.
pub fn build_casimirs(
    base: &ClassicalRep,
    jhat_plus: &CMatrix,
    jhat_minus: &CMatrix,
    psi: &PsiSeries,
) -> Result<(CMatrix, CMatrix)> {
    let weights: Vec<HalfInt> = base.j.weights_descending().collect();
    let mut classical_diag = Vec::with_capacity(weights.len());
    for &m in &weights {
        classical_diag.push(classical_casimir_value(m, base.q)?);
    }
    let psi_diag: Vec<Scalar> = weights.iter().map(|&m| psi.eval(m)).collect();
    let c = &base.j_minus * &base.j_plus + diag(&classical_diag);
    let chat = jhat_minus * jhat_plus + diag(&psi_diag);
    Ok((c, chat))
}

impl Irrep {
    pub fn j(&self) -> HalfInt {
        self.base.j
    }

    pub fn eta(&self) -> Eta {
        self.base.eta
    }

    pub fn q(&self) -> Scalar {
        self.base.q
    }

    pub fn dim(&self) -> usize {
        dimension(self.base.j)
    }

    /// `ψ(j)`, the eigenvalue of `Ĉ`.
    pub fn casimir_hat_value(&self) -> Scalar {
        self.psi.eval(self.base.j)
    }

    pub fn weights(&self) -> Vec<HalfInt> {
        self.base.j.weights_descending().collect()
    }

    fn all_finite(&self) -> bool {
        [&self.base.j_plus, &self.base.j_minus, &self.jhat_plus, &self.jhat_minus, &self.casimir, &self.casimir_hat]
            .iter()
            .all(|m| crate::linalg::is_finite(m))
    }
}

/// Residuals of the defining relations on a mapped irrep, each against `match_tol`.
pub fn check_relations(rep: &Irrep, chi: &WeightFunction, echo: ParamsEcho, match_tol: f64) -> Result<CheckReport> {
    let q = rep.q();
    let q2 = q * q;
    let weights = rep.weights();
    let (k2, k2i) = (&rep.base.k2, &rep.base.k2_inv);
    let (jp, jm) = (&rep.jhat_plus, &rep.jhat_minus);
    let chat = &rep.casimir_hat;
    let n = rep.dim();

    let chi_diag = diag(&weights.iter().map(|&m| chi.eval(m, q)).collect::<Vec<_>>());
    let mut bracket_2m = Vec::with_capacity(n);
    for &m in &weights {
        bracket_2m.push(crate::arith::q_bracket(m + m, q)?);
    }
    let identity = CMatrix::identity(n, n);
    let top = classical_casimir_value(rep.j(), q)?;

    let mut report = CheckReport::new(echo);
    let mut add = |name: &str, residual: f64| report.push(Check::new(name, residual, match_tol));

    add("grading_raise", scaled_residual(&(k2 * jp * k2i - jp * q2), &[jp]));
    add("grading_lower", scaled_residual(&(k2 * jm * k2i - jm / q2), &[jm]));
    add("commutator_chi", commutator_residual(jp, jm, Some(&chi_diag)));
    add(
        "casimir_eigenvalue",
        scaled_residual(&(chat - &identity * rep.casimir_hat_value()), &[chat]),
    );
    add("casimir_central_raise", commutator_residual(chat, jp, None));
    add("casimir_central_lower", commutator_residual(chat, jm, None));
    add("casimir_central_k2", commutator_residual(chat, k2, None));
    let (cp, cm) = (&rep.base.j_plus, &rep.base.j_minus);
    let two_j0 = diag(&bracket_2m);
    add("classical_commutator", commutator_residual(cp, cm, Some(&two_j0)));
    add("classical_casimir", scaled_residual(&(&rep.casimir - &identity * top), &[&rep.casimir]));
    Ok(report)
}

/// `true` when every entry is zero outside the superdiagonal.
pub fn is_raising_shaped(m: &CMatrix) -> bool {
    m.iter().enumerate().all(|(idx, z)| {
        let (r, c) = (idx % m.nrows(), idx / m.nrows());
        c == r + 1 || *z == real(0.0)
    })
}

/// `true` when every entry is zero outside the subdiagonal.
pub fn is_lowering_shaped(m: &CMatrix) -> bool {
    m.iter().enumerate().all(|(idx, z)| {
        let (r, c) = (idx % m.nrows(), idx / m.nrows());
        r == c + 1 || *z == real(0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;
    use crate::arith::q_bracket;
    use crate::verify::oracle::{oracle_q_bracket, oracle_theta_sum};
    use crate::weightfn::{chi_elliptic, chi_standard, solve_psi};

    const Q: f64 = 1.2;

    fn half(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn elliptic() -> (WeightFunction, Arc<PsiSeries>) {
        let q = real(Q);
        let chi = chi_elliptic(q, real(0.1), 1e-16, 10.0).unwrap();
        let psi = Arc::new(solve_psi(&chi, q, None).unwrap());
        (chi, psi)
    }

    fn echo() -> ParamsEcho {
        ParamsEcho::default()
    }

    #[test]
    fn spin_zero_is_trivial() {
        let base = build_classical(HalfInt::ZERO, Eta::Zero, real(Q)).unwrap();
        assert_eq!(base.k2, CMatrix::identity(1, 1));
        assert_eq!(base.j_plus, CMatrix::zeros(1, 1));
        assert_eq!(base.j_minus, CMatrix::zeros(1, 1));
        let (chi, psi) = elliptic();
        let rep = build_mapped(base, psi.clone()).unwrap();
        assert_eq!(rep.casimir_hat[(0, 0)], psi.eval(HalfInt::ZERO));
        let report = check_relations(&rep, &chi, echo(), 1e-10).unwrap();
        for c in report.checks() {
            assert_eq!(c.residual, 0.0, "{}", c.name);
        }
    }

    #[test]
    fn spin_half_classical_entry() {
        let base = build_classical(half(1), Eta::Zero, real(Q)).unwrap();
        // sqrt([j - m][j + m + 1]) at j = 1/2, m = -1/2.
        let want = (oracle_q_bracket(half(2), Q) * oracle_q_bracket(half(2), Q)).sqrt();
        assert!((base.j_plus[(0, 1)] - want).norm() < 1e-14);
        assert!(is_raising_shaped(&base.j_plus));
        assert!(is_lowering_shaped(&base.j_minus));
    }

    #[test]
    fn spin_one_eta_plus_classical() {
        let q = real(Q);
        let base = build_classical(HalfInt::ONE, Eta::Plus, q).unwrap();
        for i in 0..2 {
            assert_eq!(base.j_minus[(i + 1, i)], real(1.0));
        }
        let top = oracle_q_bracket(HalfInt::ONE, Q) * oracle_q_bracket(HalfInt::from_int(2), Q);
        for (col, m) in [(1usize, 0i64), (2, -2)] {
            let mm = half(m);
            let want = top - oracle_q_bracket(mm, Q) * oracle_q_bracket(mm + HalfInt::ONE, Q);
            assert!((base.j_plus[(col - 1, col)] - want).norm() < 1e-13);
        }
        let comm = commutator(&base.j_plus, &base.j_minus);
        for (i, m) in HalfInt::ONE.weights_descending().enumerate() {
            assert!((comm[(i, i)] - q_bracket(m + m, q).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn standard_map_is_the_identity() {
        let q = real(Q);
        let psi = Arc::new(solve_psi(&chi_standard(q).unwrap(), q, None).unwrap());
        for eta in Eta::ALL {
            let rep = build_mapped(build_classical(half(3), eta, q).unwrap(), psi.clone()).unwrap();
            assert!(crate::linalg::max_abs(&(&rep.jhat_plus - &rep.base.j_plus)) < 1e-12);
            assert!(crate::linalg::max_abs(&(&rep.jhat_minus - &rep.base.j_minus)) < 1e-12);
        }
    }

    #[test]
    fn spin_half_elliptic_eta_plus_entry_is_chi() {
        let (_, psi) = elliptic();
        let rep = build_mapped(build_classical(half(1), Eta::Plus, real(Q)).unwrap(), psi).unwrap();
        let want = oracle_theta_sum(half(1), real(Q), real(0.1), 8);
        assert!((rep.jhat_plus[(0, 1)] - want).norm() < 1e-14);
    }

    #[test]
    fn highest_weight_is_annihilated() {
        let (_, psi) = elliptic();
        for tj in 0..=5 {
            let rep = build_mapped(build_classical(half(tj), Eta::Zero, real(Q)).unwrap(), psi.clone()).unwrap();
            for r in 0..rep.dim() {
                assert_eq!(rep.jhat_plus[(r, 0)], real(0.0));
            }
            assert!(is_raising_shaped(&rep.jhat_plus));
            assert!(is_lowering_shaped(&rep.jhat_minus));
        }
    }

    #[test]
    fn standard_casimirs_differ_by_constant() {
        let q = real(Q);
        let psi = Arc::new(solve_psi(&chi_standard(q).unwrap(), q, None).unwrap());
        let rep = build_mapped(build_classical(HalfInt::ONE, Eta::Zero, q).unwrap(), psi.clone()).unwrap();
        // ψ(m) = [m][m+1] + [2]/(q - 1/q)^2 for the standard table with a0 = 0.
        let d = q - q.inv();
        let offset = (q + q.inv()) / (d * d);
        let diff = &rep.casimir_hat - &rep.casimir - CMatrix::identity(3, 3) * offset;
        assert!(crate::linalg::max_abs(&diff) < 1e-12);
    }

    #[test]
    fn elliptic_casimir_eigenvalue() {
        let (_, psi) = elliptic();
        let rep = build_mapped(build_classical(half(3), Eta::Zero, real(Q)).unwrap(), psi.clone()).unwrap();
        let diff = &rep.casimir_hat - CMatrix::identity(4, 4) * psi.eval(half(3));
        assert!(crate::linalg::max_abs(&diff) < 1e-10);
    }

    #[test]
    fn elliptic_relations_pass_at_spin_two() {
        let (chi, psi) = elliptic();
        for eta in Eta::ALL {
            let rep = build_mapped(build_classical(HalfInt::from_int(2), eta, real(Q)).unwrap(), psi.clone()).unwrap();
            let report = check_relations(&rep, &chi, echo(), 1e-10).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn corrupted_entry_fails_commutator() {
        let (chi, psi) = elliptic();
        let mut rep = build_mapped(build_classical(HalfInt::ONE, Eta::Zero, real(Q)).unwrap(), psi).unwrap();
        rep.jhat_plus[(0, 1)] *= 1.01;
        let report = check_relations(&rep, &chi, echo(), 1e-10).unwrap();
        let c = report.get("commutator_chi").unwrap();
        assert!(!c.pass);
        assert!(!report.passed());
    }

    #[test]
    fn literal_lowering_convention_fails() {
        let (chi, psi) = elliptic();
        let base = build_classical(HalfInt::ONE, Eta::Zero, real(Q)).unwrap();
        let rep = build_mapped_with(base, psi, LoweringConvention::Literal).unwrap();
        let report = check_relations(&rep, &chi, echo(), 1e-10).unwrap();
        assert!(report.get("commutator_chi").unwrap().residual > 1e-3);
    }

    #[test]
    fn mismatched_q_is_rejected() {
        let (_, psi) = elliptic();
        let base = build_classical(HalfInt::ONE, Eta::Zero, real(1.3)).unwrap();
        assert!(matches!(build_mapped(base, psi), Err(Error::ParameterMismatch("q"))));
    }
}
