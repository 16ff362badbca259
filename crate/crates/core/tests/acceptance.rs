//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use uqp_core::arith::{real, AlgebraParams, Eta, HalfInt, Scalar};
use uqp_core::hopf::{build_induced_coproduct_with, build_tensor, check_coproduct, CoproductTolerances, RatioOperator};
use uqp_core::irrep::{build_classical, build_mapped, build_mapped_with, check_relations, LoweringConvention};
use uqp_core::linalg::{max_abs, scaled_residual, CMatrix};
use uqp_core::verify::oracle::{hp, hp_powi, hp_q_bracket, hp_to_f64, oracle_theta_sum};
use uqp_core::verify::{oracle_eigensolve, run_suite, ParamsEcho, SuiteConfig};
use uqp_core::weightfn::{chi_beta, chi_elliptic, chi_standard, solve_psi, ChiSpec, PsiSeries, WeightFunction};

const Q: f64 = 1.2;
const P: f64 = 0.1;
const BETA: f64 = 0.3;
const TRUNC_TOL: f64 = 1e-16;

type Reference<'a> = Box<dyn Fn(HalfInt) -> f64 + 'a>;

fn h(t: i64) -> HalfInt {
    HalfInt::from_twice(t)
}

fn elliptic(weight_bound: f64) -> WeightFunction {
    chi_elliptic(real(Q), real(P), TRUNC_TOL, weight_bound).unwrap()
}

fn psi_of(chi: &WeightFunction) -> Arc<PsiSeries> {
    Arc::new(solve_psi(chi, real(Q), None).unwrap())
}

/// Smallest theta order whose sum is stable under `N -> N + 2` to `TRUNC_TOL` at every test weight.
fn stable_theta_order(max_twice_m: i64) -> usize {
    let (q, p) = (real(Q), real(P));
    (1..64)
        .find(|&n| {
            (-max_twice_m..=max_twice_m)
                .all(|tm| (oracle_theta_sum(h(tm), q, p, n) - oracle_theta_sum(h(tm), q, p, n + 2)).norm() < TRUNC_TOL)
        })
        .expect("theta oracle converges")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `|ψ(m) - ψ(m-1) - χ(m)|` with χ from independent oracles, `|m| <= 5`.
fn ac1() -> Outcome {
    let start = Instant::now();
    let n = stable_theta_order(12);
    let qh = hp(Q);
    let bh = hp(BETA);
    let one = hp(1.0);
    let cases: [(&str, WeightFunction, Reference<'_>); 3] = [
        ("standard", chi_standard(real(Q)).unwrap(), Box::new(|m: HalfInt| hp_to_f64(&hp_q_bracket(m + m, &qh)))),
        (
            "beta",
            chi_beta(real(Q), real(BETA)).unwrap(),
            Box::new(|m: HalfInt| {
                let b = hp_q_bracket(m, &qh);
                hp_to_f64(&(hp_q_bracket(m + m, &qh) * (&one + &bh * &b * &b)))
            }),
        ),
        ("elliptic", elliptic(12.0), Box::new(move |m: HalfInt| oracle_theta_sum(m, real(Q), real(P), n).re)),
    ];
    let mut worst = 0.0f64;
    for (_, chi, oracle) in &cases {
        let psi = solve_psi(chi, real(Q), None).unwrap();
        for tm in -10..=10 {
            let m = h(tm);
            let r = (psi.difference(m, m - HalfInt::ONE) - oracle(m)).norm();
            worst = worst.max(r);
        }
    }
    let pass = worst <= 1e-10;
    outcome(pass, format!("max residual {worst:.3e} <= 1e-10, theta oracle N = {n}, {:?}", start.elapsed()))
}

/// Relations on every irrep `2j <= 9`, every eta, for all three curated χ.
fn ac2() -> Outcome {
    let start = Instant::now();
    let chis = [chi_standard(real(Q)).unwrap(), chi_beta(real(Q), real(BETA)).unwrap(), elliptic(11.0)];
    let mut worst = [0.0f64; 4];
    for chi in &chis {
        let psi = psi_of(chi);
        for eta in Eta::ALL {
            for tj in 0..=9 {
                let rep = build_mapped(build_classical(h(tj), eta, real(Q)).unwrap(), psi.clone()).unwrap();
                let r = check_relations(&rep, chi, ParamsEcho::default(), 1e-10).unwrap();
                let get = |n: &str| r.get(n).unwrap().residual;
                worst[0] = worst[0].max(get("grading_raise")).max(get("grading_lower"));
                worst[1] = worst[1].max(get("commutator_chi"));
                worst[2] = worst[2].max(get("casimir_eigenvalue"));
                worst[3] = worst[3]
                    .max(get("casimir_central_raise"))
                    .max(get("casimir_central_lower"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst[0] <= 1e-12
        && worst[1] <= 1e-10
        && worst[2] <= 1e-10
        && worst[3] <= 1e-10
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "grading {:.3e} <= 1e-12, commutator {:.3e} <= 1e-10, casimir {:.3e} <= 1e-10, centrality {:.3e} <= 1e-10, {elapsed:?} < 1s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// The standard χ with `a0 = 0` gives back the classical generators.
fn ac3() -> Outcome {
    let psi = psi_of(&chi_standard(real(Q)).unwrap());
    let mut worst = 0.0f64;
    for eta in Eta::ALL {
        for tj in 0..=9 {
            let rep = build_mapped(build_classical(h(tj), eta, real(Q)).unwrap(), psi.clone()).unwrap();
            worst = worst
                .max(max_abs(&(&rep.jhat_plus - &rep.base.j_plus)))
                .max(max_abs(&(&rep.jhat_minus - &rep.base.j_minus)));
        }
    }
    outcome(worst <= 1e-12, format!("max |Ĵ± - J±| {worst:.3e} <= 1e-12"))
}

/// ψ coefficients of the β example against the closed forms.
fn ac4() -> Outcome {
    let psi = solve_psi(&chi_beta(real(Q), real(BETA)).unwrap(), real(Q), None).unwrap();
    let (q, b, one) = (hp(Q), hp(BETA), hp(1.0));
    let d = &q - &one / &q;
    let d2 = &d * &d;
    let s = &q + &one / &q;
    let mut worst = 0.0f64;
    for k in [-2i64, -1, 1, 2] {
        let want = if k.abs() == 1 {
            hp_powi(&q, k) / &d2 * (&one - hp(2.0) * &b / &d2)
        } else {
            hp_powi(&q, k) * &b / (&d2 * &d2 * &s)
        };
        let want = hp_to_f64(&want);
        worst = worst.max((psi.coeff(k) - want).norm() / want.abs());
    }
    let extra = psi.coeffs().keys().any(|k| k.abs() > 2);
    outcome(worst <= 1e-12 && !extra, format!("max relative error {worst:.3e} <= 1e-12"))
}

/// Structure of the elliptic table and agreement with direct summation.
fn ac5() -> Outcome {
    let chi = elliptic(10.0);
    let max_k = chi.coeffs().keys().map(|k| k.abs()).max().unwrap_or(0);
    let mut structural = true;
    for k in 1..=max_k + 2 {
        if k % 2 == 0 {
            structural &= chi.coeff(k) == real(0.0) && chi.coeff(-k) == real(0.0);
        } else {
            structural &= chi.coeff(-k) == -chi.coeff(k);
        }
    }
    let n = stable_theta_order(10);
    let mut worst = 0.0f64;
    for tm in -10..=10 {
        let m = h(tm);
        worst = worst.max((chi.eval(m, real(Q)) - oracle_theta_sum(m, real(Q), real(P), n)).norm());
    }
    outcome(
        structural && worst <= 1e-14,
        format!("b_even = 0 and b_-k = -b_k: {structural}, table vs summation {worst:.3e} <= 1e-14"),
    )
}

/// Induced coproduct on every pair `2j1, 2j2 <= 4`, elliptic χ, eta = 0.
fn ac6() -> Outcome {
    let start = Instant::now();
    let mut config = SuiteConfig::default_suite(AlgebraParams::default(), ChiSpec::Elliptic);
    config.spins.clear();
    let reports = run_suite(&config).unwrap();
    let mut worst = [0.0f64; 4];
    let mut complete = reports.len() == 25;
    for r in &reports {
        let get = |n: &str| r.get(n).map(|c| c.residual).unwrap_or(f64::INFINITY);
        complete &= r.get("grading_raise").is_some();
        worst[0] = worst[0].max(get("grading_raise")).max(get("grading_lower"));
        worst[1] = worst[1].max(get("commutator_chi"));
        worst[2] = worst[2].max(get("block_word_traces"));
        worst[3] = worst[3].max(get("casimir_spectrum"));
    }
    let elapsed = start.elapsed();
    let pass = complete
        && worst[0] <= 1e-10
        && worst[1] <= 1e-9
        && worst[2] <= 1e-8
        && worst[3] <= 1e-8
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "grading {:.3e} <= 1e-10, commutator {:.3e} <= 1e-9, word traces {:.3e} <= 1e-8, spectrum {:.3e} <= 1e-8, {elapsed:?} < 10s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// The two broken constructions must fail the commutator by at least 1e-3.
fn ac7() -> Outcome {
    let chi = elliptic(12.0);
    let psi = psi_of(&chi);
    let mut literal = 0.0f64;
    for tj in 1..=9 {
        let base = build_classical(h(tj), Eta::Zero, real(Q)).unwrap();
        let rep = build_mapped_with(base, psi.clone(), LoweringConvention::Literal).unwrap();
        let r = check_relations(&rep, &chi, ParamsEcho::default(), 1e-10).unwrap();
        literal = literal.max(r.get("commutator_chi").unwrap().residual);
    }
    let mut identity = 0.0f64;
    for (a, b) in [(1, 1), (2, 1), (2, 2), (4, 3)] {
        let l = Arc::new(build_mapped(build_classical(h(a), Eta::Zero, real(Q)).unwrap(), psi.clone()).unwrap());
        let r = Arc::new(build_mapped(build_classical(h(b), Eta::Zero, real(Q)).unwrap(), psi.clone()).unwrap());
        let t = build_tensor(l, r).unwrap();
        let ind = build_induced_coproduct_with(&t, &psi, 1e-8, RatioOperator::Identity).unwrap();
        let tol = CoproductTolerances { match_tol: 1e-10, commutator_tol: 1e-9, spectral_tol: 1e-8 };
        let rep = check_coproduct(&t, &ind, &chi, ParamsEcho::default(), tol).unwrap();
        identity = identity.max(rep.get("commutator_chi").unwrap().residual);
    }
    outcome(
        literal >= 1e-3 && identity >= 1e-3,
        format!("literal lowering {literal:.3e} >= 1e-3, identity ratio {identity:.3e} >= 1e-3"),
    )
}

/// Ĵ+Ĵ-, Ĵ-Ĵ+ and the spectrum of Ĉ do not depend on eta.
fn ac8() -> Outcome {
    let chis = [chi_standard(real(Q)).unwrap(), chi_beta(real(Q), real(BETA)).unwrap(), elliptic(11.0)];
    let mut worst = 0.0f64;
    for chi in &chis {
        let psi = psi_of(chi);
        for tj in 0..=9 {
            let reps: Vec<_> = Eta::ALL
                .iter()
                .map(|&eta| build_mapped(build_classical(h(tj), eta, real(Q)).unwrap(), psi.clone()).unwrap())
                .collect();
            let products = |i: usize| -> (CMatrix, CMatrix, Vec<Scalar>) {
                let r = &reps[i];
                (
                    &r.jhat_plus * &r.jhat_minus,
                    &r.jhat_minus * &r.jhat_plus,
                    oracle_eigensolve(&r.casimir_hat, 1e-8).unwrap(),
                )
            };
            let (p0, m0, s0) = products(1);
            for i in [0, 2] {
                let (p, m, s) = products(i);
                worst = worst.max(scaled_residual(&(&p - &p0), &[&p0])).max(scaled_residual(&(&m - &m0), &[&m0]));
                let scale = 1.0 + s0.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for (a, b) in s.iter().zip(&s0) {
                    worst = worst.max((a - b).norm() / scale);
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("max disagreement {worst:.3e} <= 1e-10"))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "functional equation", ac1),
        ("AC2", "irrep relations", ac2),
        ("AC3", "identity-map reduction", ac3),
        ("AC4", "beta example coefficients", ac4),
        ("AC5", "elliptic coefficient structure", ac5),
        ("AC6", "induced coproduct", ac6),
        ("AC7", "negative controls", ac7),
        ("AC8", "eta independence", ac8),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let o = run();
        println!("{id} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
