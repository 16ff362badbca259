//! Reference computations that bypass the coefficient tables entirely.
//!
//! For real positive `q` and real nonnegative `p` everything is evaluated in
//! 192-bit binary floating point; other parameters fall back to complex binary64.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::arith::{HalfInt, Scalar};

/// Mantissa bits used by the oracle arithmetic.
pub const ORACLE_BITS: usize = 192;

pub type Hp = FBig<HalfEven>;

pub fn hp(x: f64) -> Hp {
    Hp::try_from(x).expect("finite f64").with_precision(ORACLE_BITS).value()
}

pub fn hp_to_f64(x: &Hp) -> f64 {
    x.to_f64().value()
}

pub fn hp_powi(x: &Hp, n: i64) -> Hp {
    if n >= 0 {
        x.powi(n.into())
    } else {
        hp(1.0) / x.powi((-n).into())
    }
}

/// `q^x` at half-integer `x`, through `sqrt(q)`.
pub fn hp_q_pow(q: &Hp, x: HalfInt) -> Hp {
    hp_powi(&q.sqrt(), x.twice())
}

/// `[x]` for real `q > 0` in oracle precision.
pub fn hp_q_bracket(x: HalfInt, q: &Hp) -> Hp {
    let up = hp_q_pow(q, x);
    let den = q - hp(1.0) / q;
    (&up - hp(1.0) / &up) / den
}

/// `[x]` evaluated from the defining quotient in oracle precision.
pub fn oracle_q_bracket(x: HalfInt, q: f64) -> f64 {
    hp_to_f64(&hp_q_bracket(x, &hp(q)))
}

fn hp_eligible(q: Scalar, p: Scalar) -> bool {
    q.im == 0.0 && q.re > 0.0 && p.im == 0.0 && p.re >= 0.0
}

/// `Σ_{n=-N}^{N-1} (-1)^n q^{2m(2n+1)} p^{(n+1/2)^2}` summed term by term.
pub fn oracle_theta_sum(m: HalfInt, q: Scalar, p: Scalar, n: usize) -> Scalar {
    let n = n as i64;
    let tm = m.twice();
    if hp_eligible(q, p) {
        let qh = hp(q.re);
        let p4 = hp(p.re).sqrt().sqrt();
        let mut acc = hp(0.0);
        for i in -n..n {
            let k = 2 * i + 1;
            let term = hp_powi(&qh, tm * k) * p4.powi((k * k).into());
            if i.rem_euclid(2) == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Scalar::new(hp_to_f64(&acc), 0.0)
    } else {
        let p4 = p.sqrt().sqrt();
        (-n..n)
            .map(|i| {
                let k = 2 * i + 1;
                let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sign * q.powi((tm * k) as i32) * p4.powi((k * k) as i32)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_with_zero_nome_vanishes() {
        let s = oracle_theta_sum(HalfInt::from_twice(3), Scalar::new(1.2, 0.0), Scalar::new(0.0, 0.0), 6);
        assert_eq!(s, Scalar::new(0.0, 0.0));
    }

    #[test]
    fn theta_at_zero_weight_is_q_independent() {
        let p = Scalar::new(0.1, 0.0);
        let a = oracle_theta_sum(HalfInt::ZERO, Scalar::new(1.2, 0.0), p, 6);
        let b = oracle_theta_sum(HalfInt::ZERO, Scalar::new(3.0, 0.0), p, 6);
        assert_eq!(a, b);
        // Odd in m, so exactly zero at m = 0 up to rounding of the final sum.
        assert!(a.norm() < 1e-30);
    }

    #[test]
    fn theta_is_stable_in_the_order() {
        let (q, p) = (Scalar::new(1.2, 0.0), Scalar::new(0.1, 0.0));
        for tm in -10..=10 {
            let m = HalfInt::from_twice(tm);
            let a = oracle_theta_sum(m, q, p, 5);
            let b = oracle_theta_sum(m, q, p, 7);
            assert!((a - b).norm() < 1e-16, "m = {m}");
        }
    }

    #[test]
    fn complex_fallback_agrees_with_high_precision() {
        let q = Scalar::new(1.2, 0.0);
        let p = Scalar::new(0.1, 0.0);
        let m = HalfInt::from_twice(3);
        let exact = oracle_theta_sum(m, q, p, 6);
        // Force the binary64 path with a vanishing imaginary perturbation of p.
        let approx = oracle_theta_sum(m, q, Scalar::new(0.1, 1e-300), 6);
        assert!((exact - approx).norm() < 1e-14);
    }

    #[test]
    fn bracket_oracle_values() {
        assert_eq!(oracle_q_bracket(HalfInt::ZERO, 1.2), 0.0);
        assert!((oracle_q_bracket(HalfInt::ONE, 1.2) - 1.0).abs() < 1e-16);
        let want = (1.2f64 * 1.2 - 1.0 / (1.2 * 1.2)) / (1.2 - 1.0 / 1.2);
        assert!((oracle_q_bracket(HalfInt::from_int(2), 1.2) - want).abs() < 1e-14);
    }
}
