//! Scalar arithmetic shared by every other module: half-integer labels,
//! q-numbers, the classical Casimir value and its quadratic inversion.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex binary64 scalar. Real parameters are carried with zero imaginary part.
pub type Scalar = Complex64;

/// Closeness to ±1 below which q is rejected as degenerate.
pub const DEGENERATE_Q_TOL: f64 = 1e3 * f64::EPSILON;

/// Tolerance on `| |u| - 1 |` for the roots of the Casimir quadratic.
pub const BRANCH_TOL: f64 = 1e-10;

pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// An integer or half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Parses a nonnegative spin label such as `0`, `2` or `3/2`.
    pub fn parse_spin(s: &str) -> Result<Self> {
        let v: HalfInt = s.parse()?;
        if v.0 < 0 {
            return Err(Error::InvalidSpin(s.to_string()));
        }
        Ok(v)
    }

    /// `self, self - 1, ..., -self`; the weight basis of a spin-`self` irrep.
    pub fn weights_descending(self) -> impl Iterator<Item = HalfInt> {
        let top = self.0;
        (0..=top).map(move |i| HalfInt(top - 2 * i))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpin(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((num, "2")) => num.trim().parse::<i64>().map(HalfInt).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => t
                .parse::<i64>()
                .ok()
                .and_then(|n| n.checked_mul(2))
                .map(HalfInt)
                .ok_or_else(bad),
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent `(1 ± eta)/2` distributing the map's factor between the ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Power {
    Zero,
    Half,
    One,
}

impl Power {
    /// `z^0 = 1`, principal `sqrt(z)`, or `z`.
    pub fn apply(self, z: Scalar) -> Scalar {
        match self {
            Power::Zero => real(1.0),
            Power::Half => z.sqrt(),
            Power::One => z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Eta {
    Minus,
    Zero,
    Plus,
}

impl Eta {
    pub const ALL: [Eta; 3] = [Eta::Minus, Eta::Zero, Eta::Plus];

    pub fn value(self) -> i64 {
        match self {
            Eta::Minus => -1,
            Eta::Zero => 0,
            Eta::Plus => 1,
        }
    }

    /// `(1 + eta)/2`, carried by the raising operator.
    pub fn raising(self) -> Power {
        match self {
            Eta::Minus => Power::Zero,
            Eta::Zero => Power::Half,
            Eta::Plus => Power::One,
        }
    }

    /// `(1 - eta)/2`, carried by the lowering operator.
    pub fn lowering(self) -> Power {
        match self {
            Eta::Minus => Power::One,
            Eta::Zero => Power::Half,
            Eta::Plus => Power::Zero,
        }
    }
}

impl TryFrom<i64> for Eta {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Eta::Minus),
            0 => Ok(Eta::Zero),
            1 => Ok(Eta::Plus),
            other => Err(Error::InvalidEta(other)),
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Eta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

/// Deformation parameters and numerical controls.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraParams {
    pub q: Scalar,
    /// Elliptic nome.
    pub p: Scalar,
    pub beta: Scalar,
    /// Target for the first omitted theta-series term.
    pub trunc_tol: f64,
    /// Residual acceptance for algebraic identities.
    pub match_tol: f64,
    /// Eigenvalue identification and spectral-calculus tolerance.
    pub spectral_tol: f64,
    pub eta: Eta,
    /// Regularization constant fixing `a0`; `None` means `a0 = 0`.
    pub c0: Option<Scalar>,
}

impl Default for AlgebraParams {
    fn default() -> Self {
        AlgebraParams {
            q: real(1.2),
            p: real(0.1),
            beta: real(0.0),
            trunc_tol: 1e-16,
            match_tol: 1e-10,
            spectral_tol: 1e-8,
            eta: Eta::Zero,
            c0: None,
        }
    }
}

impl AlgebraParams {
    /// Checks the generic-q and convergence preconditions.
    ///
    /// `match_tol = 0` is accepted so that a run can be forced to fail as a
    /// negative control; the other tolerances must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        check_generic_q(self.q)?;
        let pn = self.p.norm();
        if !pn.is_finite() || pn >= 1.0 {
            return Err(Error::NonConvergent(pn));
        }
        if !(self.trunc_tol > 0.0) || !self.trunc_tol.is_finite() {
            return Err(Error::InvalidTolerance { name: "trunc_tol", value: self.trunc_tol });
        }
        if !(self.match_tol >= 0.0) || !self.match_tol.is_finite() {
            return Err(Error::InvalidTolerance { name: "match_tol", value: self.match_tol });
        }
        if !(self.spectral_tol > 0.0) || !self.spectral_tol.is_finite() {
            return Err(Error::InvalidTolerance { name: "spectral_tol", value: self.spectral_tol });
        }
        if !self.beta.is_finite() {
            return Err(Error::NonFinite("beta"));
        }
        Ok(())
    }
}

/// Rejects q at ±1 (where the bracket is 0/0) and on the unit circle.
pub fn check_generic_q(q: Scalar) -> Result<()> {
    if !q.is_finite() {
        return Err(Error::NonFinite("q"));
    }
    if (q - 1.0).norm() < DEGENERATE_Q_TOL || (q + 1.0).norm() < DEGENERATE_Q_TOL {
        return Err(Error::DegenerateQ(q));
    }
    if (q.norm() - 1.0).abs() < DEGENERATE_Q_TOL {
        return Err(Error::UnitModulusQ(q));
    }
    Ok(())
}

/// `q^x` for half-integer `x`, via the principal square root of q.
pub fn q_pow(q: Scalar, x: HalfInt) -> Scalar {
    let t = x.twice();
    if t % 2 == 0 {
        q.powi((t / 2) as i32)
    } else {
        q.sqrt().powi(t as i32)
    }
}

fn bracket_denominator(q: Scalar) -> Result<Scalar> {
    if (q - 1.0).norm() < DEGENERATE_Q_TOL || (q + 1.0).norm() < DEGENERATE_Q_TOL {
        return Err(Error::DegenerateQ(q));
    }
    Ok(q - q.inv())
}

/// The q-number `[x] = (q^x - q^-x)/(q - q^-1)` at half-integer `x`.
pub fn q_bracket(x: HalfInt, q: Scalar) -> Result<Scalar> {
    let d = bracket_denominator(q)?;
    if x == HalfInt::ZERO {
        return Ok(real(0.0));
    }
    let up = q_pow(q, x);
    Ok((up - up.inv()) / d)
}

/// `[x]` for an arbitrary (complex) exponent, using the principal logarithm of q.
pub fn q_bracket_at(x: Scalar, q: Scalar) -> Result<Scalar> {
    let d = bracket_denominator(q)?;
    let up = q.powc(x);
    Ok((up - up.inv()) / d)
}

/// `[j][j+1]`, the eigenvalue of the classical Casimir on the spin-`j` irrep.
pub fn classical_casimir_value(j: HalfInt, q: Scalar) -> Result<Scalar> {
    Ok(q_bracket(j, q)? * q_bracket(j + HalfInt::ONE, q)?)
}

/// Solves `c = [J][J+1]` for `q^{2J}`.
///
/// With `u = q^{2J+1}` the equation reads `u + 1/u = c (q - 1/q)^2 + q + 1/q`.
/// Of the two roots `u`, `1/u` the one of larger modulus is taken, which is the
/// `J >= 0` branch for real `q > 1`.
pub fn invert_casimir(c: Scalar, q: Scalar) -> Result<Scalar> {
    let d = bracket_denominator(q)?;
    let s = c * d * d + q + q.inv();
    let disc = s * s - 4.0;
    if disc.norm() <= BRANCH_TOL * BRANCH_TOL * (1.0 + s.norm_sqr()) {
        return Err(Error::DoubleRoot(c));
    }
    let r = disc.sqrt();
    let (u1, u2) = ((s + r) / 2.0, (s - r) / 2.0);
    let big = if u1.norm() >= u2.norm() { u1 } else { u2 };
    if (big.norm() - 1.0).abs() < BRANCH_TOL {
        return Err(Error::AmbiguousBranch(c));
    }
    let t = big / q;
    if !t.is_finite() {
        return Err(Error::NonFinite("invert_casimir"));
    }
    Ok(t)
}
