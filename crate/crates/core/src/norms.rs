//! Polynomially weighted `l^p` norms on bar chains and the explicit
//! estimates that compare them.
//!
//! `‖c‖_{n,p} = (Σ |a_g|^p diam(g)^n)^{1/p}` and `‖c‖_{n,∞} = sup |a_g| diam(g)^n`,
//! with `0^0 := 1`, so `n = 0` gives the plain `l^p` norm; for `n >= 1` a
//! simplex of diameter 0 has weight 0. Coefficients are exact and are only
//! converted to `f64` while a norm is evaluated, in canonical support order.
//!
//! Inequality checks compare with a relative slack of [`SLACK`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::{ceil_rational, format_coeff, Chain, GroupHomomorphism};
use crate::error::NormError;

/// Relative slack applied to every floating-point inequality.
pub const SLACK: f64 = 1e-9;

/// `ζ(2) = π²/6`.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// `lhs <= rhs` up to the relative slack.
pub fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + SLACK)
}

/// An exponent `p ∈ [1, ∞]`; finite values are exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Ratio<i64>) -> Result<Self, NormError> {
        if p < Ratio::one() {
            return Err(NormError::InvalidExponent(format!("p = {p} is below 1")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn integer(p: i64) -> Result<Self, NormError> {
        Self::finite(Ratio::from_integer(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `p` as a float (`+inf` for `∞`).
    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub(crate) fn as_big(&self) -> Option<BigRational> {
        match self {
            Exponent::Finite(p) => Some(BigRational::new((*p.numer()).into(), (*p.denom()).into())),
            Exponent::Infinity => None,
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub(crate) fn reciprocal(&self) -> BigRational {
        match self.as_big() {
            Some(p) => p.recip(),
            None => BigRational::zero(),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        Some(match (self, other) {
            (Exponent::Infinity, Exponent::Infinity) => Equal,
            (Exponent::Infinity, _) => Greater,
            (_, Exponent::Infinity) => Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        })
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(p) if p.is_integer() => write!(f, "{}", p.numer()),
            Exponent::Finite(p) => write!(f, "{}/{}", p.numer(), p.denom()),
        }
    }
}

impl FromStr for Exponent {
    type Err = NormError;

    /// Accepts `inf`, integers, fractions `3/2` and decimals `1.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || NormError::InvalidExponent(format!("cannot parse {s:?}"));
        if matches!(s, "inf" | "infinity" | "∞" | "Inf") {
            return Ok(Exponent::Infinity);
        }
        let ratio = if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n, d)
        } else if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            Ratio::new(int * scale + frac, scale)
        } else {
            Ratio::from_integer(s.parse().map_err(|_| bad())?)
        };
        Exponent::finite(ratio)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    /// Accepts the string forms of [`FromStr`] and plain JSON numbers.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "an exponent in [1, inf]")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Exponent, E> {
                self.visit_str(&v.to_string())
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Exponent, E> {
                self.visit_str(&v.to_string())
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Exponent, E> {
                self.visit_str(&v.to_string())
            }
        }
        d.deserialize_any(Visitor)
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Weight degree `n` and exponent `p` of `‖·‖_{n,p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormParams {
    pub weight: u32,
    pub exponent: Exponent,
}

impl NormParams {
    pub fn new(weight: u32, exponent: Exponent) -> Self {
        NormParams { weight, exponent }
    }
}

fn weight_of(diam: u64, n: u32) -> f64 {
    if n == 0 {
        1.0
    } else {
        (diam as f64).powi(n as i32)
    }
}

fn abs_f64(a: &BigRational) -> f64 {
    a.abs().to_f64().unwrap_or(f64::INFINITY)
}

fn pow_p(x: f64, p: &Ratio<i64>) -> f64 {
    if p.is_integer() {
        x.powi(*p.numer() as i32)
    } else {
        x.powf(*p.numer() as f64 / *p.denom() as f64)
    }
}

/// `‖c‖_{n,p}`.
pub fn weighted_norm(c: &Chain, params: NormParams) -> f64 {
    let model = c.model();
    let terms = c.sorted_terms();
    match params.exponent {
        Exponent::Infinity => terms
            .into_iter()
            .map(|(s, a)| abs_f64(a) * weight_of(s.diameter(model), params.weight))
            .fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let sum: f64 = terms
                .into_iter()
                .map(|(s, a)| pow_p(abs_f64(a), &p) * weight_of(s.diameter(model), params.weight))
                .sum();
            if p.is_one() {
                sum
            } else {
                sum.powf(*p.denom() as f64 / *p.numer() as f64)
            }
        }
    }
}

/// `‖c‖_{n,1}` computed exactly.
pub fn weighted_l1_exact(c: &Chain, weight: u32) -> BigRational {
    let model = c.model();
    let mut total = BigRational::zero();
    for (s, a) in c.iter() {
        let d = s.diameter(model);
        let w = if weight == 0 { BigInt::one() } else { num_traits::pow(BigInt::from(d), weight as usize) };
        total += a.abs() * BigRational::from_integer(w);
    }
    total
}

/// `‖c‖_{n,p} + ‖∂c‖_{n,p}`; in degree 0 the boundary term is 0.
pub fn frechet_seminorm(c: &Chain, params: NormParams) -> f64 {
    let own = weighted_norm(c, params);
    if c.degree() == 0 {
        return own;
    }
    own + weighted_norm(&c.boundary().expect("degree >= 1"), params)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractivityReport {
    /// `‖c‖_{n,q}`
    pub norm_q: f64,
    /// `‖c‖_{n,p}`
    pub norm_p: f64,
    /// `‖c‖_{n,∞}`
    pub sup_norm: f64,
    /// `‖c‖_{⌈n p⌉, p}`
    pub raised_norm: f64,
    pub raised_weight: u64,
    pub ok: bool,
}

/// Checks `‖c‖_{n,q} <= ‖c‖_{n,p}` and `‖c‖_{n,∞} <= ‖c‖_{⌈n p⌉,p}` for finite `p < q`.
///
/// `q = ∞` is rejected: `‖[e,α²]‖_{1,∞} = 2 > 2^{1/p} = ‖[e,α²]‖_{1,p}`.
pub fn check_contractivity(c: &Chain, n: u32, p: Exponent, q: Exponent) -> Result<ContractivityReport, NormError> {
    if p >= q {
        return Err(NormError::ExponentOrder { p: p.to_string(), q: q.to_string() });
    }
    if q.is_infinite() {
        return Err(NormError::InvalidExponent("contractivity compares finite exponents".into()));
    }
    let pb = p.as_big().expect("p < q forces p finite");
    let raised = ceil_rational(&(pb * BigRational::from_integer(n.into())));
    let raised_weight = raised.to_u64().expect("non-negative weight");
    let norm_q = weighted_norm(c, NormParams::new(n, q));
    let norm_p = weighted_norm(c, NormParams::new(n, p));
    let sup_norm = weighted_norm(c, NormParams::new(n, Exponent::Infinity));
    let raised_norm = weighted_norm(c, NormParams::new(raised_weight as u32, p));
    let ok = holds(norm_q, norm_p) && holds(sup_norm, raised_norm);
    Ok(ContractivityReport { norm_q, norm_p, sup_norm, raised_norm, raised_weight, ok })
}

/// The common record for every checked estimate `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub exponent_m: u64,
    pub ok: bool,
}

impl EstimateReport {
    /// `lhs / rhs`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn order_check(p: Exponent, q: Exponent) -> Result<(), NormError> {
    if p >= q {
        Err(NormError::ExponentOrder { p: p.to_string(), q: q.to_string() })
    } else {
        Ok(())
    }
}

/// `m = ⌈q((kD+2)(1/p - 1/q) + n/p)⌉` for finite `q`, `m = ⌈(kD+n+2)/p⌉` for `q = ∞`.
pub fn comparison_exponent(k: u32, n: u32, p: Exponent, q: Exponent, growth_degree: u32) -> Result<u64, NormError> {
    order_check(p, q)?;
    let int = |x: u32| BigRational::from_integer(BigInt::from(x));
    let kd2 = int(k * growth_degree + 2);
    let inv_p = p.reciprocal();
    let m = match q.as_big() {
        Some(qb) => {
            let inner = kd2 * (&inv_p - qb.recip()) + int(n) * &inv_p;
            ceil_rational(&(qb * inner))
        }
        None => ceil_rational(&((int(k * growth_degree + n + 2)) * inv_p)),
    };
    Ok(m.to_u64().expect("non-negative exponent"))
}

fn has_degenerate_simplex(c: &Chain) -> bool {
    c.iter().any(|(s, _)| s.diameter(c.model()) == 0)
}

/// Checks `‖c‖_{n,p} <= (K^k ζ(2))^{1/q'} ‖c‖_{m,q}` with `1/q' = 1/p - 1/q`.
///
/// `K` bounds the ball sizes `β(r) <= K r^D` for the group of `c`. The bound
/// sums over diameters `r >= 1`, so chains carrying a diameter-0 simplex are
/// rejected.
pub fn verify_comparison(
    c: &Chain,
    n: u32,
    p: Exponent,
    q: Exponent,
    growth_degree: u32,
    growth_constant: &BigRational,
) -> Result<EstimateReport, NormError> {
    if has_degenerate_simplex(c) {
        return Err(NormError::DegenerateSupport);
    }
    let k = c.degree() as u32;
    let m = comparison_exponent(k, n, p, q, growth_degree)?;
    let inv_qprime = (p.reciprocal() - q.reciprocal()).to_f64().expect("finite");
    let kk = growth_constant.to_f64().expect("finite constant").powi(k as i32);
    let constant = (kk * ZETA_2).powf(inv_qprime);
    let lhs = weighted_norm(c, NormParams::new(n, p));
    let rhs = constant * weighted_norm(c, NormParams::new(m as u32, q));
    Ok(EstimateReport { lhs, rhs, constant, exponent_m: m, ok: holds(lhs, rhs) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PushforwardRegime {
    One,
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PushforwardReport {
    #[serde(flatten)]
    pub estimate: EstimateReport,
    pub regime: PushforwardRegime,
    /// `lhs / rhs` under the printed constant `X^{1/(p-1)}` (1<p<∞ only).
    pub printed_ratio: Option<f64>,
    /// `lhs / rhs` under the alternative constant `X^{p-1}` (1<p<∞ only).
    pub alternative_ratio: Option<f64>,
    /// Exact `p = 1` sides as `p/q` strings.
    pub exact_lhs: Option<String>,
    pub exact_rhs: Option<String>,
}

/// Checks the functoriality estimate for `φ` on `c`:
///
/// * `p = 1`: `‖φc‖_{n,1} <= ‖c‖_{n,1}`, exactly;
/// * `1 < p < ∞`: `‖φc‖_{n,p}^p <= C ‖c‖_{m+n,p}^p` with `m = ⌈(kD+2)(p-1)⌉`,
///   `X = 2^{m/(p-1)} K^k ζ(2)` and `C = max(X^{1/(p-1)}, X^{p-1})`;
/// * `p = ∞`: `‖φc‖_{n,∞} <= 2^m K^k ζ(2) ‖c‖_{m+n,∞}` with `m = kD+2`.
pub fn verify_pushforward_estimate(
    phi: &GroupHomomorphism,
    c: &Chain,
    n: u32,
    p: Exponent,
) -> Result<PushforwardReport, NormError> {
    let cert = phi.certificate().ok_or(NormError::MissingCertificate)?;
    if !phi.maps_generators_into_generators() {
        return Err(NormError::GeneratorImage(format!("{phi:?}")));
    }
    let image = phi.push_forward(c)?;
    let k = c.degree() as u32;
    let kk = cert.constant.to_f64().expect("finite constant").powi(k as i32);
    let kd2 = (k * cert.degree + 2) as i64;
    match p {
        Exponent::Finite(pr) if pr.is_one() => {
            let lhs = weighted_l1_exact(&image, n);
            let rhs = weighted_l1_exact(c, n);
            let ok = lhs <= rhs;
            Ok(PushforwardReport {
                estimate: EstimateReport {
                    lhs: lhs.to_f64().unwrap_or(f64::NAN),
                    rhs: rhs.to_f64().unwrap_or(f64::NAN),
                    constant: 1.0,
                    exponent_m: 0,
                    ok,
                },
                regime: PushforwardRegime::One,
                printed_ratio: None,
                alternative_ratio: None,
                exact_lhs: Some(format_coeff(&lhs)),
                exact_rhs: Some(format_coeff(&rhs)),
            })
        }
        Exponent::Finite(pr) => {
            if has_degenerate_simplex(c) {
                return Err(NormError::DegenerateSupport);
            }
            let pm1 = pr - Ratio::one();
            let m = ceil_rational(&BigRational::new(
                BigInt::from(kd2) * BigInt::from(*pm1.numer()),
                BigInt::from(*pm1.denom()),
            ))
            .to_u64()
            .expect("non-negative");
            let pm1f = *pm1.numer() as f64 / *pm1.denom() as f64;
            let pf = p.as_f64();
            let x = 2f64.powf(m as f64 / pm1f) * kk * ZETA_2;
            let printed = x.powf(1.0 / pm1f);
            let alternative = x.powf(pm1f);
            let constant = printed.max(alternative);
            let lhs = weighted_norm(&image, NormParams::new(n, p));
            let base = weighted_norm(c, NormParams::new(m as u32 + n, p));
            let rhs = constant.powf(1.0 / pf) * base;
            Ok(PushforwardReport {
                estimate: EstimateReport { lhs, rhs, constant, exponent_m: m, ok: holds(lhs, rhs) },
                regime: PushforwardRegime::Finite,
                printed_ratio: Some(ratio(lhs, printed.powf(1.0 / pf) * base)),
                alternative_ratio: Some(ratio(lhs, alternative.powf(1.0 / pf) * base)),
                exact_lhs: None,
                exact_rhs: None,
            })
        }
        Exponent::Infinity => {
            if has_degenerate_simplex(c) {
                return Err(NormError::DegenerateSupport);
            }
            let m = kd2 as u64;
            let constant = 2f64.powi(m as i32) * kk * ZETA_2;
            let lhs = weighted_norm(&image, NormParams::new(n, p));
            let rhs = constant * weighted_norm(c, NormParams::new(m as u32 + n, p));
            Ok(PushforwardReport {
                estimate: EstimateReport { lhs, rhs, constant, exponent_m: m, ok: holds(lhs, rhs) },
                regime: PushforwardRegime::Infinite,
                printed_ratio: None,
                alternative_ratio: None,
                exact_lhs: None,
                exact_rhs: None,
            })
        }
    }
}

/// A finite index set `I` with a projection `π: I -> J`, values `f: I -> Q`
/// and a fiber-size control `β` with `|π^{-1}(π(i))| <= β(i)`.
#[derive(Clone, Debug)]
pub struct FiberedFamily {
    fibers: Vec<usize>,
    values: Vec<BigRational>,
    beta: Vec<u64>,
}

impl FiberedFamily {
    /// `fibers[i] = π(i)`, `values[i] = f(i)`, `beta[i] = β(i)`.
    pub fn new(fibers: Vec<usize>, values: Vec<BigRational>, beta: Vec<u64>) -> Result<Self, NormError> {
        if fibers.len() != values.len() || fibers.len() != beta.len() {
            return Err(NormError::LengthMismatch(format!(
                "{} indices, {} values, {} fiber bounds",
                fibers.len(),
                values.len(),
                beta.len()
            )));
        }
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for &j in &fibers {
            *sizes.entry(j).or_default() += 1;
        }
        for (i, (&j, &b)) in fibers.iter().zip(&beta).enumerate() {
            let size = sizes[&j];
            if size as u64 > b {
                return Err(NormError::FiberControl { index: i, fiber_size: size, beta: b });
            }
        }
        Ok(FiberedFamily { fibers, values, beta })
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    /// `π_* f`, exactly.
    pub fn push_forward(&self) -> BTreeMap<usize, BigRational> {
        push(&self.fibers, self.values.iter().cloned())
    }

    /// `‖π_* f‖_p`.
    pub fn pushforward_norm(&self, p: Exponent) -> f64 {
        lp_norm(self.push_forward().values(), p)
    }

    /// `(Σ_i β(i)^p |f(i)|^p)^{1/p}`.
    pub fn bound_part1(&self, p: Exponent) -> f64 {
        match p {
            Exponent::Infinity => {
                self.values.iter().zip(&self.beta).map(|(f, &b)| b as f64 * abs_f64(f)).fold(0.0, f64::max)
            }
            Exponent::Finite(pr) => {
                let sum: f64 =
                    self.values.iter().zip(&self.beta).map(|(f, &b)| pow_p(b as f64 * abs_f64(f), &pr)).sum();
                sum.powf(1.0 / p.as_f64())
            }
        }
    }

    /// Checks `‖π_* f‖_p <= (Σ β^p |f|^p)^{1/p}`.
    pub fn check_part1(&self, p: Exponent) -> (f64, f64, bool) {
        let lhs = self.pushforward_norm(p);
        let rhs = self.bound_part1(p);
        (lhs, rhs, holds(lhs, rhs))
    }

    /// Checks `‖π_*(f w)‖_p <= ‖π_* f‖_q ‖π_* w‖_{q'}` with `1/q + 1/q' = 1/p`.
    ///
    /// Only valid for non-negative `f` and `w`: with signs, cancellation inside
    /// `π_* f` can make the right side vanish while the left does not.
    pub fn bound_part2(&self, weights: &[BigRational], p: Exponent, q: Exponent) -> Result<HolderReport, NormError> {
        order_check(p, q)?;
        if weights.len() != self.len() {
            return Err(NormError::LengthMismatch(format!("{} weights for {} indices", weights.len(), self.len())));
        }
        if self.values.iter().chain(weights).any(|x| x.is_negative()) {
            return Err(NormError::SignedValues);
        }
        let inv_qprime = p.reciprocal() - q.reciprocal();
        let qprime = if inv_qprime.is_zero() {
            Exponent::Infinity
        } else {
            let r = inv_qprime.recip();
            let num = r.numer().to_i64().ok_or_else(|| NormError::InvalidExponent("q' too large".into()))?;
            let den = r.denom().to_i64().ok_or_else(|| NormError::InvalidExponent("q' too large".into()))?;
            Exponent::finite(Ratio::new(num, den))?
        };
        let product = push(&self.fibers, self.values.iter().zip(weights).map(|(f, w)| f * w));
        let lhs = lp_norm(product.values(), p);
        let f_norm = self.pushforward_norm(q);
        let w_norm = lp_norm(push(&self.fibers, weights.iter().cloned()).values(), qprime);
        let rhs = f_norm * w_norm;
        Ok(HolderReport { lhs, pushforward_f_norm: f_norm, pushforward_w_norm: w_norm, conjugate: qprime, ok: holds(lhs, rhs) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    /// `‖π_*(f w)‖_p`
    pub lhs: f64,
    /// `‖π_* f‖_q`
    pub pushforward_f_norm: f64,
    /// `‖π_* w‖_{q'}`
    pub pushforward_w_norm: f64,
    pub conjugate: Exponent,
    pub ok: bool,
}

fn push(fibers: &[usize], values: impl Iterator<Item = BigRational>) -> BTreeMap<usize, BigRational> {
    let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (&j, v) in fibers.iter().zip(values) {
        *out.entry(j).or_insert_with(BigRational::zero) += v;
    }
    out
}

fn lp_norm<'a>(values: impl Iterator<Item = &'a BigRational>, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => values.map(abs_f64).fold(0.0, f64::max),
        Exponent::Finite(pr) => {
            let sum: f64 = values.map(|v| pow_p(abs_f64(v), &pr)).sum();
            sum.powf(1.0 / p.as_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{Coeff, Simplex};
    use crate::group::GroupModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn f2() -> Arc<GroupModel> {
        Arc::new(GroupModel::free(2).unwrap())
    }

    fn int(a: i64) -> Coeff {
        Coeff::from_integer(a.into())
    }

    fn chain(m: &Arc<GroupModel>, terms: &[(&[&str], i64)]) -> Chain {
        let degree = terms.first().map(|t| t.0.len()).unwrap_or(1);
        Chain::from_terms(m.clone(), degree, terms.iter().map(|(w, a)| (Simplex::parse(m, w).unwrap(), int(*a))))
            .unwrap()
    }

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn random_chain(m: &Arc<GroupModel>, rng: &mut ChaCha8Rng, degree: usize, radius: u64, support: usize) -> Chain {
        let ball = m.ball(radius).unwrap();
        let mut c = Chain::zero(m.clone(), degree);
        while c.len() < support {
            let s = Simplex::new((0..degree).map(|_| ball[rng.gen_range(0..ball.len())].clone()));
            if s.diameter(m) == 0 {
                continue;
            }
            let num: i64 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
            c.add_term(s, BigRational::new(num.into(), rng.gen_range(1i64..=5).into())).unwrap();
        }
        c
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!(e("2"), Exponent::Finite(Ratio::from_integer(2)));
        assert_eq!(e("1.5"), Exponent::Finite(Ratio::new(3, 2)));
        assert_eq!(e("3/2"), e("1.5"));
        assert_eq!(e("inf"), Exponent::Infinity);
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
        assert!(e("2") < e("inf") && e("1.5") < e("2"));
        let parsed: Vec<Exponent> = serde_json::from_str(r#"[2, 1.5, "3/2", "inf"]"#).unwrap();
        assert_eq!(parsed, vec![e("2"), e("1.5"), e("1.5"), Exponent::Infinity]);
        assert_eq!(serde_json::to_string(&e("3/2")).unwrap(), r#""3/2""#);
    }

    #[test]
    fn weighted_norm_examples() {
        let m = f2();
        let a = chain(&m, &[(&["a"], 1)]);
        for n in [0, 1, 2, 5] {
            for p in ["1", "1.5", "2", "3", "inf"] {
                assert!(close(weighted_norm(&a, NormParams::new(n, e(p))), 1.0));
            }
        }
        let c = chain(&m, &[(&["ab"], 2)]);
        assert!(close(weighted_norm(&c, NormParams::new(3, e("2"))), 2.0 * 2f64.powf(1.5)));
        let c = chain(&m, &[(&["aa"], 3)]);
        assert!(close(weighted_norm(&c, NormParams::new(1, e("inf"))), 6.0));
    }

    #[test]
    fn degenerate_simplices_follow_the_zero_power_convention() {
        let m = f2();
        let c = chain(&m, &[(&["", ""], 4)]);
        assert!(close(weighted_norm(&c, NormParams::new(0, e("2"))), 4.0));
        assert_eq!(weighted_norm(&c, NormParams::new(1, e("2"))), 0.0);
    }

    #[test]
    fn frechet_seminorm_examples() {
        let m = f2();
        let cycle = chain(&m, &[(&["abA"], 2)]);
        let params = NormParams::new(1, e("2"));
        assert!(close(frechet_seminorm(&cycle, params), weighted_norm(&cycle, params)));
        let c = chain(&m, &[(&["a", "aab"], 1)]);
        assert!(close(frechet_seminorm(&c, NormParams::new(0, e("2"))), 1.0 + 3f64.sqrt()));
        let params = NormParams::new(2, e("3"));
        assert!(close(frechet_seminorm(&c.scale(&int(2)), params), 2.0 * frechet_seminorm(&c, params)));
    }

    #[test]
    fn contractivity_examples() {
        let m = f2();
        let r = check_contractivity(&chain(&m, &[(&["a"], 1)]), 2, e("2"), e("3")).unwrap();
        assert!(r.ok && close(r.norm_p, 1.0) && close(r.norm_q, 1.0));
        let r = check_contractivity(&chain(&m, &[(&["a"], 1), (&["b"], 1)]), 0, e("2"), e("4")).unwrap();
        assert!(close(r.norm_q, 2f64.powf(0.25)) && close(r.norm_p, 2f64.sqrt()) && r.ok);
        let r = check_contractivity(&chain(&m, &[(&["aa"], 5)]), 1, e("2"), e("3")).unwrap();
        assert_eq!(r.raised_weight, 2);
        assert!(close(r.sup_norm, 10.0) && close(r.raised_norm, 10.0) && r.ok);
        assert!(check_contractivity(&chain(&m, &[(&["a"], 1)]), 0, e("3"), e("2")).is_err());
        assert!(check_contractivity(&chain(&m, &[(&["a"], 1)]), 0, e("2"), e("2")).is_err());
        assert!(check_contractivity(&chain(&m, &[(&["a"], 1)]), 0, e("2"), e("inf")).is_err());
    }

    #[test]
    fn comparison_exponent_examples() {
        assert_eq!(comparison_exponent(1, 0, e("2"), e("4"), 1).unwrap(), 3);
        assert_eq!(comparison_exponent(1, 0, e("2"), e("inf"), 1).unwrap(), 2);
        assert_eq!(comparison_exponent(2, 1, e("1"), e("2"), 2).unwrap(), 8);
        assert!(comparison_exponent(1, 0, e("4"), e("2"), 1).is_err());
    }

    #[test]
    fn comparison_on_z() {
        let z = Arc::new(GroupModel::free_abelian(1).unwrap());
        let c = chain(&z, &[(&["1"], 1)]);
        let k = BigRational::from_integer(3.into());
        let r = verify_comparison(&c, 0, e("2"), e("4"), 1, &k).unwrap();
        assert!(close(r.lhs, 1.0));
        assert!((r.rhs - (3.0 * ZETA_2).powf(0.25)).abs() < 1e-12);
        assert!((r.rhs - 1.4904).abs() < 1e-3 && r.ok && r.exponent_m == 3);
        let empty = Chain::zero(z.clone(), 1);
        let r = verify_comparison(&empty, 0, e("2"), e("4"), 1, &k).unwrap();
        assert!(r.lhs == 0.0 && r.rhs == 0.0 && r.ok);
        let degenerate = chain(&z, &[(&["0"], 1)]);
        assert_eq!(verify_comparison(&degenerate, 0, e("2"), e("4"), 1, &k), Err(NormError::DegenerateSupport));
    }

    #[test]
    fn comparison_sweep_on_z2() {
        let z2 = Arc::new(GroupModel::free_abelian(2).unwrap());
        let k = z2.growth_constant(2, 50).unwrap();
        assert_eq!(k, int(5));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = random_chain(&z2, &mut rng, 1, 8, 12);
            for (p, q) in [("1", "2"), ("2", "4"), ("2", "inf"), ("1.5", "3")] {
                let r = verify_comparison(&c, 1, e(p), e(q), 2, &k).unwrap();
                assert!(r.ok, "{r:?}");
            }
        }
    }

    #[test]
    fn norm_axioms_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = f2();
        for _ in 0..100 {
            let a = random_chain(&m, &mut rng, 2, 3, 8);
            let b = random_chain(&m, &mut rng, 2, 3, 8);
            let sum = a.add(&b).unwrap();
            let lambda = BigRational::new((-7).into(), 3.into());
            for n in [0, 1, 3] {
                for p in ["1", "2", "3", "inf"] {
                    let params = NormParams::new(n, e(p));
                    let (na, nb) = (weighted_norm(&a, params), weighted_norm(&b, params));
                    assert!(holds(weighted_norm(&sum, params), na + nb));
                    let scaled = weighted_norm(&a.scale(&lambda), params);
                    assert!((scaled - 7.0 / 3.0 * na).abs() <= 1e-9 * scaled.max(1.0));
                    let next = weighted_norm(&a, NormParams::new(n + 1, e(p)));
                    assert!(holds(na, next));
                }
                for (p, q) in [("1", "2"), ("2", "3"), ("1.5", "7/2")] {
                    assert!(check_contractivity(&a, n, e(p), e(q)).unwrap().ok);
                }
            }
        }
    }

    #[test]
    fn l1_exact_matches_float() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = f2();
        for _ in 0..20 {
            let c = random_chain(&m, &mut rng, 2, 3, 10);
            let exact = weighted_l1_exact(&c, 2).to_f64().unwrap();
            let float = weighted_norm(&c, NormParams::new(2, e("1")));
            assert!((exact - float).abs() <= 1e-12 * exact);
        }
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn fibered_family_examples() {
        let f = FiberedFamily::new(vec![0, 1, 2], vec![rat(1), rat(-2), rat(3)], vec![1, 1, 1]).unwrap();
        let (lhs, rhs, ok) = f.check_part1(e("2"));
        assert!(close(lhs, 14f64.sqrt()) && close(rhs, lhs) && ok);

        let f = FiberedFamily::new(vec![7, 7], vec![rat(1), rat(1)], vec![2, 2]).unwrap();
        let (lhs, rhs, ok) = f.check_part1(e("2"));
        assert!(close(lhs, 2.0) && close(rhs, 8f64.sqrt()) && ok);

        assert!(matches!(
            FiberedFamily::new(vec![0, 0, 0], vec![rat(1); 3], vec![3, 2, 3]),
            Err(NormError::FiberControl { index: 1, fiber_size: 3, beta: 2 })
        ));
    }

    #[test]
    fn holder_part2_examples() {
        // w = 1, injective projection: l^p interpolation on a finite support
        let f = FiberedFamily::new(vec![0, 1, 2], vec![rat(1), rat(2), rat(3)], vec![1; 3]).unwrap();
        let r = f.bound_part2(&[rat(1), rat(1), rat(1)], e("2"), e("4")).unwrap();
        assert!(close(r.lhs, 14f64.sqrt()));
        assert!(close(r.pushforward_f_norm, 98f64.powf(0.25)));
        assert!(close(r.pushforward_w_norm, 3f64.powf(0.25)) && r.ok);

        // f = w = 1 on one two-point fiber: 2 <= 2 * 2
        let f = FiberedFamily::new(vec![0, 0], vec![rat(1), rat(1)], vec![2, 2]).unwrap();
        let r = f.bound_part2(&[rat(1), rat(1)], e("2"), e("4")).unwrap();
        assert!(close(r.lhs, 2.0) && close(r.pushforward_f_norm, 2.0) && close(r.pushforward_w_norm, 2.0) && r.ok);
        assert_eq!(r.conjugate, e("4"));

        let signed = FiberedFamily::new(vec![0, 0], vec![rat(1), rat(-1)], vec![2, 2]).unwrap();
        assert_eq!(signed.bound_part2(&[rat(1), rat(-1)], e("2"), e("4")), Err(NormError::SignedValues));
        assert!(f.bound_part2(&[rat(1), rat(1)], e("4"), e("2")).is_err());
    }

    #[test]
    fn fibered_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(1..20);
            let fibers: Vec<usize> = {
                // fibers of size at most 3
                let mut v = Vec::new();
                let mut j = 0;
                while v.len() < n {
                    let size = rng.gen_range(1..=3).min(n - v.len());
                    v.extend(std::iter::repeat_n(j, size));
                    j += 1;
                }
                v
            };
            let values: Vec<BigRational> =
                (0..n).map(|_| BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=4).into())).collect();
            let fam = FiberedFamily::new(fibers.clone(), values, vec![3; n]).unwrap();
            for p in ["1", "1.5", "2", "3"] {
                assert!(fam.check_part1(e(p)).2);
            }
            let positive: Vec<BigRational> =
                (0..n).map(|_| BigRational::new(rng.gen_range(0i64..=9).into(), rng.gen_range(1i64..=4).into())).collect();
            let weights: Vec<BigRational> =
                (0..n).map(|_| BigRational::new(rng.gen_range(0i64..=9).into(), rng.gen_range(1i64..=4).into())).collect();
            let fam = FiberedFamily::new(fibers, positive, vec![3; n]).unwrap();
            for (p, q) in [("1", "2"), ("1.5", "3"), ("2", "4"), ("2", "inf")] {
                assert!(fam.bound_part2(&weights, e(p), e(q)).unwrap().ok);
            }
        }
    }

    #[test]
    fn pushforward_estimate_examples() {
        let z2 = Arc::new(GroupModel::free_abelian(2).unwrap());
        let z = Arc::new(GroupModel::free_abelian(1).unwrap());
        let proj = GroupHomomorphism::parse(z2.clone(), z, "1;0").unwrap();
        let c = chain(&z2, &[(&["1,0"], 1), (&["0,7"], 1)]);
        assert_eq!(verify_pushforward_estimate(&proj, &c, 0, e("1")), Err(NormError::MissingCertificate));
        let cert = proj.kernel_certificate(1, 20).unwrap();
        let proj = proj.with_certificate(cert);
        let r = verify_pushforward_estimate(&proj, &c, 0, e("1")).unwrap();
        assert_eq!(r.exact_lhs.as_deref(), Some("2/1"));
        assert_eq!(r.exact_rhs.as_deref(), Some("2/1"));
        assert!(r.estimate.ok);

        let id = GroupHomomorphism::identity(f2());
        let id = id.clone().with_certificate(id.kernel_certificate(1, 4).unwrap());
        let c = chain(&f2(), &[(&["a", "bA"], 3), (&["B", "a"], -2)]);
        let r = verify_pushforward_estimate(&id, &c, 2, e("1")).unwrap();
        assert_eq!(r.exact_lhs, r.exact_rhs);
        for p in ["2", "3", "inf"] {
            assert!(verify_pushforward_estimate(&id, &c, 1, e(p)).unwrap().estimate.ok);
        }
    }

    #[test]
    fn pushforward_constants_agree_at_p_two() {
        let z = Arc::new(GroupModel::free_abelian(1).unwrap());
        let z5 = Arc::new(GroupModel::cyclic(5).unwrap());
        let phi = GroupHomomorphism::parse(z.clone(), z5, "1").unwrap();
        let phi = phi.with_certificate(KernelCert::three());
        let c = chain(&z, &[(&["1"], 1), (&["6"], 1)]);
        let r = verify_pushforward_estimate(&phi, &c, 0, e("2")).unwrap();
        // m = ⌈3 * 1⌉ = 3, X = 2^3 * 3 * ζ(2), both readings give X
        assert_eq!(r.estimate.exponent_m, 3);
        assert!((r.estimate.constant - 24.0 * ZETA_2).abs() < 1e-9);
        assert!(close(r.printed_ratio.unwrap(), r.alternative_ratio.unwrap()));
        let r3 = verify_pushforward_estimate(&phi, &c, 0, e("3")).unwrap();
        // m = ⌈3 * 2⌉ = 6, X = 2^3 * 3 ζ(2); max(X^{1/2}, X^2) = X^2
        let x = 8.0 * 3.0 * ZETA_2;
        assert_eq!(r3.estimate.exponent_m, 6);
        assert!((r3.estimate.constant - x * x).abs() < 1e-6);
        assert!(r3.alternative_ratio.unwrap() <= r3.printed_ratio.unwrap());
    }

    struct KernelCert;
    impl KernelCert {
        fn three() -> crate::chain::KernelCertificate {
            crate::chain::KernelCertificate { degree: 1, constant: BigRational::from_integer(3.into()), radius: 0 }
        }
    }

    #[test]
    fn pushforward_sweep_mod5() {
        let z = Arc::new(GroupModel::free_abelian(1).unwrap());
        let z5 = Arc::new(GroupModel::cyclic(5).unwrap());
        let phi = GroupHomomorphism::parse(z.clone(), z5, "1").unwrap().with_certificate(KernelCert::three());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let c = random_chain(&z, &mut rng, 2, 12, 10);
            for n in [0, 1] {
                for p in ["1", "2", "3", "inf"] {
                    let r = verify_pushforward_estimate(&phi, &c, n, e(p)).unwrap();
                    assert!(r.estimate.ok, "{p}: {r:?}");
                }
            }
        }
    }
}
