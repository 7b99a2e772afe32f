//! Exact arithmetic in `K = Q(t^{1/N})` with the `t`-adic valuation.
//!
//! A [`KScalar`] is a quotient of two polynomials in `u = t^{1/N}`. The level
//! `N` is carried per value and binary operations lift both operands to the
//! least common level, so mixed-level arithmetic is always exact. Valuations
//! are reported in `t`-units: `ord(u) = 1/N`.

mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use once_cell::sync::Lazy;

pub use poly::QPoly;

use crate::error::{Error, Result};

pub type Rational = num::BigRational;

pub const DEFAULT_LEVEL_CAP: u64 = 64;

static LEVEL_CAP: Lazy<u64> = Lazy::new(|| {
    std::env::var("NADYN_LEVEL_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &u64| v >= 1)
        .unwrap_or(DEFAULT_LEVEL_CAP)
});

/// Largest level any computation may raise to. Read once from
/// `NADYN_LEVEL_CAP`, defaulting to 64.
pub fn level_cap() -> u64 {
    *LEVEL_CAP
}

pub fn check_level(level: u64) -> Result<()> {
    let cap = level_cap();
    if level > cap {
        Err(Error::LevelCapExceeded { level, cap })
    } else {
        Ok(())
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

/// `"p/q"` with the denominator always present, e.g. `"2/1"`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p"` or `"p/q"` (optionally signed).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    if q.is_zero() {
        return None;
    }
    Some(Rational::new(p, q))
}

/// Smallest positive integer `m` with `m·r` integral.
pub fn denominator_u64(r: &Rational) -> u64 {
    r.denom().to_u64().unwrap_or(u64::MAX)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// An element of the residue field `k = Q` extended by `∞`, i.e. a point of
/// `P^1(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResScalar {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for ResScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResScalar::Finite(r) => write!(f, "{r}"),
            ResScalar::Infinity => write!(f, "inf"),
        }
    }
}

/// An element of `Q(u)` with `u^N = t`.
#[derive(Clone)]
pub struct KScalar {
    num: QPoly,
    den: QPoly,
    level: u64,
}

impl KScalar {
    /// Builds `num/den` at the given level, reducing to lowest terms with a
    /// monic denominator. Panics if `den` is zero.
    pub fn from_parts(num: QPoly, den: QPoly, level: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator in KScalar");
        assert!(level >= 1);
        if num.is_zero() {
            return KScalar::zero_at(level);
        }
        // powers of u are the common case; cancel them before any Euclid
        let v = num.valuation().unwrap_or(0).min(den.valuation().unwrap_or(0));
        let (num, den) = if v > 0 {
            (num.unshift(v), den.unshift(v))
        } else {
            (num, den)
        };
        // after that only the part of `den` prime to u can still cancel
        let strip = den.valuation().unwrap_or(0);
        let core = den.unshift(strip);
        let (mut num, mut den) = if core.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&core);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g), den.exact_div(&g))
            }
        };
        if !den.is_monic() {
            let inv = den.leading().recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        KScalar { num, den, level }
    }

    /// Builds `num/den` when the caller already knows the fraction is in
    /// lowest terms; only normalizes the denominator to be monic.
    pub(crate) fn from_coprime_parts(num: QPoly, den: QPoly, level: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator in KScalar");
        if num.is_zero() {
            return KScalar::zero_at(level);
        }
        let inv = den.leading().recip();
        KScalar {
            num: num.scale(&inv),
            den: den.scale(&inv),
            level,
        }
    }

    pub fn zero() -> Self {
        KScalar::zero_at(1)
    }

    fn zero_at(level: u64) -> Self {
        KScalar {
            num: QPoly::zero(),
            den: QPoly::one(),
            level,
        }
    }

    pub fn one() -> Self {
        KScalar::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        KScalar {
            num: QPoly::constant(r),
            den: QPoly::one(),
            level: 1,
        }
    }

    pub fn from_int(n: i64) -> Self {
        KScalar::from_rational(int(n))
    }

    /// The uniformizer `t`.
    pub fn t() -> Self {
        KScalar::t_pow(&Rational::one())
    }

    /// `t^e` for a rational exponent, at the level given by the denominator
    /// of `e`.
    pub fn t_pow(e: &Rational) -> Self {
        let level = denominator_u64(e);
        let k = e.numer().to_i64().expect("exponent too large");
        KScalar::u_pow(k, level)
    }

    /// `u^k` at level `level`.
    pub fn u_pow(k: i64, level: u64) -> Self {
        let mono = QPoly::monomial(Rational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            KScalar {
                num: mono,
                den: QPoly::one(),
                level,
            }
        } else {
            KScalar {
                num: QPoly::one(),
                den: mono,
                level,
            }
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Numerator in `u`.
    pub fn num(&self) -> &QPoly {
        &self.num
    }

    /// Monic denominator in `u`.
    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Rewrites the value at a level that is a multiple of the current one.
    pub fn lift(&self, level: u64) -> KScalar {
        assert!(level.is_multiple_of(self.level), "level {level} is not a multiple of {}", self.level);
        let m = (level / self.level) as usize;
        KScalar {
            num: self.num.inflate(m),
            den: self.den.inflate(m),
            level,
        }
    }

    /// Same element, written at the smallest level that represents it.
    pub fn at_min_level(&self) -> KScalar {
        if self.is_zero() {
            return KScalar::zero();
        }
        let g = num::integer::gcd(
            num::integer::gcd(self.num.exponent_gcd(), self.den.exponent_gcd()),
            self.level as usize,
        )
        .max(1);
        if g == 1 {
            return self.clone();
        }
        let deflate = |p: &QPoly| {
            QPoly::new(
                p.coeffs()
                    .iter()
                    .step_by(g)
                    .cloned()
                    .collect(),
            )
        };
        KScalar {
            num: deflate(&self.num),
            den: deflate(&self.den),
            level: self.level / g as u64,
        }
    }

    /// Base change `t = u^M`: the same element at level `N·M`.
    pub fn base_change(&self, m: u64) -> Result<KScalar> {
        if m == 0 {
            return Err(Error::InvalidInput("base change factor must be positive".into()));
        }
        let level = self.level * m;
        check_level(level)?;
        Ok(self.lift(level))
    }

    fn common(a: &KScalar, b: &KScalar) -> (KScalar, KScalar) {
        if a.level == b.level {
            return (a.clone(), b.clone());
        }
        let l = lcm_u64(a.level, b.level);
        (a.lift(l), b.lift(l))
    }

    /// `t`-adic valuation in `t`-units; `None` stands for `+∞` (the zero
    /// element).
    pub fn ord(&self) -> Option<Rational> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap_or(0) as i64;
        Some(Rational::new((vn - vd).into(), (self.level as i64).into()))
    }

    /// Valuation in units of `u` (an integer).
    pub fn ord_u(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap_or(0) as i64;
        Some(vn - vd)
    }

    /// Image in `P^1(k)`: `0` when `ord > 0`, `∞` when `ord < 0`, the
    /// leading coefficient ratio otherwise.
    pub fn residue(&self) -> ResScalar {
        match self.ord_u() {
            None => ResScalar::Finite(Rational::zero()),
            Some(v) if v > 0 => ResScalar::Finite(Rational::zero()),
            Some(v) if v < 0 => ResScalar::Infinity,
            Some(_) => {
                let vn = self.num.valuation().unwrap();
                let vd = self.den.valuation().unwrap_or(0);
                ResScalar::Finite(self.num.coeff(vn) / self.den.coeff(vd))
            }
        }
    }

    /// Residue of an element of `K°`; panics on negative valuation.
    pub fn residue_finite(&self) -> Rational {
        match self.residue() {
            ResScalar::Finite(r) => r,
            ResScalar::Infinity => panic!("residue of a non-integral scalar"),
        }
    }

    /// Laurent expansion truncated to the powers `t^e` with `e < s`.
    pub fn truncate_below(&self, s: &Rational) -> KScalar {
        let Some(v) = self.ord_u() else {
            return KScalar::zero();
        };
        let n = self.level as i64;
        // exponents k (in u) with k < s·n
        let scaled = s * Rational::from_integer(n.into());
        let kmax = scaled.ceil().to_integer().to_i64().expect("exponent too large");
        if kmax <= v {
            return KScalar::zero();
        }
        let count = (kmax - v) as usize;
        let a = self.num.unshift(self.num.valuation().unwrap());
        let b = self.den.unshift(self.den.valuation().unwrap_or(0));
        let b0_inv = b.coeff(0).recip();
        let mut series: Vec<Rational> = Vec::with_capacity(count);
        for j in 0..count {
            let mut c = a.coeff(j);
            for i in 1..=j.min(b.deg()) {
                c -= b.coeff(i) * &series[j - i];
            }
            series.push(c * &b0_inv);
        }
        let (num, den) = if v >= 0 {
            (QPoly::new(series).shift(v as usize), QPoly::one())
        } else {
            (
                QPoly::new(series),
                QPoly::monomial(Rational::one(), (-v) as usize),
            )
        };
        KScalar::from_parts(num, den, self.level)
    }

    pub fn pow(&self, k: i64) -> KScalar {
        let base = if k < 0 { KScalar::one() / self.clone() } else { self.clone() };
        let mut acc = KScalar::one().lift(self.level);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn recip(&self) -> KScalar {
        KScalar::one() / self.clone()
    }

    /// Evaluates at a complex `t`, using the principal branch of
    /// `t^{1/N}`. Returns `None` at a pole.
    pub fn eval_complex(&self, t0: Complex64) -> Option<Complex64> {
        let u0 = if self.level == 1 {
            t0
        } else {
            t0.powf(1.0 / self.level as f64)
        };
        let den = self.den.eval_complex(u0);
        let scale = self
            .den
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(0.0).abs())
            .fold(0.0, f64::max);
        if den.norm() <= 1e-14 * scale.max(1.0) {
            return None;
        }
        Some(self.num.eval_complex(u0) / den)
    }

    /// True when the denominator is a power of `u`.
    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.coeffs().len() == self.den.valuation().unwrap_or(0) + 1
    }
}

impl PartialEq for KScalar {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = KScalar::common(self, other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for KScalar {}

impl fmt::Debug for KScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders a polynomial in `u` as a sum of powers of `t`.
fn display_u_poly(p: &QPoly, level: u64) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { "-" } else { "+" });
        }
        let e = Rational::new((k as i64).into(), (level as i64).into());
        let mono = if e.is_zero() {
            String::new()
        } else if e.is_one() {
            "t".into()
        } else if e.is_integer() {
            format!("t^{e}")
        } else {
            format!("t^({e})")
        };
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    out
}

fn needs_parens(p: &QPoly) -> bool {
    p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
}

impl fmt::Display for KScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = display_u_poly(&self.num, self.level);
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        let den = display_u_poly(&self.den, self.level);
        let num = if needs_parens(&self.num) { format!("({num})") } else { num };
        let den = if needs_parens(&self.den) {
            format!("({den})")
        } else {
            den
        };
        write!(f, "{num}/{den}")
    }
}

/// `(p/g, q/g)` for `g = gcd(p, q)`, with a shortcut when either side is a
/// monomial times a constant.
fn cancel_common(p: &QPoly, q: &QPoly) -> (QPoly, QPoly) {
    let (vp, vq) = (p.valuation().unwrap_or(0), q.valuation().unwrap_or(0));
    let v = vp.min(vq);
    let (p, q) = (p.unshift(v), q.unshift(v));
    if p.unshift(vp - v).is_constant() || q.unshift(vq - v).is_constant() {
        return (p, q);
    }
    let g = p.gcd(&q);
    if g.is_one() {
        (p, q)
    } else {
        (p.exact_div(&g), q.exact_div(&g))
    }
}

impl<'a> Add<&'a KScalar> for &'a KScalar {
    type Output = KScalar;
    fn add(self, rhs: &KScalar) -> KScalar {
        let (a, b) = KScalar::common(self, rhs);
        if a.den == b.den {
            return KScalar::from_parts(&a.num + &b.num, a.den, a.level);
        }
        // add over the least common denominator `u^v · lcm(cores)`
        let (va, vb) = (a.den.valuation().unwrap_or(0), b.den.valuation().unwrap_or(0));
        let (ca, cb) = (a.den.unshift(va), b.den.unshift(vb));
        let v = va.max(vb);
        let (fa, fb, core) = if ca == cb {
            (QPoly::one(), QPoly::one(), ca)
        } else {
            let g = ca.gcd(&cb);
            let fa = cb.exact_div(&g);
            let fb = ca.exact_div(&g);
            let core = &ca * &fa;
            (fa, fb, core)
        };
        KScalar::from_parts(
            &(&a.num * &fa).shift(v - va) + &(&b.num * &fb).shift(v - vb),
            core.shift(v),
            a.level,
        )
    }
}

impl<'a> Sub<&'a KScalar> for &'a KScalar {
    type Output = KScalar;
    fn sub(self, rhs: &KScalar) -> KScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a KScalar> for &'a KScalar {
    type Output = KScalar;
    fn mul(self, rhs: &KScalar) -> KScalar {
        if self.is_zero() || rhs.is_zero() {
            return KScalar::zero_at(lcm_u64(self.level, rhs.level));
        }
        let (a, b) = KScalar::common(self, rhs);
        let (an, bd) = cancel_common(&a.num, &b.den);
        let (bn, ad) = cancel_common(&b.num, &a.den);
        KScalar::from_coprime_parts(&an * &bn, &ad * &bd, a.level)
    }
}

impl<'a> Div<&'a KScalar> for &'a KScalar {
    type Output = KScalar;
    fn div(self, rhs: &KScalar) -> KScalar {
        assert!(!rhs.is_zero(), "division by zero in K");
        let (a, b) = KScalar::common(self, rhs);
        let (an, bn) = cancel_common(&a.num, &b.num);
        let (bd, ad) = cancel_common(&b.den, &a.den);
        KScalar::from_coprime_parts(&an * &bd, &ad * &bn, a.level)
    }
}

impl Neg for &KScalar {
    type Output = KScalar;
    fn neg(self) -> KScalar {
        KScalar {
            num: -&self.num,
            den: self.den.clone(),
            level: self.level,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<KScalar> for KScalar {
            type Output = KScalar;
            fn $m(self, rhs: KScalar) -> KScalar { $tr::$m(&self, &rhs) }
        }
        impl<'a> $tr<&'a KScalar> for KScalar {
            type Output = KScalar;
            fn $m(self, rhs: &KScalar) -> KScalar { $tr::$m(&self, rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for KScalar {
    type Output = KScalar;
    fn neg(self) -> KScalar {
        -&self
    }
}

impl From<Rational> for KScalar {
    fn from(r: Rational) -> Self {
        KScalar::from_rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> KScalar {
        KScalar::t()
    }

    #[test]
    fn ord_examples() {
        let x = &t().pow(2) + &t().pow(3);
        assert_eq!(x.ord(), Some(int(2)));
        assert_eq!(t().recip().ord(), Some(int(-1)));
        assert_eq!(KScalar::zero().ord(), None);
    }

    #[test]
    fn residue_examples() {
        let one_plus_t = &KScalar::one() + &t();
        assert_eq!(one_plus_t.residue(), ResScalar::Finite(int(1)));
        assert_eq!(t().recip().residue(), ResScalar::Infinity);
        let x = (&(&KScalar::from_int(2) * &t()) + &(&KScalar::from_int(3) * &t().pow(2))) / t();
        assert_eq!(x.residue(), ResScalar::Finite(int(2)));
        assert_eq!(t().residue(), ResScalar::Finite(int(0)));
    }

    #[test]
    fn base_change_examples() {
        let x = t().base_change(2).unwrap();
        assert_eq!(x.level(), 2);
        assert_eq!(x.num(), &QPoly::from_ints(&[0, 0, 1]));
        assert_eq!(x.ord(), Some(int(1)));
        let y = (&KScalar::one() + &t()).base_change(3).unwrap();
        assert_eq!(y.num(), &QPoly::from_ints(&[1, 0, 0, 1]));
        assert_eq!(y, &KScalar::one() + &t());
        assert!(matches!(
            t().base_change(65),
            Err(Error::LevelCapExceeded { .. })
        ));
    }

    #[test]
    fn fractional_powers() {
        let half = KScalar::t_pow(&rat(1, 2));
        assert_eq!(half.level(), 2);
        assert_eq!(&half * &half, t());
        assert_eq!(half.ord(), Some(rat(1, 2)));
        assert_eq!(half.to_string(), "t^(1/2)");
        assert_eq!((&half * &half).at_min_level().level(), 1);
    }

    #[test]
    fn truncation() {
        // 1/(1-t) = 1 + t + t^2 + ...
        let x = KScalar::one() / (&KScalar::one() - &t());
        let tr = x.truncate_below(&int(3));
        assert_eq!(tr, &(&KScalar::one() + &t()) + &t().pow(2));
        let y = &t().recip() + &KScalar::from_int(5);
        assert_eq!(y.truncate_below(&int(0)), t().recip());
        assert_eq!(y.truncate_below(&rat(1, 2)), y);
        assert!(t().truncate_below(&int(1)).is_zero());
    }

    #[test]
    fn display() {
        let x = (&KScalar::one() + &t()) / (&t() - &KScalar::from_int(2));
        assert_eq!(x.to_string(), "(t+1)/(t-2)");
        assert_eq!(t().recip().to_string(), "1/t");
        assert_eq!(KScalar::from_rational(rat(-3, 2)).to_string(), "-3/2");
    }
}
