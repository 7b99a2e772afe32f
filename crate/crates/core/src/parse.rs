//! Text front end: scalars in `t`, maps in `z`, points and directions.
//!
//! Scalars use `+ - * / ^`, parentheses, integer or decimal numbers and the
//! symbol `t`; `t^(p/q)` denotes a fractional power. Maps are rational
//! expressions in `z` whose coefficients follow the scalar grammar. Maps are
//! not simplified beyond absorbing scalar denominators: common factors in
//! `z` are kept, and both vectors are padded to the larger degree.

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::berkspace::{direction_toward, Target, TypeIIPoint};
use crate::error::{Error, Result};
use crate::redux::RationalMapK;
use crate::respoly::DirectionClass;
use crate::scalars::{check_level, denominator_u64, parse_rational, KScalar, QPoly, Rational};

/// Polynomial in `z` over `K`, lowest degree first.
type KPoly = Vec<KScalar>;

/// An unsimplified quotient of two polynomials in `z`.
#[derive(Clone, Debug)]
struct Frac {
    num: KPoly,
    den: KPoly,
}

fn trim(mut p: KPoly) -> KPoly {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(KScalar::zero());
    }
    p
}

fn is_zero_poly(p: &KPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_add(a: &KPoly, b: &KPoly) -> KPoly {
    let n = a.len().max(b.len());
    let zero = KScalar::zero();
    trim(
        (0..n)
            .map(|k| a.get(k).unwrap_or(&zero) + b.get(k).unwrap_or(&zero))
            .collect(),
    )
}

fn poly_mul(a: &KPoly, b: &KPoly) -> KPoly {
    let mut out = vec![KScalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn poly_neg(a: &KPoly) -> KPoly {
    a.iter().map(|c| -c).collect()
}

impl Frac {
    fn constant(c: KScalar) -> Self {
        Frac {
            num: vec![c],
            den: vec![KScalar::one()],
        }
    }

    fn z() -> Self {
        Frac {
            num: vec![KScalar::zero(), KScalar::one()],
            den: vec![KScalar::one()],
        }
    }

    fn is_scalar(&self) -> bool {
        self.num.len() == 1 && self.den.len() == 1
    }

    fn as_scalar(&self) -> Option<KScalar> {
        self.is_scalar().then(|| &self.num[0] / &self.den[0])
    }

    /// Folds a scalar denominator into the numerator, so that polynomial
    /// expressions keep the denominator `1`.
    fn normalized(self) -> Frac {
        if self.den.len() != 1 || self.den[0].is_one() {
            return self;
        }
        let inv = self.den[0].recip();
        Frac {
            num: self.num.iter().map(|c| c * &inv).collect(),
            den: vec![KScalar::one()],
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Frac {
                num: poly_add(&self.num, &o.num),
                den: self.den.clone(),
            };
        }
        Frac {
            num: poly_add(&poly_mul(&self.num, &o.den), &poly_mul(&o.num, &self.den)),
            den: poly_mul(&self.den, &o.den),
        }
        .normalized()
    }

    fn neg(&self) -> Frac {
        Frac {
            num: poly_neg(&self.num),
            den: self.den.clone(),
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: poly_mul(&self.num, &o.num),
            den: poly_mul(&self.den, &o.den),
        }
        .normalized()
    }

    fn div(&self, o: &Frac) -> Option<Frac> {
        if is_zero_poly(&o.num) {
            return None;
        }
        Some(
            Frac {
                num: poly_mul(&self.num, &o.den),
                den: poly_mul(&self.den, &o.num),
            }
            .normalized(),
        )
    }

    fn powi(&self, n: i64) -> Option<Frac> {
        let base = if n < 0 {
            Frac::constant(KScalar::one()).div(self)?
        } else {
            self.clone()
        };
        let mut acc = Frac::constant(KScalar::one());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Vars {
    T,
    TZ,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vars,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: Vars) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(Error::parse(self.pos, format!("unexpected '{}'", c as char))),
        }
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc
                    .div(&rhs)
                    .ok_or_else(|| Error::parse(at, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Frac> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Frac> {
        let base_pos = self.peek().map(|_| self.pos).unwrap_or(self.pos);
        let is_t = self.src.get(base_pos) == Some(&b't');
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp_pos = self.pos;
        let e = self.exponent()?;
        if is_t && base.is_scalar() {
            let level = denominator_u64(&e);
            check_level(level)?;
            return Ok(Frac::constant(KScalar::t_pow(&e)));
        }
        if !e.is_integer() {
            return Err(Error::parse(exp_pos, "fractional exponents apply to t only"));
        }
        let n = e
            .to_integer()
            .to_i64()
            .filter(|n| n.abs() <= 4096)
            .ok_or_else(|| Error::parse(exp_pos, "exponent too large"))?;
        base.powi(n)
            .ok_or_else(|| Error::parse(exp_pos, "zero raised to a negative power"))
    }

    /// An exponent: a signed integer, or a signed rational in parentheses.
    fn exponent(&mut self) -> Result<Rational> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let p = self.integer()?;
            let q = if self.eat(b'/') {
                self.integer()?
            } else {
                BigInt::one()
            };
            self.expect(b')')?;
            if q.is_zero() {
                return Err(Error::parse(self.pos, "zero denominator in exponent"));
            }
            let r = Rational::new(p, q);
            return Ok(if neg { -r } else { r });
        }
        let neg = self.eat(b'-');
        let p = self.integer()?;
        let r = Rational::from_integer(p);
        Ok(if neg { -r } else { r })
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b't') => {
                self.pos += 1;
                Ok(Frac::constant(KScalar::t()))
            }
            Some(b'z') if self.vars == Vars::TZ => {
                self.pos += 1;
                Ok(Frac::z())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) => Err(Error::parse(self.pos, format!("unexpected '{}'", c as char))),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Frac> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value = match text.split_once('.') {
            None => Rational::from_integer(text.parse().expect("digits")),
            Some((int_part, frac_part)) => {
                if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
                    return Err(Error::parse(start, "malformed number"));
                }
                let digits = format!("{int_part}{frac_part}");
                let n: BigInt = digits.parse().map_err(|_| Error::parse(start, "malformed number"))?;
                let scale = num::pow(BigInt::from(10), frac_part.len());
                Rational::new(n, scale)
            }
        };
        Ok(Frac::constant(KScalar::from_rational(value)))
    }
}

/// Parses a scalar expression in `t`.
pub fn parse_scalar(text: &str) -> Result<KScalar> {
    let mut p = Parser::new(text, Vars::T);
    let f = p.expr()?;
    p.finish()?;
    let v = f.as_scalar().expect("expressions without z are scalars");
    check_level(v.level())?;
    Ok(v)
}

/// Parses a rational map in `z`. The degree is the larger of the numerator
/// and denominator degrees as written.
pub fn parse_map(text: &str) -> Result<RationalMapK> {
    let mut p = Parser::new(text, Vars::TZ);
    let f = p.expr()?;
    p.finish()?;
    let d = (f.num.len().max(f.den.len())) - 1;
    if d == 0 {
        return Err(Error::InvalidInput("map must have degree at least 1".into()));
    }
    let mut num = f.num;
    let mut den = f.den;
    num.resize(d + 1, KScalar::zero());
    den.resize(d + 1, KScalar::zero());
    for c in num.iter().chain(den.iter()) {
        check_level(c.level())?;
    }
    RationalMapK::new(num, den)
}

/// Parses `gauss` or `a=<scalar>;s=<rational>`.
pub fn parse_point(text: &str) -> Result<TypeIIPoint> {
    let text = text.trim();
    if text == "gauss" {
        return Ok(TypeIIPoint::gauss());
    }
    let mut center = None;
    let mut exponent = None;
    for part in text.split(';') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(0, format!("expected key=value in '{part}'")))?;
        match key.trim() {
            "a" => center = Some(parse_scalar(value)?),
            "s" => {
                exponent = Some(
                    parse_rational(value)
                        .ok_or_else(|| Error::parse(0, format!("bad rational '{value}'")))?,
                )
            }
            other => return Err(Error::parse(0, format!("unknown key '{other}'"))),
        }
    }
    let center = center.ok_or_else(|| Error::parse(0, "missing a="))?;
    let exponent = exponent.ok_or_else(|| Error::parse(0, "missing s="))?;
    let point = TypeIIPoint::new(center, exponent);
    check_level(point.level())?;
    Ok(point)
}

/// Parses a polynomial in `z` with rational coefficients.
pub fn parse_residue_poly(text: &str) -> Result<QPoly> {
    let mut p = Parser::new(text, Vars::TZ);
    let f = p.expr()?;
    p.finish()?;
    if f.den.len() != 1 {
        return Err(Error::parse(0, "expected a polynomial"));
    }
    let inv = f.den[0].recip();
    let mut coeffs = Vec::new();
    for c in &f.num {
        let c = c * &inv;
        if c.num().deg() > 0 || c.den().deg() > 0 {
            return Err(Error::parse(0, "residue polynomials have rational coefficients"));
        }
        coeffs.push(c.num().coeff(0) / c.den().coeff(0));
    }
    Ok(QPoly::new(coeffs))
}

/// A direction as written: either an explicit class or the direction toward
/// a point, which needs a base point to be resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectionLiteral {
    Class(DirectionClass),
    Toward(TypeIIPoint),
}

impl DirectionLiteral {
    pub fn resolve(&self, at: &TypeIIPoint) -> Result<DirectionClass> {
        match self {
            DirectionLiteral::Class(c) => Ok(c.clone()),
            DirectionLiteral::Toward(p) => direction_toward(at, &Target::Point(p.clone())),
        }
    }
}

pub fn parse_direction(text: &str) -> Result<DirectionLiteral> {
    let text = text.trim();
    if text == "inf" {
        return Ok(DirectionLiteral::Class(DirectionClass::Infinity));
    }
    if let Some(v) = text.strip_prefix("res=") {
        let r = parse_rational(v).ok_or_else(|| Error::parse(4, format!("bad rational '{v}'")))?;
        return Ok(DirectionLiteral::Class(DirectionClass::Finite(r)));
    }
    if let Some(v) = text.strip_prefix("factor=") {
        let p = parse_residue_poly(v)?;
        return DirectionClass::from_poly(&p).map(DirectionLiteral::Class);
    }
    if let Some(v) = text.strip_prefix("toward:") {
        return Ok(DirectionLiteral::Toward(parse_point(v)?));
    }
    Err(Error::parse(0, format!("unknown direction '{text}'")))
}

pub fn format_direction(d: &DirectionLiteral) -> String {
    match d {
        DirectionLiteral::Class(c) => c.to_string(),
        DirectionLiteral::Toward(p) => format!("toward:{p}"),
    }
}

/// Polynomial in `z` with scalar coefficients, every coefficient in
/// parentheses so that the output reparses to the same vector.
fn format_kpoly(p: &[KScalar]) -> String {
    let mut terms = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{k}"),
        };
        let coef = c.to_string();
        let simple = c.num().deg() == 0 && c.den().is_one();
        let term = if mono.is_empty() {
            format!("({coef})")
        } else if c.is_one() {
            mono
        } else if simple && !c.num().coeff(0).is_negative() {
            format!("{coef}*{mono}")
        } else {
            format!("({coef})*{mono}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Renders a map so that [`parse_map`] returns the same coefficient vectors.
pub fn format_map(phi: &RationalMapK) -> String {
    format!("({})/({})", format_kpoly(phi.num()), format_kpoly(phi.den()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};

    fn k(n: i64) -> KScalar {
        KScalar::from_int(n)
    }

    #[test]
    fn map_examples() {
        let phi = parse_map("t*z^2").unwrap();
        assert_eq!(phi.num(), &[k(0), k(0), KScalar::t()]);
        assert_eq!(phi.den(), &[k(1), k(0), k(0)]);
        let phi = parse_map("(z^2-t)/z").unwrap();
        assert_eq!(phi.num(), &[-KScalar::t(), k(0), k(1)]);
        assert_eq!(phi.den(), &[k(0), k(1), k(0)]);
        assert_eq!(parse_map("(z^2+1)/(z^2+1)"), Err(Error::DegenerateMap));
        let phi = parse_map("(t*z^2+1)/t").unwrap();
        assert_eq!(phi.num(), &[KScalar::t().recip(), k(0), k(1)]);
        assert_eq!(phi.den(), &[k(1), k(0), k(0)]);
    }

    #[test]
    fn scalar_grammar() {
        assert_eq!(parse_scalar("t^-1").unwrap(), KScalar::t().recip());
        assert_eq!(parse_scalar("t^(-1)").unwrap(), KScalar::t().recip());
        assert_eq!(parse_scalar("1/2").unwrap(), KScalar::from_rational(rat(1, 2)));
        assert_eq!(parse_scalar("0.25").unwrap(), KScalar::from_rational(rat(1, 4)));
        assert_eq!(parse_scalar("t^(1/2)").unwrap().level(), 2);
        assert_eq!(
            parse_scalar("(t+1)/(t-1)").unwrap(),
            &(&KScalar::t() + &k(1)) / &(&KScalar::t() - &k(1))
        );
        assert!(matches!(parse_scalar("t+"), Err(Error::Parse { .. })));
        assert!(matches!(parse_scalar("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_scalar("z"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_scalar("t^(1/65)"),
            Err(Error::LevelCapExceeded { .. })
        ));
    }

    #[test]
    fn point_examples() {
        assert_eq!(parse_point("gauss").unwrap(), TypeIIPoint::gauss());
        let p = parse_point("a=0;s=-1/2").unwrap();
        assert_eq!(p.exponent(), &rat(-1, 2));
        assert_eq!(p.level(), 2);
        assert_eq!(parse_point("a=0;s=0").unwrap(), TypeIIPoint::gauss());
        assert_eq!(parse_point("a=1;s=1").unwrap().center(), &k(1));
        assert!(parse_point("a=1").is_err());
    }

    #[test]
    fn direction_examples() {
        let d = parse_direction("factor=z^2+1").unwrap();
        assert_eq!(
            d,
            DirectionLiteral::Class(DirectionClass::Factor(QPoly::from_ints(&[1, 0, 1])))
        );
        assert_eq!(
            parse_direction("res=-1/2").unwrap(),
            DirectionLiteral::Class(DirectionClass::Finite(rat(-1, 2)))
        );
        assert_eq!(
            parse_direction("inf").unwrap(),
            DirectionLiteral::Class(DirectionClass::Infinity)
        );
        let d = parse_direction("toward:a=0;s=-1").unwrap();
        assert_eq!(d.resolve(&TypeIIPoint::gauss()).unwrap(), DirectionClass::Infinity);
        let d = parse_direction("toward:a=1;s=1").unwrap();
        assert_eq!(
            d.resolve(&TypeIIPoint::gauss()).unwrap(),
            DirectionClass::Finite(int(1))
        );
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "t*z^2",
            "(t*z^2+1)/t",
            "(z^2-t)/z",
            "z^2+t",
            "(z^3-1/2*z+t^(1/2))/(t^-2*z^2-3)",
            "((t+1)/(t-2)*z^2+z)/(z-t^(3/4))",
        ] {
            let phi = parse_map(text).unwrap();
            let printed = format_map(&phi);
            assert_eq!(parse_map(&printed).unwrap(), phi, "{text} -> {printed}");
        }
        for text in ["gauss", "a=t^(1/2)+1;s=3/2", "a=-1/3;s=-2"] {
            let p = parse_point(text).unwrap();
            assert_eq!(parse_point(&p.to_string()).unwrap(), p);
        }
        for text in ["inf", "res=3/5", "factor=z^2-2", "toward:a=t;s=2"] {
            let d = parse_direction(text).unwrap();
            assert_eq!(parse_direction(&format_direction(&d)).unwrap(), d);
        }
    }
}
