//! Type II points of the Berkovich line, their canonical charts, the
//! hyperbolic metric and tangent directions.
//!
//! A point is the closed disk `D(a, r^s)`; larger `s` means a smaller disk,
//! and the Gauss point is `(0, 0)`. All distances are in valuation units.
//! The center is kept as its Laurent expansion truncated below `s`, which
//! makes representation equality coincide with point equality.

use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::respoly::DirectionClass;
use crate::scalars::{check_level, denominator_u64, lcm_u64, KScalar, Rational, ResScalar};

#[derive(Clone, PartialEq, Eq)]
pub struct TypeIIPoint {
    center: KScalar,
    exponent: Rational,
}

impl TypeIIPoint {
    /// The disk `D(center, r^exponent)`, with the center canonicalized.
    pub fn new(center: KScalar, exponent: Rational) -> Self {
        let center = center.truncate_below(&exponent).at_min_level();
        TypeIIPoint { center, exponent }
    }

    pub fn gauss() -> Self {
        TypeIIPoint {
            center: KScalar::zero(),
            exponent: Rational::zero(),
        }
    }

    pub fn center(&self) -> &KScalar {
        &self.center
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
    }

    pub fn is_gauss(&self) -> bool {
        self.exponent.is_zero() && self.center.is_zero()
    }

    /// Smallest level at which the chart of this point is defined.
    pub fn level(&self) -> u64 {
        lcm_u64(self.center.level(), denominator_u64(&self.exponent))
    }

    /// Whether this disk contains `other`.
    pub fn contains(&self, other: &TypeIIPoint) -> bool {
        other.exponent >= self.exponent && ord_ge(&(&other.center - &self.center), &self.exponent)
    }

    /// Whether the classical point `z` lies in this disk.
    pub fn contains_classical(&self, z: &KScalar) -> bool {
        ord_ge(&(z - &self.center), &self.exponent)
    }
}

impl fmt::Display for TypeIIPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_gauss() {
            write!(f, "gauss")
        } else {
            write!(f, "a={};s={}", self.center, self.exponent)
        }
    }
}

impl fmt::Debug for TypeIIPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `ord(x) ≥ s`, with `ord(0) = +∞`.
fn ord_ge(x: &KScalar, s: &Rational) -> bool {
    x.ord().is_none_or(|o| &o >= s)
}

/// `min(s1, s2, ord(a1 − a2))`: the exponent of the smallest disk containing
/// both points.
fn join_exponent(p: &TypeIIPoint, q: &TypeIIPoint) -> Rational {
    let m = p.exponent.clone().min(q.exponent.clone());
    match (&p.center - &q.center).ord() {
        Some(o) => m.min(o),
        None => m,
    }
}

/// Smallest disk containing both points.
pub fn join(p: &TypeIIPoint, q: &TypeIIPoint) -> TypeIIPoint {
    TypeIIPoint::new(p.center.clone(), join_exponent(p, q))
}

/// Hyperbolic distance in valuation units.
pub fn rho(p: &TypeIIPoint, q: &TypeIIPoint) -> Rational {
    let m = join_exponent(p, q);
    (&p.exponent - &m) + (&q.exponent - &m)
}

/// The point of `[from, to]` at distance `tau` from `from`.
pub fn path_point(from: &TypeIIPoint, to: &TypeIIPoint, tau: &Rational) -> Result<TypeIIPoint> {
    let m = join_exponent(from, to);
    let up = &from.exponent - &m;
    let total = &up + (&to.exponent - &m);
    if tau < &Rational::zero() || tau > &total {
        return Err(Error::OutOfRange(format!("tau = {tau} not in [0, {total}]")));
    }
    if tau <= &up {
        Ok(TypeIIPoint::new(from.center.clone(), &from.exponent - tau))
    } else {
        Ok(TypeIIPoint::new(to.center.clone(), &m + (tau - &up)))
    }
}

/// Median of the tree triple: the unique point on all three pairwise
/// segments.
pub fn wedge(p: &TypeIIPoint, q: &TypeIIPoint, base: &TypeIIPoint) -> TypeIIPoint {
    let two = Rational::from_integer(2.into());
    let tau = (rho(p, q) + rho(p, base) - rho(q, base)) / two;
    path_point(p, q, &tau).expect("Gromov product lies on the segment")
}

/// `[[α, β], [γ, δ]]` acting by `z ↦ (αz + β)/(γz + δ)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mobius {
    pub m: [[KScalar; 2]; 2],
}

impl Mobius {
    pub fn new(a: KScalar, b: KScalar, c: KScalar, d: KScalar) -> Result<Self> {
        let m = Mobius { m: [[a, b], [c, d]] };
        if m.det().is_zero() {
            return Err(Error::InvalidInput("singular Mobius matrix".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius {
            m: [
                [KScalar::one(), KScalar::zero()],
                [KScalar::zero(), KScalar::one()],
            ],
        }
    }

    pub fn det(&self) -> KScalar {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    /// The adjugate, which represents the inverse in `PGL(2)`.
    pub fn inverse(&self) -> Mobius {
        let [[a, b], [c, d]] = &self.m;
        Mobius {
            m: [[d.clone(), -b], [-c, a.clone()]],
        }
    }

    /// Matrix product `self · other`, i.e. the composition `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let mut out = Mobius::identity();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = &(&self.m[i][0] * &other.m[0][j]) + &(&self.m[i][1] * &other.m[1][j]);
            }
        }
        out
    }

    /// Image of a classical point; `None` is `∞`.
    pub fn apply(&self, z: Option<&KScalar>) -> Option<KScalar> {
        let [[a, b], [c, d]] = &self.m;
        let (num, den) = match z {
            Some(z) => (&(a * z) + b, &(c * z) + d),
            None => (a.clone(), c.clone()),
        };
        if den.is_zero() {
            None
        } else {
            Some(num / den)
        }
    }
}

/// The canonical chart `w ↦ t^s w + a`, which sends the Gauss point to `ξ`.
pub fn chart(xi: &TypeIIPoint) -> Result<Mobius> {
    check_level(xi.level())?;
    Ok(Mobius {
        m: [
            [KScalar::t_pow(&xi.exponent), xi.center.clone()],
            [KScalar::zero(), KScalar::one()],
        ],
    })
}

/// The canonical chart, refusing to raise the level beyond `level`.
pub fn chart_at_level(xi: &TypeIIPoint, level: u64) -> Result<Mobius> {
    if !level.is_multiple_of(xi.level()) {
        return Err(Error::NeedsBaseChange {
            min_level: lcm_u64(level, xi.level()),
        });
    }
    chart(xi)
}

/// Something a direction can point toward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Point(TypeIIPoint),
    Classical(KScalar),
    Infinity,
}

impl From<TypeIIPoint> for Target {
    fn from(p: TypeIIPoint) -> Self {
        Target::Point(p)
    }
}

/// A tangent direction at a type II point, named in that point's canonical
/// chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub at: TypeIIPoint,
    pub class: DirectionClass,
}

/// The class, in the canonical chart of `xi`, of the direction containing
/// `target`.
pub fn direction_toward(xi: &TypeIIPoint, target: &Target) -> Result<DirectionClass> {
    let scale = KScalar::t_pow(&xi.exponent);
    match target {
        Target::Infinity => Ok(DirectionClass::Infinity),
        Target::Classical(z) => {
            let c = &(z - &xi.center) / &scale;
            Ok(DirectionClass::from_residue(&c.residue()))
        }
        Target::Point(p) => {
            if p == xi {
                return Err(Error::SamePoint);
            }
            // pull back through the chart: the disk D((b - a)/t^s, s' - s)
            let c = &(&p.center - &xi.center) / &scale;
            let sigma = &p.exponent - &xi.exponent;
            let integral = ord_ge(&c, &Rational::zero());
            if integral && sigma > Rational::zero() {
                Ok(DirectionClass::from_residue(&c.residue()))
            } else {
                Ok(DirectionClass::Infinity)
            }
        }
    }
}

/// The point at distance `h` from `xi` along the canonical ray of a rational
/// direction: `(a + c·t^s, s + h)` for `Finite(c)`, `(a, s − h)` for `∞`.
pub fn step(xi: &TypeIIPoint, class: &DirectionClass, h: &Rational) -> Result<TypeIIPoint> {
    if h < &Rational::zero() {
        return Err(Error::OutOfRange(format!("negative step {h}")));
    }
    match class {
        DirectionClass::Infinity => Ok(TypeIIPoint::new(xi.center.clone(), &xi.exponent - h)),
        DirectionClass::Finite(c) => {
            let shift = &KScalar::from_rational(c.clone()) * &KScalar::t_pow(&xi.exponent);
            Ok(TypeIIPoint::new(&xi.center + &shift, &xi.exponent + h))
        }
        DirectionClass::Factor(_) => Err(Error::IrrationalDirection),
    }
}

/// Class of the continuation of the ray used by [`step`] once it has moved
/// past its start: `∞` stays `∞`, a finite ray continues into `0`.
pub fn ray_continuation(class: &DirectionClass) -> DirectionClass {
    match class {
        DirectionClass::Infinity => DirectionClass::Infinity,
        _ => DirectionClass::Finite(Rational::zero()),
    }
}

/// Residue class of `t^{-s}(z - a)`; convenience for classical points.
pub fn residue_in_chart(xi: &TypeIIPoint, z: &KScalar) -> ResScalar {
    let c = &(z - &xi.center) / &KScalar::t_pow(&xi.exponent);
    c.residue()
}
