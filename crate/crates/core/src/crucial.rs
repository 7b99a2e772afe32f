//! The resultant functions `ordRes` and `hypRes`, their directional slopes,
//! a second evaluation of `hypRes` through tree geometry, descent to the
//! minimum locus and the (semi)stability verdicts.

use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use crate::berkspace::{
    chart, direction_toward, path_point, ray_continuation, rho, step, Mobius, Target, TypeIIPoint,
};
use crate::error::{Error, Result};
use crate::redux::{
    coeff_reduction, conjugate, intrinsic_data, min_ord, reduction_data, resultant_ord, transform,
    RationalMapK, Tilde,
};
use crate::respoly::DirectionClass;
use crate::scalars::{int, lcm_u64, Rational};

fn require_dynamic(phi: &RationalMapK) -> Result<usize> {
    let d = phi.degree();
    if d < 2 {
        return Err(Error::InvalidInput(
            "dynamical operations need degree at least 2".into(),
        ));
    }
    Ok(d)
}

/// `ord_t` of the resultant of a minimal lift of `M^{-1} ∘ φ ∘ M`, where
/// `M` is the canonical chart of `xi`.
pub fn ord_res(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Rational> {
    require_dynamic(phi)?;
    ord_res_in_chart(phi, &chart(xi)?)
}

/// Same quantity for an arbitrary chart `M`.
pub fn ord_res_in_chart(phi: &RationalMapK, m: &Mobius) -> Result<Rational> {
    let psi = conjugate(m, phi);
    let ord = resultant_ord(psi.num(), psi.den()).ok_or(Error::DegenerateMap)?;
    let two_d = int(2 * psi.degree() as i64);
    Ok(ord - two_d * min_ord(&psi))
}

/// `ordRes` and `hypRes` at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrucialReport {
    pub at: TypeIIPoint,
    pub ord_res: Rational,
    pub hyp_res: Rational,
}

/// `hypRes`, normalized to vanish at the Gauss point, with the Gauss value
/// of `ordRes` computed once.
#[derive(Clone, Debug)]
pub struct ResultantFunction<'a> {
    phi: &'a RationalMapK,
    ord_gauss: Rational,
    scale: Rational,
}

impl<'a> ResultantFunction<'a> {
    pub fn new(phi: &'a RationalMapK) -> Result<Self> {
        let d = require_dynamic(phi)? as i64;
        let ord_gauss = ord_res(phi, &TypeIIPoint::gauss())?;
        Ok(ResultantFunction {
            phi,
            ord_gauss,
            scale: int(2 * d * (d - 1)),
        })
    }

    pub fn map(&self) -> &RationalMapK {
        self.phi
    }

    pub fn ord_res(&self, xi: &TypeIIPoint) -> Result<Rational> {
        ord_res(self.phi, xi)
    }

    pub fn hyp_res(&self, xi: &TypeIIPoint) -> Result<Rational> {
        Ok(self.hyp_from_ord(&self.ord_res(xi)?))
    }

    fn hyp_from_ord(&self, ord: &Rational) -> Rational {
        (ord - &self.ord_gauss) / &self.scale
    }

    pub fn report(&self, xi: &TypeIIPoint) -> Result<CrucialReport> {
        let ord = self.ord_res(xi)?;
        Ok(CrucialReport {
            at: xi.clone(),
            hyp_res: self.hyp_from_ord(&ord),
            ord_res: ord,
        })
    }
}

pub fn hyp_res(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Rational> {
    ResultantFunction::new(phi)?.hyp_res(xi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeReport {
    pub at: TypeIIPoint,
    pub class: DirectionClass,
    pub dep: usize,
    pub fixed: bool,
    pub rhs: Rational,
    pub measured: Option<Rational>,
}

/// `(−dep + (d∓1)/2)/(d−1)`, with `d−1` for fixed directions.
pub fn slope_formula(d: usize, dep: usize, fixed: bool) -> Rational {
    let d = d as i64;
    let half = if fixed { d - 1 } else { d + 1 };
    (Rational::new(half.into(), 2.into()) - int(dep as i64)) / int(d - 1)
}

pub fn slope_rhs(phi: &RationalMapK, xi: &TypeIIPoint, class: &DirectionClass) -> Result<SlopeReport> {
    require_dynamic(phi)?;
    let ir = intrinsic_data(phi, xi)?;
    let dep = ir.depth(class)?;
    let fixed = ir.is_fixed_direction(class)?;
    Ok(SlopeReport {
        at: xi.clone(),
        class: class.clone(),
        dep,
        fixed,
        rhs: slope_formula(phi.degree(), dep, fixed),
        measured: None,
    })
}

/// One-sided derivative of `hypRes` along the canonical ray of `class`,
/// from exact difference quotients at `h` and `h/2`. Convexity makes the
/// two agree exactly once `h` is below the first breakpoint.
pub fn slope_measured(phi: &RationalMapK, xi: &TypeIIPoint, class: &DirectionClass) -> Result<Rational> {
    if matches!(class, DirectionClass::Factor(_)) {
        return Err(Error::IrrationalDirection);
    }
    let f = ResultantFunction::new(phi)?;
    let f0 = f.hyp_res(xi)?;
    let quotient = |h: &Rational| -> Result<Rational> {
        let p = step(xi, class, h)?;
        Ok((f.hyp_res(&p)? - &f0) / h)
    };
    let mut h = Rational::one();
    let mut q_h = quotient(&h).map_err(unresolved)?;
    loop {
        let half = &h / int(2);
        let q_half = quotient(&half).map_err(unresolved)?;
        if q_half == q_h {
            return Ok(q_h);
        }
        h = half;
        q_h = q_half;
    }
}

fn unresolved(e: Error) -> Error {
    match e {
        Error::LevelCapExceeded { .. } => Error::PiecewiseBoundaryUnresolved,
        other => other,
    }
}

/// The rational with the smallest denominator (then smallest absolute
/// value) strictly between `a` and `b`.
pub fn simplest_between(a: &Rational, b: &Rational) -> Rational {
    assert!(a < b, "empty interval");
    if a.is_negative() && b.is_positive() {
        return Rational::zero();
    }
    if !b.is_positive() {
        return -simplest_above(&-b, Some(&-a));
    }
    simplest_above(a, Some(b))
}

/// Simplest rational in `(a, b)` for `a ≥ 0`; `None` means `b = +∞`.
fn simplest_above(a: &Rational, b: Option<&Rational>) -> Rational {
    let n = a.floor();
    let next = &n + Rational::one();
    if b.is_none_or(|b| &next < b) {
        return next;
    }
    let b = b.expect("bounded here");
    let lower = (b - &n).recip();
    let upper = (a != &n).then(|| (a - &n).recip());
    n + simplest_above(&lower, upper.as_ref()).recip()
}

fn denominator_of(r: &Rational) -> u64 {
    r.denom().to_u64().unwrap_or(u64::MAX)
}

/// Default denominator bound for breakpoint certification:
/// `lcm(1..4d)` times the working level.
pub fn breakpoint_bound(d: usize, level: u64) -> u64 {
    (1..=(4 * d as u64)).fold(1, lcm_u64).saturating_mul(level)
}

/// Position of a direction relative to a segment being walked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Heading {
    Forward,
    Backward,
    Aside,
}

/// Evaluates `hypRes` through tree geometry:
/// `ρ(ξ,ξg)/2 + (ρ(ξ, φ(ξ) ∧ ξ) − ∫ ρ(ξg, ξ ∧ ·) dφ*δ_{ξg})/(d−1)`.
///
/// The integral is `∫_0^L m(τ) dτ` over the segment `γ` from `ξg` to `ξ`,
/// where `m(τ)` is the pullback mass of the direction at `γ(τ)` toward
/// `ξ`. That mass is the depth, at that direction, of the coefficient
/// reduction of `φ ∘ M_{γ(τ)}`.
pub fn hyp_res_direct(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Rational> {
    Ok(hyp_res_direct_profile(phi, xi)?.value)
}

/// The pieces of the geometric evaluation of `hypRes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectEvaluation {
    pub value: Rational,
    /// `(from, to, m)`: the pullback mass toward `ξ` is `m` on `(from, to)`.
    pub integrand: Vec<(Rational, Rational, usize)>,
    /// `ρ(ξg, φ(ξ) ∧_{ξg} ξ)`.
    pub wedge_position: Rational,
}

pub fn hyp_res_direct_profile(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<DirectEvaluation> {
    let d = require_dynamic(phi)?;
    let level = lcm_u64(phi.level(), xi.level());
    hyp_res_direct_bounded(phi, xi, breakpoint_bound(d, level))
}

pub fn hyp_res_direct_bounded(
    phi: &RationalMapK,
    xi: &TypeIIPoint,
    bound: u64,
) -> Result<DirectEvaluation> {
    let d = require_dynamic(phi)?;
    let gauss = TypeIIPoint::gauss();
    let length = rho(&gauss, xi);
    if length.is_zero() {
        return Ok(DirectEvaluation {
            value: Rational::zero(),
            integrand: Vec::new(),
            wedge_position: Rational::zero(),
        });
    }
    let walk = SegmentWalk {
        phi,
        xi,
        gauss: &gauss,
        length: &length,
        bound,
    };
    let mut integrand = Vec::new();
    walk.integral(&mut integrand)?;
    let integral = integrand
        .iter()
        .fold(Rational::zero(), |acc, (a, b, m)| acc + int(*m as i64) * (b - a));
    let wedge_position = walk.wedge_position()?;
    let wedge_term = &length - &wedge_position;
    Ok(DirectEvaluation {
        value: &length / int(2) + (wedge_term - integral) / int(d as i64 - 1),
        integrand,
        wedge_position,
    })
}

struct SegmentWalk<'a> {
    phi: &'a RationalMapK,
    xi: &'a TypeIIPoint,
    gauss: &'a TypeIIPoint,
    length: &'a Rational,
    bound: u64,
}

impl SegmentWalk<'_> {
    fn point(&self, tau: &Rational) -> Result<TypeIIPoint> {
        path_point(self.gauss, self.xi, tau)
    }

    fn snap(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        let beta = simplest_between(a, b);
        if denominator_of(&beta) > self.bound {
            return Err(Error::BreakpointUnresolved { bound: self.bound });
        }
        Ok(beta)
    }

    fn capped<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::LevelCapExceeded { .. } => Error::BreakpointUnresolved { bound: self.bound },
            other => other,
        })
    }

    /// Pullback masses `(m(τ−), m(τ+))` of the directions at `γ(τ)` back
    /// toward `ξg` (complemented) and forward toward `ξ`.
    fn masses(&self, tau: &Rational) -> Result<(usize, usize)> {
        let p = self.capped(self.point(tau))?;
        let chi = transform(&Mobius::identity(), self.phi, &self.capped(chart(&p))?);
        let depths = reduction_data(&chi, p.clone()).depths;
        let d = self.phi.degree();
        let before = if tau.is_zero() {
            0
        } else {
            let back = direction_toward(&p, &Target::Point(self.gauss.clone()))?;
            d - depths.depth_at(&back)?
        };
        let after = if tau == self.length {
            0
        } else {
            let fwd = direction_toward(&p, &Target::Point(self.xi.clone()))?;
            depths.depth_at(&fwd)?
        };
        Ok((before, after))
    }

    fn integral(&self, pieces: &mut Vec<(Rational, Rational, usize)>) -> Result<()> {
        let zero = Rational::zero();
        let (_, m0) = self.masses(&zero)?;
        let (ml, _) = self.masses(self.length)?;
        self.integrate(&zero, self.length, m0, ml, pieces)
    }

    /// Splits `(a, b)` into intervals of constant `m`, given the one-sided
    /// limits `m(a+)` and `m(b−)`; `m` is non-increasing and piecewise
    /// constant.
    fn integrate(
        &self,
        a: &Rational,
        b: &Rational,
        ma: usize,
        mb: usize,
        pieces: &mut Vec<(Rational, Rational, usize)>,
    ) -> Result<()> {
        if ma == mb {
            match pieces.last_mut() {
                Some(last) if last.2 == ma && &last.1 == a => last.1 = b.clone(),
                _ => pieces.push((a.clone(), b.clone(), ma)),
            }
            return Ok(());
        }
        let beta = self.snap(a, b)?;
        let (m_minus, m_plus) = self.masses(&beta)?;
        self.integrate(a, &beta, ma, m_minus, pieces)?;
        self.integrate(&beta, b, m_plus, mb, pieces)
    }

    /// Where the direction toward `φ(ξ)` leaves the segment, read from the
    /// reduction of `M_{γ(τ)}^{-1} ∘ φ ∘ M_ξ`.
    fn heading(&self, tau: &Rational) -> Result<Heading> {
        let p = self.capped(self.point(tau))?;
        let left = self.capped(chart(&p))?.inverse();
        let right = self.capped(chart(self.xi))?;
        let psi = transform(&left, self.phi, &right);
        let image = match coeff_reduction(&psi).tilde {
            Tilde::Constant(c) => DirectionClass::from_residue(&c),
            Tilde::Map { .. } => return Ok(Heading::Aside),
        };
        if tau < self.length && image == direction_toward(&p, &Target::Point(self.xi.clone()))? {
            return Ok(Heading::Forward);
        }
        if !tau.is_zero() && image == direction_toward(&p, &Target::Point(self.gauss.clone()))? {
            return Ok(Heading::Backward);
        }
        Ok(Heading::Aside)
    }

    /// `ρ(ξg, φ(ξ) ∧_{ξg} ξ)`.
    fn wedge_position(&self) -> Result<Rational> {
        let zero = Rational::zero();
        if self.heading(&zero)? != Heading::Forward {
            return Ok(zero);
        }
        if self.heading(self.length)? != Heading::Backward {
            return Ok(self.length.clone());
        }
        let (mut a, mut b) = (zero, self.length.clone());
        loop {
            let beta = self.snap(&a, &b)?;
            match self.heading(&beta)? {
                Heading::Forward => a = beta,
                Heading::Backward => b = beta,
                Heading::Aside => return Ok(beta),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Unstable,
    SemistableNotStable,
    Stable,
}

impl Verdict {
    pub fn is_semistable(self) -> bool {
        self != Verdict::Unstable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unstable => "unstable",
            Verdict::SemistableNotStable => "semistable",
            Verdict::Stable => "stable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hilbert–Mumford verdict at `xi`: semistable iff every depth is at most
/// `(d+1)/2` and every fixed depth is below `d/2`; stable iff every depth
/// is at most `d/2` and every fixed depth is below `(d−1)/2`.
pub fn semistability(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Verdict> {
    let d = require_dynamic(phi)?;
    let ir = intrinsic_data(phi, xi)?;
    Ok(verdict_from_pieces(
        d,
        ir.pieces().iter().map(|p| (p.depth, p.fixed)),
    ))
}

fn verdict_from_pieces(d: usize, pieces: impl Iterator<Item = (usize, bool)>) -> Verdict {
    let mut semistable = true;
    let mut stable = true;
    for (dep, fixed) in pieces {
        let twice = 2 * dep;
        if twice > d + 1 || (fixed && twice >= d) {
            semistable = false;
        }
        if twice > d || (fixed && twice + 1 >= d) {
            stable = false;
        }
    }
    match (semistable, stable) {
        (false, _) => Verdict::Unstable,
        (true, false) => Verdict::SemistableNotStable,
        (true, true) => Verdict::Stable,
    }
}

/// One leg of the descent: from `from`, along the ray of `class`, for
/// `length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentStep {
    pub from: TypeIIPoint,
    pub class: DirectionClass,
    pub slope: Rational,
    pub length: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinLocusResult {
    pub minimizer: TypeIIPoint,
    pub min_hyp_res: Rational,
    pub min_ord_res: Rational,
    pub unique: bool,
    pub verdict: Verdict,
    /// Directions at the minimizer along which `hypRes` is flat; nonempty
    /// exactly when the minimum extends along a segment.
    pub flat_directions: Vec<DirectionClass>,
    pub trail: Vec<DescentStep>,
}

pub const MAX_DESCENT_LEGS: usize = 256;

pub fn min_locus(phi: &RationalMapK) -> Result<MinLocusResult> {
    min_locus_from(phi, &TypeIIPoint::gauss())
}

/// Descends along the unique negative-slope direction until none remains.
pub fn min_locus_from(phi: &RationalMapK, start: &TypeIIPoint) -> Result<MinLocusResult> {
    let d = require_dynamic(phi)?;
    let f = ResultantFunction::new(phi)?;
    let mut xi = start.clone();
    let mut trail = Vec::new();
    loop {
        let ir = intrinsic_data(phi, &xi)?;
        let pieces = ir.pieces();
        let negative: Vec<_> = pieces
            .iter()
            .map(|p| (p, slope_formula(d, p.depth, p.fixed)))
            .filter(|(_, s)| s.is_negative())
            .collect();
        if negative.is_empty() {
            let ord = f.ord_res(&xi)?;
            let verdict = verdict_from_pieces(d, pieces.iter().map(|p| (p.depth, p.fixed)));
            let flat_directions = pieces
                .iter()
                .filter(|p| slope_formula(d, p.depth, p.fixed).is_zero())
                .map(|p| p.class.clone())
                .collect();
            return Ok(MinLocusResult {
                minimizer: xi,
                min_hyp_res: f.hyp_from_ord(&ord),
                min_ord_res: ord,
                unique: verdict == Verdict::Stable,
                verdict,
                flat_directions,
                trail,
            });
        }
        if negative.len() > 1 {
            return Err(Error::InvalidInput(format!(
                "convexity violated at {xi}: several descending directions"
            )));
        }
        let (piece, slope) = negative.into_iter().next().expect("one entry");
        if let DirectionClass::Factor(_) = piece.class {
            return Err(Error::NeedsExtension(piece.class.to_string()));
        }
        if trail.len() >= MAX_DESCENT_LEGS {
            return Err(Error::InvalidInput("descent did not terminate".into()));
        }
        let length = affine_extent(&f, &xi, &piece.class, &slope)?;
        let next = step(&xi, &piece.class, &length)?;
        trail.push(DescentStep {
            from: xi,
            class: piece.class.clone(),
            slope,
            length,
        });
        xi = next;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Probe {
    Before,
    Exactly,
    Beyond,
}

/// Distance along the ray of `class` from `xi` to the first breakpoint of
/// `hypRes`, given the initial slope.
fn affine_extent(
    f: &ResultantFunction<'_>,
    xi: &TypeIIPoint,
    class: &DirectionClass,
    slope: &Rational,
) -> Result<Rational> {
    let d = f.map().degree();
    let h0 = f.hyp_res(xi)?;
    let continuation = ray_continuation(class);
    let probe = |h: &Rational| -> Result<Probe> {
        let p = step(xi, class, h)?;
        if f.hyp_res(&p)? != &h0 + slope * h {
            return Ok(Probe::Beyond);
        }
        let ahead = slope_rhs(f.map(), &p, &continuation)?;
        Ok(if &ahead.rhs == slope {
            Probe::Before
        } else {
            Probe::Exactly
        })
    };
    let mut a = Rational::zero();
    let mut b = Rational::one();
    loop {
        match probe(&b)? {
            Probe::Exactly => return Ok(b),
            Probe::Beyond => break,
            Probe::Before => {
                a = b.clone();
                b = &b * int(2);
            }
        }
    }
    let bound = breakpoint_bound(d, lcm_u64(f.map().level(), xi.level()));
    loop {
        let beta = simplest_between(&a, &b);
        if denominator_of(&beta) > bound {
            return Err(Error::BreakpointUnresolved { bound });
        }
        match probe(&beta)? {
            Probe::Exactly => return Ok(beta),
            Probe::Before => a = beta,
            Probe::Beyond => b = beta,
        }
    }
}

/// Slope reports for every direction of positive depth.
pub fn all_slopes(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Vec<SlopeReport>> {
    let d = require_dynamic(phi)?;
    let ir = intrinsic_data(phi, xi)?;
    Ok(ir
        .pieces()
        .into_iter()
        .map(|p| SlopeReport {
            at: xi.clone(),
            rhs: slope_formula(d, p.depth, p.fixed),
            dep: p.depth,
            fixed: p.fixed,
            class: p.class,
            measured: None,
        })
        .collect())
}

/// Smallest positive denominator `q` such that every slope lies in
/// `(1/q)ℤ`: `2(d−1)`.
pub fn slope_quantum(d: usize) -> u64 {
    2 * (d as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_map, parse_point};
    use crate::scalars::rat;

    fn map(s: &str) -> RationalMapK {
        parse_map(s).unwrap()
    }
    fn pt(s: &str) -> TypeIIPoint {
        parse_point(s).unwrap()
    }

    #[test]
    fn ord_res_examples() {
        let g = TypeIIPoint::gauss();
        assert_eq!(ord_res(&map("z^2"), &g).unwrap(), int(0));
        assert_eq!(ord_res(&map("t*z^2"), &g).unwrap(), int(2));
        assert_eq!(ord_res(&map("(t*z^2+1)/t"), &g).unwrap(), int(4));
        assert_eq!(ord_res(&map("(t*z^2+1)/t"), &pt("a=0;s=-1/2")).unwrap(), int(1));
        assert_eq!(ord_res(&map("(z^2-t)/z"), &g).unwrap(), int(1));
    }

    #[test]
    fn hyp_res_examples() {
        assert_eq!(hyp_res(&map("t*z^2"), &TypeIIPoint::gauss()).unwrap(), int(0));
        assert_eq!(hyp_res(&map("t*z^2"), &pt("a=0;s=-1")).unwrap(), rat(-1, 2));
        assert_eq!(hyp_res(&map("(t*z^2+1)/t"), &pt("a=0;s=-1/2")).unwrap(), rat(-3, 4));
    }

    #[test]
    fn slope_rhs_examples() {
        let g = TypeIIPoint::gauss();
        let r = slope_rhs(&map("t*z^2"), &g, &DirectionClass::Infinity).unwrap();
        assert_eq!((r.dep, r.fixed, r.rhs), (2, false, rat(-1, 2)));
        let r = slope_rhs(&map("(z^2-t)/z"), &g, &DirectionClass::Finite(int(0))).unwrap();
        assert_eq!((r.dep, r.fixed, r.rhs), (1, true, rat(-1, 2)));
        let r = slope_rhs(&map("z^2"), &g, &DirectionClass::Finite(int(0))).unwrap();
        assert_eq!((r.dep, r.fixed, r.rhs), (0, true, rat(1, 2)));
    }

    #[test]
    fn slope_measured_examples() {
        let g = TypeIIPoint::gauss();
        assert_eq!(
            slope_measured(&map("t*z^2"), &g, &DirectionClass::Infinity).unwrap(),
            rat(-1, 2)
        );
        assert_eq!(
            slope_measured(&map("(t*z^2+1)/t"), &g, &DirectionClass::Infinity).unwrap(),
            rat(-3, 2)
        );
        assert_eq!(
            slope_measured(&map("z^2"), &g, &DirectionClass::Finite(int(1))).unwrap(),
            rat(1, 2)
        );
        let factor = DirectionClass::from_poly(&crate::scalars::QPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(
            slope_measured(&map("z^2"), &g, &factor),
            Err(Error::IrrationalDirection)
        );
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(2, 3)), rat(1, 2));
        assert_eq!(simplest_between(&int(0), &int(1)), rat(1, 2));
        assert_eq!(simplest_between(&rat(-1, 2), &rat(1, 2)), int(0));
        assert_eq!(simplest_between(&rat(-5, 2), &rat(-2, 1)), rat(-7, 3));
        assert_eq!(simplest_between(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_between(&int(1), &int(5)), int(2));
    }

    #[test]
    fn hyp_res_direct_integrand() {
        let e = hyp_res_direct_profile(&map("t*z^2"), &pt("a=0;s=-1")).unwrap();
        assert_eq!(
            e.integrand,
            vec![(int(0), rat(1, 2), 2), (rat(1, 2), int(1), 0)]
        );
        assert_eq!(e.wedge_position, int(1));
    }

    #[test]
    fn hyp_res_direct_examples() {
        assert_eq!(hyp_res_direct(&map("t*z^2"), &pt("a=0;s=-1")).unwrap(), rat(-1, 2));
        assert_eq!(hyp_res_direct(&map("t*z^2"), &TypeIIPoint::gauss()).unwrap(), int(0));
        assert_eq!(
            hyp_res_direct(&map("(t*z^2+1)/t"), &pt("a=0;s=-1/2")).unwrap(),
            rat(-3, 4)
        );
    }

    #[test]
    fn min_locus_examples() {
        let r = min_locus(&map("t*z^2")).unwrap();
        assert_eq!(r.minimizer, pt("a=0;s=-1"));
        assert_eq!(r.min_hyp_res, rat(-1, 2));
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.unique);
        let r = min_locus(&map("(t*z^2+1)/t")).unwrap();
        assert_eq!(r.minimizer, pt("a=0;s=-1/2"));
        assert_eq!(r.min_hyp_res, rat(-3, 4));
        let r = min_locus(&map("(z^2-t)/z")).unwrap();
        assert_eq!(r.minimizer, pt("a=0;s=1/2"));
        // ordRes drops from 1 to 0 over a distance 1/2
        assert_eq!(r.min_ord_res, int(0));
        assert_eq!(r.min_hyp_res, rat(-1, 4));
        assert_eq!(r.verdict, Verdict::Stable);
        let r = min_locus(&map("z^2")).unwrap();
        assert_eq!(r.minimizer, TypeIIPoint::gauss());
        assert_eq!(r.min_hyp_res, int(0));
        assert!(r.trail.is_empty());
    }

    #[test]
    fn semistability_examples() {
        let g = TypeIIPoint::gauss();
        assert_eq!(semistability(&map("t*z^2"), &g).unwrap(), Verdict::Unstable);
        assert_eq!(
            semistability(&map("(t*z^2+1)/t"), &pt("a=0;s=-1/2")).unwrap(),
            Verdict::Stable
        );
        assert_eq!(semistability(&map("z^2"), &g).unwrap(), Verdict::Stable);
    }
}
