//! Rational maps over `K`, their minimal lifts and reductions, and the
//! intrinsic reduction at a type II point.
//!
//! A map of degree `d` is stored by its coefficient vectors
//! `φ(z) = Σ b_i z^i / Σ a_i z^i`, both of length `d + 1`. Homogeneously
//! the numerator is `F = Σ b_i X0^{d-i} X1^i` and the denominator
//! `G = Σ a_i X0^{d-i} X1^i` with `z = X1/X0`.

use std::collections::HashMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::berkspace::{chart, Mobius, TypeIIPoint};
use crate::error::{Error, Result};
use crate::respoly::{
    homogeneous_gcd, squarefree_decomposition, DepthDivisor, DirectionClass, HomogeneousForm,
};
use crate::scalars::{KScalar, QPoly, Rational, ResScalar};

pub const DEFAULT_ITERATION_CAP: u64 = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMapK {
    num: Vec<KScalar>,
    den: Vec<KScalar>,
}

impl fmt::Debug for RationalMapK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::format_map(self))
    }
}

impl RationalMapK {
    /// Validates a coefficient pair: equal lengths, degree at least 1 and a
    /// nonvanishing resultant.
    pub fn new(num: Vec<KScalar>, den: Vec<KScalar>) -> Result<Self> {
        if num.len() != den.len() || num.len() < 2 {
            return Err(Error::InvalidInput(
                "numerator and denominator need equal length at least 2".into(),
            ));
        }
        if resultant_ord(&num, &den).is_none() {
            return Err(Error::DegenerateMap);
        }
        Ok(RationalMapK { num, den })
    }

    /// Skips the resultant check; callers guarantee nondegeneracy.
    pub(crate) fn new_unchecked(num: Vec<KScalar>, den: Vec<KScalar>) -> Self {
        debug_assert_eq!(num.len(), den.len());
        RationalMapK { num, den }
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        let conv = |v: &[i64]| v.iter().map(|&c| KScalar::from_int(c)).collect();
        RationalMapK::new(conv(num), conv(den))
    }

    pub fn degree(&self) -> usize {
        self.num.len() - 1
    }

    pub fn num(&self) -> &[KScalar] {
        &self.num
    }

    pub fn den(&self) -> &[KScalar] {
        &self.den
    }

    /// Largest level among the coefficients.
    pub fn level(&self) -> u64 {
        self.num
            .iter()
            .chain(self.den.iter())
            .map(|c| c.level())
            .fold(1, crate::scalars::lcm_u64)
    }

    /// Identity map `z ↦ z` written with degree 1.
    pub fn identity() -> Self {
        RationalMapK {
            num: vec![KScalar::zero(), KScalar::one()],
            den: vec![KScalar::one(), KScalar::zero()],
        }
    }

    /// The resultant of the homogeneous coefficient pair.
    pub fn resultant(&self) -> KScalar {
        resultant(&self.num, &self.den)
    }

    /// `ord` of the resultant, computed without forming it exactly.
    pub fn resultant_ord(&self) -> Rational {
        resultant_ord(&self.num, &self.den).expect("nondegenerate map")
    }
}

fn kpoly_mul(a: &[KScalar], b: &[KScalar]) -> Vec<KScalar> {
    let mut out = vec![KScalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn kpoly_add_scaled(acc: &mut Vec<KScalar>, c: &KScalar, p: &[KScalar]) {
    if c.is_zero() {
        return;
    }
    if acc.len() < p.len() {
        acc.resize(p.len(), KScalar::zero());
    }
    for (k, x) in p.iter().enumerate() {
        if !x.is_zero() {
            acc[k] = &acc[k] + &(c * x);
        }
    }
}

/// Powers `p^0 .. p^n`.
fn kpoly_powers(p: &[KScalar], n: usize) -> Vec<Vec<KScalar>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(vec![KScalar::one()]);
    for k in 0..n {
        let next = kpoly_mul(&out[k], p);
        out.push(next);
    }
    out
}

/// `Σ c_i P^i Q^{d-i}`, padded to length `d·e + 1`.
fn homogeneous_substitute(
    coeffs: &[KScalar],
    p_pows: &[Vec<KScalar>],
    q_pows: &[Vec<KScalar>],
    len: usize,
) -> Vec<KScalar> {
    let d = coeffs.len() - 1;
    let mut acc = vec![KScalar::zero(); len];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = kpoly_mul(&p_pows[i], &q_pows[d - i]);
        kpoly_add_scaled(&mut acc, c, &term);
    }
    acc.resize(len, KScalar::zero());
    acc
}

/// Determinant of a matrix over `Q[u]` by Bareiss fraction-free
/// elimination; every division is exact.
fn bareiss(mut m: Vec<Vec<QPoly>>) -> QPoly {
    let n = m.len();
    let mut sign = false;
    let mut prev = QPoly::one();
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return QPoly::zero();
        };
        if pivot != k {
            m.swap(pivot, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if prev.is_one() { v } else { v.exact_div(&prev) };
            }
            m[i][k] = QPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}

/// Monic least common multiple of the denominators as `u^v · core`, so that
/// the usual monomial denominators never reach Euclid.
fn common_denominator<'a>(dens: impl Iterator<Item = &'a QPoly>) -> (usize, QPoly) {
    let mut v = 0;
    let mut core = QPoly::one();
    for den in dens {
        let dv = den.valuation().unwrap_or(0);
        v = v.max(dv);
        let c = den.unshift(dv);
        if c.is_constant() || c == core {
            continue;
        }
        let g = core.gcd(&c);
        core = (&core * &c).exact_div(&g).monic();
    }
    (v, core)
}

/// Determinant over `K`: clear denominators at a common level, eliminate
/// over `Q[u]`, and divide back.
fn determinant(m: Vec<Vec<KScalar>>) -> KScalar {
    let n = m.len();
    if n == 0 {
        return KScalar::one();
    }
    let level = m
        .iter()
        .flatten()
        .fold(1u64, |l, x| num::integer::lcm(l, x.level()));
    let lifted: Vec<Vec<KScalar>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.lift(level)).collect())
        .collect();
    let (v, core) = common_denominator(lifted.iter().flatten().map(|x| x.den()));
    let denom = core.shift(v);
    let cleared = lifted
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    if x.is_zero() {
                        QPoly::zero()
                    } else {
                        &x.num().clone() * &denom.exact_div(x.den())
                    }
                })
                .collect()
        })
        .collect();
    let det = bareiss(cleared);
    if det.is_zero() {
        return KScalar::zero();
    }
    // only factors of `core` and powers of u can cancel against `denom^n`
    let mut num = det;
    let mut u_power = v * n;
    let cancel = num.valuation().unwrap_or(0).min(u_power);
    num = num.unshift(cancel);
    u_power -= cancel;
    let mut den = core.pow(n as u32);
    let mut probe = core;
    while !probe.is_constant() {
        let g = num.gcd(&probe);
        if g.is_constant() {
            break;
        }
        num = num.exact_div(&g);
        den = den.exact_div(&g);
        probe = den.gcd(&g);
    }
    KScalar::from_coprime_parts(num, den.shift(u_power), level).at_min_level()
}

/// The primes `2^62 − k` for these offsets, used for multimodular
/// determinant expansions.
const PRIME_OFFSETS: [u64; 48] = [
    57, 87, 117, 143, 153, 167, 171, 195, 203, 273, 287, 317, 443, 483, 495, 575, 581, 603, 633,
    663, 765, 773, 777, 791, 813, 831, 923, 981, 993, 1001, 1007, 1017, 1197, 1241, 1293, 1353,
    1433, 1515, 1553, 1575, 1581, 1595, 1617, 1673, 1697, 1701, 1703, 1823,
];

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Truncated product in `F_q[u] / (u^p)`.
fn mul_trunc_mod(a: &[u64], b: &[u64], p: usize, q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(p);
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = (out[i + j] + mul_mod(x, y, q)) % q;
        }
    }
    out
}

/// Determinant over `F_q[u] / (u^p)`, expanding along rows over subsets
/// of used columns so that no division is needed.
fn determinant_mod(m: &[Vec<Vec<u64>>], p: usize, q: u64) -> Vec<u64> {
    let n = m.len();
    let mut layer: HashMap<u32, Vec<u64>> = HashMap::from([(0u32, vec![1u64])]);
    for row in m {
        let mut next: HashMap<u32, Vec<u64>> = HashMap::new();
        for (mask, acc) in &layer {
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) != 0 || entry.is_empty() {
                    continue;
                }
                let term = mul_trunc_mod(acc, entry, p, q);
                let negate = (mask >> (j + 1)).count_ones() % 2 == 1;
                let slot = next.entry(mask | (1 << j)).or_default();
                if slot.len() < term.len() {
                    slot.resize(term.len(), 0);
                }
                for (s, t) in slot.iter_mut().zip(term) {
                    *s = if negate { (*s + q - t) % q } else { (*s + t) % q };
                }
            }
        }
        layer = next;
    }
    layer.remove(&((1u32 << n) - 1)).unwrap_or_default()
}

/// Valuation (in `t`-units) of the determinant of a matrix over `K`, or
/// `None` when it vanishes.
///
/// Each row is shifted to valuation zero and multiplied by a unit of
/// `Q[[u]]` and an integer so that its entries become integer polynomials;
/// none of this moves the valuation. Every coefficient of the resulting
/// determinant is bounded by the product of the row norms, so it vanishes
/// exactly when it vanishes modulo enough primes. The expansion runs modulo
/// `u^p` for doubling `p`, and the degree bound of the entries certifies a
/// zero determinant.
fn determinant_ord(m: &[Vec<KScalar>]) -> Option<Rational> {
    let n = m.len();
    if n > 20 {
        return determinant(m.to_vec()).ord();
    }
    let level = m
        .iter()
        .flatten()
        .fold(1u64, |l, x| num::integer::lcm(l, x.level()));
    let mut shift_total = 0i64;
    let mut rows: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(n);
    let mut bound = 0usize;
    let mut height = BigInt::one();
    for row in m {
        let lifted: Vec<KScalar> = row.iter().map(|x| x.lift(level)).collect();
        let low = lifted.iter().filter_map(|x| x.ord_u()).min()?;
        shift_total += low;
        let (_, units) = common_denominator(lifted.iter().map(|x| x.den()));
        let polys: Vec<QPoly> = lifted
            .iter()
            .map(|x| match x.ord_u() {
                None => QPoly::zero(),
                Some(o) => {
                    let vn = x.num().valuation().unwrap_or(0);
                    let vd = x.den().valuation().unwrap_or(0);
                    let unit_den = x.den().unshift(vd);
                    (&x.num().unshift(vn) * &units.exact_div(&unit_den)).shift((o - low) as usize)
                }
            })
            .collect();
        let scale = polys
            .iter()
            .flat_map(|p| p.coeffs().iter())
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        bound += polys.iter().map(|p| p.deg()).max().unwrap_or(0);
        let ints: Vec<Vec<BigInt>> = polys
            .iter()
            .map(|p| p.coeffs().iter().map(|c| (c * &scale).to_integer()).collect())
            .collect();
        let norm = ints.iter().flatten().fold(BigInt::zero(), |acc, c| acc + c.abs());
        height *= norm;
        rows.push(ints);
    }
    // each prime exceeds 2^61
    let needed = (height.bits() as usize) / 61 + 1;
    if needed > PRIME_OFFSETS.len() {
        return determinant(m.to_vec()).ord();
    }
    let reduced: Vec<(u64, Vec<Vec<Vec<u64>>>)> = PRIME_OFFSETS[..needed]
        .iter()
        .map(|k| {
            let q = (1u64 << 62) - k;
            let qb = BigInt::from(q);
            let rows_q = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| {
                            let v: Vec<u64> = p
                                .iter()
                                .map(|c| c.mod_floor(&qb).to_u64().expect("reduced mod q"))
                                .collect();
                            if v.iter().all(|&c| c == 0) {
                                Vec::new()
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect();
            (q, rows_q)
        })
        .collect();
    let mut p = 8usize;
    loop {
        let val = reduced
            .iter()
            .filter_map(|(q, rows_q)| {
                determinant_mod(rows_q, p, *q).iter().position(|&c| c != 0)
            })
            .min();
        if let Some(val) = val {
            let ord_u = val as i64 + shift_total;
            return Some(Rational::new(ord_u.into(), (level as i64).into()));
        }
        if p > bound {
            return None;
        }
        p = (2 * p).min(bound + 1);
    }
}

/// `ord` of the resultant of two binary forms, or `None` when the forms
/// share a root. Much cheaper than the exact [`resultant`].
pub fn resultant_ord(f: &[KScalar], g: &[KScalar]) -> Option<Rational> {
    determinant_ord(&sylvester(f, g))
}

fn sylvester(f: &[KScalar], g: &[KScalar]) -> Vec<Vec<KScalar>> {
    assert_eq!(f.len(), g.len());
    let d = f.len() - 1;
    let n = 2 * d;
    let mut rows = Vec::with_capacity(n);
    for (src, count) in [(f, d), (g, d)] {
        for shift in 0..count {
            let mut row = vec![KScalar::zero(); n];
            for (k, c) in src.iter().rev().enumerate() {
                row[shift + k] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Resultant of the binary forms with coefficient vectors `f`, `g` (both of
/// formal degree `d = len − 1`), as the `2d × 2d` Sylvester determinant.
pub fn resultant(f: &[KScalar], g: &[KScalar]) -> KScalar {
    determinant(sylvester(f, g))
}

/// `φ ∘ ψ`.
pub fn compose(phi: &RationalMapK, psi: &RationalMapK) -> RationalMapK {
    let d = phi.degree();
    let e = psi.degree();
    let len = d * e + 1;
    let p_pows = kpoly_powers(&psi.num, d);
    let q_pows = kpoly_powers(&psi.den, d);
    let num = homogeneous_substitute(&phi.num, &p_pows, &q_pows, len);
    let den = homogeneous_substitute(&phi.den, &p_pows, &q_pows, len);
    RationalMapK::new_unchecked(num, den)
}

/// `φ^n`, refusing iterates whose degree exceeds `cap`.
pub fn iterate_capped(phi: &RationalMapK, n: u32, cap: u64) -> Result<RationalMapK> {
    if n == 0 {
        return Err(Error::InvalidInput("iterate count must be at least 1".into()));
    }
    let degree = (phi.degree() as u64).checked_pow(n).unwrap_or(u64::MAX);
    if degree > cap {
        return Err(Error::IterationCapExceeded { degree, cap });
    }
    let mut out = phi.clone();
    for _ in 1..n {
        out = compose(phi, &out);
    }
    Ok(out)
}

pub fn iterate(phi: &RationalMapK, n: u32) -> Result<RationalMapK> {
    iterate_capped(phi, n, DEFAULT_ITERATION_CAP)
}

/// `L ∘ φ ∘ R` for Möbius maps `L`, `R`.
pub fn transform(left: &Mobius, phi: &RationalMapK, right: &Mobius) -> RationalMapK {
    let d = phi.degree();
    let [[a, b], [c, dd]] = &right.m;
    let p_pows = kpoly_powers(&[b.clone(), a.clone()], d);
    let q_pows = kpoly_powers(&[dd.clone(), c.clone()], d);
    let p = homogeneous_substitute(&phi.num, &p_pows, &q_pows, d + 1);
    let q = homogeneous_substitute(&phi.den, &p_pows, &q_pows, d + 1);
    let [[la, lb], [lc, ld]] = &left.m;
    let mut num = vec![KScalar::zero(); d + 1];
    let mut den = vec![KScalar::zero(); d + 1];
    kpoly_add_scaled(&mut num, la, &p);
    kpoly_add_scaled(&mut num, lb, &q);
    kpoly_add_scaled(&mut den, lc, &p);
    kpoly_add_scaled(&mut den, ld, &q);
    RationalMapK::new_unchecked(num, den)
}

/// `M^{-1} ∘ φ ∘ M`.
pub fn conjugate(m: &Mobius, phi: &RationalMapK) -> RationalMapK {
    transform(&m.inverse(), phi, m)
}

/// Minimal valuation over all `2d + 2` coefficients.
pub fn min_ord(phi: &RationalMapK) -> Rational {
    phi.num
        .iter()
        .chain(phi.den.iter())
        .filter_map(|c| c.ord())
        .min()
        .expect("a map has a nonzero coefficient")
}

/// Coefficients rescaled by `t^{-min ord}`: all integral, at least one a
/// unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalLift {
    pub num: Vec<KScalar>,
    pub den: Vec<KScalar>,
}

pub fn minimal_lift(phi: &RationalMapK) -> MinimalLift {
    let m = min_ord(phi);
    if m.is_zero() {
        return MinimalLift {
            num: phi.num.clone(),
            den: phi.den.clone(),
        };
    }
    let scale = KScalar::t_pow(&-m);
    MinimalLift {
        num: phi.num.iter().map(|c| c * &scale).collect(),
        den: phi.den.iter().map(|c| c * &scale).collect(),
    }
}

/// The reduced map `ζ ↦ F̃(1,ζ)/G̃(1,ζ)`, or its constant value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tilde {
    Map {
        num: HomogeneousForm,
        den: HomogeneousForm,
    },
    Constant(ResScalar),
}

impl Tilde {
    pub fn degree(&self) -> usize {
        match self {
            Tilde::Map { num, .. } => num.degree(),
            Tilde::Constant(_) => 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Tilde::Constant(_))
    }

    /// Renders as `num/den` in `z`, or the constant.
    pub fn display(&self) -> String {
        match self {
            Tilde::Constant(c) => c.to_string(),
            Tilde::Map { num, den } => format!("({})/({})", num.display(), den.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffReduction {
    pub reduced_num: HomogeneousForm,
    pub reduced_den: HomogeneousForm,
    pub h: HomogeneousForm,
    pub tilde: Tilde,
}

impl CoeffReduction {
    pub fn tilde_degree(&self) -> usize {
        self.tilde.degree()
    }
}

pub fn coeff_reduction(phi: &RationalMapK) -> CoeffReduction {
    let lift = minimal_lift(phi);
    let reduce = |v: &[KScalar]| HomogeneousForm::new(v.iter().map(|c| c.residue_finite()).collect());
    let reduced_num = reduce(&lift.num);
    let reduced_den = reduce(&lift.den);
    let h = homogeneous_gcd(&reduced_num, &reduced_den).expect("a minimal lift has a unit coefficient");
    let tn = reduced_num.exact_div(&h);
    let td = reduced_den.exact_div(&h);
    let tilde = if tn.degree() == 0 {
        let (n0, d0) = (&tn.coeffs()[0], &td.coeffs()[0]);
        if d0.is_zero() {
            Tilde::Constant(ResScalar::Infinity)
        } else {
            Tilde::Constant(ResScalar::Finite(n0 / d0))
        }
    } else {
        Tilde::Map { num: tn, den: td }
    };
    CoeffReduction {
        reduced_num,
        reduced_den,
        h,
        tilde,
    }
}

/// The intrinsic reduction of `φ` at a type II point, read off the
/// coefficient reduction of the conjugate by the canonical chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntrinsicReduction {
    pub at: TypeIIPoint,
    pub degree: usize,
    pub reduction: CoeffReduction,
    pub depths: DepthDivisor,
}

/// A rational-or-Galois class of directions carrying positive depth, split
/// so that every root in it is uniformly fixed or not fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthPiece {
    pub class: DirectionClass,
    pub depth: usize,
    pub fixed: bool,
}

impl IntrinsicReduction {
    pub fn fixes_point(&self) -> bool {
        !self.reduction.tilde.is_constant()
    }

    /// The tangent map, when the point is fixed.
    pub fn tangent(&self) -> Option<(&HomogeneousForm, &HomogeneousForm)> {
        match &self.reduction.tilde {
            Tilde::Map { num, den } => Some((num, den)),
            Tilde::Constant(_) => None,
        }
    }

    /// Direction containing the image point, when the point is moved.
    pub fn image_direction(&self) -> Option<DirectionClass> {
        match &self.reduction.tilde {
            Tilde::Constant(c) => Some(DirectionClass::from_residue(c)),
            Tilde::Map { .. } => None,
        }
    }

    pub fn local_degree(&self) -> Option<usize> {
        self.fixes_point().then(|| self.reduction.tilde_degree())
    }

    pub fn totally_invariant(&self) -> bool {
        self.reduction.h.degree() == 0
    }

    /// Roots of this form are the fixed directions of the tangent map; the
    /// zero form means every direction is fixed.
    pub fn fixed_point_form(&self) -> Option<HomogeneousForm> {
        self.tangent()
            .map(|(n, d)| HomogeneousForm::fixed_point_form(n, d))
    }

    pub fn depth(&self, class: &DirectionClass) -> Result<usize> {
        self.depths.depth_at(class)
    }

    /// Whether the intrinsic reduction maps the direction to itself. A
    /// `Factor` class must be uniformly fixed or uniformly moved.
    pub fn is_fixed_direction(&self, class: &DirectionClass) -> Result<bool> {
        match (self.fixed_point_form(), class) {
            (None, c) => Ok(Some(c.clone()) == self.image_direction()),
            (Some(fix), _) if fix.is_zero() => Ok(true),
            (Some(fix), DirectionClass::Infinity) => Ok(fix.vanishes_at(&ResScalar::Infinity)),
            (Some(fix), DirectionClass::Finite(c)) => {
                Ok(fix.vanishes_at(&ResScalar::Finite(c.clone())))
            }
            (Some(fix), DirectionClass::Factor(p)) => {
                let g = p.gcd(&fix.dehomogenize());
                if g.is_constant() {
                    Ok(false)
                } else if g.deg() == p.deg() {
                    Ok(true)
                } else {
                    Err(Error::AmbiguousClass)
                }
            }
        }
    }

    /// All directions of positive depth, grouped into classes that are
    /// uniform in both depth and fixedness.
    pub fn pieces(&self) -> Vec<DepthPiece> {
        let mut out = Vec::new();
        let fix = self.fixed_point_form();
        let image = self.image_direction();
        for (s, depth) in self.depths.parts() {
            let fixed_part = match (&fix, &image) {
                (Some(f), _) if f.is_zero() => s.clone(),
                (Some(f), _) => s.gcd(&f.dehomogenize()),
                (None, Some(DirectionClass::Finite(c))) if s.eval(c).is_zero() => {
                    QPoly::linear_root(c)
                }
                _ => QPoly::one(),
            };
            let moved_part = s.exact_div(&fixed_part);
            for (p, fixed) in [(fixed_part, true), (moved_part, false)] {
                if p.is_constant() {
                    continue;
                }
                out.push(DepthPiece {
                    class: DirectionClass::from_poly(&p).expect("divisors of squarefree parts"),
                    depth: *depth,
                    fixed,
                });
            }
        }
        if self.depths.inf_mult() > 0 {
            let fixed = self
                .is_fixed_direction(&DirectionClass::Infinity)
                .expect("infinity is never ambiguous");
            out.push(DepthPiece {
                class: DirectionClass::Infinity,
                depth: self.depths.inf_mult(),
                fixed,
            });
        }
        out
    }
}

pub fn intrinsic_data(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<IntrinsicReduction> {
    if phi.degree() < 2 {
        return Err(Error::InvalidInput("dynamical operations need degree at least 2".into()));
    }
    let psi = conjugate(&chart(xi)?, phi);
    Ok(reduction_data(&psi, xi.clone()))
}

/// Intrinsic data of an already-charted map, labelled with `at`.
pub(crate) fn reduction_data(psi: &RationalMapK, at: TypeIIPoint) -> IntrinsicReduction {
    let reduction = coeff_reduction(psi);
    let depths = squarefree_decomposition(&reduction.h).expect("H is a nonzero form");
    IntrinsicReduction {
        at,
        degree: psi.degree(),
        reduction,
        depths,
    }
}

pub fn depth(phi: &RationalMapK, xi: &TypeIIPoint, class: &DirectionClass) -> Result<usize> {
    intrinsic_data(phi, xi)?.depth(class)
}

pub fn is_fixed_direction(
    phi: &RationalMapK,
    xi: &TypeIIPoint,
    class: &DirectionClass,
) -> Result<bool> {
    intrinsic_data(phi, xi)?.is_fixed_direction(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};

    fn t() -> KScalar {
        KScalar::t()
    }
    fn k(n: i64) -> KScalar {
        KScalar::from_int(n)
    }

    pub(crate) fn tz2() -> RationalMapK {
        RationalMapK::new(vec![k(0), k(0), t()], vec![k(1), k(0), k(0)]).unwrap()
    }
    fn z2() -> RationalMapK {
        RationalMapK::from_ints(&[0, 0, 1], &[1, 0, 0]).unwrap()
    }
    fn shifted() -> RationalMapK {
        // (t z^2 + 1)/t
        RationalMapK::new(vec![k(1), k(0), t()], vec![t(), k(0), k(0)]).unwrap()
    }
    fn zsq_minus_t_over_z() -> RationalMapK {
        RationalMapK::new(vec![-t(), k(0), k(1)], vec![k(0), k(1), k(0)]).unwrap()
    }

    #[test]
    fn make_map_examples() {
        assert_eq!(tz2().degree(), 2);
        assert_eq!(shifted().degree(), 2);
        assert_eq!(
            RationalMapK::from_ints(&[1, 0, 1], &[1, 0, 1]),
            Err(Error::DegenerateMap)
        );
        // degree drop: both leading coefficients vanish
        assert_eq!(
            RationalMapK::from_ints(&[1, 1, 0], &[1, 0, 0]),
            Err(Error::DegenerateMap)
        );
    }

    #[test]
    fn composition_examples() {
        let it = iterate(&tz2(), 2).unwrap();
        let expected = RationalMapK::new(
            vec![k(0), k(0), k(0), k(0), t().pow(3)],
            vec![k(1), k(0), k(0), k(0), k(0)],
        )
        .unwrap();
        assert_eq!(it, expected);
        assert_eq!(iterate(&shifted(), 1).unwrap(), shifted());
        let z4 = RationalMapK::from_ints(&[0, 0, 0, 0, 1], &[1, 0, 0, 0, 0]).unwrap();
        assert_eq!(compose(&z2(), &z2()), z4);
        assert!(matches!(
            iterate(&z2(), 13),
            Err(Error::IterationCapExceeded { .. })
        ));
    }

    #[test]
    fn conjugation_examples() {
        let m = chart(&TypeIIPoint::new(KScalar::zero(), int(-1))).unwrap();
        let psi = conjugate(&m, &tz2());
        let lift = minimal_lift(&psi);
        let w2 = RationalMapK::from_ints(&[0, 0, 1], &[1, 0, 0]).unwrap();
        let red = coeff_reduction(&psi);
        assert_eq!(red.tilde, coeff_reduction(&w2).tilde);
        assert!(lift.num[2].is_one() || lift.den[0].is_one());

        assert_eq!(conjugate(&Mobius::identity(), &tz2()), tz2());

        let m = chart(&TypeIIPoint::new(KScalar::zero(), rat(1, 2))).unwrap();
        let psi = conjugate(&m, &zsq_minus_t_over_z());
        // (w^2 - 1)/w up to a common scalar
        let red = coeff_reduction(&psi);
        assert_eq!(red.reduced_num, HomogeneousForm::from_ints(&[-1, 0, 1]).monic().mul(&HomogeneousForm::from_ints(&[1])));
        assert_eq!(red.h.degree(), 0);
    }

    #[test]
    fn minimal_lift_examples() {
        let l = minimal_lift(&tz2());
        assert_eq!(l.num, vec![k(0), k(0), t()]);
        // (t z^2)/t written with a common t
        let phi = RationalMapK::new(vec![k(0), k(0), t()], vec![t(), k(0), k(0)]).unwrap();
        let l = minimal_lift(&phi);
        assert_eq!(l.num, vec![k(0), k(0), k(1)]);
        assert_eq!(l.den, vec![k(1), k(0), k(0)]);
        let l = minimal_lift(&shifted());
        assert_eq!(l.num, vec![k(1), k(0), t()]);
    }

    #[test]
    fn coeff_reduction_examples() {
        let r = coeff_reduction(&tz2());
        assert_eq!(r.h, HomogeneousForm::from_ints(&[1, 0, 0]));
        assert_eq!(r.tilde, Tilde::Constant(ResScalar::Finite(int(0))));
        let r = coeff_reduction(&z2());
        assert_eq!(r.h.degree(), 0);
        assert_eq!(r.tilde_degree(), 2);
        let r = coeff_reduction(&zsq_minus_t_over_z());
        assert_eq!(r.h, HomogeneousForm::from_ints(&[0, 1]));
        assert_eq!(
            r.tilde,
            Tilde::Map {
                num: HomogeneousForm::from_ints(&[0, 1]),
                den: HomogeneousForm::from_ints(&[1, 0]),
            }
        );
    }

    #[test]
    fn intrinsic_examples() {
        let g = TypeIIPoint::gauss();
        let ir = intrinsic_data(&tz2(), &g).unwrap();
        assert!(!ir.fixes_point());
        assert_eq!(ir.image_direction(), Some(DirectionClass::Finite(int(0))));
        assert_eq!(ir.depths.inf_mult(), 2);
        assert!(!ir.totally_invariant());

        let ir = intrinsic_data(&z2(), &g).unwrap();
        assert!(ir.fixes_point());
        assert_eq!(ir.local_degree(), Some(2));
        assert!(ir.depths.is_empty());
        assert!(ir.totally_invariant());

        let xi = TypeIIPoint::new(KScalar::zero(), rat(-1, 2));
        let ir = intrinsic_data(&shifted(), &xi).unwrap();
        assert!(!ir.fixes_point());
        assert_eq!(ir.image_direction(), Some(DirectionClass::Infinity));
        let c = DirectionClass::from_poly(&QPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(ir.depth(&c).unwrap(), 1);
        assert_eq!(ir.depths.total(), 2);
        assert!(!ir.totally_invariant());
    }

    #[test]
    fn depth_and_fixedness_examples() {
        let g = TypeIIPoint::gauss();
        assert_eq!(depth(&tz2(), &g, &DirectionClass::Infinity).unwrap(), 2);
        assert_eq!(depth(&tz2(), &g, &DirectionClass::Finite(int(5))).unwrap(), 0);
        let f = zsq_minus_t_over_z();
        assert_eq!(depth(&f, &g, &DirectionClass::Finite(int(0))).unwrap(), 1);
        assert!(is_fixed_direction(&f, &g, &DirectionClass::Finite(int(0))).unwrap());
        assert!(!is_fixed_direction(&tz2(), &g, &DirectionClass::Infinity).unwrap());
        assert!(is_fixed_direction(&z2(), &g, &DirectionClass::Finite(int(1))).unwrap());
        assert!(!is_fixed_direction(&z2(), &g, &DirectionClass::Finite(int(2))).unwrap());
    }

    #[test]
    fn resultant_of_simple_pairs() {
        assert_eq!(tz2().resultant().ord(), Some(int(2)));
        assert_eq!(shifted().resultant().ord(), Some(int(4)));
        assert_eq!(z2().resultant().ord(), Some(int(0)));
        for phi in [tz2(), shifted(), z2()] {
            assert_eq!(Some(phi.resultant_ord()), phi.resultant().ord());
        }
    }

    mod resultant_valuation {
        use super::*;
        use crate::berkspace::Mobius;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = KScalar> {
            (
                1u64..=3,
                prop::collection::vec((-4i64..=4, -4i64..=6), 0..3),
            )
                .prop_map(|(n, terms)| {
                    terms.into_iter().fold(KScalar::zero(), |acc, (c, e)| {
                        &acc + &(&KScalar::from_int(c) * &KScalar::u_pow(e, n))
                    })
                })
        }

        fn quadratic() -> impl Strategy<Value = RationalMapK> {
            (prop::collection::vec(scalar(), 3), prop::collection::vec(scalar(), 3))
                .prop_filter_map("degenerate", |(num, den)| RationalMapK::new(num, den).ok())
        }

        fn unit() -> impl Strategy<Value = Mobius> {
            (prop::array::uniform4(-3i64..=3), prop::array::uniform4(-3i64..=3))
                .prop_filter_map("singular reduction", |(r, h)| {
                    if r[0] * r[3] - r[1] * r[2] == 0 {
                        return None;
                    }
                    let e = |i: usize| &k(r[i]) + &(&k(h[i]) * &t());
                    Mobius::new(e(0), e(1), e(2), e(3)).ok()
                })
        }

        fn times_linear(f: &[KScalar], root: &KScalar) -> Vec<KScalar> {
            let lin = [-root, KScalar::one()];
            let mut out = vec![KScalar::zero(); f.len() + 1];
            for (i, a) in f.iter().enumerate() {
                for (j, b) in lin.iter().enumerate() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

            #[test]
            fn matches_exact_determinant(phi in quadratic(), u in unit()) {
                let psi = conjugate(&u, &phi);
                prop_assert_eq!(
                    resultant_ord(psi.num(), psi.den()),
                    resultant(psi.num(), psi.den()).ord()
                );
            }

            #[test]
            fn shared_root_vanishes(
                f in prop::collection::vec(-3i64..=3, 2),
                g in prop::collection::vec(-3i64..=3, 2),
                e in -3i64..=3,
                n in 1u64..=3,
            ) {
                let root = &KScalar::u_pow(e, n) + &KScalar::one();
                let lift = |c: &[i64]| c.iter().map(|&x| k(x)).collect::<Vec<_>>();
                let f = times_linear(&lift(&f), &root);
                let g = times_linear(&lift(&g), &root);
                prop_assert_eq!(resultant_ord(&f, &g), None);
            }
        }

        #[test]
        fn constant_pair() {
            // z^2 against 1, both as quadratic forms
            let f = [k(0), k(0), k(1)];
            let g = [k(1), k(0), k(0)];
            assert_eq!(resultant_ord(&f, &g), Some(int(0)));
        }
    }
}
