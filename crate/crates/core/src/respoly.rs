//! Binary forms over the residue field `k = Q` and their depth divisors.
//!
//! A homogeneous form of degree `d` in `X0, X1` is identified with the pair
//! (dehomogenized polynomial in `ζ = X1/X0`, multiplicity of the point at
//! infinity `[0:1]`, i.e. the power of `X0` dividing it). Root
//! multiplicities are read from squarefree decompositions; no factorization
//! into irreducibles is ever needed since squarefree over `Q` stays
//! squarefree over its algebraic closure.

use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{QPoly, Rational, ResScalar};

/// `Σ c_i X0^{d-i} X1^i`, stored as `c_0..c_d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    coeffs: Vec<Rational>,
}

impl HomogeneousForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a form needs at least one coefficient");
        HomogeneousForm { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        HomogeneousForm {
            coeffs: vec![Rational::zero(); degree + 1],
        }
    }

    /// `X0^{inf} · P(X0, X1)` where `P` homogenizes `p` to degree `deg p`.
    pub fn from_parts(p: &QPoly, inf: usize) -> Self {
        let mut coeffs = p.coeffs().to_vec();
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        coeffs.resize(p.deg() + 1 + inf, Rational::zero());
        HomogeneousForm { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        HomogeneousForm::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `F(1, ζ)`.
    pub fn dehomogenize(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    /// Multiplicity of `[0:1]` as a root (`None` for the zero form).
    pub fn inf_multiplicity(&self) -> Option<usize> {
        let p = self.dehomogenize();
        p.degree().map(|deg| self.degree() - deg)
    }

    /// Value at `[x0 : x1]`.
    pub fn eval(&self, x0: &Rational, x1: &Rational) -> Rational {
        let d = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * num::pow(x0.clone(), d - i) * num::pow(x1.clone(), i))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Whether the point `a ∈ P^1(k)` is a root.
    pub fn vanishes_at(&self, a: &ResScalar) -> bool {
        match a {
            ResScalar::Finite(c) => self.eval(&Rational::one(), c).is_zero(),
            ResScalar::Infinity => self.coeffs.last().unwrap().is_zero(),
        }
    }

    /// Exact quotient by a form dividing `self`.
    pub fn exact_div(&self, divisor: &HomogeneousForm) -> HomogeneousForm {
        if self.is_zero() {
            return HomogeneousForm::zero(self.degree() - divisor.degree());
        }
        let q = self.dehomogenize().exact_div(&divisor.dehomogenize());
        let inf = self.inf_multiplicity().unwrap() - divisor.inf_multiplicity().unwrap();
        HomogeneousForm::from_parts(&q, inf)
    }

    /// Product of forms.
    pub fn mul(&self, other: &HomogeneousForm) -> HomogeneousForm {
        let mut coeffs = vec![Rational::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        HomogeneousForm { coeffs }
    }

    /// Same form, normalized monic in `ζ` (leading nonzero coefficient 1).
    pub fn monic(&self) -> HomogeneousForm {
        match self.coeffs.iter().rev().find(|c| !c.is_zero()) {
            Some(lead) => {
                let inv = lead.recip();
                HomogeneousForm {
                    coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
                }
            }
            None => self.clone(),
        }
    }

    /// `X0·F − X1·G`, the form whose roots are the fixed points of the map
    /// `[X0:X1] ↦ [G:F]` (i.e. `ζ ↦ F(1,ζ)/G(1,ζ)`).
    pub fn fixed_point_form(num: &HomogeneousForm, den: &HomogeneousForm) -> HomogeneousForm {
        assert_eq!(num.degree(), den.degree());
        let e = num.degree();
        let mut coeffs = vec![Rational::zero(); e + 2];
        for i in 0..=e {
            coeffs[i] += &num.coeffs[i];
            coeffs[i + 1] -= &den.coeffs[i];
        }
        HomogeneousForm { coeffs }
    }

    /// Human-readable form in `X0, X1`.
    pub fn display(&self) -> String {
        let p = self.dehomogenize();
        let inf = self.inf_multiplicity();
        match inf {
            None => "0".into(),
            Some(0) => p.display_in("z"),
            Some(k) => {
                let x0 = if k == 1 { "X0".to_string() } else { format!("X0^{k}") };
                if p.is_constant() {
                    let c = p.coeff(0);
                    if c.is_one() {
                        x0
                    } else {
                        format!("{c}*{x0}")
                    }
                } else {
                    format!("{x0}*({})", p.display_in("z"))
                }
            }
        }
    }
}

impl fmt::Debug for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Monic GCD of two forms of equal degree, with `GCD(0, A) = A`.
pub fn homogeneous_gcd(f: &HomogeneousForm, g: &HomogeneousForm) -> Result<HomogeneousForm> {
    if f.degree() != g.degree() {
        return Err(Error::InvalidInput(format!(
            "forms of different degree {} and {}",
            f.degree(),
            g.degree()
        )));
    }
    match (f.inf_multiplicity(), g.inf_multiplicity()) {
        (None, None) => Err(Error::BothFormsZero),
        (None, Some(_)) => Ok(g.monic()),
        (Some(_), None) => Ok(f.monic()),
        (Some(i), Some(j)) => {
            let p = f.dehomogenize().gcd(&g.dehomogenize());
            Ok(HomogeneousForm::from_parts(&p, i.min(j)))
        }
    }
}

/// A point or Galois-stable set of points of `P^1(k̄)` at which depths are
/// read, in a fixed chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum DirectionClass {
    Finite(Rational),
    Infinity,
    /// The roots of a monic squarefree polynomial of degree ≥ 2.
    Factor(QPoly),
}

impl DirectionClass {
    /// Class of the roots of `p`; a linear `p` becomes a `Finite` class.
    pub fn from_poly(p: &QPoly) -> Result<DirectionClass> {
        let p = p.monic();
        match p.degree() {
            None | Some(0) => Err(Error::InvalidInput("a class polynomial must be nonconstant".into())),
            Some(1) => Ok(DirectionClass::Finite(-p.coeff(0))),
            Some(_) => {
                if !p.gcd(&p.derivative()).is_one() {
                    return Err(Error::InvalidInput(format!(
                        "class polynomial {} is not squarefree",
                        p.display_in("z")
                    )));
                }
                Ok(DirectionClass::Factor(p))
            }
        }
    }

    pub fn from_residue(r: &ResScalar) -> DirectionClass {
        match r {
            ResScalar::Finite(c) => DirectionClass::Finite(c.clone()),
            ResScalar::Infinity => DirectionClass::Infinity,
        }
    }

    /// Number of points of `P^1(k̄)` in the class.
    pub fn degree(&self) -> usize {
        match self {
            DirectionClass::Factor(p) => p.deg(),
            _ => 1,
        }
    }

    /// The monic polynomial whose roots form the class (`None` for `∞`).
    pub fn poly(&self) -> Option<QPoly> {
        match self {
            DirectionClass::Finite(c) => Some(QPoly::linear_root(c)),
            DirectionClass::Infinity => None,
            DirectionClass::Factor(p) => Some(p.clone()),
        }
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self, DirectionClass::Factor(_))
    }
}

impl fmt::Display for DirectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionClass::Finite(c) => write!(f, "res={c}"),
            DirectionClass::Infinity => write!(f, "inf"),
            DirectionClass::Factor(p) => write!(f, "factor={}", p.display_in("z")),
        }
    }
}

impl fmt::Debug for DirectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Root multiplicities of a nonzero form: pairwise coprime monic squarefree
/// parts `S_i` with multiplicity `i`, and the multiplicity at infinity.
#[derive(Clone, PartialEq, Eq)]
pub struct DepthDivisor {
    parts: Vec<(QPoly, usize)>,
    inf_mult: usize,
}

impl fmt::Debug for DepthDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, i) in &self.parts {
            m.entry(&s.display_in("z"), i);
        }
        if self.inf_mult > 0 {
            m.entry(&"inf", &self.inf_mult);
        }
        m.finish()
    }
}

impl DepthDivisor {
    /// The divisor of a constant form.
    pub fn empty() -> Self {
        DepthDivisor {
            parts: Vec::new(),
            inf_mult: 0,
        }
    }

    pub fn parts(&self) -> &[(QPoly, usize)] {
        &self.parts
    }

    pub fn inf_mult(&self) -> usize {
        self.inf_mult
    }

    /// Degree of the underlying form.
    pub fn total(&self) -> usize {
        self.parts.iter().map(|(s, i)| i * s.deg()).sum::<usize>() + self.inf_mult
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Largest per-root multiplicity.
    pub fn max_depth(&self) -> usize {
        self.parts
            .iter()
            .map(|(_, i)| *i)
            .chain(std::iter::once(self.inf_mult))
            .max()
            .unwrap_or(0)
    }

    /// Multiplies the parts back together (monic in `ζ`).
    pub fn reconstruct(&self) -> HomogeneousForm {
        let p = self
            .parts
            .iter()
            .fold(QPoly::one(), |acc, (s, i)| &acc * &s.pow(*i as u32));
        HomogeneousForm::from_parts(&p, self.inf_mult)
    }

    /// Per-root depth of a class. A `Factor` class meeting two parts is
    /// ambiguous.
    pub fn depth_at(&self, class: &DirectionClass) -> Result<usize> {
        match class {
            DirectionClass::Infinity => Ok(self.inf_mult),
            DirectionClass::Finite(c) => Ok(self
                .parts
                .iter()
                .find(|(s, _)| s.eval(c).is_zero())
                .map(|(_, i)| *i)
                .unwrap_or(0)),
            DirectionClass::Factor(p) => {
                let mut hit = None;
                for (s, i) in &self.parts {
                    let g = s.gcd(p);
                    if g.is_constant() {
                        continue;
                    }
                    if hit.is_some() || g.deg() != p.deg() {
                        return Err(Error::AmbiguousClass);
                    }
                    hit = Some(*i);
                }
                Ok(hit.unwrap_or(0))
            }
        }
    }

    /// Total mass of a class: number of roots times per-root depth.
    pub fn class_mass(&self, class: &DirectionClass) -> Result<usize> {
        Ok(class.degree() * self.depth_at(class)?)
    }

    /// Classes carrying positive depth, one per part (`Finite` for linear
    /// parts) plus `∞`, with their per-root depth.
    pub fn classes(&self) -> Vec<(DirectionClass, usize)> {
        let mut out: Vec<(DirectionClass, usize)> = self
            .parts
            .iter()
            .map(|(s, i)| (DirectionClass::from_poly(s).expect("parts are squarefree"), *i))
            .collect();
        if self.inf_mult > 0 {
            out.push((DirectionClass::Infinity, self.inf_mult));
        }
        out
    }
}

/// Yun's squarefree decomposition, together with the `X0`-power.
pub fn squarefree_decomposition(h: &HomogeneousForm) -> Result<DepthDivisor> {
    let inf_mult = h
        .inf_multiplicity()
        .ok_or_else(|| Error::InvalidInput("squarefree decomposition of the zero form".into()))?;
    let p = h.dehomogenize().monic();
    let mut parts = Vec::new();
    if p.deg() > 0 {
        let dp = p.derivative();
        let a = p.gcd(&dp);
        let mut b = p.exact_div(&a);
        let mut c = dp.exact_div(&a);
        // Yun: d = c - b', then S_i = gcd(b, d)
        let mut i = 1;
        loop {
            let d = &c - &b.derivative();
            let s = b.gcd(&d);
            if !s.is_constant() {
                parts.push((s.clone(), i));
            }
            b = b.exact_div(&s);
            if b.is_constant() {
                break;
            }
            c = d.exact_div(&s);
            i += 1;
        }
    }
    Ok(DepthDivisor { parts, inf_mult })
}

/// A common refinement of the supports of two divisors into pairwise coprime
/// classes, with the mass each divisor puts on each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub classes: Vec<DirectionClass>,
    pub masses: Vec<(usize, usize)>,
}

impl Refinement {
    /// Half the sum of absolute mass differences, unnormalized.
    pub fn l1_half(&self) -> Rational {
        let total: usize = self.masses.iter().map(|(a, b)| a.abs_diff(*b)).sum();
        Rational::new(total.into(), 2.into())
    }
}

/// Splits a list of squarefree polynomials into a pairwise coprime base.
pub fn coprime_base(polys: impl IntoIterator<Item = QPoly>) -> Vec<QPoly> {
    let mut base: Vec<QPoly> = Vec::new();
    for q in polys {
        let mut q = q.monic();
        let mut next = Vec::with_capacity(base.len() + 2);
        for p in base {
            if q.is_constant() {
                next.push(p);
                continue;
            }
            let g = p.gcd(&q);
            if g.is_constant() {
                next.push(p);
                continue;
            }
            let rest = p.exact_div(&g);
            q = q.exact_div(&g);
            next.push(g);
            if !rest.is_constant() {
                next.push(rest);
            }
        }
        if !q.is_constant() {
            next.push(q);
        }
        base = next;
    }
    base
}

pub fn refine_classes(d1: &DepthDivisor, d2: &DepthDivisor) -> Refinement {
    let base = coprime_base(
        d1.parts
            .iter()
            .chain(d2.parts.iter())
            .map(|(s, _)| s.clone()),
    );
    let mut classes = Vec::new();
    let mut masses = Vec::new();
    for p in base {
        let class = DirectionClass::from_poly(&p).expect("base elements are squarefree");
        let m1 = d1.class_mass(&class).expect("refined classes are unambiguous");
        let m2 = d2.class_mass(&class).expect("refined classes are unambiguous");
        classes.push(class);
        masses.push((m1, m2));
    }
    if d1.inf_mult > 0 || d2.inf_mult > 0 {
        classes.push(DirectionClass::Infinity);
        masses.push((d1.inf_mult, d2.inf_mult));
    }
    Refinement { classes, masses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::int;

    fn form(c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::from_ints(c)
    }

    #[test]
    fn gcd_examples() {
        // (0, X0^2) -> X0^2
        let h = homogeneous_gcd(&form(&[0, 0, 0]), &form(&[1, 0, 0])).unwrap();
        assert_eq!(h, form(&[1, 0, 0]));
        // (X0^2 + X1^2, 0) -> X0^2 + X1^2
        let h = homogeneous_gcd(&form(&[1, 0, 1]), &form(&[0, 0, 0])).unwrap();
        assert_eq!(h, form(&[1, 0, 1]));
        // (X1^2, X0 X1) -> X1
        let h = homogeneous_gcd(&form(&[0, 0, 1]), &form(&[0, 1, 0])).unwrap();
        assert_eq!(h, form(&[0, 1]));
        assert_eq!(
            homogeneous_gcd(&form(&[0, 0]), &form(&[0, 0])),
            Err(Error::BothFormsZero)
        );
    }

    #[test]
    fn squarefree_examples() {
        let d = squarefree_decomposition(&form(&[1, 0, 0])).unwrap();
        assert!(d.parts().is_empty());
        assert_eq!(d.inf_mult(), 2);

        // (X0^2 + X1^2)^2 = X0^4 + 2 X0^2 X1^2 + X1^4
        let d = squarefree_decomposition(&form(&[1, 0, 2, 0, 1])).unwrap();
        assert_eq!(d.parts(), &[(QPoly::from_ints(&[1, 0, 1]), 2)]);
        assert_eq!(d.inf_mult(), 0);

        let d = squarefree_decomposition(&form(&[0, 1])).unwrap();
        assert_eq!(d.parts(), &[(QPoly::from_ints(&[0, 1]), 1)]);
    }

    #[test]
    fn depth_examples() {
        let d = squarefree_decomposition(&form(&[1, 0, 0])).unwrap();
        assert_eq!(d.depth_at(&DirectionClass::Infinity).unwrap(), 2);
        assert_eq!(d.depth_at(&DirectionClass::Finite(int(0))).unwrap(), 0);
        let d = squarefree_decomposition(&form(&[1, 0, 2, 0, 1])).unwrap();
        let c = DirectionClass::from_poly(&QPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(d.depth_at(&c).unwrap(), 2);
        assert_eq!(d.class_mass(&c).unwrap(), 4);
    }

    #[test]
    fn ambiguous_factor() {
        // ζ (ζ-1)^2 : factor ζ(ζ-1) straddles two parts
        let h = HomogeneousForm::from_parts(
            &(&QPoly::from_ints(&[0, 1]) * &QPoly::from_ints(&[-1, 1]).pow(2)),
            0,
        );
        let d = squarefree_decomposition(&h).unwrap();
        let c = DirectionClass::from_poly(&QPoly::from_ints(&[0, -1, 1])).unwrap();
        assert_eq!(d.depth_at(&c), Err(Error::AmbiguousClass));
    }

    #[test]
    fn refine_examples() {
        let d1 = squarefree_decomposition(&form(&[0, 1])).unwrap();
        let d2 = squarefree_decomposition(&form(&[0, -1, 1])).unwrap();
        let r = refine_classes(&d1, &d2);
        assert_eq!(r.classes.len(), 2);
        let m0 = r.classes.iter().position(|c| *c == DirectionClass::Finite(int(0))).unwrap();
        let m1 = r.classes.iter().position(|c| *c == DirectionClass::Finite(int(1))).unwrap();
        assert_eq!(r.masses[m0], (1, 1));
        assert_eq!(r.masses[m1], (0, 1));

        let d1 = squarefree_decomposition(&form(&[1, 0, 0])).unwrap();
        let d2 = squarefree_decomposition(&form(&[0, 1, 0])).unwrap();
        let r = refine_classes(&d1, &d2);
        assert_eq!(r.classes, vec![DirectionClass::Finite(int(0)), DirectionClass::Infinity]);
        assert_eq!(r.masses, vec![(0, 1), (2, 1)]);

        let r = refine_classes(&d1, &d1);
        assert_eq!(r.l1_half(), int(0));
    }

    #[test]
    fn class_from_linear_poly_is_finite() {
        let c = DirectionClass::from_poly(&QPoly::from_ints(&[-3, 2])).unwrap();
        assert_eq!(c, DirectionClass::Finite(Rational::new(3.into(), 2.into())));
        assert!(DirectionClass::from_poly(&QPoly::from_ints(&[1, 2, 1])).is_err());
    }

    #[test]
    fn fixed_point_form() {
        // ζ ↦ ζ^2 : fixed points 0, 1, ∞
        let f = HomogeneousForm::fixed_point_form(&form(&[0, 0, 1]), &form(&[1, 0, 0]));
        assert!(f.vanishes_at(&ResScalar::Finite(int(0))));
        assert!(f.vanishes_at(&ResScalar::Finite(int(1))));
        assert!(f.vanishes_at(&ResScalar::Infinity));
        assert!(!f.vanishes_at(&ResScalar::Finite(int(2))));
    }
}
