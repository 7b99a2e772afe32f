//! Complex specializations of a one-parameter family, sampling of their
//! maximal entropy measures by iterated pullback, and comparison of the
//! sampled atoms with the direction measure predicted over `K`.

mod aberth;

use std::fmt;

use num::{ToPrimitive, Zero};
use num_complex::Complex64;

use crate::berkspace::TypeIIPoint;
use crate::equidist::{level_measure, predicted_limit, totally_invariant, DirectionMeasure, Prediction};
use crate::error::{Error, Result};
use crate::redux::RationalMapK;
use crate::respoly::DirectionClass;
use crate::scalars::Rational;

pub use aberth::roots;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const SAMPLE_CAP: u64 = 1 << 16;
/// Relative resultant below which a specialization is refused.
pub const CONDITIONING_THRESHOLD: f64 = 1e-60;

pub fn default_start() -> Complex64 {
    Complex64::new(1.0, 1.0 / 3.0)
}

/// A point of `P^1(C)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CPoint {
    Finite(Complex64),
    Infinity,
}

impl CPoint {
    pub fn norm(&self) -> f64 {
        match self {
            CPoint::Finite(z) => z.norm(),
            CPoint::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            CPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Chordal distance, with `d(z, ∞) = 1/√(1+|z|²)`; at most 1.
pub fn chordal(a: &CPoint, b: &CPoint) -> f64 {
    match (a, b) {
        (CPoint::Infinity, CPoint::Infinity) => 0.0,
        (CPoint::Finite(z), CPoint::Infinity) | (CPoint::Infinity, CPoint::Finite(z)) => {
            1.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (CPoint::Finite(z), CPoint::Finite(w)) => {
            (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
        }
    }
}

/// A rational map with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMap {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl ComplexMap {
    pub fn degree(&self) -> usize {
        self.num.len() - 1
    }

    /// `|Res(F, G)| / max|c|^{2d}`.
    pub fn relative_resultant(&self) -> f64 {
        let scale = self
            .num
            .iter()
            .chain(self.den.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let num: Vec<_> = self.num.iter().map(|c| c / scale).collect();
        let den: Vec<_> = self.den.iter().map(|c| c / scale).collect();
        complex_resultant(&num, &den).norm()
    }

    pub fn eval(&self, z: &CPoint) -> CPoint {
        let d = self.degree();
        let (p, q) = match z {
            CPoint::Finite(z) => (poly_eval(&self.num, *z), poly_eval(&self.den, *z)),
            CPoint::Infinity => (self.num[d], self.den[d]),
        };
        if q.norm() == 0.0 {
            CPoint::Infinity
        } else {
            CPoint::Finite(p / q)
        }
    }

    /// The `d` preimages of `w`, with multiplicity; a degree drop of the
    /// equation puts the missing roots at `∞`.
    pub fn preimages(&self, w: &CPoint, tol: f64) -> Option<Vec<CPoint>> {
        let d = self.degree();
        let mut poly: Vec<Complex64> = match w {
            CPoint::Infinity => self.den.clone(),
            CPoint::Finite(w) => self
                .num
                .iter()
                .zip(&self.den)
                .map(|(b, a)| b - w * a)
                .collect(),
        };
        while poly.len() > 1 && poly.last().is_some_and(|c| c.norm() == 0.0) {
            poly.pop();
        }
        if poly.len() == 1 && poly[0].norm() == 0.0 {
            return None;
        }
        let finite = roots(&poly, tol)?;
        let mut out: Vec<CPoint> = finite.into_iter().map(CPoint::Finite).collect();
        out.resize(d, CPoint::Infinity);
        Some(out)
    }
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, c| acc * z + c)
}

fn complex_resultant(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let d = f.len() - 1;
    let n = 2 * d;
    let mut m = vec![vec![Complex64::zero(); n]; n];
    for shift in 0..d {
        for (k, c) in f.iter().rev().enumerate() {
            m[shift][shift + k] = *c;
        }
        for (k, c) in g.iter().rev().enumerate() {
            m[d + shift][shift + k] = *c;
        }
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("nonempty range");
        if m[pivot][col].norm() == 0.0 {
            return Complex64::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for r in col + 1..n {
            let factor = m[r][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= factor * v;
            }
        }
    }
    det
}

/// Evaluates every coefficient at `t = t0`, with `t^{1/N}` on the principal
/// branch.
pub fn specialize(f: &RationalMapK, t0: Complex64) -> Result<ComplexMap> {
    if t0.norm() == 0.0 {
        return Err(Error::InvalidInput("specialization at t = 0".into()));
    }
    let eval = |v: &[crate::scalars::KScalar]| -> Result<Vec<Complex64>> {
        v.iter()
            .map(|c| c.eval_complex(t0).ok_or(Error::CoefficientPole))
            .collect()
    };
    let g = ComplexMap {
        num: eval(f.num())?,
        den: eval(f.den())?,
    };
    let rel = g.relative_resultant();
    if !(rel > CONDITIONING_THRESHOLD) {
        return Err(Error::IllConditioned(rel));
    }
    Ok(g)
}

/// `d^n` points distributed as `(g^n)^* δ_{z0} / d^n`, with multiplicity.
/// When a level fails to converge the whole pullback is restarted from a
/// slightly perturbed start point.
pub fn pullback_sample(g: &ComplexMap, z0: Complex64, n: u32, tol: f64) -> Result<Vec<CPoint>> {
    let d = g.degree() as u64;
    let size = d.checked_pow(n).unwrap_or(u64::MAX);
    if size > SAMPLE_CAP {
        return Err(Error::IterationCapExceeded {
            degree: size,
            cap: SAMPLE_CAP,
        });
    }
    let mut last_err = None;
    for attempt in 0..4 {
        let start = z0 * Complex64::new(1.0, 1e-3 * attempt as f64);
        match pullback_from(g, start, n, tol) {
            Ok(points) => return Ok(points),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn pullback_from(g: &ComplexMap, z0: Complex64, n: u32, tol: f64) -> Result<Vec<CPoint>> {
    let mut current = vec![CPoint::Finite(z0)];
    for level in 1..=n as usize {
        let mut next = Vec::with_capacity(current.len() * g.degree());
        for w in &current {
            let pre = g.preimages(w, tol).ok_or_else(|| Error::RootFindingFailed {
                level,
                target: w.to_string(),
            })?;
            next.extend(pre);
        }
        current = next;
    }
    Ok(current)
}

/// A union of chordal balls around the given centers.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSet {
    pub label: String,
    pub centers: Vec<CPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomEstimate {
    pub label: String,
    pub centers: Vec<CPoint>,
    pub radius: f64,
    pub mass: f64,
}

/// Fraction of the sample within chordal distance `eps` of each target set.
pub fn atom_estimate(points: &[CPoint], targets: &[TargetSet], eps: f64) -> Result<Vec<AtomEstimate>> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange(format!("epsilon {eps} must be positive")));
    }
    for (i, a) in targets.iter().enumerate() {
        for b in &targets[i + 1..] {
            for p in &a.centers {
                for q in &b.centers {
                    let dist = chordal(p, q);
                    if dist < 2.0 * eps {
                        return Err(Error::TargetsOverlap(dist));
                    }
                }
            }
        }
    }
    let total = points.len().max(1) as f64;
    Ok(targets
        .iter()
        .map(|t| {
            let hits = points
                .iter()
                .filter(|p| t.centers.iter().any(|c| chordal(p, c) < eps))
                .count();
            AtomEstimate {
                label: t.label.clone(),
                centers: t.centers.clone(),
                radius: eps,
                mass: hits as f64 / total,
            }
        })
        .collect())
}

/// Fraction of the sample with `|z| > radius` (including `∞`).
pub fn mass_beyond(points: &[CPoint], radius: f64) -> f64 {
    let hits = points.iter().filter(|p| p.norm() > radius).count();
    hits as f64 / points.len().max(1) as f64
}

/// Where a direction at the Gauss point lands in `P^1(C)` as `t → 0`.
pub fn class_targets(class: &DirectionClass) -> Vec<CPoint> {
    match class {
        DirectionClass::Infinity => vec![CPoint::Infinity],
        DirectionClass::Finite(c) => vec![CPoint::Finite(Complex64::new(
            c.to_f64().unwrap_or(f64::NAN),
            0.0,
        ))],
        DirectionClass::Factor(p) => {
            let coeffs: Vec<Complex64> = p
                .coeffs()
                .iter()
                .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
                .collect();
            roots(&coeffs, DEFAULT_TOLERANCE)
                .unwrap_or_default()
                .into_iter()
                .map(CPoint::Finite)
                .collect()
        }
    }
}

/// What the sampled masses are compared against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// The predicted limit when it is known, otherwise the depth measure
    /// of the highest affordable iterate at the Gauss point.
    Auto,
    Measure(DirectionMeasure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisSource {
    PredictedLimit,
    DepthMeasure { n: u32 },
    User,
}

impl fmt::Display for HypothesisSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisSource::PredictedLimit => write!(f, "predicted_limit"),
            HypothesisSource::DepthMeasure { n } => write!(f, "depth_measure(n={n})"),
            HypothesisSource::User => write!(f, "user"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledLevel {
    pub t: Complex64,
    pub sample_size: usize,
    pub atoms: Vec<AtomEstimate>,
    /// Mass with `|z| > 10`.
    pub mass_beyond_10: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationReport {
    pub hypothesis_source: HypothesisSource,
    pub predicted: Vec<(DirectionClass, Rational)>,
    pub per_t: Vec<SampledLevel>,
    pub max_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerOptions {
    pub n: u32,
    pub eps: f64,
    pub z0: Complex64,
    pub tol: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            n: 12,
            eps: DEFAULT_EPSILON,
            z0: default_start(),
            tol: DEFAULT_TOLERANCE,
        }
    }
}

fn resolve_hypothesis(
    f: &RationalMapK,
    hypothesis: &Hypothesis,
) -> Result<(HypothesisSource, DirectionMeasure)> {
    let gauss = TypeIIPoint::gauss();
    match hypothesis {
        Hypothesis::Measure(m) => Ok((HypothesisSource::User, m.clone())),
        Hypothesis::Auto => match predicted_limit(f, &gauss)? {
            Prediction::Atom(m) => Ok((HypothesisSource::PredictedLimit, m)),
            Prediction::Unknown => {
                let d = f.degree() as u64;
                let n = (1..=4u32)
                    .rev()
                    .find(|&n| d.pow(n) <= 256)
                    .unwrap_or(1);
                Ok((HypothesisSource::DepthMeasure { n }, level_measure(f, &gauss, n)?))
            }
        },
    }
}

pub fn degeneration_report(
    f: &RationalMapK,
    t_values: &[Complex64],
    hypothesis: &Hypothesis,
    options: &SamplerOptions,
) -> Result<DegenerationReport> {
    if t_values.is_empty() {
        return Err(Error::InvalidInput("no t values".into()));
    }
    if totally_invariant(f, &TypeIIPoint::gauss())? {
        return Err(Error::TotallyInvariantPoint);
    }
    let (source, measure) = resolve_hypothesis(f, hypothesis)?;
    let targets: Vec<TargetSet> = measure
        .atoms
        .iter()
        .map(|(c, _)| TargetSet {
            label: c.to_string(),
            centers: class_targets(c),
        })
        .collect();
    let mut per_t = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let g = specialize(f, t)?;
        let points = pullback_sample(&g, options.z0, options.n, options.tol)?;
        let atoms = atom_estimate(&points, &targets, options.eps)?;
        per_t.push(SampledLevel {
            t,
            sample_size: points.len(),
            atoms,
            mass_beyond_10: mass_beyond(&points, 10.0),
        });
    }
    let smallest = per_t
        .iter()
        .min_by(|a, b| a.t.norm().total_cmp(&b.t.norm()))
        .expect("nonempty");
    let max_discrepancy = smallest
        .atoms
        .iter()
        .zip(&measure.atoms)
        .map(|(a, (_, m))| (a.mass - m.to_f64().unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max);
    Ok(DegenerationReport {
        hypothesis_source: source,
        predicted: measure.atoms,
        per_t,
        max_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_map;

    fn map(s: &str) -> RationalMapK {
        parse_map(s).unwrap()
    }
    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn specialize_examples() {
        let g = specialize(&map("t*z^2"), c(0.001)).unwrap();
        assert_eq!(g.num, vec![c(0.0), c(0.0), c(0.001)]);
        assert_eq!(g.den, vec![c(1.0), c(0.0), c(0.0)]);
        let g = specialize(&map("(z^2-t)/z"), c(0.01)).unwrap();
        assert_eq!(g.num, vec![c(-0.01), c(0.0), c(1.0)]);
        assert_eq!(g.den, vec![c(0.0), c(1.0), c(0.0)]);
        assert_eq!(
            specialize(&map("(1/(1-t))*z^2"), c(1.0)),
            Err(Error::CoefficientPole)
        );
    }

    #[test]
    fn sampling_z_squared_lands_on_the_circle() {
        let g = ComplexMap {
            num: vec![c(0.0), c(0.0), c(1.0)],
            den: vec![c(1.0), c(0.0), c(0.0)],
        };
        let pts = pullback_sample(&g, c(1.0), 10, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(pts.len(), 1024);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-9));
        let at_zero = atom_estimate(
            &pts,
            &[TargetSet {
                label: "0".into(),
                centers: vec![CPoint::Finite(c(0.0))],
            }],
            0.1,
        )
        .unwrap();
        assert_eq!(at_zero[0].mass, 0.0);
    }

    #[test]
    fn sampling_tz2_escapes() {
        let g = specialize(&map("t*z^2"), c(0.001)).unwrap();
        let pts = pullback_sample(&g, c(1.0), 12, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(pts.len(), 4096);
        assert!(mass_beyond(&pts, 10.0) >= 0.99);
    }

    #[test]
    fn symmetric_targets_get_equal_mass() {
        let g = specialize(&map("z^2-1"), c(0.5)).unwrap();
        let pts = pullback_sample(&g, default_start(), 10, DEFAULT_TOLERANCE).unwrap();
        let targets = [
            TargetSet {
                label: "1".into(),
                centers: vec![CPoint::Finite(c(1.0))],
            },
            TargetSet {
                label: "-1".into(),
                centers: vec![CPoint::Finite(c(-1.0))],
            },
        ];
        let a = atom_estimate(&pts, &targets, 0.1).unwrap();
        assert!((a[0].mass - a[1].mass).abs() <= 0.02);
    }

    #[test]
    fn overlapping_targets_are_rejected() {
        let targets = [
            TargetSet {
                label: "a".into(),
                centers: vec![CPoint::Finite(c(0.0))],
            },
            TargetSet {
                label: "b".into(),
                centers: vec![CPoint::Finite(c(0.05))],
            },
        ];
        assert!(matches!(
            atom_estimate(&[], &targets, 0.1),
            Err(Error::TargetsOverlap(_))
        ));
    }

    #[test]
    fn chordal_metric_basics() {
        let inf = CPoint::Infinity;
        let z = CPoint::Finite(c(1000.0));
        assert!(chordal(&z, &inf) < 0.0011);
        assert_eq!(chordal(&inf, &inf), 0.0);
        let a = CPoint::Finite(Complex64::new(0.3, -2.0));
        let b = CPoint::Finite(c(7.0));
        assert!((chordal(&a, &b) - chordal(&b, &a)).abs() < 1e-15);
        assert!(chordal(&a, &b) <= 1.0);
    }

    #[test]
    fn totally_invariant_family_is_refused() {
        let r = degeneration_report(&map("z^2"), &[c(0.001)], &Hypothesis::Auto, &SamplerOptions::default());
        assert_eq!(r, Err(Error::TotallyInvariantPoint));
    }
}
