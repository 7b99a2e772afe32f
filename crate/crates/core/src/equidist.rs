//! Normalized depth divisors of iterates at a point, their total-variation
//! steps, and the predicted limit when the map has potential good
//! reduction.

use num::{Signed, Zero};

use crate::berkspace::{direction_toward, Target, TypeIIPoint};
use crate::crucial::min_locus;
use crate::error::{Error, Result};
use crate::redux::{intrinsic_data, iterate, RationalMapK};
use crate::respoly::{coprime_base, DirectionClass};
use crate::scalars::{int, Rational};

/// Atomic measure on the directions at a point, plus an optional atom at
/// the point itself. A `Factor` atom carries the mass of all its roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionMeasure {
    pub atoms: Vec<(DirectionClass, Rational)>,
    pub point_mass: Rational,
}

impl DirectionMeasure {
    pub fn dirac(class: DirectionClass) -> Self {
        DirectionMeasure {
            atoms: vec![(class, int(1))],
            point_mass: Rational::zero(),
        }
    }

    pub fn total(&self) -> Rational {
        self.atoms
            .iter()
            .fold(self.point_mass.clone(), |acc, (_, m)| acc + m)
    }

    /// Mass this measure puts on the class `p` of a refinement, assuming
    /// every atom either contains `p` or is disjoint from it.
    fn mass_on(&self, class: &DirectionClass) -> Rational {
        let mut total = Rational::zero();
        for (atom, m) in &self.atoms {
            let share = match (atom, class) {
                (DirectionClass::Infinity, DirectionClass::Infinity) => Some(int(1)),
                (DirectionClass::Infinity, _) | (_, DirectionClass::Infinity) => None,
                _ => {
                    let a = atom.poly().expect("finite class");
                    let c = class.poly().expect("finite class");
                    let g = a.gcd(&c);
                    (!g.is_constant()).then(|| {
                        Rational::new((g.deg() as i64).into(), (a.deg() as i64).into())
                    })
                }
            };
            if let Some(share) = share {
                total += m * share;
            }
        }
        total
    }
}

/// `½ Σ |m1 − m2|` over a common coprime refinement of the finite classes,
/// the direction `∞`, and the point atom.
pub fn tv_distance(m1: &DirectionMeasure, m2: &DirectionMeasure) -> Rational {
    let base = coprime_base(
        m1.atoms
            .iter()
            .chain(m2.atoms.iter())
            .filter_map(|(c, _)| c.poly()),
    );
    let mut classes: Vec<DirectionClass> = base
        .iter()
        .map(|p| DirectionClass::from_poly(p).expect("coprime base of squarefree polys"))
        .collect();
    classes.push(DirectionClass::Infinity);
    let mut sum = (&m1.point_mass - &m2.point_mass).abs();
    for c in &classes {
        sum += (m1.mass_on(c) - m2.mass_on(c)).abs();
    }
    sum / int(2)
}

/// Whether `ξ` is totally invariant: the conjugate reduction has trivial
/// common factor.
pub fn totally_invariant(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<bool> {
    Ok(intrinsic_data(phi, xi)?.totally_invariant())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMeasure {
    pub n: u32,
    pub measure: DirectionMeasure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prediction {
    Atom(DirectionMeasure),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Match {
    Yes,
    No,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub at: TypeIIPoint,
    pub levels: Vec<LevelMeasure>,
    pub tv_steps: Vec<Rational>,
    pub predicted: Prediction,
    pub matches: Match,
}

/// The normalized depth measure of `φ^n` at `xi`.
pub fn depth_measure(phi_n: &RationalMapK, xi: &TypeIIPoint) -> Result<DirectionMeasure> {
    let ir = intrinsic_data(phi_n, xi)?;
    let scale = int(phi_n.degree() as i64);
    let atoms = ir
        .depths
        .classes()
        .into_iter()
        .map(|(c, depth)| {
            let m = int((c.degree() * depth) as i64) / &scale;
            (c, m)
        })
        .collect();
    let point_mass = match ir.local_degree() {
        Some(k) => int(k as i64) / &scale,
        None => Rational::zero(),
    };
    Ok(DirectionMeasure { atoms, point_mass })
}

pub fn depth_sequence(phi: &RationalMapK, xi: &TypeIIPoint, n_max: u32) -> Result<ConvergenceReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if phi.degree() < 2 {
        return Err(Error::InvalidInput("dynamical operations need degree at least 2".into()));
    }
    if totally_invariant(phi, xi)? {
        return Err(Error::TotallyInvariantPoint);
    }
    // fail fast on the cap before any work
    iterate_degree_check(phi, n_max)?;
    let mut levels = Vec::with_capacity(n_max as usize);
    let mut phi_n = phi.clone();
    for n in 1..=n_max {
        if n > 1 {
            phi_n = crate::redux::compose(phi, &phi_n);
        }
        levels.push(LevelMeasure {
            n,
            measure: depth_measure(&phi_n, xi)?,
        });
    }
    let tv_steps = levels
        .windows(2)
        .map(|w| tv_distance(&w[0].measure, &w[1].measure))
        .collect();
    let predicted = predicted_limit(phi, xi)?;
    let matches = match &predicted {
        Prediction::Unknown => Match::NotApplicable,
        Prediction::Atom(p) => {
            let last = &levels.last().expect("n_max ≥ 1").measure;
            if tv_distance(last, p).is_zero() {
                Match::Yes
            } else {
                Match::No
            }
        }
    };
    Ok(ConvergenceReport {
        at: xi.clone(),
        levels,
        tv_steps,
        predicted,
        matches,
    })
}

fn iterate_degree_check(phi: &RationalMapK, n: u32) -> Result<()> {
    let degree = (phi.degree() as u64).checked_pow(n).unwrap_or(u64::MAX);
    if degree > crate::redux::DEFAULT_ITERATION_CAP {
        return Err(Error::IterationCapExceeded {
            degree,
            cap: crate::redux::DEFAULT_ITERATION_CAP,
        });
    }
    Ok(())
}

/// The pushforward of the equilibrium measure to the directions at `xi`,
/// when the map has potential good reduction at a point other than `xi`.
pub fn predicted_limit(phi: &RationalMapK, xi: &TypeIIPoint) -> Result<Prediction> {
    let result = min_locus(phi)?;
    let star = &result.minimizer;
    if star == xi || !intrinsic_data(phi, star)?.totally_invariant() {
        return Ok(Prediction::Unknown);
    }
    let class = direction_toward(xi, &Target::Point(star.clone()))?;
    Ok(Prediction::Atom(DirectionMeasure::dirac(class)))
}

/// Convenience for callers that want the measure of a single iterate.
pub fn level_measure(phi: &RationalMapK, xi: &TypeIIPoint, n: u32) -> Result<DirectionMeasure> {
    depth_measure(&iterate(phi, n)?, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_map, parse_point};
    use crate::scalars::{rat, QPoly};

    fn map(s: &str) -> RationalMapK {
        parse_map(s).unwrap()
    }

    #[test]
    fn totally_invariant_examples() {
        let g = TypeIIPoint::gauss();
        assert!(totally_invariant(&map("z^2"), &g).unwrap());
        assert!(!totally_invariant(&map("t*z^2"), &g).unwrap());
        let p = parse_point("a=0;s=-1/2").unwrap();
        assert!(!totally_invariant(&map("(t*z^2+1)/t"), &p).unwrap());
    }

    #[test]
    fn depth_sequence_examples() {
        let g = TypeIIPoint::gauss();
        let r = depth_sequence(&map("t*z^2"), &g, 3).unwrap();
        for level in &r.levels {
            assert_eq!(level.measure, DirectionMeasure::dirac(DirectionClass::Infinity));
        }
        assert!(r.tv_steps.iter().all(|s| s.is_zero()));
        assert_eq!(r.matches, Match::Yes);

        let p = parse_point("a=0;s=-1/2").unwrap();
        let r = depth_sequence(&map("(t*z^2+1)/t"), &p, 2).unwrap();
        let class = DirectionClass::from_poly(&QPoly::from_ints(&[1, 0, 1])).unwrap();
        for level in &r.levels {
            assert_eq!(level.measure, DirectionMeasure::dirac(class.clone()));
        }
        assert_eq!(r.tv_steps, vec![int(0)]);

        assert_eq!(
            depth_sequence(&map("z^2"), &g, 3),
            Err(Error::TotallyInvariantPoint)
        );
    }

    #[test]
    fn predicted_limit_examples() {
        let g = TypeIIPoint::gauss();
        assert_eq!(
            predicted_limit(&map("t*z^2"), &g).unwrap(),
            Prediction::Atom(DirectionMeasure::dirac(DirectionClass::Infinity))
        );
        assert_eq!(
            predicted_limit(&map("(z^2-t)/z"), &g).unwrap(),
            Prediction::Atom(DirectionMeasure::dirac(DirectionClass::Finite(int(0))))
        );
        assert_eq!(
            predicted_limit(&map("(t*z^2+1)/t"), &g).unwrap(),
            Prediction::Unknown
        );
    }

    #[test]
    fn tv_examples() {
        let inf = DirectionMeasure::dirac(DirectionClass::Infinity);
        let zero = DirectionMeasure::dirac(DirectionClass::Finite(int(0)));
        assert_eq!(tv_distance(&inf, &inf), int(0));
        assert_eq!(tv_distance(&inf, &zero), int(1));
        let a = DirectionMeasure {
            atoms: vec![
                (DirectionClass::Infinity, rat(3, 4)),
                (DirectionClass::Finite(int(0)), rat(1, 4)),
            ],
            point_mass: int(0),
        };
        let b = DirectionMeasure {
            atoms: vec![
                (DirectionClass::Infinity, rat(1, 2)),
                (DirectionClass::Finite(int(0)), rat(1, 2)),
            ],
            point_mass: int(0),
        };
        assert_eq!(tv_distance(&a, &b), rat(1, 4));
        // a Factor atom against one of its roots
        let f = DirectionMeasure::dirac(
            DirectionClass::from_poly(&QPoly::from_ints(&[-1, 0, 1])).unwrap(),
        );
        let one = DirectionMeasure::dirac(DirectionClass::Finite(int(1)));
        assert_eq!(tv_distance(&f, &one), rat(1, 2));
    }

    #[test]
    fn mass_bookkeeping() {
        let g = TypeIIPoint::gauss();
        for s in ["t*z^2", "(z^2-t)/z", "z^2+t", "(t*z^2+1)/t"] {
            for n in 1..=3 {
                let m = level_measure(&map(s), &g, n).unwrap();
                assert_eq!(m.total(), int(1), "{s} level {n}");
            }
        }
    }
}
