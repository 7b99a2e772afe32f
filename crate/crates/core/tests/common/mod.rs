//! Random generators shared by the property suites.

#![allow(dead_code)]

use nadyn_core::berkspace::{Mobius, TypeIIPoint};
use nadyn_core::redux::RationalMapK;
use nadyn_core::respoly::HomogeneousForm;
use nadyn_core::scalars::{rat, KScalar, QPoly, Rational};
use proptest::prelude::*;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

pub fn level() -> impl Strategy<Value = u64> {
    prop_oneof![Just(1u64), Just(1), Just(2), Just(3)]
}

/// `Σ c_k t^{e_k}` with a few terms, exponents in `(1/N)Z ∩ [-2, 3]`,
/// sometimes divided by `1 + t`.
pub fn kscalar() -> impl Strategy<Value = KScalar> {
    (
        level(),
        prop::collection::vec((-4i64..=4, -6i64..=9), 1..4),
        prop::bool::weighted(0.2),
    )
        .prop_map(|(n, terms, divide)| {
            let mut acc = KScalar::zero();
            for (c, e) in terms {
                let term = &KScalar::from_int(c) * &KScalar::u_pow(e, n);
                acc = &acc + &term;
            }
            if divide {
                acc = &acc / &(&KScalar::one() + &KScalar::t());
            }
            acc
        })
}

/// Coefficients that are often zero, so that reductions are interesting.
pub fn sparse_kscalar() -> impl Strategy<Value = KScalar> {
    prop_oneof![
        2 => Just(KScalar::zero()),
        3 => kscalar(),
    ]
}

pub fn map_of_degree(d: usize) -> impl Strategy<Value = RationalMapK> {
    (
        prop::collection::vec(sparse_kscalar(), d + 1),
        prop::collection::vec(sparse_kscalar(), d + 1),
    )
        .prop_filter_map("degenerate", |(num, den)| RationalMapK::new(num, den).ok())
}

pub fn map() -> impl Strategy<Value = RationalMapK> {
    prop_oneof![4 => map_of_degree(2), 1 => map_of_degree(3)]
}

pub fn point() -> impl Strategy<Value = TypeIIPoint> {
    (
        prop::collection::vec((-3i64..=3, -4i64..=4), 0..3),
        level(),
        -4i64..=4,
    )
        .prop_map(|(terms, n, s)| {
            let mut a = KScalar::zero();
            for (c, e) in terms {
                a = &a + &(&KScalar::from_int(c) * &KScalar::u_pow(e, n));
            }
            TypeIIPoint::new(a, rat(s, n as i64))
        })
}

/// An element of `GL(2, K°)` whose reduction is invertible.
pub fn unit_matrix() -> impl Strategy<Value = Mobius> {
    (
        prop::array::uniform4(-3i64..=3),
        prop::array::uniform4(-3i64..=3),
        level(),
    )
        .prop_filter_map("singular reduction", |(r, h, n)| {
            if r[0] * r[3] - r[1] * r[2] == 0 {
                return None;
            }
            let entry = |i: usize| {
                &KScalar::from_int(r[i]) + &(&KScalar::from_int(h[i]) * &KScalar::u_pow(1, n))
            };
            Mobius::new(entry(0), entry(1), entry(2), entry(3)).ok()
        })
}

/// A product of distinct random factors with random multiplicities, as a
/// homogeneous form, together with the factor list for oracle checks.
pub fn factored_form() -> impl Strategy<Value = (HomogeneousForm, Vec<(QPoly, usize)>, usize)> {
    (
        prop::collection::vec(((-5i64..=5), 1usize..=3), 0..4),
        prop::option::of(((-3i64..=3), (1i64..=3), 1usize..=2)),
        0usize..=2,
    )
        .prop_map(|(roots, quad, inf)| {
            let mut factors: Vec<(QPoly, usize)> = Vec::new();
            for (r, m) in roots {
                let p = QPoly::from_ints(&[-r, 1]);
                if let Some(f) = factors.iter_mut().find(|(q, _)| *q == p) {
                    f.1 += m;
                } else {
                    factors.push((p, m));
                }
            }
            if let Some((b, c, m)) = quad {
                // z^2 + b z + c with negative discriminant or shifted away
                let c = c + b * b;
                factors.push((QPoly::from_ints(&[c, b, 1]), m));
            }
            let poly = factors
                .iter()
                .fold(QPoly::one(), |acc, (p, m)| &acc * &p.pow(*m as u32));
            (HomogeneousForm::from_parts(&poly, inf), factors, inf)
        })
}
