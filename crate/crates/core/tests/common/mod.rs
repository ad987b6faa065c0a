#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;

use poisson_core::algebra::{ratio, Rational};
use poisson_core::catalog::{Sign, StructureId, StructureSpec};

pub const IDS: [StructureId; 3] = [
    StructureId::Lambda4,
    StructureId::Lambda8,
    StructureId::Lambda11,
];

fn assemble(id: StructureId, u: Rational, v: Rational, plus: bool) -> Option<StructureSpec> {
    let spec = match id {
        StructureId::Lambda4 => StructureSpec::lambda4(u, v),
        StructureId::Lambda8 => {
            StructureSpec::lambda8(u, v, if plus { Sign::Plus } else { Sign::Minus })
        }
        StructureId::Lambda11 => StructureSpec::lambda11(u, v),
    };
    spec.validate().ok().map(|_| spec)
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

/// A valid spec with small rational parameters; redraws until valid.
pub fn draw_spec<R: Rng>(rng: &mut R, id: StructureId, plus: bool) -> StructureSpec {
    loop {
        let (u, v) = (small_rational(rng), small_rational(rng));
        if let Some(s) = assemble(id, u, v, plus) {
            return s;
        }
    }
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

pub fn spec_of(id: StructureId) -> impl Strategy<Value = StructureSpec> {
    (rational(), rational(), any::<bool>())
        .prop_filter_map("invalid parameters", move |(u, v, plus)| {
            assemble(id, u, v, plus)
        })
}

pub fn any_spec() -> impl Strategy<Value = StructureSpec> {
    prop_oneof![
        spec_of(StructureId::Lambda4),
        spec_of(StructureId::Lambda8),
        spec_of(StructureId::Lambda11),
    ]
}

pub fn monomial(max_deg: u32) -> impl Strategy<Value = poisson_core::algebra::Monomial> {
    (0..=max_deg, 0..=max_deg, 0..=max_deg)
        .prop_filter("degree bound", move |(a, b, c)| a + b + c <= max_deg)
        .prop_map(|(a, b, c)| poisson_core::algebra::Monomial::new(a, b, c))
}

pub fn poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = poisson_core::algebra::Poly> {
    proptest::collection::vec((monomial(max_deg), rational()), 0..=max_terms)
        .prop_map(poisson_core::algebra::Poly::from_terms)
}

/// Homogeneous of degree `deg`.
pub fn homogeneous(
    deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = poisson_core::algebra::Poly> {
    let monos = poisson_core::algebra::Monomial::of_degree(deg);
    proptest::collection::vec((proptest::sample::select(monos), rational()), 0..=max_terms)
        .prop_map(poisson_core::algebra::Poly::from_terms)
}

pub fn multivector(
    grade: usize,
    max_deg: u32,
) -> impl Strategy<Value = poisson_core::multivector::Multivector> {
    let n = poisson_core::multivector::basis_len(grade);
    proptest::collection::vec(poly(max_deg, 3), n).prop_map(move |comps| {
        poisson_core::multivector::Multivector::from_components(grade, comps)
    })
}

pub fn any_multivector(
    max_deg: u32,
) -> impl Strategy<Value = poisson_core::multivector::Multivector> {
    (0usize..4).prop_flat_map(move |g| multivector(g, max_deg))
}
