mod common;

use proptest::prelude::*;

use poisson_core::algebra::{rat, Rational};
use poisson_core::linalg::{MatrixQ, QuotientBasis, Subspace};

fn matrix(max: usize) -> impl Strategy<Value = MatrixQ> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec((-2i64..=2).prop_map(rat), c), r)
            .prop_map(move |rows| MatrixQ::from_rows(c, rows))
    })
}

fn vectors(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(
        proptest::collection::vec((-2i64..=2).prop_map(rat), n),
        0..=k,
    )
}

#[test]
fn identity_has_full_rank_and_no_kernel() {
    let m = MatrixQ::identity(4);
    assert_eq!(m.rank(), 4);
    assert!(m.kernel().is_empty());
}

#[test]
fn coordinate_subspaces() {
    let s = Subspace::coordinate(5, [0, 3]);
    assert_eq!(s.dim(), 2);
    assert!(s.is_subspace_of(&Subspace::full(5)));
    assert!(Subspace::zero(5).is_subspace_of(&s));
}

proptest! {
    #[test]
    fn rank_nullity(m in matrix(6)) {
        prop_assert_eq!(m.rank() + m.kernel().len(), m.ncols());
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in m.kernel() {
            prop_assert!(m.mul_vec(&v).iter().all(|x| *x == rat(0)));
        }
        prop_assert_eq!(m.image().dim(), m.rank());
    }

    #[test]
    fn solve_finds_preimages(m in matrix(5), x in proptest::collection::vec((-3i64..=3).prop_map(rat), 5)) {
        let x = &x[..m.ncols()];
        let b = m.mul_vec(x);
        let y = m.solve(&b).expect("consistent system");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn subspace_lattice(a in vectors(5, 4), b in vectors(5, 4)) {
        let (u, v) = (Subspace::span(5, a), Subspace::span(5, b));
        let sum = u.sum(&v);
        let meet = u.intersect(&v);
        prop_assert_eq!(sum.dim() + meet.dim(), u.dim() + v.dim());
        prop_assert!(meet.is_subspace_of(&u) && meet.is_subspace_of(&v));
        prop_assert!(u.is_subspace_of(&sum) && v.is_subspace_of(&sum));
    }

    #[test]
    fn quotient_coordinates(a in vectors(5, 4), b in vectors(5, 2)) {
        let v = Subspace::span(5, a.clone());
        let u = v.intersect(&Subspace::span(5, b));
        let q = QuotientBasis::new(&v, &u).unwrap();
        prop_assert_eq!(q.dim(), v.dim() - u.dim());
        for (i, r) in q.representatives().iter().enumerate() {
            let c = q.coordinates(r).unwrap();
            prop_assert!(c.iter().enumerate().all(|(j, x)| *x == rat((i == j) as i64)));
        }
        for w in u.basis() {
            prop_assert!(q.coordinates(w).unwrap().iter().all(|x| *x == rat(0)));
        }
    }

    #[test]
    fn image_of_a_subspace(m in matrix(5), a in vectors(5, 3)) {
        let a: Vec<_> = a.into_iter().map(|v| v[..m.ncols()].to_vec()).collect();
        let s = Subspace::span(m.ncols(), a.clone());
        let img = m.image_of(&s);
        prop_assert!(img.is_subspace_of(&m.image()));
        for v in &a {
            prop_assert!(img.contains(&m.mul_vec(v)));
        }
        prop_assert!(m.preimage(&img).dim() >= s.dim());
    }
}

proptest! {
    #[test]
    fn lattice_operations_are_canonical(a in vectors(4, 3), b in vectors(4, 3), c in vectors(4, 3)) {
        let (a, b, c) = (Subspace::span(4, a), Subspace::span(4, b), Subspace::span(4, c));
        prop_assert_eq!(a.sum(&b), b.sum(&a));
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.sum(&b).sum(&c), a.sum(&b.sum(&c)));
        prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        prop_assert_eq!(a.sum(&a), a.clone());
        prop_assert_eq!(a.intersect(&a), a.clone());
    }

    #[test]
    fn modular_law(a in vectors(4, 2), b in vectors(4, 3), extra in vectors(4, 2)) {
        let a = Subspace::span(4, a);
        let c = a.sum(&Subspace::span(4, extra));
        let b = Subspace::span(4, b);
        prop_assert_eq!(a.sum(&b.intersect(&c)), a.sum(&b).intersect(&c));
    }
}
