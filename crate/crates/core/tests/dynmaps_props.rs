use num_bigint::BigInt;
use num_rational::BigRational;
use orbitlab_core::dynmaps::{
    iterate_orbit, AffinePoint, DynMap, MonomialMap, Point, ProjectiveEndo, ProjectivePoint,
    TriangularMap,
};
use orbitlab_core::linalg::IntMatrix;
use orbitlab_core::poly::{default_var_names, parse_expression, MultiPoly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-9i64..=9);
    }
    BigRational::new(n.into(), rng.gen_range(1i64..=5).into())
}

fn torus_point(rng: &mut ChaCha8Rng, n: usize) -> AffinePoint {
    AffinePoint::new((0..n).map(|_| rat(rng)).collect())
}

fn monomial(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> MonomialMap {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        if IntMatrix::from_rows(&rows).det() == BigInt::from(0) {
            continue;
        }
        let coeff = (0..n).map(|_| rat(rng)).collect();
        return MonomialMap::new(IntMatrix::from_rows(&rows), coeff).unwrap();
    }
}

#[test]
fn monomial_compose_matches_sequential_eval() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let f = monomial(&mut rng, 2, 3);
        let g = monomial(&mut rng, 2, 3);
        let x = torus_point(&mut rng, 2);
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.eval(&x).unwrap(), f.eval(&g.eval(&x).unwrap()).unwrap());
    }
}

#[test]
fn triangular_compose_matches_sequential_eval() {
    let f = TriangularMap::parse(&["x", "y"], &["x^2 - 1", "x*y + 3/2"]).unwrap();
    let g = TriangularMap::parse(&["x", "y"], &["2*x + 1", "y^2 - x"]).unwrap();
    let h = TriangularMap::parse(&["x", "y"], &["x", "y/(x - 2)"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 100 {
        let x = torus_point(&mut rng, 2);
        for (a, b) in [(&f, &g), (&g, &f), (&f, &h), (&h, &g)] {
            let ab = a.compose(b).unwrap();
            let seq = b.eval(&x).and_then(|y| a.eval(&y));
            match seq {
                Ok(v) => assert_eq!(ab.eval(&x).unwrap(), v),
                Err(_) => continue,
            }
        }
        checked += 1;
    }
}

#[test]
fn projective_compose_matches_sequential_eval() {
    let f = ProjectiveEndo::parse(&["X0^2", "X1^2 - X0*X2", "X2^2 + X1*X0"]).unwrap();
    let g = ProjectiveEndo::parse(&["X0*X1", "X1^2", "X2^2 - X0^2"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 100 {
        let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-20..=20)).collect();
        let Ok(p) = ProjectivePoint::from_ints(&v) else {
            continue;
        };
        let fg = f.compose(&g, 100_000).unwrap();
        let Ok(seq) = g.eval(&p).and_then(|q| f.eval(&q)) else {
            continue;
        };
        assert_eq!(fg.eval(&p).unwrap(), seq);
        checked += 1;
    }
}

#[test]
fn monomial_iteration_matches_matrix_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let f = monomial(&mut rng, 2, 3);
        let f = MonomialMap::new(
            f.matrix().clone(),
            vec![BigRational::from_integer(1.into()); 2],
        )
        .unwrap();
        let x = AffinePoint::from_ints(&[rng.gen_range(2..6), -rng.gen_range(2..6)]);
        let orbit = iterate_orbit(
            &DynMap::Monomial(f.clone()),
            &Point::Affine(x.clone()),
            8,
            u64::MAX,
        );
        assert!(orbit.status.is_completed());
        for (n, p) in orbit.affine_points().iter().enumerate() {
            let direct = MonomialMap::new(
                f.matrix().pow(n as u32),
                vec![BigRational::from_integer(1.into()); 2],
            )
            .unwrap();
            assert_eq!(p, &direct.eval(&x).unwrap());
        }
    }
}

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    let term = (prop::collection::vec(0u64..4, 3), -20i64..20, 1i64..4);
    prop::collection::vec(term, 0..6).prop_map(|ts| {
        MultiPoly::from_terms(
            3,
            ts.into_iter()
                .map(|(e, n, d)| (e, BigRational::new(n.into(), d.into()))),
        )
    })
}

proptest! {
    #[test]
    fn parse_serialize_round_trip(p in arb_poly()) {
        let names = default_var_names("x", 3, 1);
        let s = p.to_expr_string(&names);
        let back = parse_expression(&s, &names).unwrap().into_poly().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn canonicalization_idempotent(v in prop::collection::vec(-500i64..500, 3), lam in -30i64..30) {
        prop_assume!(v.iter().any(|&x| x != 0) && lam != 0);
        let p = ProjectivePoint::from_ints(&v).unwrap();
        let again = ProjectivePoint::new(p.coords().to_vec()).unwrap();
        prop_assert_eq!(&again, &p);
        let scaled: Vec<i64> = v.iter().map(|x| x * lam).collect();
        prop_assert_eq!(ProjectivePoint::from_ints(&scaled).unwrap(), p);
    }
}

#[test]
fn monomial_orbits_match_plain_evaluation() {
    use orbitlab_core::heights::height_of_point;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let f = monomial(&mut rng, 2, 2);
        let x = torus_point(&mut rng, 2);
        let orbit = iterate_orbit(
            &DynMap::Monomial(f.clone()),
            &Point::Affine(x.clone()),
            6,
            4000,
        );
        let mut cur = x;
        for (k, p) in orbit.points.iter().enumerate() {
            let p = p.as_affine().unwrap();
            assert_eq!(p, &cur);
            let h = height_of_point(&Point::Affine(cur.clone()));
            assert_eq!(
                (orbit.heights[k], orbit.height_bits[k]),
                (h.value, h.exact_bitlen)
            );
            cur = f.eval(&cur).unwrap();
        }
        if !orbit.status.is_completed() {
            assert!(Point::Affine(cur).bits() > 4000);
        }
    }
}
