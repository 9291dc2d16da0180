use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use orbitlab_core::density::{
    density_certificate, monomial_space_dim, monomials_up_to, relation_kernel, DensityOutcome,
};
use orbitlab_core::dynmaps::{
    iterate_orbit, AffinePoint, DynMap, MonomialMap, OrbitRecord, OrbitStatus, Point,
};
use orbitlab_core::linalg::IntMatrix;
use orbitlab_core::poly::MultiPoly;
use orbitlab_core::torus::invariant_monomials;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        rng.gen_range(-30i64..=30).into(),
        rng.gen_range(1i64..=9).into(),
    )
}

/// Random integer polynomial of total degree ≤ `d` in `m` variables.
fn random_poly(rng: &mut ChaCha8Rng, m: usize, d: usize) -> MultiPoly {
    MultiPoly::from_terms(
        m,
        monomials_up_to(m, d)
            .into_iter()
            .map(|e| {
                (
                    e.0,
                    BigRational::from_integer(rng.gen_range(-3i64..=3).into()),
                )
            })
            .collect::<Vec<_>>(),
    )
}

fn record(points: Vec<AffinePoint>) -> OrbitRecord {
    let f = DynMap::Monomial(MonomialMap::identity(points[0].dim()));
    OrbitRecord {
        map: f.descriptor(),
        start: Point::Affine(points[0].clone()),
        heights: vec![0.0; points.len()],
        height_bits: vec![0; points.len()],
        points: points.into_iter().map(Point::Affine).collect(),
        status: OrbitStatus::Completed,
    }
}

fn coeff_vector(p: &MultiPoly, d: usize) -> Vec<BigInt> {
    monomials_up_to(p.nvars(), d)
        .iter()
        .map(|e| p.coeff(e).to_integer())
        .collect()
}

/// `p` is a rational combination of `basis`.
fn in_span(p: &MultiPoly, basis: &[MultiPoly], d: usize) -> bool {
    let rows: Vec<Vec<BigInt>> = basis.iter().map(|b| coeff_vector(b, d)).collect();
    let mut with = rows.clone();
    with.push(coeff_vector(p, d));
    let rank = |r: &[Vec<BigInt>]| {
        if r.is_empty() {
            0
        } else {
            IntMatrix::from_rows(r).rank()
        }
    };
    rank(&with) == rank(&rows)
}

fn check_planted(planted: &MultiPoly, points: Vec<AffinePoint>) {
    let k = planted.total_degree().unwrap() as usize;
    assert!(points.iter().all(|p| planted.eval(p.coords()).is_zero()));
    assert!(
        in_span(planted, &relation_kernel(&points, k), k),
        "{planted}"
    );
    let r = density_certificate(&record(points.clone()), 3);
    let cert = r
        .relation()
        .unwrap_or_else(|| panic!("{planted}: {}", r.summary()));
    assert!(cert.degree <= k);
    for p in &points {
        assert!(cert.poly.eval(p.coords()).is_zero());
    }
}

#[test]
fn planted_curves_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let y = MultiPoly::var(2, 1);
    let mut done = 0;
    while done < 25 {
        let a = random_poly(&mut rng, 1, 2);
        let b = random_poly(&mut rng, 1, 3);
        if a.is_zero() {
            continue;
        }
        let lift = |p: &MultiPoly| {
            MultiPoly::from_terms(
                2,
                p.terms().iter().map(|(e, c)| (vec![e.0[0], 0], c.clone())),
            )
        };
        let planted = &(&lift(&a) * &y) - &lift(&b);
        if planted.total_degree().unwrap_or(0) > 3 || planted.total_degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut points = Vec::new();
        while points.len() < monomial_space_dim(2, 3) + 6 {
            let t = rat(&mut rng);
            let at = a.eval(std::slice::from_ref(&t));
            if at.is_zero() {
                continue;
            }
            points.push(AffinePoint::new(vec![t.clone(), b.eval(&[t]) / at]));
        }
        check_planted(&planted, points);
        done += 1;
    }
}

#[test]
fn planted_surfaces_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let z = MultiPoly::var(3, 2);
    for _ in 0..25 {
        let q = random_poly(&mut rng, 2, 3);
        let lifted = MultiPoly::from_terms(
            3,
            q.terms()
                .iter()
                .map(|(e, c)| (vec![e.0[0], e.0[1], 0], c.clone())),
        );
        let planted = &z - &lifted;
        let points: Vec<AffinePoint> = (0..monomial_space_dim(3, 3) + 6)
            .map(|_| {
                let (u, v) = (rat(&mut rng), rat(&mut rng));
                let w = q.eval(&[u.clone(), v.clone()]);
                AffinePoint::new(vec![u, v, w])
            })
            .collect();
        check_planted(&planted, points);
    }
}

#[test]
fn kernels_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..20 {
        let q = random_poly(&mut rng, 1, 2);
        let points: Vec<AffinePoint> = (0..16)
            .map(|_| {
                let t = rat(&mut rng);
                let y = q.eval(std::slice::from_ref(&t));
                AffinePoint::new(vec![t, y])
            })
            .collect();
        let mut last = 0;
        for d in 1..=3 {
            let k = relation_kernel(&points, d).len();
            assert!(k >= last);
            last = k;
            // more points can only shrink the kernel
            let fewer = relation_kernel(&points[..12], d);
            let more = relation_kernel(&points, d);
            assert!(more.len() <= fewer.len());
            for p in &more {
                assert!(in_span(p, &fewer, d));
            }
        }
    }
}

/// A monomial `x^v` that is constant along orbits gives a relation of
/// degree `max(|v⁺|, |v⁻|)`.
#[test]
fn invariant_monomials_force_relations() {
    let maps: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![1, 1], vec![0, 1]],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![1, 0], vec![0, 2]],
        vec![vec![2, 1], vec![0, 1]],
        vec![vec![1, 0], vec![0, -1]],
        vec![vec![1, 0], vec![1, 1]],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for m in maps {
        let f = MonomialMap::from_ints(&m);
        let inv = invariant_monomials(&f, Some(1));
        let w = inv
            .witnesses
            .iter()
            .find(|w| w.l == 1 && w.coefficient_condition)
            .expect("witness");
        let pos: i64 = w.v.iter().filter(|&&e| e > 0).sum();
        let neg: i64 = -w.v.iter().filter(|&&e| e < 0).sum::<i64>();
        let bound = pos.max(neg) as usize;
        assert!(bound <= 3);
        for _ in 0..3 {
            let start: Vec<BigRational> = (0..2)
                .map(|_| {
                    BigRational::new(rng.gen_range(2i64..9).into(), rng.gen_range(1i64..9).into())
                })
                .collect();
            let orbit = iterate_orbit(
                &DynMap::Monomial(f.clone()),
                &Point::Affine(AffinePoint::new(start)),
                12,
                1_000_000,
            );
            assert!(orbit.status.is_completed());
            let r = density_certificate(&orbit, 3);
            match &r.outcome {
                DensityOutcome::RelationFound(c) => {
                    assert!(c.degree <= bound, "{m:?}: {}", c.relation)
                }
                other => panic!("{m:?}: {other:?}"),
            }
        }
    }
}
