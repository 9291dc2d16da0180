use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use orbitlab_core::degrees::{
    dyn_degrees, estimate_arith_degree, estimate_d1_growth, monomial_dyn_degrees, GROWTH_ITERATES,
};
use orbitlab_core::dynmaps::{AffinePoint, DynMap, MonomialMap, Point, TriangularMap};
use orbitlab_core::linalg::IntMatrix;
use orbitlab_core::poly::DEFAULT_MAX_TERMS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 1_000_000;

fn mono(rows: &[[i64; 2]]) -> DynMap {
    DynMap::Monomial(MonomialMap::from_ints(
        &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    ))
}

fn tri(polys: &[&str]) -> DynMap {
    DynMap::Triangular(TriangularMap::parse(&["x", "y"], polys).unwrap())
}

/// Maps whose orbit heights grow geometrically or stay bounded. Jordan
/// blocks are left out: their heights carry a polynomial factor.
fn exponential_maps() -> Vec<DynMap> {
    vec![
        mono(&[[2, 0], [0, 2]]),
        mono(&[[3, 0], [0, 3]]),
        mono(&[[2, 1], [1, 1]]),
        mono(&[[0, 1], [1, 0]]),
        mono(&[[2, 0], [0, 3]]),
        mono(&[[1, 0], [0, 1]]),
        mono(&[[1, 1], [1, 2]]),
        mono(&[[1, 2], [1, 1]]),
        tri(&["x^2", "x*y + 1"]),
        tri(&["x^2", "y^2 + x"]),
    ]
}

fn random_start(rng: &mut ChaCha8Rng) -> Point {
    let mut c = || {
        let mut n = 0;
        while n == 0 {
            n = rng.gen_range(-12i64..=12);
        }
        BigRational::new(n.into(), rng.gen_range(1i64..=12).into())
    };
    Point::Affine(AffinePoint::new(vec![c(), c()]))
}

fn d1(f: &DynMap) -> f64 {
    dyn_degrees(f, GROWTH_ITERATES, 1e-6).unwrap().d1()
}

#[test]
fn alpha_below_d1() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for f in exponential_maps() {
        let d = d1(&f);
        for _ in 0..20 {
            let x = random_start(&mut rng);
            let e = estimate_arith_degree(&f, &x, 12, BUDGET).unwrap();
            assert!(
                e.alpha_hat <= d + 0.05,
                "{:?} at {}: {} > {}",
                f.descriptor(),
                x,
                e.alpha_hat,
                d
            );
            assert!(e.root_seq.iter().all(|&r| r >= 1.0));
            assert!(e.window.0 <= e.alpha_hat && e.alpha_hat <= e.window.1);
        }
    }
}

#[test]
fn linear_growth_overshoot_shrinks_with_n() {
    // heights on (x·y, y) grow linearly, so h(n+1)/h(n) ≈ 1 + 1/n
    let f = mono(&[[1, 1], [0, 1]]);
    let x = Point::Affine(AffinePoint::from_ints(&[2, 3]));
    let short = estimate_arith_degree(&f, &x, 12, BUDGET).unwrap().alpha_hat;
    let long = estimate_arith_degree(&f, &x, 60, BUDGET).unwrap().alpha_hat;
    assert!(short > 1.05 && short < 1.1, "{short}");
    assert!(long < 1.02 && long < short, "{long}");
}

#[test]
fn jordan_block_overshoot_shrinks_with_n() {
    // heights ≈ n·2^n, so the ratio is about 2·(1 + 1/n)
    let f = mono(&[[2, 1], [0, 2]]);
    let x = Point::Affine(AffinePoint::from_ints(&[2, 3]));
    let short = estimate_arith_degree(&f, &x, 12, BUDGET).unwrap().alpha_hat;
    let long = estimate_arith_degree(&f, &x, 16, 10 * BUDGET)
        .unwrap()
        .alpha_hat;
    assert!(short > 2.05, "{short}");
    assert!(long < short, "{long}");
}

#[test]
fn shift_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in exponential_maps() {
        for _ in 0..5 {
            let x = random_start(&mut rng);
            let fx3 = (0..3).try_fold(x.clone(), |p, _| f.evaluate(&p));
            let Ok(y) = fx3 else { continue };
            let a = estimate_arith_degree(&f, &x, 12, BUDGET).unwrap().alpha_hat;
            let b = estimate_arith_degree(&f, &y, 12, BUDGET).unwrap().alpha_hat;
            assert!(
                (a - b).abs() <= 0.05,
                "{:?} at {x}: {a} vs {b}",
                f.descriptor()
            );
        }
    }
}

#[test]
fn power_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for f in exponential_maps() {
        let f2 = f.iterate(2).unwrap();
        for _ in 0..5 {
            let x = random_start(&mut rng);
            let a = estimate_arith_degree(&f, &x, 12, BUDGET).unwrap().alpha_hat;
            let Ok(b) = estimate_arith_degree(&f2, &x, 12, BUDGET) else {
                continue;
            };
            let b = b.alpha_hat;
            assert!(
                (b - a * a).abs() <= 0.05 * a * a,
                "{:?} at {x}: {b} vs {}",
                f.descriptor(),
                a * a
            );
        }
        if let DynMap::Monomial(m) = &f {
            let d = monomial_dyn_degrees(m).d1();
            let d2 = monomial_dyn_degrees(&m.iterate(2).unwrap()).d1();
            assert!((d2 - d * d).abs() <= 1e-12 * d2, "{d2} vs {}", d * d);
        }
    }
}

fn all_2x2(bound: i64) -> impl Iterator<Item = [[i64; 2]; 2]> {
    let r = move || -bound..=bound;
    r().flat_map(move |a| {
        r().flat_map(move |b| r().flat_map(move |c| r().map(move |d| [[a, b], [c, d]])))
    })
}

#[test]
fn spectral_degrees_match_growth() {
    let mut checked = 0;
    for m in all_2x2(2) {
        let (t, det) = (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        let disc = t * t - 4 * det;
        // growth ratios converge only with a dominant positive eigenvalue
        if det == 0 || disc <= 0 || t <= 0 {
            continue;
        }
        let f = MonomialMap::from_ints(&[m[0].to_vec(), m[1].to_vec()]);
        let exact = monomial_dyn_degrees(&f).d1();
        let h = DynMap::Monomial(f).homogenize().unwrap();
        let g = estimate_d1_growth(&h, 30, 1e-9, DEFAULT_MAX_TERMS).unwrap();
        assert!(
            (g.d1_estimate - exact).abs() < 1e-3,
            "{m:?}: {} vs {exact}",
            g.d1_estimate
        );
        checked += 1;
    }
    assert!(checked > 50, "{checked}");
}

/// Preimages of `y = x₀^M` are `x₀·ζ` with `ζ^M = 1`; with `ζ = e^{2πik}`
/// these are the `k ∈ (ℤ/N)²/N` with `M·k ≡ 0 mod N`, `N = |det M|`.
#[test]
fn top_degree_counts_preimages() {
    let x0 = [Complex64::new(2.0, 0.0), Complex64::new(-3.0, 0.0)];
    for m in all_2x2(3) {
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
        if det == 0 || det > 6 {
            continue;
        }
        let f = MonomialMap::from_ints(&[m[0].to_vec(), m[1].to_vec()]);
        let d2 = monomial_dyn_degrees(&f).d(2).unwrap();
        let y: Vec<Complex64> = (0..2)
            .map(|i| x0[0].powi(m[i][0] as i32) * x0[1].powi(m[i][1] as i32))
            .collect();
        let mut count = 0;
        for a in 0..det {
            for b in 0..det {
                if (m[0][0] * a + m[0][1] * b) % det != 0 || (m[1][0] * a + m[1][1] * b) % det != 0
                {
                    continue;
                }
                let tau = 2.0 * std::f64::consts::PI / det as f64;
                let x = [
                    x0[0] * Complex64::from_polar(1.0, tau * a as f64),
                    x0[1] * Complex64::from_polar(1.0, tau * b as f64),
                ];
                for i in 0..2 {
                    let v = x[0].powi(m[i][0] as i32) * x[1].powi(m[i][1] as i32);
                    assert!((v - y[i]).norm() < 1e-6 * y[i].norm(), "{m:?}");
                }
                count += 1;
            }
        }
        assert_eq!(count as f64, d2, "{m:?}");
        let smith =
            orbitlab_core::linalg::smith(&IntMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]));
        let order: BigInt = smith.invariant_factors().iter().product();
        assert_eq!(order.to_i64().unwrap().abs(), count);
    }
}
