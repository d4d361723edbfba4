use nalgebra::DMatrix;
use proptest::prelude::*;
use tgeom::collinearity::is_collinear;
use tgeom::reconstruct::{max_volume_bases, verify_conditions, ReconstructionFrame};
use tgeom::*;

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

fn points(dim: usize, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point64>> {
    prop::collection::vec(coords(dim).prop_map(Point::Coords), count)
}

fn spaces(dim: usize) -> Vec<Space64> {
    vec![
        Space::euclidean(dim).unwrap(),
        Space::minkowski(dim).unwrap(),
        Space::euclidean(dim)
            .unwrap()
            .deformed(Distortion::Quadratic { kappa: 0.3 })
            .unwrap(),
        Space::minkowski(dim)
            .unwrap()
            .deformed(Distortion::AffineCap { d: 0.2, sigma0: 0.5 })
            .unwrap(),
    ]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &Point64, b: &Point64) -> Vec<f64> {
    a.coords().unwrap().iter().zip(b.coords().unwrap()).map(|(x, y)| x - y).collect()
}

/// Gram-matrix embedding oracle: PSD with rank ≤ k relative to point 0.
fn gram_embeds(rows: &[Vec<f64>], k: usize) -> bool {
    let m = rows.len() - 1;
    let g = DMatrix::from_fn(m, m, |i, j| rows[0][i + 1] + rows[0][j + 1] - rows[i + 1][j + 1]);
    let scale = rows.iter().flatten().fold(1.0_f64, |a, v| a.max(v.abs()));
    let eig = g.symmetric_eigen().eigenvalues;
    eig.iter().all(|&l| l >= -1e-9 * scale) && eig.iter().filter(|&&l| l > 1e-9 * scale).count() <= k
}

proptest! {
    #[test]
    fn sigma_symmetric_with_zero_diagonal(p in coords(3), q in coords(3)) {
        let (p, q) = (Point::Coords(p), Point::Coords(q));
        for s in spaces(3) {
            prop_assert_eq!(s.sigma(&p, &q).unwrap(), s.sigma(&q, &p).unwrap());
            prop_assert_eq!(s.sigma(&p, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn gamma_symmetric_in_last_two(pts in points(3, 3..4)) {
        for s in spaces(3) {
            let a = gamma(&s, &pts[0], &pts[1], &pts[2]).unwrap();
            let b = gamma(&s, &pts[0], &pts[2], &pts[1]).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn two_point_scalar_is_the_dot_product(pts in points(3, 4..5)) {
        let e3 = Euclidean::new(3).unwrap();
        let got = two_point_scalar(&e3, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let (a, b) = (sub(&pts[1], &pts[0]), sub(&pts[3], &pts[2]));
        let want = dot(&a, &b);
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + dot(&a, &a).sqrt() * dot(&b, &b).sqrt()));
    }

    #[test]
    fn gram_det_ignores_point_order(pts in points(3, 4..5), rot in 0usize..4) {
        for s in spaces(3) {
            let f = gram_det(&s, &Multivector::new(pts.clone()).unwrap()).unwrap();
            let mut permuted = pts.clone();
            permuted.rotate_left(rot);
            permuted.swap(1, 2);
            let g = gram_det(&s, &Multivector::new(permuted).unwrap()).unwrap();
            let m = Multivector::new(pts.clone()).unwrap();
            let scale = gram_matrix(&s, &m.points()[0], &m.points()[1..]).unwrap().max_abs();
            prop_assert!((f - g).abs() <= 1e-10 * scale.powi(3).max(1.0), "{f} vs {g}");
        }
    }

    #[test]
    fn self_scalar_product_is_squared_length(pts in points(3, 3..4)) {
        for s in spaces(3) {
            let m = Multivector::new(pts.clone()).unwrap();
            let a = mv_scalar_product(&s, &m, &m).unwrap();
            let b = squared_length(&s, &m).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn repeated_point_is_null(pts in points(3, 3..4), which in 1usize..3) {
        for s in spaces(3) {
            let mut p = pts.clone();
            p[which] = p[0].clone();
            let g = gram_matrix(&s, &p[0], &p[1..]).unwrap();
            prop_assert!(negligible(g.determinant(), g.max_abs(), 2, 1e-12));
        }
    }

    #[test]
    fn collinearity_symmetric_and_scale_free(a in coords(3), b in coords(3), origin in coords(3), k in 0.1..5.0f64) {
        let e3 = Euclidean::new(3).unwrap();
        let o = Point::Coords(origin.clone());
        let q0 = Point::Coords(vec![0.0; 3]);
        let pa = Point::Coords(origin.iter().zip(&a).map(|(x, y)| x + y).collect());
        prop_assume!(dot(&a, &a) > 1e-3);
        let va = Multivector::vector(o.clone(), pa.clone());
        let vb = Multivector::vector(q0.clone(), Point::Coords(b.clone()));
        let ab = is_collinear(&e3, &va, &vb, 1e-9).unwrap();
        let ba = is_collinear(&e3, &vb, &va, 1e-9).unwrap();
        prop_assert_eq!(ab.collinear, ba.collinear);
        prop_assert!((ab.defect - ba.defect).abs() <= 1e-12);
        let scaled = Multivector::vector(q0.clone(), Point::Coords(a.iter().map(|x| k * x).collect()));
        let v = is_collinear(&e3, &va, &scaled, 1e-9).unwrap();
        prop_assert!(v.collinear);
        prop_assert_eq!(v.orientation, Orientation::Parallel);
        let flipped = Multivector::vector(q0, Point::Coords(a.iter().map(|x| -k * x).collect()));
        let v = is_collinear(&e3, &va, &flipped, 1e-9).unwrap();
        prop_assert_eq!(v.orientation, Orientation::Antiparallel);
    }

    #[test]
    fn round_trip_on_flat_backends(n in 1usize..5, pts in points(4, 8..20), minkowski in any::<bool>()) {
        prop_assume!(!(minkowski && n < 2));
        let pts: Vec<Point64> = pts.iter().map(|p| Point::Coords(p.coords().unwrap()[..n].to_vec())).collect();
        let space = if minkowski { Space::minkowski(n).unwrap() } else { Space::euclidean(n).unwrap() };
        let (frame, report) = reconstruct(&space, &pts, DEFAULT_TOL).unwrap();
        prop_assert_eq!(frame.dim, n);
        prop_assert!(report.conditions.all_passed());
        let want = if minkowski { Signature { positive: 1, negative: n - 1 } } else { Signature { positive: n, negative: 0 } };
        prop_assert_eq!(frame.signature, want);
        let id = &frame.g_cov * &frame.g_contra;
        for i in 0..n {
            for k in 0..n {
                let e = if i == k { 1.0 } else { 0.0 };
                prop_assert!((id[(i, k)] - e).abs() < 1e-9);
            }
        }
        let scale = pts.iter().flat_map(|p| pts.iter().map(move |q| (p, q)))
            .fold(1.0_f64, |a, (p, q)| a.max(space.sigma(p, q).unwrap().abs()));
        for p in &pts {
            for q in &pts {
                let xp = coordinates(&space, &frame, p).unwrap();
                let xq = coordinates(&space, &frame, q).unwrap();
                let r = sigma_from_coords(&frame, &xp, &xq) - space.sigma(p, q).unwrap();
                prop_assert!(r.abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn detected_dimension_is_permutation_stable(n in 1usize..4, pts in points(3, 6..15), shift in 1usize..6) {
        let pts: Vec<Point64> = pts.iter().map(|p| Point::Coords(p.coords().unwrap()[..n].to_vec())).collect();
        let e = Euclidean::new(n).unwrap();
        let mut rotated = pts.clone();
        rotated.rotate_left(shift % pts.len());
        rotated.reverse();
        let (a, _) = detect_dimension(&e, &pts, DEFAULT_TOL).unwrap();
        let (b, _) = detect_dimension(&e, &rotated, DEFAULT_TOL).unwrap();
        prop_assert_eq!(a, n);
        prop_assert_eq!(b, n);
    }

    #[test]
    fn menger_agrees_with_gram_oracle(n in 1usize..4, pts in points(3, 4..8), noise in prop::option::of((0usize..3, 0.05..0.5f64))) {
        let pts: Vec<Point64> = pts.iter().map(|p| Point::Coords(p.coords().unwrap()[..n].to_vec())).collect();
        let mut rows = Tabulated::from_space(&Euclidean::new(n).unwrap(), &pts).unwrap().rows();
        if let Some((i, eps)) = noise {
            let v = rows[i][i + 1] * (1.0 + eps);
            rows[i][i + 1] = v;
            rows[i + 1][i] = v;
        }
        let table = Tabulated::new(rows.clone()).unwrap();
        let report = menger_embed_test(&table, 3, DEFAULT_TOL).unwrap();
        let oracle = (1..=3).find(|&k| gram_embeds(&rows, k));
        prop_assert_eq!(report.embeddable, oracle.is_some(), "{:?}", report);
        if let Some(k) = oracle {
            prop_assert_eq!(report.dim, k);
        }
        prop_assert_eq!(report.embeddable, report.witness.is_empty());
    }

    #[test]
    fn embeddable_result_is_monotone(n in 1usize..4, pts in points(3, 3..9)) {
        let pts: Vec<Point64> = pts.iter().map(|p| Point::Coords(p.coords().unwrap()[..n].to_vec())).collect();
        let table = Tabulated::from_space(&Euclidean::new(n).unwrap(), &pts).unwrap();
        let report = menger_embed_test(&table, 8, DEFAULT_TOL).unwrap();
        prop_assert!(report.embeddable);
        let ids = table.points();
        let bases = max_volume_bases(&table, &ids, report.dim, DEFAULT_TOL).unwrap();
        prop_assert!(!bases.is_empty());
        for b in bases {
            let frame = ReconstructionFrame::from_sample(&table, &ids, &b).unwrap();
            prop_assert!(verify_conditions(&table, &ids, &frame, DEFAULT_TOL).unwrap().embeddable);
        }
    }
}
