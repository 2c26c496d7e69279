use std::f64::consts::PI;

use orbifold_core::deformation::{preholonomy, StructureFamily};
use orbifold_core::geometry::{Geometry, Isometry, LieVector};
use orbifold_core::rep::{tangent_report, Representation, TangentOptions};
use orbifold_core::Presentation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn family_rep(name: &str) -> Representation {
    let f: StructureFamily = name.parse().unwrap();
    preholonomy(&f.base_structure()).unwrap()
}

fn random_isometry(rng: &mut ChaCha8Rng, g: Geometry, size: f64) -> Isometry {
    let v = [0; 3].map(|_| rng.random_range(-size..size));
    LieVector::new(g, v).unwrap().exp()
}

/// Hyperbolic distance between two points of the Poincaré disk.
fn disk_distance(z: [f64; 2], w: [f64; 2]) -> f64 {
    let d2 = (z[0] - w[0]).powi(2) + (z[1] - w[1]).powi(2);
    let nz = 1.0 - z[0] * z[0] - z[1] * z[1];
    let nw = 1.0 - w[0] * w[0] - w[1] * w[1];
    (1.0 + 2.0 * d2 / (nz * nw)).acosh()
}

#[test]
fn right_isoceles_triangle_closes() {
    // (2,4,4): right angle at the origin, π/4 at (1,0) and (0,1)
    let e = Geometry::Euclidean;
    let a = Isometry::from_rows(e, [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    // quarter turns about (1,0) and (0,1)
    let b = Isometry::from_rows(e, [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [0.0, 0.0, 1.0]]).unwrap();
    let c = Isometry::from_rows(e, [[0.0, -1.0, 1.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]]).unwrap();
    let r = family_rep("euclidean_triangle(2,4,4)");
    for (got, want) in r.images.iter().zip([a, b, c]) {
        assert!(got.distance(&want) < 1e-12, "{got:?} vs {want:?}");
    }
    assert!(r.relation_residual().unwrap() <= 1e-12);
}

#[test]
fn hyperbolic_triangle_side_lengths() {
    for (p, q, r) in [(2u64, 3u64, 7u64), (3, 3, 4), (2, 4, 5)] {
        let name = format!("hyperbolic_triangle({p},{q},{r})");
        let rep = family_rep(&name);
        assert!(rep.relation_residual().unwrap() <= 1e-10, "{name}");
        let centers: Vec<[f64; 2]> = rep
            .images
            .iter()
            .map(|h| {
                let (c, _) = h.rotation_data().unwrap();
                [c[0], c[1]]
            })
            .collect();
        let (a, b, c) = (PI / p as f64, PI / q as f64, PI / r as f64);
        let law = |x: f64, y: f64, z: f64| ((x.cos() * y.cos() + z.cos()) / (x.sin() * y.sin())).acosh();
        assert!((disk_distance(centers[0], centers[1]) - law(a, b, c)).abs() < 1e-10);
        assert!((disk_distance(centers[0], centers[2]) - law(a, c, b)).abs() < 1e-10);
        assert!((disk_distance(centers[1], centers[2]) - law(b, c, a)).abs() < 1e-10);
    }
}

#[test]
fn residual_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["euclidean_pillowcase", "hyperbolic_triangle(2,3,7)", "flat_torus", "euclidean_triangle(3,3,3)"] {
        let r = family_rep(name);
        let base = r.relation_residual().unwrap();
        for _ in 0..100 {
            let g = random_isometry(&mut rng, r.geometry, 0.5);
            let moved = r.conjugate(&g).unwrap().relation_residual().unwrap();
            assert!((moved - base).abs() <= 1e-11, "{name}: {base:e} -> {moved:e}");
        }
    }
    // off the variety, translations commute with the translational defect
    let mut r = family_rep("euclidean_pillowcase");
    r.images[2] = Isometry::rotation_about(Geometry::Euclidean, &[1.1, 1.0], PI).unwrap();
    let base = r.relation_residual().unwrap();
    assert!((base - 0.2).abs() < 1e-12);
    let moved = r.conjugate(&Isometry::translation(3.0, -2.0)).unwrap().relation_residual().unwrap();
    assert!((moved - base).abs() <= 1e-11);
}

#[test]
fn tangent_dimensions() {
    let opts = TangentOptions::default();
    let cases = [
        ("hyperbolic_triangle(2,3,7)", (3, 3, 0)),
        ("euclidean_pillowcase", (6, 3, 3)),
        ("flat_torus", (4, 1, 3)),
    ];
    for (name, dims) in cases {
        let t = tangent_report(&family_rep(name), &opts).unwrap();
        assert_eq!((t.dim_z1, t.dim_b1, t.dim_h1), dims, "{name}: {:?}", t.singular_values);
        assert!(!t.rank_ambiguous, "{name}");
    }
    let t = tangent_report(&family_rep("hyperbolic_triangle(2,3,7)"), &opts).unwrap();
    assert!(t.spectral_gap.is_none_or(|g| g >= 1e4), "{:?}", t.singular_values);
}

#[test]
fn coboundaries_are_cocycles() {
    let step = 1e-5;
    for name in ["hyperbolic_triangle(2,3,7)", "euclidean_pillowcase", "euclidean_triangle(2,3,6)", "flat_torus"] {
        let r = family_rep(name);
        let j = r.relation_jacobian(step).unwrap();
        let b = r.coboundary_matrix();
        let jb = (&j * &b).amax();
        assert!(jb <= 10.0 * step * step, "{name}: {jb:e}");
    }
}

#[test]
fn dimensions_survive_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = TangentOptions::default();
    for name in ["hyperbolic_triangle(2,3,7)", "euclidean_pillowcase"] {
        let r = family_rep(name);
        let t0 = tangent_report(&r, &opts).unwrap();
        for _ in 0..100 {
            let g = random_isometry(&mut rng, r.geometry, 0.5);
            let t = tangent_report(&r.conjugate(&g).unwrap(), &opts).unwrap();
            assert_eq!((t.dim_z1, t.dim_b1, t.dim_h1), (t0.dim_z1, t0.dim_b1, t0.dim_h1), "{name}");
        }
    }
}

#[test]
fn finite_differences_converge_quadratically() {
    let r = family_rep("hyperbolic_triangle(2,3,7)");
    let h = 1e-3;
    let sv = |step: f64| -> Vec<f64> {
        let opts = TangentOptions { fd_step: step, ..TangentOptions::default() };
        tangent_report(&r, &opts).unwrap().singular_values
    };
    let (s1, s2, s3) = (sv(h), sv(h / 2.0), sv(h / 4.0));
    let mut checked = 0;
    for k in 0..s1.len() {
        let d1 = (s1[k] - s2[k]).abs();
        let d2 = (s2[k] - s3[k]).abs();
        // quadratic convergence predicts d1 / d2 ≈ 4; below 1e-12 roundoff dominates
        if d2 > 1e-12 {
            assert!(d1 / d2 <= 8.0 && d1 / d2 >= 0.5, "σ{k}: {d1:e} {d2:e}");
            checked += 1;
        }
    }
    // the six nonzero singular values (rank of the 12×9 Jacobian)
    assert!(checked >= 6, "only {checked} singular values moved");
}

#[test]
fn free_presentations_have_full_cocycle_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let p = Presentation::parse(&refs, &[]).unwrap();
        for g in Geometry::ALL {
            let images = (0..n).map(|_| random_isometry(&mut rng, g, 1.0)).collect();
            let r = Representation::new(p.clone(), g, images).unwrap();
            let t = tangent_report(&r, &TangentOptions::default()).unwrap();
            assert_eq!(t.dim_z1, 3 * n);
            assert!(t.dim_b1 <= 3);
        }
    }
}
