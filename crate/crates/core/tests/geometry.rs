use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pa_core::env::{uniform_in_ball, uniform_on_sphere};
use pa_core::geometry::{
    centroid_cyl, hit_and_run, ConvexBody, Cylinder, DirectionBasis, Halfspace, KeepSide, SamplerConfig,
};

/// Random cuts keeping `anchor` strictly inside; some bodies end up as
/// polytopes inside the ball, others keep pieces of the sphere.
fn random_body(d: usize, anchor: &DVector<f64>, rng: &mut ChaCha8Rng) -> ConvexBody {
    let cuts = rng.gen_range(1..=6);
    let halfspaces: Vec<Halfspace> = (0..cuts)
        .map(|_| {
            let w = uniform_on_sphere(d, rng);
            let offset = anchor.dot(&w) + rng.gen_range(0.02..0.6);
            Halfspace {
                normal: w.as_slice().to_vec(),
                offset,
            }
        })
        .collect();
    ConvexBody::from_halfspaces(d, &halfspaces).unwrap()
}

fn grid_points(body: &ConvexBody, n: usize) -> Vec<DVector<f64>> {
    let h = 2.0 / n as f64;
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = DVector::from_vec(vec![-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h]);
            if body.contains(&p, 0.0) {
                pts.push(p);
            }
        }
    }
    pts
}

#[test]
fn support_is_attained_and_never_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 2..=4 {
        for _ in 0..20 {
            let anchor = uniform_in_ball(d, &mut rng) * 0.5;
            let body = random_body(d, &anchor, &mut rng);
            let samples = hit_and_run(&body, &SamplerConfig { samples: 300, ..Default::default() }, &mut rng);
            for _ in 0..5 {
                let w = uniform_on_sphere(d, &mut rng);
                let (h, x) = body.support_point(&w).unwrap();
                assert!((x.dot(&w) - h).abs() < 1e-9);
                assert!(body.contains(&x, 1e-8));
                assert!(samples.iter().all(|s| s.dot(&w) <= h + 1e-9));
                let width = body.projected_diameter(&w).unwrap();
                assert!((width - (h + body.support(&-&w).unwrap())).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn cuts_through_the_centroid_keep_a_constant_fraction() {
    // a centroid cut leaves at least 1/e of the area on each side; a noisy
    // centroid loses a little, so check a slightly lower floor
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = SamplerConfig::default();
    for _ in 0..10 {
        let anchor = uniform_in_ball(2, &mut rng) * 0.4;
        let body = random_body(2, &anchor, &mut rng);
        let basis = DirectionBasis::new(2, 1e-9).unwrap();
        let c = centroid_cyl(&body, &basis, &cfg, &mut rng).unwrap();
        let pts = grid_points(&body, 600);
        for _ in 0..4 {
            let w = uniform_on_sphere(2, &mut rng);
            let b = c.dot(&w);
            let below = pts.iter().filter(|p| p.dot(&w) <= b).count() as f64 / pts.len() as f64;
            assert!(below > 0.33 && below < 0.67, "fraction {below}");
            let kept = body.cut(&w, b, KeepSide::Below).unwrap();
            assert!(kept.contains(&c, 1e-9));
        }
    }
}

#[test]
fn consistent_cuts_never_lose_the_hidden_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 2..=3 {
        let hidden = uniform_in_ball(d, &mut rng) * 0.9;
        let mut body = ConvexBody::ball(d);
        for _ in 0..60 {
            let w = uniform_on_sphere(d, &mut rng);
            let lo = -body.support(&-&w).unwrap();
            let hi = body.support(&w).unwrap();
            let b = lo + rng.gen_range(0.2..0.8) * (hi - lo);
            let side = if hidden.dot(&w) <= b { KeepSide::Below } else { KeepSide::Above };
            body = body.cut(&w, b, side).unwrap();
            assert!(body.contains(&hidden, 1e-9));
        }
        // 60 halvings shrink the body to a speck around the hidden point
        for i in 0..d {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            assert!(body.projected_diameter(&e).unwrap() < 1e-3);
        }
    }
}

#[test]
fn cylinder_contains_body_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let cfg = SamplerConfig { samples: 500, ..Default::default() };
    for d in 2..=4 {
        let anchor = uniform_in_ball(d, &mut rng) * 0.5;
        let body = random_body(d, &anchor, &mut rng);
        let mut basis = DirectionBasis::new(d, 1e-3).unwrap();
        basis.push(uniform_on_sphere(d, &mut rng)).unwrap();
        let cyl = Cylinder::new(&body, &basis).unwrap();
        for x in hit_and_run(&body, &cfg, &mut rng) {
            assert!(cyl.contains(&body, &x, &x, 1e-9));
        }
    }
}

#[test]
fn json_round_trip_preserves_queries() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let anchor = uniform_in_ball(3, &mut rng) * 0.5;
    let body = random_body(3, &anchor, &mut rng);
    let back = ConvexBody::from_json(&body.to_json()).unwrap();
    for _ in 0..10 {
        let w = uniform_on_sphere(3, &mut rng);
        assert!((body.support(&w).unwrap() - back.support(&w).unwrap()).abs() < 1e-12);
    }
}
