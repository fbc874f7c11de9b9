use proptest::prelude::*;
use spaceform::geometry::{heron, CutoffProfile};
use spaceform::{ball_mesh, build_complex, cutoff_cochain, distance, triangle_area, Curvature, DiskPoint, Error};

const CURVATURES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| DiskPoint::new(r * t.cos(), r * t.sin()))
}

proptest! {
    #[test]
    fn distance_is_symmetric(p in point(), q in point(), ai in 0usize..4) {
        let a = Curvature::new(CURVATURES[ai]).unwrap();
        let d1 = distance(p, q, a).unwrap();
        let d2 = distance(q, p, a).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
        prop_assert!(d1 >= 0.0);
    }

    #[test]
    fn distance_satisfies_triangle_inequality(p in point(), q in point(), r in point(), ai in 0usize..4) {
        let a = Curvature::new(CURVATURES[ai]).unwrap();
        let pq = distance(p, q, a).unwrap();
        let qr = distance(q, r, a).unwrap();
        let pr = distance(p, r, a).unwrap();
        prop_assert!(pr <= pq + qr + 1e-12 * (pq + qr).max(1.0));
    }

    #[test]
    fn tiny_hyperbolic_triangles_match_heron(l1 in 1e-4..1e-3f64, l2 in 1e-4..1e-3f64, t in 0.05..0.95f64) {
        // third side strictly inside the triangle-inequality range
        let l3 = (l1 - l2).abs() + t * (l1 + l2 - (l1 - l2).abs());
        let flat = heron(l1, l2, l3);
        let hyp = triangle_area(l1, l2, l3, Curvature::new(1.0).unwrap()).unwrap();
        prop_assert!((hyp - flat).abs() <= 1e-5 * flat);
    }

    #[test]
    fn cutoff_profile_sits_between_indicators(t in 0.0..4.0f64) {
        let v = CutoffProfile.value(t);
        let lower = if t < 1.0 { 1.0 } else { 0.0 };
        let upper = if t < 2.0 { 1.0 } else { 0.0 };
        prop_assert!(lower <= v && v <= upper);
        prop_assert!(CutoffProfile.derivative(t).abs() <= CutoffProfile::MAX_SLOPE);
    }
}

#[test]
fn ball_area_matches_closed_form() {
    let m = ball_mesh(Curvature::new(1.0).unwrap(), 3.0, 0.1).unwrap();
    let exact = 2.0 * std::f64::consts::PI * (3f64.cosh() - 1.0);
    assert!((m.total_area() - exact).abs() <= 0.02 * exact, "{} vs {exact}", m.total_area());
}

#[test]
fn single_ring_ball() {
    let m = ball_mesh(Curvature::FLAT, 0.3, 0.3).unwrap();
    assert_eq!(m.vertices().len(), 7);
    assert!(m.vertices()[0].norm_sq() < 1e-30);
}

#[test]
fn small_flat_ball_boundary_is_a_cycle() {
    let m = ball_mesh(Curvature::FLAT, 0.2, 0.1).unwrap();
    let c = build_complex(&m).unwrap();
    let bv = c.boundary_vertices().iter().filter(|&&b| b).count();
    let be = c.boundary_edges().iter().filter(|&&b| b).count();
    assert_eq!(bv, be);
    assert_eq!(c.euler_characteristic(), 1);
}

#[test]
fn generated_meshes_respect_edge_bounds_and_orientation() {
    for (a, rho, h) in [(0.0, 2.0, 0.2), (0.5, 3.0, 0.25), (1.0, 2.0, 0.1), (2.0, 1.5, 0.1)] {
        let m = ball_mesh(Curvature::new(a).unwrap(), rho, h).unwrap();
        let spacing = rho / (rho / h).round();
        for t in m.triangles() {
            let [p, q, r] = t.map(|v| m.vertices()[v]);
            assert!((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x) > 0.0);
            for i in 0..3 {
                let l = m.edge_length(t[i], t[(i + 1) % 3]);
                assert!((0.5 * spacing..=2.0 * spacing).contains(&l), "edge {l} for h {spacing}");
            }
        }
        assert!((m.max_radius() - rho).abs() < 1e-9 * rho);
    }
}

#[test]
fn cutoff_slope_is_bounded_by_two_over_r() {
    let m = ball_mesh(Curvature::new(1.0).unwrap(), 6.0, 0.15).unwrap();
    let c = build_complex(&m).unwrap();
    for r in [1.5, 2.0, 2.5, 3.0] {
        let phi = cutoff_cochain(&m, r).unwrap();
        for &[p, q] in c.edges() {
            let slope = (phi.values()[p] - phi.values()[q]).abs() / m.edge_length(p, q);
            assert!(slope <= 2.0 / r, "slope {slope} at R = {r}");
        }
    }
}

#[test]
fn points_outside_the_disk_are_rejected() {
    let a = Curvature::new(0.5).unwrap();
    assert!(matches!(distance(DiskPoint::new(0.8, 0.8), DiskPoint::ORIGIN, a), Err(Error::Domain(_))));
    assert!(distance(DiskPoint::new(3.0, 4.0), DiskPoint::ORIGIN, Curvature::FLAT).is_ok());
}
