mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spaceform::{
    ball_mesh, decompose, harmonic_diagnostics, interior_restriction, stream_function, truncation_distance, BuiltinForm, Cochain,
    Curvature, Dec, Error, HodgeSplit, SolveConfig, Space,
};

fn dec(a: f64, rho: f64, h: f64) -> Dec {
    Dec::new(ball_mesh(Curvature::new(a).unwrap(), rho, h).unwrap()).unwrap()
}

fn tight() -> SolveConfig {
    SolveConfig { tolerance: 1e-13, ..SolveConfig::default() }
}

#[test]
fn split_matches_dense_projection_oracle() {
    for a in [0.0, 1.0] {
        let d = dec(a, 0.6, 0.2);
        let total = d.complex.num_vertices() + d.complex.num_edges() + d.complex.num_faces();
        assert!(total <= 200, "{total} simplices");
        for form in [BuiltinForm::Mixed, BuiltinForm::Dx] {
            let alpha = form.build(&d, 4).unwrap();
            for kind in [Space::L2, Space::H1] {
                let split = decompose(&d, &alpha, &d.space(kind, 1).unwrap(), &tight()).unwrap();
                let (exact, coexact) = common::projection_oracle(&d, &alpha, kind);
                let scale = alpha.max_abs();
                for e in 0..alpha.len() {
                    assert!((split.exact.values()[e] - exact[e]).abs() <= 1e-8 * scale, "{form} {kind:?} a = {a}");
                    assert!((split.coexact.values()[e] - coexact[e]).abs() <= 1e-8 * scale, "{form} {kind:?} a = {a}");
                }
            }
        }
    }
}

#[test]
fn harmonic_part_is_a_fixed_point() {
    let d = dec(1.0, 1.5, 0.15);
    let alpha = BuiltinForm::Mixed.build(&d, 2).unwrap();
    for kind in [Space::L2, Space::H1] {
        let space = d.space(kind, 1).unwrap();
        let gamma = decompose(&d, &alpha, &space, &tight()).unwrap().gamma;
        let again = decompose(&d, &gamma, &space, &tight()).unwrap().gamma;
        let gap = d.norm(&(&again - &gamma), &space).unwrap() / d.norm(&gamma, &space).unwrap();
        assert!(gap <= 1e-6, "{kind:?}: {gap}");
    }
}

#[test]
fn l2_and_h1_splits_differ_on_curved_meshes() {
    let d = dec(1.0, 1.5, 0.15);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // the builtin mixture vanishes near the boundary, where the two splits coincide, so add full-support noise
    let noise = Cochain::new(1, (0..d.complex.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let alpha = &BuiltinForm::Mixed.build(&d, 8).unwrap() + &noise;
    let l2 = decompose(&d, &alpha, &d.space(Space::L2, 1).unwrap(), &tight()).unwrap().gamma;
    let h1 = decompose(&d, &alpha, &d.space(Space::H1, 1).unwrap(), &tight()).unwrap().gamma;
    let gap = d.l2_norm(&(&l2 - &h1)) / d.l2_norm(&l2);
    assert!(gap > 1e-3, "{gap}");
}

#[test]
fn split_components_are_orthogonal() {
    let d = dec(1.0, 2.0, 0.2);
    let alpha = BuiltinForm::Mixed.build(&d, 1).unwrap();
    for kind in [Space::L2, Space::H1] {
        let s = decompose(&d, &alpha, &d.space(kind, 1).unwrap(), &tight()).unwrap().diagnostics;
        let n2 = s.norm_sq_input;
        for x in [s.inner_exact_coexact, s.inner_exact_harmonic, s.inner_coexact_harmonic, s.pythagoras_defect] {
            assert!(x.abs() <= 1e-10 * n2, "{kind:?}: {x} against {n2}");
        }
        assert!(s.reconstruction_residual <= 1e-12);
    }
}

#[test]
fn other_degrees_split_into_two_parts() {
    let d = dec(1.0, 1.0, 0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in [0, 2] {
        let alpha = interior_restriction(&Cochain::new(k, (0..d.complex.count(k)).map(|_| rng.gen_range(-1.0..1.0)).collect()), &d.complex);
        let space = d.space(Space::H1, k).unwrap();
        let s = decompose(&d, &alpha, &space, &tight()).unwrap();
        assert_eq!(s.beta.is_some(), k == 2);
        assert_eq!(s.omega.is_some(), k == 0);
        assert!(s.diagnostics.pythagoras_defect.abs() <= 1e-10 * s.diagnostics.norm_sq_input);
    }
}

#[test]
fn degree_mismatch_is_rejected() {
    let d = dec(0.0, 1.0, 0.25);
    let alpha = d.sampled_dx();
    assert!(matches!(decompose(&d, &alpha, &d.space(Space::L2, 0).unwrap(), &tight()), Err(Error::Degree(_))));
}

#[test]
fn tiny_mesh_has_nothing_to_solve_for() {
    let d = dec(0.0, 0.3, 0.3);
    let alpha = d.sampled_dx();
    let err = decompose(&d, &alpha, &d.space(Space::L2, 1).unwrap(), &tight()).unwrap_err();
    assert!(matches!(err, Error::Topology(ref m) if m.contains("degenerate")), "{err}");
}

#[test]
fn dx_is_mostly_harmonic_and_more_so_on_finer_meshes() {
    let fractions: Vec<f64> = [(2.0, 0.2), (2.0, 0.1), (3.0, 0.2), (3.0, 0.1)]
        .iter()
        .map(|&(rho, h)| {
            let d = dec(1.0, rho, h);
            let s = decompose(&d, &d.sampled_dx(), &d.space(Space::H1, 1).unwrap(), &SolveConfig::default()).unwrap();
            s.diagnostics.norm_sq_harmonic / s.diagnostics.norm_sq_input
        })
        .collect();
    assert!(fractions.iter().all(|&f| f >= 0.9), "{fractions:?}");
    assert!(fractions[1] > fractions[0] && fractions[3] > fractions[2], "{fractions:?}");
}

#[test]
fn harmonic_energy_is_exact_on_the_unit_triangle_ball() {
    let d = dec(1.0, 1.0, 1.0);
    let gamma = d.sampled_dx();
    let report = harmonic_diagnostics(&d, &gamma, &d.space(Space::H1, 1).unwrap()).unwrap();
    let du = d.l2_norm(&d.d(&gamma).unwrap()).powi(2);
    let su = d.l2_norm(&d.codifferential(&gamma).unwrap()).powi(2);
    assert!((report.energy - (du + su + report.constant * report.norm_sq)).abs() <= 1e-12 * report.energy);
}

#[test]
fn reports_round_trip_and_check_the_mesh() {
    let d = dec(0.0, 1.0, 0.25);
    let split = decompose(&d, &d.sampled_dx(), &d.space(Space::H1, 1).unwrap(), &tight()).unwrap();
    let sum = d.mesh.checksum();
    let text = split.to_json(&sum).unwrap();
    assert_eq!(HodgeSplit::from_json(&text, &sum).unwrap(), split);
    assert!(matches!(HodgeSplit::from_json(&text, "deadbeef"), Err(Error::ChecksumMismatch { .. })));
}

#[test]
fn stream_function_inverts_codifferential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for a in [0.0, 1.0] {
        let d = dec(a, 1.5, 0.15);
        for _ in 0..5 {
            let f = interior_restriction(
                &Cochain::new(2, d.stars.face_areas().iter().map(|area| rng.gen_range(-1.0..1.0) * area).collect()),
                &d.complex,
            );
            let v = d.codifferential(&f).unwrap();
            let v = interior_restriction(&v, &d.complex);
            let r = stream_function(&d, &v, &SolveConfig::default()).unwrap();
            let back = d.codifferential(&r.omega).unwrap();
            assert!((&back - &v).max_abs() <= 1e-10 * v.max_abs());
            for (t, &collar) in d.complex.collar(2).iter().enumerate() {
                if collar {
                    assert_eq!(r.f[t], 0.0);
                }
            }
        }
    }
}

#[test]
fn stream_function_rejects_sources() {
    let d = dec(0.0, 1.0, 0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let beta = interior_restriction(&Cochain::new(0, (0..d.complex.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect()), &d.complex);
    let v = interior_restriction(&d.d(&beta).unwrap(), &d.complex);
    assert!(matches!(stream_function(&d, &v, &SolveConfig::default()), Err(Error::Precondition(_))));
}

#[test]
fn truncation_error_shrinks_with_radius() {
    let d = dec(1.0, 4.0, 0.2);
    let space = d.space(Space::H1, 1).unwrap();
    let gamma = decompose(&d, &d.sampled_dx(), &space, &SolveConfig::default()).unwrap().gamma;
    let dist: Vec<f64> = [1.2, 1.6, 2.0].iter().map(|&r| truncation_distance(&d, &gamma, r, &space).unwrap()).collect();
    assert!(dist[0] > dist[1] && dist[1] > dist[2], "{dist:?}");
    assert!(matches!(truncation_distance(&d, &gamma, 2.5, &space), Err(Error::Domain(_))));
}
