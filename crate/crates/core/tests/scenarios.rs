use std::f64::consts::PI;

use rand::Rng;

use mirror_billiards::bodies::{
    body_volume, make_invisible_union, make_two_dir_body, parse_body_file, two_dir_volume_exact,
    write_body_file, Body,
};
use mirror_billiards::export::{
    segments, tessellate, trajectory_svg, write_segments_csv, write_stl, Plane, SvgOptions,
};
use mirror_billiards::measures::{cross_section, sample_cross_section, sample_mu_minus};
use mirror_billiards::metrics::phase_volume_audit;
use mirror_billiards::sampling::{sample_rng, RunningStats};
use mirror_billiards::{
    trace_line, AmbientBody, McOptions, TraceLimits, TraceStatus, Vec3, DESIGN_DIR_Y,
};

#[test]
fn two_dir_mesh_volume_matches_membership_volume() {
    let body = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
    let mesh = tessellate(&body, 1e-3).unwrap();
    assert!(mesh.is_watertight());
    let mc = body_volume(&body, &McOptions::new(400_000, 3));
    let v = mesh.signed_volume();
    assert!((v - mc.value).abs() / mc.value < 0.01, "mesh {v} mc {mc:?}");
    // Faces stay within the chordal tolerance of the surface.
    let area: f64 = mesh
        .triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
            0.5 * (b - a).cross(c - a).norm()
        })
        .sum();
    let exact = two_dir_volume_exact(&body.spec.unwrap());
    assert!(
        (v - exact).abs() <= area * 1e-3,
        "mesh {v} exact {exact} area {area}"
    );
}

#[test]
fn union_mesh_has_two_pieces_per_copy() {
    let body = make_invisible_union(1.0, 1.0, 0.6).unwrap();
    let mesh = tessellate(&body, 1e-3).unwrap();
    assert!(mesh.is_watertight());
    assert_eq!(mesh.connected_components(), 8);
    let single = tessellate(&make_two_dir_body(1.0, 1.0, 0.6).unwrap(), 1e-3).unwrap();
    assert_eq!(single.connected_components(), 2);
    assert!((mesh.signed_volume() - 4.0 * single.signed_volume()).abs() < 1e-12);
}

#[test]
fn halving_tolerance_refines_mesh() {
    let body = make_two_dir_body(1.0, 1.0, 0.4).unwrap();
    let mut last = 0;
    for tol in [4e-3, 2e-3, 1e-3, 5e-4] {
        let n = tessellate(&body, tol).unwrap().triangles.len();
        assert!(n > last, "tol {tol}: {n} triangles");
        last = n;
    }
}

#[test]
fn stl_file_round_trips_triangle_count() {
    let body = make_invisible_union(1.0, 1.0, 0.4).unwrap();
    let mesh = tessellate(&body, 1e-3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("union.stl");
    write_stl(std::fs::File::create(&path).unwrap(), &mesh).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    assert_eq!(n, mesh.triangles.len());
    assert_eq!(bytes.len(), 84 + 50 * n);
}

#[test]
fn union_trace_figure_has_four_reflections_on_the_entry_line() {
    let body = make_invisible_union(1.0, 1.0, 0.6).unwrap();
    let c = AmbientBody::sphere(4.0);
    let r = trace_line(
        &body,
        &c,
        Vec3::new(0.8, 0.0, 0.2),
        DESIGN_DIR_Y,
        &TraceLimits::recording(),
    )
    .unwrap();
    let poly = r.polyline.clone().unwrap();
    assert_eq!(poly.len(), 6);
    let (entry, exit) = (poly[0], poly[5]);
    assert!((exit - entry).reject(DESIGN_DIR_Y).norm() < 1e-9);
    // Reflections alternate between x = 0.8 and x = -0.8 at z = 0.2.
    let xs: Vec<f64> = poly[1..5].iter().map(|p| p.x).collect();
    for (x, want) in xs.iter().zip([0.8, -0.8, -0.8, 0.8]) {
        assert!((x - want).abs() < 1e-9, "{xs:?}");
    }
    let svg = trajectory_svg(
        &body,
        &c,
        &poly,
        &SvgOptions {
            plane: Plane::XY,
            slice: 0.2,
            ..SvgOptions::default()
        },
    );
    assert_eq!(svg.matches(r#"r="3" fill="black""#).count(), 4);
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn empty_body_trace_is_one_segment() {
    let c = AmbientBody::sphere(1.0);
    let r = trace_line(
        &Body::empty(),
        &c,
        Vec3::ZERO,
        DESIGN_DIR_Y,
        &TraceLimits::recording(),
    )
    .unwrap();
    let segs = segments(r.polyline.as_ref().unwrap(), r.status);
    assert_eq!(segs.len(), 1);
    assert!((segs[0].segment_length - 2.0).abs() < 1e-15);
}

#[test]
fn wedge_trace_csv_is_flagged_trapped() {
    let body = mirror_billiards::bodies::make_wedge(0.02, 1.0);
    let c = AmbientBody::sphere(3.0);
    let r = trace_line(
        &body,
        &c,
        Vec3::new(0.003, 0.5, 0.0),
        DESIGN_DIR_Y,
        &TraceLimits::recording(),
    )
    .unwrap();
    assert_eq!(r.status, TraceStatus::Trapped);
    let mut buf = Vec::new();
    write_segments_csv(&mut buf, &segments(r.polyline.as_ref().unwrap(), r.status)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",Trapped")));
}

#[test]
fn body_file_round_trip_traces_identically() {
    let body = make_invisible_union(1.0, 1.0, 0.6).unwrap();
    let reread =
        Body::from_patches(parse_body_file(&write_body_file(&body.patches)).unwrap()).unwrap();
    let c = AmbientBody::sphere(4.0);
    let limits = TraceLimits::default();
    let mut rng = sample_rng(5, 0, 0);
    for _ in 0..2000 {
        let s = sample_mu_minus(&c, &mut rng);
        let a = mirror_billiards::trace(&body, &c, s.xi, s.v, &limits).unwrap();
        let b = mirror_billiards::trace(&reread, &c, s.xi, s.v, &limits).unwrap();
        assert_eq!(a, b);
    }
    // Parity membership agrees with the closed form away from the surface.
    for _ in 0..20_000 {
        let p = Vec3::new(
            rng.random_range(-1.1..1.1),
            rng.random_range(-2.4..0.9),
            rng.random_range(-2.4..0.9),
        );
        assert_eq!(body.contains(p), reread.contains(p), "{p}");
    }
}

#[test]
fn flux_measure_total_mass_and_face_shares() {
    let sphere = AmbientBody::sphere(1.0);
    let s = sample_mu_minus(&sphere, &mut sample_rng(1, 0, 0));
    assert!((s.weight - 4.0 * PI * PI).abs() < 1e-12);

    let cube = AmbientBody::Box {
        min: Vec3::new(0.0, 0.0, 0.0),
        max: Vec3::new(1.0, 2.0, 3.0),
    };
    let n = 60_000;
    let mut per_axis = [0u32; 3];
    let mut rng = sample_rng(2, 0, 0);
    for _ in 0..n {
        let s = sample_mu_minus(&cube, &mut rng);
        assert!(cube.normal(s.xi).dot(*s.v) <= 0.0);
        let nrm = cube.normal(s.xi);
        let axis = (0..3).find(|&i| nrm.to_array()[i] != 0.0).unwrap();
        per_axis[axis] += 1;
    }
    // Face pairs have areas 2*6, 2*3, 2*2 out of 22.
    for (count, area) in per_axis.iter().zip([12.0, 6.0, 4.0]) {
        let p = area / 22.0;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((*count as f64 / n as f64 - p).abs() < 4.0 * sd);
    }
}

#[test]
fn sphere_mean_chord_is_four_thirds() {
    let c = AmbientBody::sphere(1.0);
    let cs = cross_section(&c, DESIGN_DIR_Y);
    let mut stats = RunningStats::default();
    let mut rng = sample_rng(4, 0, 0);
    for _ in 0..200_000 {
        let q = cs.sample_omega(&mut rng);
        let (lo, hi) = cs.heights(q).unwrap();
        stats.push(hi - lo);
    }
    assert!((stats.mean() - 4.0 / 3.0).abs() < 3.0 * stats.stderr());

    let big = cross_section(&AmbientBody::sphere(2.0), DESIGN_DIR_Y);
    let rim = (2.0, 0.0);
    let (lo, hi) = big.heights(rim).unwrap();
    assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12);
    let p = sample_cross_section(&big, &mut rng);
    assert!(big.v.dot(AmbientBody::sphere(2.0).normal(p).get()) <= 1e-12);
}

#[test]
fn displacement_integral_never_exceeds_path_integral() {
    let c = AmbientBody::sphere(3.0);
    for body in [
        make_two_dir_body(1.0, 1.0, 0.6).unwrap(),
        make_two_dir_body(1.0, 1.0, 0.4).unwrap(),
    ] {
        let r = phase_volume_audit(
            &body,
            &c,
            &McOptions::new(50_000, 8),
            &TraceLimits::default(),
        );
        assert!(r.displacement_integral.value <= r.l_body.value);
        assert_eq!(r.counts.length_violations, 0);
    }
}
