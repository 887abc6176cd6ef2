//! Property tests across modules.

use hexcurv::conformal::Family;
use hexcurv::curvature::curvature_map_with;
use hexcurv::exec::Exec;
use hexcurv::hexagon::{
    angles_from_lengths, lengths_from_angles, split_edge, split_sinh, HexLengths,
};
use hexcurv::lorentz::{minkowski_cross, minkowski_dot, MinkowskiVec};
use hexcurv::mesh::{parse, serialize};
use hexcurv::sampling::{self, chart_box, face_structure, rng};
use proptest::prelude::*;
use rand::Rng;

fn vec3() -> impl Strategy<Value = MinkowskiVec> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, c)| MinkowskiVec::new(a, b, c))
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #[test]
    fn dot_is_symmetric_and_bilinear(a in vec3(), b in vec3(), c in vec3(), s in -3.0..3.0f64) {
        prop_assert_eq!(minkowski_dot(a, b), minkowski_dot(b, a));
        let lhs = minkowski_dot(a * s + b, c);
        let rhs = s * minkowski_dot(a, c) + minkowski_dot(b, c);
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn cross_is_orthogonal(a in vec3(), b in vec3()) {
        let c = minkowski_cross(a, b);
        let scale = 1.0 + a.euclid_norm() * b.euclid_norm() * (a.euclid_norm() + b.euclid_norm());
        prop_assert!(minkowski_dot(a, c).abs() < 1e-12 * scale);
        prop_assert!(minkowski_dot(b, c).abs() < 1e-12 * scale);
    }

    #[test]
    fn cosine_law_round_trip(a in 0.2..4.0f64, b in 0.2..4.0f64, c in 0.2..4.0f64) {
        let l = HexLengths::new(a, b, c);
        let back = lengths_from_angles(angles_from_lengths(l).unwrap()).unwrap();
        for (x, y) in l.as_array().iter().zip(back.as_array()) {
            prop_assert!((x - y).abs() < 1e-9 * x.max(1.0), "{x} {y}");
        }
    }

    #[test]
    fn real_splits_keep_ratio_and_length(l in 0.05..8.0f64, rho in prop_oneof![-20.0..-0.05f64, 0.05..20.0f64]) {
        let ((a, b), complex) = split_sinh(l, rho);
        prop_assert!((a - rho * b).abs() <= 1e-12 * a.abs().max(1.0));
        match split_edge(l, rho) {
            Ok(s) => {
                prop_assert!(!complex);
                prop_assert!((s.d_ij + s.d_ji - l).abs() < 1e-12 * l.max(1.0));
                let r = s.d_ij.sinh() / s.d_ji.sinh();
                prop_assert!((r - rho).abs() < 1e-9 * rho.abs().max(1.0), "{r} {rho}");
            }
            Err(_) => prop_assert!(complex),
        }
    }

    #[test]
    fn charts_round_trip(fam in family(), seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let fs = face_structure(fam, &mut r);
        for c in fs.charts().unwrap() {
            let (lo, hi) = chart_box(c);
            let u = r.random_range(lo..hi);
            if let Ok(f) = c.f_from_u(u) {
                let back = c.u_from_f(f).unwrap();
                prop_assert!((back - u).abs() < 1e-9 * u.abs().max(1.0), "{c:?} {u} {back}");
            }
        }
    }

    #[test]
    fn admissible_iff_lengths_exist(fam in family(), seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let fs = face_structure(fam, &mut r);
        let c = fs.charts().unwrap();
        let u: [f64; 3] = std::array::from_fn(|k| {
            let (lo, hi) = chart_box(c[k]);
            r.random_range(lo..hi)
        });
        if let Ok(f) = fs.f_from_u(u) {
            prop_assert_eq!(fs.is_admissible(u), fs.lengths(f).is_ok(), "{:?} {:?}", fs, u);
        }
    }

    #[test]
    fn length_derivatives_match_differences(fam in family(), seed in any::<u64>()) {
        let s = sampling::interior_face_sample(fam, &mut rng(seed, 0));
        let h = 1e-6;
        for e in 0..3 {
            let (a, b) = (e, (e + 1) % 3);
            let ev = s.structure.edge(e, s.f).unwrap();
            let (da, db) = ev.dl_df();
            for (corner, d) in [(a, da), (b, db)] {
                let (mut p, mut m) = (s.f, s.f);
                p[corner] += h;
                m[corner] -= h;
                let (Ok(lp), Ok(lm)) = (s.structure.edge(e, p), s.structure.edge(e, m)) else { continue };
                let fd = (lp.l - lm.l) / (2.0 * h);
                prop_assert!((fd - d).abs() < 1e-5 * d.abs().max(1.0), "{fam} edge {e} corner {corner}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn mesh_text_round_trip(fam in family(), n in 4usize..20, seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let tri = sampling::random_mesh(n, &mut r);
        prop_assert_eq!(tri.faces.len(), 2 * n - 4);
        prop_assert_eq!(tri.edges.len(), 3 * n - 6);
        let spec = sampling::random_spec(fam, &tri, false, &mut r);
        let text = serialize(&tri, &spec);
        let (tri2, spec2) = parse(&text).unwrap();
        prop_assert_eq!(serialize(&tri2, &spec2), text);
    }

    #[test]
    fn exec_modes_are_bit_identical(fam in family(), n in 4usize..30, seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let tri = sampling::random_mesh(n, &mut r);
        let spec = sampling::random_spec(fam, &tri, false, &mut r);
        let Some(u) = sampling::admissible_point(&spec, &tri, 5, &mut r) else { return Ok(()) };
        let f = spec.f_from_u(&u).unwrap();
        let seq = curvature_map_with(&spec, &tri, &f, Exec::Sequential).unwrap();
        let par = curvature_map_with(&spec, &tri, &f, Exec::Parallel).unwrap();
        prop_assert_eq!(seq.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), par.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }
}
