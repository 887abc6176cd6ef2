//! Seeded samplers for faces, hexagons, meshes and admissible points.
//!
//! Every sampler takes an explicit RNG. [`rng`] derives independent streams from one
//! seed so parallel callers can draw sample `n` from stream `n` and stay reproducible.

use crate::conformal::{FaceStructure, Family, StructureSpec, VertexChart};
use crate::curvature::{dtheta_df, Branch};
use crate::hexagon::{HexLengths, HexagonGeometry};
use crate::lorentz::{CausalClass, MinkowskiVec};
use crate::mesh::{Edge, Face, Triangulation};
use crate::solver::default_initial;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;

/// Stream `stream` of the generator seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const REJECTION_TRIES: usize = 20_000;

/// Range of edge weights drawn for a family.
pub fn eta_range(family: Family) -> (f64, f64) {
    match family {
        Family::A1 => (1.2, 4.0),
        Family::A2 => (-0.9, 2.0),
        Family::A3 | Family::MixedIII => (0.5, 3.0),
        Family::MixedII => (1.0, 3.0),
        Family::MixedI => (1.2, 3.0),
    }
}

fn alpha_choice(family: Family, rng: &mut impl Rng) -> i8 {
    family
        .forced_alpha()
        .unwrap_or_else(|| *[-1i8, 0, 1].choose(rng).unwrap_or(&0))
}

/// A valid face structure of `family`; mixed faces get a random special corner.
pub fn face_structure(family: Family, rng: &mut impl Rng) -> FaceStructure {
    let (lo, hi) = eta_range(family);
    loop {
        let alpha = [0; 3].map(|_| alpha_choice(family, rng));
        let mut eta = [0; 3].map(|_| rng.random_range(lo..hi));
        let special = family.is_mixed().then(|| rng.random_range(0..3usize));
        if let (Family::MixedIII, Some(r)) = (family, special) {
            // B-edges `r` and `r + 2` may be negative when they outweigh the opposite edge.
            let opposite = eta[(r + 1) % 3];
            for e in [r, (r + 2) % 3] {
                if rng.random_bool(0.5) {
                    eta[e] = -opposite - rng.random_range(0.0..1.5);
                }
            }
        }
        let fs = FaceStructure::plain(family, alpha, eta).with_special(special);
        if fs.validate().is_ok() {
            return fs;
        }
    }
}

/// Sampling box of one chart in `u`.
pub fn chart_box(c: VertexChart) -> (f64, f64) {
    let (lo, hi) = c.u_domain();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (false, true) => (hi - 3.0, hi),
        (true, false) => (lo, lo + 3.0),
        (false, false) => (-3.0, 3.0),
    }
}

fn open_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if x > lo {
            return x;
        }
    }
}

/// A uniform admissible point of the face by rejection in the chart box.
pub fn admissible_u(fs: &FaceStructure, rng: &mut impl Rng) -> Option<[f64; 3]> {
    let boxes = fs.charts().ok()?.map(chart_box);
    for _ in 0..REJECTION_TRIES {
        let u = boxes.map(|(lo, hi)| open_uniform(rng, lo, hi));
        if fs.is_admissible(u) && fs.f_from_u(u).and_then(|f| fs.lengths(f)).is_ok() {
            return Some(u);
        }
    }
    None
}

/// A point at distance at most `dist` from the boundary of the admissible set, inside it.
///
/// Walks from `u0` along a random direction to the boundary by bisection.
pub fn near_boundary(
    fs: &FaceStructure,
    u0: [f64; 3],
    dist: f64,
    rng: &mut impl Rng,
) -> Option<[f64; 3]> {
    let ok =
        |u: [f64; 3]| fs.is_admissible(u) && fs.f_from_u(u).and_then(|f| fs.lengths(f)).is_ok();
    for _ in 0..100 {
        let mut d = [0; 3].map(|_| rng.random_range(-1.0..1.0f64));
        let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-3 {
            continue;
        }
        d = d.map(|x| x / n);
        let at = |t: f64| [u0[0] + t * d[0], u0[1] + t * d[1], u0[2] + t * d[2]];
        let Some(mut hi) = [0.5, 1.0, 2.0, 4.0, 8.0].into_iter().find(|t| !ok(at(*t))) else {
            continue;
        };
        let mut lo = 0.0;
        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if ok(at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = lo - rng.random_range(0.0..dist);
        if t > 0.0 && ok(at(t)) {
            return Some(at(t));
        }
    }
    None
}

/// A face structure with an admissible point and its factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceSample {
    pub structure: FaceStructure,
    pub u: [f64; 3],
    pub f: [f64; 3],
}

/// A random face of `family` at a random admissible point; `near` puts the point within that
/// distance of the admissible boundary.
pub fn face_sample(family: Family, near: Option<f64>, rng: &mut impl Rng) -> FaceSample {
    loop {
        let fs = face_structure(family, rng);
        let Some(mut u) = admissible_u(&fs, rng) else {
            continue;
        };
        if let Some(dist) = near {
            match near_boundary(&fs, u, dist, rng) {
                Some(v) => u = v,
                None => continue,
            }
        }
        if let Ok(f) = fs.f_from_u(u) {
            return FaceSample {
                structure: fs,
                u,
                f,
            };
        }
    }
}

fn branch_at(fs: &FaceStructure, u: [f64; 3]) -> Option<Branch> {
    fs.f_from_u(u)
        .and_then(|f| dtheta_df(fs, f))
        .ok()
        .map(|d| d.branch)
}

/// A face of `family` whose center lies on the light cone.
///
/// Bisects along a segment between admissible points with time-like and space-like centers.
/// Returns `None` if no face with both classes turns up within `tries` structures.
pub fn light_like_face(family: Family, tries: usize, rng: &mut impl Rng) -> Option<FaceSample> {
    for _ in 0..tries {
        let fs = face_structure(family, rng);
        let (mut time, mut space) = (None, None);
        for _ in 0..40 {
            let Some(u) = admissible_u(&fs, rng) else {
                break;
            };
            match branch_at(&fs, u) {
                Some(Branch::TimeLike) => time = Some(u),
                Some(Branch::SpaceLike) => space = Some(u),
                Some(Branch::LightLike) => {
                    return Some(FaceSample {
                        structure: fs,
                        u,
                        f: fs.f_from_u(u).ok()?,
                    })
                }
                _ => {}
            }
            if time.is_some() && space.is_some() {
                break;
            }
        }
        let (Some(a), Some(b)) = (time, space) else {
            continue;
        };
        let at = |t: f64| [0, 1, 2].map(|r| a[r] + t * (b[r] - a[r]));
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match branch_at(&fs, at(mid)) {
                Some(Branch::LightLike) => {
                    let u = at(mid);
                    return Some(FaceSample {
                        structure: fs,
                        u,
                        f: fs.f_from_u(u).ok()?,
                    });
                }
                Some(Branch::TimeLike) => lo = mid,
                Some(Branch::SpaceLike) => hi = mid,
                _ => break,
            }
            if (hi - lo).abs() < f64::EPSILON {
                break;
            }
        }
    }
    None
}

/// Distance kept from chart singularities by [`interior_face_sample`].
pub const INTERIOR_MARGIN: f64 = 1e-3;
/// Bound on `|f|` for [`interior_face_sample`].
pub const INTERIOR_FACTOR: f64 = 5.0;

/// Whether every factor is at least `margin` inside its chart's `f` domain.
pub fn inside_charts(fs: &FaceStructure, f: [f64; 3], margin: f64) -> bool {
    fs.charts().is_ok_and(|cs| {
        (0..3).all(|r| {
            let (lo, hi) = cs[r].f_domain();
            f[r] - lo > margin && hi - f[r] > margin
        })
    })
}

/// A face sample with `|f| < 5` and every factor at least `1e-3` inside its chart.
///
/// Finite-difference and round-off oracles need this: next to a chart singularity or at
/// lengths near 15 the derivatives are dominated by cancellation.
pub fn interior_face_sample(family: Family, rng: &mut impl Rng) -> FaceSample {
    loop {
        let s = face_sample(family, None, rng);
        if inside_charts(&s.structure, s.f, INTERIOR_MARGIN)
            && s.f.iter().all(|x| x.abs() < INTERIOR_FACTOR)
        {
            return s;
        }
    }
}

/// Whether mesh factors `f` satisfy the window of [`interior_face_sample`] on every face.
pub fn interior_mesh_point(spec: &StructureSpec, tri: &Triangulation, f: &[f64]) -> bool {
    f.iter().all(|x| x.abs() < INTERIOR_FACTOR)
        && (0..tri.faces.len()).all(|k| {
            inside_charts(
                &spec.face(tri, k),
                tri.faces[k].v.map(|v| f[v]),
                INTERIOR_MARGIN,
            )
        })
}

/// Three lengths uniform in `[lo, hi)`.
pub fn lengths(lo: f64, hi: f64, rng: &mut impl Rng) -> HexLengths {
    HexLengths::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}

/// A hexagon whose face center has the requested causal class.
///
/// Time-like and space-like centers come from random points `(x, y, 1)`; light-like ones from
/// points `(cos a, sin a, 1)` on the cone. When `complete` is set, only geometries with boundary
/// partials and a classified domain are returned.
pub fn geometry(class: CausalClass, complete: bool, rng: &mut impl Rng) -> HexagonGeometry {
    loop {
        let l = lengths(0.3, 2.5, rng);
        let p = match class {
            CausalClass::LightLike => {
                let a = rng.random_range(0.0..TAU);
                MinkowskiVec::new(a.cos(), a.sin(), 1.0)
            }
            _ => MinkowskiVec::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                1.0,
            ),
        };
        let Ok(g) = HexagonGeometry::through_point(l, p) else {
            continue;
        };
        if g.center_class != class {
            continue;
        }
        if complete && (g.dual_splits.is_none() || g.domain.is_none()) {
            continue;
        }
        return g;
    }
}

/// Closed triangulated sphere with `n >= 4` vertices: a stacked tetrahedron followed by random
/// edge flips that keep the complex simplicial and every degree at least three.
pub fn random_mesh(n: usize, rng: &mut impl Rng) -> Triangulation {
    assert!(
        n >= 4,
        "a closed triangulation needs at least four vertices"
    );
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
    for v in 4..n {
        let k = rng.random_range(0..faces.len());
        let [a, b, c] = faces[k];
        faces[k] = [a, b, v];
        faces.push([b, c, v]);
        faces.push([c, a, v]);
    }
    for _ in 0..3 * n {
        flip_random_edge(&mut faces, n, rng);
    }
    build_triangulation(n, &faces)
}

fn flip_random_edge(faces: &mut [[usize; 3]], n: usize, rng: &mut impl Rng) {
    let mut half: HashMap<(usize, usize), usize> = HashMap::new();
    let mut deg = vec![0usize; n];
    let mut edges = HashSet::new();
    for (k, f) in faces.iter().enumerate() {
        for r in 0..3 {
            let (a, b) = (f[r], f[(r + 1) % 3]);
            half.insert((a, b), k);
            if edges.insert((a.min(b), a.max(b))) {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
    }
    let k = rng.random_range(0..faces.len());
    let r = rng.random_range(0..3);
    let (a, b) = (faces[k][r], faces[k][(r + 1) % 3]);
    let c = faces[k][(r + 2) % 3];
    let Some(&k2) = half.get(&(b, a)) else { return };
    let f2 = faces[k2];
    let d = f2[(f2.iter().position(|x| *x == a).unwrap_or(0) + 1) % 3];
    if c == d || deg[a] <= 3 || deg[b] <= 3 || edges.contains(&(c.min(d), c.max(d))) {
        return;
    }
    faces[k] = [a, d, c];
    faces[k2] = [d, b, c];
}

/// Triangulation from oriented vertex triples.
pub fn build_triangulation(n: usize, faces: &[[usize; 3]]) -> Triangulation {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut out = Vec::with_capacity(faces.len());
    for (k, f) in faces.iter().enumerate() {
        let mut e = [0; 3];
        for r in 0..3 {
            let (a, b) = (f[r], f[(r + 1) % 3]);
            let key = (a.min(b), a.max(b));
            e[r] = *index.entry(key).or_insert_with(|| {
                edges.push(Edge {
                    id: edges.len() as u64,
                    a,
                    b,
                });
                edges.len() - 1
            });
        }
        out.push(Face {
            id: k as u64,
            v: *f,
            e,
        });
    }
    Triangulation {
        vertex_ids: (0..n as u64).collect(),
        edges,
        faces: out,
        open_edges: false,
    }
}

/// Special vertices: a random independent set with at most one special corner per face.
pub fn special_vertices(tri: &Triangulation, rng: &mut impl Rng) -> Vec<bool> {
    let n = tri.n_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut special = vec![false; n];
    let mut blocked = vec![false; n];
    for v in order {
        if blocked[v]
            || tri
                .faces
                .iter()
                .any(|f| f.v.contains(&v) && f.v.iter().any(|w| special[*w]))
        {
            continue;
        }
        special[v] = true;
        for f in tri.faces.iter().filter(|f| f.v.contains(&v)) {
            for w in f.v {
                blocked[w] = true;
            }
        }
    }
    special
}

/// A valid structure of `family` on `tri`.
///
/// With `proven`, weights stay in the ranges covered by existence theorems: A1 avoids
/// `alpha = -1`, A2 uses `eta <= 0`, and MixedI faces are of the four proven types.
pub fn random_spec(
    family: Family,
    tri: &Triangulation,
    proven: bool,
    rng: &mut impl Rng,
) -> StructureSpec {
    let n = tri.n_vertices();
    let (mut lo, mut hi) = eta_range(family);
    if proven && family == Family::A2 {
        hi = 0.0;
        lo = lo.min(-0.1);
    }
    loop {
        let special = if family.is_mixed() {
            special_vertices(tri, rng)
        } else {
            vec![false; n]
        };
        let mut alpha: Vec<i8> = (0..n)
            .map(|_| {
                if proven && matches!(family, Family::A1 | Family::MixedI) {
                    if rng.random_bool(0.5) {
                        1
                    } else {
                        0
                    }
                } else {
                    alpha_choice(family, rng)
                }
            })
            .collect();
        if proven && family == Family::MixedI {
            // Types I, II, IV, V: at most one neighbour with alpha = 1 in each special face.
            for f in &tri.faces {
                if let Some(r) = (0..3).find(|r| special[f.v[*r]]) {
                    let (s, t) = (f.v[(r + 1) % 3], f.v[(r + 2) % 3]);
                    if alpha[s] == 1 && alpha[t] == 1 {
                        alpha[t] = 0;
                    }
                }
            }
        }
        let mut eta: Vec<f64> = (0..tri.edges.len())
            .map(|_| rng.random_range(lo..hi))
            .collect();
        if family == Family::MixedIII {
            for (k, e) in tri.edges.iter().enumerate() {
                if !(special[e.a] || special[e.b]) || !rng.random_bool(0.5) {
                    continue;
                }
                // A negative B-edge must outweigh the opposite edge in each of its faces.
                let mut opposite = 0.0f64;
                for f in tri.faces.iter().filter(|f| f.e.contains(&k)) {
                    let pos = f.e.iter().position(|x| *x == k).unwrap_or(0);
                    let r = if special[f.v[pos]] {
                        pos
                    } else {
                        (pos + 1) % 3
                    };
                    opposite = opposite.max(eta[f.e[(r + 1) % 3]]);
                }
                eta[k] = -opposite - rng.random_range(0.0..1.5);
            }
        }
        let spec = StructureSpec::new(family, alpha, eta).with_special(special);
        if spec.validate(tri).is_ok() && (!proven || spec.existence_proven(tri)) {
            return spec;
        }
    }
}

/// An admissible point of the whole mesh: the default start moved by a random walk.
pub fn admissible_point(
    spec: &StructureSpec,
    tri: &Triangulation,
    steps: usize,
    rng: &mut impl Rng,
) -> Option<Vec<f64>> {
    let mut u = default_initial(spec, tri).ok()?;
    let ok = |u: &[f64]| {
        matches!(spec.admissible(tri, u), Ok(v) if v.is_empty())
            && spec.f_from_u(u).is_ok_and(|f| {
                (0..tri.faces.len()).all(|k| {
                    let fs = spec.face(tri, k);
                    fs.lengths(tri.faces[k].v.map(|v| f[v])).is_ok()
                })
            })
    };
    let scales: Vec<f64> = (0..tri.n_vertices())
        .map(|v| {
            spec.chart(v)
                .map(chart_box)
                .map(|(a, b)| (b - a).min(3.0) * 0.2)
        })
        .collect::<Result<_, _>>()
        .ok()?;
    for _ in 0..steps {
        let mut step = 1.0;
        let dir: Vec<f64> = scales
            .iter()
            .map(|s| s * rng.random_range(-1.0..1.0))
            .collect();
        for _ in 0..20 {
            let cand: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x + step * d).collect();
            if ok(&cand) {
                u = cand;
                break;
            }
            step *= 0.5;
        }
    }
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = rng(7, 3).random();
        let b: f64 = rng(7, 3).random();
        let c: f64 = rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn face_samples_are_admissible() {
        let mut r = rng(1, 0);
        for family in Family::ALL {
            for _ in 0..20 {
                let s = face_sample(family, None, &mut r);
                assert!(s.structure.is_admissible(s.u));
                assert!(s.structure.lengths(s.f).is_ok());
            }
        }
    }

    #[test]
    fn near_boundary_samples_stay_inside() {
        let mut r = rng(2, 0);
        for family in Family::ALL {
            let s = face_sample(family, Some(1e-4), &mut r);
            assert!(s.structure.is_admissible(s.u), "{family}");
        }
    }

    #[test]
    fn geometries_have_requested_class() {
        let mut r = rng(3, 0);
        for class in [
            CausalClass::TimeLike,
            CausalClass::SpaceLike,
            CausalClass::LightLike,
        ] {
            let g = geometry(class, false, &mut r);
            assert_eq!(g.center_class, class);
        }
    }

    #[test]
    fn light_like_faces_found_by_bisection() {
        let mut r = rng(6, 0);
        let s = light_like_face(Family::A1, 200, &mut r).unwrap();
        assert_eq!(
            dtheta_df(&s.structure, s.f).unwrap().branch,
            Branch::LightLike
        );
    }

    #[test]
    fn random_mesh_is_closed_and_simplicial() {
        let mut r = rng(4, 0);
        for n in [4, 10, 30] {
            let tri = random_mesh(n, &mut r);
            assert!(tri.validate().unwrap().is_empty());
            assert_eq!(tri.faces.len(), 2 * n - 4);
            assert_eq!(tri.edges.len(), 3 * n - 6);
        }
    }

    #[test]
    fn random_specs_validate() {
        let mut r = rng(5, 0);
        let tri = random_mesh(12, &mut r);
        for family in Family::ALL {
            let spec = random_spec(family, &tri, false, &mut r);
            assert!(spec.validate(&tri).is_ok());
            let u = admissible_point(&spec, &tri, 10, &mut r).unwrap();
            assert!(spec.admissible(&tri, &u).unwrap().is_empty());
        }
    }
}
