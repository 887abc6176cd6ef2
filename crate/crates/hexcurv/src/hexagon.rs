//! Geometry of one right-angled hyperbolic hexagon.
//!
//! Corners are indexed `0 = i`, `1 = j`, `2 = k`. Edge `e` joins corners
//! `e` and `e + 1 (mod 3)`, so the edges are ordered `ij, jk, ki`. The edge
//! opposite corner `r` has index `r + 1 (mod 3)`; `h_r` is the signed
//! distance of the face center to that edge, `q_r` the signed distance to
//! the boundary geodesic of `r`.
//!
//! The hexagon is embedded with space-like unit vectors `v_r` (boundary
//! geodesics `v_r^perp`) whose Gram matrix is `G_rr = 1`, `G_rs = -cosh l_rs`.
//! The polar vectors `v'_r` carry the edge geodesics. Both families point
//! away from the hexagon: `x * v_r < 0` and `x * v'_r < 0` for interior `x`.

use crate::error::{Error, Result};
use crate::lorentz::{causal_class, plane_intersection, CausalClass, MinkowskiVec};
use crate::tol;
use std::fmt;

/// The three alternating side lengths `(l_ij, l_jk, l_ki)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexLengths {
    pub l_ij: f64,
    pub l_jk: f64,
    pub l_ki: f64,
}

/// The three boundary-arc lengths; `theta_r` is opposite edge `r + 1 (mod 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexAngles {
    pub theta_i: f64,
    pub theta_j: f64,
    pub theta_k: f64,
}

/// Signed partial lengths of one edge, measured from each end to the edge center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSplit {
    pub d_ij: f64,
    pub d_ji: f64,
}

/// Signed partial lengths of the boundary arc at `r` for the pair `(s, t) = (r+1, r+2)`.
///
/// `theta_st` is the distance from the dual edge center to the edge `rt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySplit {
    pub theta_st: f64,
    pub theta_ts: f64,
}

/// Position of the face center, named after the columns of the sign table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Time-like center, column `1..=13`.
    Time(u8),
    /// Space-like center with one negative sign, `1..=6` for `DI..DVI`.
    SpaceOne(u8),
    /// Space-like center with two negative signs, `1..=6` for `Di..Dvi`.
    SpaceTwo(u8),
    /// Light-like center.
    LightCone,
}

const ROMAN_UPPER: [&str; 6] = ["I", "II", "III", "IV", "V", "VI"];
const ROMAN_LOWER: [&str; 6] = ["i", "ii", "iii", "iv", "v", "vi"];

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::Time(n) => write!(f, "D{n}"),
            Domain::SpaceOne(n) => write!(f, "D{}", ROMAN_UPPER[n as usize - 1]),
            Domain::SpaceTwo(n) => write!(f, "D{}", ROMAN_LOWER[n as usize - 1]),
            Domain::LightCone => write!(f, "LightCone"),
        }
    }
}

/// Sign table rows `(h_i, h_j, h_k, q_i, q_j, q_k)` against columns `D1..D13`.
const SIGN_TABLE: [&str; 6] = [
    "++---++++++++",
    "-+++++++++--+",
    "++++++---++++",
    "++++++++---++",
    "++++---++++++",
    "---++++++++++",
];

/// Expected signs of column `col` (0-based) of the sign table.
pub fn table_column(col: usize) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (row, s) in SIGN_TABLE.iter().enumerate() {
        out[row] = if s.as_bytes()[col] == b'+' { 1.0 } else { -1.0 };
    }
    out
}

impl HexLengths {
    pub fn new(l_ij: f64, l_jk: f64, l_ki: f64) -> Self {
        HexLengths { l_ij, l_jk, l_ki }
    }

    pub fn from_array(l: [f64; 3]) -> Self {
        HexLengths::new(l[0], l[1], l[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l_ij, self.l_jk, self.l_ki]
    }

    fn check(&self) -> Result<()> {
        for l in self.as_array() {
            if !l.is_finite() || l <= tol::LEN {
                return Err(Error::DegenerateHexagon(l));
            }
        }
        Ok(())
    }
}

impl HexAngles {
    pub fn new(theta_i: f64, theta_j: f64, theta_k: f64) -> Self {
        HexAngles {
            theta_i,
            theta_j,
            theta_k,
        }
    }

    pub fn from_array(t: [f64; 3]) -> Self {
        HexAngles::new(t[0], t[1], t[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta_i, self.theta_j, self.theta_k]
    }
}

impl EdgeSplit {
    /// A split with positive total length.
    pub fn new(d_ij: f64, d_ji: f64) -> Result<Self> {
        if !(d_ij.is_finite() && d_ji.is_finite()) || d_ij + d_ji <= 0.0 {
            return Err(Error::DomainViolation(format!(
                "partial lengths {d_ij}, {d_ji} must be finite with positive sum"
            )));
        }
        Ok(EdgeSplit { d_ij, d_ji })
    }

    pub fn length(&self) -> f64 {
        self.d_ij + self.d_ji
    }

    pub fn reversed(&self) -> Self {
        EdgeSplit {
            d_ij: self.d_ji,
            d_ji: self.d_ij,
        }
    }
}

impl BoundarySplit {
    pub fn length(&self) -> f64 {
        self.theta_st + self.theta_ts
    }
}

/// Solve `cosh x = (cosh a + cosh b cosh c) / (sinh b sinh c)` for `x > 0`.
///
/// Uses `cosh x - 1 = (cosh a + cosh(b - c)) / (sinh b sinh c)` to keep precision for small `x`.
fn hexagon_law(a: f64, b: f64, c: f64) -> f64 {
    let half = (a.cosh() + (b - c).cosh()) / (2.0 * b.sinh() * c.sinh());
    2.0 * half.sqrt().asinh()
}

/// Boundary-arc lengths from edge lengths by the hexagon cosine law.
pub fn angles_from_lengths(lengths: HexLengths) -> Result<HexAngles> {
    lengths.check()?;
    let HexLengths { l_ij, l_jk, l_ki } = lengths;
    Ok(HexAngles {
        theta_i: hexagon_law(l_jk, l_ij, l_ki),
        theta_j: hexagon_law(l_ki, l_ij, l_jk),
        theta_k: hexagon_law(l_ij, l_jk, l_ki),
    })
}

/// Edge lengths from boundary-arc lengths by the dual cosine law.
pub fn lengths_from_angles(angles: HexAngles) -> Result<HexLengths> {
    let HexAngles {
        theta_i,
        theta_j,
        theta_k,
    } = angles;
    if angles
        .as_array()
        .iter()
        .any(|t| !t.is_finite() || *t <= 0.0)
    {
        return Err(Error::NoSolution);
    }
    let l = HexLengths {
        l_ij: hexagon_law(theta_k, theta_i, theta_j),
        l_jk: hexagon_law(theta_i, theta_j, theta_k),
        l_ki: hexagon_law(theta_j, theta_k, theta_i),
    };
    if l.as_array().iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(l)
    } else {
        Err(Error::NoSolution)
    }
}

/// Canonical embedding: `v_i = (1,0,0)`, `v_j` in the `x1 x3` plane with `x3 > 0`,
/// and `v_k` with `x2 < 0`, which makes `det[v_i, v_j, v_k] > 0`.
pub fn embed(lengths: HexLengths) -> Result<[MinkowskiVec; 3]> {
    let angles = angles_from_lengths(lengths)?;
    let HexLengths {
        l_ij,
        l_jk: _,
        l_ki,
    } = lengths;
    let vi = MinkowskiVec::new(1.0, 0.0, 0.0);
    let vj = MinkowskiVec::new(-l_ij.cosh(), 0.0, l_ij.sinh());
    let vk = MinkowskiVec::new(
        -l_ki.cosh(),
        -l_ki.sinh() * angles.theta_i.sinh(),
        l_ki.sinh() * angles.theta_i.cosh(),
    );
    let v = [vi, vj, vk];
    let scale = lengths
        .as_array()
        .iter()
        .fold(1.0f64, |m, l| m.max(l.cosh()));
    let res = gram_residual(&v, lengths);
    if !res.is_finite() || res > 1e-9 * scale * scale {
        return Err(Error::GramSignature);
    }
    Ok(v)
}

/// Largest deviation of the Gram matrix of `v` from `G_rr = 1`, `G_rs = -cosh l_rs`.
pub fn gram_residual(v: &[MinkowskiVec; 3], lengths: HexLengths) -> f64 {
    let l = lengths.as_array();
    let mut worst = 0.0f64;
    for e in 0..3 {
        let (r, s) = (e, (e + 1) % 3);
        worst = worst.max((v[r].dot(v[s]) + l[e].cosh()).abs());
        worst = worst.max((v[r].norm_sq() - 1.0).abs());
    }
    worst
}

/// Polar vectors `v'_i = (v_k (x) v_j) / |v_k (x) v_j|` and cyclic.
pub fn polar(v: &[MinkowskiVec; 3]) -> [MinkowskiVec; 3] {
    let one = |r: usize| v[(r + 2) % 3].cross(v[(r + 1) % 3]).normalize_space_like();
    [one(0), one(1), one(2)]
}

/// Split an edge of length `l` so that `sinh d_ij / sinh d_ji = rho`.
///
/// `tanh d_ij = rho sinh l / (1 + rho cosh l)` and `d_ji = l - d_ij`. The partial length of
/// smaller magnitude comes from [`split_sinh`] and the other from the sum.
pub fn split_edge(l: f64, rho: f64) -> Result<EdgeSplit> {
    if !(l.is_finite() && l > 0.0 && rho.is_finite() && rho != 0.0) {
        return Err(Error::InconsistentRatio { l, rho });
    }
    let ((a, b), complex) = split_sinh(l, rho);
    if complex || !(a.is_finite() && b.is_finite()) {
        return Err(Error::InconsistentRatio { l, rho });
    }
    let (d_ij, d_ji) = if a.abs() <= b.abs() {
        let d = a.asinh();
        (d, l - d)
    } else {
        let d = b.asinh();
        (l - d, d)
    };
    Ok(EdgeSplit { d_ij, d_ji })
}

/// Point `c` of the edge geodesic `Span(v_i, v_j)` with `v_i*c = -sinh d_ij`, `v_j*c = -sinh d_ji`.
pub fn edge_center(vi: MinkowskiVec, vj: MinkowskiVec, split: EdgeSplit) -> Result<MinkowskiVec> {
    let ch = -vi.dot(vj);
    let sh2 = ch * ch - 1.0;
    if !(sh2 > 0.0) {
        return Err(Error::NoRealCenter);
    }
    let (si, sj) = (split.d_ij.sinh(), split.d_ji.sinh());
    let a = (si + ch * sj) / sh2;
    let b = (sj + ch * si) / sh2;
    let c = vi * a + vj * b;
    let n = c.norm_sq();
    if !c.is_finite() || c.x3 <= 0.0 || (n + 1.0).abs() > 1e-8 * (1.0 + si.abs() + sj.abs()).powi(2)
    {
        return Err(Error::NoRealCenter);
    }
    Ok(c)
}

/// Edge splits whose perpendiculars all pass through the point `p` (any causal class).
///
/// The edge centers are the feet of `p` on the three edge geodesics.
pub fn splits_through(lengths: HexLengths, p: MinkowskiVec) -> Result<[EdgeSplit; 3]> {
    let v = embed(lengths)?;
    let vp = polar(&v);
    let mut out = [EdgeSplit {
        d_ij: 0.0,
        d_ji: 0.0,
    }; 3];
    for e in 0..3 {
        let (r, s, t) = (e, (e + 1) % 3, (e + 2) % 3);
        let foot = p - vp[t] * p.dot(vp[t]);
        if foot.norm_sq() >= -tol::CAUSAL * foot.euclid_norm().powi(2) {
            return Err(Error::NoRealCenter);
        }
        let c = foot.normalize_time_like();
        out[e] = EdgeSplit {
            d_ij: -(v[r].dot(c)).asinh(),
            d_ji: -(v[s].dot(c)).asinh(),
        };
    }
    Ok(out)
}

/// `sinh d_ij sinh d_jk sinh d_ki - sinh d_ji sinh d_kj sinh d_ik`.
pub fn compatibility_residual(splits: &[EdgeSplit; 3]) -> f64 {
    let fwd = splits[0].d_ij.sinh() * splits[1].d_ij.sinh() * splits[2].d_ij.sinh();
    let bwd = splits[0].d_ji.sinh() * splits[1].d_ji.sinh() * splits[2].d_ji.sinh();
    fwd - bwd
}

/// `(sinh d_ij, sinh d_ji)` for the split with ratio `rho`, allowing complex partial lengths.
///
/// With `D = 1 + 2 rho cosh l + rho^2 = (rho + e^l)(rho + e^-l)` and `s = sgn(1 + rho cosh l)`,
/// `sinh d_ij = s rho sinh l / sqrt D` and `sinh d_ji = s sinh l / sqrt D`. When `D < 0` the
/// split is `d_ij = a + i s pi/2`, both sinh values are purely imaginary, the returned pair is
/// their common coefficient of `i` with `sqrt |D|`, and the flag is set.
pub fn split_sinh(l: f64, rho: f64) -> ((f64, f64), bool) {
    let d = (rho + l.exp()) * (rho + (-l).exp());
    let s = (1.0 + rho * l.cosh()).signum();
    let scale = s * l.sinh() / d.abs().sqrt();
    ((rho * scale, scale), d < 0.0)
}

/// Compatibility residual of the splits defined by edge ratios, real or complex.
///
/// Both products carry the same power of `i`; the residual is the difference of their
/// coefficients relative to `max(1, |product|)`.
pub fn ratio_compatibility_residual(lengths: HexLengths, rho: [f64; 3]) -> f64 {
    let l = lengths.as_array();
    let (mut fwd, mut bwd) = (1.0, 1.0);
    for e in 0..3 {
        let ((a, b), _) = split_sinh(l[e], rho[e]);
        fwd *= a;
        bwd *= b;
    }
    (fwd - bwd).abs() / fwd.abs().max(bwd.abs()).max(1.0)
}

/// Dual analogue of [`compatibility_residual`] on the boundary splits.
pub fn dual_compatibility_residual(dual: &[BoundarySplit; 3]) -> f64 {
    let fwd = dual[0].theta_st.sinh() * dual[1].theta_st.sinh() * dual[2].theta_st.sinh();
    let bwd = dual[0].theta_ts.sinh() * dual[1].theta_ts.sinh() * dual[2].theta_ts.sinh();
    fwd - bwd
}

/// All metric data of one hexagon with a compatible choice of edge centers.
#[derive(Debug, Clone)]
pub struct HexagonGeometry {
    pub lengths: HexLengths,
    pub angles: HexAngles,
    /// Splits of edges `ij, jk, ki`, each oriented along the edge.
    pub splits: [EdgeSplit; 3],
    /// Boundary splits at `i, j, k`; `None` if a dual edge center leaves the plane.
    pub dual_splits: Option<[BoundarySplit; 3]>,
    pub vertices: [MinkowskiVec; 3],
    pub polar: [MinkowskiVec; 3],
    /// Edge centers of `ij, jk, ki`.
    pub edge_centers: [MinkowskiVec; 3],
    /// Normalized to `-1` (time-like, `x3 > 0`), `+1` (space-like), or unit Euclidean length.
    pub face_center: MinkowskiVec,
    pub center_class: CausalClass,
    /// Signed distances to the edges opposite `i, j, k`; `None` for light-like centers.
    pub h: Option<[f64; 3]>,
    /// Signed distances to the boundary geodesics; `None` if unavailable.
    pub q: Option<[f64; 3]>,
    /// `None` when `q` is unavailable.
    pub domain: Option<Domain>,
}

impl HexagonGeometry {
    /// Build the full geometry from side lengths and compatible edge splits.
    pub fn new(lengths: HexLengths, splits: [EdgeSplit; 3]) -> Result<Self> {
        let angles = angles_from_lengths(lengths)?;
        let l = lengths.as_array();
        for e in 0..3 {
            if (splits[e].length() - l[e]).abs() > 1e-9 * l[e].max(1.0) {
                return Err(Error::DomainViolation(format!(
                    "split of edge {e} sums to {} instead of {}",
                    splits[e].length(),
                    l[e]
                )));
            }
        }
        let vertices = embed(lengths)?;
        let polar = polar(&vertices);
        let mut edge_centers = [MinkowskiVec::default(); 3];
        for e in 0..3 {
            edge_centers[e] = edge_center(vertices[e], vertices[(e + 1) % 3], splits[e])?;
        }
        let (raw, center_class) = face_center(&polar, &edge_centers)?;
        let face_center = match center_class {
            CausalClass::TimeLike => raw.normalize_time_like(),
            CausalClass::SpaceLike => raw.normalize_space_like(),
            CausalClass::LightLike => raw,
        };
        let mut g = HexagonGeometry {
            lengths,
            angles,
            splits,
            dual_splits: None,
            vertices,
            polar,
            edge_centers,
            face_center,
            center_class,
            h: None,
            q: None,
            domain: None,
        };
        g.dual_splits = dual_splits(&g).ok();
        let (h, q) = signed_distances(&g);
        g.h = h;
        g.q = q;
        g.domain = classify_domain(&g).ok();
        Ok(g)
    }

    /// Geometry whose edge perpendiculars meet at `p`.
    pub fn through_point(lengths: HexLengths, p: MinkowskiVec) -> Result<Self> {
        HexagonGeometry::new(lengths, splits_through(lengths, p)?)
    }

    /// Partial length `d_rs` for corners `r != s`.
    pub fn d(&self, r: usize, s: usize) -> f64 {
        debug_assert!(r != s && r < 3 && s < 3);
        if s == (r + 1) % 3 {
            self.splits[r].d_ij
        } else {
            self.splits[s].d_ji
        }
    }

    /// Boundary partial `theta_st`, located on the boundary of the third corner.
    pub fn theta_partial(&self, s: usize, t: usize) -> Option<f64> {
        debug_assert!(s != t && s < 3 && t < 3);
        let dual = self.dual_splits.as_ref()?;
        let r = 3 - s - t;
        Some(if s == (r + 1) % 3 {
            dual[r].theta_st
        } else {
            dual[r].theta_ts
        })
    }

    /// Edge length `l_rs` for corners `r != s`.
    pub fn l(&self, r: usize, s: usize) -> f64 {
        self.lengths.as_array()[edge_index(r, s)]
    }

    /// `tanh^beta h_t` for the edge opposite corner `t`, as `(v'_t * c) / (c_rs * c)`.
    ///
    /// The ratio equals `tanh h_t` for time-like centers and `coth h_t` for space-like
    /// ones; on the light cone its magnitude is one.
    pub fn tanh_beta(&self, t: usize) -> Result<f64> {
        let c = self.face_center;
        let ce = self.edge_centers[(t + 1) % 3];
        let num = self.polar[t].dot(c);
        let den = ce.dot(c);
        if den.abs() <= f64::EPSILON * num.abs() {
            return Err(Error::SingularHeight);
        }
        Ok(num / den)
    }

    /// Sign vector `(h_i, h_j, h_k, q_i, q_j, q_k)`, if both triples are available.
    pub fn sign_vector(&self) -> Option<[f64; 6]> {
        let (h, q) = (self.h?, self.q?);
        Some([h[0], h[1], h[2], q[0], q[1], q[2]])
    }
}

/// Index of the edge joining corners `r` and `s`.
pub fn edge_index(r: usize, s: usize) -> usize {
    if s == (r + 1) % 3 {
        r
    } else {
        s
    }
}

/// Intersection of `Span(v'_k, c_ij)` and `Span(v'_j, c_ki)`, checked against `Span(v'_i, c_jk)`.
///
/// Returns the center at unit Euclidean length together with its causal class.
pub fn face_center(
    polar: &[MinkowskiVec; 3],
    edge_centers: &[MinkowskiVec; 3],
) -> Result<(MinkowskiVec, CausalClass)> {
    let c = plane_intersection((polar[2], edge_centers[0]), (polar[1], edge_centers[2]))
        .map_err(|_| Error::IncompatibleSplits(f64::INFINITY))?
        .euclid_unit();
    let n3 = polar[0].cross(edge_centers[1]);
    let res = c.dot(n3).abs() / n3.euclid_norm();
    if !(res <= tol::COMPAT) {
        return Err(Error::IncompatibleSplits(res));
    }
    Ok((c, causal_class(c)))
}

/// Boundary splits from the dual edge centers, the feet of the face center on each boundary.
pub fn dual_splits(g: &HexagonGeometry) -> Result<[BoundarySplit; 3]> {
    let mut out = [BoundarySplit {
        theta_st: 0.0,
        theta_ts: 0.0,
    }; 3];
    for r in 0..3 {
        let c = dual_center(g, r)?;
        let (s, t) = ((r + 1) % 3, (r + 2) % 3);
        out[r] = BoundarySplit {
            theta_st: -(g.polar[s].dot(c)).asinh(),
            theta_ts: -(g.polar[t].dot(c)).asinh(),
        };
    }
    Ok(out)
}

/// Dual edge center on the boundary of corner `r`, normalized time-like.
pub fn dual_center(g: &HexagonGeometry, r: usize) -> Result<MinkowskiVec> {
    let c = g.face_center.euclid_unit();
    let foot = c - g.vertices[r] * c.dot(g.vertices[r]);
    if !(foot.norm_sq() < -tol::CAUSAL * foot.euclid_norm().powi(2)) {
        return Err(Error::DualCenterOutside(r));
    }
    Ok(foot.normalize_time_like())
}

/// Signed distances `(h, q)` of the face center.
///
/// Time-like: `sinh q_r = -(v_r * c)` and `sinh h_r = -(v'_r * c)`. Space-like with `c * c = 1`:
/// `|sinh h_t| = |c_rs * c|` and `tanh h_t = (c_rs * c) / (v'_t * c)` fixes the sign; `q`
/// likewise with the dual edge centers.
/// Light-like centers have neither.
pub fn signed_distances(g: &HexagonGeometry) -> (Option<[f64; 3]>, Option<[f64; 3]>) {
    let c = g.face_center;
    match g.center_class {
        CausalClass::TimeLike => {
            let h = [0, 1, 2].map(|r| -(g.polar[r].dot(c)).asinh());
            let q = [0, 1, 2].map(|r| -(g.vertices[r].dot(c)).asinh());
            (Some(h), Some(q))
        }
        CausalClass::SpaceLike => {
            let h = [0, 1, 2].map(|t| {
                let ce = g.edge_centers[(t + 1) % 3];
                space_like_distance(ce.dot(c), g.polar[t].dot(c))
            });
            let mut q = [0.0; 3];
            for r in 0..3 {
                match dual_center(g, r) {
                    Ok(cd) => q[r] = space_like_distance(cd.dot(c), g.vertices[r].dot(c)),
                    Err(_) => return (Some(h), None),
                }
            }
            (Some(h), Some(q))
        }
        CausalClass::LightLike => (None, None),
    }
}

/// Signed `x` with `tanh x = foot / normal`, from `|sinh x| = |foot|` for unit space-like `c`.
fn space_like_distance(foot: f64, normal: f64) -> f64 {
    let x = foot.abs().asinh();
    if foot * normal < 0.0 {
        -x
    } else {
        x
    }
}

fn sign_matches(value: f64, expect: f64) -> bool {
    value.abs() < tol::SIGN || value.signum() == expect
}

fn format_signs(s: &[f64; 6]) -> String {
    s.iter().map(|x| if *x > 0.0 { '+' } else { '-' }).collect()
}

/// Domain of the face center from the signs of `(h_i, h_j, h_k, q_i, q_j, q_k)`.
pub fn classify_domain(g: &HexagonGeometry) -> Result<Domain> {
    if g.center_class == CausalClass::LightLike {
        return Ok(Domain::LightCone);
    }
    let signs = g
        .sign_vector()
        .ok_or_else(|| Error::UnclassifiableSigns("signed distances unavailable".into()))?;
    for col in 0..13 {
        let expect = table_column(col);
        if !(0..6).all(|n| sign_matches(signs[n], expect[n])) {
            continue;
        }
        let n = col as u8 + 1;
        return match g.center_class {
            CausalClass::TimeLike => Ok(Domain::Time(n)),
            _ if n == 13 => continue,
            _ if n.is_multiple_of(2) => Ok(Domain::SpaceOne(n / 2)),
            _ => Ok(Domain::SpaceTwo(n.div_ceil(2))),
        };
    }
    Err(Error::UnclassifiableSigns(format_signs(&signs)))
}

/// Table column (0-based) of a domain, if it has one.
pub fn domain_column(d: Domain) -> Option<usize> {
    match d {
        Domain::Time(n) => Some(n as usize - 1),
        Domain::SpaceOne(n) => Some(2 * n as usize - 1),
        Domain::SpaceTwo(n) => Some(2 * n as usize - 2),
        Domain::LightCone => None,
    }
}

/// Which identity family a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// Time-like center: `sinh q_r = cosh h_s sinh d_rt` and the dual equation.
    TimeLike,
    /// Space-like center with exactly one negative signed distance.
    SpaceLikeOne,
    /// Space-like center with `q_r < 0` and `h_s < 0`.
    SpaceLikeTwo,
}

impl Lemma {
    pub fn name(self) -> &'static str {
        match self {
            Lemma::TimeLike => "time-like",
            Lemma::SpaceLikeOne => "space-like-1",
            Lemma::SpaceLikeTwo => "space-like-2",
        }
    }
}

/// Residuals of the center identities on one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// `None` when the center is light-like or a signed distance is unavailable.
    pub lemma: Option<Lemma>,
    /// Largest residual, relative to `max(1, |lhs|)`.
    pub max_residual: f64,
    /// Number of equations evaluated.
    pub equations: usize,
    /// `sign(q_r) = sign(d_rs) = sign(d_rt)` and `sign(h_r) = sign(theta_rs) = sign(theta_rt)`.
    pub signs_coherent: bool,
}

struct Sides<'a> {
    g: &'a HexagonGeometry,
    h: [f64; 3],
    q: [f64; 3],
    max: f64,
    n: usize,
}

impl Sides<'_> {
    fn th(&self, s: usize, t: usize) -> f64 {
        self.g.theta_partial(s, t).unwrap_or(f64::NAN)
    }

    fn check(&mut self, lhs: f64, rhs: f64) {
        let r = (lhs - rhs).abs() / lhs.abs().max(1.0);
        self.max = if r.is_nan() {
            f64::INFINITY
        } else {
            self.max.max(r)
        };
        self.n += 1;
    }

    /// Both time-like equations for every ordered pair `r != s`.
    fn time_like(&mut self) {
        for r in 0..3 {
            for s in 0..3 {
                if s == r {
                    continue;
                }
                let t = 3 - r - s;
                let (g, h, q) = (self.g, self.h, self.q);
                self.check(q[r].sinh(), h[s].cosh() * g.d(r, t).sinh());
                let rhs = q[s].cosh() * self.th(r, t).sinh();
                self.check(h[r].sinh(), rhs);
            }
        }
    }

    /// `q_r < 0`; with `dual` the roles of `(h, d)` and `(q, theta)` are exchanged.
    fn space_like_one(&mut self, r: usize, dual: bool) {
        let (a, b) = if dual {
            (self.h, self.q)
        } else {
            (self.q, self.h)
        };
        let g = self.g;
        let dd = |x: usize, y: usize| if dual { self.th(x, y) } else { g.d(x, y) };
        let tt = |x: usize, y: usize| if dual { g.d(x, y) } else { self.th(x, y) };
        let mut eqs = Vec::new();
        for s in 0..3 {
            if s == r {
                continue;
            }
            let t = 3 - r - s;
            eqs.push((a[r].cosh(), -b[s].sinh() * dd(r, t).sinh()));
            eqs.push((a[s].cosh(), b[r].sinh() * dd(s, t).sinh()));
            eqs.push((a[s].cosh(), b[t].sinh() * dd(s, r).sinh()));
            eqs.push((b[r].cosh(), a[s].sinh() * tt(r, t).sinh()));
            eqs.push((b[s].cosh(), -a[r].sinh() * tt(s, t).sinh()));
            eqs.push((b[s].cosh(), a[t].sinh() * tt(s, r).sinh()));
        }
        for (l, r) in eqs {
            self.check(l, r);
        }
    }

    /// `q_r < 0` and `h_s < 0`.
    fn space_like_two(&mut self, r: usize, s: usize) {
        let t = 3 - r - s;
        let (g, h, q) = (self.g, self.h, self.q);
        let d = |x: usize, y: usize| g.d(x, y).sinh();
        let th = |x: usize, y: usize| self.th(x, y).sinh();
        let eqs = [
            (q[r].cosh(), h[s].sinh() * d(r, t)),
            (q[r].cosh(), -h[t].sinh() * d(r, s)),
            (q[s].cosh(), h[r].sinh() * d(s, t)),
            (q[s].cosh(), h[t].sinh() * d(s, r)),
            (q[t].cosh(), h[r].sinh() * d(t, s)),
            (q[t].cosh(), -h[s].sinh() * d(t, r)),
            (h[r].cosh(), q[s].sinh() * th(r, t)),
            (h[r].cosh(), q[t].sinh() * th(r, s)),
            (h[s].cosh(), q[r].sinh() * th(s, t)),
            (h[s].cosh(), -q[t].sinh() * th(s, r)),
            (h[t].cosh(), -q[r].sinh() * th(t, s)),
            (h[t].cosh(), q[s].sinh() * th(t, r)),
        ];
        for (l, r) in eqs {
            self.check(l, r);
        }
    }
}

fn same_sign(a: f64, b: f64) -> bool {
    a.abs() < tol::SIGN || b.abs() < tol::SIGN || a.signum() == b.signum()
}

/// Sign coherence of `q` with `d` and of `h` with the boundary partials.
///
/// Without signed distances (light-like centers) only `sign(d_rs) = sign(d_rt)` and
/// `sign(theta_rs) = sign(theta_rt)` are checked. `None` if the boundary partials are missing.
pub fn signs_coherent(g: &HexagonGeometry) -> Option<bool> {
    let mut ok = true;
    for r in 0..3 {
        let (s, t) = ((r + 1) % 3, (r + 2) % 3);
        ok &= same_sign(g.d(r, s), g.d(r, t));
        ok &= same_sign(g.theta_partial(r, s)?, g.theta_partial(r, t)?);
        if let (Some(h), Some(q)) = (g.h, g.q) {
            ok &= same_sign(q[r], g.d(r, s)) && same_sign(h[r], g.theta_partial(r, s)?);
        }
    }
    Some(ok)
}

/// Evaluate the identity family that applies to the position of the face center.
pub fn center_identities(g: &HexagonGeometry) -> IdentityReport {
    let coherent = signs_coherent(g).unwrap_or(false);
    let none = IdentityReport {
        lemma: None,
        max_residual: 0.0,
        equations: 0,
        signs_coherent: coherent,
    };
    let (Some(h), Some(q)) = (g.h, g.q) else {
        return none;
    };
    if g.dual_splits.is_none() {
        return none;
    }
    let mut sides = Sides {
        g,
        h,
        q,
        max: 0.0,
        n: 0,
    };
    let neg_q: Vec<usize> = (0..3).filter(|&r| q[r] < 0.0).collect();
    let neg_h: Vec<usize> = (0..3).filter(|&r| h[r] < 0.0).collect();
    let lemma = match g.center_class {
        CausalClass::TimeLike => {
            sides.time_like();
            Some(Lemma::TimeLike)
        }
        CausalClass::SpaceLike => match (neg_q.as_slice(), neg_h.as_slice()) {
            ([r], []) => {
                sides.space_like_one(*r, false);
                Some(Lemma::SpaceLikeOne)
            }
            ([], [r]) => {
                sides.space_like_one(*r, true);
                Some(Lemma::SpaceLikeOne)
            }
            ([r], [s]) if r != s => {
                sides.space_like_two(*r, *s);
                Some(Lemma::SpaceLikeTwo)
            }
            _ => None,
        },
        CausalClass::LightLike => None,
    };
    IdentityReport {
        lemma,
        max_residual: sides.max,
        equations: sides.n,
        signs_coherent: coherent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular() -> HexLengths {
        let l = 2f64.acosh();
        HexLengths::new(l, l, l)
    }

    fn sym_splits(l: HexLengths) -> [EdgeSplit; 3] {
        l.as_array().map(|x| EdgeSplit {
            d_ij: x / 2.0,
            d_ji: x / 2.0,
        })
    }

    #[test]
    fn regular_hexagon_is_self_dual() {
        let a = angles_from_lengths(regular()).unwrap();
        for t in a.as_array() {
            assert!((t - 1.3169578969248167).abs() < 1e-15);
        }
        let l = lengths_from_angles(a).unwrap();
        for x in l.as_array() {
            assert!((x - 2f64.acosh()).abs() < 1e-15);
        }
    }

    #[test]
    fn cosine_law_against_high_precision() {
        // Values from 50-digit evaluation of the cosine law.
        let a = angles_from_lengths(HexLengths::new(1.0, 1.5, 2.0)).unwrap();
        assert!((a.theta_i - 1.2657827918884454).abs() < 1e-14);
        assert!((a.theta_j - 1.7463798749885944).abs() < 1e-14);
        assert!((a.theta_k - 0.809386293816926).abs() < 1e-14);
        let l = lengths_from_angles(a).unwrap();
        assert!((l.l_ij - 1.0).abs() < 1e-12);
        assert!((l.l_jk - 1.5).abs() < 1e-12);
        assert!((l.l_ki - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            angles_from_lengths(HexLengths::new(1e-9, 1.0, 1.0)),
            Err(Error::DegenerateHexagon(_))
        ));
        assert_eq!(
            lengths_from_angles(HexAngles::new(0.0, 1.0, 1.0)),
            Err(Error::NoSolution)
        );
    }

    #[test]
    fn regular_gram_and_polar() {
        let v = embed(regular()).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                let expect = if r == s { 1.0 } else { -2.0 };
                assert!((v[r].dot(v[s]) - expect).abs() < 1e-12);
            }
        }
        let p = polar(&v);
        for r in 0..3 {
            assert!((p[r].norm_sq() - 1.0).abs() < 1e-12);
            assert!(p[r].dot(v[r]) < 0.0);
            for s in 0..3 {
                if r != s {
                    assert!(p[r].dot(v[s]).abs() < 1e-12);
                }
            }
        }
        // det[v_i, v_j, v_k] > 0 is the orientation convention.
        assert!(v[0].cross(v[1]).dot(v[2]) > 0.0);
    }

    #[test]
    fn split_edge_examples() {
        let l = 2f64.acosh();
        let s = split_edge(l, 1.0).unwrap();
        assert!((s.d_ij - 0.6584789484624084).abs() < 1e-14);
        assert!((s.d_ji - s.d_ij).abs() < 1e-14);
        let e = std::f64::consts::E;
        let s = split_edge(1.0, e).unwrap();
        assert!((s.d_ij.sinh() / s.d_ji.sinh() - e).abs() < 1e-10);
        assert!((s.length() - 1.0).abs() < 1e-15);
        // |rho sinh 2| = 1.81 >= |1 - 0.5 cosh 2| = 0.88.
        assert!(matches!(
            split_edge(2.0, -0.5),
            Err(Error::InconsistentRatio { .. })
        ));
    }

    #[test]
    fn negative_ratio_outside_band_gives_negative_split() {
        let l = 1.0;
        let s = split_edge(l, -0.2).unwrap();
        assert!(s.d_ij < 0.0 && s.d_ji > l);
        assert!((s.d_ij.sinh() / s.d_ji.sinh() + 0.2).abs() < 1e-12);
    }

    #[test]
    fn edge_center_residuals() {
        let lengths = HexLengths::new(1.0, 1.5, 2.0);
        let v = embed(lengths).unwrap();
        let split = EdgeSplit {
            d_ij: 0.3,
            d_ji: 0.7,
        };
        let c = edge_center(v[0], v[1], split).unwrap();
        assert!((v[0].dot(c) + 0.3f64.sinh()).abs() < 1e-11);
        assert!((v[1].dot(c) + 0.7f64.sinh()).abs() < 1e-11);
        assert!((c.norm_sq() + 1.0).abs() < 1e-12);
        assert!(c.cross(v[0]).dot(v[1]).abs() < 1e-12);
    }

    #[test]
    fn regular_symmetric_geometry() {
        let g = HexagonGeometry::new(regular(), sym_splits(regular())).unwrap();
        assert_eq!(g.center_class, CausalClass::TimeLike);
        assert_eq!(g.domain, Some(Domain::Time(13)));
        let h = g.h.unwrap();
        let q = g.q.unwrap();
        assert!(h[0] > 0.0 && (h[0] - h[1]).abs() < 1e-12 && (h[1] - h[2]).abs() < 1e-12);
        assert!(q[0] > 0.0 && (q[0] - q[1]).abs() < 1e-12 && (q[1] - q[2]).abs() < 1e-12);
        let dual = g.dual_splits.unwrap();
        for (r, b) in dual.iter().enumerate() {
            assert!((b.theta_st - b.theta_ts).abs() < 1e-12);
            assert!((b.length() - g.angles.as_array()[r]).abs() < 1e-12);
        }
        // Center of symmetry is the point (0,0,1) up to the chart's rotation.
        let c = g.face_center;
        for r in 0..3 {
            assert!((g.vertices[r].dot(c) - g.vertices[0].dot(c)).abs() < 1e-12);
        }
    }

    #[test]
    fn incompatible_splits_rejected() {
        let lengths = HexLengths::new(1.0, 1.5, 2.0);
        let mut s = sym_splits(lengths);
        s[1].d_ij += 1e-3;
        s[1].d_ji -= 1e-3;
        assert!(compatibility_residual(&s).abs() > 1e-4);
        assert!(matches!(
            HexagonGeometry::new(lengths, s),
            Err(Error::IncompatibleSplits(_))
        ));
    }

    #[test]
    fn through_point_recovers_point() {
        let lengths = HexLengths::new(1.1, 0.8, 1.7);
        let p = MinkowskiVec::new(0.2, -0.3, 1.0).normalize_time_like();
        let g = HexagonGeometry::through_point(lengths, p).unwrap();
        let c = g.face_center;
        assert!((c - p).euclid_norm() < 1e-10, "{c:?} {p:?}");
        assert!(compatibility_residual(&g.splits).abs() < 1e-12);
    }

    #[test]
    fn domain_names() {
        assert_eq!(Domain::Time(13).to_string(), "D13");
        assert_eq!(Domain::SpaceOne(4).to_string(), "DIV");
        assert_eq!(Domain::SpaceTwo(2).to_string(), "Dii");
        for col in 0..13 {
            let d = if col == 12 {
                Domain::Time(13)
            } else if col % 2 == 1 {
                Domain::SpaceOne((col as u8).div_ceil(2))
            } else {
                Domain::SpaceTwo(col as u8 / 2 + 1)
            };
            assert_eq!(domain_column(d), Some(col));
        }
    }

    #[test]
    fn table_columns_match_caption() {
        // Space-like columns pair with D2, D4, ... (one negative) and D1, D3, ... (two).
        for col in 0..12 {
            let neg = table_column(col).iter().filter(|x| **x < 0.0).count();
            assert_eq!(neg, if col % 2 == 1 { 1 } else { 2 }, "column {}", col + 1);
        }
        assert!(table_column(12).iter().all(|x| *x > 0.0));
    }

    #[test]
    fn split_sinh_keeps_ratio() {
        for (l, rho) in [(1.0, 2.0), (2.0, -0.5), (0.7, -3.0), (1.5, 0.2)] {
            let ((a, b), complex) = split_sinh(l, rho);
            assert_eq!(complex, split_edge(l, rho).is_err());
            assert!(
                (a / b - rho).abs() < 1e-12 * rho.abs().max(1.0),
                "{l} {rho}"
            );
        }
    }

    #[test]
    fn ratio_compatibility_of_negated_pairs() {
        let l = HexLengths::new(1.0, 2.0, 1.5);
        assert!(ratio_compatibility_residual(l, [-2.0, 0.25, -2.0]) < 1e-14);
        assert!(ratio_compatibility_residual(l, [-2.0, 0.25, 2.0]) > 0.1);
    }

    #[test]
    fn regular_center_identities() {
        let l = regular();
        let g = HexagonGeometry::new(l, sym_splits(l)).unwrap();
        let rep = center_identities(&g);
        assert_eq!(rep.lemma, Some(Lemma::TimeLike));
        assert_eq!(rep.equations, 12);
        assert!(rep.max_residual < 1e-13);
        assert!(rep.signs_coherent);
    }
}
