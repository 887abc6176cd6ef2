//! Generalized angles, the curvature map and its Jacobians.
//!
//! Within a face, corner `r` carries the angle `theta_r`, and the row/column
//! order of every 3x3 matrix is the corner order of the face record.

use crate::conformal::{EdgeValue, FaceStructure, StructureSpec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hexagon::{
    angles_from_lengths, edge_index, split_edge, EdgeSplit, HexAngles, HexLengths, HexagonGeometry,
};
use crate::lorentz::CausalClass;
use crate::mesh::Triangulation;
use crate::tol;
use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

/// Which formula produced the off-diagonal angle derivatives of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Face center time-like, `tanh h`.
    TimeLike,
    /// Face center space-like, `coth h`.
    SpaceLike,
    /// Face center on the light cone, `tanh^beta h = +-1`.
    LightLike,
    /// Some edge has no real split; derivatives come from the chain rule through the lengths.
    NoRealSplit,
    /// Splits are real but the center construction is numerically singular; chain rule.
    Singular,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::TimeLike => "time-like",
            Branch::SpaceLike => "space-like",
            Branch::LightLike => "light-like",
            Branch::NoRealSplit => "no-real-split",
            Branch::Singular => "singular",
        }
    }
}

/// Lengths, angles and edge data of one face at given factors.
#[derive(Debug, Clone)]
pub struct FaceState {
    pub f: [f64; 3],
    pub edges: [EdgeValue; 3],
    pub lengths: HexLengths,
    pub angles: HexAngles,
}

impl FaceState {
    pub fn new(fs: &FaceStructure, f: [f64; 3]) -> Result<Self> {
        let edges = fs.edges(f)?;
        let lengths = HexLengths::new(edges[0].l, edges[1].l, edges[2].l);
        let angles = angles_from_lengths(lengths)?;
        Ok(FaceState {
            f,
            edges,
            lengths,
            angles,
        })
    }

    /// Real splits of all three edges, if they exist.
    pub fn splits(&self) -> Result<[EdgeSplit; 3]> {
        let s = |e: usize| split_edge(self.edges[e].l, self.edges[e].rho);
        Ok([s(0)?, s(1)?, s(2)?])
    }

    /// `dl_e / df_c` with rows ordered by edge `ij, jk, ki`.
    pub fn dl_df(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for e in 0..3 {
            let (da, db) = self.edges[e].dl_df();
            m[e][e] = da;
            m[e][(e + 1) % 3] = db;
        }
        m
    }
}

/// Angles of one face.
pub fn face_angles(fs: &FaceStructure, f: [f64; 3]) -> Result<HexAngles> {
    Ok(FaceState::new(fs, f)?.angles)
}

/// `d theta_r / d l_e` with columns ordered by edge `ij, jk, ki`.
///
/// With `A = sinh l_jk sinh l_ki sinh theta_k` (symmetric by the sine law),
/// `d theta_r / d l_opp(r) = sinh l_opp(r) / A` and
/// `d theta_r / d l_opp(s) = -sinh l_opp(r) cosh theta_t / A`.
pub fn dtheta_dl(lengths: HexLengths, angles: HexAngles) -> [[f64; 3]; 3] {
    let l = lengths.as_array();
    let th = angles.as_array();
    let opp = |r: usize| (r + 1) % 3;
    let a = l[opp(0)].sinh() * l[opp(1)].sinh() * th[2].sinh();
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        let sr = l[opp(r)].sinh();
        for s in 0..3 {
            let q1 = if r == s { -1.0 } else { th[3 - r - s].cosh() };
            m[r][opp(s)] = -sr * q1 / a;
        }
    }
    m
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    m
}

/// `d theta / d f` by the chain rule through the edge lengths.
pub fn dtheta_df_chain(state: &FaceState) -> [[f64; 3]; 3] {
    mat_mul(&dtheta_dl(state.lengths, state.angles), &state.dl_df())
}

/// Angle derivatives of one face together with the branch that produced them.
#[derive(Debug, Clone)]
pub struct FaceDerivative {
    pub state: FaceState,
    /// `d theta_r / d f_c`.
    pub dtheta_df: [[f64; 3]; 3],
    pub branch: Branch,
    /// Embedded geometry, when the splits are real.
    pub geometry: Option<HexagonGeometry>,
}

/// Off-diagonals `d theta_r / d f_s = -tanh^beta h_t / (sinh d_sr sinh l_rs)`, `t` the third corner.
pub fn off_diagonal(g: &HexagonGeometry, r: usize, s: usize) -> Result<f64> {
    let t = 3 - r - s;
    let tb = g.tanh_beta(t)?;
    Ok(-tb / (g.d(s, r).sinh() * g.l(r, s).sinh()))
}

/// Diagonal `d theta_r / d f_r = cosh l_rs d theta_s / d f_r + cosh l_rt d theta_t / d f_r`.
pub fn glickenstein_thomas(m: &mut [[f64; 3]; 3], lengths: HexLengths) {
    let l = lengths.as_array();
    for r in 0..3 {
        let (s, t) = ((r + 1) % 3, (r + 2) % 3);
        m[r][r] = l[edge_index(r, s)].cosh() * m[s][r] + l[edge_index(r, t)].cosh() * m[t][r];
    }
}

/// `d theta / d f` of one face.
///
/// Off-diagonals use the geometric closed form and diagonals the
/// Glickenstein-Thomas identity. Faces without real splits fall back to
/// [`dtheta_df_chain`] and report [`Branch::NoRealSplit`]; numerically singular centers
/// do the same and report [`Branch::Singular`].
pub fn dtheta_df(fs: &FaceStructure, f: [f64; 3]) -> Result<FaceDerivative> {
    let state = FaceState::new(fs, f)?;
    let geometry = state
        .splits()
        .and_then(|s| HexagonGeometry::new(state.lengths, s));
    let chain = |state: FaceState, branch| {
        let m = dtheta_df_chain(&state);
        Ok(FaceDerivative {
            state,
            dtheta_df: m,
            branch,
            geometry: None,
        })
    };
    let g = match geometry {
        Ok(g) => g,
        Err(Error::InconsistentRatio { .. }) => return chain(state, Branch::NoRealSplit),
        Err(Error::NoRealCenter | Error::IncompatibleSplits(_)) => {
            return chain(state, Branch::Singular)
        }
        Err(e) => return Err(e),
    };
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for s in 0..3 {
            if r != s {
                match off_diagonal(&g, r, s) {
                    Ok(x) => m[r][s] = x,
                    Err(Error::SingularHeight) => return chain(state, Branch::Singular),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    glickenstein_thomas(&mut m, state.lengths);
    let branch = match g.center_class {
        CausalClass::TimeLike => Branch::TimeLike,
        CausalClass::SpaceLike => Branch::SpaceLike,
        CausalClass::LightLike => Branch::LightLike,
    };
    Ok(FaceDerivative {
        state,
        dtheta_df: m,
        branch,
        geometry: Some(g),
    })
}

/// Central differences of the angles in `f` with step `h`.
pub fn dtheta_df_difference(fs: &FaceStructure, f: [f64; 3], h: f64) -> Result<[[f64; 3]; 3]> {
    let mut m = [[0.0; 3]; 3];
    for c in 0..3 {
        let (mut fp, mut fm) = (f, f);
        fp[c] += h;
        fm[c] -= h;
        let a = face_angles(fs, fp)?.as_array();
        let b = face_angles(fs, fm)?.as_array();
        for r in 0..3 {
            m[r][c] = (a[r] - b[r]) / (2.0 * h);
        }
    }
    Ok(m)
}

/// `d theta / d u` of one face: [`dtheta_df`] times `diag(df/du)`.
#[derive(Debug, Clone)]
pub struct FaceJacobian {
    pub matrix: Matrix3<f64>,
    pub branch: Branch,
    pub angles: HexAngles,
}

impl FaceJacobian {
    /// Largest eigenvalue of the symmetric part.
    pub fn max_eigenvalue(&self) -> f64 {
        let s = (self.matrix + self.matrix.transpose()) * 0.5;
        SymmetricEigen::new(s).eigenvalues.max()
    }

    /// `max |L - L^T|`.
    pub fn asymmetry(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).abs().max()
    }

    /// Negative definite with margin [`tol::EIG`] scaled by the matrix norm.
    pub fn is_negative_definite(&self) -> bool {
        self.max_eigenvalue() < -tol::EIG * self.matrix.abs().max()
    }
}

pub fn face_jacobian_u(fs: &FaceStructure, f: [f64; 3]) -> Result<FaceJacobian> {
    let d = dtheta_df(fs, f)?;
    let dfdu = fs.dfdu(f)?;
    let matrix = Matrix3::from_fn(|r, c| d.dtheta_df[r][c] * dfdu[c]);
    Ok(FaceJacobian {
        matrix,
        branch: d.branch,
        angles: d.state.angles,
    })
}

/// Per-face results of one evaluation of the curvature system.
#[derive(Debug, Clone)]
pub struct FaceRecord {
    pub angles: HexAngles,
    pub jacobian: Option<FaceJacobian>,
}

/// State of the curvature map at one point.
#[derive(Debug, Clone)]
pub struct CurvatureSystem {
    pub f: Vec<f64>,
    pub u: Vec<f64>,
    pub k: Vec<f64>,
    /// `dK/du`, present when requested.
    pub jacobian: Option<DMatrix<f64>>,
    /// Branch of every face when the Jacobian was requested.
    pub branches: Vec<Branch>,
}

fn face_factors(tri: &Triangulation, face: usize, f: &[f64]) -> [f64; 3] {
    tri.faces[face].v.map(|v| f[v])
}

/// Evaluate `K` (and `dK/du` if `jacobian`) at factors `f`.
///
/// Faces are evaluated through `exec`; scatter-adds run sequentially in face order.
pub fn evaluate(
    spec: &StructureSpec,
    tri: &Triangulation,
    f: &[f64],
    jacobian: bool,
    exec: Exec,
) -> Result<CurvatureSystem> {
    let n = tri.n_vertices();
    if f.len() != n {
        return Err(Error::OutOfRange(f.len()));
    }
    let records = exec.try_map(tri.faces.len(), |face| {
        let fs = spec.face(tri, face);
        let ff = face_factors(tri, face, f);
        let rec = if jacobian {
            face_jacobian_u(&fs, ff).map(|j| FaceRecord {
                angles: j.angles,
                jacobian: Some(j),
            })
        } else {
            face_angles(&fs, ff).map(|a| FaceRecord {
                angles: a,
                jacobian: None,
            })
        };
        rec.map_err(|e| e.at_face(face))
    })?;
    let mut k = vec![0.0; n];
    let mut lam = jacobian.then(|| DMatrix::zeros(n, n));
    let mut branches = Vec::new();
    for (face, rec) in records.iter().enumerate() {
        let v = tri.faces[face].v;
        let th = rec.angles.as_array();
        for r in 0..3 {
            k[v[r]] += th[r];
        }
        if let (Some(m), Some(j)) = (lam.as_mut(), rec.jacobian.as_ref()) {
            for r in 0..3 {
                for c in 0..3 {
                    m[(v[r], v[c])] += j.matrix[(r, c)];
                }
            }
            branches.push(j.branch);
        }
    }
    let u = spec.u_from_f(f)?;
    Ok(CurvatureSystem {
        f: f.to_vec(),
        u,
        k,
        jacobian: lam,
        branches,
    })
}

/// `K_i`, the sum of corner angles at each boundary component.
pub fn curvature_map(spec: &StructureSpec, tri: &Triangulation, f: &[f64]) -> Result<Vec<f64>> {
    curvature_map_with(spec, tri, f, Exec::default())
}

pub fn curvature_map_with(
    spec: &StructureSpec,
    tri: &Triangulation,
    f: &[f64],
    exec: Exec,
) -> Result<Vec<f64>> {
    Ok(evaluate(spec, tri, f, false, exec)?.k)
}

/// Global `dK/du`.
pub fn assemble_jacobian(
    spec: &StructureSpec,
    tri: &Triangulation,
    f: &[f64],
) -> Result<DMatrix<f64>> {
    assemble_jacobian_with(spec, tri, f, Exec::default())
}

pub fn assemble_jacobian_with(
    spec: &StructureSpec,
    tri: &Triangulation,
    f: &[f64],
    exec: Exec,
) -> Result<DMatrix<f64>> {
    Ok(evaluate(spec, tri, f, true, exec)?
        .jacobian
        .unwrap_or_else(|| DMatrix::zeros(0, 0)))
}

/// Definiteness report of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Definiteness {
    pub max_eigenvalue: f64,
    /// Whether a Cholesky factorization of `-L` succeeds.
    pub cholesky_ok: bool,
    pub asymmetry: f64,
}

impl Definiteness {
    pub fn negative_definite(&self, norm: f64) -> bool {
        self.cholesky_ok && self.max_eigenvalue < -tol::EIG * norm.max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalue and factorization tests of a square matrix.
pub fn definiteness(m: &DMatrix<f64>) -> Definiteness {
    let asymmetry = (m - m.transpose()).abs().max();
    let s = (m + m.transpose()) * 0.5;
    let max_eigenvalue = if s.nrows() == 0 {
        f64::NEG_INFINITY
    } else {
        s.clone().symmetric_eigenvalues().max()
    };
    let cholesky_ok = (-s).cholesky().is_some();
    Definiteness {
        max_eigenvalue,
        cholesky_ok,
        asymmetry,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Family;
    use crate::mesh::pair_of_pants;

    const ACOSH2: f64 = 1.3169578969248167;

    fn fd_dtheta_df(fs: &FaceStructure, f: [f64; 3], h: f64) -> [[f64; 3]; 3] {
        dtheta_df_difference(fs, f, h).unwrap()
    }

    #[test]
    fn regular_face_angles() {
        let fs = FaceStructure::plain(Family::A1, [0; 3], [3.0; 3]);
        for t in face_angles(&fs, [0.0; 3]).unwrap().as_array() {
            assert!((t - ACOSH2).abs() < 1e-15);
        }
    }

    #[test]
    fn near_boundary_angle_explodes() {
        // cosh l_ij = 1 + 1e-10 on the A1 alpha = 0 face with f = 0.
        let eta = 2.0 + 1e-10;
        let fs = FaceStructure::plain(Family::A1, [0; 3], [eta, 3.0, 3.0]);
        let th = face_angles(&fs, [0.0; 3]).unwrap();
        assert!(
            th.theta_i > 10.0 && th.theta_j > 10.0 && th.theta_k.is_finite(),
            "{th:?}"
        );
    }

    #[test]
    fn inadmissible_face() {
        let fs = FaceStructure::plain(Family::A1, [0; 3], [3.0; 3]);
        assert!(matches!(
            face_angles(&fs, [-1.0; 3]),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn pants_curvature() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0; 3]);
        let k = curvature_map(&spec, &tri, &[0.0; 3]).unwrap();
        for x in k {
            assert!((x - 2.633_915_793_849_633_4).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let fs = FaceStructure::plain(Family::A1, [1, 0, -1], [2.0, 1.5, 2.5]);
        let f = [0.5, 0.6, -0.2];
        let d = dtheta_df(&fs, f).unwrap();
        let fd = fd_dtheta_df(&fs, f, 1e-6);
        for r in 0..3 {
            for c in 0..3 {
                let a = d.dtheta_df[r][c];
                assert!(
                    (a - fd[r][c]).abs() < 1e-5 * a.abs().max(1e-3),
                    "{r}{c} {a} {}",
                    fd[r][c]
                );
            }
        }
    }

    #[test]
    fn chain_rule_agrees_with_closed_form() {
        let fs = FaceStructure::plain(Family::A3, [0; 3], [1.0, 2.0, 0.7]);
        let f = [0.6, 0.5, 0.8];
        let d = dtheta_df(&fs, f).unwrap();
        let c = dtheta_df_chain(&d.state);
        for r in 0..3 {
            for s in 0..3 {
                assert!((d.dtheta_df[r][s] - c[r][s]).abs() < 1e-10 * c[r][s].abs().max(1.0));
            }
        }
    }

    #[test]
    fn regular_off_diagonals_equal() {
        let fs = FaceStructure::plain(Family::A1, [0; 3], [3.0; 3]);
        let d = dtheta_df(&fs, [0.0; 3]).unwrap();
        assert_eq!(d.branch, Branch::TimeLike);
        let x = d.dtheta_df[0][1];
        for r in 0..3 {
            for s in 0..3 {
                if r != s {
                    assert!((d.dtheta_df[r][s] - x).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn pants_jacobian_is_circulant_and_definite() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0; 3]);
        let m = assemble_jacobian(&spec, &tri, &[0.0; 3]).unwrap();
        for r in 0..3 {
            assert!((m[(r, r)] - m[(0, 0)]).abs() < 1e-13);
            for c in 0..3 {
                if r != c {
                    assert!((m[(r, c)] - m[(0, 1)]).abs() < 1e-13);
                }
            }
        }
        let d = definiteness(&m);
        assert!(d.negative_definite(m.abs().max()));
    }

    #[test]
    fn no_real_split_uses_chain_rule() {
        let fs =
            FaceStructure::plain(Family::MixedI, [0; 3], [1.5, 2.0, 2.0]).with_special(Some(0));
        let f = [0.1, 0.3, 0.2];
        let d = dtheta_df(&fs, f).unwrap();
        assert_eq!(d.branch, Branch::NoRealSplit);
        let fd = fd_dtheta_df(&fs, f, 1e-6);
        for r in 0..3 {
            for c in 0..3 {
                assert!((d.dtheta_df[r][c] - fd[r][c]).abs() < 1e-5 * fd[r][c].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn sequential_and_parallel_bit_identical() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0, 2.5, 4.0]);
        let f = [0.1, -0.2, 0.05];
        let a = evaluate(&spec, &tri, &f, true, Exec::Parallel).unwrap();
        let b = evaluate(&spec, &tri, &f, true, Exec::Sequential).unwrap();
        assert_eq!(a.k, b.k);
        assert_eq!(a.jacobian, b.jacobian);
    }
}
