//! Prescribed-curvature inversion by damped Newton in `u`, and the energy.
//!
//! The curvature `K(u)` is the gradient of a strictly concave energy on the
//! admissible space, so `dK/du` is symmetric negative definite where the
//! family's definiteness theorem applies. Each step solves `L s = K* - K(u)`
//! and halves the step until `u + s` is admissible and the residual drops.

use crate::conformal::{FaceStructure, StructureSpec, VertexChart};
use crate::curvature::{evaluate, face_angles};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mesh::Triangulation;
use nalgebra::{DMatrix, DVector};

/// Where Newton starts.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// [`default_initial`].
    FamilyDefault,
    /// Conformal factors `f`, one per vertex.
    UserSupplied(Vec<f64>),
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop when `max |K - K*| <= tol_k`.
    pub tol_k: f64,
    pub max_iter: usize,
    /// Step reduction factor of the backtracking.
    pub damping: f64,
    pub max_halvings: usize,
    pub initial: Initial,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_k: 1e-10,
            max_iter: 100,
            damping: 0.5,
            max_halvings: 60,
            initial: Initial::FamilyDefault,
            exec: Exec::default(),
        }
    }
}

/// How a Newton system was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    /// Cholesky of `-L` succeeded.
    Cholesky,
    /// `-L` was not positive definite; solved by LU.
    Lu,
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Final `max |K - K*|`.
    pub residual: f64,
    /// Residual before the first step and after every accepted step.
    pub trajectory: Vec<f64>,
    /// Step reductions caused by leaving the admissible space.
    pub boundary_hits: usize,
    /// Step reductions caused by a residual that did not drop.
    pub residual_rejections: usize,
    /// Linear solves that fell back to LU.
    pub lu_fallbacks: usize,
    /// No existence theorem covers this structure.
    pub existence_unproven: bool,
    /// `max r_{n+1} / r_n^2` over the last three steps of a converged run.
    pub tail_constant: Option<f64>,
}

/// Message attached to non-converged runs without an existence theorem.
pub const EXISTENCE_NOTE: &str =
    "no existence theorem covers this structure; failure to converge is not evidence that the target is unattainable";

fn residual(k: &[f64], target: &[f64]) -> f64 {
    k.iter()
        .zip(target)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

fn admissible(spec: &StructureSpec, tri: &Triangulation, u: &[f64]) -> bool {
    matches!(spec.admissible(tri, u), Ok(v) if v.is_empty())
}

/// Solve `L s = rhs` with `L` symmetric negative definite, falling back to LU.
fn newton_step(lam: DMatrix<f64>, rhs: DVector<f64>) -> Option<(DVector<f64>, Factorization)> {
    let sym = (&lam + lam.transpose()) * 0.5;
    if let Some(ch) = (-&sym).cholesky() {
        return Some((-ch.solve(&rhs), Factorization::Cholesky));
    }
    lam.lu().solve(&rhs).map(|s| (s, Factorization::Lu))
}

/// Find `f` with `K(f) = K*`.
pub fn solve_prescribed_curvature(
    spec: &StructureSpec,
    tri: &Triangulation,
    target: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = tri.n_vertices();
    if target.len() != n {
        return Err(Error::InvalidTarget(format!(
            "expected {n} values, got {}",
            target.len()
        )));
    }
    if let Some((v, k)) = target
        .iter()
        .enumerate()
        .find(|(_, k)| !(k.is_finite() && **k > 0.0))
    {
        return Err(Error::InvalidTarget(format!(
            "K[{v}] = {k} must be positive"
        )));
    }
    if !(opts.tol_k > 0.0) || !(opts.damping > 0.0 && opts.damping < 1.0) {
        return Err(Error::InvalidTarget(
            "tol_k must be positive and damping in (0, 1)".into(),
        ));
    }
    spec.validate(tri)?;
    let mut u = match &opts.initial {
        Initial::FamilyDefault => default_initial(spec, tri)?,
        Initial::UserSupplied(f) => spec.u_from_f(f)?,
    };
    if !admissible(spec, tri, &u) {
        return Err(Error::InvalidTarget(
            "initial point is not admissible".into(),
        ));
    }
    let mut f = spec.f_from_u(&u)?;
    let mut sys = evaluate(spec, tri, &f, true, opts.exec)?;
    let mut r = residual(&sys.k, target);
    let mut report = SolveReport {
        converged: false,
        iterations: 0,
        residual: r,
        trajectory: vec![r],
        boundary_hits: 0,
        residual_rejections: 0,
        lu_fallbacks: 0,
        existence_unproven: !spec.existence_proven(tri),
        tail_constant: None,
    };
    let fail = |report: &SolveReport, f: &[f64]| Error::NotConverged {
        iterations: report.iterations,
        residual: report.residual,
        best_f: f.to_vec(),
    };
    while r > opts.tol_k {
        if report.iterations >= opts.max_iter {
            return Err(fail(&report, &f));
        }
        let lam = sys.jacobian.take().unwrap_or_else(|| DMatrix::zeros(n, n));
        let rhs = DVector::from_iterator(n, target.iter().zip(&sys.k).map(|(t, k)| t - k));
        let Some((step, fac)) = newton_step(lam, rhs) else {
            return Err(fail(&report, &f));
        };
        if fac == Factorization::Lu {
            report.lu_fallbacks += 1;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(a, s)| a + lambda * s)
                .collect();
            if !admissible(spec, tri, &cand) {
                report.boundary_hits += 1;
                lambda *= opts.damping;
                continue;
            }
            let next = spec
                .f_from_u(&cand)
                .and_then(|fc| evaluate(spec, tri, &fc, true, opts.exec).map(|s| (fc, s)));
            match next {
                Ok((fc, s)) => {
                    let rc = residual(&s.k, target);
                    if rc < r {
                        accepted = Some((cand, fc, s, rc));
                        break;
                    }
                    report.residual_rejections += 1;
                }
                Err(_) => report.boundary_hits += 1,
            }
            lambda *= opts.damping;
        }
        let Some((cand, fc, s, rc)) = accepted else {
            return Err(fail(&report, &f));
        };
        u = cand;
        f = fc;
        sys = s;
        r = rc;
        report.iterations += 1;
        report.residual = r;
        report.trajectory.push(r);
    }
    report.converged = true;
    let t = &report.trajectory;
    if t.len() >= 2 {
        let start = t.len().saturating_sub(4);
        report.tail_constant = t[start..]
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / (w[0] * w[0]))
            .reduce(f64::max);
    }
    Ok((f, report))
}

fn chart_interior(c: VertexChart, u: f64) -> f64 {
    let (lo, hi) = c.u_domain();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let m = 0.05 * (hi - lo);
            u.clamp(lo + m, hi - m)
        }
        (false, true) => u.min(hi - 0.1),
        (true, false) => u.max(lo + 0.1),
        (false, false) => u,
    }
}

fn chart_center(c: VertexChart) -> f64 {
    let (lo, hi) = c.u_domain();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (false, true) => hi - 1.0,
        (true, false) => lo + 1.0,
        (false, false) => 0.0,
    }
}

/// A strictly admissible starting point.
///
/// Each vertex starts at the center of its chart. Each sweep then moves the
/// two endpoints of every violated pair bound by equal amounts to a point
/// inside the bound, and clamps every vertex back inside its chart.
pub fn default_initial(spec: &StructureSpec, tri: &Triangulation) -> Result<Vec<f64>> {
    const SWEEPS: usize = 100;
    spec.validate(tri)?;
    let n = tri.n_vertices();
    let charts: Vec<VertexChart> = (0..n).map(|v| spec.chart(v)).collect::<Result<_>>()?;
    let mut u: Vec<f64> = charts.iter().map(|c| chart_center(*c)).collect();
    let faces: Vec<FaceStructure> = (0..tri.faces.len()).map(|fi| spec.face(tri, fi)).collect();
    for _ in 0..SWEEPS {
        if admissible(spec, tri, &u) {
            return Ok(u);
        }
        for (fi, fs) in faces.iter().enumerate() {
            let v = tri.faces[fi].v;
            for e in 0..3 {
                let pb = fs.pair_bound(e)?;
                let (a, b) = (v[e], v[(e + 1) % 3]);
                let s = u[a] + u[b];
                let width = pb.upper - pb.lower;
                let margin = if width.is_finite() { 0.25 * width } else { 0.5 };
                let goal = if s <= pb.lower {
                    pb.lower + margin
                } else if s >= pb.upper {
                    pb.upper - margin
                } else {
                    continue;
                };
                let shift = (goal - s) / 2.0;
                u[a] += shift;
                if a != b {
                    u[b] += shift;
                }
            }
        }
        for (x, c) in u.iter_mut().zip(&charts) {
            *x = chart_interior(*c, *x);
        }
    }
    if admissible(spec, tri, &u) {
        Ok(u)
    } else {
        Err(Error::NoFeasibleStart(SWEEPS))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

struct Quadrature {
    rule: Vec<(f64, f64)>,
    tol: f64,
}

impl Quadrature {
    fn new(tol: f64) -> Self {
        Quadrature {
            rule: gauss_legendre(10),
            tol,
        }
    }

    fn panel<F: Fn(f64) -> Result<f64>>(&self, g: &F, a: f64, b: f64) -> Result<f64> {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (x, w) in &self.rule {
            s += w * g(m + h * x)?;
        }
        Ok(s * h)
    }

    fn adaptive<F: Fn(f64) -> Result<f64>>(
        &self,
        g: &F,
        a: f64,
        b: f64,
        whole: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = self.panel(g, a, m)?;
        let right = self.panel(g, m, b)?;
        if depth == 0 || (left + right - whole).abs() <= self.tol * (b - a).max(1e-3) {
            return Ok(left + right);
        }
        Ok(self.adaptive(g, a, m, left, depth - 1)? + self.adaptive(g, m, b, right, depth - 1)?)
    }

    fn integrate<F: Fn(f64) -> Result<f64>>(&self, g: F) -> Result<f64> {
        let whole = self.panel(&g, 0.0, 1.0)?;
        self.adaptive(&g, 0.0, 1.0, whole, 30)
    }
}

/// `int theta . du` along the segment from `u_from` to `u_to` in one face.
pub fn energy_face(fs: &FaceStructure, u_from: [f64; 3], u_to: [f64; 3]) -> Result<f64> {
    let du = [
        u_to[0] - u_from[0],
        u_to[1] - u_from[1],
        u_to[2] - u_from[2],
    ];
    if du == [0.0; 3] {
        return Ok(0.0);
    }
    if !fs.is_admissible(u_from) || !fs.is_admissible(u_to) {
        return Err(Error::PathLeavesDomain);
    }
    let g = |t: f64| -> Result<f64> {
        let u = [
            u_from[0] + t * du[0],
            u_from[1] + t * du[1],
            u_from[2] + t * du[2],
        ];
        if !fs.is_admissible(u) {
            return Err(Error::PathLeavesDomain);
        }
        let th = face_angles(fs, fs.f_from_u(u)?)?.as_array();
        Ok(th[0] * du[0] + th[1] * du[1] + th[2] * du[2])
    };
    Quadrature::new(1e-13).integrate(g)
}

/// `int (K - K*) . du` along the segment from `u_from` to `u_to` on the whole mesh.
pub fn energy(
    spec: &StructureSpec,
    tri: &Triangulation,
    target: &[f64],
    u_from: &[f64],
    u_to: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for face in 0..tri.faces.len() {
        let v = tri.faces[face].v;
        let fs = spec.face(tri, face);
        total += energy_face(&fs, v.map(|x| u_from[x]), v.map(|x| u_to[x]))
            .map_err(|e| e.at_face(face))?;
    }
    let lin: f64 = target
        .iter()
        .zip(u_from.iter().zip(u_to))
        .map(|(k, (a, b))| k * (b - a))
        .sum();
    Ok(total - lin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Family;
    use crate::curvature::curvature_map;
    use crate::mesh::pair_of_pants;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10);
        let w: f64 = rule.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        let x18: f64 = rule.iter().map(|(x, w)| w * x.powi(18)).sum();
        assert!((x18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn pants_regular_target() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0; 3]);
        let target = vec![2.0 * 2f64.acosh(); 3];
        let (f, rep) =
            solve_prescribed_curvature(&spec, &tri, &target, &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(f.iter().all(|x| x.abs() < 1e-8), "{f:?}");
        for w in rep.trajectory.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn zero_target_rejected() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0; 3]);
        let r = solve_prescribed_curvature(&spec, &tri, &[1.0, 0.0, 1.0], &SolveOptions::default());
        assert!(matches!(r, Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn default_initial_examples() {
        let tri = pair_of_pants();
        let a1 = StructureSpec::new(Family::A1, vec![0; 3], vec![3.0; 3]);
        let u = default_initial(&a1, &tri).unwrap();
        assert!(a1.admissible(&tri, &u).unwrap().is_empty());
        let a3 = StructureSpec::new(Family::A3, vec![0; 3], vec![0.5, 1.0, 2.0]);
        let u = default_initial(&a3, &tri).unwrap();
        assert!(a3.admissible(&tri, &u).unwrap().is_empty());
    }

    #[test]
    fn contradictory_constraints_have_no_start() {
        // eta = -1 on an A2 edge asks for u_a + u_b > 0 while both charts need u < 0.
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A2, vec![-1; 3], vec![-1.0, -0.5, -0.5]);
        assert!(matches!(
            default_initial(&spec, &tri),
            Err(Error::NoFeasibleStart(_))
        ));
    }

    #[test]
    fn energy_examples() {
        let fs = FaceStructure::plain(Family::A3, [0; 3], [1.0, 1.5, 2.0]);
        let a = [-0.6, -0.5, -0.7];
        let b = [-0.3, -0.4, -0.5];
        let c = [-0.5, -0.2, -0.6];
        assert_eq!(energy_face(&fs, a, a).unwrap(), 0.0);
        let direct = energy_face(&fs, a, b).unwrap();
        let two = energy_face(&fs, a, c).unwrap() + energy_face(&fs, c, b).unwrap();
        assert!((direct - two).abs() < 1e-10, "{direct} {two}");
        assert!(matches!(
            energy_face(&fs, a, [-3.0, -3.0, -3.0]),
            Err(Error::PathLeavesDomain)
        ));
    }

    #[test]
    fn solve_recovers_factors_on_pants() {
        let tri = pair_of_pants();
        let spec = StructureSpec::new(Family::A3, vec![0; 3], vec![1.0, 2.0, 1.5]);
        let f0 = [0.6, 0.5, 0.7];
        let k = curvature_map(&spec, &tri, &f0).unwrap();
        let (f, _) = solve_prescribed_curvature(&spec, &tri, &k, &SolveOptions::default()).unwrap();
        for (a, b) in f.iter().zip(f0) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
