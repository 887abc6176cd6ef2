//! Sampled verification suites for the identities and structural properties.
//!
//! Sample `n` of a suite is drawn from stream `n` of the seed, so results do not depend on
//! the execution mode. Per-sample results are reduced in index order.

use crate::conformal::{FaceStructure, Family};
use crate::curvature::{
    assemble_jacobian_with, definiteness, dtheta_df, dtheta_df_chain, dtheta_df_difference,
    face_jacobian_u, Branch, FaceState,
};
use crate::exec::Exec;
use crate::hexagon::{
    center_identities, classify_domain, domain_column, embed, gram_residual, polar,
    ratio_compatibility_residual, table_column, HexLengths, Lemma,
};
use crate::lorentz::CausalClass;
use crate::sampling::{
    self, admissible_u, face_sample, face_structure, geometry, inside_charts, interior_face_sample,
    interior_mesh_point, light_like_face, rng, INTERIOR_MARGIN,
};
use crate::solver::energy_face;
use rand::Rng;
use std::fmt;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub name: String,
    pub samples: usize,
    /// Largest residual or error seen.
    pub worst: f64,
    pub bound: f64,
    /// Samples that broke the bound or the property.
    pub violations: usize,
    pub note: String,
}

impl Summary {
    /// Summarizes per-sample values; `None` skips a sample, NaN counts as a violation.
    pub fn collect(name: impl Into<String>, bound: f64, results: &[Option<f64>]) -> Summary {
        let mut worst = f64::NEG_INFINITY;
        let mut violations = 0;
        let mut samples = 0;
        for r in results.iter().flatten() {
            samples += 1;
            if r.is_nan() || *r >= bound {
                violations += 1;
            }
            worst = if r.is_nan() {
                f64::INFINITY
            } else {
                worst.max(*r)
            };
        }
        if samples == 0 {
            worst = 0.0;
        }
        Summary {
            name: name.into(),
            samples,
            worst,
            bound,
            violations,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Summary {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.samples > 0 && self.violations == 0
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: samples={} worst={:.3e} bound={:.0e} violations={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.worst,
            self.bound,
            self.violations
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

fn draws<T: Send, F>(n: usize, seed: u64, exec: Exec, f: F) -> Vec<T>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> T + Sync + Send,
{
    exec.map(n, |i| f(&mut rng(seed, i as u64)))
}

/// Compatibility of the family's partial lengths on random admissible faces.
///
/// The residual is relative to `max(1, |product|)`; faces whose ratios admit only complex
/// splits are evaluated in complex form, see [`ratio_compatibility_residual`].
pub fn compatibility(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let res: Vec<(Option<f64>, bool)> = draws(n, seed, exec, |r| {
        let s = face_sample(family, None, r);
        let Ok(state) = FaceState::new(&s.structure, s.f) else {
            return (None, false);
        };
        let rho = state.edges.map(|e| e.rho);
        (
            Some(ratio_compatibility_residual(state.lengths, rho)),
            state.splits().is_err(),
        )
    });
    let complex = res.iter().filter(|x| x.1).count();
    let vals: Vec<Option<f64>> = res.into_iter().map(|x| x.0).collect();
    Summary::collect(format!("compatibility {family}"), 1e-10, &vals)
        .with_note(format!("{complex} faces with complex splits"))
}

/// Glickenstein-Thomas identity on the chain-rule derivative.
pub fn glickenstein_thomas(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let vals = draws(n, seed, exec, |r| {
        let s = face_sample(family, None, r);
        let state = FaceState::new(&s.structure, s.f).ok()?;
        let m = dtheta_df_chain(&state);
        let l = state.lengths;
        let mut worst = 0.0f64;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let gt = l.as_array()[i].cosh() * m[j][i] + l.as_array()[k].cosh() * m[k][i];
            worst = worst.max((m[i][i] - gt).abs() / m[i][i].abs().max(1.0));
        }
        Some(worst)
    });
    Summary::collect(format!("glickenstein-thomas {family}"), 1e-10, &vals)
}

/// Normwise relative error of the closed-form derivative against central differences.
///
/// The reference is the Richardson extrapolation of steps `1e-6` and `5e-7`, which removes the
/// `h^2` term that dominates near chart singularities.
pub fn derivative_error(fs: &FaceStructure, f: [f64; 3]) -> Option<(f64, Branch)> {
    let d = dtheta_df(fs, f).ok()?;
    let coarse = dtheta_df_difference(fs, f, 1e-6).ok()?;
    let fine = dtheta_df_difference(fs, f, 5e-7).ok()?;
    let fd: [[f64; 3]; 3] =
        std::array::from_fn(|r| std::array::from_fn(|c| (4.0 * fine[r][c] - coarse[r][c]) / 3.0));
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for r in 0..3 {
        for c in 0..3 {
            num = num.max((d.dtheta_df[r][c] - fd[r][c]).abs());
            den = den.max(fd[r][c].abs());
        }
    }
    Some((num / den.max(f64::MIN_POSITIVE), d.branch))
}

const BRANCH_FAMILIES: [Family; 3] = [Family::A1, Family::A2, Family::A3];

fn branch_face(branch: Branch, r: &mut impl Rng) -> Option<(FaceStructure, [f64; 3])> {
    if branch == Branch::LightLike {
        for _ in 0..100 {
            let family = BRANCH_FAMILIES[r.random_range(0..2)];
            let s = light_like_face(family, 500, r)?;
            if inside_charts(&s.structure, s.f, INTERIOR_MARGIN) {
                return Some((s.structure, s.f));
            }
        }
        return None;
    }
    for _ in 0..10_000 {
        let family = BRANCH_FAMILIES[r.random_range(0..3)];
        let s = interior_face_sample(family, r);
        if dtheta_df(&s.structure, s.f).ok()?.branch == branch {
            return Some((s.structure, s.f));
        }
    }
    None
}

/// Closed-form angle derivatives against central differences on faces of one branch.
///
/// Faces come from [`interior_face_sample`], away from chart singularities.
pub fn derivative_branch(branch: Branch, n: usize, seed: u64, exec: Exec) -> Summary {
    let bound = if branch == Branch::LightLike {
        1e-3
    } else {
        1e-5
    };
    let vals = draws(n, seed, exec, |r| {
        let (fs, f) = branch_face(branch, r)?;
        derivative_error(&fs, f).map(|(e, b)| if b == branch { e } else { f64::NAN })
    });
    let missing = vals.iter().filter(|v| v.is_none()).count();
    Summary::collect(format!("angle derivative {}", branch.name()), bound, &vals)
        .with_note(format!("{missing} draws found no face of this branch"))
}

/// Closed-form derivative against central differences on random faces of a family.
pub fn derivative_family(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let vals = draws(n, seed, exec, |r| {
        let s = interior_face_sample(family, r);
        derivative_error(&s.structure, s.f).map(|x| x.0)
    });
    Summary::collect(format!("angle derivative {family}"), 1e-5, &vals)
}

/// Symmetry of the face Jacobian in `u` on interior faces, entrywise relative to `max(1, |entry|)`.
pub fn face_symmetry(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let vals = draws(n, seed, exec, |r| {
        let s = interior_face_sample(family, r);
        let m = face_jacobian_u(&s.structure, s.f).ok()?.matrix;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..i {
                let d =
                    (m[(i, j)] - m[(j, i)]).abs() / m[(i, j)].abs().max(m[(j, i)].abs()).max(1.0);
                worst = worst.max(d);
            }
        }
        Some(worst)
    });
    Summary::collect(format!("face symmetry {family}"), 1e-12, &vals)
}

/// Negative definiteness of the face Jacobian, optionally within `near` of the boundary.
///
/// The reported value is the largest eigenvalue divided by the largest entry. The note splits
/// the samples by whether the partial-length signs match the special corner, see
/// [`FaceStructure::partial_sign_violations`].
pub fn face_definiteness(
    family: Family,
    near: Option<f64>,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Summary {
    let res = draws(n, seed, exec, |r| {
        let s = face_sample(family, near, r);
        let j = face_jacobian_u(&s.structure, s.f).ok()?;
        let pattern = s.structure.partial_sign_violations(s.f).ok()?.is_empty();
        let scale = j.matrix.abs().max();
        let nd = j.is_negative_definite();
        Some((
            if nd {
                j.max_eigenvalue() / scale
            } else {
                f64::NAN
            },
            pattern,
            nd,
        ))
    });
    let count = |p: bool, nd: bool| {
        res.iter()
            .flatten()
            .filter(|x| x.1 == p && x.2 == nd)
            .count()
    };
    let vals: Vec<Option<f64>> = res.iter().map(|x| x.map(|y| y.0)).collect();
    let name = match near {
        Some(d) => format!("face definiteness {family} near boundary ({d:.0e})"),
        None => format!("face definiteness {family}"),
    };
    Summary::collect(name, 0.0, &vals).with_note(format!(
        "sign pattern holds: {} definite, {} not; breaks: {} definite, {} not",
        count(true, true),
        count(true, false),
        count(false, true),
        count(false, false)
    ))
}

/// Symmetry and definiteness of the assembled Jacobian on random meshes.
///
/// Definiteness uses every admissible point; symmetry only points inside the window of
/// [`interior_mesh_point`], where round-off in the chain rule stays below the bound.
pub fn mesh_jacobian(
    family: Family,
    vertices: usize,
    n: usize,
    seed: u64,
    exec: Exec,
) -> (Summary, Summary) {
    let res = draws(n, seed, exec, |r| {
        let tri = sampling::random_mesh(vertices, r);
        let spec = sampling::random_spec(family, &tri, false, r);
        let u = sampling::admissible_point(&spec, &tri, 20, r)?;
        let f = spec.f_from_u(&u).ok()?;
        let m = assemble_jacobian_with(&spec, &tri, &f, Exec::Sequential).ok()?;
        let d = definiteness(&m);
        let scale = m.abs().max();
        let nd = if d.negative_definite(scale) {
            d.max_eigenvalue / scale
        } else {
            f64::NAN
        };
        let sym = interior_mesh_point(&spec, &tri, &f).then(|| d.asymmetry / scale.max(1.0));
        Some((sym, nd))
    });
    let sym: Vec<Option<f64>> = res.iter().map(|x| x.and_then(|y| y.0)).collect();
    let nd: Vec<Option<f64>> = res.iter().map(|x| x.map(|y| y.1)).collect();
    let outside = res.iter().flatten().filter(|x| x.0.is_none()).count();
    (
        Summary::collect(format!("mesh symmetry {family} N={vertices}"), 1e-11, &sym).with_note(
            format!("{outside} points outside the interior window skipped"),
        ),
        Summary::collect(format!("mesh definiteness {family} N={vertices}"), 0.0, &nd),
    )
}

/// Midpoints of admissible pairs are admissible.
pub fn convexity(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let vals = draws(n, seed, exec, |r| {
        let fs = face_structure(family, r);
        let a = admissible_u(&fs, r)?;
        let b = admissible_u(&fs, r)?;
        let m = [0, 1, 2].map(|k| 0.5 * (a[k] + b[k]));
        Some(if fs.is_admissible(m) { 0.0 } else { f64::NAN })
    });
    Summary::collect(format!("convexity {family}"), 1.0, &vals)
}

/// Direct energy segment against a two-leg path through a third admissible point.
pub fn path_independence(family: Family, n: usize, seed: u64, exec: Exec) -> Summary {
    let vals = draws(n, seed, exec, |r| {
        let fs = face_structure(family, r);
        let (a, b, c) = (
            admissible_u(&fs, r)?,
            admissible_u(&fs, r)?,
            admissible_u(&fs, r)?,
        );
        let direct = energy_face(&fs, a, b).ok()?;
        let legs = energy_face(&fs, a, c).ok()? + energy_face(&fs, c, b).ok()?;
        Some((direct - legs).abs())
    });
    Summary::collect(format!("energy path independence {family}"), 1e-8, &vals)
}

/// Gram and polar residuals of the embedding for lengths uniform in `[0.2, 4]`.
pub fn embedding(n: usize, seed: u64, exec: Exec) -> (Summary, Summary) {
    let res = draws(n, seed, exec, |r| {
        let l = sampling::lengths(0.2, 4.0, r);
        let v = embed(l).ok()?;
        let p = polar(&v);
        let scale = l.as_array().iter().map(|x| x.cosh()).fold(1.0, f64::max);
        let mut orth = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    orth = orth.max(p[a].dot(v[b]).abs());
                }
            }
        }
        Some((gram_residual(&v, l) / scale, orth))
    });
    let gram: Vec<Option<f64>> = res.iter().map(|x| x.map(|y| y.0)).collect();
    let orth: Vec<Option<f64>> = res.iter().map(|x| x.map(|y| y.1)).collect();
    (
        Summary::collect("gram residual", 1e-11, &gram),
        Summary::collect("polar orthogonality", 1e-11, &orth),
    )
}

/// Center identities, sign coherence and domain classification on hexagons of one class.
pub fn center_suite(class: CausalClass, n: usize, seed: u64, exec: Exec) -> Summary {
    let res = draws(n, seed, exec, |r| {
        let g = geometry(class, true, r);
        let rep = center_identities(&g);
        let classified = match classify_domain(&g) {
            Ok(d) => match (domain_column(d), g.sign_vector()) {
                (Some(col), Some(sv)) => {
                    let expect = table_column(col);
                    (0..6).all(|k| sv[k].abs() < 1e-9 || sv[k].signum() == expect[k])
                }
                (None, _) => class == CausalClass::LightLike,
                _ => false,
            },
            Err(_) => false,
        };
        let lemma_ok = match class {
            CausalClass::TimeLike => rep.lemma == Some(Lemma::TimeLike),
            CausalClass::SpaceLike => {
                matches!(rep.lemma, Some(Lemma::SpaceLikeOne | Lemma::SpaceLikeTwo))
            }
            CausalClass::LightLike => rep.lemma.is_none(),
        };
        let ok = classified && lemma_ok && rep.signs_coherent;
        (if ok { rep.max_residual } else { f64::NAN }, rep.equations)
    });
    let vals: Vec<Option<f64>> = res.iter().map(|x| Some(x.0)).collect();
    let eqs: usize = res.iter().map(|x| x.1).sum();
    Summary::collect(format!("center identities {}", class.name()), 1e-8, &vals)
        .with_note(format!("{eqs} equations"))
}

/// Regular hexagon: lengths with `cosh l = 2` give `theta = l`.
pub fn regular_fixed_point() -> Summary {
    let l = 2f64.acosh();
    let vals = match crate::hexagon::angles_from_lengths(HexLengths::new(l, l, l)) {
        Ok(a) => a.as_array().map(|t| Some((t - l).abs())).to_vec(),
        Err(_) => vec![Some(f64::NAN)],
    };
    Summary::collect("regular hexagon fixed point", 1e-12, &vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a1() {
        for s in [
            compatibility(Family::A1, 20, 1, Exec::Sequential),
            glickenstein_thomas(Family::A1, 20, 1, Exec::Sequential),
            derivative_family(Family::A1, 20, 1, Exec::Sequential),
            face_symmetry(Family::A1, 20, 1, Exec::Sequential),
            face_definiteness(Family::A1, None, 20, 1, Exec::Sequential),
            convexity(Family::A1, 20, 1, Exec::Sequential),
            path_independence(Family::A1, 5, 1, Exec::Sequential),
            center_suite(CausalClass::TimeLike, 20, 1, Exec::Sequential),
            regular_fixed_point(),
        ] {
            assert!(s.passed(), "{s}");
        }
    }

    #[test]
    fn summary_counts_nan_as_violation() {
        let s = Summary::collect("x", 1.0, &[Some(0.5), Some(f64::NAN), None]);
        assert_eq!((s.samples, s.violations), (2, 1));
        assert!(!s.passed());
    }

    #[test]
    fn exec_modes_agree() {
        let a = compatibility(Family::A3, 16, 9, Exec::Parallel);
        let b = compatibility(Family::A3, 16, 9, Exec::Sequential);
        assert_eq!(a, b);
    }
}
