//! The six discrete conformal structure families.
//!
//! Each edge of a face is an A-edge (neither endpoint special) or a B-edge
//! (exactly one endpoint special). A-edges use the positive ratio formulas,
//! B-edges the negative ones. With `P_r = 1 + alpha_r e^{2 f_r}`:
//!
//! | family          | A-edge `cosh l`                  | B-edge `cosh l`                  |
//! |-----------------|----------------------------------|----------------------------------|
//! | A1, MixedI      | `-sqrt(P_i P_j) + eta e^{f_i+f_j}` | `sqrt(P_i P_j) + eta e^{f_i+f_j}`  |
//! | A2, MixedII     | `sqrt(P_i P_j) + eta e^{f_i+f_j}`  | `-sqrt(P_i P_j) + eta e^{f_i+f_j}` |
//! | A3, MixedIII    | `-cosh(f_j-f_i-C) + eta e^{f_i+f_j}` | `cosh(f_j-f_i-C) + eta e^{f_i+f_j}` |
//!
//! A2 and MixedII fix `alpha = -1`; A3 and MixedIII fix `alpha = 0`.
//! Admissible spaces are described in the coordinates `u` as bounds on
//! `u_r + u_s` per edge together with a per-vertex chart domain.

use crate::error::{Error, Result};
use crate::hexagon::HexLengths;
use crate::mesh::Triangulation;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

/// Family tag of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A1,
    A2,
    A3,
    MixedI,
    MixedII,
    MixedIII,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::A1,
        Family::A2,
        Family::A3,
        Family::MixedI,
        Family::MixedII,
        Family::MixedIII,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::A1 => "A1",
            Family::A2 => "A2",
            Family::A3 => "A3",
            Family::MixedI => "MixedI",
            Family::MixedII => "MixedII",
            Family::MixedIII => "MixedIII",
        }
    }

    pub fn from_tag(s: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
    }

    pub fn is_mixed(self) -> bool {
        matches!(self, Family::MixedI | Family::MixedII | Family::MixedIII)
    }

    /// The `alpha` value forced by the family, if any.
    pub fn forced_alpha(self) -> Option<i8> {
        match self {
            Family::A2 | Family::MixedII => Some(-1),
            Family::A3 | Family::MixedIII => Some(0),
            Family::A1 | Family::MixedI => None,
        }
    }

    fn law(self) -> Law {
        match self {
            Family::A1 | Family::MixedI => Law::Alpha,
            Family::A2 | Family::MixedII => Law::Inverted,
            Family::A3 | Family::MixedIII => Law::Exp,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Law {
    Alpha,
    Inverted,
    Exp,
}

/// Whether an edge uses the positive (A) or negative (B) ratio formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    A,
    B,
}

/// Weights and special vertices of a structure on a whole mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureSpec {
    pub family: Family,
    /// Per vertex, one of `-1, 0, 1`.
    pub alpha: Vec<i8>,
    /// Per edge.
    pub eta: Vec<f64>,
    /// Per vertex; empty set for A-families.
    pub special: Vec<bool>,
    /// Per edge, oriented from its first to its second endpoint.
    pub c_shift: Vec<f64>,
}

impl StructureSpec {
    /// A spec with zero shift and no special vertices.
    pub fn new(family: Family, alpha: Vec<i8>, eta: Vec<f64>) -> Self {
        let n = alpha.len();
        let m = eta.len();
        StructureSpec {
            family,
            alpha,
            eta,
            special: vec![false; n],
            c_shift: vec![0.0; m],
        }
    }

    pub fn with_special(mut self, special: Vec<bool>) -> Self {
        self.special = special;
        self
    }

    /// Chart of vertex `v`.
    pub fn chart(&self, v: usize) -> Result<VertexChart> {
        let a = *self.alpha.get(v).ok_or(Error::OutOfRange(v))?;
        VertexChart::new(self.family, a, self.special[v])
    }

    /// Face-local view of the structure.
    pub fn face(&self, tri: &Triangulation, face: usize) -> FaceStructure {
        let fc = &tri.faces[face];
        let mut eta = [0.0; 3];
        let mut c_shift = [0.0; 3];
        for n in 0..3 {
            let e = fc.e[n];
            eta[n] = self.eta[e];
            let forward = tri.edges[e].a == fc.v[n];
            c_shift[n] = if forward {
                self.c_shift[e]
            } else {
                -self.c_shift[e]
            };
        }
        let special = (0..3).find(|&r| self.special[fc.v[r]]);
        FaceStructure {
            family: self.family,
            alpha: fc.v.map(|v| self.alpha[v]),
            eta,
            c_shift,
            special,
        }
    }

    /// Structural and weight checks over every face.
    pub fn validate(&self, tri: &Triangulation) -> Result<()> {
        let n = tri.n_vertices();
        if self.alpha.len() != n || self.special.len() != n {
            return Err(Error::FamilyConstraint(
                "per-vertex data does not match the mesh".into(),
            ));
        }
        if self.eta.len() != tri.edges.len() || self.c_shift.len() != tri.edges.len() {
            return Err(Error::FamilyConstraint(
                "per-edge data does not match the mesh".into(),
            ));
        }
        for (v, &a) in self.alpha.iter().enumerate() {
            if !(-1..=1).contains(&a) {
                return Err(Error::FamilyConstraint(format!(
                    "vertex {v}: alpha {a} not in {{-1,0,1}}"
                )));
            }
            if let Some(forced) = self.family.forced_alpha() {
                if a != forced {
                    return Err(Error::FamilyConstraint(format!(
                        "vertex {v}: {} requires alpha = {forced}",
                        self.family
                    )));
                }
            }
        }
        if !self.family.is_mixed() && self.special.iter().any(|s| *s) {
            return Err(Error::FamilyConstraint(format!(
                "{} has no special vertices",
                self.family
            )));
        }
        for (e, edge) in tri.edges.iter().enumerate() {
            if self.special[edge.a] && self.special[edge.b] {
                return Err(Error::FamilyConstraint(format!(
                    "edge {e} joins two special vertices"
                )));
            }
            if !self.eta[e].is_finite() {
                return Err(Error::FamilyConstraint(format!(
                    "edge {e}: eta is not finite"
                )));
            }
        }
        for face in 0..tri.faces.len() {
            let fc = &tri.faces[face];
            if fc.v.iter().filter(|v| self.special[**v]).count() > 1 {
                return Err(Error::FamilyConstraint(format!(
                    "face {face} has more than one special vertex"
                )));
            }
            self.face(tri, face)
                .validate()
                .map_err(|e| e.at_face(face))?;
        }
        Ok(())
    }

    /// `u` coordinates of every vertex.
    pub fn u_from_f(&self, f: &[f64]) -> Result<Vec<f64>> {
        f.iter()
            .enumerate()
            .map(|(v, x)| self.chart(v)?.u_from_f(*x))
            .collect()
    }

    /// Conformal factors of every vertex.
    pub fn f_from_u(&self, u: &[f64]) -> Result<Vec<f64>> {
        u.iter()
            .enumerate()
            .map(|(v, x)| self.chart(v)?.f_from_u(*x))
            .collect()
    }

    /// `df_v / du_v` at factor `f`.
    pub fn dfdu(&self, v: usize, f: f64) -> Result<f64> {
        self.chart(v)?.dfdu(f)
    }

    /// Every violated constraint of the admissible space at `u`.
    pub fn admissible(&self, tri: &Triangulation, u: &[f64]) -> Result<Vec<Violation>> {
        let mut out = Vec::new();
        for face in 0..tri.faces.len() {
            let fs = self.face(tri, face);
            let uf = tri.faces[face].v.map(|v| u[v]);
            for mut v in fs.violations(uf).map_err(|e| e.at_face(face))? {
                v.face = face;
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Whether a mesh with this spec lies in a range with a proven existence theorem.
    pub fn existence_proven(&self, tri: &Triangulation) -> bool {
        match self.family {
            Family::A1 => !self.alpha.contains(&-1),
            Family::A2 => self.eta.iter().all(|e| *e <= 0.0),
            Family::A3 | Family::MixedIII => true,
            Family::MixedII => false,
            Family::MixedI => (0..tri.faces.len()).all(|face| {
                matches!(
                    self.face(tri, face).mixed_i_type(),
                    None | Some(1 | 2 | 4 | 5)
                )
            }),
        }
    }
}

/// Coordinate change `u <-> f` of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexChart {
    /// `u = f`, or `u = -f` when flipped.
    Linear { flipped: bool },
    /// `e^f = -1/sinh u` on `u < 0`, or `e^f = 1/sinh u` on `u > 0` when flipped.
    Sinh { flipped: bool },
    /// `e^f = 1/cosh u` on `u < 0`, or on `u > 0` when flipped.
    Cosh { flipped: bool },
    /// `u = -e^{-f}`, or `u = e^{-f}` when flipped.
    Exp { flipped: bool },
    /// `e^f = -1/sin u` on `(-pi/2, 0)`, or `e^f = 1/cos u` on `(-pi/2, 0)` when flipped.
    Trig { flipped: bool },
}

impl VertexChart {
    /// The chart of a vertex with weight `alpha`; special vertices use the flipped chart.
    pub fn new(family: Family, alpha: i8, special: bool) -> Result<Self> {
        let flipped = special;
        Ok(match (family.law(), alpha) {
            (Law::Alpha, 0) => VertexChart::Linear { flipped },
            (Law::Alpha, 1) => VertexChart::Sinh { flipped },
            (Law::Alpha, -1) => VertexChart::Cosh { flipped },
            (Law::Inverted, -1) => VertexChart::Trig { flipped },
            (Law::Exp, 0) => VertexChart::Exp { flipped },
            _ => {
                return Err(Error::FamilyConstraint(format!(
                    "alpha {alpha} is not allowed in {family}"
                )))
            }
        })
    }

    /// Open interval of allowed `u`.
    pub fn u_domain(self) -> (f64, f64) {
        use VertexChart::*;
        match self {
            Linear { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Sinh { flipped: false } | Cosh { flipped: false } | Exp { flipped: false } => {
                (f64::NEG_INFINITY, 0.0)
            }
            Sinh { flipped: true } | Cosh { flipped: true } | Exp { flipped: true } => {
                (0.0, f64::INFINITY)
            }
            Trig { .. } => (-FRAC_PI_2, 0.0),
        }
    }

    /// Open interval of allowed `f`.
    pub fn f_domain(self) -> (f64, f64) {
        match self {
            VertexChart::Cosh { .. } => (f64::NEG_INFINITY, 0.0),
            VertexChart::Trig { .. } => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn sign(self) -> f64 {
        use VertexChart::*;
        match self {
            Linear { flipped }
            | Sinh { flipped }
            | Cosh { flipped }
            | Exp { flipped }
            | Trig { flipped } => {
                if flipped {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    fn check(x: f64, (lo, hi): (f64, f64), what: &str) -> Result<()> {
        if x.is_finite() && x > lo && x < hi {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!(
                "{what} = {x} outside ({lo}, {hi})"
            )))
        }
    }

    pub fn u_from_f(self, f: f64) -> Result<f64> {
        Self::check(f, self.f_domain(), "f")?;
        let s = self.sign();
        let w = (-f).exp();
        Ok(match self {
            VertexChart::Linear { .. } => s * f,
            VertexChart::Sinh { .. } => -s * w.asinh(),
            // acosh(e^{-f}) written as 2 asinh(sqrt((e^{-f} - 1) / 2)).
            VertexChart::Cosh { .. } => -s * 2.0 * ((-f).exp_m1() / 2.0).sqrt().asinh(),
            VertexChart::Exp { .. } => -s * w,
            VertexChart::Trig { flipped: false } => -w.atan2((-(-2.0 * f).exp_m1()).sqrt()),
            VertexChart::Trig { flipped: true } => -(-(-2.0 * f).exp_m1()).sqrt().atan2(w),
        })
    }

    pub fn f_from_u(self, u: f64) -> Result<f64> {
        Self::check(u, self.u_domain(), "u")?;
        let s = self.sign();
        Ok(match self {
            VertexChart::Linear { .. } => s * u,
            VertexChart::Sinh { .. } => -(-s * u.sinh()).ln(),
            // ln cosh u written as ln_1p(2 sinh^2(u/2)).
            VertexChart::Cosh { .. } => -(2.0 * (u / 2.0).sinh().powi(2)).ln_1p(),
            VertexChart::Exp { .. } => -(-s * u).ln(),
            VertexChart::Trig { flipped: false } => -(-u.sin()).ln(),
            VertexChart::Trig { flipped: true } => -u.cos().ln(),
        })
    }

    /// `df/du` expressed through `f`.
    pub fn dfdu(self, f: f64) -> Result<f64> {
        Self::check(f, self.f_domain(), "f")?;
        let s = self.sign();
        Ok(s * match self {
            VertexChart::Linear { .. } => 1.0,
            VertexChart::Sinh { .. } => (1.0 + (2.0 * f).exp()).sqrt(),
            VertexChart::Cosh { .. } => (-(2.0 * f).exp_m1()).sqrt(),
            VertexChart::Exp { .. } => f.exp(),
            VertexChart::Trig { .. } => (2.0 * f).exp_m1().sqrt(),
        })
    }
}

/// Value of one edge at given factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeValue {
    pub cosh_l: f64,
    pub l: f64,
    /// `sinh d_ab / sinh d_ba` for the edge oriented `a -> b`.
    pub rho: f64,
    /// `(d cosh l / df_a, d cosh l / df_b)`, from the family law directly.
    pub dcosh: (f64, f64),
}

impl EdgeValue {
    /// `(dl/df_a, dl/df_b) = ((cosh l + 1/rho) / sinh l, (cosh l + rho) / sinh l)`.
    ///
    /// Equals `(coth d_ab, coth d_ba)` whenever the split is real. The numerators come from
    /// [`EdgeValue::dcosh`], which avoids cancelling `cosh l` against `1/rho` on long edges.
    pub fn dl_df(&self) -> (f64, f64) {
        let sh = self.l.sinh();
        (self.dcosh.0 / sh, self.dcosh.1 / sh)
    }
}

/// `1 + alpha e^{2f}`, without cancellation near `f = 0` when `alpha = -1`.
fn one_plus_alpha_exp(alpha: f64, f: f64) -> f64 {
    if alpha == -1.0 {
        -(2.0 * f).exp_m1()
    } else {
        1.0 + alpha * (2.0 * f).exp()
    }
}

/// `cosh l` and ratio of one edge `a -> b`.
#[allow(clippy::too_many_arguments)]
pub fn edge_value(
    family: Family,
    kind: EdgeKind,
    alpha: (i8, i8),
    eta: f64,
    c_shift: f64,
    fa: f64,
    fb: f64,
    edge: usize,
) -> Result<EdgeValue> {
    let sgn = if kind == EdgeKind::A { 1.0 } else { -1.0 };
    let cross = eta * (fa + fb).exp();
    let (cosh_l, rho, dcosh) = match family.law() {
        Law::Exp => {
            let x = fb - fa - c_shift;
            let ch = -sgn * x.cosh() + cross;
            (
                ch,
                sgn * (-x).exp(),
                (sgn * x.sinh() + cross, -sgn * x.sinh() + cross),
            )
        }
        law => {
            let (a, b) = (f64::from(alpha.0), f64::from(alpha.1));
            let pa = one_plus_alpha_exp(a, fa);
            let pb = one_plus_alpha_exp(b, fb);
            let want_positive = law == Law::Alpha;
            if (pa > 0.0) != want_positive || (pb > 0.0) != want_positive || pa == 0.0 || pb == 0.0
            {
                return Err(Error::DomainViolation(format!(
                    "1 + alpha e^(2f) has the wrong sign at factors ({fa}, {fb})"
                )));
            }
            let root = (pa * pb).sqrt();
            let tau = if law == Law::Alpha { -sgn } else { sgn };
            let ch = tau * root + cross;
            let da = tau * a * (2.0 * fa).exp() * pb / root + cross;
            let db = tau * b * (2.0 * fb).exp() * pa / root + cross;
            (ch, sgn * (pa / pb).sqrt(), (da, db))
        }
    };
    if !(cosh_l > 1.0) || !cosh_l.is_finite() {
        return Err(Error::NotAdmissible { edge, cosh_l });
    }
    let l = 2.0 * ((cosh_l - 1.0) / 2.0).sqrt().asinh();
    Ok(EdgeValue {
        cosh_l,
        l,
        rho,
        dcosh,
    })
}

/// One violated admissibility constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub face: usize,
    pub constraint: Constraint,
    /// Value of the constrained quantity.
    pub value: f64,
}

/// Which constraint a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Face corner `corner` outside its chart interval.
    Chart { corner: usize, lo: f64, hi: f64 },
    /// `u_a + u_b` of face edge `edge` outside `(lower, upper)`.
    Pair { edge: usize, lower: f64, upper: f64 },
    /// `coth d` from `corner` along face edge `edge` has the wrong sign; it must be negative
    /// exactly when `corner` is the special corner.
    PartialSign {
        edge: usize,
        corner: usize,
        negative: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constraint {
            Constraint::Chart { corner, lo, hi } => write!(
                f,
                "face {} corner {corner}: u = {} not in ({lo}, {hi})",
                self.face, self.value
            ),
            Constraint::Pair { edge, lower, upper } => write!(
                f,
                "face {} edge {edge}: u_r + u_s = {} not in ({lower}, {upper})",
                self.face, self.value
            ),
            Constraint::PartialSign {
                edge,
                corner,
                negative,
            } => write!(
                f,
                "face {} edge {edge}: coth d from corner {corner} is {}, expected {}",
                self.face,
                self.value,
                if negative { "negative" } else { "positive" }
            ),
        }
    }
}

/// Open interval for `u_a + u_b` on one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairBound {
    pub lower: f64,
    pub upper: f64,
}

impl PairBound {
    const FREE: PairBound = PairBound {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };

    fn above(lower: f64) -> Self {
        PairBound {
            lower,
            upper: f64::INFINITY,
        }
    }

    fn below(upper: f64) -> Self {
        PairBound {
            lower: f64::NEG_INFINITY,
            upper,
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        s > self.lower && s < self.upper
    }
}

/// The structure restricted to one face, corners ordered as in the face record.
///
/// Edge `n` joins corners `n` and `n + 1 (mod 3)`; `c_shift[n]` is oriented the same way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceStructure {
    pub family: Family,
    pub alpha: [i8; 3],
    pub eta: [f64; 3],
    pub c_shift: [f64; 3],
    /// Special corner, if any.
    pub special: Option<usize>,
}

impl FaceStructure {
    /// A face of an A-family with zero shift.
    pub fn plain(family: Family, alpha: [i8; 3], eta: [f64; 3]) -> Self {
        FaceStructure {
            family,
            alpha,
            eta,
            c_shift: [0.0; 3],
            special: None,
        }
    }

    pub fn with_special(mut self, special: Option<usize>) -> Self {
        self.special = special;
        self
    }

    pub fn edge_kind(&self, e: usize) -> EdgeKind {
        match self.special {
            Some(r) if r == e || r == (e + 1) % 3 => EdgeKind::B,
            _ => EdgeKind::A,
        }
    }

    pub fn chart(&self, r: usize) -> Result<VertexChart> {
        VertexChart::new(self.family, self.alpha[r], self.special == Some(r))
    }

    pub fn charts(&self) -> Result<[VertexChart; 3]> {
        Ok([self.chart(0)?, self.chart(1)?, self.chart(2)?])
    }

    /// Edge `e` at face factors `f`.
    pub fn edge(&self, e: usize, f: [f64; 3]) -> Result<EdgeValue> {
        let (a, b) = (e, (e + 1) % 3);
        edge_value(
            self.family,
            self.edge_kind(e),
            (self.alpha[a], self.alpha[b]),
            self.eta[e],
            self.c_shift[e],
            f[a],
            f[b],
            e,
        )
    }

    pub fn edges(&self, f: [f64; 3]) -> Result<[EdgeValue; 3]> {
        Ok([self.edge(0, f)?, self.edge(1, f)?, self.edge(2, f)?])
    }

    pub fn lengths(&self, f: [f64; 3]) -> Result<HexLengths> {
        let e = self.edges(f)?;
        Ok(HexLengths::new(e[0].l, e[1].l, e[2].l))
    }

    pub fn f_from_u(&self, u: [f64; 3]) -> Result<[f64; 3]> {
        let c = self.charts()?;
        Ok([
            c[0].f_from_u(u[0])?,
            c[1].f_from_u(u[1])?,
            c[2].f_from_u(u[2])?,
        ])
    }

    pub fn u_from_f(&self, f: [f64; 3]) -> Result<[f64; 3]> {
        let c = self.charts()?;
        Ok([
            c[0].u_from_f(f[0])?,
            c[1].u_from_f(f[1])?,
            c[2].u_from_f(f[2])?,
        ])
    }

    pub fn dfdu(&self, f: [f64; 3]) -> Result<[f64; 3]> {
        let c = self.charts()?;
        Ok([c[0].dfdu(f[0])?, c[1].dfdu(f[1])?, c[2].dfdu(f[2])?])
    }

    /// Type `1..=18` of a MixedI face, `None` for other families or faces without a special corner.
    pub fn mixed_i_type(&self) -> Option<u8> {
        if self.family != Family::MixedI {
            return None;
        }
        let r = self.special?;
        let a = self.alpha[r];
        let (mut p, mut q) = (self.alpha[(r + 1) % 3], self.alpha[(r + 2) % 3]);
        let rank = |x: i8| match x {
            0 => 0u8,
            1 => 1,
            _ => 2,
        };
        if rank(p) > rank(q) {
            std::mem::swap(&mut p, &mut q);
        }
        let pair = match (rank(p), rank(q)) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        };
        Some(1 + 3 * pair + rank(a))
    }

    /// Weight checks of the face.
    pub fn validate(&self) -> Result<()> {
        for e in 0..3 {
            self.pair_bound(e)?;
        }
        let Some(r) = self.special else { return Ok(()) };
        let (s, t) = ((r + 1) % 3, (r + 2) % 3);
        // Face edge indices: `rs` is edge r, `tr` is edge t, `st` is edge s.
        let (eta_rs, eta_rt, eta_st) = (self.eta[r], self.eta[t], self.eta[s]);
        match self.family {
            Family::MixedIII => {
                for (name, w) in [("rs", eta_rs), ("rt", eta_rt)] {
                    if w <= 0.0 && eta_st + w > 0.0 {
                        return Err(Error::FamilyConstraint(format!(
                            "B-edge {name} with eta = {w} <= 0 needs eta_opposite + eta <= 0"
                        )));
                    }
                }
            }
            Family::MixedI => {
                let ty = self.mixed_i_type().unwrap_or(0);
                let unsupported = |m: String| Err(Error::UnsupportedWeightRange(m));
                // Weight towards the other corner with alpha = x.
                let toward = |x: i8| if self.alpha[s] == x { eta_rs } else { eta_rt };
                match ty {
                    13 => {
                        let (w1, wm) = (toward(1), toward(-1));
                        if w1 < 0.0 && w1 + wm <= 0.0 {
                            return unsupported(format!(
                                "type XIII needs eta sum > 0, got {w1} + {wm}"
                            ));
                        }
                    }
                    14 => {
                        let wm = toward(-1);
                        if wm + eta_st <= 0.0 {
                            return unsupported(format!("type XIV needs {wm} + {eta_st} > 0"));
                        }
                    }
                    15 => {
                        let w1 = toward(1);
                        if w1 <= 0.0 {
                            return unsupported(format!("type XV needs eta > 0, got {w1}"));
                        }
                    }
                    17 if (eta_rs <= 0.0 || eta_rt <= 0.0) => {
                        return unsupported(format!(
                            "type XVII needs eta > 0, got {eta_rs}, {eta_rt}"
                        ));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Bound on `u_a + u_b` for face edge `e`, or the weight error of that edge.
    pub fn pair_bound(&self, e: usize) -> Result<PairBound> {
        let eta = self.eta[e];
        let (a, b) = (e, (e + 1) % 3);
        let bad = |m: &str| {
            Err(Error::FamilyConstraint(format!(
                "edge {e}: eta = {eta} {m}"
            )))
        };
        if self.family.law() == Law::Exp && self.c_shift[e] != 0.0 {
            return Err(Error::UnsupportedWeightRange(format!(
                "edge {e}: nonzero shift C = {} has no u chart",
                self.c_shift[e]
            )));
        }
        let kind = self.edge_kind(e);
        match (self.family.law(), kind) {
            (Law::Alpha, EdgeKind::A) => {
                let (p, q) = (self.alpha[a], self.alpha[b]);
                if eta <= 0.0 {
                    return bad("must be positive");
                }
                if p == q && eta <= f64::from(p * q) {
                    return bad("must exceed alpha_i alpha_j");
                }
                Ok(match (p.min(q), p.max(q)) {
                    (0, 0) => PairBound::above((2.0 / eta).ln()),
                    (-1, 0) | (0, _) => PairBound::above((1.0 / eta).ln()),
                    (-1, 1) => PairBound::above((-eta).asinh()),
                    _ => PairBound::above(-eta.acosh()),
                })
            }
            (Law::Alpha, EdgeKind::B) => {
                let r = self.special.unwrap_or(a);
                let o = if r == a { b } else { a };
                let unsupported = |m: &str| {
                    Err(Error::UnsupportedWeightRange(format!(
                        "edge {e}: eta = {eta} {m}"
                    )))
                };
                match (self.alpha[r], self.alpha[o]) {
                    (0, 0) => {
                        if eta > 0.0 {
                            Ok(PairBound::FREE)
                        } else {
                            bad("must be positive")
                        }
                    }
                    (1, 0) => {
                        if eta >= 0.0 {
                            Ok(PairBound::FREE)
                        } else {
                            unsupported("must be non-negative")
                        }
                    }
                    (-1, 0) => {
                        if eta > 0.0 {
                            Ok(PairBound::above((1.0 / eta).ln()))
                        } else {
                            bad("must be positive")
                        }
                    }
                    (0, 1) => Ok(if eta < 0.0 {
                        PairBound::above((-eta).ln())
                    } else {
                        PairBound::FREE
                    }),
                    (1, 1) => {
                        if eta > -1.0 {
                            Ok(PairBound::FREE)
                        } else {
                            unsupported("must exceed -1")
                        }
                    }
                    (-1, 1) => Ok(PairBound::above((-eta).asinh())),
                    (0, -1) => {
                        if eta > 0.0 {
                            Ok(PairBound::below(eta.ln()))
                        } else {
                            bad("must be positive")
                        }
                    }
                    (1, -1) => Ok(PairBound::below(eta.asinh())),
                    _ => {
                        if eta > 1.0 {
                            let w = eta.acosh();
                            Ok(PairBound {
                                lower: -w,
                                upper: w,
                            })
                        } else {
                            bad("must exceed 1")
                        }
                    }
                }
            }
            (Law::Inverted, EdgeKind::A) => {
                if eta < -1.0 {
                    return bad("must be at least -1");
                }
                if self.family == Family::MixedII && eta < 1.0 {
                    return bad("must be at least 1");
                }
                // cos(u_a + u_b) > -eta on (-pi, 0).
                Ok(if eta >= 1.0 {
                    PairBound::FREE
                } else {
                    PairBound::above(-(-eta).acos())
                })
            }
            (Law::Inverted, EdgeKind::B) => {
                if eta < 1.0 {
                    return bad("must be at least 1");
                }
                Ok(PairBound::FREE)
            }
            (Law::Exp, EdgeKind::A) => {
                if eta <= 0.0 {
                    return bad("must be positive");
                }
                Ok(PairBound::above(-(2.0 * eta).sqrt()))
            }
            (Law::Exp, EdgeKind::B) => Ok(if eta > 0.0 {
                PairBound::FREE
            } else {
                PairBound::above((-2.0 * eta).sqrt())
            }),
        }
    }

    /// Violated constraints at face coordinates `u`; `face` is left at 0.
    pub fn violations(&self, u: [f64; 3]) -> Result<Vec<Violation>> {
        let mut out = Vec::new();
        for (r, c) in self.charts()?.iter().enumerate() {
            let (lo, hi) = c.u_domain();
            if !(u[r] > lo && u[r] < hi) {
                out.push(Violation {
                    face: 0,
                    constraint: Constraint::Chart { corner: r, lo, hi },
                    value: u[r],
                });
            }
        }
        for e in 0..3 {
            let pb = self.pair_bound(e)?;
            let s = u[e] + u[(e + 1) % 3];
            if !pb.contains(s) {
                out.push(Violation {
                    face: 0,
                    constraint: Constraint::Pair {
                        edge: e,
                        lower: pb.lower,
                        upper: pb.upper,
                    },
                    value: s,
                });
            }
        }
        Ok(out)
    }

    /// Edges whose partial-length signs disagree with the special corner at factors `f`.
    ///
    /// The sign of `coth d_ab` is that of `dl/df_a`; it must be negative exactly when `a` is the
    /// special corner. Membership does not check this: the published admissible spaces only ask
    /// for positive lengths, and a mixed face can be admissible while breaking the pattern.
    pub fn partial_sign_violations(&self, f: [f64; 3]) -> Result<Vec<Violation>> {
        let mut out = Vec::new();
        for e in 0..3 {
            let (da, db) = self.edge(e, f)?.dl_df();
            for (corner, value) in [(e, da), ((e + 1) % 3, db)] {
                let negative = self.special == Some(corner);
                if !(value != 0.0 && (value < 0.0) == negative) {
                    out.push(Violation {
                        face: 0,
                        constraint: Constraint::PartialSign {
                            edge: e,
                            corner,
                            negative,
                        },
                        value,
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn is_admissible(&self, u: [f64; 3]) -> bool {
        matches!(self.violations(u), Ok(v) if v.is_empty())
    }
}
