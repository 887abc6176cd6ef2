//! Ideal triangulations and their text format.
//!
//! Vertices are boundary components, edges are ideal edges, and faces are
//! right-angled hexagons. The line format is
//!
//! ```text
//! hexmesh 1 [open-edges]
//! v <id> alpha=<-1|0|1>
//! e <id> <a> <b> eta=<real>
//! f <id> <va> <vb> <vc> <ea> <eb> <ec>
//! structure family=<tag> special=<id,...>
//! ```
//!
//! where face edge `ea` joins `va, vb`, `eb` joins `vb, vc`, and `ec` joins `vc, va`.
//! Blank lines and text after `#` are ignored. An edge may carry an optional
//! `c=<real>` field with the shift of the exponential families, oriented `a -> b`.

use crate::conformal::{Family, StructureSpec};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;

/// An ideal edge between two boundary components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: u64,
    pub a: usize,
    pub b: usize,
}

/// A hexagonal face; edge `e[n]` joins `v[n]` and `v[n + 1 (mod 3)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub id: u64,
    pub v: [usize; 3],
    pub e: [usize; 3],
}

/// The combinatorial surface. Vertices, edges and faces are addressed by dense index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Triangulation {
    pub vertex_ids: Vec<u64>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Allows edges that belong to a single face.
    pub open_edges: bool,
}

/// Non-fatal findings of validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A face touches the same boundary component at more than one corner.
    SelfAdjacentFace { face: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::SelfAdjacentFace { face } => write!(
                f,
                "face {face} repeats a boundary component; convexity of the admissible space is not established for identified corners"
            ),
        }
    }
}

impl Triangulation {
    pub fn n_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    /// Face-corner incidences of vertex `i`, ordered by face then corner.
    pub fn vertex_star(&self, i: usize) -> Result<Vec<(usize, usize)>> {
        if i >= self.n_vertices() {
            return Err(Error::OutOfRange(i));
        }
        let mut out = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for r in 0..3 {
                if f.v[r] == i {
                    out.push((fi, r));
                }
            }
        }
        Ok(out)
    }

    /// Incidence checks; returns warnings for allowed irregularities.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        let n = self.n_vertices();
        let mut uses = vec![0usize; self.edges.len()];
        let mut warnings = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if e.a >= n || e.b >= n {
                return Err(Error::OutOfRange(ei));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            for n_ in 0..3 {
                let (p, q) = (f.v[n_], f.v[(n_ + 1) % 3]);
                let ei = f.e[n_];
                let e = self.edges.get(ei).ok_or(Error::OutOfRange(ei))?;
                if !((e.a == p && e.b == q) || (e.a == q && e.b == p)) {
                    return Err(Error::FamilyConstraint(format!(
                        "face {fi}: edge {} does not join its corners",
                        e.id
                    )));
                }
                uses[ei] += 1;
            }
            if f.v[0] == f.v[1] || f.v[1] == f.v[2] || f.v[2] == f.v[0] {
                warnings.push(Warning::SelfAdjacentFace { face: fi });
            }
        }
        for (ei, &k) in uses.iter().enumerate() {
            let ok = if self.open_edges {
                k == 1 || k == 2
            } else {
                k == 2
            };
            if !ok {
                return Err(Error::FamilyConstraint(format!(
                    "edge {} belongs to {k} faces{}",
                    self.edges[ei].id,
                    if self.open_edges {
                        ""
                    } else {
                        " (use open-edges for a boundary)"
                    }
                )));
            }
        }
        Ok(warnings)
    }

    /// Faces incident to each edge.
    pub fn edge_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for e in f.e {
                if !out[e].contains(&fi) {
                    out[e].push(fi);
                }
            }
        }
        out
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_u64(tok: &str, line: usize) -> Result<u64> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected an id, found {tok:?}")))
}

fn parse_field<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| syntax(line, format!("expected {key}=..., found {tok:?}")))
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| syntax(line, format!("expected a real, found {tok:?}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(syntax(line, format!("non-finite value {tok:?}")))
    }
}

/// Parse a mesh file into a validated triangulation and structure.
pub fn parse(text: &str) -> Result<(Triangulation, StructureSpec)> {
    let (tri, spec, _) = parse_with_warnings(text)?;
    Ok((tri, spec))
}

/// [`parse`], also returning validation warnings.
pub fn parse_with_warnings(text: &str) -> Result<(Triangulation, StructureSpec, Vec<Warning>)> {
    let mut tri = Triangulation::default();
    let mut alpha = Vec::new();
    let mut eta = Vec::new();
    let mut c_shift = Vec::new();
    let mut vidx: HashMap<u64, usize> = HashMap::new();
    let mut eidx: HashMap<u64, usize> = HashMap::new();
    let mut fids: HashMap<u64, usize> = HashMap::new();
    let mut structure: Option<(Family, Vec<(u64, usize)>)> = None;
    let mut header = false;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tok: Vec<&str> = body.split_whitespace().collect();
        if !header {
            if tok[0] != "hexmesh" || tok.get(1) != Some(&"1") {
                return Err(syntax(line, "expected header `hexmesh 1`"));
            }
            match tok.get(2) {
                None => {}
                Some(&"open-edges") if tok.len() == 3 => tri.open_edges = true,
                Some(other) => return Err(syntax(line, format!("unknown header flag {other:?}"))),
            }
            header = true;
            continue;
        }
        match tok[0] {
            "v" => {
                if tok.len() != 3 {
                    return Err(syntax(line, "vertex record is `v <id> alpha=<a>`"));
                }
                let id = parse_u64(tok[1], line)?;
                let a: i8 = parse_field(tok[2], "alpha", line)?
                    .parse()
                    .map_err(|_| syntax(line, "alpha must be -1, 0 or 1"))?;
                if !(-1..=1).contains(&a) {
                    return Err(syntax(line, "alpha must be -1, 0 or 1"));
                }
                if vidx.insert(id, tri.vertex_ids.len()).is_some() {
                    return Err(syntax(line, format!("duplicate vertex id {id}")));
                }
                tri.vertex_ids.push(id);
                alpha.push(a);
            }
            "e" => {
                if tok.len() != 5 && tok.len() != 6 {
                    return Err(syntax(
                        line,
                        "edge record is `e <id> <a> <b> eta=<x> [c=<x>]`",
                    ));
                }
                let id = parse_u64(tok[1], line)?;
                let mut ends = [0usize; 2];
                for k in 0..2 {
                    let v = parse_u64(tok[2 + k], line)?;
                    ends[k] = *vidx.get(&v).ok_or(Error::DanglingReference {
                        line,
                        kind: "vertex",
                        id: v,
                    })?;
                }
                eta.push(parse_real(parse_field(tok[4], "eta", line)?, line)?);
                c_shift.push(match tok.get(5) {
                    Some(t) => parse_real(parse_field(t, "c", line)?, line)?,
                    None => 0.0,
                });
                if eidx.insert(id, tri.edges.len()).is_some() {
                    return Err(syntax(line, format!("duplicate edge id {id}")));
                }
                tri.edges.push(Edge {
                    id,
                    a: ends[0],
                    b: ends[1],
                });
            }
            "f" => {
                if tok.len() != 8 {
                    return Err(syntax(
                        line,
                        "face record is `f <id> <va> <vb> <vc> <ea> <eb> <ec>`",
                    ));
                }
                let id = parse_u64(tok[1], line)?;
                let mut v = [0usize; 3];
                let mut e = [0usize; 3];
                for k in 0..3 {
                    let x = parse_u64(tok[2 + k], line)?;
                    v[k] = *vidx.get(&x).ok_or(Error::DanglingReference {
                        line,
                        kind: "vertex",
                        id: x,
                    })?;
                    let y = parse_u64(tok[5 + k], line)?;
                    e[k] = *eidx.get(&y).ok_or(Error::DanglingReference {
                        line,
                        kind: "edge",
                        id: y,
                    })?;
                }
                if fids.insert(id, tri.faces.len()).is_some() {
                    return Err(syntax(line, format!("duplicate face id {id}")));
                }
                for k in 0..3 {
                    let ed = tri.edges[e[k]];
                    let (p, q) = (v[k], v[(k + 1) % 3]);
                    if !((ed.a == p && ed.b == q) || (ed.a == q && ed.b == p)) {
                        return Err(syntax(
                            line,
                            format!(
                                "edge {} does not join vertices {} and {}",
                                ed.id, tri.vertex_ids[p], tri.vertex_ids[q]
                            ),
                        ));
                    }
                }
                tri.faces.push(Face { id, v, e });
            }
            "structure" => {
                if structure.is_some() {
                    return Err(syntax(line, "duplicate structure record"));
                }
                if tok.len() < 2 || tok.len() > 3 {
                    return Err(syntax(
                        line,
                        "structure record is `structure family=<tag> [special=<ids>]`",
                    ));
                }
                let tag = parse_field(tok[1], "family", line)?;
                let family = Family::from_tag(tag)
                    .ok_or_else(|| syntax(line, format!("unknown family {tag:?}")))?;
                let mut special = Vec::new();
                if let Some(t) = tok.get(2) {
                    let list = parse_field(t, "special", line)?;
                    for s in list.split(',').filter(|s| !s.is_empty()) {
                        special.push((parse_u64(s, line)?, line));
                    }
                }
                structure = Some((family, special));
            }
            other => return Err(syntax(line, format!("unknown record {other:?}"))),
        }
    }
    if !header {
        return Err(syntax(1, "missing header `hexmesh 1`"));
    }
    let (family, special_ids) =
        structure.ok_or_else(|| syntax(text.lines().count().max(1), "missing structure record"))?;
    let mut special = vec![false; tri.n_vertices()];
    for (id, line) in special_ids {
        let v = *vidx.get(&id).ok_or(Error::DanglingReference {
            line,
            kind: "vertex",
            id,
        })?;
        special[v] = true;
    }
    let spec = StructureSpec {
        family,
        alpha,
        eta,
        special,
        c_shift,
    };
    let warnings = tri.validate()?;
    spec.validate(&tri)?;
    Ok((tri, spec, warnings))
}

fn fmt_real(x: f64) -> String {
    // Shortest representation that parses back to the same double.
    format!("{x:?}")
}

/// Canonical text form.
pub fn serialize(tri: &Triangulation, spec: &StructureSpec) -> String {
    let mut s = String::new();
    s.push_str(if tri.open_edges {
        "hexmesh 1 open-edges\n"
    } else {
        "hexmesh 1\n"
    });
    for (v, id) in tri.vertex_ids.iter().enumerate() {
        let _ = writeln!(s, "v {id} alpha={}", spec.alpha[v]);
    }
    for (e, ed) in tri.edges.iter().enumerate() {
        let _ = write!(
            s,
            "e {} {} {} eta={}",
            ed.id,
            tri.vertex_ids[ed.a],
            tri.vertex_ids[ed.b],
            fmt_real(spec.eta[e])
        );
        if spec.c_shift[e] != 0.0 {
            let _ = write!(s, " c={}", fmt_real(spec.c_shift[e]));
        }
        s.push('\n');
    }
    for f in &tri.faces {
        let v = f.v.map(|x| tri.vertex_ids[x]);
        let e = f.e.map(|x| tri.edges[x].id);
        let _ = writeln!(
            s,
            "f {} {} {} {} {} {} {}",
            f.id, v[0], v[1], v[2], e[0], e[1], e[2]
        );
    }
    let special: Vec<String> = (0..tri.n_vertices())
        .filter(|&v| spec.special[v])
        .map(|v| tri.vertex_ids[v].to_string())
        .collect();
    let _ = write!(s, "structure family={}", spec.family);
    if !special.is_empty() {
        let _ = write!(s, " special={}", special.join(","));
    }
    s.push('\n');
    s
}

/// The pair of pants: three boundary components, three edges, two hexagons.
pub fn pair_of_pants() -> Triangulation {
    Triangulation {
        vertex_ids: vec![0, 1, 2],
        edges: vec![
            Edge { id: 0, a: 0, b: 1 },
            Edge { id: 1, a: 1, b: 2 },
            Edge { id: 2, a: 2, b: 0 },
        ],
        faces: vec![
            Face {
                id: 0,
                v: [0, 1, 2],
                e: [0, 1, 2],
            },
            Face {
                id: 1,
                v: [0, 2, 1],
                e: [2, 1, 0],
            },
        ],
        open_edges: false,
    }
}

/// Parse `<key> <vertex> <value>` lines (target curvatures use `K`, factors use `f`).
pub fn parse_vertex_values(text: &str, key: &str, tri: &Triangulation) -> Result<Vec<f64>> {
    let idx: HashMap<u64, usize> = tri
        .vertex_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let mut out = vec![None; tri.n_vertices()];
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tok: Vec<&str> = body.split_whitespace().collect();
        if tok.len() != 3 || tok[0] != key {
            return Err(syntax(line, format!("expected `{key} <vertex> <value>`")));
        }
        let id = parse_u64(tok[1], line)?;
        let v = *idx.get(&id).ok_or(Error::DanglingReference {
            line,
            kind: "vertex",
            id,
        })?;
        if out[v].is_some() {
            return Err(syntax(line, format!("duplicate value for vertex {id}")));
        }
        out[v] = Some(parse_real(tok[2], line)?);
    }
    out.iter()
        .enumerate()
        .map(|(v, x)| {
            x.ok_or_else(|| {
                syntax(
                    0,
                    format!("no `{key}` value for vertex {}", tri.vertex_ids[v]),
                )
            })
        })
        .collect()
}

/// Inverse of [`parse_vertex_values`].
pub fn serialize_vertex_values(key: &str, values: &[f64], tri: &Triangulation) -> String {
    let mut s = String::new();
    for (v, x) in values.iter().enumerate() {
        let _ = writeln!(s, "{key} {} {}", tri.vertex_ids[v], fmt_real(*x));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PANTS: &str = "hexmesh 1
v 0 alpha=0
v 1 alpha=0
v 2 alpha=0
e 0 0 1 eta=3.0
e 1 1 2 eta=3.0
e 2 2 0 eta=3.0
f 0 0 1 2 0 1 2
f 1 0 2 1 2 1 0
structure family=A1
";

    #[test]
    fn pants_parses() {
        let (tri, spec) = parse(PANTS).unwrap();
        assert_eq!(tri.n_vertices(), 3);
        assert_eq!(tri.edges.len(), 3);
        assert_eq!(tri.faces.len(), 2);
        assert_eq!(spec.family, Family::A1);
        assert_eq!(tri, pair_of_pants());
    }

    #[test]
    fn pants_roundtrip_is_byte_identical() {
        let (tri, spec) = parse(PANTS).unwrap();
        assert_eq!(serialize(&tri, &spec), PANTS);
    }

    #[test]
    fn vertex_star_examples() {
        let tri = pair_of_pants();
        for i in 0..3 {
            assert_eq!(tri.vertex_star(i).unwrap().len(), 2);
        }
        assert_eq!(tri.vertex_star(3), Err(Error::OutOfRange(3)));
    }

    #[test]
    fn self_adjacent_face_warns() {
        // One face touching boundary 0 twice, glued to itself along a loop edge.
        let text = "hexmesh 1 open-edges
v 0 alpha=0
v 1 alpha=0
e 0 0 0 eta=3
e 1 0 1 eta=3
e 2 1 0 eta=3
f 0 0 0 1 0 1 2
structure family=A1
";
        let (tri, _, w) = parse_with_warnings(text).unwrap();
        assert_eq!(w, vec![Warning::SelfAdjacentFace { face: 0 }]);
        assert_eq!(tri.vertex_star(0).unwrap(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn dangling_edge() {
        let text = PANTS.replace("f 1 0 2 1 2 1 0", "f 1 0 2 1 2 1 9");
        assert!(matches!(
            parse(&text),
            Err(Error::DanglingReference {
                line: 9,
                kind: "edge",
                id: 9
            })
        ));
    }

    #[test]
    fn two_special_on_one_edge() {
        let text = PANTS
            .replace("family=A1", "family=MixedIII special=0,1")
            .replace("eta=3.0", "eta=1.0");
        assert!(matches!(parse(&text), Err(Error::FamilyConstraint(_))));
    }

    #[test]
    fn open_edges_required_for_boundary() {
        let text = "hexmesh 1
v 0 alpha=0
v 1 alpha=0
v 2 alpha=0
e 0 0 1 eta=3
e 1 1 2 eta=3
e 2 2 0 eta=3
f 0 0 1 2 0 1 2
structure family=A1
";
        assert!(matches!(parse(text), Err(Error::FamilyConstraint(_))));
        assert!(parse(&text.replace("hexmesh 1", "hexmesh 1 open-edges")).is_ok());
    }

    #[test]
    fn empty_mesh_is_header_only() {
        let tri = Triangulation::default();
        let spec = StructureSpec::new(Family::A1, vec![], vec![]);
        let s = serialize(&tri, &spec);
        assert_eq!(s, "hexmesh 1\nstructure family=A1\n");
        assert_eq!(parse(&s).unwrap(), (tri, spec));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert!(matches!(
            parse("hexmesh 2\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        let text = PANTS.replace("eta=3.0\ne 1", "eta=x\ne 1");
        assert!(matches!(parse(&text), Err(Error::Syntax { line: 5, .. })));
    }

    #[test]
    fn vertex_values_roundtrip() {
        let tri = pair_of_pants();
        let vals = [0.1, -2.5e-3, 1.0 / 3.0];
        let s = serialize_vertex_values("f", &vals, &tri);
        assert_eq!(parse_vertex_values(&s, "f", &tri).unwrap(), vals);
        assert!(parse_vertex_values("f 0 1\n", "f", &tri).is_err());
    }
}
