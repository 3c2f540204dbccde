//! Triangulated closed manifolds of dimension 2 and 3.
//!
//! A [`Triangulation`] is given by its top-dimensional simplices over a dense
//! vertex set `0..V`. The module provides validation against the closed-
//! manifold conditions, constructive builders (products with a circle,
//! mapping tori, connected sums), the orientation double cover, and
//! evaluation of the first Stiefel-Whitney class on edge 1-cycles.

mod build;
mod catalog;
mod cover;
mod validate;

pub use build::{connected_sum, mapping_torus, product_with_circle, CircleBundle};
pub use catalog::{catalog, catalog_names, octahedron_antipodal_map};
pub use cover::DoubleCover;
pub use validate::{ValidationFailure, ValidationReport};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gf2::BitVector;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("invalid triangulation: {0}")]
    Invalid(ValidationReport),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("chain is not a cycle (boundary is nonzero at vertex {vertex})")]
    NotACycle { vertex: usize },
    #[error("chain has wrong length (expected {expected}, got {actual})")]
    ChainLength { expected: usize, actual: usize },
    #[error("vertex map is not an automorphism: {reason}")]
    NotAnAutomorphism { reason: String },
    #[error("circle builders need at least 3 layers (got {0})")]
    TooFewLayers(usize),
    #[error("expected a {expected}-dimensional triangulation, got dimension {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("unknown catalog manifold `{0}`")]
    UnknownCatalogName(String),
}

/// A triangulated closed manifold given by its top-dimensional simplices.
///
/// Vertices are dense integers `0..num_vertices` and the global vertex order
/// is numeric; every simplex is stored sorted and the simplex list itself is
/// sorted, so identical input data always produces identical tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Triangulation {
    dim: usize,
    num_vertices: usize,
    top: Vec<Vec<usize>>,
}

impl Triangulation {
    /// Builds a triangulation from raw simplex data. Tuples are sorted and
    /// the list canonically ordered; validity is *not* checked here — run
    /// [`Triangulation::validate`] for that.
    ///
    /// # Panics
    /// Panics if a simplex has the wrong vertex count or an out-of-range
    /// vertex; those are malformed data, not geometric defects.
    pub fn new(dim: usize, num_vertices: usize, simplices: Vec<Vec<usize>>) -> Self {
        let mut top: Vec<Vec<usize>> = simplices
            .into_iter()
            .map(|mut s| {
                assert_eq!(s.len(), dim + 1, "top simplex must have dim+1 vertices");
                assert!(
                    s.iter().all(|&v| v < num_vertices),
                    "vertex out of range in {s:?}"
                );
                s.sort_unstable();
                s
            })
            .collect();
        top.sort();
        Self {
            dim,
            num_vertices,
            top,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn top_simplices(&self) -> &[Vec<usize>] {
        &self.top
    }

    /// All `k`-dimensional faces of the top simplices, sorted, deduplicated.
    pub fn faces(&self, k: usize) -> Vec<Vec<usize>> {
        assert!(k <= self.dim, "face dimension exceeds complex dimension");
        if k == self.dim {
            let mut t = self.top.clone();
            t.dedup();
            return t;
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for s in &self.top {
            for f in combinations(s, k + 1) {
                out.push(f);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Alternating sum of face counts across all dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| {
                let n = self.faces(k).len() as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    /// Validation as a `Result`, for use as an operation precondition.
    pub fn ensure_valid(&self) -> Result<(), ComplexError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(ComplexError::Invalid(report))
        }
    }

    /// Edge table index lookup: edges are `faces(1)` in sorted order.
    pub fn edge_index(&self) -> BTreeMap<Vec<usize>, usize> {
        self.faces(1)
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect()
    }

    /// Serializes to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "vertices {}", self.num_vertices);
        for s in &self.top {
            let words: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", words.join(" "));
        }
        out
    }

    /// Parses the text format: `dim <2|3>`, `vertices <V>`, then one top
    /// simplex per line as space-separated vertex indices. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, ComplexError> {
        let mut dim: Option<usize> = None;
        let mut vertices: Option<usize> = None;
        let mut simplices: Vec<Vec<usize>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let first = words.next().unwrap();
            let err = |message: String| ComplexError::Parse {
                line: line_no,
                message,
            };
            match first {
                "dim" if dim.is_none() => {
                    let d: usize = words
                        .next()
                        .ok_or_else(|| err("missing dimension value".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad dimension: {e}")))?;
                    if d != 2 && d != 3 {
                        return Err(err(format!("dimension must be 2 or 3, got {d}")));
                    }
                    dim = Some(d);
                }
                "vertices" if dim.is_some() && vertices.is_none() => {
                    let v: usize = words
                        .next()
                        .ok_or_else(|| err("missing vertex count".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad vertex count: {e}")))?;
                    vertices = Some(v);
                }
                _ => {
                    let (Some(d), Some(v)) = (dim, vertices) else {
                        return Err(err(
                            "expected `dim` and `vertices` headers before simplices".into(),
                        ));
                    };
                    let mut simplex = Vec::with_capacity(d + 1);
                    for w in std::iter::once(first).chain(words) {
                        let vert: usize = w
                            .parse()
                            .map_err(|e| err(format!("bad vertex index `{w}`: {e}")))?;
                        if vert >= v {
                            return Err(err(format!(
                                "vertex {vert} out of range (vertices {v})"
                            )));
                        }
                        simplex.push(vert);
                    }
                    if simplex.len() != d + 1 {
                        return Err(err(format!(
                            "top simplex needs {} vertices, got {}",
                            d + 1,
                            simplex.len()
                        )));
                    }
                    simplices.push(simplex);
                }
            }
        }
        let (Some(d), Some(v)) = (dim, vertices) else {
            return Err(ComplexError::Parse {
                line: 0,
                message: "missing `dim` or `vertices` header".into(),
            });
        };
        Ok(Self::new(d, v, simplices))
    }

    /// A stable 64-bit digest of the combinatorial data, used to tie reports
    /// to the triangulation they came from.
    pub fn digest(&self) -> u64 {
        // FNV-1a over the canonical simplex stream.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.dim as u64);
        eat(self.num_vertices as u64);
        for s in &self.top {
            for &v in s {
                eat(v as u64);
            }
        }
        h
    }

    /// Checks `z` (over the canonical edge table) is a 1-cycle.
    pub(crate) fn check_one_cycle(&self, z: &BitVector) -> Result<(), ComplexError> {
        let edges = self.faces(1);
        if z.len() != edges.len() {
            return Err(ComplexError::ChainLength {
                expected: edges.len(),
                actual: z.len(),
            });
        }
        let mut degree = vec![0u8; self.num_vertices];
        for e in z.ones() {
            degree[edges[e][0]] ^= 1;
            degree[edges[e][1]] ^= 1;
        }
        if let Some(v) = degree.iter().position(|&d| d == 1) {
            return Err(ComplexError::NotACycle { vertex: v });
        }
        Ok(())
    }
}

impl std::fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Triangulation(dim={}, vertices={}, top={})",
            self.dim,
            self.num_vertices,
            self.top.len()
        )
    }
}

/// A simplicial self-map given by a vertex bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialAutomorphism {
    vertex_map: Vec<usize>,
}

impl SimplicialAutomorphism {
    pub fn identity(num_vertices: usize) -> Self {
        Self {
            vertex_map: (0..num_vertices).collect(),
        }
    }

    pub fn new(vertex_map: Vec<usize>) -> Self {
        Self { vertex_map }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Checks the map is a bijection of the vertex set carrying top
    /// simplices onto top simplices.
    pub fn ensure_automorphism_of(&self, t: &Triangulation) -> Result<(), ComplexError> {
        if self.vertex_map.len() != t.num_vertices() {
            return Err(ComplexError::NotAnAutomorphism {
                reason: format!(
                    "vertex map has {} entries for {} vertices",
                    self.vertex_map.len(),
                    t.num_vertices()
                ),
            });
        }
        let mut seen = vec![false; t.num_vertices()];
        for &img in &self.vertex_map {
            if img >= t.num_vertices() || seen[img] {
                return Err(ComplexError::NotAnAutomorphism {
                    reason: "vertex map is not a bijection".into(),
                });
            }
            seen[img] = true;
        }
        let image = Triangulation::new(
            t.dim(),
            t.num_vertices(),
            t.top_simplices()
                .iter()
                .map(|s| s.iter().map(|&v| self.apply(v)).collect())
                .collect(),
        );
        if image.top_simplices() != t.top_simplices() {
            return Err(ComplexError::NotAnAutomorphism {
                reason: "vertex map does not carry top simplices onto top simplices".into(),
            });
        }
        Ok(())
    }
}

/// Sorted `k`-subsets of a sorted slice, in lexicographic order.
pub(crate) fn combinations(s: &[usize], k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    s.iter().copied().combinations(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_of_four() {
        let s = vec![2, 5, 7, 9];
        let pairs = combinations(&s, 2);
        assert_eq!(pairs.len(), 6);
        assert_eq!(pairs[0], vec![2, 5]);
        assert_eq!(pairs[5], vec![7, 9]);
        let triples = combinations(&s, 3);
        assert_eq!(triples.len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let t = catalog("S3").unwrap();
        let text = t.to_text();
        let back = Triangulation::parse(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn parse_rejects_bad_vertex() {
        let text = "dim 2\nvertices 3\n0 1 5\n";
        match Triangulation::parse(text) {
            Err(ComplexError::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error on line 3, got {other:?}"),
        }
    }

    #[test]
    fn parse_allows_comments_and_blanks() {
        let text = "# a sphere\ndim 2\n\nvertices 4\n0 1 2 # base\n0 1 3\n0 2 3\n1 2 3\n";
        let t = Triangulation::parse(text).unwrap();
        assert_eq!(t.top_simplices().len(), 4);
        assert!(t.validate().is_valid());
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn digest_is_stable() {
        let a = catalog("RP2").unwrap();
        let b = catalog("RP2").unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), catalog("T2").unwrap().digest());
    }

    #[test]
    fn automorphism_identity_ok() {
        let t = catalog("S2").unwrap();
        SimplicialAutomorphism::identity(t.num_vertices())
            .ensure_automorphism_of(&t)
            .unwrap();
    }

    #[test]
    fn automorphism_rejects_non_simplicial_map() {
        let t = catalog("RP2").unwrap();
        // A transposition of two vertices of RP2_6 that is not a symmetry.
        let mut map: Vec<usize> = (0..6).collect();
        map.swap(0, 1);
        let phi = SimplicialAutomorphism::new(map);
        assert!(phi.ensure_automorphism_of(&t).is_err());
    }
}
