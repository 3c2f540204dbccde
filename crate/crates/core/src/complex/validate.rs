//! Closed-manifold validation.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{combinations, Triangulation};

/// One violated invariant, with the offending simplex where applicable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ValidationFailure {
    /// Only dimensions 2 and 3 are supported.
    BadDimension { dim: usize },
    /// No top simplices at all.
    EmptyComplex,
    /// A vertex repeats inside one simplex.
    RepeatedVertex { simplex: Vec<usize> },
    /// The same top simplex appears twice.
    DuplicateSimplex { simplex: Vec<usize> },
    /// A vertex belongs to no top simplex.
    UnusedVertex { vertex: usize },
    /// A codimension-1 face is shared by a number of cells other than 2.
    FaceSharing { face: Vec<usize>, count: usize },
    /// The complex is not connected.
    Disconnected { components: usize },
    /// The link of a vertex is not a sphere of dimension `dim - 1`.
    BadVertexLink { vertex: usize, reason: String },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadDimension { dim } => write!(f, "dimension {dim} is not 2 or 3"),
            Self::EmptyComplex => write!(f, "complex has no top simplices"),
            Self::RepeatedVertex { simplex } => {
                write!(f, "simplex {simplex:?} has a repeated vertex")
            }
            Self::DuplicateSimplex { simplex } => {
                write!(f, "simplex {simplex:?} appears more than once")
            }
            Self::UnusedVertex { vertex } => write!(f, "vertex {vertex} is unused"),
            Self::FaceSharing { face, count } => {
                write!(f, "face {face:?} is shared by {count} cells (want 2)")
            }
            Self::Disconnected { components } => {
                write!(f, "complex has {components} connected components")
            }
            Self::BadVertexLink { vertex, reason } => {
                write!(f, "link of vertex {vertex} is not a sphere: {reason}")
            }
        }
    }
}

/// Outcome of validating every closed-manifold invariant.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            write!(f, "valid closed manifold")
        } else {
            for (i, failure) in self.failures.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{failure}")?;
            }
            Ok(())
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl Triangulation {
    /// Checks every closed-manifold invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();

        if self.dim != 2 && self.dim != 3 {
            failures.push(ValidationFailure::BadDimension { dim: self.dim });
            return ValidationReport { failures };
        }
        if self.top.is_empty() {
            failures.push(ValidationFailure::EmptyComplex);
            return ValidationReport { failures };
        }

        for s in &self.top {
            if s.windows(2).any(|w| w[0] == w[1]) {
                failures.push(ValidationFailure::RepeatedVertex { simplex: s.clone() });
            }
        }
        for w in self.top.windows(2) {
            if w[0] == w[1] {
                failures.push(ValidationFailure::DuplicateSimplex {
                    simplex: w[0].clone(),
                });
            }
        }
        if !failures.is_empty() {
            // Face and link checks assume well-formed simplices.
            return ValidationReport { failures };
        }

        let mut used = vec![false; self.num_vertices];
        for s in &self.top {
            for &v in s {
                used[v] = true;
            }
        }
        for (v, &u) in used.iter().enumerate() {
            if !u {
                failures.push(ValidationFailure::UnusedVertex { vertex: v });
            }
        }

        // Every codimension-1 face must be shared by exactly two cells.
        let mut face_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for s in &self.top {
            for f in combinations(s, self.dim) {
                *face_count.entry(f).or_insert(0) += 1;
            }
        }
        for (face, count) in &face_count {
            if *count != 2 {
                failures.push(ValidationFailure::FaceSharing {
                    face: face.clone(),
                    count: *count,
                });
            }
        }

        // Connectivity through edges.
        let mut uf = UnionFind::new(self.num_vertices);
        for s in &self.top {
            for w in s.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut roots: Vec<usize> = (0..self.num_vertices)
            .filter(|&v| used[v])
            .map(|v| uf.find(v))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            failures.push(ValidationFailure::Disconnected {
                components: roots.len(),
            });
        }

        for v in 0..self.num_vertices {
            if !used[v] {
                continue;
            }
            if let Err(reason) = self.check_vertex_link(v) {
                failures.push(ValidationFailure::BadVertexLink { vertex: v, reason });
            }
        }

        ValidationReport { failures }
    }

    /// The link of `v` must be a circle (dim 2) or a 2-sphere (dim 3).
    fn check_vertex_link(&self, v: usize) -> Result<(), String> {
        // Link cells: the opposite faces of the cells containing v.
        let link_cells: Vec<Vec<usize>> = self
            .top
            .iter()
            .filter(|s| s.contains(&v))
            .map(|s| s.iter().copied().filter(|&w| w != v).collect())
            .collect();
        if link_cells.is_empty() {
            return Err("empty link".into());
        }

        // Each codimension-1 face of the link must lie in exactly 2 link
        // cells, and the link must be connected.
        let mut sub_count: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, c) in link_cells.iter().enumerate() {
            for f in combinations(c, self.dim - 1) {
                sub_count.entry(f).or_default().push(i);
            }
        }
        for (f, cells) in &sub_count {
            if cells.len() != 2 {
                return Err(format!(
                    "link face {f:?} lies in {} link cells (want 2)",
                    cells.len()
                ));
            }
        }
        let mut uf = UnionFind::new(link_cells.len());
        for cells in sub_count.values() {
            uf.union(cells[0], cells[1]);
        }
        let mut roots: Vec<usize> = (0..link_cells.len()).map(|i| uf.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            return Err(format!("link has {} components", roots.len()));
        }

        if self.dim == 3 {
            // Closed connected surface: sphere iff χ = 2.
            let mut verts: Vec<usize> = link_cells.iter().flatten().copied().collect();
            verts.sort_unstable();
            verts.dedup();
            let mut edges: Vec<Vec<usize>> = sub_count.keys().cloned().collect();
            edges.dedup();
            let chi = verts.len() as i64 - edges.len() as i64 + link_cells.len() as i64;
            if chi != 2 {
                return Err(format!("link Euler characteristic {chi} (want 2)"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;

    #[test]
    fn boundary_of_four_simplex_is_valid() {
        // 5 vertices, 5 tetrahedra: the 3-sphere.
        let simplices = combinations(&[0, 1, 2, 3, 4], 4);
        let t = Triangulation::new(3, 5, simplices);
        let report = t.validate();
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn single_tetrahedron_is_not_closed() {
        let t = Triangulation::new(3, 4, vec![vec![0, 1, 2, 3]]);
        let report = t.validate();
        assert!(!report.is_valid());
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, ValidationFailure::FaceSharing { count: 1, .. })));
    }

    #[test]
    fn octahedron_is_a_valid_surface() {
        let t = catalog("S2").unwrap();
        assert!(t.validate().is_valid());
        assert_eq!(t.num_vertices(), 6);
        assert_eq!(t.top_simplices().len(), 8);
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn duplicate_simplex_reported() {
        let t = Triangulation::new(2, 4, vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 3]]);
        let report = t.validate();
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, ValidationFailure::DuplicateSimplex { .. })));
    }

    #[test]
    fn empty_complex_rejected() {
        let t = Triangulation::new(3, 0, vec![]);
        assert!(!t.validate().is_valid());
    }

    #[test]
    fn two_disjoint_spheres_are_disconnected() {
        let mut simplices = combinations(&[0, 1, 2, 3], 3);
        simplices.extend(combinations(&[4, 5, 6, 7], 3));
        let t = Triangulation::new(2, 8, simplices);
        let report = t.validate();
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, ValidationFailure::Disconnected { components: 2 })));
    }
}
