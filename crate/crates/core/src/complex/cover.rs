//! Orientation double cover and evaluation of w₁ on 1-cycles.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ComplexError, Triangulation, ValidationFailure, ValidationReport};
use crate::gf2::BitVector;

/// One face-gluing between two top cells.
#[derive(Clone, Debug)]
pub(crate) struct Glue {
    pub other: usize,
    /// True when the reference orientations of the two cells induce the
    /// *same* orientation on the shared face, i.e. transporting a local
    /// orientation across the face flips it.
    pub flip: bool,
    pub face: Vec<usize>,
}

/// Face-adjacency of the top cells, with orientation-transport bits.
pub(crate) struct GlueData {
    pub cells_with_vertex: Vec<Vec<usize>>,
    pub adjacency: Vec<Vec<Glue>>,
}

impl GlueData {
    pub fn new(t: &Triangulation) -> Result<Self, ComplexError> {
        let cells = t.top_simplices();
        let mut by_face: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, s) in cells.iter().enumerate() {
            for omit in 0..s.len() {
                let mut face = s.clone();
                face.remove(omit);
                by_face.entry(face).or_default().push((ci, omit));
            }
        }
        let mut adjacency: Vec<Vec<Glue>> = vec![Vec::new(); cells.len()];
        for (face, inc) in &by_face {
            if inc.len() != 2 {
                return Err(ComplexError::Invalid(ValidationReport {
                    failures: vec![ValidationFailure::FaceSharing {
                        face: face.clone(),
                        count: inc.len(),
                    }],
                }));
            }
            let (a, ia) = inc[0];
            let (b, ib) = inc[1];
            // Removing position i from a sorted tuple carries the sign
            // (-1)^i, so orientations agree across the face iff i+j is odd.
            let flip = (ia + ib + 1) % 2 == 1;
            adjacency[a].push(Glue {
                other: b,
                flip,
                face: face.clone(),
            });
            adjacency[b].push(Glue {
                other: a,
                flip,
                face: face.clone(),
            });
        }
        let mut cells_with_vertex = vec![Vec::new(); t.num_vertices()];
        for (ci, s) in cells.iter().enumerate() {
            for &v in s {
                cells_with_vertex[v].push(ci);
            }
        }
        Ok(Self {
            cells_with_vertex,
            adjacency,
        })
    }
}

/// The orientation double cover of a triangulation.
#[derive(Clone, Debug)]
pub struct DoubleCover {
    pub cover: Triangulation,
    pub is_orientable: bool,
    /// For each base top simplex, the indices of its two lifts in the cover.
    pub sheet_map: Vec<(usize, usize)>,
}

impl Triangulation {
    /// Whether the manifold is orientable: a consistent 2-coloring of the
    /// dual graph under orientation transport exists.
    pub fn is_orientable(&self) -> Result<bool, ComplexError> {
        let glue = GlueData::new(self)?;
        let n = self.top_simplices().len();
        let mut color: Vec<Option<bool>> = vec![None; n];
        for start in 0..n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                let cc = color[c].unwrap();
                for g in &glue.adjacency[c] {
                    let want = cc ^ g.flip;
                    match color[g.other] {
                        None => {
                            color[g.other] = Some(want);
                            queue.push_back(g.other);
                        }
                        Some(have) if have != want => return Ok(false),
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(true)
    }

    /// Builds the orientation double cover from two oriented copies of each
    /// top simplex glued across faces by orientation compatibility. The
    /// cover is disconnected (two components) exactly when the base is
    /// orientable.
    pub fn orientation_double_cover(&self) -> Result<DoubleCover, ComplexError> {
        self.ensure_valid()?;
        let glue = GlueData::new(self)?;
        let cells = self.top_simplices();
        let n = cells.len();
        let node = |cell: usize, sheet: usize| cell * 2 + sheet;

        // Each base vertex v gets its own fiber: components of the graph on
        // (cell ∋ v) × {sheets}, glued across faces containing v. Vertex
        // stars are balls, so each fiber has exactly two components.
        let mut lift_vertex: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); 2 * n];
        let mut next_cover_vertex = 0;
        for v in 0..self.num_vertices() {
            let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
            for &c in &glue.cells_with_vertex[v] {
                for sheet in 0..2 {
                    let start = node(c, sheet);
                    if comp.contains_key(&start) {
                        continue;
                    }
                    let id = next_cover_vertex;
                    next_cover_vertex += 1;
                    comp.insert(start, id);
                    let mut queue = VecDeque::from([(c, sheet)]);
                    while let Some((cc, ss)) = queue.pop_front() {
                        for g in &glue.adjacency[cc] {
                            if !g.face.contains(&v) {
                                continue;
                            }
                            let ns = ss ^ usize::from(g.flip);
                            let nn = node(g.other, ns);
                            if !comp.contains_key(&nn) {
                                comp.insert(nn, id);
                                queue.push_back((g.other, ns));
                            }
                        }
                    }
                }
            }
            for (nd, id) in comp {
                lift_vertex[nd].insert(v, id);
            }
        }

        // Assemble the lifted cells.
        let mut cover_cells: Vec<Vec<usize>> = Vec::with_capacity(2 * n);
        for (c, s) in cells.iter().enumerate() {
            for sheet in 0..2 {
                let lifted: Vec<usize> = s.iter().map(|&v| lift_vertex[node(c, sheet)][&v]).collect();
                cover_cells.push(lifted);
            }
        }
        let cover = Triangulation::new(self.dim(), next_cover_vertex, cover_cells.clone());

        // Locate each lift in the cover's canonical ordering.
        let sheet_map: Vec<(usize, usize)> = (0..n)
            .map(|c| {
                let locate = |sheet: usize| {
                    let mut key = cover_cells[node(c, sheet)].clone();
                    key.sort_unstable();
                    cover
                        .top_simplices()
                        .binary_search(&key)
                        .expect("lifted cell present in cover")
                };
                (locate(0), locate(1))
            })
            .collect();

        let is_orientable = self.is_orientable()?;
        Ok(DoubleCover {
            cover,
            is_orientable,
            sheet_map,
        })
    }

    /// Evaluates w₁ on the edge 1-cycle `z`: returns true exactly when a
    /// local orientation transported around `z` comes back reversed, i.e.
    /// when `z` does not lift to the orientation double cover.
    ///
    /// The result depends only on the homology class of `z`.
    pub fn w1_evaluate(&self, z: &BitVector) -> Result<bool, ComplexError> {
        self.w1_transport(z, None)
    }

    /// Same computation with all internal choices (cell per edge, traversal
    /// orders) randomized from `seed`. The outcome must not change; tests
    /// use this to confirm choice-independence.
    pub fn w1_evaluate_seeded(&self, z: &BitVector, seed: u64) -> Result<bool, ComplexError> {
        self.w1_transport(z, Some(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn w1_transport(&self, z: &BitVector, mut rng: Option<ChaCha8Rng>) -> Result<bool, ComplexError> {
        self.check_one_cycle(z)?;
        let glue = GlueData::new(self)?;
        let edges = self.faces(1);
        let support: Vec<&Vec<usize>> = z.ones().map(|e| &edges[e]).collect();
        if support.is_empty() {
            return Ok(false);
        }

        // Incidence of support edges at each vertex.
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in support.iter().enumerate() {
            incident.entry(e[0]).or_default().push(i);
            incident.entry(e[1]).or_default().push(i);
        }

        // Decompose the support into closed edge walks (all degrees are
        // even, so a walk can only get stuck back at its start).
        let mut used = vec![false; support.len()];
        let mut total = false;
        for first in 0..support.len() {
            if used[first] {
                continue;
            }
            let start = support[first][0];
            let mut walk_edges = Vec::new();
            let mut walk_vertices = vec![start];
            let mut current = start;
            loop {
                let candidates: Vec<usize> = incident[&current]
                    .iter()
                    .copied()
                    .filter(|&i| !used[i])
                    .collect();
                if candidates.is_empty() {
                    break;
                }
                let pick = match rng.as_mut() {
                    Some(r) => *candidates.choose(r).unwrap(),
                    None => candidates[0],
                };
                used[pick] = true;
                let e = support[pick];
                current = if e[0] == current { e[1] } else { e[0] };
                walk_edges.push(pick);
                walk_vertices.push(current);
            }
            debug_assert_eq!(current, start, "walk must close up");

            // Pick a carrier cell for every walk edge.
            let carrier: Vec<usize> = walk_edges
                .iter()
                .map(|&i| {
                    let e = support[i];
                    let cands: Vec<usize> = glue.cells_with_vertex[e[0]]
                        .iter()
                        .copied()
                        .filter(|&c| self.top_simplices()[c].contains(&e[1]))
                        .collect();
                    match rng.as_mut() {
                        Some(r) => *cands.choose(r).unwrap(),
                        None => cands[0],
                    }
                })
                .collect();

            // Transport a local orientation around the walk; consecutive
            // carriers are joined inside the star of the vertex they share.
            let m = walk_edges.len();
            let mut value = false;
            for i in 0..m {
                let from = carrier[i];
                let to = carrier[(i + 1) % m];
                let shared = walk_vertices[i + 1];
                value ^= star_path_parity(self, &glue, shared, from, to, rng.as_mut());
            }
            total ^= value;
        }
        Ok(total)
    }
}

/// Parity of orientation flips along a face path between two cells inside
/// the closed star of `v`. Vertex stars of valid triangulations are balls,
/// so the parity does not depend on the path.
fn star_path_parity(
    t: &Triangulation,
    glue: &GlueData,
    v: usize,
    from: usize,
    to: usize,
    mut rng: Option<&mut ChaCha8Rng>,
) -> bool {
    debug_assert!(t.top_simplices()[from].contains(&v));
    debug_assert!(t.top_simplices()[to].contains(&v));
    if from == to {
        return false;
    }
    let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
    parity.insert(from, false);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let p = parity[&c];
        if c == to {
            return p;
        }
        let mut nexts: Vec<(usize, bool)> = glue.adjacency[c]
            .iter()
            .filter(|g| g.face.contains(&v))
            .map(|g| (g.other, p ^ g.flip))
            .collect();
        if let Some(r) = rng.as_mut() {
            nexts.shuffle(r);
        }
        for (other, np) in nexts {
            parity.entry(other).or_insert_with(|| {
                queue.push_back(other);
                np
            });
        }
    }
    parity
        .get(&to)
        .copied()
        .expect("star of a vertex is connected")
}

#[cfg(test)]
mod tests {
    use super::super::{catalog, combinations};
    use super::*;

    #[test]
    fn sphere_cover_is_disconnected() {
        let t = Triangulation::new(3, 5, combinations(&[0, 1, 2, 3, 4], 4));
        let dc = t.orientation_double_cover().unwrap();
        assert!(dc.is_orientable);
        let report = dc.cover.validate();
        // Two disjoint spheres: everything valid except connectivity.
        assert!(report
            .failures
            .iter()
            .all(|f| matches!(f, super::super::ValidationFailure::Disconnected { .. })));
        assert_eq!(dc.cover.top_simplices().len(), 10);
    }

    #[test]
    fn rp2_cover_is_a_sphere() {
        let t = catalog("RP2").unwrap();
        let dc = t.orientation_double_cover().unwrap();
        assert!(!dc.is_orientable);
        assert!(dc.cover.validate().is_valid());
        assert_eq!(dc.cover.euler_characteristic(), 2 * t.euler_characteristic());
        assert_eq!(dc.cover.euler_characteristic(), 2);
    }

    #[test]
    fn twisted_bundle_cover_connected() {
        let t = catalog("S2twS1").unwrap();
        let dc = t.orientation_double_cover().unwrap();
        assert!(!dc.is_orientable);
        assert!(dc.cover.validate().is_valid());
        assert_eq!(dc.cover.euler_characteristic(), 0);
    }

    #[test]
    fn sheet_map_has_two_distinct_lifts() {
        let t = catalog("RP2").unwrap();
        let dc = t.orientation_double_cover().unwrap();
        for &(a, b) in &dc.sheet_map {
            assert_ne!(a, b);
        }
        assert_eq!(dc.sheet_map.len(), t.top_simplices().len());
    }

    #[test]
    fn w1_zero_cycle_is_zero() {
        let t = catalog("RP2xS1").unwrap();
        let z = BitVector::zeros(t.faces(1).len());
        assert!(!t.w1_evaluate(&z).unwrap());
    }

    #[test]
    fn w1_rejects_non_cycles() {
        let t = catalog("S2").unwrap();
        let mut z = BitVector::zeros(t.faces(1).len());
        z.set(0);
        assert!(matches!(
            t.w1_evaluate(&z),
            Err(ComplexError::NotACycle { .. })
        ));
    }
}
