use std::collections::BTreeSet;

use rustworkx_core::petgraph::graph::UnGraph;
use rustworkx_core::planar::is_planar;
use serde::{Deserialize, Serialize};

use super::ReductionError;

/// Simple undirected graph on vertices `0..vertices`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ReductionError> {
        let g = Graph { vertices, edges: edges.into_iter().map(|(a, b)| [a, b]).collect() };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let mut seen = BTreeSet::new();
        for &[a, b] in &self.edges {
            if a >= self.vertices || b >= self.vertices {
                return Err(ReductionError::InvalidGraph(format!("edge {a}-{b} out of range")));
            }
            if a == b {
                return Err(ReductionError::InvalidGraph(format!("loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(ReductionError::InvalidGraph(format!("duplicate edge {a}-{b}")));
            }
        }
        Ok(())
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.edges.push([a, b]);
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e[0] == v || e[1] == v).count()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
    }

    pub fn is_planar(&self) -> bool {
        let mut g = UnGraph::<(), ()>::with_capacity(self.vertices, self.edges.len());
        let ids: Vec<_> = (0..self.vertices).map(|_| g.add_node(())).collect();
        for &[a, b] in &self.edges {
            g.add_edge(ids[a], ids[b], ());
        }
        is_planar(&g)
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.vertices`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let k = self.vertices;
        let mut g = self.clone();
        g.vertices += other.vertices;
        g.edges.extend(other.edges.iter().map(|&[a, b]| [a + k, b + k]));
        g
    }

    pub fn cycle(n: usize) -> Graph {
        Graph { vertices: n, edges: (0..n).map(|i| [i, (i + 1) % n]).collect() }
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push([a, b]);
            }
        }
        Graph { vertices: n, edges }
    }

    /// Ladder of `squares` unit squares; rails are `0..=squares` and
    /// `squares+1..`, square `j` (1-based) spans rungs `j-1` and `j`.
    pub fn ladder(squares: usize) -> Graph {
        let r = squares + 1;
        let mut edges = Vec::new();
        for i in 0..r {
            edges.push([i, r + i]);
            if i + 1 < r {
                edges.push([i, i + 1]);
                edges.push([r + i, r + i + 1]);
            }
        }
        Graph { vertices: 2 * r, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_shapes() {
        assert!(Graph::complete(4).is_planar());
        assert!(!Graph::complete(5).is_planar());
        assert_eq!(Graph::complete(4).max_degree(), 3);
        let l = Graph::ladder(4);
        assert_eq!(l.vertices, 10);
        assert_eq!(l.edges.len(), 13);
        assert!(l.max_degree() <= 3 && l.is_planar());
        assert!(Graph::new(2, [(0, 1), (1, 0)]).is_err());
    }
}
