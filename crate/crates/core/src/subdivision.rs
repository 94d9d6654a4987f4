//! Planar straight-line graphs over a fixed point list: angular adjacency,
//! face boundary walks and the full face structure (outer walk + holes).

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::geometry::{orient, walk_signed_area, winding_number, Orientation, Point, Rat};

/// Counterclockwise angular order of `a` and `b` around `center`, starting
/// from the positive x axis.
pub fn angular_cmp(center: &Point, a: &Point, b: &Point) -> Ordering {
    let half = |p: &Point| {
        let dy = p.cmp_y(center);
        let dx = p.cmp_x(center);
        if dy.is_gt() || (dy.is_eq() && dx.is_gt()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| match orient(center, a, b) {
        Orientation::CounterClockwise => Ordering::Less,
        Orientation::Clockwise => Ordering::Greater,
        Orientation::Collinear => Ordering::Equal,
    })
}

/// Adjacency lists kept in counterclockwise order around each vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlanarGraph {
    adj: Vec<Vec<usize>>,
}

impl PlanarGraph {
    pub fn new(n: usize) -> Self {
        PlanarGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(points: &[Point], edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = PlanarGraph::new(points.len());
        for (u, v) in edges {
            g.insert_edge(points, u, v);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn insert_edge(&mut self, points: &[Point], u: usize, v: usize) {
        Self::insert_sorted(&mut self.adj[u], points, u, v);
        Self::insert_sorted(&mut self.adj[v], points, v, u);
    }

    fn insert_sorted(list: &mut Vec<usize>, points: &[Point], center: usize, w: usize) {
        let c = &points[center];
        let pos = list
            .binary_search_by(|&x| angular_cmp(c, &points[x], &points[w]))
            .unwrap_or_else(|e| e);
        list.insert(pos, w);
    }

    /// Successor of half-edge `u -> v` along the face on its left.
    pub fn next_half_edge(&self, u: usize, v: usize) -> (usize, usize) {
        let around = &self.adj[v];
        let k = around
            .iter()
            .position(|&x| x == u)
            .expect("half-edge not in graph");
        let w = around[(k + around.len() - 1) % around.len()];
        (v, w)
    }

    /// Vertex sequence of the face walk that starts with half-edge `u -> v`.
    pub fn trace_walk(&self, u: usize, v: usize) -> Vec<usize> {
        let mut walk = vec![u];
        let (mut a, mut b) = (u, v);
        loop {
            let (c, d) = self.next_half_edge(a, b);
            if (c, d) == (u, v) {
                break;
            }
            walk.push(c);
            a = c;
            b = d;
        }
        walk
    }

    pub fn half_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().map(move |&v| (u, v)))
    }

    /// Connected component label per vertex (isolated vertices get their own).
    pub fn components(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

pub fn walk_points(points: &[Point], walk: &[usize]) -> Vec<Point> {
    walk.iter().map(|&i| points[i].clone()).collect()
}

pub fn walk_area(points: &[Point], walk: &[usize]) -> Rat {
    walk_signed_area(&walk_points(points, walk))
}

/// Rotate a cyclic walk so it starts at its smallest vertex index.
pub fn normalize_walk(walk: &[usize]) -> Vec<usize> {
    if walk.is_empty() {
        return Vec::new();
    }
    let k = (0..walk.len()).min_by_key(|&i| walk[i]).unwrap();
    walk[k..].iter().chain(walk[..k].iter()).copied().collect()
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Counterclockwise outer boundary walk.
    pub outer: Vec<usize>,
    /// Outer walks (counterclockwise) of the components directly inside,
    /// including single isolated vertices and trees.
    pub holes: Vec<Vec<usize>>,
    /// Outer walk area minus the area enclosed by the holes.
    pub area: Rat,
}

impl Face {
    pub fn is_simple_empty(&self) -> bool {
        self.holes.is_empty() && {
            let set: HashSet<usize> = self.outer.iter().copied().collect();
            set.len() == self.outer.len()
        }
    }
}

/// All bounded faces of a planar straight-line graph.
#[derive(Clone, Debug)]
pub struct FaceStructure {
    pub faces: Vec<Face>,
    /// Face index of each half-edge's left side; `None` means unbounded.
    pub half_edge_face: HashMap<(usize, usize), Option<usize>>,
}

impl FaceStructure {
    pub fn build(points: &[Point], graph: &PlanarGraph) -> Self {
        let comp = graph.components();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);

        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut positive: Vec<(Vec<usize>, Rat)> = Vec::new();
        let mut walk_of_half: HashMap<(usize, usize), (bool, usize)> = HashMap::new();
        // Outer walk of each component: the most negative (or zero) walk.
        let mut outer_of_comp: Vec<Option<(Vec<usize>, Rat)>> = vec![None; ncomp];
        let mut outer_walk_ids: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ncomp];

        for (u, v) in graph.half_edges() {
            if seen.contains(&(u, v)) {
                continue;
            }
            let walk = graph.trace_walk(u, v);
            let hes: Vec<(usize, usize)> = (0..walk.len())
                .map(|i| (walk[i], walk[(i + 1) % walk.len()]))
                .collect();
            for he in &hes {
                seen.insert(*he);
            }
            let area = walk_area(points, &walk);
            if area.is_positive() {
                let id = positive.len();
                for he in &hes {
                    walk_of_half.insert(*he, (true, id));
                }
                positive.push((walk, area));
            } else {
                let c = comp[u];
                let better = outer_of_comp[c].as_ref().map_or(true, |(_, a)| &area < a);
                if better {
                    outer_of_comp[c] = Some((walk, area));
                    outer_walk_ids[c] = hes;
                }
            }
        }

        // Isolated vertices are components without walks.
        let mut faces: Vec<Face> = positive
            .iter()
            .map(|(w, a)| Face {
                outer: w.clone(),
                holes: Vec::new(),
                area: a.clone(),
            })
            .collect();

        let rep: Vec<usize> = {
            let mut r = vec![usize::MAX; ncomp];
            for (v, &c) in comp.iter().enumerate() {
                if r[c] == usize::MAX {
                    r[c] = v;
                }
            }
            r
        };

        let mut comp_face: Vec<Option<usize>> = vec![None; ncomp];
        for c in 0..ncomp {
            let p = &points[rep[c]];
            let mut best: Option<usize> = None;
            for (fi, (w, a)) in positive.iter().enumerate() {
                if comp[w[0]] == c {
                    continue;
                }
                if winding_number(p, &walk_points(points, w)) != 0
                    && best.map_or(true, |b| a < &positive[b].1)
                {
                    best = Some(fi);
                }
            }
            comp_face[c] = best;
            if let Some(fi) = best {
                let (hole, enclosed) = match &outer_of_comp[c] {
                    Some((w, a)) => {
                        let mut ccw = w.clone();
                        ccw.reverse();
                        (ccw, -a)
                    }
                    None => (vec![rep[c]], Rat::zero()),
                };
                faces[fi].area -= &enclosed;
                faces[fi].holes.push(hole);
            }
        }

        let mut half_edge_face = HashMap::new();
        for (he, (_, id)) in &walk_of_half {
            half_edge_face.insert(*he, Some(*id));
        }
        for c in 0..ncomp {
            for he in &outer_walk_ids[c] {
                half_edge_face.insert(*he, comp_face[c]);
            }
        }

        FaceStructure {
            faces,
            half_edge_face,
        }
    }

    /// Index of the bounded face containing `p` (not on any edge), if any.
    pub fn locate(&self, points: &[Point], p: &Point) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (fi, f) in self.faces.iter().enumerate() {
            let inside_outer = winding_number(p, &walk_points(points, &f.outer)) != 0;
            if !inside_outer {
                continue;
            }
            let in_hole = f
                .holes
                .iter()
                .filter(|h| h.len() >= 3)
                .any(|h| winding_number(p, &walk_points(points, h)) != 0);
            if !in_hole && best.map_or(true, |b| f.area < self.faces[b].area) {
                best = Some(fi);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    #[test]
    fn angular_order_is_counterclockwise() {
        let p = pts(&[(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]);
        let mut idx = vec![4, 2, 1, 3];
        idx.sort_by(|&a, &b| angular_cmp(&p[0], &p[a], &p[b]));
        assert_eq!(idx, vec![1, 2, 3, 4]);
    }

    #[test]
    fn square_has_one_bounded_face() {
        let p = pts(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let g = PlanarGraph::from_edges(&p, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let fs = FaceStructure::build(&p, &g);
        assert_eq!(fs.faces.len(), 1);
        assert_eq!(fs.faces[0].area, Rat::from_int(4));
        assert!(fs.faces[0].is_simple_empty());
    }

    #[test]
    fn nested_component_becomes_hole() {
        let p = pts(&[(0, 0), (6, 0), (6, 6), (0, 6), (2, 2), (4, 2), (3, 4), (5, 5)]);
        let g = PlanarGraph::from_edges(
            &p,
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 4)],
        );
        let fs = FaceStructure::build(&p, &g);
        assert_eq!(fs.faces.len(), 2);
        let outer = fs.faces.iter().find(|f| f.outer.contains(&0)).unwrap();
        // triangle area 2, isolated vertex 7 is a zero-area hole
        assert_eq!(outer.area, Rat::from_int(36 - 2));
        assert_eq!(outer.holes.len(), 2);
        assert!(!outer.is_simple_empty());
    }

    #[test]
    fn dangling_edge_makes_walk_non_simple() {
        let p = pts(&[(0, 0), (4, 0), (4, 4), (0, 4), (2, 2)]);
        let g = PlanarGraph::from_edges(&p, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]);
        let fs = FaceStructure::build(&p, &g);
        assert_eq!(fs.faces.len(), 1);
        assert_eq!(fs.faces[0].area, Rat::from_int(16));
        assert!(!fs.faces[0].is_simple_empty());
    }
}
