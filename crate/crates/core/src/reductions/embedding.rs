use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Graph, ReductionError};

pub type GridPoint = [i64; 2];

/// Axis-parallel route for one graph edge; `path` runs from the first
/// endpoint's coordinates to the second's in unit steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub edge: [usize; 2],
    pub path: Vec<GridPoint>,
}

/// Orthogonal grid drawing of a graph of maximum degree three.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalEmbedding {
    pub coords: Vec<GridPoint>,
    pub routes: Vec<Route>,
}

/// Minimum number of interior grid vertices on a route joining two
/// degree-3 vertices.
pub const MIN_CHAIN: usize = 4;

impl OrthogonalEmbedding {
    pub fn graph(&self) -> Graph {
        Graph { vertices: self.coords.len(), edges: self.routes.iter().map(|r| r.edge).collect() }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.routes.iter().filter(|r| r.edge[0] == v || r.edge[1] == v).count()
    }

    /// Structural checks: unit steps, matching endpoints, routes disjoint
    /// away from shared endpoints, degrees in `1..=3`.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |m: String| ReductionError::Embedding(m);
        self.graph().validate().map_err(|e| bad(e.to_string()))?;
        let mut owner: BTreeMap<GridPoint, String> = BTreeMap::new();
        for (v, &p) in self.coords.iter().enumerate() {
            if let Some(o) = owner.insert(p, format!("vertex {v}")) {
                return Err(bad(format!("vertex {v} shares grid point {p:?} with {o}")));
            }
            let d = self.degree(v);
            if d == 0 || d > 3 {
                return Err(bad(format!("vertex {v} has degree {d}, expected 1..=3")));
            }
        }
        for (i, r) in self.routes.iter().enumerate() {
            let [a, b] = r.edge;
            let name = format!("route {i} ({a}-{b})");
            if r.path.len() < 2 || r.path[0] != self.coords[a] || *r.path.last().unwrap() != self.coords[b] {
                return Err(bad(format!("{name} does not join its endpoints")));
            }
            for w in r.path.windows(2) {
                let d = (w[0][0] - w[1][0]).abs() + (w[0][1] - w[1][1]).abs();
                if d != 1 {
                    return Err(bad(format!("{name} makes a non-unit step {:?} -> {:?}", w[0], w[1])));
                }
            }
            for &p in &r.path[1..r.path.len() - 1] {
                if let Some(o) = owner.insert(p, name.clone()) {
                    return Err(bad(format!("{name} meets {o} at {p:?}")));
                }
            }
        }
        Ok(())
    }

    /// Routes joining two degree-3 vertices with fewer than `MIN_CHAIN`
    /// interior points.
    pub fn short_routes(&self) -> Vec<usize> {
        (0..self.routes.len())
            .filter(|&i| {
                let r = &self.routes[i];
                self.degree(r.edge[0]) == 3 && self.degree(r.edge[1]) == 3 && r.path.len() - 2 < MIN_CHAIN
            })
            .collect()
    }

    /// The subdivided graph G': one vertex per used grid point. Returns the
    /// graph and the grid point of every vertex; original vertices keep
    /// their indices.
    pub fn expanded(&self) -> (Graph, Vec<GridPoint>) {
        let mut pts = self.coords.clone();
        let mut edges = Vec::new();
        for r in &self.routes {
            let mut prev = r.edge[0];
            for &p in &r.path[1..r.path.len() - 1] {
                pts.push(p);
                let cur = pts.len() - 1;
                edges.push([prev, cur]);
                prev = cur;
            }
            edges.push([prev, r.edge[1]]);
        }
        (Graph { vertices: pts.len(), edges }, pts)
    }

    /// Multiply all coordinates by `k`, stretching every unit step of every
    /// route into `k` steps.
    pub fn scaled(&self, k: i64) -> OrthogonalEmbedding {
        let coords = self.coords.iter().map(|p| [p[0] * k, p[1] * k]).collect();
        let routes = self
            .routes
            .iter()
            .map(|r| {
                let mut path = vec![[r.path[0][0] * k, r.path[0][1] * k]];
                for w in r.path.windows(2) {
                    let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
                    for s in 1..=k {
                        path.push([w[0][0] * k + dx * s, w[0][1] * k + dy * s]);
                    }
                }
                Route { edge: r.edge, path }
            })
            .collect();
        OrthogonalEmbedding { coords, routes }
    }

    /// Translate so that the minimum coordinate on each axis is `margin`.
    pub fn normalized(&self, margin: i64) -> OrthogonalEmbedding {
        let all = self.coords.iter().chain(self.routes.iter().flat_map(|r| r.path.iter()));
        let mx = all.clone().map(|p| p[0]).min().unwrap_or(0);
        let my = all.map(|p| p[1]).min().unwrap_or(0);
        let sh = |p: &GridPoint| [p[0] - mx + margin, p[1] - my + margin];
        OrthogonalEmbedding {
            coords: self.coords.iter().map(sh).collect(),
            routes: self
                .routes
                .iter()
                .map(|r| Route { edge: r.edge, path: r.path.iter().map(sh).collect() })
                .collect(),
        }
    }

    /// Guarantee `MIN_CHAIN` interior vertices between degree-3 vertices by
    /// uniform grid refinement. Embeddings that already comply are returned
    /// unchanged.
    pub fn subdivide_for_chains(&self) -> Result<OrthogonalEmbedding, ReductionError> {
        self.validate()?;
        let short = self.short_routes();
        if short.is_empty() {
            return Ok(self.clone());
        }
        let min_steps = short.iter().map(|&i| self.routes[i].path.len() as i64 - 1).min().unwrap();
        let k = (MIN_CHAIN as i64 + 1 + min_steps - 1) / min_steps;
        let out = self.scaled(k.max(2));
        debug_assert!(out.short_routes().is_empty());
        Ok(out)
    }

    pub fn disjoint_union(&self, other: &OrthogonalEmbedding, offset: GridPoint) -> OrthogonalEmbedding {
        let k = self.coords.len();
        let sh = |p: &GridPoint| [p[0] + offset[0], p[1] + offset[1]];
        let mut out = self.clone();
        out.coords.extend(other.coords.iter().map(sh));
        out.routes.extend(other.routes.iter().map(|r| Route {
            edge: [r.edge[0] + k, r.edge[1] + k],
            path: r.path.iter().map(sh).collect(),
        }));
        out
    }
}

/// Build a route from its corner points; straight runs are filled in.
/// Consecutive corners must share a row or a column.
pub fn route(edge: [usize; 2], corners: &[GridPoint]) -> Route {
    let mut path = vec![corners[0]];
    for w in corners.windows(2) {
        assert!(w[0][0] == w[1][0] || w[0][1] == w[1][1], "corners {:?} and {:?} not aligned", w[0], w[1]);
        let (dx, dy) = ((w[1][0] - w[0][0]).signum(), (w[1][1] - w[0][1]).signum());
        let mut p = w[0];
        while p != w[1] {
            p = [p[0] + dx, p[1] + dy];
            path.push(p);
        }
    }
    Route { edge, path }
}

fn emb(coords: &[GridPoint], routes: Vec<Route>) -> OrthogonalEmbedding {
    OrthogonalEmbedding { coords: coords.to_vec(), routes }
}

/// A path of `cells` grid cells on row `y`, split into two graph edges.
fn straight_path(cells: i64, y: i64) -> OrthogonalEmbedding {
    let mid = cells / 2;
    let c = [[0, y], [mid, y], [cells - 1, y]];
    emb(&c, vec![route([0, 1], &[c[0], c[1]]), route([1, 2], &[c[1], c[2]])])
}

/// Square ring of `4 * side` cells.
fn ring(side: i64, y: i64) -> OrthogonalEmbedding {
    let c = [[0, y], [side, y], [side, y + side], [0, y + side]];
    emb(
        &c,
        vec![
            route([0, 1], &[c[0], c[1]]),
            route([1, 2], &[c[1], c[2]]),
            route([2, 3], &[c[2], c[3]]),
            route([3, 0], &[c[3], c[0]]),
        ],
    )
}

/// Named embeddings. Graph fixtures: `single-edge`, `path`, `4-cycle`,
/// `k4`, `theta`. Small composite boards for the endgame formula: `chain6`,
/// `ring8-chain6`, `ring4-chain6`, `chains-4-5`.
pub fn fixture(name: &str) -> Option<OrthogonalEmbedding> {
    let e = match name {
        "single-edge" => emb(&[[0, 0], [1, 0]], vec![route([0, 1], &[[0, 0], [1, 0]])]),
        "path" | "chain6" => straight_path(6, 0),
        "4-cycle" => ring(2, 0),
        "k4" => {
            let c = [[2, 2], [12, 2], [7, 12], [7, 6]];
            emb(
                &c,
                vec![
                    route([0, 1], &[c[0], c[1]]),
                    route([1, 2], &[c[1], [14, 2], [14, 12], c[2]]),
                    route([2, 0], &[c[2], [0, 12], [0, 2], c[0]]),
                    route([3, 2], &[c[3], c[2]]),
                    route([3, 0], &[c[3], [2, 6], c[0]]),
                    route([3, 1], &[c[3], [12, 6], c[1]]),
                ],
            )
        }
        "theta" => {
            let c = [[0, 2], [6, 2], [3, 0], [3, 4]];
            emb(
                &c,
                vec![
                    route([0, 1], &[c[0], c[1]]),
                    route([0, 2], &[c[0], [0, 0], c[2]]),
                    route([2, 1], &[c[2], [6, 0], c[1]]),
                    route([0, 3], &[c[0], [0, 4], c[3]]),
                    route([3, 1], &[c[3], [6, 4], c[1]]),
                ],
            )
        }
        "ring8-chain6" => ring(2, 0).disjoint_union(&straight_path(6, 0), [0, 4]),
        "ring4-chain6" => ring(1, 0).disjoint_union(&straight_path(6, 0), [0, 3]),
        "chains-4-5" => straight_path(4, 0).disjoint_union(&straight_path(5, 0), [0, 2]),
        _ => return None,
    };
    Some(e)
}

pub const FIXTURE_NAMES: [&str; 9] =
    ["single-edge", "path", "4-cycle", "k4", "theta", "chain6", "ring8-chain6", "ring4-chain6", "chains-4-5"];

/// Grid points of G' that are adjacent on the grid but not joined by a
/// route step.
pub fn touching_pairs(points: &[GridPoint], g: &Graph) -> BTreeSet<(usize, usize)> {
    let idx: BTreeMap<GridPoint, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut out = BTreeSet::new();
    for (i, p) in points.iter().enumerate() {
        for d in [[1, 0], [0, 1]] {
            if let Some(&j) = idx.get(&[p[0] + d[0], p[1] + d[1]]) {
                if !g.has_edge(i, j) {
                    out.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    out
}
