//! Rules engine for Dots & Polygons, in both scoring variants.
//!
//! A state is an immutable value: [`PolygonGameState::apply_move`] returns a
//! fresh state. The planar subdivision of drawn edges is maintained
//! incrementally (angular adjacency lists), and the set of still-legal edges
//! is cached, since legality is monotone: once an edge is illegal it stays so.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    convex_hull, locate_in_walk, on_closed_segment, Location, points_conflict, segments_conflict, signed_area, walk_signed_area,
    winding_number, GeometryError, Point, PolygonCycle, Rat, Segment,
};
use crate::subdivision::{walk_area, walk_points, PlanarGraph};

pub type Edge = (usize, usize);

pub fn norm_edge(i: usize, j: usize) -> Edge {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Closing any cycle scores the enclosed, not yet scored area.
    Holes,
    /// Only simple faces with no points inside score.
    Simple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    R,
    B,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::R => Player::B,
            Player::B => Player::R,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::R => f.write_str("R"),
            Player::B => f.write_str("B"),
        }
    }
}

/// Owner of a scored region. `Neutral` marks area that was filled before
/// the state was handed over (reduction boards), and counts for nobody.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    R,
    B,
    #[serde(rename = "neutral")]
    Neutral,
}

impl From<Player> for Owner {
    fn from(p: Player) -> Owner {
        match p {
            Player::R => Owner::R,
            Player::B => Owner::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    R,
    B,
    Draw,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoredRegion {
    /// Counterclockwise boundary walk, as point indices.
    pub boundary: Vec<usize>,
    /// Counterclockwise outer walks of scored-over islands.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<usize>>,
    pub owner: Owner,
    pub area: Rat,
}

impl ScoredRegion {
    pub fn boundary_cycle(&self, points: &[Point]) -> PolygonCycle {
        PolygonCycle::new(walk_points(points, &self.boundary))
    }

    pub fn hole_cycles(&self, points: &[Point]) -> Vec<PolygonCycle> {
        self.holes
            .iter()
            .map(|h| PolygonCycle::new(walk_points(points, h)))
            .collect()
    }

    /// Whether `p` lies in the open interior of the region.
    pub fn contains(&self, points: &[Point], p: &Point) -> bool {
        locate_in_walk(p, &walk_points(points, &self.boundary)) == Location::Inside
            && self
                .holes
                .iter()
                .all(|h| locate_in_walk(p, &walk_points(points, h)) == Location::Outside)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveOutcome {
    pub scored: Rat,
    pub new_regions: Vec<ScoredRegion>,
    pub extra_turn: bool,
    pub game_over: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    Crossing,
    ThroughPoint,
    InScoredArea,
    Duplicate,
    BadIndex,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::Crossing => "crossing",
            Violation::ThroughPoint => "through-point",
            Violation::InScoredArea => "in-scored-area",
            Violation::Duplicate => "duplicate",
            Violation::BadIndex => "bad-index",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("illegal move: {0}")]
    IllegalMove(Violation),
    #[error("game is not over")]
    NotTerminal,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug)]
pub struct PolygonGameState {
    points: Arc<Vec<Point>>,
    edges: BTreeSet<Edge>,
    regions: Vec<ScoredRegion>,
    score_r: Rat,
    score_b: Rat,
    offset_r: Rat,
    offset_b: Rat,
    to_move: Player,
    variant: Variant,
    graph: PlanarGraph,
    comp: Vec<usize>,
    legal: Vec<Edge>,
}

impl PartialEq for PolygonGameState {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
            && self.edges == other.edges
            && self.regions == other.regions
            && self.score_r == other.score_r
            && self.score_b == other.score_b
            && self.offset_r == other.offset_r
            && self.offset_b == other.offset_b
            && self.to_move == other.to_move
            && self.variant == other.variant
    }
}

impl Eq for PolygonGameState {}

fn seg(points: &[Point], e: Edge) -> Segment {
    Segment::new(points[e.0].clone(), points[e.1].clone())
}

/// Optional pieces of a state beyond the point set, for building
/// mid-game positions.
#[derive(Clone, Debug, Default)]
pub struct StateParts {
    pub edges: Vec<Edge>,
    pub regions: Vec<ScoredRegion>,
    pub offset_r: Rat,
    pub offset_b: Rat,
    pub to_move: Option<Player>,
}

impl PolygonGameState {
    pub fn new_game(points: Vec<Point>, variant: Variant) -> Result<Self, GameError> {
        Self::from_parts(points, variant, StateParts::default())
    }

    /// Assemble and validate an arbitrary state. Scores are derived from the
    /// offsets plus owned region areas.
    pub fn from_parts(
        points: Vec<Point>,
        variant: Variant,
        parts: StateParts,
    ) -> Result<Self, GameError> {
        if points.len() < 3 {
            return Err(GameError::InvalidInput("need at least three points".into()));
        }
        let distinct: HashSet<&Point> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(GameError::InvalidInput("duplicate points".into()));
        }
        convex_hull(&points).map_err(|_| GameError::InvalidInput("points are collinear".into()))?;

        let n = points.len();
        let mut edges = BTreeSet::new();
        for &(i, j) in &parts.edges {
            if i >= n || j >= n || i == j {
                return Err(GameError::InvalidInput(format!("bad edge ({i}, {j})")));
            }
            edges.insert(norm_edge(i, j));
        }
        let graph = PlanarGraph::from_edges(&points, edges.iter().copied());
        let comp = graph.components();

        let mut score_r = parts.offset_r.clone();
        let mut score_b = parts.offset_b.clone();
        for r in &parts.regions {
            match r.owner {
                Owner::R => score_r += &r.area,
                Owner::B => score_b += &r.area,
                Owner::Neutral => {}
            }
        }
        let mut state = PolygonGameState {
            points: Arc::new(points),
            edges,
            regions: parts.regions,
            score_r,
            score_b,
            offset_r: parts.offset_r,
            offset_b: parts.offset_b,
            to_move: parts.to_move.unwrap_or(Player::R),
            variant,
            graph,
            comp,
            legal: Vec::new(),
        };
        state.legal = state.compute_legal();
        state.validate().map_err(GameError::InvalidInput)?;
        Ok(state)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn regions(&self) -> &[ScoredRegion] {
        &self.regions
    }

    pub fn score(&self, p: Player) -> &Rat {
        match p {
            Player::R => &self.score_r,
            Player::B => &self.score_b,
        }
    }

    pub fn offset(&self, p: Player) -> &Rat {
        match p {
            Player::R => &self.offset_r,
            Player::B => &self.offset_b,
        }
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn graph(&self) -> &PlanarGraph {
        &self.graph
    }

    pub fn same_component(&self, i: usize, j: usize) -> bool {
        self.comp[i] == self.comp[j]
    }

    pub fn hull(&self) -> PolygonCycle {
        convex_hull(&self.points).expect("validated at construction")
    }

    pub fn hull_area(&self) -> Rat {
        signed_area(&self.hull())
    }

    /// Total area of all scored regions, neutral ones included.
    pub fn scored_area(&self) -> Rat {
        self.regions.iter().map(|r| &r.area).sum()
    }

    /// Legal moves, lexicographically sorted.
    pub fn legal_moves(&self) -> &[Edge] {
        &self.legal
    }

    pub fn is_terminal(&self) -> bool {
        self.legal.is_empty()
    }

    pub fn winner(&self) -> Result<Outcome, GameError> {
        if !self.is_terminal() {
            return Err(GameError::NotTerminal);
        }
        Ok(match self.score_r.cmp(&self.score_b) {
            std::cmp::Ordering::Greater => Outcome::R,
            std::cmp::Ordering::Less => Outcome::B,
            std::cmp::Ordering::Equal => Outcome::Draw,
        })
    }

    /// Same position with the players' identities exchanged.
    pub fn swap_roles(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.score_r, &mut s.score_b);
        std::mem::swap(&mut s.offset_r, &mut s.offset_b);
        s.to_move = s.to_move.other();
        for r in &mut s.regions {
            r.owner = match r.owner {
                Owner::R => Owner::B,
                Owner::B => Owner::R,
                Owner::Neutral => Owner::Neutral,
            };
        }
        s
    }

    fn region_contains_midpoint(&self, e: Edge) -> bool {
        let mid = self.points[e.0].midpoint(&self.points[e.1]);
        self.regions.iter().any(|r| r.contains(&self.points, &mid))
    }

    fn blocked_by_point(&self, e: Edge) -> bool {
        let (a, b) = (&self.points[e.0], &self.points[e.1]);
        self.points
            .iter()
            .enumerate()
            .any(|(k, p)| k != e.0 && k != e.1 && on_closed_segment(a, b, p))
    }

    fn crosses_drawn(&self, e: Edge) -> bool {
        let s = seg(&self.points, e);
        self.edges
            .iter()
            .any(|&f| segments_conflict(&s, &seg(&self.points, f)))
    }

    fn compute_legal(&self) -> Vec<Edge> {
        let n = self.points.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let e = (i, j);
                if self.edges.contains(&e)
                    || self.blocked_by_point(e)
                    || self.crosses_drawn(e)
                    || self.region_contains_midpoint(e)
                {
                    continue;
                }
                out.push(e);
            }
        }
        out
    }

    pub fn check_move(&self, i: usize, j: usize) -> Result<Edge, Violation> {
        let n = self.points.len();
        if i >= n || j >= n || i == j {
            return Err(Violation::BadIndex);
        }
        let e = norm_edge(i, j);
        if self.edges.contains(&e) {
            return Err(Violation::Duplicate);
        }
        if self.legal.binary_search(&e).is_ok() {
            return Ok(e);
        }
        if self.blocked_by_point(e) {
            Err(Violation::ThroughPoint)
        } else if self.crosses_drawn(e) {
            Err(Violation::Crossing)
        } else {
            debug_assert!(self.region_contains_midpoint(e));
            Err(Violation::InScoredArea)
        }
    }

    pub fn apply_move(&self, i: usize, j: usize) -> Result<(Self, MoveOutcome), GameError> {
        let e = self.check_move(i, j).map_err(GameError::IllegalMove)?;
        let mover = self.to_move;
        let mut graph = self.graph.clone();
        graph.insert_edge(&self.points, e.0, e.1);

        let mut new_regions = Vec::new();
        if self.comp[e.0] == self.comp[e.1] {
            let w1 = graph.trace_walk(e.0, e.1);
            let w2 = graph.trace_walk(e.1, e.0);
            for w in [w1, w2] {
                let area = walk_area(&self.points, &w);
                if !area.is_positive() {
                    continue;
                }
                if let Some(region) = self.score_new_face(&graph, w, area, mover) {
                    new_regions.push(region);
                }
            }
        }

        let mut comp = self.comp.clone();
        let (from, to) = (comp[e.1], comp[e.0]);
        if from != to {
            for c in comp.iter_mut() {
                if *c == from {
                    *c = to;
                }
            }
        }

        let mut edges = self.edges.clone();
        edges.insert(e);

        let scored: Rat = new_regions.iter().map(|r| &r.area).sum();
        let mut next = PolygonGameState {
            points: Arc::clone(&self.points),
            edges,
            regions: self.regions.clone(),
            score_r: self.score_r.clone(),
            score_b: self.score_b.clone(),
            offset_r: self.offset_r.clone(),
            offset_b: self.offset_b.clone(),
            to_move: mover,
            variant: self.variant,
            graph,
            comp,
            legal: Vec::new(),
        };
        match mover {
            Player::R => next.score_r += &scored,
            Player::B => next.score_b += &scored,
        }
        next.regions.extend(new_regions.iter().cloned());

        let new_seg = seg(&self.points, e);
        let walks: Vec<(Vec<Point>, Vec<Vec<Point>>)> = new_regions
            .iter()
            .map(|r| {
                let holes = r.holes.iter().map(|h| walk_points(&self.points, h)).collect();
                (walk_points(&self.points, &r.boundary), holes)
            })
            .collect();
        next.legal = self
            .legal
            .iter()
            .copied()
            .filter(|&f| f != e)
            .filter(|&f| !points_conflict(&new_seg.a, &new_seg.b, &self.points[f.0], &self.points[f.1]))
            .filter(|&f| {
                if walks.is_empty() {
                    return true;
                }
                let mid = self.points[f.0].midpoint(&self.points[f.1]);
                !walks.iter().any(|(outer, holes)| {
                    locate_in_walk(&mid, outer) == Location::Inside
                        && holes.iter().all(|h| locate_in_walk(&mid, h) == Location::Outside)
                })
            })
            .collect();

        let game_over = next.legal.is_empty();
        let extra_turn = scored.is_positive() && !game_over;
        if !extra_turn {
            next.to_move = mover.other();
        }
        Ok((
            next,
            MoveOutcome {
                scored,
                new_regions,
                extra_turn,
                game_over,
            },
        ))
    }

    /// Decide whether the freshly created bounded face with outer walk `w`
    /// scores, and build its region.
    fn score_new_face(
        &self,
        graph: &PlanarGraph,
        w: Vec<usize>,
        walk_area_value: Rat,
        mover: Player,
    ) -> Option<ScoredRegion> {
        let on_walk: HashSet<usize> = w.iter().copied().collect();
        let wpts = walk_points(&self.points, &w);
        let inside: Vec<usize> = (0..self.points.len())
            .filter(|v| !on_walk.contains(v))
            .filter(|&v| winding_number(&self.points[v], &wpts) != 0)
            .collect();

        match self.variant {
            Variant::Simple => {
                let simple = on_walk.len() == w.len();
                if simple && inside.is_empty() {
                    Some(ScoredRegion {
                        boundary: w,
                        holes: Vec::new(),
                        owner: mover.into(),
                        area: walk_area_value,
                    })
                } else {
                    None
                }
            }
            Variant::Holes => {
                let inside_set: HashSet<usize> = inside.iter().copied().collect();
                let mut area = walk_area_value;
                for r in &self.regions {
                    if r.boundary.iter().any(|v| inside_set.contains(v)) {
                        area -= &r.area;
                    }
                }
                if !area.is_positive() {
                    return None;
                }
                let holes = self.island_walks(graph, &inside);
                Some(ScoredRegion {
                    boundary: w,
                    holes,
                    owner: mover.into(),
                    area,
                })
            }
        }
    }

    /// Counterclockwise outer walks of the outermost components among
    /// `inside`, skipping components that enclose no area.
    fn island_walks(&self, graph: &PlanarGraph, inside: &[usize]) -> Vec<Vec<usize>> {
        if inside.is_empty() {
            return Vec::new();
        }
        let comps = graph.components();
        let mut by_comp: Vec<(usize, Vec<usize>)> = Vec::new();
        for &v in inside {
            match by_comp.iter_mut().find(|(c, _)| *c == comps[v]) {
                Some((_, vs)) => vs.push(v),
                None => by_comp.push((comps[v], vec![v])),
            }
        }
        let mut outers: Vec<Vec<usize>> = Vec::new();
        for (_, vs) in &by_comp {
            let mut best: Option<(Vec<usize>, Rat)> = None;
            for &v in vs {
                for &u in graph.neighbors(v) {
                    let walk = graph.trace_walk(v, u);
                    let a = walk_area(&self.points, &walk);
                    if best.as_ref().map_or(true, |(_, b)| &a < b) {
                        best = Some((walk, a));
                    }
                }
            }
            if let Some((mut walk, a)) = best {
                if a.is_negative() {
                    walk.reverse();
                    outers.push(walk);
                }
            }
        }
        let pts: Vec<Vec<Point>> = outers.iter().map(|w| walk_points(&self.points, w)).collect();
        (0..outers.len())
            .filter(|&k| {
                let probe = &self.points[outers[k][0]];
                !(0..outers.len())
                    .any(|m| m != k && winding_number(probe, &pts[m]) != 0)
            })
            .map(|k| outers[k].clone())
            .collect()
    }

    /// Check every state invariant; returns a description of the first
    /// violation.
    pub fn validate(&self) -> Result<(), String> {
        let edges: Vec<Edge> = self.edges.iter().copied().collect();
        for (k, &e) in edges.iter().enumerate() {
            if self.blocked_by_point(e) {
                return Err(format!("edge {e:?} passes through a point"));
            }
            let s = seg(&self.points, e);
            for &f in &edges[k + 1..] {
                if segments_conflict(&s, &seg(&self.points, f)) {
                    return Err(format!("edges {e:?} and {f:?} conflict"));
                }
            }
            if self.region_contains_midpoint(e) {
                return Err(format!("edge {e:?} lies inside a scored region"));
            }
        }
        let mut owned_r = self.offset_r.clone();
        let mut owned_b = self.offset_b.clone();
        for r in &self.regions {
            if !r.area.is_positive() {
                return Err("scored region with non-positive area".into());
            }
            let expect = walk_signed_area(&walk_points(&self.points, &r.boundary))
                - r.holes
                    .iter()
                    .map(|h| walk_area(&self.points, h))
                    .sum::<Rat>();
            if expect != r.area {
                return Err("region area does not match its boundary".into());
            }
            match r.owner {
                Owner::R => owned_r += &r.area,
                Owner::B => owned_b += &r.area,
                Owner::Neutral => {}
            }
        }
        if owned_r != self.score_r || owned_b != self.score_b {
            return Err("scores do not match owned regions".into());
        }
        if self.scored_area() > self.hull_area() {
            return Err("scored area exceeds hull area".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> GameStateJson {
        GameStateJson {
            variant: self.variant,
            points: self.points.to_vec(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            regions: self.regions.clone(),
            score_r: self.score_r.clone(),
            score_b: self.score_b.clone(),
            to_move: self.to_move,
            offset_r: self.offset_r.clone(),
            offset_b: self.offset_b.clone(),
        }
    }

    pub fn from_json(j: GameStateJson) -> Result<Self, GameError> {
        let state = Self::from_parts(
            j.points,
            j.variant,
            StateParts {
                edges: j.edges.iter().map(|e| (e[0], e[1])).collect(),
                regions: j.regions,
                offset_r: j.offset_r,
                offset_b: j.offset_b,
                to_move: Some(j.to_move),
            },
        )?;
        if state.score_r != j.score_r || state.score_b != j.score_b {
            return Err(GameError::InvalidInput(
                "scoreR/scoreB disagree with regions and offsets".into(),
            ));
        }
        Ok(state)
    }
}

/// On-disk and wire format of a game state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameStateJson {
    pub variant: Variant,
    pub points: Vec<Point>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub regions: Vec<ScoredRegion>,
    #[serde(rename = "scoreR", default)]
    pub score_r: Rat,
    #[serde(rename = "scoreB", default)]
    pub score_b: Rat,
    #[serde(default = "default_player")]
    pub to_move: Player,
    #[serde(rename = "offsetR", default, skip_serializing_if = "Rat::is_zero")]
    pub offset_r: Rat,
    #[serde(rename = "offsetB", default, skip_serializing_if = "Rat::is_zero")]
    pub offset_b: Rat,
}

fn default_player() -> Player {
    Player::R
}

impl Serialize for PolygonGameState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolygonGameState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = GameStateJson::deserialize(deserializer)?;
        PolygonGameState::from_json(j).map_err(serde::de::Error::custom)
    }
}
