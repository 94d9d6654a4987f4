//! Greedy play, edge weights, subproblems and double-cross sequences.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxes::{open_neighbours, BoxesError, BoxesState, Cell, Seg};
use crate::geometry::{PolygonCycle, Rat};
use crate::polygon_game::{norm_edge, Edge, GameError, PolygonGameState, Violation};
use crate::subdivision::{walk_points, FaceStructure, PlanarGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("illegal edge: {0}")]
    Illegal(Violation),
    #[error("edge scores immediately, so the opponent does not move next")]
    ScoringEdge,
    #[error("structure too short to decline; take everything")]
    TakeAll,
    #[error("structure has not been opened")]
    NotOpened,
    #[error(transparent)]
    Boxes(#[from] BoxesError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Smallest `(i, j)` among equally good edges.
    #[default]
    Lexicographic,
    /// Largest `(i, j)` among equally good edges.
    ReverseLexicographic,
}

impl TieBreak {
    fn prefer(self, candidate: Edge, incumbent: Edge) -> bool {
        match self {
            TieBreak::Lexicographic => candidate < incumbent,
            TieBreak::ReverseLexicographic => candidate > incumbent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub edge: Edge,
    pub weight: Rat,
}

/// Most area the player to move in `s` can take in one (chained) turn.
fn best_turn(s: &PolygonGameState, memo: &mut HashMap<BTreeSet<Edge>, Rat>) -> Rat {
    if let Some(v) = memo.get(s.edges()) {
        return v.clone();
    }
    let mut best = Rat::zero();
    for &(i, j) in s.legal_moves() {
        let (next, out) = s.apply_move(i, j).expect("cached legal move");
        if !out.scored.is_positive() {
            continue;
        }
        let v = if out.extra_turn {
            &out.scored + &best_turn(&next, memo)
        } else {
            out.scored
        };
        if v > best {
            best = v;
        }
    }
    memo.insert(s.edges().clone(), best.clone());
    best
}

/// Area the opponent can claim in their next turn if the mover draws `e`.
pub fn edge_weight(s: &PolygonGameState, e: Edge) -> Result<Rat, StrategyError> {
    let (next, out) = s.apply_move(e.0, e.1).map_err(|err| match err {
        GameError::IllegalMove(v) => StrategyError::Illegal(v),
        other => StrategyError::Game(other),
    })?;
    if out.scored.is_positive() {
        return Err(StrategyError::ScoringEdge);
    }
    if out.game_over {
        return Ok(Rat::zero());
    }
    Ok(best_turn(&next, &mut HashMap::new()))
}

/// Immediate gain of every legal move that scores.
pub fn scoring_moves(s: &PolygonGameState) -> Vec<(Edge, Rat)> {
    s.legal_moves()
        .iter()
        .filter_map(|&(i, j)| {
            let (_, out) = s.apply_move(i, j).ok()?;
            out.scored.is_positive().then_some(((i, j), out.scored))
        })
        .collect()
}

/// Weights of all non-scoring legal moves.
pub fn edge_weights(s: &PolygonGameState) -> Vec<WeightedEdge> {
    s.legal_moves()
        .iter()
        .filter_map(|&e| edge_weight(s, e).ok().map(|weight| WeightedEdge { edge: e, weight }))
        .collect()
}

/// Largest-area scoring move if any, otherwise an edge of minimum weight.
pub fn greedy_move(s: &PolygonGameState, tie_break: TieBreak) -> Edge {
    let mut best: Option<(Edge, Rat)> = None;
    for (e, gain) in scoring_moves(s) {
        let better = match &best {
            None => true,
            Some((b, g)) => gain > *g || (gain == *g && tie_break.prefer(e, *b)),
        };
        if better {
            best = Some((e, gain));
        }
    }
    if let Some((e, _)) = best {
        return e;
    }
    let mut best: Option<(Edge, Rat)> = None;
    for w in edge_weights(s) {
        let better = match &best {
            None => true,
            Some((b, g)) => w.weight < *g || (w.weight == *g && tie_break.prefer(w.edge, *b)),
        };
        if better {
            best = Some((w.edge, w.weight));
        }
    }
    best.expect("non-terminal state has a legal move").0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Subproblem {
    pub region: PolygonCycle,
    /// Outer boundary as point indices, counterclockwise.
    pub boundary_points: Vec<usize>,
    /// Undrawn hull segments on the boundary.
    pub hull_edge_count: usize,
    pub area: Rat,
}

fn hull_indices(s: &PolygonGameState) -> Vec<usize> {
    let index: HashMap<_, usize> = s.points().iter().enumerate().map(|(i, p)| (p, i)).collect();
    s.hull().vertices.iter().map(|p| index[p]).collect()
}

fn hull_segments(s: &PolygonGameState) -> Vec<Edge> {
    let h = hull_indices(s);
    (0..h.len()).map(|k| norm_edge(h[k], h[(k + 1) % h.len()])).collect()
}

fn augmented_faces(s: &PolygonGameState) -> (FaceStructure, Vec<Edge>) {
    let hull = hull_segments(s);
    let mut all: BTreeSet<Edge> = s.edges().clone();
    all.extend(hull.iter().copied());
    let graph = PlanarGraph::from_edges(s.points(), all.iter().copied());
    (FaceStructure::build(s.points(), &graph), hull)
}

fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).any(|k| a.iter().cycle().skip(k).take(a.len()).eq(b.iter()))
}

/// Unscored faces of the drawn edges together with the hull boundary.
pub fn subproblems(s: &PolygonGameState) -> Vec<Subproblem> {
    let (fs, hull) = augmented_faces(s);
    let undrawn_hull: BTreeSet<Edge> = hull.into_iter().filter(|e| !s.edges().contains(e)).collect();
    fs.faces
        .iter()
        .filter(|f| !s.regions().iter().any(|r| same_cycle(&r.boundary, &f.outer)))
        .map(|f| {
            let k = f.outer.len();
            let hull_edge_count = (0..k)
                .map(|i| norm_edge(f.outer[i], f.outer[(i + 1) % k]))
                .filter(|e| undrawn_hull.contains(e))
                .count();
            Subproblem {
                region: PolygonCycle::new(walk_points(s.points(), &f.outer)),
                boundary_points: f.outer.clone(),
                hull_edge_count,
                area: f.area.clone(),
            }
        })
        .collect()
}

/// Index into `subproblems(s)` of the subproblem a legal edge lies in.
pub fn subproblem_of_edge(s: &PolygonGameState, subs: &[Subproblem], e: Edge) -> Option<usize> {
    let mid = s.points()[e.0].midpoint(&s.points()[e.1]);
    let (fs, _) = augmented_faces(s);
    let face = match fs.half_edge_face.get(&e) {
        // Undrawn hull segment: its interior side is whichever is bounded.
        Some(_) => fs.half_edge_face[&e].or(fs.half_edge_face[&(e.1, e.0)]),
        None => fs.locate(s.points(), &mid),
    }?;
    let outer = &fs.faces[face].outer;
    subs.iter().position(|sp| same_cycle(&sp.boundary_points, outer))
}

pub fn is_easy_endgame(s: &PolygonGameState) -> bool {
    subproblems(s).iter().all(|sp| sp.hull_edge_count == 2)
}

/// A chain or cycle of cells, as produced by the endgame decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "cells")]
pub enum Structure {
    Chain(Vec<Cell>),
    Cycle(Vec<Cell>),
}

/// Moves for the player in control after the opponent opened `opened`:
/// capture all but two cells of a chain (four of a cycle), then decline the
/// rest with the move that hands the turn back.
pub fn double_cross_boxes(s: &BoxesState, opened: &Structure) -> Result<Vec<Seg>, StrategyError> {
    let (cells, keep) = match opened {
        Structure::Chain(c) => (c, 2),
        Structure::Cycle(c) => (c, 4),
    };
    if cells.len() < keep {
        return Err(StrategyError::TakeAll);
    }
    let mover = s.to_move();
    let mut st = s.clone();
    let mut moves = Vec::new();
    let in_structure = |c: &Cell| cells.contains(c);
    let remaining = |st: &BoxesState| cells.iter().filter(|&&c| st.is_unclaimed(c)).count();
    let capturable = |st: &BoxesState, c: Cell| st.is_unclaimed(c) && st.undrawn_sides(c).len() == 1;

    if !cells.iter().any(|&c| capturable(&st, c)) {
        return Err(StrategyError::NotOpened);
    }
    // Cells of the run that contains `c`, walking through open sides.
    let run = |st: &BoxesState, c: Cell| {
        let mut seen = vec![c];
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            for y in open_neighbours(st, x) {
                if in_structure(&y) && !seen.contains(&y) {
                    seen.push(y);
                    stack.push(y);
                }
            }
        }
        seen
    };
    while remaining(&st) > keep {
        // Take from the shortest run first so the last run stays intact.
        let c = cells
            .iter()
            .copied()
            .filter(|&c| capturable(&st, c))
            .min_by_key(|&c| (run(&st, c).len(), c))
            .ok_or(StrategyError::NotOpened)?;
        let side = st.undrawn_sides(c)[0];
        let (next, done, _) = st.apply(side)?;
        debug_assert!(done > 0 && next.to_move() == mover);
        moves.push(side);
        st = next;
    }
    let left: Vec<Cell> = cells.iter().copied().filter(|&c| st.is_unclaimed(c)).collect();
    let decline = match opened {
        Structure::Chain(_) => {
            // Domino: a capturable cell `a` and its partner `b`; close b's far side.
            let a = *left
                .iter()
                .find(|&&c| capturable(&st, c))
                .ok_or(StrategyError::NotOpened)?;
            let b = *left.iter().find(|&&c| c != a).expect("two cells left");
            let shared = st.undrawn_sides(a)[0];
            let far: Vec<Seg> = st.undrawn_sides(b).into_iter().filter(|&x| x != shared).collect();
            if far.len() != 1 {
                return Err(StrategyError::TakeAll);
            }
            far[0]
        }
        Structure::Cycle(_) => {
            // Path d1 d2 d3 d4 with capturable ends; draw the d2-d3 side.
            let ends: Vec<Cell> = left.iter().copied().filter(|&c| capturable(&st, c)).collect();
            if ends.len() != 2 {
                return Err(StrategyError::TakeAll);
            }
            let d1 = ends[0];
            let d2 = open_neighbours(&st, d1)[0];
            let d3 = open_neighbours(&st, d2)
                .into_iter()
                .find(|&c| c != d1)
                .ok_or(StrategyError::TakeAll)?;
            *st.undrawn_sides(d2)
                .iter()
                .find(|seg| st.adjacent_cells(**seg).contains(&d3))
                .expect("d2 and d3 share an open side")
        }
    };
    let (_, done, _) = st.apply(decline)?;
    debug_assert_eq!(done, 0);
    moves.push(decline);
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::polygon_game::Variant;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    fn play(s: &PolygonGameState, moves: &[Edge]) -> PolygonGameState {
        moves
            .iter()
            .fold(s.clone(), |st, &(i, j)| st.apply_move(i, j).unwrap().0)
    }

    fn hexagon() -> PolygonGameState {
        // v1..v6 counterclockwise, indices 0..5; quadrilaterals of unequal area.
        let p = pts(&[(0, 0), (4, 0), (6, 3), (4, 7), (0, 6), (-2, 3)]);
        PolygonGameState::new_game(p, Variant::Simple).unwrap()
    }

    #[test]
    fn isolated_points_edge_weighs_zero() {
        let s = hexagon();
        assert_eq!(edge_weight(&s, (0, 3)).unwrap(), Rat::zero());
        assert!(edge_weights(&s).iter().all(|w| w.weight.is_zero()));
        assert_eq!(greedy_move(&s, TieBreak::Lexicographic), (0, 1));
    }

    #[test]
    fn third_side_hands_over_triangle() {
        let tri = PolygonGameState::new_game(pts(&[(0, 0), (2, 0), (0, 2), (5, 5)]), Variant::Simple)
            .unwrap();
        let s = play(&tri, &[(0, 1)]);
        // Drawing 1-2 leaves triangle 0-1-2 closable by 0-2.
        assert!(edge_weight(&s, (1, 2)).unwrap() >= Rat::from_int(2));
        let s = play(&s, &[(1, 2)]);
        assert_eq!(greedy_move(&s, TieBreak::Lexicographic), (0, 2));
    }

    #[test]
    fn subproblem_counts() {
        let s = hexagon();
        let subs = subproblems(&s);
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].hull_edge_count, 6);
        assert!(!is_easy_endgame(&s));

        let split = play(&s, &[(1, 4)]);
        assert_eq!(subproblems(&split).len(), 2);
    }

    #[test]
    fn easy_hexagon_gives_away_smaller_quadrilateral() {
        // Edges v2v5, v6v1, v3v4.
        let s = play(&hexagon(), &[(1, 4), (5, 0), (2, 3)]);
        assert!(is_easy_endgame(&s));
        let subs = subproblems(&s);
        assert_eq!(subs.len(), 2);
        for w in edge_weights(&s) {
            let k = subproblem_of_edge(&s, &subs, w.edge).unwrap();
            assert_eq!(w.weight, subs[k].area, "edge {:?}", w.edge);
        }
        let g = greedy_move(&s, TieBreak::Lexicographic);
        let k = subproblem_of_edge(&s, &subs, g).unwrap();
        let smaller = subs.iter().map(|sp| sp.area.clone()).min().unwrap();
        assert_eq!(subs[k].area, smaller);
    }

    #[test]
    fn terminal_has_no_subproblems() {
        let tri = PolygonGameState::new_game(pts(&[(0, 0), (1, 0), (0, 1)]), Variant::Holes).unwrap();
        let done = play(&tri, &[(0, 1), (1, 2), (0, 2)]);
        assert!(subproblems(&done).is_empty());
        assert!(is_easy_endgame(&done));
    }

    fn corridor(len: u32) -> BoxesState {
        // One row of `len` cells, open between neighbours and at both ends.
        let mut walls = Vec::new();
        for x in 0..len {
            walls.push(Seg::h(x, 0));
            walls.push(Seg::h(x, 1));
        }
        BoxesState::from_parts(len, 1, walls, [], 0, 0, crate::polygon_game::Player::B).unwrap()
    }

    #[test]
    fn chain_double_cross_leaves_two() {
        let s = corridor(5);
        let (s, _, _) = s.apply(Seg::v(0, 0)).unwrap();
        let cells: Vec<Cell> = (0..5).map(|x| (x, 0)).collect();
        let moves = double_cross_boxes(&s, &Structure::Chain(cells)).unwrap();
        assert_eq!(moves.len(), 4);
        let mut st = s.clone();
        for m in &moves {
            st = st.apply(*m).unwrap().0;
        }
        let r = crate::polygon_game::Player::R;
        assert_eq!(st.score(r), 3);
        assert_eq!(st.to_move(), r.other());
        let (st, done, _) = st.apply(Seg::v(4, 0)).unwrap();
        assert_eq!(done, 2);
        assert_eq!(st.score(r.other()), 2);
    }

    #[test]
    fn short_chain_is_take_all() {
        let s = corridor(1);
        let (s, _, _) = s.apply(Seg::v(0, 0)).unwrap();
        assert_eq!(
            double_cross_boxes(&s, &Structure::Chain(vec![(0, 0)])),
            Err(StrategyError::TakeAll)
        );
    }
}
