use dots_polygons::boxes::{boxes_minimax, BoxesState, Seg};
use dots_polygons::geometry::Rat;
use dots_polygons::polygon_game::{Edge, GameError, Player, PolygonGameState};
use dots_polygons::solver::Solver;
use dots_polygons::strategy::{edge_weight, greedy_move, scoring_moves, TieBreak};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Either engine, tagged by `kind` on the wire.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "lowercase")]
pub enum Game {
    Polygons(PolygonGameState),
    Boxes(BoxesState),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Edge([usize; 2]),
    Seg(Seg),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AiPolicy {
    #[default]
    Greedy,
    SolverCapped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Outcome {
    pub scored: Rat,
    pub extra_turn: bool,
    pub game_over: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hint {
    #[serde(rename = "move")]
    pub mv: Move,
    /// Area scored immediately, for scoring moves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Rat>,
    /// Area the opponent can take next turn, for non-scoring moves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_approx: Option<f64>,
    /// Set on every non-scoring move of least weight.
    pub minimal: bool,
}

impl Game {
    pub fn to_move(&self) -> Player {
        match self {
            Game::Polygons(s) => s.to_move(),
            Game::Boxes(s) => s.to_move(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        match self {
            Game::Polygons(s) => s.is_terminal(),
            Game::Boxes(s) => s.is_terminal(),
        }
    }

    pub fn score(&self, p: Player) -> Rat {
        match self {
            Game::Polygons(s) => s.score(p).clone(),
            Game::Boxes(s) => Rat::from_int(s.score(p)),
        }
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        match self {
            Game::Polygons(s) => s.legal_moves().iter().map(|&(i, j)| Move::Edge([i, j])).collect(),
            Game::Boxes(s) => s.legal_moves().into_iter().map(Move::Seg).collect(),
        }
    }

    pub fn apply(&self, mv: &Move) -> Result<(Game, Outcome), ServiceError> {
        if self.is_terminal() {
            return Err(ServiceError::GameOver);
        }
        match (self, mv) {
            (Game::Polygons(s), Move::Edge([i, j])) => match s.apply_move(*i, *j) {
                Ok((n, o)) => Ok((
                    Game::Polygons(n),
                    Outcome { scored: o.scored, extra_turn: o.extra_turn, game_over: o.game_over },
                )),
                Err(GameError::IllegalMove(v)) => Err(ServiceError::IllegalMove(v.to_string())),
                Err(e) => Err(ServiceError::IllegalMove(e.to_string())),
            },
            (Game::Boxes(s), Move::Seg(seg)) => {
                let (n, claimed, extra) = s.apply(*seg).map_err(|e| ServiceError::IllegalMove(e.to_string()))?;
                let game_over = n.is_terminal();
                Ok((
                    Game::Boxes(n),
                    Outcome { scored: Rat::from_int(claimed as i64), extra_turn: extra, game_over },
                ))
            }
            _ => Err(ServiceError::IllegalMove("move kind does not match the game".into())),
        }
    }

    /// The AI's choice for the player to move.
    pub fn ai_move(&self, policy: AiPolicy, budget: u64) -> Move {
        match self {
            Game::Polygons(s) => {
                let e = match policy {
                    AiPolicy::Greedy => greedy_move(s, TieBreak::Lexicographic),
                    AiPolicy::SolverCapped => {
                        let r = Solver::new(budget).solve(s);
                        match r.best_move {
                            Some(m) if !r.partial => m,
                            _ => greedy_move(s, TieBreak::Lexicographic),
                        }
                    }
                };
                Move::Edge([e.0, e.1])
            }
            Game::Boxes(s) => {
                if policy == AiPolicy::SolverCapped {
                    if let Ok((_, Some(m))) = boxes_minimax(s, 20) {
                        return Move::Seg(m);
                    }
                }
                Move::Seg(greedy_seg(s))
            }
        }
    }

    pub fn hint(&self) -> Vec<Hint> {
        let mut out: Vec<Hint> = match self {
            Game::Polygons(s) => {
                let scoring: std::collections::HashMap<Edge, Rat> = scoring_moves(s).into_iter().collect();
                s.legal_moves()
                    .iter()
                    .map(|&e| {
                        let mv = Move::Edge([e.0, e.1]);
                        match scoring.get(&e) {
                            Some(a) => Hint { mv, scores: Some(a.clone()), weight: None, weight_approx: None, minimal: false },
                            None => {
                                let w = edge_weight(s, e).unwrap_or_else(|_| Rat::zero());
                                Hint { mv, scores: None, weight_approx: Some(w.to_f64()), weight: Some(w), minimal: false }
                            }
                        }
                    })
                    .collect()
            }
            Game::Boxes(s) => s
                .legal_moves()
                .into_iter()
                .map(|seg| {
                    let mv = Move::Seg(seg);
                    let (n, claimed, _) = s.apply(seg).expect("legal segment");
                    if claimed > 0 {
                        Hint { mv, scores: Some(Rat::from_int(claimed as i64)), weight: None, weight_approx: None, minimal: false }
                    } else {
                        let w = Rat::from_int(capturable(&n) as i64);
                        Hint { mv, scores: None, weight_approx: Some(w.to_f64()), weight: Some(w), minimal: false }
                    }
                })
                .collect(),
        };
        if let Some(min) = out.iter().filter_map(|h| h.weight.clone()).min() {
            for h in &mut out {
                h.minimal = h.weight.as_ref() == Some(&min);
            }
        }
        out
    }
}

fn closing_side(s: &BoxesState) -> Option<Seg> {
    s.unclaimed_cells().into_iter().find_map(|c| {
        let u = s.undrawn_sides(c);
        (u.len() == 1).then(|| u[0])
    })
}

/// Boxes the player to move can take by capturing for as long as possible.
fn capturable(s: &BoxesState) -> u32 {
    let mut st = s.clone();
    let mut total = 0;
    while let Some(seg) = closing_side(&st) {
        let (n, c, _) = st.apply(seg).expect("closing side is legal");
        total += c;
        st = n;
    }
    total
}

/// Capture if possible, else avoid handing over a box, else give the least.
fn greedy_seg(s: &BoxesState) -> Seg {
    if let Some(seg) = closing_side(s) {
        return seg;
    }
    let moves = s.legal_moves();
    moves
        .iter()
        .copied()
        .min_by_key(|&seg| {
            let (n, _, _) = s.apply(seg).expect("legal segment");
            (capturable(&n), seg)
        })
        .expect("non-terminal board has a move")
}

#[cfg(test)]
mod tests {
    use super::*;
    use dots_polygons::geometry::Point;
    use dots_polygons::polygon_game::Variant;

    #[test]
    fn wire_tags() {
        let g = Game::Boxes(BoxesState::new(1, 1).unwrap());
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["kind"], "boxes");
        let back: Game = serde_json::from_value(v).unwrap();
        assert!(matches!(back, Game::Boxes(_)));
        let m: Move = serde_json::from_str(r#"{"edge":[0,2]}"#).unwrap();
        assert_eq!(m, Move::Edge([0, 2]));
    }

    #[test]
    fn greedy_boxes_takes_the_box() {
        let mut s = BoxesState::new(1, 1).unwrap();
        for seg in [Seg::h(0, 0), Seg::h(0, 1), Seg::v(0, 0)] {
            s = s.apply(seg).unwrap().0;
        }
        let g = Game::Boxes(s);
        assert_eq!(g.ai_move(AiPolicy::Greedy, 0), Move::Seg(Seg::v(1, 0)));
    }

    #[test]
    fn square_hint_is_flat() {
        let pts = [(0, 0), (2, 0), (2, 2), (0, 2)].iter().map(|&(x, y)| Point::int(x, y)).collect();
        let g = Game::Polygons(PolygonGameState::new_game(pts, Variant::Simple).unwrap());
        let h = g.hint();
        assert_eq!(h.len(), 6);
        assert!(h.iter().all(|x| x.weight == Some(Rat::zero()) && x.minimal));
    }
}
