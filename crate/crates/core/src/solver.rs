//! Exact negamax search for Dots & Polygons.
//!
//! The value of a position is split into the scores already banked and the
//! margin still to be won. The latter depends only on the drawn edge set:
//! scored regions are a function of the edges, and the game is symmetric in
//! the players, so neither the banked scores nor the player to move enter the
//! memo key.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{cross, Point, Rat};
use crate::polygon_game::{Edge, Player, PolygonGameState, Variant};
use crate::strategy::{greedy_move, TieBreak};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResult {
    /// Final score of the player to move minus the opponent's, under optimal
    /// play. When `partial` is set it is only the greedy self-play estimate.
    pub margin: Rat,
    pub best_move: Option<Edge>,
    pub nodes: u64,
    pub line: Vec<Edge>,
    #[serde(default)]
    pub partial: bool,
    pub to_move: Player,
}

impl SolveResult {
    /// Final margin from `who`'s point of view.
    pub fn margin_for(&self, who: Player) -> Rat {
        if who == self.to_move {
            self.margin.clone()
        } else {
            -&self.margin
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bound {
    Exact,
    Lower,
    Upper,
}

#[derive(Clone, Debug)]
struct Entry {
    value: Rat,
    bound: Bound,
    best: Option<Edge>,
}

struct OutOfBudget;

pub struct Solver {
    budget: u64,
    memo_enabled: bool,
    nodes: u64,
    memo: HashMap<Vec<u64>, Entry>,
}

fn edge_key(s: &PolygonGameState) -> Vec<u64> {
    let n = s.points().len();
    let mut bits = vec![0u64; (n * n).div_ceil(64)];
    for &(i, j) in s.edges() {
        let k = i * n + j;
        bits[k / 64] |= 1 << (k % 64);
    }
    bits
}

impl Solver {
    pub fn new(budget: u64) -> Self {
        Solver {
            budget,
            memo_enabled: true,
            nodes: 0,
            memo: HashMap::new(),
        }
    }

    pub fn without_memo(mut self) -> Self {
        self.memo_enabled = false;
        self
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Exact future margin for the player to move, searched in the window
    /// `(alpha, beta)`.
    fn future(
        &mut self,
        s: &PolygonGameState,
        mut alpha: Rat,
        beta: Rat,
    ) -> Result<(Rat, Option<Edge>), OutOfBudget> {
        if s.is_terminal() {
            return Ok((Rat::zero(), None));
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OutOfBudget);
        }
        let key = if self.memo_enabled { Some(edge_key(s)) } else { None };
        let mut hint = None;
        if let Some(e) = key.as_ref().and_then(|k| self.memo.get(k)) {
            match e.bound {
                Bound::Exact => return Ok((e.value.clone(), e.best)),
                Bound::Lower if e.value >= beta => return Ok((e.value.clone(), e.best)),
                Bound::Upper if e.value <= alpha => return Ok((e.value.clone(), e.best)),
                _ => {}
            }
            hint = e.best;
        }
        let alpha0 = alpha.clone();

        let mut children = Vec::with_capacity(s.legal_moves().len());
        for &m in s.legal_moves() {
            let (next, out) = s.apply_move(m.0, m.1).expect("cached legal move");
            children.push((m, next, out));
        }
        // Hinted move first, then larger immediate gains.
        children.sort_by(|a, b| {
            let ha = Some(a.0) == hint;
            let hb = Some(b.0) == hint;
            hb.cmp(&ha).then_with(|| b.2.scored.cmp(&a.2.scored))
        });

        let mut best: Option<(Rat, Edge)> = None;
        for (m, next, out) in &children {
            let value = if out.game_over {
                out.scored.clone()
            } else if out.extra_turn {
                let (f, _) = self.future(next, &alpha - &out.scored, &beta - &out.scored)?;
                &out.scored + &f
            } else {
                let (f, _) = self.future(next, -&beta, -&alpha)?;
                -f
            };
            if best.as_ref().map_or(true, |(b, _)| &value > b) {
                best = Some((value.clone(), *m));
            }
            if value > alpha {
                alpha = value;
            }
            if alpha >= beta {
                break;
            }
        }
        let (value, m) = best.expect("non-terminal state has a move");
        if let Some(k) = key {
            let bound = if value <= alpha0 {
                Bound::Upper
            } else if value >= beta {
                Bound::Lower
            } else {
                Bound::Exact
            };
            self.memo.insert(
                k,
                Entry {
                    value: value.clone(),
                    bound,
                    best: Some(m),
                },
            );
        }
        Ok((value, Some(m)))
    }

    fn full_window(s: &PolygonGameState) -> (Rat, Rat) {
        let rest = s.hull_area() - s.scored_area();
        (-&rest - Rat::one(), rest + Rat::one())
    }

    /// Exact future margin for the player to move.
    fn exact_future(&mut self, s: &PolygonGameState) -> Result<(Rat, Option<Edge>), OutOfBudget> {
        let (lo, hi) = Self::full_window(s);
        self.future(s, lo, hi)
    }

    pub fn solve(&mut self, s: &PolygonGameState) -> SolveResult {
        let mover = s.to_move();
        let banked = s.score(mover) - s.score(mover.other());
        match self.exact_future(s) {
            Ok((f, best)) => {
                let line = self.principal_line(s);
                SolveResult {
                    margin: banked + f,
                    best_move: best,
                    nodes: self.nodes,
                    line,
                    partial: false,
                    to_move: mover,
                }
            }
            Err(OutOfBudget) => {
                let (bound, best) = self.partial_root(s);
                SolveResult {
                    margin: banked + bound,
                    best_move: best,
                    nodes: self.nodes,
                    line: best.into_iter().collect(),
                    partial: true,
                    to_move: mover,
                }
            }
        }
    }

    /// Greedy self-play estimate when the search ran out of budget.
    fn partial_root(&self, s: &PolygonGameState) -> (Rat, Option<Edge>) {
        let mover = s.to_move();
        let mut st = s.clone();
        let first = if st.is_terminal() { None } else { Some(greedy_move(&st, TieBreak::Lexicographic)) };
        while !st.is_terminal() {
            let m = greedy_move(&st, TieBreak::Lexicographic);
            st = st.apply_move(m.0, m.1).expect("greedy move is legal").0;
        }
        let end = st.score(mover) - st.score(mover.other());
        let banked = s.score(mover) - s.score(mover.other());
        (end - banked, first)
    }

    /// Follow memoized best moves from `s`, re-solving exactly where needed.
    fn principal_line(&mut self, s: &PolygonGameState) -> Vec<Edge> {
        let mut line = Vec::new();
        let mut st = s.clone();
        while !st.is_terminal() {
            let best = match self.memo.get(&edge_key(&st)) {
                Some(e) if e.bound == Bound::Exact => e.best,
                _ => match self.exact_future(&st) {
                    Ok((_, b)) => b,
                    Err(OutOfBudget) => None,
                },
            };
            let Some(m) = best else { break };
            line.push(m);
            st = st.apply_move(m.0, m.1).expect("memo move is legal").0;
        }
        line
    }
}

/// Exact solve with the given node budget.
pub fn solve(s: &PolygonGameState, budget: u64) -> SolveResult {
    Solver::new(budget).solve(s)
}

/// Whether `who` finishes strictly ahead under optimal play. `None` when
/// the budget did not allow an exact answer.
pub fn can_win(s: &PolygonGameState, who: Player, budget: u64) -> Option<bool> {
    let r = solve(s, budget);
    if r.partial {
        None
    } else {
        Some(r.margin_for(who).is_positive())
    }
}

/// `n` integer points near a circle, in strictly convex position, such that
/// all triangle areas are pairwise distinct.
pub fn random_convex_position(n: usize, rng: &mut impl Rng) -> Vec<Point> {
    assert!(n >= 3, "need at least three points");
    const RADIUS: f64 = 100.0;
    loop {
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angle"));
        let pts: Vec<Point> = angles
            .iter()
            .map(|t| {
                Point::int(
                    (RADIUS * t.cos()).round() as i64,
                    (RADIUS * t.sin()).round() as i64,
                )
            })
            .collect();
        if strictly_convex(&pts) && distinct_triangle_areas(&pts) {
            return pts;
        }
    }
}

/// Every point is a hull vertex and no three are collinear.
pub fn strictly_convex(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if cross(&pts[i], &pts[j], &pts[k]).is_zero() {
                    return false;
                }
            }
        }
    }
    crate::geometry::convex_hull(pts).is_ok_and(|h| h.len() == n)
}

fn distinct_triangle_areas(pts: &[Point]) -> bool {
    let n = pts.len();
    let mut seen = std::collections::HashSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if !seen.insert(cross(&pts[i], &pts[j], &pts[k]).abs()) {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremInstance {
    pub points: Vec<Point>,
    pub hull_area: Rat,
    /// Final margin of the player making the last move.
    pub last_player_margin: Rat,
    pub nodes: u64,
    pub partial: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremReport {
    pub n: usize,
    pub seed: u64,
    pub variant: Variant,
    pub budget: u64,
    pub last_player: Player,
    pub trials: usize,
    pub passed: usize,
    pub partial: usize,
    pub failed: usize,
    pub instances: Vec<TheoremInstance>,
}

impl TheoremReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// For `n` convex points the last player (R for odd `n`, B for even) can
/// secure at least half of the hull area. Checked by exact solve on random
/// instances; budget-exhausted instances are reported as partial.
pub fn verify_last_player_theorem(
    n: usize,
    trials: usize,
    seed: u64,
    variant: Variant,
    budget: u64,
) -> TheoremReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last_player = if n % 2 == 1 { Player::R } else { Player::B };
    let mut instances = Vec::with_capacity(trials);
    for _ in 0..trials {
        let points = random_convex_position(n, &mut rng);
        let s = PolygonGameState::new_game(points.clone(), variant).expect("generated position");
        let r = solve(&s, budget);
        let last_player_margin = r.margin_for(last_player);
        let pass = !r.partial && !last_player_margin.is_negative();
        instances.push(TheoremInstance {
            points,
            hull_area: s.hull_area(),
            last_player_margin,
            nodes: r.nodes,
            partial: r.partial,
            pass,
        });
    }
    let passed = instances.iter().filter(|i| i.pass).count();
    let partial = instances.iter().filter(|i| i.partial).count();
    TheoremReport {
        n,
        seed,
        variant,
        budget,
        last_player,
        trials,
        passed,
        partial,
        failed: trials - passed - partial,
        instances,
    }
}

/// A position reached by greedy play where the greedy player could still
/// force a win, followed by the greedy continuation that loses.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct GreedyWitness {
    pub points: Vec<Point>,
    pub variant: Variant,
    /// Moves from the empty board to the witness position.
    pub prefix: Vec<Edge>,
    pub greedy_player: Player,
    /// Winning move found by the solver in the witness position.
    pub winning_move: Edge,
    /// Greedy's choice in the witness position.
    pub greedy_choice: Edge,
}

impl GreedyWitness {
    pub fn position(&self) -> PolygonGameState {
        let mut s = PolygonGameState::new_game(self.points.clone(), self.variant)
            .expect("witness points are valid");
        for &(i, j) in &self.prefix {
            s = s.apply_move(i, j).expect("witness prefix is legal").0;
        }
        s
    }
}

/// Final state when `greedy_player` plays greedily and the opponent plays
/// optimally from `s`.
pub fn greedy_versus_optimal(
    s: &PolygonGameState,
    greedy_player: Player,
    budget: u64,
) -> Option<PolygonGameState> {
    let mut solver = Solver::new(budget);
    let mut st = s.clone();
    while !st.is_terminal() {
        let m = if st.to_move() == greedy_player {
            greedy_move(&st, TieBreak::Lexicographic)
        } else {
            let r = solver.solve(&st);
            if r.partial {
                return None;
            }
            r.best_move?
        };
        st = st.apply_move(m.0, m.1).ok()?.0;
    }
    Some(st)
}

/// Check a witness: in its position the greedy player can force a win, but
/// greedy play against an optimal opponent loses.
pub fn check_greedy_witness(w: &GreedyWitness, budget: u64) -> bool {
    let s = w.position();
    if s.to_move() != w.greedy_player {
        return false;
    }
    let r = solve(&s, budget);
    if r.partial || !r.margin_for(w.greedy_player).is_positive() {
        return false;
    }
    if greedy_move(&s, TieBreak::Lexicographic) != w.greedy_choice {
        return false;
    }
    let after = match s.apply_move(w.winning_move.0, w.winning_move.1) {
        Ok((a, _)) => a,
        Err(_) => return false,
    };
    let win_holds = solve(&after, budget).margin_for(w.greedy_player).is_positive();
    let end = match greedy_versus_optimal(&s, w.greedy_player, budget) {
        Some(e) => e,
        None => return false,
    };
    let lost = end.score(w.greedy_player) < end.score(w.greedy_player.other());
    win_holds && lost
}

/// Search random convex games for a position where the player to move can
/// force a win but greedy play loses.
pub fn find_greedy_counterexample(
    n: usize,
    trials: usize,
    seed: u64,
    variant: Variant,
    budget: u64,
) -> Option<GreedyWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let points = random_convex_position(n, &mut rng);
        let start = PolygonGameState::new_game(points.clone(), variant).ok()?;
        // Random prefix, then inspect every position along the way.
        let mut prefix = Vec::new();
        let mut st = start.clone();
        loop {
            if st.is_terminal() {
                break;
            }
            let greedy_player = st.to_move();
            let g = greedy_move(&st, TieBreak::Lexicographic);
            let r = solve(&st, budget);
            if !r.partial && r.margin_for(greedy_player).is_positive() {
                let w = GreedyWitness {
                    points: points.clone(),
                    variant,
                    prefix: prefix.clone(),
                    greedy_player,
                    winning_move: r.best_move.expect("non-terminal"),
                    greedy_choice: g,
                };
                if let Some(end) = greedy_versus_optimal(&st, greedy_player, budget) {
                    if end.score(greedy_player) < end.score(greedy_player.other()) {
                        return Some(w);
                    }
                }
            }
            let moves = st.legal_moves();
            let m = moves[rng.gen_range(0..moves.len())];
            prefix.push(m);
            st = st.apply_move(m.0, m.1).expect("legal").0;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    #[test]
    fn triangle_goes_to_first_player() {
        let s = PolygonGameState::new_game(pts(&[(0, 0), (1, 0), (0, 1)]), Variant::Simple).unwrap();
        let r = solve(&s, DEFAULT_BUDGET);
        assert_eq!(r.margin, Rat::new(1, 2));
        assert!(!r.partial);
        assert_eq!(r.line.len(), 3);
        assert_eq!(can_win(&s, Player::B, DEFAULT_BUDGET), Some(false));
    }

    /// Plain minimax over full games, no memo and no pruning.
    fn brute(s: &PolygonGameState) -> Rat {
        if s.is_terminal() {
            let m = s.to_move();
            return s.score(m) - s.score(m.other());
        }
        s.legal_moves()
            .iter()
            .map(|&(i, j)| {
                let (next, _) = s.apply_move(i, j).unwrap();
                if next.to_move() == s.to_move() {
                    brute(&next)
                } else {
                    -brute(&next)
                }
            })
            .max()
            .unwrap()
    }

    #[test]
    fn unit_square_is_a_draw() {
        let s = PolygonGameState::new_game(pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]), Variant::Simple)
            .unwrap();
        let r = solve(&s, DEFAULT_BUDGET);
        assert_eq!(r.margin, Rat::zero());
        assert_eq!(brute(&s), Rat::zero());
        assert_eq!(can_win(&s, Player::B, DEFAULT_BUDGET), Some(false));
    }

    #[test]
    fn skewed_quadrilateral_goes_to_second_player() {
        let s = PolygonGameState::new_game(pts(&[(0, 0), (5, 0), (4, 3), (0, 2)]), Variant::Holes)
            .unwrap();
        let r = solve(&s, DEFAULT_BUDGET);
        assert_eq!(r.margin, brute(&s));
        assert!(r.margin_for(Player::B).is_positive());
        assert_eq!(can_win(&s, Player::B, DEFAULT_BUDGET), Some(true));
    }

    #[test]
    fn solver_matches_plain_minimax() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [4, 5] {
            let p = random_convex_position(n, &mut rng);
            for v in [Variant::Holes, Variant::Simple] {
                let s = PolygonGameState::new_game(p.clone(), v).unwrap();
                assert_eq!(solve(&s, DEFAULT_BUDGET).margin, brute(&s));
            }
        }
    }

    #[test]
    fn memo_does_not_change_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2 {
            let p = random_convex_position(5, &mut rng);
            let s = PolygonGameState::new_game(p, Variant::Holes).unwrap();
            let a = Solver::new(DEFAULT_BUDGET).solve(&s);
            let b = Solver::new(DEFAULT_BUDGET).without_memo().solve(&s);
            assert_eq!(a.margin, b.margin);
            assert!(a.nodes <= b.nodes);
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_convex_position(6, &mut rng);
        let s = PolygonGameState::new_game(p, Variant::Simple).unwrap();
        let r = solve(&s, 10);
        assert!(r.partial);
        assert!(r.best_move.is_some());
    }

    #[test]
    fn generator_is_convex_and_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_convex_position(7, &mut rng);
        let hull = crate::geometry::convex_hull(&p).unwrap();
        assert_eq!(hull.len(), 7);
        assert!(distinct_triangle_areas(&p));
    }
}
