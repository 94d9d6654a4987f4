//! Dots & Boxes on a rectangular grid, with pre-drawn walls and cells
//! blocked out by a neutral `Wall` owner. Includes the chain/cycle endgame
//! decomposition, the controlled-endgame score formula and an exact
//! minimax oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polygon_game::Player;

pub type Cell = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "v")]
    V,
}

/// Unit lattice segment. `H` runs from `(x, y)` to `(x + 1, y)`, `V` from
/// `(x, y)` to `(x, y + 1)`. Cell `(x, y)` has top side `H(x, y)`, bottom
/// side `H(x, y + 1)`, left side `V(x, y)` and right side `V(x + 1, y)`;
/// rows grow downwards as in the text format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seg {
    pub x: u32,
    pub y: u32,
    pub dir: Dir,
}

impl Seg {
    pub fn h(x: u32, y: u32) -> Seg {
        Seg { x, y, dir: Dir::H }
    }

    pub fn v(x: u32, y: u32) -> Seg {
        Seg { x, y, dir: Dir::V }
    }
}

impl fmt::Display for Seg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.dir {
            Dir::H => 'h',
            Dir::V => 'v',
        };
        write!(f, "{}{},{}", d, self.x, self.y)
    }
}

pub fn sides(c: Cell) -> [Seg; 4] {
    let (x, y) = c;
    [Seg::h(x, y), Seg::h(x, y + 1), Seg::v(x, y), Seg::v(x + 1, y)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoxOwner {
    R,
    B,
    /// Area removed from play; counts for nobody.
    Wall,
}

impl From<Player> for BoxOwner {
    fn from(p: Player) -> Self {
        match p {
            Player::R => BoxOwner::R,
            Player::B => BoxOwner::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxesError {
    #[error("invalid board: {0}")]
    InvalidBoard(String),
    #[error("segment {0} is already drawn")]
    AlreadyDrawn(Seg),
    #[error("segment {0} is not playable on this board")]
    NotPlayable(Seg),
    #[error("cell {0:?} has {1} openings; board is not settled")]
    NotSettled(Cell, usize),
    #[error("formula needs at least one chain")]
    NoChains,
    #[error("{0} undrawn segments exceed the search bound {1}")]
    TooLarge(usize, usize),
    #[error("cannot parse board: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxesState {
    width: u32,
    height: u32,
    walls: BTreeSet<Seg>,
    claimed: BTreeMap<Cell, BoxOwner>,
    offset_r: i64,
    offset_b: i64,
    to_move: Player,
}

impl BoxesState {
    pub fn new(width: u32, height: u32) -> Result<Self, BoxesError> {
        Self::from_parts(width, height, [], [], 0, 0, Player::R)
    }

    /// Assemble a mid-game board. Cells claimed by a player must have all
    /// four sides drawn; `Wall` cells need not.
    pub fn from_parts(
        width: u32,
        height: u32,
        walls: impl IntoIterator<Item = Seg>,
        claimed: impl IntoIterator<Item = (Cell, BoxOwner)>,
        offset_r: i64,
        offset_b: i64,
        to_move: Player,
    ) -> Result<Self, BoxesError> {
        if width == 0 || height == 0 || width > 64 || height > 64 {
            return Err(BoxesError::InvalidBoard(format!("bad size {width}x{height}")));
        }
        let s = BoxesState {
            width,
            height,
            walls: walls.into_iter().collect(),
            claimed: claimed.into_iter().collect(),
            offset_r,
            offset_b,
            to_move,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), BoxesError> {
        for w in &self.walls {
            if !self.on_board(*w) {
                return Err(BoxesError::InvalidBoard(format!("segment {w} is off the board")));
            }
        }
        for (&c, &o) in &self.claimed {
            if c.0 >= self.width || c.1 >= self.height {
                return Err(BoxesError::InvalidBoard(format!("cell {c:?} is off the board")));
            }
            if o != BoxOwner::Wall && !sides(c).iter().all(|s| self.walls.contains(s)) {
                return Err(BoxesError::InvalidBoard(format!(
                    "claimed cell {c:?} is not fully walled"
                )));
            }
        }
        for c in self.cells() {
            if !self.claimed.contains_key(&c) && sides(c).iter().all(|s| self.walls.contains(s)) {
                return Err(BoxesError::InvalidBoard(format!("closed cell {c:?} is unclaimed")));
            }
        }
        if self.offset_r < 0 || self.offset_b < 0 {
            return Err(BoxesError::InvalidBoard("negative score".into()));
        }
        Ok(())
    }

    fn on_board(&self, s: Seg) -> bool {
        match s.dir {
            Dir::H => s.x < self.width && s.y <= self.height,
            Dir::V => s.x <= self.width && s.y < self.height,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn walls(&self) -> &BTreeSet<Seg> {
        &self.walls
    }

    pub fn claimed(&self) -> &BTreeMap<Cell, BoxOwner> {
        &self.claimed
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn offset(&self, p: Player) -> i64 {
        match p {
            Player::R => self.offset_r,
            Player::B => self.offset_b,
        }
    }

    pub fn score(&self, p: Player) -> i64 {
        let owner = BoxOwner::from(p);
        self.offset(p) + self.claimed.values().filter(|&&o| o == owner).count() as i64
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| (x, y)))
    }

    pub fn is_unclaimed(&self, c: Cell) -> bool {
        c.0 < self.width && c.1 < self.height && !self.claimed.contains_key(&c)
    }

    pub fn unclaimed_cells(&self) -> Vec<Cell> {
        self.cells().filter(|&c| self.is_unclaimed(c)).collect()
    }

    /// On-board cells on either side of a segment.
    pub fn adjacent_cells(&self, s: Seg) -> Vec<Cell> {
        let mut out = Vec::with_capacity(2);
        match s.dir {
            Dir::H => {
                if s.y > 0 && s.x < self.width {
                    out.push((s.x, s.y - 1));
                }
                if s.y < self.height && s.x < self.width {
                    out.push((s.x, s.y));
                }
            }
            Dir::V => {
                if s.x > 0 && s.y < self.height {
                    out.push((s.x - 1, s.y));
                }
                if s.x < self.width && s.y < self.height {
                    out.push((s.x, s.y));
                }
            }
        }
        out
    }

    pub fn undrawn_sides(&self, c: Cell) -> Vec<Seg> {
        sides(c)
            .into_iter()
            .filter(|s| !self.walls.contains(s))
            .collect()
    }

    /// Undrawn segments bordering at least one unclaimed cell, sorted.
    pub fn legal_moves(&self) -> Vec<Seg> {
        let mut out: BTreeSet<Seg> = BTreeSet::new();
        for c in self.unclaimed_cells() {
            out.extend(self.undrawn_sides(c));
        }
        out.into_iter().collect()
    }

    pub fn is_terminal(&self) -> bool {
        self.legal_moves().is_empty()
    }

    /// Draw `seg`; returns the new state, the number of completed cells and
    /// whether the mover keeps the turn.
    pub fn apply(&self, seg: Seg) -> Result<(BoxesState, u32, bool), BoxesError> {
        if self.walls.contains(&seg) {
            return Err(BoxesError::AlreadyDrawn(seg));
        }
        if !self.on_board(seg) || !self.adjacent_cells(seg).iter().any(|&c| self.is_unclaimed(c)) {
            return Err(BoxesError::NotPlayable(seg));
        }
        let mut next = self.clone();
        next.walls.insert(seg);
        let mut completed = 0;
        for c in self.adjacent_cells(seg) {
            if next.is_unclaimed(c) && sides(c).iter().all(|s| next.walls.contains(s)) {
                next.claimed.insert(c, self.to_move.into());
                completed += 1;
            }
        }
        let extra = completed > 0 && !next.is_terminal();
        if !extra {
            next.to_move = self.to_move.other();
        }
        Ok((next, completed, extra))
    }

    /// Plain-text board: a header line followed by ASCII art with `+`, `-`,
    /// `|` and owner letters (`R`, `B`, `#` for walls).
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "boxes {}x{} offsetR={} offsetB={} toMove={}\n",
            self.width, self.height, self.offset_r, self.offset_b, self.to_move
        );
        for y in 0..=self.height {
            for x in 0..self.width {
                out.push('+');
                out.push(if self.walls.contains(&Seg::h(x, y)) { '-' } else { ' ' });
            }
            out.push_str("+\n");
            if y == self.height {
                break;
            }
            for x in 0..=self.width {
                out.push(if self.walls.contains(&Seg::v(x, y)) { '|' } else { ' ' });
                if x < self.width {
                    out.push(match self.claimed.get(&(x, y)) {
                        Some(BoxOwner::R) => 'R',
                        Some(BoxOwner::B) => 'B',
                        Some(BoxOwner::Wall) => '#',
                        None => ' ',
                    });
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> BoxesJson {
        BoxesJson {
            width: self.width,
            height: self.height,
            walls: self.walls.iter().copied().collect(),
            claimed: self.claimed.iter().map(|(&c, &o)| ClaimJson { x: c.0, y: c.1, owner: o }).collect(),
            score_r: self.score(Player::R),
            score_b: self.score(Player::B),
            offset_r: self.offset_r,
            offset_b: self.offset_b,
            to_move: self.to_move,
        }
    }

    pub fn from_json(j: BoxesJson) -> Result<Self, BoxesError> {
        let s = Self::from_parts(
            j.width,
            j.height,
            j.walls,
            j.claimed.into_iter().map(|c| ((c.x, c.y), c.owner)),
            j.offset_r,
            j.offset_b,
            j.to_move,
        )?;
        if s.score(Player::R) != j.score_r || s.score(Player::B) != j.score_b {
            return Err(BoxesError::InvalidBoard("scores disagree with claimed cells".into()));
        }
        Ok(s)
    }
}

impl FromStr for BoxesState {
    type Err = BoxesError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| BoxesError::Parse(m.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("boxes") {
            return Err(bad("header must start with 'boxes'"));
        }
        let size = words.next().ok_or_else(|| bad("missing size"))?;
        let (w, h) = size.split_once('x').ok_or_else(|| bad("size must be WxH"))?;
        let width: u32 = w.parse().map_err(|_| bad("bad width"))?;
        let height: u32 = h.parse().map_err(|_| bad("bad height"))?;
        let (mut offset_r, mut offset_b, mut to_move) = (0i64, 0i64, Player::R);
        for kv in words {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("header fields are key=value"))?;
            match k {
                "offsetR" => offset_r = v.parse().map_err(|_| bad("bad offsetR"))?,
                "offsetB" => offset_b = v.parse().map_err(|_| bad("bad offsetB"))?,
                "toMove" => {
                    to_move = match v {
                        "R" => Player::R,
                        "B" => Player::B,
                        _ => return Err(bad("toMove must be R or B")),
                    }
                }
                _ => return Err(bad("unknown header field")),
            }
        }
        let rows: Vec<Vec<char>> = lines
            .take(2 * height as usize + 1)
            .map(|l| {
                let mut r: Vec<char> = l.chars().collect();
                r.resize(2 * width as usize + 1, ' ');
                r
            })
            .collect();
        if rows.len() != 2 * height as usize + 1 {
            return Err(bad("too few rows"));
        }
        let mut walls = Vec::new();
        let mut claimed = Vec::new();
        for y in 0..=height {
            let row = &rows[2 * y as usize];
            for x in 0..width {
                match row[2 * x as usize + 1] {
                    '-' => walls.push(Seg::h(x, y)),
                    ' ' => {}
                    _ => return Err(bad("unexpected character in wall row")),
                }
            }
            if y == height {
                break;
            }
            let row = &rows[2 * y as usize + 1];
            for x in 0..=width {
                match row[2 * x as usize] {
                    '|' => walls.push(Seg::v(x, y)),
                    ' ' => {}
                    _ => return Err(bad("unexpected character in cell row")),
                }
                if x < width {
                    match row[2 * x as usize + 1] {
                        'R' => claimed.push(((x, y), BoxOwner::R)),
                        'B' => claimed.push(((x, y), BoxOwner::B)),
                        '#' => claimed.push(((x, y), BoxOwner::Wall)),
                        ' ' => {}
                        _ => return Err(bad("unexpected owner letter")),
                    }
                }
            }
        }
        BoxesState::from_parts(width, height, walls, claimed, offset_r, offset_b, to_move)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimJson {
    pub x: u32,
    pub y: u32,
    pub owner: BoxOwner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxesJson {
    pub width: u32,
    pub height: u32,
    #[serde(default)]
    pub walls: Vec<Seg>,
    #[serde(default)]
    pub claimed: Vec<ClaimJson>,
    #[serde(rename = "scoreR", default)]
    pub score_r: i64,
    #[serde(rename = "scoreB", default)]
    pub score_b: i64,
    #[serde(rename = "offsetR", default)]
    pub offset_r: i64,
    #[serde(rename = "offsetB", default)]
    pub offset_b: i64,
    pub to_move: Player,
}

impl Serialize for BoxesState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BoxesState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        BoxesState::from_json(BoxesJson::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Partition of the unclaimed cells of a settled board.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EndgameDecomposition {
    /// Each chain in order from one end to the other.
    pub chains: Vec<Vec<Cell>>,
    /// Each cycle in cyclic order.
    pub cycles: Vec<Vec<Cell>>,
    pub n_chains: usize,
    pub n_cycles: usize,
    pub n_unclaimed: usize,
}

impl EndgameDecomposition {
    pub fn from_parts(chains: Vec<Vec<Cell>>, cycles: Vec<Vec<Cell>>) -> Self {
        let n_unclaimed = chains.iter().chain(cycles.iter()).map(Vec::len).sum();
        EndgameDecomposition {
            n_chains: chains.len(),
            n_cycles: cycles.len(),
            chains,
            cycles,
            n_unclaimed,
        }
    }
}

/// Unclaimed neighbours of `c` reachable through undrawn sides.
pub fn open_neighbours(s: &BoxesState, c: Cell) -> Vec<Cell> {
    s.undrawn_sides(c)
        .into_iter()
        .flat_map(|seg| s.adjacent_cells(seg))
        .filter(|&d| d != c && s.is_unclaimed(d))
        .collect()
}

/// Split the unclaimed cells into maximal chains and cycles of the
/// strings-and-coins dual.
pub fn decompose_endgame(s: &BoxesState) -> Result<EndgameDecomposition, BoxesError> {
    let cells = s.unclaimed_cells();
    let mut nbrs: HashMap<Cell, Vec<Cell>> = HashMap::new();
    for &c in &cells {
        let k = s.undrawn_sides(c).len();
        if k > 2 {
            return Err(BoxesError::NotSettled(c, k));
        }
        nbrs.insert(c, open_neighbours(s, c));
    }
    let mut seen: BTreeSet<Cell> = BTreeSet::new();
    let mut chains = Vec::new();
    let mut cycles = Vec::new();
    // Chains start at cells with fewer than two cell neighbours.
    for &c in &cells {
        if seen.contains(&c) || nbrs[&c].len() == 2 {
            continue;
        }
        let mut path = vec![c];
        seen.insert(c);
        let mut cur = c;
        while let Some(&next) = nbrs[&cur].iter().find(|d| !seen.contains(d)) {
            path.push(next);
            seen.insert(next);
            cur = next;
        }
        chains.push(path);
    }
    for &c in &cells {
        if seen.contains(&c) {
            continue;
        }
        let mut ring = vec![c];
        seen.insert(c);
        let mut cur = c;
        while let Some(&next) = nbrs[&cur].iter().find(|d| !seen.contains(d)) {
            ring.push(next);
            seen.insert(next);
            cur = next;
        }
        cycles.push(ring);
    }
    Ok(EndgameDecomposition::from_parts(chains, cycles))
}

/// Final scores when the controlling player double-crosses every chain and
/// cycle but the last: `(S_Bfinal, S_Rfinal)`.
pub fn controlled_scores(
    s_b: i64,
    s_r: i64,
    d: &EndgameDecomposition,
) -> Result<(i64, i64), BoxesError> {
    if d.n_chains == 0 {
        return Err(BoxesError::NoChains);
    }
    let given = 2 * (d.n_chains as i64 - 1) + 4 * d.n_cycles as i64;
    Ok((s_b + given, s_r + d.n_unclaimed as i64 - given))
}

pub const DEFAULT_MINIMAX_BOUND: usize = 28;

/// Exact negamax over the remaining segments: returns what the player to
/// move gains over the opponent from here on, and an optimal move.
pub fn boxes_minimax(s: &BoxesState, bound: usize) -> Result<(i64, Option<Seg>), BoxesError> {
    let moves = s.legal_moves();
    if moves.len() > bound || moves.len() > 63 {
        return Err(BoxesError::TooLarge(moves.len(), bound.min(63)));
    }
    let index: HashMap<Seg, usize> = moves.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    // For every unclaimed cell, the mask of its undrawn sides.
    let cell_masks: Vec<u64> = s
        .unclaimed_cells()
        .into_iter()
        .map(|c| s.undrawn_sides(c).iter().fold(0u64, |m, seg| m | 1 << index[seg]))
        .collect();
    let touching: Vec<Vec<u64>> = (0..moves.len())
        .map(|i| {
            cell_masks
                .iter()
                .copied()
                .filter(|m| m & (1 << i) != 0)
                .collect()
        })
        .collect();
    let full = if moves.is_empty() { 0 } else { (1u64 << moves.len()) - 1 };

    struct Search<'a> {
        touching: &'a [Vec<u64>],
        full: u64,
        memo: HashMap<u64, i64>,
    }
    impl Search<'_> {
        fn value(&mut self, drawn: u64) -> (i64, Option<usize>) {
            if drawn == self.full {
                return (0, None);
            }
            let mut best: Option<(i64, usize)> = None;
            for i in 0..self.touching.len() {
                if drawn & (1 << i) != 0 {
                    continue;
                }
                let next = drawn | 1 << i;
                let done = self.touching[i].iter().filter(|&&m| next & m == m).count() as i64;
                let v = if next == self.full {
                    done
                } else {
                    let f = self.cached(next);
                    if done > 0 {
                        done + f
                    } else {
                        -f
                    }
                };
                if best.map_or(true, |(b, _)| v > b) {
                    best = Some((v, i));
                }
            }
            let (v, i) = best.expect("undrawn segment exists");
            (v, Some(i))
        }

        fn cached(&mut self, drawn: u64) -> i64 {
            if let Some(&v) = self.memo.get(&drawn) {
                return v;
            }
            let (v, _) = self.value(drawn);
            self.memo.insert(drawn, v);
            v
        }
    }

    let mut search = Search {
        touching: &touching,
        full,
        memo: HashMap::new(),
    };
    let (future, best) = search.value(0);
    Ok((future, best.map(|i| moves[i])))
}
