use std::collections::{BTreeMap, BTreeSet};

use crate::boxes::{sides, BoxOwner, BoxesState, Cell, Seg};
use crate::polygon_game::Player;

use super::embedding::GridPoint;
use super::packing::verify_packing;
use super::{OrthogonalEmbedding, ReductionError};

/// Side shared by two grid-adjacent cells.
pub fn shared_side(a: Cell, b: Cell) -> Seg {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    if p.1 == q.1 {
        Seg::v(q.0, q.1)
    } else {
        Seg::h(q.0, q.1)
    }
}

fn cell(p: GridPoint) -> Cell {
    (p[0] as u32, p[1] as u32)
}

fn prepared(e: &OrthogonalEmbedding) -> Result<OrthogonalEmbedding, ReductionError> {
    e.validate()?;
    if let Some(&i) = e.short_routes().first() {
        let r = &e.routes[i];
        return Err(ReductionError::Embedding(format!(
            "route {i} ({}-{}) has {} interior points between degree-3 vertices; subdivide first",
            r.edge[0],
            r.edge[1],
            r.path.len() - 2
        )));
    }
    Ok(e.normalized(1))
}

/// Every vertex of G' becomes an unclaimed cell, open exactly towards its
/// route neighbours; all other cells are claimed by `Wall`. A degree-1
/// vertex also gets one opening onto the surrounding wall area, so that no
/// cell starts with three drawn sides. Player B moves first.
pub fn vcp_to_boxes(e: &OrthogonalEmbedding, s_b: i64, s_r: i64) -> Result<BoxesState, ReductionError> {
    let e = prepared(e)?;
    let (g, pts) = e.expanded();
    let width = pts.iter().map(|p| p[0]).max().unwrap_or(0) as u32 + 2;
    let height = pts.iter().map(|p| p[1]).max().unwrap_or(0) as u32 + 2;
    if width > 64 || height > 64 {
        return Err(ReductionError::Embedding(format!("board {width}x{height} exceeds 64x64")));
    }
    let live: BTreeSet<Cell> = pts.iter().map(|&p| cell(p)).collect();
    let adj = g.adjacency();
    let mut open: BTreeSet<Seg> = BTreeSet::new();
    for &[a, b] in &g.edges {
        open.insert(shared_side(cell(pts[a]), cell(pts[b])));
    }
    for (v, nb) in adj.iter().enumerate() {
        if nb.len() != 1 {
            continue;
        }
        let c = pts[v];
        let n = pts[nb[0]];
        let away = [2 * c[0] - n[0], 2 * c[1] - n[1]];
        let others = [[c[0] + 1, c[1]], [c[0] - 1, c[1]], [c[0], c[1] + 1], [c[0], c[1] - 1]];
        let ground = std::iter::once(away)
            .chain(others)
            .find(|q| *q != n && !live.contains(&cell(*q)))
            .ok_or_else(|| ReductionError::Embedding(format!("vertex {v} has no free side for its chain end")))?;
        open.insert(shared_side(cell(c), cell(ground)));
    }
    let mut walls = BTreeSet::new();
    for &c in &live {
        for s in sides(c) {
            if !open.contains(&s) {
                walls.insert(s);
            }
        }
    }
    let mut claimed = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if !live.contains(&(x, y)) {
                claimed.push(((x, y), BoxOwner::Wall));
            }
        }
    }
    BoxesState::from_parts(width, height, walls, claimed, s_r, s_b, Player::B)
        .map_err(|err| ReductionError::Embedding(err.to_string()))
}

/// Settle every degree-3 junction of a `vcp_to_boxes` board. A junction on
/// one of the given vertex-disjoint cycles of G is walled off from its third
/// route; any other junction is walled off from its first route.
pub fn commit_packing(
    s: &BoxesState,
    e: &OrthogonalEmbedding,
    cycles: &[Vec<usize>],
) -> Result<BoxesState, ReductionError> {
    let g = e.graph();
    if !verify_packing(&g, cycles) {
        return Err(ReductionError::InvalidGraph("cycles are not a vertex-disjoint packing".into()));
    }
    let e = prepared(e)?;
    let mut keep: BTreeMap<usize, [usize; 2]> = BTreeMap::new();
    for c in cycles {
        for i in 0..c.len() {
            keep.insert(c[i], [c[(i + c.len() - 1) % c.len()], c[(i + 1) % c.len()]]);
        }
    }
    let mut walls: BTreeSet<Seg> = s.walls().clone();
    for v in 0..g.vertices {
        if e.degree(v) != 3 {
            continue;
        }
        let incident: Vec<usize> =
            (0..e.routes.len()).filter(|&i| e.routes[i].edge.contains(&v)).collect();
        let cut = match keep.get(&v) {
            Some(&[p, q]) => *incident
                .iter()
                .find(|&&i| {
                    let other = if e.routes[i].edge[0] == v { e.routes[i].edge[1] } else { e.routes[i].edge[0] };
                    other != p && other != q
                })
                .unwrap(),
            None => incident[0],
        };
        let r = &e.routes[cut];
        let (here, next) = if r.edge[0] == v { (r.path[0], r.path[1]) } else {
            let n = r.path.len();
            (r.path[n - 1], r.path[n - 2])
        };
        walls.insert(shared_side(cell(here), cell(next)));
    }
    let claimed: Vec<(Cell, BoxOwner)> = s.claimed().iter().map(|(&c, &o)| (c, o)).collect();
    BoxesState::from_parts(
        s.width(),
        s.height(),
        walls,
        claimed,
        s.offset(Player::R),
        s.offset(Player::B),
        s.to_move(),
    )
    .map_err(|err| ReductionError::Embedding(err.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::decompose_endgame;
    use crate::reductions::embedding::fixture;

    #[test]
    fn ring_fixture_is_one_cycle() {
        let s = vcp_to_boxes(&fixture("4-cycle").unwrap(), 0, 0).unwrap();
        let d = decompose_endgame(&s).unwrap();
        assert_eq!((d.n_cycles, d.n_chains, d.n_unclaimed), (1, 0, 8));
        assert_eq!(s.to_move(), Player::B);
    }

    #[test]
    fn path_has_ground_openings() {
        let s = vcp_to_boxes(&fixture("path").unwrap(), 0, 0).unwrap();
        let d = decompose_endgame(&s).unwrap();
        assert_eq!((d.n_cycles, d.n_chains, d.n_unclaimed), (0, 1, 6));
        for c in s.unclaimed_cells() {
            assert_eq!(s.undrawn_sides(c).len(), 2);
        }
    }

    #[test]
    fn junctions_need_a_committed_packing() {
        let e = fixture("k4").unwrap();
        let s = vcp_to_boxes(&e, 0, 0).unwrap();
        assert_eq!(s.unclaimed_cells().len(), e.expanded().0.vertices);
        assert!(decompose_endgame(&s).is_err());
        let settled = commit_packing(&s, &e, &[vec![0, 1, 3]]).unwrap();
        let d = decompose_endgame(&settled).unwrap();
        assert_eq!(d.n_cycles, 1);
        assert_eq!(d.n_unclaimed, s.unclaimed_cells().len());
    }
}
