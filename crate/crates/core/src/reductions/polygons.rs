use serde::{Deserialize, Serialize};

use crate::boxes::EndgameDecomposition;
use crate::geometry::{segment_blocked_by_point, walk_signed_area, Point, PolygonCycle, Rat, Segment};
use crate::polygon_game::{norm_edge, Edge, Owner, Player, PolygonGameState, ScoredRegion, StateParts, Variant};

use super::embedding::GridPoint;
use super::{OrthogonalEmbedding, ReductionError};

/// Template indices.
pub const MOUTH_A: usize = 0;
pub const MOUTH_B: usize = 1;
pub const MOUTH_C: usize = 2;
pub const APEX: usize = 3;
pub const FOOT: usize = 4;

/// Shape of the bell placed across a corridor doorway.
///
/// Template offsets are in a local frame whose x axis runs along the
/// corridor and whose y axis spans the doorway: `a` and `c` sit on the two
/// corridor walls, `b` is the free point in the middle of the mouth, and the
/// outline `a, apex, c, foot` bounds the bell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BellParameters {
    pub corridor_width: Rat,
    pub a_bell: Rat,
    pub template: Vec<Point>,
}

impl BellParameters {
    /// The standard bell for a corridor of width `w`: a square standing on a
    /// corner, with the mouth as one diagonal.
    pub fn new(corridor_width: Rat) -> Self {
        let h = corridor_width.half();
        let z = Rat::zero();
        let template = vec![
            Point::new(z.clone(), -h.clone()),
            Point::new(z.clone(), z.clone()),
            Point::new(z.clone(), h.clone()),
            Point::new(h.clone(), z.clone()),
            Point::new(-h.clone(), z),
        ];
        let a_bell = walk_signed_area(&outline(&template));
        BellParameters { corridor_width, a_bell, template }
    }

    /// Reject templates that self-intersect, misreport their area, or let
    /// the mouth points see each other.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |m: &str| Err(ReductionError::Bell(m.to_string()));
        if !self.corridor_width.is_positive() {
            return bad("corridor width must be positive");
        }
        if self.template.len() != 5 {
            return bad("template needs the points a, b, c, apex and foot");
        }
        let t = &self.template;
        let cyc = PolygonCycle::new(outline(t));
        if !cyc.is_simple() {
            return bad("outline self-intersects");
        }
        let area = walk_signed_area(&cyc.vertices);
        if !area.is_positive() {
            return bad("outline must be counterclockwise");
        }
        if area != self.a_bell {
            return bad("declared bell area does not match the outline");
        }
        if !mouth_blocked(self)? {
            return bad("mouth point a sees c");
        }
        let across = Segment::new(t[APEX].clone(), t[FOOT].clone());
        if !segment_blocked_by_point(&across, &t[MOUTH_B]).map_err(|e| ReductionError::Bell(e.to_string()))? {
            return bad("apex sees the foot past b");
        }
        let half = self.corridor_width.half();
        if t.iter().any(|p| p.x.abs() + p.y.abs() > half) {
            return bad("template leaves the doorway");
        }
        Ok(())
    }
}

impl Default for BellParameters {
    fn default() -> Self {
        BellParameters::new(Rat::from_int(2))
    }
}

fn outline(t: &[Point]) -> Vec<Point> {
    vec![t[MOUTH_A].clone(), t[APEX].clone(), t[MOUTH_C].clone(), t[FOOT].clone()]
}

/// Whether `b` blocks the segment from `a` to `c`.
pub fn mouth_blocked(bells: &BellParameters) -> Result<bool, ReductionError> {
    let t = &bells.template;
    if t.len() <= MOUTH_C {
        return Err(ReductionError::Bell("template is missing mouth points".into()));
    }
    let ac = Segment::new(t[MOUTH_A].clone(), t[MOUTH_C].clone());
    segment_blocked_by_point(&ac, &t[MOUTH_B]).map_err(|e| ReductionError::Bell(e.to_string()))
}

/// `(S_Bfinal, S_Rfinal)` when every chain and cycle but the last is
/// double-crossed; `unclaimed` is the unclaimed area.
pub fn controlled_scores_polygons(
    s_b: &Rat,
    s_r: &Rat,
    d: &EndgameDecomposition,
    unclaimed: &Rat,
    a_bell: &Rat,
) -> Result<(Rat, Rat), ReductionError> {
    if d.n_chains == 0 {
        return Err(ReductionError::Unsupported("the formula needs at least one chain".into()));
    }
    let given = a_bell.clone() * Rat::from(d.n_chains as i64 - 1) + a_bell.clone() * Rat::from(2 * d.n_cycles as i64);
    Ok((s_b.clone() + given.clone(), s_r.clone() + unclaimed.clone() - given))
}

/// Cell centres sit `2w` apart for corridor width `w`, so bells on distinct
/// route steps never touch. Corridor cells and everything around them are
/// pre-scored; each route keeps one bell across the doorway of its middle
/// step. Player B moves first.
pub fn vcp_to_polygons(
    e: &OrthogonalEmbedding,
    bells: &BellParameters,
    s_b: &Rat,
    s_r: &Rat,
) -> Result<PolygonGameState, ReductionError> {
    e.validate()?;
    bells.validate()?;
    let spacing = bells.corridor_width.clone() * Rat::from_int(2);
    let all: Vec<GridPoint> = e.coords.iter().chain(e.routes.iter().flat_map(|r| r.path.iter())).copied().collect();
    let (x0, x1) = (all.iter().map(|p| p[0]).min().unwrap_or(0) - 1, all.iter().map(|p| p[0]).max().unwrap_or(0) + 1);
    let (y0, y1) = (all.iter().map(|p| p[1]).min().unwrap_or(0) - 1, all.iter().map(|p| p[1]).max().unwrap_or(0) + 1);

    let at = |x: Rat, y: Rat| Point::new(x * spacing.clone(), y * spacing.clone());
    let corner = |x: i64, y: i64| at(Rat::from_int(x), Rat::from_int(y));
    let mut points = vec![corner(x0, y0), corner(x1, y0), corner(x1, y1), corner(x0, y1)];
    let hull = vec![0, 1, 2, 3];
    let mut edges: Vec<Edge> = (0..4).map(|i| norm_edge(i, (i + 1) % 4)).collect();
    let mut holes = Vec::new();
    for r in &e.routes {
        let i = (r.path.len() - 2) / 2;
        let (p, q) = (r.path[i], r.path[i + 1]);
        let mid = at(Rat::new(p[0] + q[0], 2), Rat::new(p[1] + q[1], 2));
        let (dx, dy) = (Rat::from_int(q[0] - p[0]), Rat::from_int(q[1] - p[1]));
        let base = points.len();
        for t in &bells.template {
            let x = mid.x.clone() + t.x.clone() * dx.clone() - t.y.clone() * dy.clone();
            let y = mid.y.clone() + t.x.clone() * dy.clone() + t.y.clone() * dx.clone();
            points.push(Point::new(x, y));
        }
        let ring = [base + MOUTH_A, base + APEX, base + MOUTH_C, base + FOOT];
        for k in 0..4 {
            edges.push(norm_edge(ring[k], ring[(k + 1) % 4]));
        }
        holes.push(ring.to_vec());
    }
    let hull_area = walk_signed_area(&hull.iter().map(|&i| points[i].clone()).collect::<Vec<_>>());
    let area = hull_area - bells.a_bell.clone() * Rat::from_int(holes.len() as i64);
    let grey = ScoredRegion { boundary: hull, holes, owner: Owner::Neutral, area };
    PolygonGameState::from_parts(
        points,
        Variant::Simple,
        StateParts {
            edges,
            regions: vec![grey],
            offset_r: s_r.clone(),
            offset_b: s_b.clone(),
            to_move: Some(Player::B),
        },
    )
    .map_err(|err| ReductionError::Bell(err.to_string()))
}

/// Areas of the unscored islands left inside pre-scored regions.
pub fn bell_areas(s: &PolygonGameState) -> Vec<Rat> {
    s.regions()
        .iter()
        .filter(|r| r.owner == Owner::Neutral)
        .flat_map(|r| r.holes.iter())
        .map(|h| walk_signed_area(&h.iter().map(|&i| s.points()[i].clone()).collect::<Vec<_>>()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::embedding::fixture;

    #[test]
    fn standard_template_is_valid() {
        let b = BellParameters::new(Rat::from_int(3));
        b.validate().unwrap();
        assert_eq!(b.a_bell, Rat::new(9, 2));
        assert!(mouth_blocked(&b).unwrap());
    }

    #[test]
    fn broken_templates_are_rejected() {
        let mut b = BellParameters::default();
        b.template.swap(APEX, MOUTH_C);
        assert!(b.validate().is_err());
        let mut b = BellParameters::default();
        b.template[MOUTH_B] = Point::new(Rat::new(1, 4), Rat::zero());
        assert!(matches!(b.validate(), Err(ReductionError::Bell(m)) if m.contains("sees")));
        let mut b = BellParameters::default();
        b.a_bell = Rat::from_int(7);
        assert!(b.validate().is_err());
    }

    #[test]
    fn single_edge_has_one_bell() {
        let s = vcp_to_polygons(&fixture("single-edge").unwrap(), &BellParameters::default(), &Rat::zero(), &Rat::zero())
            .unwrap();
        assert_eq!(bell_areas(&s), vec![Rat::from_int(2)]);
        assert_eq!(s.to_move(), Player::B);
        assert_eq!(s.variant(), Variant::Simple);
        assert_eq!(s.hull_area() - s.scored_area(), Rat::from_int(2));
        assert_eq!(s.legal_moves().len(), 4);
    }

    #[test]
    fn four_cycle_bells_are_congruent() {
        let bells = BellParameters::new(Rat::new(3, 2));
        let s = vcp_to_polygons(&fixture("4-cycle").unwrap(), &bells, &Rat::from_int(5), &Rat::zero()).unwrap();
        let areas = bell_areas(&s);
        assert_eq!(areas.len(), 4);
        assert!(areas.iter().all(|a| *a == bells.a_bell));
        assert_eq!(s.score(Player::B), &Rat::from_int(5));
    }
}
