use dots_polygons::boxes::BoxesState;
use dots_polygons::geometry::Point;
use dots_polygons::polygon_game::{PolygonGameState, Variant};
use dots_polygons::reductions::embedding::fixture;
use dots_polygons::reductions::polygons::{vcp_to_polygons, BellParameters};
use dots_polygons::reductions::to_boxes::vcp_to_boxes;
use dots_polygons::geometry::Rat;
use serde::Serialize;

use crate::error::ServiceError;
use crate::game::Game;

#[derive(Clone, Debug, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub description: &'static str,
}

pub const FIXTURES: [FixtureInfo; 8] = [
    FixtureInfo { name: "triangle", kind: "polygons", description: "three points; the first stroke never scores" },
    FixtureInfo { name: "square", kind: "polygons", description: "axis-aligned square of side two" },
    FixtureInfo { name: "hexagon", kind: "polygons", description: "convex hexagon, fresh" },
    FixtureInfo { name: "hexagon-easy", kind: "polygons", description: "convex hexagon after v2v5, v6v1 and v3v4: an easy endgame" },
    FixtureInfo { name: "corridor-4cycle", kind: "polygons", description: "corridor loop with four bells built from the 4-cycle embedding" },
    FixtureInfo { name: "boxes-3x3", kind: "boxes", description: "empty 3x3 Dots & Boxes board" },
    FixtureInfo { name: "boxes-chain6", kind: "boxes", description: "settled board holding one chain of six boxes" },
    FixtureInfo { name: "boxes-ring4-chain6", kind: "boxes", description: "settled board holding a 4-cycle and a 6-chain" },
];

fn pts(v: &[(i64, i64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point::int(x, y)).collect()
}

const HEXAGON: [(i64, i64); 6] = [(0, 0), (4, 0), (6, 3), (4, 7), (0, 6), (-2, 3)];

pub fn load(name: &str) -> Result<Game, ServiceError> {
    let bad = |e: String| ServiceError::InvalidConfig(format!("fixture {name}: {e}"));
    let polygons = |p: Vec<Point>| {
        PolygonGameState::new_game(p, Variant::Simple).map(Game::Polygons).map_err(|e| bad(e.to_string()))
    };
    match name {
        "triangle" => polygons(pts(&[(0, 0), (4, 0), (0, 4)])),
        "square" => polygons(pts(&[(0, 0), (2, 0), (2, 2), (0, 2)])),
        "hexagon" => polygons(pts(&HEXAGON)),
        "hexagon-easy" => {
            let s = PolygonGameState::new_game(pts(&HEXAGON), Variant::Simple).map_err(|e| bad(e.to_string()))?;
            let mut s = s;
            for (i, j) in [(1, 4), (5, 0), (2, 3)] {
                s = s.apply_move(i, j).map_err(|e| bad(e.to_string()))?.0;
            }
            Ok(Game::Polygons(s))
        }
        "corridor-4cycle" => {
            let e = fixture("4-cycle").expect("bundled embedding");
            vcp_to_polygons(&e, &BellParameters::default(), &Rat::zero(), &Rat::zero())
                .map(Game::Polygons)
                .map_err(|e| bad(e.to_string()))
        }
        "boxes-3x3" => BoxesState::new(3, 3).map(Game::Boxes).map_err(|e| bad(e.to_string())),
        "boxes-chain6" | "boxes-ring4-chain6" => {
            let e = fixture(&name["boxes-".len()..]).expect("bundled embedding");
            vcp_to_boxes(&e, 0, 0).map(Game::Boxes).map_err(|e| bad(e.to_string()))
        }
        _ => Err(ServiceError::UnknownFixture(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_fixtures_resolve() {
        for f in FIXTURES.iter() {
            let g = load(f.name).unwrap();
            assert_eq!(matches!(g, Game::Boxes(_)), f.kind == "boxes", "{}", f.name);
        }
        assert!(matches!(load("nope"), Err(ServiceError::UnknownFixture(_))));
    }
}
