use dots_service::{CreateConfig, Service};
use proptest::prelude::*;
use serde_json::json;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn log_replays_to_served_state(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..10), boxes in any::<bool>()) {
        let svc = Service::default();
        let cfg = if boxes {
            json!({"kind": "boxes", "board": {"width": 2, "height": 2}, "aiSide": "R"})
        } else {
            json!({"fixture": "hexagon", "aiSide": "B", "aiPolicy": "solver-capped", "aiBudget": 5000})
        };
        let cfg: CreateConfig = serde_json::from_value(cfg).unwrap();
        let id = svc.create(&cfg).unwrap().session.id;
        for pick in picks {
            let view = svc.get(&id).unwrap();
            if view.game_over {
                break;
            }
            let legal = view.session.game.legal_moves();
            svc.post_move(&id, legal[pick.index(legal.len())], None).unwrap();
        }
        let view = svc.get(&id).unwrap();
        let replayed = serde_json::to_value(view.session.replay().unwrap()).unwrap();
        prop_assert_eq!(replayed, serde_json::to_value(&view.session.game).unwrap());
        for e in &view.session.move_log {
            if e.by_ai {
                prop_assert_eq!(Some(e.player), view.session.ai_side);
            }
        }
    }
}
