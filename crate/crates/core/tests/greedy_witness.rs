use dots_polygons::polygon_game::Player;
use dots_polygons::solver::{check_greedy_witness, solve, GreedyWitness};
use dots_polygons::strategy::{greedy_move, TieBreak};

const PINNED: &str = include_str!("fixtures/greedy_witness.json");

#[test]
fn pinned_witness_replays() {
    let w: GreedyWitness = serde_json::from_str(PINNED).unwrap();
    let s = w.position();
    assert_eq!(s.to_move(), w.greedy_player);
    assert_eq!(greedy_move(&s, TieBreak::Lexicographic), w.greedy_choice);
    let r = solve(&s, 2_000_000);
    assert!(!r.partial);
    assert!(r.margin_for(w.greedy_player).is_positive());
    assert!(check_greedy_witness(&w, 2_000_000));
    assert_eq!(w.greedy_player, Player::B);
}
