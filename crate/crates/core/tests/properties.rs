use dots_polygons::boxes::{controlled_scores, decompose_endgame, BoxesState, EndgameDecomposition};
use dots_polygons::geometry::*;
use dots_polygons::polygon_game::{Player, PolygonGameState, Variant};
use dots_polygons::reductions::embedding::fixture;
use dots_polygons::reductions::polygons::{bell_areas, vcp_to_polygons, BellParameters};
use dots_polygons::reductions::{sat_to_vcp, CnfInstance, GadgetOptions};
use dots_polygons::solver::{random_convex_position, Solver};
use dots_polygons::strategy::{edge_weights, scoring_moves, subproblem_of_edge, subproblems};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat() -> impl Strategy<Value = Rat> {
    (-40i64..40, 1i64..6).prop_map(|(n, d)| Rat::new(n, d))
}

fn point() -> impl Strategy<Value = Point> {
    (rat(), rat()).prop_map(|(x, y)| Point::new(x, y))
}

fn playout(s: &PolygonGameState, rng: &mut ChaCha8Rng, mut visit: impl FnMut(&PolygonGameState)) -> (PolygonGameState, usize) {
    let mut s = s.clone();
    let mut turns = 1;
    while !s.is_terminal() {
        let moves = s.legal_moves();
        let (i, j) = moves[rng.gen_range(0..moves.len())];
        let before = s.to_move();
        s = s.apply_move(i, j).unwrap().0;
        visit(&s);
        if !s.is_terminal() && s.to_move() != before {
            turns += 1;
        }
    }
    (s, turns)
}

fn convex_game(n: usize, seed: u64, variant: Variant) -> PolygonGameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolygonGameState::new_game(random_convex_position(n, &mut rng), variant).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_are_normalised(n in -1000i64..1000, d in prop_oneof![-50i64..-1, 1i64..50]) {
        let r = Rat::new(n, d);
        prop_assert!(r.denom().is_positive());
        prop_assert!(num_integer::Integer::gcd(r.numer(), r.denom()) == num_bigint::BigInt::from(1) || r.is_zero());
    }

    #[test]
    fn orient_flips_with_swap(p in point(), q in point(), r in point()) {
        prop_assert_eq!(orient(&p, &q, &r).sign(), -orient(&p, &r, &q).sign());
    }

    #[test]
    fn conflict_is_symmetric(a in point(), b in point(), c in point(), d in point()) {
        prop_assume!(a != b && c != d);
        let (s, t) = (Segment::new(a, b), Segment::new(c, d));
        prop_assert_eq!(segments_conflict(&s, &t), segments_conflict(&t, &s));
    }

    #[test]
    fn reversal_negates_area(pts in prop::collection::vec(point(), 3..8)) {
        let c = PolygonCycle::new(pts);
        prop_assert_eq!(signed_area(&c.reversed()), -signed_area(&c));
    }

    #[test]
    fn hull_ignores_input_order(seed in any::<u64>(), n in 3usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..n).map(|_| Point::int(rng.gen_range(-20..20), rng.gen_range(-20..20))).collect();
        let mut shuffled = pts.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        match (convex_hull(&pts), convex_hull(&shuffled)) {
            (Ok(h1), Ok(h2)) => {
                let k = h1.len();
                prop_assert_eq!(k, h2.len());
                let start = h2.vertices.iter().position(|p| *p == h1.vertices[0]).unwrap();
                for i in 0..k {
                    prop_assert_eq!(&h1.vertices[i], &h2.vertices[(start + i) % k]);
                }
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "hull succeeded for one ordering only"),
        }
    }

    #[test]
    fn fan_triangle_centroids_are_inside(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PolygonCycle::new(random_convex_position(n, &mut rng));
        let v = &c.vertices;
        for k in 1..n - 1 {
            let third = Rat::new(1, 3);
            let g = Point::new(
                (v[0].x.clone() + v[k].x.clone() + v[k + 1].x.clone()) * third.clone(),
                (v[0].y.clone() + v[k].y.clone() + v[k + 1].y.clone()) * third,
            );
            prop_assert_eq!(point_in_polygon(&g, &c).unwrap(), Location::Inside);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convex_playouts_conserve_area_and_last_n_turns(seed in any::<u64>(), n in 3usize..9, holes in any::<bool>()) {
        let variant = if holes { Variant::Holes } else { Variant::Simple };
        let start = convex_game(n, seed, variant);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (end, turns) = playout(&start, &mut rng, |s| {
            assert!(s.validate().is_ok(), "{:?}", s.validate());
            let total = s.score(Player::R).clone() + s.score(Player::B).clone();
            assert_eq!(total, s.scored_area());
            assert!(total <= s.hull_area());
        });
        prop_assert_eq!(turns, n);
        prop_assert_eq!(end.score(Player::R).clone() + end.score(Player::B).clone(), end.hull_area());
    }

    #[test]
    fn variants_agree_in_convex_position(seed in any::<u64>(), n in 3usize..8) {
        let mut a = convex_game(n, seed, Variant::Holes);
        let mut b = convex_game(n, seed, Variant::Simple);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while !a.is_terminal() {
            prop_assert_eq!(a.legal_moves(), b.legal_moves());
            let (i, j) = a.legal_moves()[rng.gen_range(0..a.legal_moves().len())];
            a = a.apply_move(i, j).unwrap().0;
            b = b.apply_move(i, j).unwrap().0;
            prop_assert_eq!(a.score(Player::R), b.score(Player::R));
            prop_assert_eq!(a.score(Player::B), b.score(Player::B));
        }
        prop_assert!(b.is_terminal());
    }

    #[test]
    fn apply_move_is_pure(seed in any::<u64>(), n in 3usize..8) {
        let s = convex_game(n, seed, Variant::Simple);
        let (i, j) = s.legal_moves()[seed as usize % s.legal_moves().len()];
        let x = serde_json::to_string(&s.apply_move(i, j).unwrap().0).unwrap();
        let y = serde_json::to_string(&s.apply_move(i, j).unwrap().0).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn edge_weights_are_nonnegative_and_subproblems_tile(seed in any::<u64>(), n in 3usize..8, k in 0usize..6) {
        let mut s = convex_game(n, seed, Variant::Simple);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..k {
            if s.is_terminal() { break; }
            let (i, j) = s.legal_moves()[rng.gen_range(0..s.legal_moves().len())];
            s = s.apply_move(i, j).unwrap().0;
        }
        prop_assume!(!s.is_terminal());
        for w in edge_weights(&s) {
            prop_assert!(!w.weight.is_negative());
        }
        let subs = subproblems(&s);
        let open: Rat = subs.iter().map(|sp| sp.area.clone()).sum();
        prop_assert_eq!(open, s.hull_area() - s.scored_area());
        prop_assert!(subs.iter().all(|sp| sp.area.is_positive()));
    }

    #[test]
    fn weights_are_local_to_subproblems(seed in any::<u64>(), n in 4usize..8) {
        let mut s = convex_game(n, seed, Variant::Simple);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Split the hull with a chord so there are two subproblems.
        let chord = s.legal_moves().iter().copied().find(|&(i, j)| (j - i) % n > 1 && (j - i) % n < n - 1);
        let Some((i, j)) = chord else { return Ok(()); };
        s = s.apply_move(i, j).unwrap().0;
        let subs = subproblems(&s);
        prop_assume!(subs.len() >= 2 && !s.is_terminal());
        let before: Vec<_> = edge_weights(&s);
        let moves = s.legal_moves().to_vec();
        let m = moves[rng.gen_range(0..moves.len())];
        let home = subproblem_of_edge(&s, &subs, m);
        let (t, o) = s.apply_move(m.0, m.1).unwrap();
        // Chained turns reach across subproblems once a capture is open.
        prop_assume!(!o.scored.is_positive() && !t.is_terminal());
        prop_assume!(scoring_moves(&s).is_empty() && scoring_moves(&t).is_empty());
        let after = edge_weights(&t);
        for w in &before {
            if subproblem_of_edge(&s, &subs, w.edge) == home || w.edge == m {
                continue;
            }
            if let Some(a) = after.iter().find(|x| x.edge == w.edge) {
                prop_assert_eq!(&a.weight, &w.weight);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn negamax_is_antisymmetric_under_role_swap(seed in any::<u64>(), n in 3usize..6) {
        let s = convex_game(n, seed, Variant::Simple);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (i, j) = s.legal_moves()[rng.gen_range(0..s.legal_moves().len())];
        let s = s.apply_move(i, j).unwrap().0;
        let a = Solver::new(1_000_000).solve(&s);
        let b = Solver::new(1_000_000).solve(&s.swap_roles());
        prop_assert!(!a.partial && !b.partial);
        prop_assert_eq!(a.margin_for(Player::R), b.margin_for(Player::B));
    }

    #[test]
    fn memo_never_changes_the_margin(seed in any::<u64>(), n in 3usize..6) {
        let s = convex_game(n, seed, Variant::Simple);
        let a = Solver::new(1_000_000).solve(&s);
        let b = Solver::new(1_000_000).without_memo().solve(&s);
        prop_assert_eq!(a.margin, b.margin);
    }

    #[test]
    fn gadgets_are_planar_and_subcubic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nv = rng.gen_range(1..=4);
        let nc = rng.gen_range(1..=4);
        let c = CnfInstance::random(nv, nc, &mut rng);
        prop_assume!((1..=nv).all(|v| !c.occurrences(v).is_empty()) && c.incidence_planar());
        let g = sat_to_vcp(&c, GadgetOptions::default()).unwrap();
        prop_assert!(g.graph.max_degree() <= 3);
        prop_assert!(g.graph.is_planar());
    }

    #[test]
    fn bells_are_congruent_for_any_width(num in 1i64..12, den in 1i64..5) {
        let bells = BellParameters::new(Rat::new(num, den));
        prop_assert!(bells.validate().is_ok());
        let s = vcp_to_polygons(&fixture("4-cycle").unwrap(), &bells, &Rat::zero(), &Rat::zero()).unwrap();
        prop_assert!(s.validate().is_ok());
        let areas = bell_areas(&s);
        prop_assert!(areas.iter().all(|a| *a == bells.a_bell));
    }
}

proptest! {
    #[test]
    fn scores_formula_sums_to_total(s_b in -50i64..50, s_r in -50i64..50, lens in prop::collection::vec(3usize..10, 1..6), cyc in prop::collection::vec(4usize..10, 0..4)) {
        let cell = |k: usize| (k as u32, 0u32);
        let mut next = 0;
        let mut take = |len: usize| { let v: Vec<_> = (next..next + len).map(cell).collect(); next += len; v };
        let chains: Vec<_> = lens.iter().map(|&l| take(l)).collect();
        let cycles: Vec<_> = cyc.iter().map(|&l| take(l)).collect();
        let d = EndgameDecomposition::from_parts(chains, cycles);
        let (fb, fr) = controlled_scores(s_b, s_r, &d).unwrap();
        prop_assert_eq!(fb + fr, s_b + s_r + d.n_unclaimed as i64);
    }

    #[test]
    fn boxes_playouts_claim_each_cell_once(seed in any::<u64>(), w in 1u32..5, h in 1u32..5) {
        let mut s = BoxesState::new(w, h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut claimed = 0;
        while !s.is_terminal() {
            let moves = s.legal_moves();
            let prev = s.claimed().len();
            let (n, c, _) = s.apply(moves[rng.gen_range(0..moves.len())]).unwrap();
            prop_assert_eq!(n.claimed().len(), prev + c as usize);
            prop_assert_eq!(n.score(Player::R) + n.score(Player::B), n.claimed().len() as i64);
            claimed += c;
            s = n;
        }
        prop_assert_eq!(claimed, w * h);
    }
}

#[test]
fn decomposition_partitions_fixture_boards() {
    use dots_polygons::reductions::to_boxes::vcp_to_boxes;
    for name in ["chain6", "ring4-chain6", "ring8-chain6", "chains-4-5", "4-cycle"] {
        let s = vcp_to_boxes(&fixture(name).unwrap(), 0, 0).unwrap();
        let d = decompose_endgame(&s).unwrap();
        let mut seen: Vec<_> = d.chains.iter().chain(d.cycles.iter()).flatten().copied().collect();
        let total = seen.len();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), total, "{name}: a cell appears twice");
        let mut open = s.unclaimed_cells();
        open.sort();
        assert_eq!(seen, open, "{name}");
        assert_eq!(d.n_unclaimed, total);
    }
}
