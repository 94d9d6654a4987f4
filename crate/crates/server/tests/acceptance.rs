//! Acceptance suite. Runs as a plain binary and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use dots_polygons::boxes::{boxes_minimax, controlled_scores, decompose_endgame, EndgameDecomposition, DEFAULT_MINIMAX_BOUND};
use dots_polygons::geometry::{Point, Rat};
use dots_polygons::polygon_game::{Player, PolygonGameState, Variant};
use dots_polygons::reductions::embedding::fixture;
use dots_polygons::reductions::polygons::{bell_areas, mouth_blocked, vcp_to_polygons, BellParameters};
use dots_polygons::reductions::to_boxes::vcp_to_boxes;
use dots_polygons::reductions::{sat_to_vcp, verify_reduction, CnfInstance, GadgetOptions};
use dots_polygons::solver::{
    check_greedy_witness, find_greedy_counterexample, random_convex_position, verify_last_player_theorem, GreedyWitness,
    Solver, DEFAULT_BUDGET,
};
use dots_polygons::strategy::{edge_weights, is_easy_endgame, scoring_moves, subproblem_of_edge, subproblems};
use dots_service::{CreateConfig, Move, Service, ServiceError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const PINNED_WITNESS: &str = include_str!("../../core/tests/fixtures/greedy_witness.json");

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn convex_game(n: usize, rng: &mut ChaCha8Rng, variant: Variant) -> PolygonGameState {
    PolygonGameState::new_game(random_convex_position(n, rng), variant).expect("convex position")
}

/// Plays uniformly random moves to the end; returns the final state and the
/// number of turns.
fn random_playout(mut s: PolygonGameState, rng: &mut ChaCha8Rng) -> (PolygonGameState, usize) {
    let mut turns = 1;
    while !s.is_terminal() {
        let moves = s.legal_moves();
        let (i, j) = moves[rng.gen_range(0..moves.len())];
        let before = s.to_move();
        s = s.apply_move(i, j).expect("legal move").0;
        if !s.is_terminal() && s.to_move() != before {
            turns += 1;
        }
    }
    (s, turns)
}

fn playouts() -> Vec<(usize, Variant, PolygonGameState, usize)> {
    (0..200u64)
        .map(|i| {
            let n = 3 + (i % 6) as usize;
            let variant = if (i / 6) % 2 == 0 { Variant::Simple } else { Variant::Holes };
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let s = convex_game(n, &mut rng, variant);
            let (end, turns) = random_playout(s, &mut rng);
            (n, variant, end, turns)
        })
        .collect()
}

fn turn_count(runs: &[(usize, Variant, PolygonGameState, usize)]) -> Check {
    let bad: Vec<_> = runs.iter().filter(|(n, _, _, t)| n != t).collect();
    ensure(bad.is_empty(), || format!("{} playouts miscounted, first n={} turns={}", bad.len(), bad[0].0, bad[0].3))?;
    let holes = runs.iter().filter(|r| r.1 == Variant::Holes).count();
    Ok(format!("{} playouts, n 3..8, {} holes / {} simple", runs.len(), holes, runs.len() - holes))
}

fn area_conservation(runs: &[(usize, Variant, PolygonGameState, usize)]) -> Check {
    for (n, _, s, _) in runs {
        let total = s.score(Player::R).clone() + s.score(Player::B).clone();
        ensure(total == s.hull_area(), || format!("n={n}: {total} != hull {}", s.hull_area()))?;
    }
    Ok(format!("{} terminal states, exact", runs.len()))
}

fn last_player_theorem() -> Check {
    let mut parts = Vec::new();
    for n in 3..=5 {
        let r = verify_last_player_theorem(n, 25, n as u64, Variant::Simple, DEFAULT_BUDGET);
        ensure(r.passed == r.trials, || format!("n={n}: {}/{} pass, {} partial", r.passed, r.trials, r.partial))?;
        parts.push(format!("n={n} {}/{}", r.passed, r.trials));
    }
    let r = verify_last_player_theorem(6, 5, 6, Variant::Simple, DEFAULT_BUDGET);
    ensure(r.ok(), || format!("n=6: {} failed", r.failed))?;
    parts.push(format!("n=6 {}/{} ({} partial)", r.passed, r.trials, r.partial));
    Ok(parts.join(", "))
}

fn easy_uniformity() -> Check {
    let (mut states, mut edges, mut seed) = (0, 0, 0u64);
    while states < 50 {
        seed += 1;
        ensure(seed < 5000, || format!("only {states} easy states found"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(5..=8);
        let mut s = convex_game(n, &mut rng, Variant::Simple);
        while !s.is_terminal() {
            if is_easy_endgame(&s) && scoring_moves(&s).is_empty() {
                break;
            }
            let moves = s.legal_moves();
            let (i, j) = moves[rng.gen_range(0..moves.len())];
            s = s.apply_move(i, j).expect("legal move").0;
        }
        if s.is_terminal() {
            continue;
        }
        let subs = subproblems(&s);
        for w in edge_weights(&s) {
            let k = subproblem_of_edge(&s, &subs, w.edge).ok_or_else(|| format!("seed {seed}: {:?} has no subproblem", w.edge))?;
            ensure(w.weight == subs[k].area, || format!("seed {seed}: w{:?}={} but area {}", w.edge, w.weight, subs[k].area))?;
            edges += 1;
        }
        states += 1;
    }
    Ok(format!("{states} states, {edges} edges"))
}

fn greedy_witness() -> Check {
    let pinned: GreedyWitness = serde_json::from_str(PINNED_WITNESS).map_err(|e| e.to_string())?;
    let found = find_greedy_counterexample(6, 20, 3, Variant::Simple, 2_000_000).ok_or("search found nothing")?;
    ensure(found == pinned, || "search result differs from the pinned fixture".into())?;
    ensure(check_greedy_witness(&pinned, 2_000_000), || "pinned witness no longer verifies".into())?;
    Ok(format!("greedy {:?} loses, {:?} wins for {:?}", pinned.greedy_choice, pinned.winning_move, pinned.greedy_player))
}

fn cnf_corpus() -> Vec<CnfInstance> {
    let hand = [
        (2, vec![vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2]]),
        (1, vec![vec![1], vec![-1]]),
        (2, vec![vec![1], vec![-1, 2], vec![-2]]),
        (2, vec![vec![1, 2], vec![-1], vec![-2]]),
        (3, vec![vec![1, 2], vec![-1, 3], vec![-2], vec![-3]]),
    ];
    let mut corpus: Vec<CnfInstance> = hand.into_iter().map(|(n, c)| CnfInstance::new(n, c).expect("valid")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    while corpus.len() < 40 {
        let nv = rng.gen_range(1..=4);
        let nc = rng.gen_range(1..=4);
        let c = CnfInstance::random(nv, nc, &mut rng);
        if (1..=nv).all(|v| !c.occurrences(v).is_empty()) && c.incidence_planar() {
            corpus.push(c);
        }
    }
    corpus
}

fn reduction_equivalence(corpus: &[CnfInstance]) -> Check {
    let t = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for c in corpus {
        let r = verify_reduction(c, GadgetOptions::default()).map_err(|e| e.to_string())?;
        ensure(r.holds(), || format!("{:?}: packing {} target {} sat {}", c.clauses, r.packing, r.target, r.satisfiable))?;
        if r.satisfiable {
            sat += 1
        } else {
            ensure(r.packing < r.target, || format!("{:?}: unsat reaches target", c.clauses))?;
            unsat += 1
        }
    }
    ensure(unsat > 0 && sat > 0, || format!("corpus not mixed: {sat} sat {unsat} unsat"))?;
    ensure(t.elapsed().as_secs() < 600, || format!("took {:?}", t.elapsed()))?;
    Ok(format!("{} instances ({sat} sat, {unsat} unsat) in {:.1?}", corpus.len(), t.elapsed()))
}

fn gadget_structure(corpus: &[CnfInstance]) -> Check {
    let mut biggest = 0;
    for c in corpus {
        let g = sat_to_vcp(c, GadgetOptions::default()).map_err(|e| format!("{:?}: {e}", c.clauses))?;
        ensure(g.graph.max_degree() <= 3, || format!("{:?}: degree {}", c.clauses, g.graph.max_degree()))?;
        ensure(g.graph.is_planar(), || format!("{:?}: not planar", c.clauses))?;
        biggest = biggest.max(g.graph.vertices);
    }
    Ok(format!("{} gadget graphs, up to {biggest} vertices", corpus.len()))
}

fn boxes_formula() -> Check {
    let mut checked = Vec::new();
    for name in ["chain6", "ring4-chain6", "chains-4-5", "ring8-chain6"] {
        let s = vcp_to_boxes(&fixture(name).ok_or("missing fixture")?, 0, 0).map_err(|e| e.to_string())?;
        let d = decompose_endgame(&s).map_err(|e| e.to_string())?;
        ensure(d.n_unclaimed <= 16, || format!("{name}: {} unclaimed", d.n_unclaimed))?;
        let (b_formula, r_formula) = controlled_scores(0, 0, &d).map_err(|e| e.to_string())?;
        let (m, _) = boxes_minimax(&s, DEFAULT_MINIMAX_BOUND).map_err(|e| e.to_string())?;
        let m_b = if s.to_move() == Player::B { m } else { -m };
        let n = d.n_unclaimed as i64;
        let (b, r) = ((n + m_b) / 2, (n - m_b) / 2);
        ensure((b, r) == (b_formula, r_formula), || format!("{name}: minimax {b}/{r}, formula {b_formula}/{r_formula}"))?;
        checked.push(format!("{name} {b}/{r}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let mut next = 0u32;
        let mut run = |len: u32| {
            let v: Vec<_> = (next..next + len).map(|x| (x, 0)).collect();
            next += len;
            v
        };
        let chains: Vec<_> = (0..rng.gen_range(1..6)).map(|_| run(rng.gen_range(3..12))).collect();
        let cycles: Vec<_> = (0..rng.gen_range(0..4)).map(|_| run(rng.gen_range(4..12))).collect();
        let d = EndgameDecomposition::from_parts(chains, cycles);
        let (sb, sr) = (rng.gen_range(-30..30), rng.gen_range(-30..30));
        let (fb, fr) = controlled_scores(sb, sr, &d).map_err(|e| e.to_string())?;
        ensure(fb + fr == sb + sr + d.n_unclaimed as i64, || format!("identity fails on {d:?}"))?;
    }
    Ok(format!("{}; identity on 1000 decompositions", checked.join(", ")))
}

fn bell_fixture() -> Check {
    let bells = BellParameters::default();
    let s_b = Rat::from_int(3);
    let s = vcp_to_polygons(&fixture("4-cycle").ok_or("missing fixture")?, &bells, &s_b, &Rat::zero())
        .map_err(|e| e.to_string())?;
    let areas = bell_areas(&s);
    ensure(areas.len() == 4 && areas.iter().all(|a| *a == bells.a_bell), || format!("bell areas {areas:?}"))?;
    ensure(mouth_blocked(&bells).map_err(|e| e.to_string())?, || "a sees c".into())?;
    let r = Solver::new(DEFAULT_BUDGET).solve(&s);
    ensure(!r.partial, || "solver budget exhausted".into())?;
    let mut end = s.clone();
    for &(i, j) in &r.line {
        end = end.apply_move(i, j).map_err(|e| e.to_string())?.0;
    }
    ensure(end.is_terminal(), || "principal line stops early".into())?;
    let gain = end.score(Player::B).clone() - s_b.clone();
    let want = bells.a_bell.clone() * Rat::from_int(2);
    ensure(gain == want, || format!("B gains {gain}, expected {want}"))?;
    let final_margin = end.score(Player::B).clone() - end.score(Player::R).clone();
    ensure(final_margin == r.margin_for(Player::B), || "line disagrees with the margin".into())?;
    Ok(format!("B gains {gain} = 2*{} in {} nodes", bells.a_bell, r.nodes))
}

fn service_replay() -> Check {
    let svc = Service::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut moves, mut rejected) = (0, 0);
    for k in 0..50 {
        let cfg = match k % 5 {
            0 => json!({"fixture": "hexagon-easy"}),
            1 => json!({"kind": "boxes", "board": {"width": 3, "height": 2}, "aiSide": "B"}),
            2 => json!({"fixture": "boxes-ring4-chain6"}),
            _ => {
                let n = rng.gen_range(4..=7);
                let pts: Vec<Point> = random_convex_position(n, &mut rng);
                let variant = if k % 2 == 0 { "holes" } else { "simple" };
                json!({"points": pts, "variant": variant, "aiSide": if k % 3 == 0 { Some("R") } else { None }})
            }
        };
        let cfg: CreateConfig = serde_json::from_value(cfg).map_err(|e| e.to_string())?;
        let id = svc.create(&cfg).map_err(|e| e.to_string())?.session.id;
        for _ in 0..rng.gen_range(3..12) {
            let view = svc.get(&id).map_err(|e| e.to_string())?;
            if view.game_over {
                break;
            }
            let before = serde_json::to_string(&view).map_err(|e| e.to_string())?;
            let bogus = match &view.session.game {
                dots_service::Game::Polygons(s) => Move::Edge([0, s.points().len() + 3]),
                dots_service::Game::Boxes(_) => Move::Edge([0, 1]),
            };
            let wrong = view.to_move.other();
            for (mv, who) in [(bogus, None), (view.session.game.legal_moves()[0], Some(wrong))] {
                match svc.post_move(&id, mv, who) {
                    Err(ServiceError::IllegalMove(_) | ServiceError::NotYourTurn) => rejected += 1,
                    other => return Err(format!("session {k}: bad move accepted: {:?}", other.map(|_| ())) ),
                }
                let after = serde_json::to_string(&svc.get(&id).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                ensure(before == after, || format!("session {k}: rejected move changed the state"))?;
            }
            let legal = view.session.game.legal_moves();
            let mv = legal[rng.gen_range(0..legal.len())];
            svc.post_move(&id, mv, None).map_err(|e| format!("session {k}: {e}"))?;
            moves += 1;
        }
        let view = svc.get(&id).map_err(|e| e.to_string())?;
        let replayed = view.session.replay().map_err(|e| format!("session {k}: {e}"))?;
        let served = serde_json::to_string(&view.session.game).map_err(|e| e.to_string())?;
        ensure(serde_json::to_string(&replayed).map_err(|e| e.to_string())? == served, || {
            format!("session {k}: replay differs from served state")
        })?;
    }
    Ok(format!("50 sessions, {moves} moves, {rejected} rejections left state untouched"))
}

fn main() -> ExitCode {
    let runs = playouts();
    let corpus = cnf_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("turn count equals point count", Box::new(|| turn_count(&runs))),
        ("area conservation", Box::new(|| area_conservation(&runs))),
        ("last-player theorem", Box::new(last_player_theorem)),
        ("easy-subproblem uniformity", Box::new(easy_uniformity)),
        ("greedy suboptimality witness", Box::new(greedy_witness)),
        ("sat to cycle packing equivalence", Box::new(|| reduction_equivalence(&corpus))),
        ("gadget degree and planarity", Box::new(|| gadget_structure(&corpus))),
        ("boxes control formula vs minimax", Box::new(boxes_formula)),
        ("corridor bell fixture", Box::new(bell_fixture)),
        ("service replay determinism", Box::new(service_replay)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {name}: {detail} [{:.1?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{:.1?}]", t.elapsed());
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
