//! Maximum vertex-disjoint cycle packing.
//!
//! `max_cycle_packing` is a frontier dynamic program over a greedy vertex
//! order (the state records, for every frontier vertex, whether it is free,
//! saturated, or the end of an open path together with its partner end).
//! `vcp_oracle` is an independent certifier for small graphs: it enumerates
//! every simple cycle and runs a branch-and-bound set packing.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::{Graph, ReductionError};

pub const VCP_ORACLE_BOUND: usize = 60;
const ORACLE_CYCLE_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub size: usize,
    /// Each cycle as a closed vertex walk without the repeated endpoint.
    pub cycles: Vec<Vec<usize>>,
}

/// True iff every listed cycle is a cycle of `g` and no two share a vertex.
pub fn verify_packing(g: &Graph, cycles: &[Vec<usize>]) -> bool {
    let mut used = vec![false; g.vertices];
    for c in cycles {
        if c.len() < 3 {
            return false;
        }
        for (i, &v) in c.iter().enumerate() {
            if v >= g.vertices || used[v] || !g.has_edge(v, c[(i + 1) % c.len()]) {
                return false;
            }
            used[v] = true;
        }
    }
    true
}

struct Link {
    edge: usize,
    prev: Option<Rc<Link>>,
}

/// Greedy order from `start`: repeatedly place the vertex that keeps the
/// frontier smallest, preferring neighbours of long-waiting frontier
/// vertices.
fn greedy_order(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let n = adj.len();
    let mut placed = vec![false; n];
    let mut placed_at = vec![usize::MAX; n];
    let mut unplaced_nb: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut next_start = start;
    while order.len() < n {
        let mut best: Option<((usize, usize, usize), usize)> = None;
        for &f in &order {
            if unplaced_nb[f] == 0 {
                continue;
            }
            for &v in &adj[f] {
                if placed[v] {
                    continue;
                }
                let closes: usize = adj[v].iter().filter(|&&w| placed[w] && unplaced_nb[w] == 1).count();
                let enters = usize::from(adj[v].iter().any(|&w| !placed[w]));
                let oldest = adj[v].iter().filter(|&&w| placed[w]).map(|&w| placed_at[w]).min().unwrap();
                let key = (enters + 8 - closes, oldest, v);
                if best.map_or(true, |(k, _)| key < k) {
                    best = Some((key, v));
                }
            }
        }
        let v = match best {
            Some((_, v)) => v,
            None => {
                while placed[next_start] {
                    next_start = (next_start + 1) % n;
                }
                next_start
            }
        };
        placed[v] = true;
        placed_at[v] = order.len();
        for &w in &adj[v] {
            unplaced_nb[w] -= 1;
        }
        order.push(v);
    }
    order
}

fn max_frontier(adj: &[Vec<usize>], order: &[usize]) -> usize {
    let mut pos = vec![0usize; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut delta = vec![0i64; order.len() + 1];
    for (v, nb) in adj.iter().enumerate() {
        let last = nb.iter().map(|&w| pos[w]).max().unwrap_or(0);
        if last > pos[v] {
            delta[pos[v]] += 1;
            delta[last] -= 1;
        }
    }
    let mut live = 0i64;
    let mut worst = 0i64;
    for d in delta {
        live += d;
        worst = worst.max(live);
    }
    worst as usize
}

/// Best greedy order over all start vertices, by maximum frontier size.
fn vertex_order(g: &Graph, adj: &[Vec<usize>]) -> Vec<usize> {
    (0..g.vertices.max(1))
        .filter(|&s| s < g.vertices)
        .map(|s| greedy_order(adj, s))
        .min_by_key(|o| max_frontier(adj, o))
        .unwrap_or_default()
}

/// Exact maximum packing by frontier dynamic programming. Fast on the
/// long, thin graphs produced by the gadget construction.
pub fn max_cycle_packing(g: &Graph) -> Packing {
    let adj = g.adjacency();
    let order = vertex_order(g, &adj);
    let mut pos = vec![0usize; g.vertices];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, &[a, b]) in g.edges.iter().enumerate() {
        edge_ids.insert((a.min(b), a.max(b)), i);
    }
    let mut seq: Vec<(usize, usize, usize)> = Vec::with_capacity(g.edges.len());
    for &v in &order {
        let mut earlier: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] < pos[v]).collect();
        earlier.sort_by_key(|&w| pos[w]);
        for w in earlier {
            seq.push((w, v, edge_ids[&(v.min(w), v.max(w))]));
        }
    }

    let mut remaining: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut frontier: Vec<usize> = Vec::new();
    let mut states: HashMap<Vec<u8>, (usize, Option<Rc<Link>>)> = HashMap::new();
    states.insert(Vec::new(), (0, None));

    for (u, v, eid) in seq {
        for x in [u, v] {
            if !frontier.contains(&x) {
                frontier.push(x);
                states = states
                    .into_iter()
                    .map(|(mut k, val)| {
                        k.push(0);
                        (k, val)
                    })
                    .collect();
            }
        }
        let i = frontier.iter().position(|&x| x == u).unwrap();
        let j = frontier.iter().position(|&x| x == v).unwrap();
        let mut next: HashMap<Vec<u8>, (usize, Option<Rc<Link>>)> = HashMap::with_capacity(states.len() * 2);
        let mut offer = |k: Vec<u8>, cnt: usize, w: Option<Rc<Link>>| match next.get_mut(&k) {
            Some(cur) if cur.0 >= cnt => {}
            Some(cur) => *cur = (cnt, w),
            None => {
                next.insert(k, (cnt, w));
            }
        };
        for (k, (cnt, w)) in states {
            let (su, sv) = (k[i], k[j]);
            if su != 1 && sv != 1 {
                let mut nk = k.clone();
                let mut ncnt = cnt;
                if su as usize == 2 + j {
                    nk[i] = 1;
                    nk[j] = 1;
                    ncnt += 1;
                } else {
                    let mu = if su == 0 { i } else { su as usize - 2 };
                    let mv = if sv == 0 { j } else { sv as usize - 2 };
                    if su != 0 {
                        nk[i] = 1;
                    }
                    if sv != 0 {
                        nk[j] = 1;
                    }
                    nk[mu] = (2 + mv) as u8;
                    nk[mv] = (2 + mu) as u8;
                }
                let link = Rc::new(Link { edge: eid, prev: w.clone() });
                offer(nk, ncnt, Some(link));
            }
            offer(k, cnt, w);
        }
        states = next;
        remaining[u] -= 1;
        remaining[v] -= 1;
        for x in [u, v] {
            if remaining[x] == 0 {
                let s = frontier.iter().position(|&y| y == x).unwrap();
                frontier.remove(s);
                states = states
                    .into_iter()
                    .filter(|(k, _)| k[s] <= 1)
                    .map(|(mut k, val)| {
                        k.remove(s);
                        for c in k.iter_mut() {
                            if *c as usize >= 2 + s + 1 {
                                *c -= 1;
                            }
                        }
                        (k, val)
                    })
                    .fold(HashMap::new(), |mut acc, (k, val)| {
                        match acc.get(&k) {
                            Some((c, _)) if *c >= val.0 => {}
                            _ => {
                                acc.insert(k, val);
                            }
                        }
                        acc
                    });
            }
        }
    }
    let (size, mut link) = states
        .into_iter()
        .filter(|(k, _)| k.iter().all(|&c| c <= 1))
        .map(|(_, v)| v)
        .max_by_key(|v| v.0)
        .unwrap_or((0, None));
    let mut chosen = Vec::new();
    while let Some(l) = link {
        chosen.push(l.edge);
        link = l.prev.clone();
    }
    let cycles = cycles_from_edges(g, &chosen);
    debug_assert_eq!(cycles.len(), size);
    Packing { size, cycles }
}

fn cycles_from_edges(g: &Graph, edges: &[usize]) -> Vec<Vec<usize>> {
    let mut nb: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edges {
        let [a, b] = g.edges[e];
        nb.entry(a).or_default().push(b);
        nb.entry(b).or_default().push(a);
    }
    let mut starts: Vec<usize> = nb.keys().copied().collect();
    starts.sort_unstable();
    let mut seen = vec![false; g.vertices];
    let mut out = Vec::new();
    for s in starts {
        if seen[s] {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let mut prev = s;
        let mut cur = nb[&s][0];
        while cur != s {
            seen[cur] = true;
            cyc.push(cur);
            let n = &nb[&cur];
            let nxt = if n[0] == prev { n[1] } else { n[0] };
            prev = cur;
            cur = nxt;
        }
        out.push(cyc);
    }
    out
}

/// Every simple cycle of `g`, each listed once starting at its smallest
/// vertex.
pub fn enumerate_cycles(g: &Graph, limit: usize) -> Result<Vec<Vec<usize>>, ReductionError> {
    let adj = g.adjacency();
    let mut out = Vec::new();
    for s in 0..g.vertices {
        let mut path = vec![s];
        let mut on = vec![false; g.vertices];
        on[s] = true;
        let mut err = false;
        dfs_cycles(&adj, s, &mut path, &mut on, &mut out, limit, &mut err);
        if err {
            return Err(ReductionError::TooLarge { what: "cycle count", size: out.len(), bound: limit });
        }
    }
    Ok(out)
}

fn dfs_cycles(
    adj: &[Vec<usize>],
    s: usize,
    path: &mut Vec<usize>,
    on: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    limit: usize,
    err: &mut bool,
) {
    let last = *path.last().unwrap();
    for &w in &adj[last] {
        if *err {
            return;
        }
        if w == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
            if out.len() > limit {
                *err = true;
            }
        } else if w > s && !on[w] {
            on[w] = true;
            path.push(w);
            dfs_cycles(adj, s, path, on, out, limit, err);
            path.pop();
            on[w] = false;
        }
    }
}

/// Exhaustive certifier: cycle enumeration plus branch and bound. Refuses
/// graphs with more than `cap` vertices (at most 64).
pub fn vcp_oracle(g: &Graph, cap: usize) -> Result<Packing, ReductionError> {
    let cap = cap.min(64);
    if g.vertices > cap {
        return Err(ReductionError::TooLarge { what: "vertex count", size: g.vertices, bound: cap });
    }
    let cycles = enumerate_cycles(g, ORACLE_CYCLE_LIMIT)?;
    let masks: Vec<u64> = cycles.iter().map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
    let mut by_vertex = vec![Vec::new(); g.vertices];
    for (i, c) in cycles.iter().enumerate() {
        for &v in c {
            by_vertex[v].push(i);
        }
    }
    for l in &mut by_vertex {
        l.sort_by_key(|&i| masks[i].count_ones());
    }
    let mut in_cycle = 0u64;
    for m in &masks {
        in_cycle |= m;
    }
    struct Bb<'a> {
        masks: &'a [u64],
        by_vertex: &'a [Vec<usize>],
        best: Vec<usize>,
        cur: Vec<usize>,
    }
    impl Bb<'_> {
        fn go(&mut self, avail: u64) {
            if self.cur.len() + (avail.count_ones() as usize) / 3 <= self.best.len() {
                return;
            }
            if avail == 0 {
                self.best = self.cur.clone();
                return;
            }
            let v = avail.trailing_zeros() as usize;
            for &c in &self.by_vertex[v] {
                let m = self.masks[c];
                if m & avail == m {
                    self.cur.push(c);
                    self.go(avail & !m);
                    self.cur.pop();
                }
            }
            self.go(avail & !(1u64 << v));
        }
    }
    let mut bb = Bb { masks: &masks, by_vertex: &by_vertex, best: Vec::new(), cur: Vec::new() };
    bb.go(in_cycle);
    let chosen: Vec<Vec<usize>> = bb.best.iter().map(|&i| cycles[i].clone()).collect();
    Ok(Packing { size: chosen.len(), cycles: chosen })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        assert_eq!(vcp_oracle(&Graph::complete(4), 60).unwrap().size, 1);
        let two = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        assert_eq!(vcp_oracle(&two, 60).unwrap().size, 2);
        assert_eq!(vcp_oracle(&Graph::ladder(4), 60).unwrap().size, 2);
        assert!(vcp_oracle(&Graph::cycle(61), 60).is_err());
    }

    #[test]
    fn frontier_dp_matches_oracle_on_shapes() {
        let shapes = [
            Graph::complete(4),
            Graph::ladder(4),
            Graph::ladder(7),
            Graph::cycle(9),
            Graph::cycle(3).disjoint_union(&Graph::cycle(3)),
            Graph::complete(4).disjoint_union(&Graph::ladder(3)),
            Graph::default(),
        ];
        for g in shapes {
            let dp = max_cycle_packing(&g);
            let or = vcp_oracle(&g, 60).unwrap();
            assert_eq!(dp.size, or.size);
            assert!(verify_packing(&g, &dp.cycles));
            assert!(verify_packing(&g, &or.cycles));
        }
    }
}
