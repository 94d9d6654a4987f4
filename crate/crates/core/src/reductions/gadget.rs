//! 3-CNF to cycle packing.
//!
//! * Variable: a closed ladder (prism ring) of `2k_v` cells. Taking every
//!   even cell encodes `true`, every odd cell `false`.
//! * Wire: a ladder of `2k_s` squares. Its first rung is an edge of a
//!   variable cell, its last rung an edge of a clause pentagon.
//! * Clause: a centre vertex with three spokes; the three pentagons around
//!   it pairwise share a spoke, so at most one of them is packed.
//!
//! A positive literal hangs off an odd cell and a negative one off an even
//! cell, so a wire can leave its clause end free exactly when its literal is
//! true. Wires are placed around each gadget following a planar rotation of
//! the variable-clause incidence graph, which keeps the output planar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::packing::{max_cycle_packing, verify_packing};
use super::{CnfInstance, Graph, ReductionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GadgetOptions {
    /// Each wire has `2 * wire_k` squares.
    pub wire_k: usize,
    /// Lower bound on `k_v`; rings grow further when a variable has many
    /// occurrences.
    pub min_variable_k: usize,
    /// Build even when the incidence graph is not planar.
    pub allow_nonplanar: bool,
}

impl Default for GadgetOptions {
    fn default() -> Self {
        GadgetOptions { wire_k: 1, min_variable_k: 2, allow_nonplanar: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Label {
    Wire { wire: usize, position: usize },
    Variable { var: usize, position: usize },
    Clause { clause: usize, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GadgetGraph {
    #[serde(flatten)]
    pub graph: Graph,
    pub labels: Vec<Label>,
    pub wire_k: usize,
    pub variable_k: Vec<usize>,
    pub total_ks: usize,
    pub total_kv: usize,
    pub m: usize,
    pub target: usize,
    pub incidence_planar: bool,
}

/// Cyclic neighbour order per vertex of a small simple graph such that the
/// rotation system is planar, found by exhaustive search.
fn planar_rotation(n: usize, adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    const LIMIT: u128 = 5_000_000;
    let mut total: u128 = 1;
    for l in adj {
        for k in 2..l.len() {
            total = total.saturating_mul(k as u128);
        }
    }
    if total > LIMIT {
        return None;
    }
    let edges: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    let active = adj.iter().filter(|l| !l.is_empty()).count();
    let comps = {
        let mut seen = vec![false; n];
        let mut c = 0;
        for s in 0..n {
            if seen[s] || adj[s].is_empty() {
                continue;
            }
            c += 1;
            let mut st = vec![s];
            seen[s] = true;
            while let Some(v) = st.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        st.push(w);
                    }
                }
            }
        }
        c
    };
    let want_faces = 2 * comps + edges - active;
    let mut rot: Vec<Vec<usize>> = adj.to_vec();
    fn faces(rot: &[Vec<usize>]) -> usize {
        let mut seen: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        let mut f = 0;
        for (u, l) in rot.iter().enumerate() {
            for &v in l {
                if seen.contains_key(&(u, v)) {
                    continue;
                }
                f += 1;
                let (mut a, mut b) = (u, v);
                while seen.insert((a, b), true).is_none() {
                    let r = &rot[b];
                    let i = r.iter().position(|&x| x == a).unwrap();
                    let c = r[(i + 1) % r.len()];
                    a = b;
                    b = c;
                }
            }
        }
        f
    }
    fn search(v: usize, rot: &mut Vec<Vec<usize>>, adj: &[Vec<usize>], want: usize) -> bool {
        if v == adj.len() {
            return faces(rot) == want;
        }
        if adj[v].len() <= 2 {
            return search(v + 1, rot, adj, want);
        }
        let first = adj[v][0];
        let mut rest: Vec<usize> = adj[v][1..].to_vec();
        permute(&mut rest, 0, &mut |p| {
            rot[v] = std::iter::once(first).chain(p.iter().copied()).collect();
            search(v + 1, rot, adj, want)
        })
    }
    fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == a.len() {
            return f(a);
        }
        for i in k..a.len() {
            a.swap(k, i);
            if permute(a, k + 1, f) {
                return true;
            }
            a.swap(k, i);
        }
        false
    }
    if search(0, &mut rot, adj, want_faces) {
        Some(rot)
    } else {
        None
    }
}

/// Cyclic order of literal occurrences around every variable and clause.
/// Occurrence ids are `3 * clause + slot`.
fn occurrence_rotation(cnf: &CnfInstance) -> (Vec<Vec<usize>>, Vec<[usize; 3]>, bool) {
    let n = cnf.n_vars;
    let m = cnf.n_clauses();
    let mut adj = vec![Vec::new(); n + m];
    let mut parallel: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ci, c) in cnf.clauses.iter().enumerate() {
        for (k, &l) in c.iter().enumerate() {
            let v = l.unsigned_abs() as usize - 1;
            let list = parallel.entry((v, n + ci)).or_default();
            if list.is_empty() {
                adj[v].push(n + ci);
                adj[n + ci].push(v);
            }
            list.push(3 * ci + k);
        }
    }
    let (rot, planar) = match planar_rotation(n + m, &adj) {
        Some(r) => (r, true),
        None => (adj.clone(), false),
    };
    let var_order = (0..n)
        .map(|v| rot[v].iter().flat_map(|&c| parallel[&(v, c)].iter().copied()).collect())
        .collect();
    let clause_order = (0..m)
        .map(|ci| {
            let seq: Vec<usize> = rot[n + ci]
                .iter()
                .flat_map(|&v| parallel[&(v, n + ci)].iter().rev().copied())
                .collect();
            [seq[0], seq[1], seq[2]]
        })
        .collect();
    (var_order, clause_order, planar)
}

pub fn sat_to_vcp(cnf: &CnfInstance, opts: GadgetOptions) -> Result<GadgetGraph, ReductionError> {
    cnf.validate()?;
    if opts.wire_k == 0 || opts.min_variable_k < 2 {
        return Err(ReductionError::InvalidCnf("wire_k must be >= 1 and min_variable_k >= 2".into()));
    }
    for v in 1..=cnf.n_vars {
        if cnf.occurrences(v).is_empty() {
            return Err(ReductionError::InvalidCnf(format!("variable {v} occurs in no clause")));
        }
    }
    let (var_order, clause_order, planar) = occurrence_rotation(cnf);
    if !planar && !opts.allow_nonplanar {
        return Err(ReductionError::NonPlanar(
            "the variable-clause incidence graph admits no planar rotation system".into(),
        ));
    }

    let mut g = Graph::default();
    let mut labels = Vec::new();
    let mut add = |g: &mut Graph, l: Label| {
        labels.push(l);
        g.add_vertex()
    };
    // Variable end (x, y) and clause end (s, t) of every occurrence.
    let mut var_end: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut clause_end: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut variable_k = Vec::with_capacity(cnf.n_vars);

    for (v, occ) in var_order.iter().enumerate() {
        let mut cell_of = BTreeMap::new();
        let mut cur = 0usize;
        for &o in occ {
            let positive = cnf.clauses[o / 3][o % 3] > 0;
            let parity = usize::from(positive);
            let idx = if cur % 2 == parity { cur } else { cur + 1 };
            cell_of.insert(idx, o);
            cur = idx + 1;
        }
        let cells = cur.max(2 * opts.min_variable_k).next_multiple_of(2);
        variable_k.push(cells / 2);
        let inner: Vec<usize> =
            (0..cells).map(|i| add(&mut g, Label::Variable { var: v, position: i })).collect();
        let outer: Vec<usize> =
            (0..cells).map(|i| add(&mut g, Label::Variable { var: v, position: i })).collect();
        for i in 0..cells {
            let j = (i + 1) % cells;
            g.add_edge(inner[i], outer[i]);
            g.add_edge(inner[i], inner[j]);
            match cell_of.get(&i) {
                Some(&o) => {
                    let x = add(&mut g, Label::Variable { var: v, position: i });
                    let y = add(&mut g, Label::Variable { var: v, position: i });
                    g.add_edge(outer[i], x);
                    g.add_edge(x, y);
                    g.add_edge(y, outer[j]);
                    var_end.insert(o, (x, y));
                }
                None => g.add_edge(outer[i], outer[j]),
            }
        }
    }

    for (ci, order) in clause_order.iter().enumerate() {
        let o = add(&mut g, Label::Clause { clause: ci, position: 0 });
        let p: Vec<usize> = (0..3).map(|j| add(&mut g, Label::Clause { clause: ci, position: 1 + j })).collect();
        for j in 0..3 {
            g.add_edge(o, p[j]);
        }
        for j in 0..3 {
            let s = add(&mut g, Label::Clause { clause: ci, position: 4 + 2 * j });
            let t = add(&mut g, Label::Clause { clause: ci, position: 5 + 2 * j });
            g.add_edge(p[j], s);
            g.add_edge(s, t);
            g.add_edge(t, p[(j + 1) % 3]);
            clause_end.insert(order[j], (s, t));
        }
    }

    let squares = 2 * opts.wire_k;
    for (&o, &(x, y)) in &var_end {
        let (s, t) = clause_end[&o];
        let mut a = vec![x];
        let mut b = vec![y];
        for i in 1..squares {
            a.push(add(&mut g, Label::Wire { wire: o, position: 2 * i }));
            b.push(add(&mut g, Label::Wire { wire: o, position: 2 * i + 1 }));
        }
        a.push(t);
        b.push(s);
        for i in 0..squares {
            g.add_edge(a[i], a[i + 1]);
            g.add_edge(b[i], b[i + 1]);
            if i > 0 {
                g.add_edge(a[i], b[i]);
            }
        }
    }

    g.validate()?;
    let m = cnf.n_clauses();
    let total_ks = 3 * m * opts.wire_k;
    let total_kv: usize = variable_k.iter().sum();
    Ok(GadgetGraph {
        graph: g,
        labels,
        wire_k: opts.wire_k,
        variable_k,
        total_ks,
        total_kv,
        m,
        target: total_ks + total_kv + m,
        incidence_planar: planar,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionReport {
    pub satisfiable: bool,
    pub dpll_agrees: bool,
    pub packing: usize,
    pub target: usize,
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub planar: bool,
    pub incidence_planar: bool,
    pub wire_k: usize,
    pub variable_k: Vec<usize>,
    pub witness_valid: bool,
    /// Satisfiable iff the packing reaches the target.
    pub equivalence: bool,
    /// Unsatisfiable instances fall strictly short (vacuous otherwise).
    pub strict_deficit: bool,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.dpll_agrees && self.witness_valid && self.equivalence && self.strict_deficit
    }
}

pub fn verify_reduction(cnf: &CnfInstance, opts: GadgetOptions) -> Result<ReductionReport, ReductionError> {
    let satisfiable = cnf.sat_oracle()?;
    let gg = sat_to_vcp(cnf, GadgetOptions { allow_nonplanar: true, ..opts })?;
    let p = max_cycle_packing(&gg.graph);
    let reaches = p.size >= gg.target;
    Ok(ReductionReport {
        satisfiable,
        dpll_agrees: cnf.dpll() == satisfiable,
        packing: p.size,
        target: gg.target,
        vertices: gg.graph.vertices,
        edges: gg.graph.edges.len(),
        max_degree: gg.graph.max_degree(),
        planar: gg.graph.is_planar(),
        incidence_planar: gg.incidence_planar,
        wire_k: gg.wire_k,
        variable_k: gg.variable_k.clone(),
        witness_valid: verify_packing(&gg.graph, &p.cycles) && p.cycles.len() == p.size,
        equivalence: satisfiable == reaches,
        strict_deficit: satisfiable || p.size < gg.target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, c: &[&[i32]]) -> CnfInstance {
        CnfInstance::new(n, c.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_clause_meets_target() {
        let c = cnf(3, &[&[1, 2, 3]]);
        let r = verify_reduction(&c, GadgetOptions::default()).unwrap();
        assert!(r.satisfiable && r.packing >= r.target && r.holds(), "{r:?}");
        assert!(r.planar && r.max_degree <= 3);
    }

    #[test]
    fn contradiction_falls_short() {
        let sat = cnf(1, &[&[1, 1, 1]]);
        let unsat = cnf(1, &[&[1, 1, 1], &[-1, -1, -1]]);
        let a = verify_reduction(&sat, GadgetOptions::default()).unwrap();
        let b = verify_reduction(&unsat, GadgetOptions::default()).unwrap();
        assert!(a.holds() && a.packing >= a.target, "{a:?}");
        assert!(b.holds() && b.packing < b.target, "{b:?}");
        assert!(a.planar && b.planar);
    }

    #[test]
    fn unused_variable_is_rejected() {
        assert!(sat_to_vcp(&cnf(2, &[&[1, 1, 1]]), GadgetOptions::default()).is_err());
    }
}
