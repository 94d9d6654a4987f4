use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rustworkx_core::petgraph::graph::UnGraph;
use rustworkx_core::planar::is_planar;
use serde::{Deserialize, Serialize};

use super::ReductionError;

pub const SAT_ORACLE_BOUND: usize = 24;

/// A 3-CNF formula. Literals are signed 1-based variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CnfInstance {
    pub n_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfInstance {
    /// Clauses shorter than three literals are padded by repeating their
    /// last literal.
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, ReductionError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(ReductionError::InvalidCnf(format!(
                    "clause {} has {} literals",
                    i + 1,
                    c.len()
                )));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > n_vars {
                    return Err(ReductionError::InvalidCnf(format!(
                        "clause {} uses undeclared literal {}",
                        i + 1,
                        l
                    )));
                }
            }
            let last = *c.last().unwrap();
            out.push([c[0], *c.get(1).unwrap_or(&last), *c.get(2).unwrap_or(&last)]);
        }
        Ok(CnfInstance { n_vars, clauses: out })
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        CnfInstance::new(self.n_vars, self.clauses.iter().map(|c| c.to_vec()).collect()).map(|_| ())
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = assignment[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }

    /// Exhaustive search over all assignments.
    pub fn satisfying_assignment(&self) -> Result<Option<Vec<bool>>, ReductionError> {
        if self.n_vars > SAT_ORACLE_BOUND {
            return Err(ReductionError::TooLarge {
                what: "variable count",
                size: self.n_vars,
                bound: SAT_ORACLE_BOUND,
            });
        }
        let mut a = vec![false; self.n_vars];
        for mask in 0u64..(1u64 << self.n_vars) {
            for (i, slot) in a.iter_mut().enumerate() {
                *slot = mask >> i & 1 == 1;
            }
            if self.evaluate(&a) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    pub fn sat_oracle(&self) -> Result<bool, ReductionError> {
        Ok(self.satisfying_assignment()?.is_some())
    }

    /// Independent check by DPLL with unit propagation.
    pub fn dpll(&self) -> bool {
        let clauses: Vec<Vec<i32>> = self.clauses.iter().map(|c| c.to_vec()).collect();
        dpll_rec(clauses)
    }

    /// Occurrences `(clause, slot)` of each variable, positive and negative.
    pub fn occurrences(&self, var: usize) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for (ci, c) in self.clauses.iter().enumerate() {
            for (k, &l) in c.iter().enumerate() {
                if l.unsigned_abs() as usize == var {
                    out.push((ci, k, l > 0));
                }
            }
        }
        out
    }

    /// Planarity of the variable-clause incidence graph.
    pub fn incidence_planar(&self) -> bool {
        let mut g = UnGraph::<(), ()>::new_undirected();
        let vars: Vec<_> = (0..self.n_vars).map(|_| g.add_node(())).collect();
        let cls: Vec<_> = (0..self.clauses.len()).map(|_| g.add_node(())).collect();
        for (ci, c) in self.clauses.iter().enumerate() {
            for &l in c {
                let v = vars[l.unsigned_abs() as usize - 1];
                if g.find_edge(v, cls[ci]).is_none() {
                    g.add_edge(v, cls[ci], ());
                }
            }
        }
        is_planar(&g)
    }

    pub fn random<R: Rng>(n_vars: usize, n_clauses: usize, rng: &mut R) -> Self {
        let clauses = (0..n_clauses)
            .map(|_| {
                let mut c = [0i32; 3];
                for l in c.iter_mut() {
                    let v = rng.gen_range(1..=n_vars) as i32;
                    *l = if rng.gen_bool(0.5) { v } else { -v };
                }
                c
            })
            .collect();
        CnfInstance { n_vars, clauses }
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

fn dpll_rec(mut clauses: Vec<Vec<i32>>) -> bool {
    loop {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        match clauses.iter().find(|c| c.len() == 1) {
            Some(unit) => {
                let l = unit[0];
                clauses = assign(&clauses, l);
            }
            None => break,
        }
    }
    let l = clauses[0][0];
    dpll_rec(assign(&clauses, l)) || dpll_rec(assign(&clauses, -l))
}

fn assign(clauses: &[Vec<i32>], l: i32) -> Vec<Vec<i32>> {
    clauses
        .iter()
        .filter(|c| !c.contains(&l))
        .map(|c| {
            let mut c: Vec<i32> = c.iter().copied().filter(|&x| x != -l).collect();
            c.dedup();
            c
        })
        .collect()
}

impl fmt::Display for CnfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.n_vars, self.clauses.len())?;
        for c in &self.clauses {
            writeln!(f, "{} {} {} 0", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// DIMACS text. Comment lines start with `c`; clauses may span lines and
/// end with `0`.
impl FromStr for CnfInstance {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| ReductionError::InvalidCnf(m);
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(bad(format!("bad header `{line}`")));
                }
                let n = parts[2].parse().map_err(|_| bad(format!("bad variable count `{}`", parts[2])))?;
                let m = parts[3].parse().map_err(|_| bad(format!("bad clause count `{}`", parts[3])))?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(bad("clause before header".into()));
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| bad(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else {
                    cur.push(l);
                }
            }
        }
        if !cur.is_empty() {
            clauses.push(cur);
        }
        let (n, m) = header.ok_or_else(|| bad("missing `p cnf` header".into()))?;
        if clauses.len() != m {
            return Err(bad(format!("header declares {m} clauses, found {}", clauses.len())));
        }
        CnfInstance::new(n, clauses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimacs_round_trip_and_padding() {
        let c: CnfInstance = "c demo\np cnf 3 2\n1 -2 0\n3 2\n-1 0\n".parse().unwrap();
        assert_eq!(c.clauses, vec![[1, -2, -2], [3, 2, -1]]);
        let back: CnfInstance = c.to_dimacs().parse().unwrap();
        assert_eq!(back, c);
        assert!("p cnf 1 1\n2 0\n".parse::<CnfInstance>().is_err());
        assert!("1 2 3 0\n".parse::<CnfInstance>().is_err());
    }

    #[test]
    fn oracle_examples() {
        let one = CnfInstance::new(1, vec![vec![1, 1, 1]]).unwrap();
        assert!(one.sat_oracle().unwrap());
        let contra = CnfInstance::new(1, vec![vec![1, 1, 1], vec![-1, -1, -1]]).unwrap();
        assert!(!contra.sat_oracle().unwrap());
        assert!(!contra.dpll());
        let big = CnfInstance { n_vars: 25, clauses: vec![[1, 2, 3]] };
        assert!(big.sat_oracle().is_err());
    }

    #[test]
    fn dpll_agrees_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = CnfInstance::random(8, rng.gen_range(10..45), &mut rng);
            assert_eq!(c.sat_oracle().unwrap(), c.dpll(), "{c}");
        }
    }
}
