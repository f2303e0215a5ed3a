//! Weighted clique-or-anti-pair extraction in line graphs.
//!
//! Given a multigraph H with a probability measure on its edges (equivalently
//! a vertex measure on the line graph), produce either a clique of mass at
//! least 3/14 or an anti-adjacent pair with both sides above 1/14, exactly.

use crate::bits::VertexSet;
use crate::graph::{line_graph, Multigraph};
use crate::measure::{rat, rat_string, Measure, Rat};
use crate::oracle::{PairKind, PairWitness};
use crate::{Error, Result};
use num_traits::Zero;
use serde::Serialize;

/// The threshold constant: anti-pair sides exceed it, cliques reach 3x it.
pub fn delta_line() -> Rat {
    rat(1, 14)
}

/// A bipartition of the vertices of a multigraph together with the measure
/// of the crossing edges.
#[derive(Clone, Debug, Serialize)]
pub struct Bipartition {
    pub left: VertexSet,
    pub right: VertexSet,
    #[serde(serialize_with = "crate::witness::ser_rat")]
    pub cut_weight: Rat,
}

impl Bipartition {
    pub fn recompute_cut(&self, h: &Multigraph, mu: &Measure) -> Rat {
        h.edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| {
                self.left.contains(u) && self.right.contains(v)
                    || self.left.contains(v) && self.right.contains(u)
            })
            .map(|(i, _)| mu.weight(i))
            .sum()
    }
}

/// Deterministic local-search max-cut: flip any vertex whose side switch
/// strictly increases the cut weight (lowest index first). At a local optimum
/// every vertex has at least half of its incident weight across the cut, so
/// the cut weight is at least 1/2.
pub fn half_cut(h: &Multigraph, mu: &Measure) -> Result<Bipartition> {
    if mu.len() != h.edge_count() {
        return Err(Error::Precondition(format!(
            "measure on {} elements, multigraph has {} edges",
            mu.len(),
            h.edge_count()
        )));
    }
    let n = h.n();
    let mut side = vec![false; n]; // false = right, true = left
    let gain = |side: &[bool], v: usize| -> Rat {
        let mut same = Rat::zero();
        let mut cross = Rat::zero();
        for (i, &(a, b)) in h.edges().iter().enumerate() {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if side[other] == side[v] {
                same += mu.weight(i);
            } else {
                cross += mu.weight(i);
            }
        }
        same - cross
    };
    loop {
        let mut improved = false;
        for v in 0..n {
            if gain(&side, v) > Rat::zero() {
                side[v] = !side[v];
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let left = VertexSet::from_iter(n, (0..n).filter(|&v| side[v]));
    let right = left.complement();
    let bp = Bipartition {
        cut_weight: Rat::zero(),
        left,
        right,
    };
    let w = bp.recompute_cut(h, mu);
    if w < rat(1, 2) {
        return Err(Error::Invariant(format!(
            "local-search cut weight {} below 1/2",
            rat_string(&w)
        )));
    }
    Ok(Bipartition { cut_weight: w, ..bp })
}

/// Outcome of [`line_graph_pair`]: vertex sets live in the line graph of the
/// input (vertex i = edge i of the multigraph).
#[derive(Clone, Debug, Serialize)]
pub enum LinePairOutcome {
    /// Clique of mass >= 3/14.
    Clique(VertexSet),
    /// Anti-adjacent pair, both sides > 1/14.
    AntiPair(PairWitness),
}

/// Weighted clique-or-anti-pair in the line graph of `h`.
///
/// Mirrors the underlying argument step by step: take a cut of weight at
/// least 1/2, keep only crossing edges, look for a heavy star (a clique in
/// the line graph), otherwise split both sides into near-halves by greedy
/// prefix accumulation and pick two anti-adjacent quadrants.
pub fn line_graph_pair(h: &Multigraph, mu: &Measure) -> Result<LinePairOutcome> {
    let m = h.edge_count();
    if m == 0 {
        return Err(Error::Precondition("edgeless multigraph".into()));
    }
    if mu.len() != m {
        return Err(Error::Precondition("measure length must match edge count".into()));
    }
    let d1 = delta_line();
    let three_d1 = rat(3, 14);
    let bp = half_cut(h, mu)?;
    let w = bp.cut_weight;

    // f(v): total mass of crossing edges at v.
    let crossing: Vec<bool> = h
        .edges()
        .iter()
        .map(|&(u, v)| bp.left.contains(u) != bp.left.contains(v))
        .collect();
    let mut f = vec![Rat::zero(); h.n()];
    for (i, &(u, v)) in h.edges().iter().enumerate() {
        if crossing[i] {
            f[u] += mu.weight(i);
            f[v] += mu.weight(i);
        }
    }

    // A vertex with f(v) >= 3*delta1 yields a star clique in the line graph.
    if let Some(v) = (0..h.n()).find(|&v| f[v] >= three_d1) {
        let star = VertexSet::from_iter(
            m,
            h.edges()
                .iter()
                .enumerate()
                .filter(|&(i, &(a, b))| crossing[i] && (a == v || b == v))
                .map(|(i, _)| i),
        );
        let lg = line_graph(h)?;
        if !lg.is_clique(&star) {
            return Err(Error::Invariant("star is not a clique in the line graph".into()));
        }
        debug_assert!(mu.mass(&star) >= three_d1);
        return Ok(LinePairOutcome::Clique(star));
    }

    // Greedy prefix split of each side into two near-halves of f-mass,
    // descending f then index order; target the open interval
    // (w/2 - 3*delta1/2, w/2 + 3*delta1/2).
    let lo = w / rat(2, 1) - rat(3, 2) * d1;
    let split = |side: &VertexSet| -> (VertexSet, VertexSet) {
        let mut verts: Vec<usize> = side.iter().collect();
        verts.sort_by(|&a, &b| f[b].cmp(&f[a]).then(a.cmp(&b)));
        let mut first = VertexSet::new(h.n());
        let mut acc = Rat::zero();
        let mut it = verts.iter();
        for &v in it.by_ref() {
            first.insert(v);
            acc += f[v];
            if acc > lo {
                break;
            }
        }
        let mut second = VertexSet::new(h.n());
        for &v in it {
            second.insert(v);
        }
        (first, second)
    };
    let (l1, l2) = split(&bp.left);
    let (r1, r2) = split(&bp.right);
    for (name, part) in [("L1", &l1), ("L2", &l2), ("R1", &r1), ("R2", &r2)] {
        let fm: Rat = part.iter().map(|v| f[v]).sum();
        if fm <= lo {
            return Err(Error::Invariant(format!(
                "prefix split failed: f({name}) = {} not above {}",
                rat_string(&fm),
                rat_string(&lo)
            )));
        }
    }

    // Quadrant edge sets.
    let quadrant = |ls: &VertexSet, rs: &VertexSet| -> VertexSet {
        VertexSet::from_iter(
            m,
            h.edges().iter().enumerate().filter_map(|(i, &(a, b))| {
                if !crossing[i] {
                    return None;
                }
                let hit = ls.contains(a) && rs.contains(b) || ls.contains(b) && rs.contains(a);
                hit.then_some(i)
            }),
        )
    };
    let e11 = quadrant(&l1, &r1);
    let e12 = quadrant(&l1, &r2);
    let e21 = quadrant(&l2, &r1);
    let e22 = quadrant(&l2, &r2);
    let (m12, m21) = (mu.mass(&e12), mu.mass(&e21));

    // Opposite quadrants share no multigraph endpoint, hence are
    // anti-adjacent in the line graph.
    let (p, q) = if m12 <= d1 || m21 <= d1 {
        (e11, e22)
    } else {
        (e12, e21)
    };
    let witness = PairWitness::new(PairKind::AntiAdjacent, p, q);
    let lg = line_graph(h)?;
    witness.validate(&lg)?;
    let (pm, qm) = (mu.mass(&witness.p), mu.mass(&witness.q));
    if pm <= d1 || qm <= d1 {
        return Err(Error::Invariant(format!(
            "anti-pair masses {} and {} do not exceed 1/14",
            rat_string(&pm),
            rat_string(&qm)
        )));
    }
    Ok(LinePairOutcome::AntiPair(witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(k: usize) -> Multigraph {
        let mut h = Multigraph::new(k + 1);
        for leaf in 1..=k {
            h.add_edge(0, leaf).unwrap();
        }
        h
    }

    #[test]
    fn half_cut_single_edge() {
        let h = Multigraph::from_edges(2, &[(0, 1)]).unwrap();
        let bp = half_cut(&h, &Measure::uniform(1)).unwrap();
        assert_eq!(bp.cut_weight, rat(1, 1));
    }

    #[test]
    fn half_cut_star() {
        let h = star(4);
        let bp = half_cut(&h, &Measure::uniform(4)).unwrap();
        assert_eq!(bp.cut_weight, rat(1, 1));
    }

    #[test]
    fn half_cut_triangle_is_two_thirds() {
        let h = Multigraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let bp = half_cut(&h, &Measure::uniform(3)).unwrap();
        assert_eq!(bp.cut_weight, rat(2, 3));
        assert_eq!(bp.recompute_cut(&h, &Measure::uniform(3)), rat(2, 3));
    }

    #[test]
    fn star_gives_full_clique() {
        let h = star(5);
        match line_graph_pair(&h, &Measure::uniform(5)).unwrap() {
            LinePairOutcome::Clique(k) => {
                assert_eq!(Measure::uniform(5).mass(&k), rat(1, 1));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn matching_gives_anti_pair() {
        // Perfect matching on 8 edges: line graph is edgeless.
        let mut h = Multigraph::new(16);
        for i in 0..8 {
            h.add_edge(2 * i, 2 * i + 1).unwrap();
        }
        let mu = Measure::uniform(8);
        match line_graph_pair(&h, &mu).unwrap() {
            LinePairOutcome::AntiPair(w) => {
                assert!(w.min_mass(&mu) > delta_line());
                assert!(w.min_mass(&mu) >= rat(3, 8));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn thresholds_hold_on_paths() {
        for k in [5usize, 8, 11] {
            let mut h = Multigraph::new(k + 1);
            for i in 0..k {
                h.add_edge(i, i + 1).unwrap();
            }
            let mu = Measure::uniform(k);
            match line_graph_pair(&h, &mu).unwrap() {
                LinePairOutcome::Clique(c) => assert!(mu.mass(&c) >= rat(3, 14)),
                LinePairOutcome::AntiPair(w) => assert!(w.min_mass(&mu) > delta_line()),
            }
        }
    }
}
