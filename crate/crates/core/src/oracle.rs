//! Exponential-time ground-truth oracles, used to validate every witness the
//! constructive pipelines produce. All caps are hard errors, never silent
//! truncations.

use crate::bits::VertexSet;
use crate::graph::Graph;
use crate::measure::{Measure, Rat};
use crate::{Error, Result};
use num_traits::Zero;
use serde::Serialize;

/// Cap for [`max_homogeneous_set`].
pub const MAX_HOM_SET_CAP: usize = 32;
/// Cap for [`best_homogeneous_pair`] (the scan is 2^n over one side).
pub const PAIR_CAP: usize = 24;
/// Cap on the pattern size for [`contains_induced`].
pub const INDUCED_PATTERN_CAP: usize = 12;
/// Cap for [`is_berge_small`] (subset enumeration).
pub const BERGE_CAP: usize = 16;
/// Cap for [`find_sparse_or_dense`].
pub const SPARSE_DENSE_CAP: usize = 24;

fn mask_adjacency(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.nbrs(v).iter().fold(0u64, |m, w| m | 1 << w))
        .collect()
}

fn mask_to_set(n: usize, mask: u64) -> VertexSet {
    VertexSet::from_iter(n, (0..n).filter(|&v| mask >> v & 1 == 1))
}

/// Largest clique of the mask-adjacency graph restricted to `cand`, by
/// branch and bound. Returns the best mask found that extends `cur`.
fn max_clique_rec(adj: &[u64], cur: u64, cand: u64, best: &mut u64) {
    if (cur.count_ones() + cand.count_ones()) <= best.count_ones() {
        return;
    }
    if cand == 0 {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    }
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let vbit = 1u64 << v;
        rest &= !vbit;
        if (cur.count_ones() + 1 + rest.count_ones()) <= best.count_ones() {
            return;
        }
        max_clique_rec(adj, cur | vbit, rest & adj[v], best);
    }
}

/// The largest homogeneous set (clique or independent set), with a witness.
pub fn max_homogeneous_set(g: &Graph) -> Result<(usize, VertexSet)> {
    let n = g.n();
    if n > MAX_HOM_SET_CAP {
        return Err(Error::SizeCap(format!(
            "max_homogeneous_set handles n <= {MAX_HOM_SET_CAP}, got {n}"
        )));
    }
    if n == 0 {
        return Ok((0, VertexSet::new(0)));
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let adj = mask_adjacency(g);
    let mut clique = 0u64;
    max_clique_rec(&adj, 0, full, &mut clique);
    let cadj: Vec<u64> = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();
    let mut indep = 0u64;
    max_clique_rec(&cadj, 0, full, &mut indep);
    let best = if indep.count_ones() > clique.count_ones() {
        indep
    } else {
        clique
    };
    Ok((best.count_ones() as usize, mask_to_set(n, best)))
}

/// Maximum-weight clique under nonnegative integer weights.
fn max_weight_clique_rec(adj: &[u64], w: &[u128], cur: u64, curw: u128, cand: u64, best: &mut (u64, u128)) {
    if cur != 0 && curw > best.1 {
        *best = (cur, curw);
    }
    let mut bound = curw;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        bound += w[v];
    }
    if bound <= best.1 {
        return;
    }
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let vbit = 1u64 << v;
        rest &= !vbit;
        max_weight_clique_rec(adj, w, cur | vbit, curw + w[v], rest & adj[v], best);
    }
}

/// The clique maximizing total measure. Exact; n capped as for the pair scan.
pub fn max_weight_clique(g: &Graph, mu: &Measure) -> Result<(VertexSet, Rat)> {
    let n = g.n();
    if n > PAIR_CAP {
        return Err(Error::SizeCap(format!(
            "max_weight_clique handles n <= {PAIR_CAP}, got {n}"
        )));
    }
    if n == 0 {
        return Ok((VertexSet::new(0), Rat::zero()));
    }
    let adj = mask_adjacency(g);
    let (w, _den) = mu
        .scaled_integers()
        .ok_or_else(|| Error::SizeCap("measure denominators too large to scale".into()))?;
    let mut best = (0u64, 0u128);
    let full = (1u64 << n) - 1;
    max_weight_clique_rec(&adj, &w, 0, 0, full, &mut best);
    let set = mask_to_set(n, best.0);
    let mass = mu.mass(&set);
    Ok((set, mass))
}

/// Adjacency kind of a homogeneous pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    Adjacent,
    AntiAdjacent,
}

/// A certified homogeneous pair: disjoint sets with every cross pair an edge
/// (adjacent) or none (anti-adjacent).
#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub kind: PairKind,
    pub p: VertexSet,
    pub q: VertexSet,
}

impl PairWitness {
    pub fn new(kind: PairKind, p: VertexSet, q: VertexSet) -> Self {
        PairWitness { kind, p, q }
    }

    pub fn min_mass(&self, mu: &Measure) -> Rat {
        self.p_mass(mu).min(self.q_mass(mu))
    }

    pub fn p_mass(&self, mu: &Measure) -> Rat {
        mu.mass(&self.p)
    }

    pub fn q_mass(&self, mu: &Measure) -> Rat {
        mu.mass(&self.q)
    }

    /// Full edge-scan of P x Q plus disjointness and nonemptiness.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.p.is_empty() || self.q.is_empty() {
            return Err(Error::Validation("empty side in homogeneous pair".into()));
        }
        if !self.p.is_disjoint_from(&self.q) {
            return Err(Error::Validation("pair sides overlap".into()));
        }
        let ok = match self.kind {
            PairKind::Adjacent => g.is_fully_adjacent(&self.p, &self.q),
            PairKind::AntiAdjacent => g.is_anti_adjacent(&self.p, &self.q),
        };
        if !ok {
            return Err(Error::Validation(format!(
                "pair is not {:?}: cross edges disagree",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Scan all 2^n choices of one side; the optimal anti-adjacent partner of `q`
/// is everything outside its closed neighborhood. Returns the best
/// `(min-side-weight, q-mask, partner-mask)` with ties to the earlier mask.
fn best_anti_scan(adj: &[u64], w: &[u128], n: usize) -> Option<(u128, u64, u64)> {
    let full = (1u64 << n) - 1;
    let mut best: Option<(u128, u64, u64)> = None;
    for q in 1..=full {
        let mut closed = q;
        let mut rest = q;
        let mut wq: u128 = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            closed |= adj[v];
            wq += w[v];
        }
        let p = full & !closed;
        if p == 0 {
            continue;
        }
        let mut wp: u128 = 0;
        let mut rest = p;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            wp += w[v];
        }
        let score = wq.min(wp);
        if best.as_ref().map_or(true, |b| score > b.0) {
            best = Some((score, q, p));
        }
    }
    best
}

/// The anti-adjacent pair maximizing `min(mu(P), mu(Q))`, or `None` when
/// every pair of vertices is adjacent.
pub fn best_anti_pair(g: &Graph, mu: &Measure) -> Result<Option<PairWitness>> {
    let n = g.n();
    if n > PAIR_CAP {
        return Err(Error::SizeCap(format!(
            "best_anti_pair handles n <= {PAIR_CAP}, got {n}"
        )));
    }
    if n < 2 {
        return Ok(None);
    }
    let (w, _den) = mu
        .scaled_integers()
        .ok_or_else(|| Error::SizeCap("measure denominators too large to scale".into()))?;
    let adj = mask_adjacency(g);
    match best_anti_scan(&adj, &w, n) {
        Some((_, q, p)) => {
            let witness = PairWitness::new(PairKind::AntiAdjacent, mask_to_set(n, q), mask_to_set(n, p));
            witness.validate(g)?;
            Ok(Some(witness))
        }
        None => Ok(None),
    }
}

/// The homogeneous pair maximizing `min(mu(P), mu(Q))` over both kinds.
/// Ties break toward anti-adjacent, then toward the earlier enumerated side.
pub fn best_homogeneous_pair(g: &Graph, mu: &Measure) -> Result<PairWitness> {
    let n = g.n();
    if n > PAIR_CAP {
        return Err(Error::SizeCap(format!(
            "best_homogeneous_pair handles n <= {PAIR_CAP}, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Precondition("need at least two vertices".into()));
    }
    let (w, _den) = mu
        .scaled_integers()
        .ok_or_else(|| Error::SizeCap("measure denominators too large to scale".into()))?;
    let adj = mask_adjacency(g);
    let anti = best_anti_scan(&adj, &w, n);
    let comp = g.complement();
    let cadj = mask_adjacency(&comp);
    let adjp = best_anti_scan(&cadj, &w, n);
    let (kind, q, p) = match (anti, adjp) {
        (Some(a), Some(b)) if b.0 > a.0 => (PairKind::Adjacent, b.1, b.2),
        (Some(a), _) => (PairKind::AntiAdjacent, a.1, a.2),
        (None, Some(b)) => (PairKind::Adjacent, b.1, b.2),
        (None, None) => {
            return Err(Error::Invariant("no homogeneous pair on >= 2 vertices".into()))
        }
    };
    let witness = PairWitness::new(kind, mask_to_set(n, q), mask_to_set(n, p));
    witness.validate(g)?;
    Ok(witness)
}

/// An injective vertex map pattern -> host preserving edges and non-edges.
pub fn contains_induced(g: &Graph, h: &Graph) -> Result<Option<Vec<usize>>> {
    if h.n() > INDUCED_PATTERN_CAP {
        return Err(Error::SizeCap(format!(
            "pattern of {} vertices exceeds cap {INDUCED_PATTERN_CAP}",
            h.n()
        )));
    }
    Ok(induced_embedding_uncapped(g, h))
}

/// The same backtracking embedder without the public size cap, for internal
/// callers that bound the host themselves.
pub(crate) fn induced_embedding_uncapped(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if h.n() > g.n() {
        return None;
    }
    if h.n() == 0 {
        return Some(Vec::new());
    }
    // Order pattern vertices so each (after the first) touches an earlier one
    // when possible; start from a maximum-degree vertex.
    let hn = h.n();
    let mut order: Vec<usize> = Vec::with_capacity(hn);
    let mut placed = vec![false; hn];
    let start = (0..hn).max_by_key(|&v| (h.degree(v), std::cmp::Reverse(v))).unwrap();
    order.push(start);
    placed[start] = true;
    while order.len() < hn {
        let next = (0..hn)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let attached = order.iter().filter(|&&u| h.has_edge(u, v)).count();
                (attached, h.degree(v), std::cmp::Reverse(v))
            })
            .unwrap();
        order.push(next);
        placed[next] = true;
    }
    let mut map = vec![usize::MAX; hn];
    let mut used = VertexSet::new(g.n());
    if embed(g, h, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn embed(
    g: &Graph,
    h: &Graph,
    order: &[usize],
    idx: usize,
    map: &mut Vec<usize>,
    used: &mut VertexSet,
) -> bool {
    if idx == order.len() {
        return true;
    }
    let pv = order[idx];
    'cand: for cand in 0..g.n() {
        if used.contains(cand) || g.degree(cand) < h.degree(pv) {
            continue;
        }
        for &prev in &order[..idx] {
            let want = h.has_edge(pv, prev);
            if g.has_edge(cand, map[prev]) != want {
                continue 'cand;
            }
        }
        map[pv] = cand;
        used.insert(cand);
        if embed(g, h, order, idx + 1, map, used) {
            return true;
        }
        used.remove(cand);
        map[pv] = usize::MAX;
    }
    false
}

/// Certificate for a Berge violation.
#[derive(Clone, Debug, Serialize)]
pub enum BergeCertificate {
    OddHole(Vec<usize>),
    OddAntihole(Vec<usize>),
}

/// Does `mask` induce a chordless cycle in the mask-adjacency graph?
/// Returns the cycle in walk order when it does.
fn induces_cycle(adj: &[u64], mask: u64) -> Option<Vec<usize>> {
    let k = mask.count_ones() as usize;
    if k < 3 {
        return None;
    }
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (adj[v] & mask).count_ones() != 2 {
            return None;
        }
    }
    // Degree-2 everywhere; connected iff it is a single cycle.
    let start = mask.trailing_zeros() as usize;
    let mut walk = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let nbrs = adj[cur] & mask;
        let a = nbrs.trailing_zeros() as usize;
        let b = (nbrs & !(1u64 << a)).trailing_zeros() as usize;
        let next = if a != prev { a } else { b };
        if next == start {
            break;
        }
        walk.push(next);
        prev = cur;
        cur = next;
        if walk.len() > k {
            return None;
        }
    }
    if walk.len() == k {
        Some(walk)
    } else {
        None
    }
}

/// Exact Berge test by enumerating induced odd cycles of length >= 5 in the
/// graph and its complement.
pub fn is_berge_small(g: &Graph) -> Result<(bool, Option<BergeCertificate>)> {
    let n = g.n();
    if n > BERGE_CAP {
        return Err(Error::SizeCap(format!(
            "is_berge_small handles n <= {BERGE_CAP}, got {n}"
        )));
    }
    if n < 5 {
        return Ok((true, None));
    }
    let adj = mask_adjacency(g);
    let full = (1u64 << n) - 1;
    let cadj: Vec<u64> = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();
    for mask in 0u64..=full {
        let k = mask.count_ones();
        if k < 5 || k % 2 == 0 {
            continue;
        }
        if let Some(cycle) = induces_cycle(&adj, mask) {
            return Ok((false, Some(BergeCertificate::OddHole(cycle))));
        }
        if let Some(cycle) = induces_cycle(&cadj, mask) {
            return Ok((false, Some(BergeCertificate::OddAntihole(cycle))));
        }
    }
    Ok((true, None))
}

/// Exhaustive search for an induced subgraph of size at least
/// `ceil(min_frac * n)` with edge density at most `eps` or at least `1 - eps`.
/// An honest `NotFound` is a legitimate outcome.
pub fn find_sparse_or_dense(g: &Graph, eps: Rat, min_frac: Rat) -> Result<VertexSet> {
    let n = g.n();
    if n > SPARSE_DENSE_CAP {
        return Err(Error::SizeCap(format!(
            "find_sparse_or_dense handles n <= {SPARSE_DENSE_CAP}, got {n}"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    let min_size_rat = min_frac * Rat::from_integer(n as i128);
    let min_size = min_size_rat.ceil().to_integer() as usize;
    let min_size = min_size.max(1);
    let adj = mask_adjacency(g);
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // Gray-code walk keeps the induced edge count incremental.
    let mut cur_mask: u64 = 0;
    let mut cur_edges: i64 = 0;
    // best = (is_sparse-preferred rank, size, !mask) — larger is better.
    let mut best: Option<(bool, usize, u64)> = None;
    let eps_num = *eps.numer();
    let eps_den = *eps.denom();
    for i in 1u64..=full {
        let bit = i.trailing_zeros() as usize;
        let vbit = 1u64 << bit;
        if cur_mask & vbit == 0 {
            cur_edges += (adj[bit] & cur_mask).count_ones() as i64;
            cur_mask |= vbit;
        } else {
            cur_mask &= !vbit;
            cur_edges -= (adj[bit] & cur_mask).count_ones() as i64;
        }
        let k = cur_mask.count_ones() as usize;
        if k < min_size {
            continue;
        }
        let pairs = (k * (k - 1) / 2) as i128;
        let e = cur_edges as i128;
        // density <= eps  <=>  e * den <= num * pairs
        let sparse = e * eps_den <= eps_num * pairs;
        // density >= 1 - eps  <=>  (pairs - e) * den <= num * pairs
        let dense = (pairs - e) * eps_den <= eps_num * pairs;
        if !(sparse || dense) {
            continue;
        }
        let cand = (sparse, k, !cur_mask);
        if best.as_ref().map_or(true, |b| cand > *b) {
            best = Some(cand);
        }
    }
    match best {
        Some((_, _, inv_mask)) => Ok(mask_to_set(n, !inv_mask & full)),
        None => Err(Error::NotFound(format!(
            "no subset of size >= {min_size} with density <= {} or >= 1 - it",
            crate::measure::rat_string(&eps)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};
    use crate::measure::rat;

    #[test]
    fn hom_set_small_cases() {
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        assert_eq!(max_homogeneous_set(&c5).unwrap().0, 2);
        let k6 = build_named(NamedGraph::Clique(6)).unwrap();
        let (s, w) = max_homogeneous_set(&k6).unwrap();
        assert_eq!(s, 6);
        assert!(k6.is_clique(&w));
        let p4 = build_named(NamedGraph::Path(4)).unwrap();
        assert_eq!(max_homogeneous_set(&p4).unwrap().0, 2);
    }

    #[test]
    fn pair_oracle_edgeless() {
        let g = Graph::new(6);
        let w = best_homogeneous_pair(&g, &Measure::uniform(6)).unwrap();
        assert_eq!(w.kind, PairKind::AntiAdjacent);
        assert_eq!(w.min_mass(&Measure::uniform(6)), rat(3, 6));
    }

    #[test]
    fn pair_oracle_complete_bipartite() {
        let mut g = Graph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                g.add_edge(u, v);
            }
        }
        let mu = Measure::uniform(6);
        let w = best_homogeneous_pair(&g, &mu).unwrap();
        assert_eq!(w.kind, PairKind::Adjacent);
        assert_eq!(w.min_mass(&mu), rat(1, 2));
    }

    #[test]
    fn pair_oracle_c5() {
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        let mu = Measure::uniform(5);
        let w = best_homogeneous_pair(&c5, &mu).unwrap();
        assert_eq!(w.kind, PairKind::AntiAdjacent);
        assert_eq!(w.min_mass(&mu), rat(1, 5));
        w.validate(&c5).unwrap();
    }

    #[test]
    fn induced_small_cases() {
        let p5 = build_named(NamedGraph::Path(5)).unwrap();
        let p4 = build_named(NamedGraph::Path(4)).unwrap();
        assert!(contains_induced(&p5, &p4).unwrap().is_some());
        let c4 = build_named(NamedGraph::Cycle(4)).unwrap();
        let claw = build_named(NamedGraph::Claw).unwrap();
        assert!(contains_induced(&c4, &claw).unwrap().is_none());
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        let h0 = build_named(NamedGraph::Hook(0)).unwrap();
        assert!(contains_induced(&c5, &h0).unwrap().is_some());
        // An embedding must preserve non-edges: C4 has no induced P4.
        assert!(contains_induced(&c4, &p4).unwrap().is_none());
    }

    #[test]
    fn induced_embedding_is_valid() {
        let g = build_named(NamedGraph::DoubleHook(2)).unwrap();
        let h = build_named(NamedGraph::Hook(1)).unwrap();
        let m = contains_induced(&g, &h).unwrap().expect("hook embeds");
        for u in 0..h.n() {
            for v in u + 1..h.n() {
                assert_eq!(h.has_edge(u, v), g.has_edge(m[u], m[v]));
            }
        }
    }

    #[test]
    fn berge_small_cases() {
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        let (ok, cert) = is_berge_small(&c5).unwrap();
        assert!(!ok);
        matches!(cert, Some(BergeCertificate::OddHole(_)));
        let c6 = build_named(NamedGraph::Cycle(6)).unwrap();
        assert!(is_berge_small(&c6).unwrap().0);
        let c7c = build_named(NamedGraph::Cycle(7)).unwrap().complement();
        let (ok, cert) = is_berge_small(&c7c).unwrap();
        assert!(!ok);
        assert!(matches!(cert, Some(BergeCertificate::OddAntihole(_))));
        // Bipartite graphs are Berge.
        let mut g = Graph::new(7);
        for u in 0..3 {
            for v in 3..7 {
                if (u + v) % 2 == 0 {
                    g.add_edge(u, v);
                }
            }
        }
        assert!(is_berge_small(&g).unwrap().0);
    }

    #[test]
    fn berge_complement_symmetry() {
        for kind in [NamedGraph::Cycle(5), NamedGraph::Cycle(6), NamedGraph::Path(7)] {
            let g = build_named(kind).unwrap();
            assert_eq!(
                is_berge_small(&g).unwrap().0,
                is_berge_small(&g.complement()).unwrap().0
            );
        }
    }

    #[test]
    fn sparse_or_dense_extremes() {
        let g = Graph::new(8);
        let s = find_sparse_or_dense(&g, rat(1, 10), rat(1, 2)).unwrap();
        assert_eq!(s.len(), 8);
        let k = build_named(NamedGraph::Clique(8)).unwrap();
        let s = find_sparse_or_dense(&k, rat(1, 10), rat(1, 2)).unwrap();
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn caps_are_errors() {
        let g = Graph::new(33);
        assert!(matches!(max_homogeneous_set(&g), Err(Error::SizeCap(_))));
        let g = Graph::new(25);
        assert!(matches!(
            best_homogeneous_pair(&g, &Measure::uniform(25)),
            Err(Error::SizeCap(_))
        ));
        assert!(matches!(
            find_sparse_or_dense(&g, rat(1, 10), rat(1, 2)),
            Err(Error::SizeCap(_))
        ));
        let g = Graph::new(17);
        assert!(matches!(is_berge_small(&g), Err(Error::SizeCap(_))));
        let big_pattern = Graph::new(13);
        assert!(matches!(
            contains_induced(&Graph::new(20), &big_pattern),
            Err(Error::SizeCap(_))
        ));
    }
}
