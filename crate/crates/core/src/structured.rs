//! Structured pairs: sparse-to-structured extraction, heavy-vertex filtering,
//! neighborhood relations over the separator, module-core extraction, and the
//! quotient certificates, culminating in the claw-free/C5-free module theorem.

use crate::bits::VertexSet;
use crate::graph::{
    largest_component_or_split, quotient, Graph, ModulePartition, SplitOutcome,
};
use crate::measure::{parse_rat, rat, rat_string, Measure, Rat};
use crate::oracle::{self, PairKind, PairWitness};
use crate::recognition::{find_pattern, Pattern};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// A partition (A, B, S) of the vertices of a graph where A and B are
/// connected, S is the common neighborhood boundary of both, no edge joins A
/// to B, and every closed S-neighborhood is at most `eps * |S|`.
#[derive(Clone, Debug)]
pub struct StructuredPair {
    pub g: Graph,
    pub a: VertexSet,
    pub b: VertexSet,
    pub s: VertexSet,
    pub eps: Rat,
}

impl StructuredPair {
    pub fn new(g: Graph, a: VertexSet, b: VertexSet, s: VertexSet, eps: Rat) -> Result<Self> {
        let sp = StructuredPair { g, a, b, s, eps };
        sp.validate()?;
        Ok(sp)
    }

    /// Neighborhood of `v` inside A.
    pub fn na(&self, v: usize) -> VertexSet {
        self.g.nbrs(v).intersection(&self.a)
    }

    /// Neighborhood of `v` inside B.
    pub fn nb(&self, v: usize) -> VertexSet {
        self.g.nbrs(v).intersection(&self.b)
    }

    pub fn side(&self, side: Side) -> &VertexSet {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// Neighborhood of `v` inside the chosen side.
    pub fn nbhd(&self, side: Side, v: usize) -> VertexSet {
        self.g.nbrs(v).intersection(self.side(side))
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => Err(Error::Validation(v)),
            None => Ok(()),
        }
    }

    pub fn validate_at(&self, eps: Rat) -> Result<()> {
        let relaxed = StructuredPair { eps, ..self.clone() };
        relaxed.validate()
    }

    /// All violated conditions, in a fixed order. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.g.n();
        for (name, set) in [("A", &self.a), ("B", &self.b), ("S", &self.s)] {
            if set.is_empty() {
                out.push(format!("{name} is empty"));
            }
        }
        let mut union = self.a.union(&self.b);
        union.union_with(&self.s);
        if union != VertexSet::full(n)
            || !self.a.is_disjoint_from(&self.b)
            || !self.a.is_disjoint_from(&self.s)
            || !self.b.is_disjoint_from(&self.s)
        {
            out.push("A, B, S do not partition the vertex set".into());
        }
        if !self.a.is_empty() && !self.g.is_connected_within(&self.a) {
            out.push("G[A] is disconnected".into());
        }
        if !self.b.is_empty() && !self.g.is_connected_within(&self.b) {
            out.push("G[B] is disconnected".into());
        }
        for v in self.a.iter() {
            if let Some(w) = self.g.nbrs(v).intersection(&self.b).min_elem() {
                out.push(format!("edge between A and B: ({v},{w})"));
                break;
            }
        }
        if self.g.nbrs_of_set(&self.a) != self.s {
            out.push("N(A) != S".into());
        }
        if self.g.nbrs_of_set(&self.b) != self.s {
            out.push("N(B) != S".into());
        }
        let s_len = self.s.len() as i128;
        for v in 0..n {
            let closed = self.g.nbrs(v).intersection_len(&self.s) + usize::from(self.s.contains(v));
            if Rat::from_integer(closed as i128) > self.eps * Rat::from_integer(s_len) {
                out.push(format!(
                    "|N_S[{v}]| = {closed} exceeds eps*|S| = {}",
                    rat_string(&(self.eps * Rat::from_integer(s_len)))
                ));
                break;
            }
        }
        out
    }

    /// JSON fixture form: vertex count, edge list, the three index lists, eps.
    pub fn to_json(&self) -> String {
        let edges: Vec<(usize, usize)> = self.g.edges();
        serde_json::json!({
            "n": self.g.n(),
            "edges": edges,
            "a": self.a.to_vec(),
            "b": self.b.to_vec(),
            "s": self.s.to_vec(),
            "eps": rat_string(&self.eps),
        })
        .to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
            a: Vec<usize>,
            b: Vec<usize>,
            s: Vec<usize>,
            eps: String,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("structured pair json: {e}")))?;
        let g = Graph::from_edges(raw.n, &raw.edges);
        StructuredPair::new(
            g,
            VertexSet::from_iter(raw.n, raw.a),
            VertexSet::from_iter(raw.n, raw.b),
            VertexSet::from_iter(raw.n, raw.s),
            parse_rat(&raw.eps)?,
        )
    }
}

/// Which side of the pair a statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Outcome of [`sparse_to_structured`].
#[derive(Clone, Debug)]
pub enum SparseOutcome {
    /// Homogeneous pair in the input graph, both sides of size >= n/10.
    HomPair(PairWitness),
    /// A structured pair on an induced subgraph; `map` sends its vertex
    /// indices back to the input graph.
    Structured { sp: StructuredPair, map: Vec<usize> },
}

/// Extract a 10*eps-structured pair (or a homogeneous pair on a tenth of the
/// vertices) from a graph of maximum degree at most `eps * n`, `eps < 1/10`.
///
/// Deterministic: the seed vertex and every growth step take the lowest
/// available index.
pub fn sparse_to_structured(g: &Graph, eps: Rat) -> Result<SparseOutcome> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    if eps <= rat(0, 1) || eps >= rat(1, 10) {
        return Err(Error::Parameter(format!(
            "eps = {} outside (0, 1/10)",
            rat_string(&eps)
        )));
    }
    let nn = Rat::from_integer(n as i128);
    if Rat::from_integer(g.max_degree() as i128) > eps * nn {
        return Err(Error::Precondition(format!(
            "max degree {} exceeds eps*n = {}",
            g.max_degree(),
            rat_string(&(eps * nn))
        )));
    }
    let mu = Measure::uniform(n);
    let tenth = rat(1, 10);
    let ge_tenth = |s: &VertexSet| 10 * s.len() >= n;

    // Largest component, or an anti-adjacent split of the whole graph.
    let g1 = match largest_component_or_split(g, &mu, &VertexSet::full(n), tenth)? {
        SplitOutcome::AntiPair(p, q) => {
            let w = PairWitness::new(PairKind::AntiAdjacent, p, q);
            w.validate(g)?;
            return Ok(SparseOutcome::HomPair(w));
        }
        SplitOutcome::BigComponent(c) => c,
    };

    // Grow a connected A from the lowest vertex until N[A] passes n/2.
    let mut a = VertexSet::from_iter(n, [g1.min_elem().unwrap()]);
    loop {
        let closed = g.closed_nbrs_of_set(&a);
        if 2 * closed.len() > n {
            break;
        }
        let next = g
            .nbrs_of_set(&a)
            .min_elem()
            .ok_or_else(|| Error::Invariant("component exhausted before reaching n/2".into()))?;
        a.insert(next);
    }

    // B: the largest component of what remains of G1 beyond N[A].
    let rest = g1.difference(&g.closed_nbrs_of_set(&a));
    let b = if mu.mass(&rest) > rat(3, 10) {
        match largest_component_or_split(g, &mu, &rest, tenth)? {
            SplitOutcome::AntiPair(p, q) => {
                let w = PairWitness::new(PairKind::AntiAdjacent, p, q);
                w.validate(g)?;
                return Ok(SparseOutcome::HomPair(w));
            }
            SplitOutcome::BigComponent(c) => c,
        }
    } else {
        // Boundary case at desk scale: take the largest component directly.
        let comps = g.components_within(&rest);
        comps
            .into_iter()
            .max_by_key(|c| (c.len(), std::cmp::Reverse(c.min_elem().unwrap_or(usize::MAX))))
            .ok_or_else(|| Error::Invariant("nothing left beyond N[A]".into()))?
    };
    if !ge_tenth(&b) {
        return Err(Error::Invariant(format!(
            "largest residual component has {} < n/10 vertices at desk scale",
            b.len()
        )));
    }

    if ge_tenth(&a) {
        let w = PairWitness::new(PairKind::AntiAdjacent, a, b);
        w.validate(g)?;
        return Ok(SparseOutcome::HomPair(w));
    }

    let na = g.nbrs_of_set(&a);
    let stray = na.difference(&g.closed_nbrs_of_set(&b));
    if ge_tenth(&stray) {
        let w = PairWitness::new(PairKind::AntiAdjacent, b, stray);
        w.validate(g)?;
        return Ok(SparseOutcome::HomPair(w));
    }

    let s = na.intersection(&g.nbrs_of_set(&b));
    if !ge_tenth(&s) {
        return Err(Error::Invariant(format!(
            "separator has {} < n/10 vertices at desk scale",
            s.len()
        )));
    }
    let mut keep = a.union(&b);
    keep.union_with(&s);
    let (sub, map) = g.induced(&keep);
    let mut inv = vec![usize::MAX; n];
    for (i, &v) in map.iter().enumerate() {
        inv[v] = i;
    }
    let relabel = |set: &VertexSet| VertexSet::from_iter(map.len(), set.iter().map(|v| inv[v]));
    let sp = StructuredPair::new(sub, relabel(&a), relabel(&b), relabel(&s), rat(10, 1) * eps)?;
    Ok(SparseOutcome::Structured { sp, map })
}

/// Filtering mode for [`filter_heavy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterMode {
    /// Remove S-vertices adjacent to all of A (resp. all of B).
    FullAdjacency,
    /// Remove S-vertices whose side-neighborhood carries at least `threshold`
    /// of the projection measure built from the lowest-index neighbor map.
    Measure { threshold: Rat },
}

/// Result of filtering: the residual pair (reindexed), the index map back to
/// the input pair, the removed sets in input indices, and the tight epsilon
/// of the residual pair.
#[derive(Clone, Debug)]
pub struct FilterResult {
    pub sp: StructuredPair,
    pub map: Vec<usize>,
    pub removed_a: VertexSet,
    pub removed_b: VertexSet,
    pub new_eps: Rat,
    /// Whether the |removed| <= |S|/10 bounds were asserted (they are only
    /// guaranteed under the side-degree hypothesis of the averaging claim).
    pub bound_asserted: bool,
}

/// The lowest-index neighbor of `x` on the chosen side.
pub fn projection(sp: &StructuredPair, side: Side, x: usize) -> usize {
    sp.nbhd(side, x)
        .min_elem()
        .expect("every separator vertex has a neighbor on each side")
}

/// Projection measure of a side subset: the fraction of S-vertices whose
/// lowest-index side-neighbor lands in the subset (denominator `denom`).
pub fn projection_mass(sp: &StructuredPair, side: Side, subset: &VertexSet, denom: usize) -> Rat {
    let count = sp
        .s
        .iter()
        .filter(|&x| subset.contains(projection(sp, side, x)))
        .count();
    rat(count as i128, denom as i128)
}

/// Remove separator vertices that dominate a side, per mode; reindex;
/// revalidate with the tight epsilon.
pub fn filter_heavy(sp: &StructuredPair, mode: FilterMode) -> Result<FilterResult> {
    sp.validate()?;
    let s_len = sp.s.len();
    let n = sp.g.n();
    let mut removed_a = VertexSet::new(n);
    let mut removed_b = VertexSet::new(n);
    match mode {
        FilterMode::FullAdjacency => {
            for x in sp.s.iter() {
                if sp.na(x) == sp.a {
                    removed_a.insert(x);
                }
                if sp.nb(x) == sp.b {
                    removed_b.insert(x);
                }
            }
        }
        FilterMode::Measure { threshold } => {
            for x in sp.s.iter() {
                if projection_mass(sp, Side::A, &sp.na(x), s_len) >= threshold {
                    removed_a.insert(x);
                }
                if projection_mass(sp, Side::B, &sp.nb(x), s_len) >= threshold {
                    removed_b.insert(x);
                }
            }
        }
    }
    // Averaging bound: under the side-degree hypothesis each removed set is
    // at most a tenth of S.
    let hypothesis = match mode {
        FilterMode::FullAdjacency => sp
            .a
            .iter()
            .all(|p| 10 * sp.g.nbrs(p).intersection_len(&sp.s) <= s_len)
            && sp
                .b
                .iter()
                .all(|p| 10 * sp.g.nbrs(p).intersection_len(&sp.s) <= s_len),
        FilterMode::Measure { threshold } => {
            let eps = threshold / rat(10, 1);
            let bound = eps * Rat::from_integer(s_len as i128);
            sp.a
                .iter()
                .chain(sp.b.iter())
                .all(|p| Rat::from_integer(sp.g.nbrs(p).intersection_len(&sp.s) as i128) <= bound)
        }
    };
    if hypothesis {
        for (name, removed) in [("S_A", &removed_a), ("S_B", &removed_b)] {
            if 10 * removed.len() > s_len {
                return Err(Error::Invariant(format!(
                    "|{name}| = {} exceeds |S|/10 = {s_len}/10 despite the degree hypothesis",
                    removed.len()
                )));
            }
        }
    }
    let mut keep = VertexSet::full(n);
    keep.subtract(&removed_a);
    keep.subtract(&removed_b);
    let (sub, map) = sp.g.induced(&keep);
    let mut inv = vec![usize::MAX; n];
    for (i, &v) in map.iter().enumerate() {
        inv[v] = i;
    }
    let relabel = |set: &VertexSet| {
        VertexSet::from_iter(
            map.len(),
            set.iter().filter(|&v| keep.contains(v)).map(|v| inv[v]),
        )
    };
    let new_s = relabel(&sp.s);
    if new_s.is_empty() {
        return Err(Error::Validation("filtering removed the whole separator".into()));
    }
    // Tight epsilon of the residual pair.
    let s_new_len = new_s.len() as i128;
    let mut worst = rat(0, 1);
    for v in 0..sub.n() {
        let closed =
            sub.nbrs(v).intersection_len(&new_s) + usize::from(new_s.contains(v));
        worst = worst.max(rat(closed as i128, s_new_len));
    }
    let sp_new = StructuredPair::new(sub, relabel(&sp.a), relabel(&sp.b), new_s, worst)?;
    Ok(FilterResult {
        new_eps: sp_new.eps,
        sp: sp_new,
        map,
        removed_a,
        removed_b,
        bound_asserted: hypothesis,
    })
}

/// How two separator vertices' side-neighborhoods compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// Both side-neighborhoods equal.
    Equal,
    /// A-neighborhoods equal, B-neighborhoods differ.
    EqualA,
    /// B-neighborhoods equal, A-neighborhoods differ.
    EqualB,
    /// First's A-neighborhood strictly inside the second's, B strictly outside.
    SubA,
    /// First's A-neighborhood strictly outside the second's, B strictly inside.
    SupA,
    /// Both sides incomparable.
    Incomparable,
    /// None of the six patterns (mixed comparabilities).
    Mixed,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SetCmp {
    Eq,
    Lt,
    Gt,
    Inc,
}

fn cmp_sets(x: &VertexSet, y: &VertexSet) -> SetCmp {
    let sub = x.is_subset_of(y);
    let sup = y.is_subset_of(x);
    match (sub, sup) {
        (true, true) => SetCmp::Eq,
        (true, false) => SetCmp::Lt,
        (false, true) => SetCmp::Gt,
        (false, false) => SetCmp::Inc,
    }
}

/// Pairwise relation classification over the separator.
#[derive(Clone, Debug)]
pub struct RelationTable {
    verts: Vec<usize>,
    index: BTreeMap<usize, usize>,
    rel: Vec<Vec<Relation>>,
}

impl RelationTable {
    /// Relation of the ordered pair (x, y).
    pub fn get(&self, x: usize, y: usize) -> Relation {
        let (i, j) = (self.index[&x], self.index[&y]);
        if i <= j {
            self.rel[i][j]
        } else {
            match self.rel[j][i] {
                Relation::SubA => Relation::SupA,
                Relation::SupA => Relation::SubA,
                r => r,
            }
        }
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }
}

/// Classify every separator pair by comparing side-neighborhoods.
pub fn compute_relations(sp: &StructuredPair) -> Result<RelationTable> {
    sp.validate()?;
    let verts: Vec<usize> = sp.s.iter().collect();
    let nas: Vec<VertexSet> = verts.iter().map(|&v| sp.na(v)).collect();
    let nbs: Vec<VertexSet> = verts.iter().map(|&v| sp.nb(v)).collect();
    let k = verts.len();
    let mut rel = vec![vec![Relation::Equal; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let ca = cmp_sets(&nas[i], &nas[j]);
            let cb = cmp_sets(&nbs[i], &nbs[j]);
            rel[i][j] = match (ca, cb) {
                (SetCmp::Eq, SetCmp::Eq) => Relation::Equal,
                (SetCmp::Eq, _) => Relation::EqualA,
                (_, SetCmp::Eq) => Relation::EqualB,
                (SetCmp::Lt, SetCmp::Gt) => Relation::SubA,
                (SetCmp::Gt, SetCmp::Lt) => Relation::SupA,
                (SetCmp::Inc, SetCmp::Inc) => Relation::Incomparable,
                _ => Relation::Mixed,
            };
        }
    }
    let index = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Ok(RelationTable { verts, index, rel })
}

/// A violated neighborhood axiom, carrying the witnessing tuple. These drive
/// both honest error messages and the hook-construction searches.
#[derive(Clone, Debug, Serialize)]
pub enum AxiomViolation {
    /// The side-neighborhood of `x` is the whole side.
    DominatesSide { side: Side, x: usize },
    /// Nonadjacent x, y with differing other-side neighborhoods, yet an edge
    /// (p, q) runs from their common side-neighborhood to the rest of the side.
    SharedBoundaryEdge { side: Side, x: usize, y: usize, p: usize, q: usize },
    /// Nonadjacent x, y with nested side-neighborhoods, but p inside the
    /// smaller and z inside the gap are nonadjacent.
    InclusionGapNonEdge { side: Side, x: usize, y: usize, p: usize, z: usize },
    /// Adjacent x, y whose neighborhoods differ on both sides.
    EdgeDiffersBothSides { x: usize, y: usize, pa: usize, pb: usize },
}

/// Scan for violations of the four neighborhood axioms, in a fixed order:
/// side domination, shared-boundary edges along nonedges, inclusion gaps
/// along nonedges, and two-sided difference along edges.
pub fn find_axiom_violation(sp: &StructuredPair) -> Option<AxiomViolation> {
    let sverts: Vec<usize> = sp.s.iter().collect();
    for &x in &sverts {
        for side in [Side::A, Side::B] {
            if sp.nbhd(side, x) == *sp.side(side) {
                return Some(AxiomViolation::DominatesSide { side, x });
            }
        }
    }
    for (i, &x) in sverts.iter().enumerate() {
        for &y in &sverts[i + 1..] {
            if sp.g.has_edge(x, y) {
                continue;
            }
            for side in [Side::A, Side::B] {
                let other = side.other();
                if sp.nbhd(other, x) == sp.nbhd(other, y) {
                    continue;
                }
                let nx = sp.nbhd(side, x);
                let ny = sp.nbhd(side, y);
                let common = nx.intersection(&ny);
                let outside = sp.side(side).difference(&nx.union(&ny));
                if let Some((p, q)) = first_cross_edge(&sp.g, &common, &outside) {
                    return Some(AxiomViolation::SharedBoundaryEdge { side, x, y, p, q });
                }
            }
        }
    }
    for &x in &sverts {
        for &y in &sverts {
            if x == y || sp.g.has_edge(x, y) {
                continue;
            }
            for side in [Side::A, Side::B] {
                let nx = sp.nbhd(side, x);
                let ny = sp.nbhd(side, y);
                if nx.is_subset_of(&ny) && nx != ny {
                    let gap = ny.difference(&nx);
                    for p in nx.iter() {
                        if let Some(z) = gap.difference(sp.g.nbrs(p)).min_elem() {
                            return Some(AxiomViolation::InclusionGapNonEdge { side, x, y, p, z });
                        }
                    }
                }
            }
        }
    }
    for (i, &x) in sverts.iter().enumerate() {
        for &y in &sverts[i + 1..] {
            if !sp.g.has_edge(x, y) {
                continue;
            }
            for (u, v) in [(x, y), (y, x)] {
                let da = sp.na(u).difference(&sp.na(v));
                let db = sp.nb(u).difference(&sp.nb(v));
                if let (Some(pa), Some(pb)) = (da.min_elem(), db.min_elem()) {
                    return Some(AxiomViolation::EdgeDiffersBothSides { x: u, y: v, pa, pb });
                }
            }
        }
    }
    None
}

/// First edge (by scan order) between two disjoint sets.
pub fn first_cross_edge(g: &Graph, p: &VertexSet, q: &VertexSet) -> Option<(usize, usize)> {
    for u in p.iter() {
        if let Some(v) = g.nbrs(u).intersection(q).min_elem() {
            return Some((u, v));
        }
    }
    None
}

/// The module core: a quarter-size subset of the separator on which the
/// equal-neighborhood classes are modules.
#[derive(Clone, Debug)]
pub struct ModuleCore {
    pub shat: VertexSet,
    pub partition: ModulePartition,
}

/// Extract the core subset and its module partition from a pair satisfying
/// the neighborhood axioms.
///
/// Builds the inclusion digraphs over nonedges on both sides, discards
/// vertices with arcs in the offending directions (four candidate subsets;
/// the largest wins, ties by the listed order), partitions the winner by
/// equal side-neighborhoods, and asserts the edge classification and the
/// module property on every pair.
pub fn extract_module_core(sp: &StructuredPair, rel: &RelationTable) -> Result<ModuleCore> {
    if let Some(v) = find_axiom_violation(sp) {
        return Err(Error::Validation(format!("neighborhood axiom violated: {v:?}")));
    }
    let sverts: Vec<usize> = sp.s.iter().collect();
    let n = sp.g.n();
    // Inclusion arcs along nonedges: out = strictly-smaller neighborhood.
    let mut a_out = VertexSet::new(n);
    let mut a_in = VertexSet::new(n);
    let mut b_out = VertexSet::new(n);
    let mut b_in = VertexSet::new(n);
    for (i, &x) in sverts.iter().enumerate() {
        for &y in &sverts[i + 1..] {
            if sp.g.has_edge(x, y) {
                continue;
            }
            for (side, out, inc) in [
                (Side::A, &mut a_out, &mut a_in),
                (Side::B, &mut b_out, &mut b_in),
            ] {
                let nx = sp.nbhd(side, x);
                let ny = sp.nbhd(side, y);
                match cmp_sets(&nx, &ny) {
                    SetCmp::Lt => {
                        out.insert(x);
                        inc.insert(y);
                    }
                    SetCmp::Gt => {
                        out.insert(y);
                        inc.insert(x);
                    }
                    _ => {}
                }
            }
        }
    }
    // No vertex may be on both ends of an inclusion chain.
    for (side, out, inc) in [(Side::A, &a_out, &a_in), (Side::B, &b_out, &b_in)] {
        if let Some(y) = out.intersection(inc).min_elem() {
            return Err(Error::Invariant(format!(
                "inclusion chain through {y} on side {side:?}: axioms exclude three nested \
                 neighborhoods along nonedges"
            )));
        }
    }
    let candidates = [
        sp.s.difference(&a_out.union(&b_out)),
        sp.s.difference(&a_out.union(&b_in)),
        sp.s.difference(&a_in.union(&b_out)),
        sp.s.difference(&a_in.union(&b_in)),
    ];
    let shat = candidates
        .iter()
        .max_by_key(|c| c.len())
        .unwrap()
        .clone();
    if 4 * shat.len() < sp.s.len() {
        return Err(Error::Invariant(format!(
            "core subset has {} < |S|/4 = {}/4 vertices",
            shat.len(),
            sp.s.len()
        )));
    }
    // Partition by equal side-neighborhoods, parts ordered by least member.
    let mut classes: BTreeMap<(Vec<usize>, Vec<usize>), VertexSet> = BTreeMap::new();
    for x in shat.iter() {
        let key = (sp.na(x).to_vec(), sp.nb(x).to_vec());
        classes
            .entry(key)
            .or_insert_with(|| VertexSet::new(n))
            .insert(x);
    }
    let mut parts: Vec<VertexSet> = classes.into_values().collect();
    parts.sort_by_key(|p| p.min_elem());
    // Edge classification must match the relations exactly.
    let hat: Vec<usize> = shat.iter().collect();
    for (i, &x) in hat.iter().enumerate() {
        for &y in &hat[i + 1..] {
            let r = rel.get(x, y);
            if r == Relation::Equal {
                continue;
            }
            let edge = sp.g.has_edge(x, y);
            let expect_edge = matches!(
                r,
                Relation::EqualA | Relation::EqualB | Relation::SubA | Relation::SupA
            );
            let expect_nonedge = r == Relation::Incomparable;
            if edge && !expect_edge || !edge && !expect_nonedge {
                return Err(Error::Invariant(format!(
                    "pair ({x},{y}) has relation {r:?} but edge = {edge}"
                )));
            }
        }
    }
    let partition = ModulePartition { host: shat.clone(), parts };
    partition.validate(&sp.g)?;
    Ok(ModuleCore { shat, partition })
}

/// Hereditary target class for the quotient certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientTarget {
    Berge,
    ClawFreeBerge,
    /// Verified as claw-free plus diamond-free, which characterizes line
    /// graphs of triangle-free graphs.
    LineOfTriangleFree,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientCertificate {
    pub target: QuotientTarget,
    pub checks: Vec<String>,
}

/// Build the quotient of a module partition and certify it against the
/// target class. Failures carry the offending embedding.
pub fn quotient_checks(
    g: &Graph,
    parts: &ModulePartition,
    target: QuotientTarget,
) -> Result<(Graph, QuotientCertificate)> {
    let q = quotient(g, parts)?;
    let mut checks = Vec::new();
    let need_claw = matches!(
        target,
        QuotientTarget::ClawFreeBerge | QuotientTarget::LineOfTriangleFree
    );
    if need_claw {
        if let Some(e) = find_pattern(&q, Pattern::Claw)? {
            return Err(Error::Validation(format!("quotient contains a claw at {e:?}")));
        }
        checks.push("claw-free: no induced K_{1,3}".into());
    }
    match target {
        QuotientTarget::Berge | QuotientTarget::ClawFreeBerge => {
            let (ok, cert) = oracle::is_berge_small(&q)?;
            if !ok {
                return Err(Error::Validation(format!("quotient is not Berge: {cert:?}")));
            }
            checks.push("berge: no odd hole or antihole (exact enumeration)".into());
        }
        QuotientTarget::LineOfTriangleFree => {
            if let Some(e) = find_pattern(&q, Pattern::Diamond)? {
                return Err(Error::Validation(format!(
                    "quotient contains a diamond at {e:?}"
                )));
            }
            checks.push("diamond-free: no induced K_4 minus an edge".into());
            checks.push(
                "claw-free and diamond-free together certify a line graph of a \
                 triangle-free graph"
                    .into(),
            );
        }
    }
    Ok((q, QuotientCertificate { target, checks }))
}

/// Result of the claw-free / C5-free module theorem.
#[derive(Clone, Debug)]
pub struct ClawFreeCore {
    /// Core subset in the indices of the input pair's graph.
    pub shat: VertexSet,
    pub partition: ModulePartition,
    pub quotient: Graph,
    pub certificate: QuotientCertificate,
    /// Per part, an A-vertex whose neighborhood contains the whole part.
    pub anchors: Vec<usize>,
}

/// For a 1/10-structured pair whose graph is claw-free and C5-free: filter
/// dominating separator vertices, verify the neighborhood axioms, extract the
/// module core (at least a fifth of the separator), and certify the quotient
/// as a line graph of a triangle-free graph.
pub fn tech_claw_free(sp: &StructuredPair) -> Result<ClawFreeCore> {
    sp.validate_at(rat(1, 10))?;
    if let Some(e) = find_pattern(&sp.g, Pattern::Claw)? {
        return Err(Error::Precondition(format!("graph contains a claw at {e:?}")));
    }
    if let Some(e) = find_pattern(&sp.g, Pattern::C5)? {
        return Err(Error::Precondition(format!("graph contains a C5 at {e:?}")));
    }
    let fr = filter_heavy(sp, FilterMode::FullAdjacency)?;
    fr.sp.validate_at(rat(1, 8))?;
    let f = &fr.sp;

    // Claw-freeness forces side-neighborhoods of separator vertices to be
    // cliques; check it directly, naming the claw on violation.
    for x in f.s.iter() {
        for side in [Side::A, Side::B] {
            let nb = f.nbhd(side, x);
            let vs = nb.to_vec();
            for (i, &p) in vs.iter().enumerate() {
                for &q in &vs[i + 1..] {
                    if !f.g.has_edge(p, q) {
                        let z = f
                            .nbhd(side.other(), x)
                            .min_elem()
                            .expect("separator vertices see both sides");
                        return Err(Error::Invariant(format!(
                            "claw ({x}; {p}, {q}, {z}) implied by a nonedge inside a \
                             side-neighborhood"
                        )));
                    }
                }
            }
        }
    }

    let rel = compute_relations(f)?;
    let core = extract_module_core(f, &rel)?;
    if 5 * core.shat.len() < sp.s.len() {
        return Err(Error::Invariant(format!(
            "core has {} < |S|/5 = {}/5 vertices of the unfiltered separator",
            core.shat.len(),
            sp.s.len()
        )));
    }
    let (q, cert) = quotient_checks(&f.g, &core.partition, QuotientTarget::LineOfTriangleFree)?;

    // Every part sits inside the neighborhood of one of its A-anchors.
    let mut anchors = Vec::with_capacity(core.partition.parts.len());
    for part in &core.partition.parts {
        let x = part.min_elem().unwrap();
        let p = f
            .na(x)
            .min_elem()
            .ok_or_else(|| Error::Invariant(format!("part member {x} has no A-neighbor")))?;
        if !part.iter().all(|v| f.g.has_edge(p, v)) {
            return Err(Error::Invariant(format!(
                "part at {x} is not contained in the neighborhood of its anchor {p}"
            )));
        }
        anchors.push(p);
    }

    // Lift to the input pair's indices and revalidate the modules there.
    let lift = |set: &VertexSet| VertexSet::from_iter(sp.g.n(), set.iter().map(|v| fr.map[v]));
    let shat = lift(&core.shat);
    let partition = ModulePartition {
        host: shat.clone(),
        parts: core.partition.parts.iter().map(&lift).collect(),
    };
    partition.validate(&sp.g)?;
    let anchors = anchors.into_iter().map(|p| fr.map[p]).collect();
    Ok(ClawFreeCore {
        shat,
        partition,
        quotient: q,
        certificate: cert,
        anchors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A, B cliques of size m; each separator vertex x_i attached to exactly
    /// a_i and b_i. Claw-free, C5-free, 1/10-structured for m >= 10.
    pub(crate) fn matched_clique_pair(m: usize) -> StructuredPair {
        let n = 3 * m;
        let mut g = Graph::new(n);
        for u in 0..m {
            for v in u + 1..m {
                g.add_edge(u, v);
                g.add_edge(m + u, m + v);
            }
        }
        for i in 0..m {
            g.add_edge(2 * m + i, i);
            g.add_edge(2 * m + i, m + i);
        }
        StructuredPair::new(
            g,
            VertexSet::from_iter(n, 0..m),
            VertexSet::from_iter(n, m..2 * m),
            VertexSet::from_iter(n, 2 * m..3 * m),
            rat(1, 10),
        )
        .unwrap()
    }

    #[test]
    fn validator_accepts_and_rejects() {
        let sp = matched_clique_pair(10);
        assert!(sp.violations().is_empty());
        // An A-B edge breaks it.
        let mut bad = sp.clone();
        bad.g.add_edge(0, 10);
        let vs = bad.violations();
        assert!(vs.iter().any(|v| v.contains("edge between A and B")));
        // Monotone in eps.
        assert!(sp.validate_at(rat(1, 8)).is_ok());
        assert!(sp.validate_at(rat(1, 100)).is_err());
    }

    #[test]
    fn structured_json_roundtrip() {
        let sp = matched_clique_pair(10);
        let back = StructuredPair::from_json(&sp.to_json()).unwrap();
        assert_eq!(back.g, sp.g);
        assert_eq!(back.s, sp.s);
        assert_eq!(back.eps, sp.eps);
    }

    #[test]
    fn sparse_rejects_high_degree() {
        let g = crate::graph::build_named(crate::graph::NamedGraph::Clique(40)).unwrap();
        assert!(matches!(
            sparse_to_structured(&g, rat(1, 20)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sparse_two_components_single_split() {
        // Two 20-cycles: the first split fires.
        let mut g = Graph::new(40);
        for i in 0..20 {
            g.add_edge(i, (i + 1) % 20);
            g.add_edge(20 + i, 20 + (i + 1) % 20);
        }
        match sparse_to_structured(&g, rat(2, 40)).unwrap() {
            SparseOutcome::HomPair(w) => {
                assert_eq!(w.kind, PairKind::AntiAdjacent);
                assert!(10 * w.p.len() >= 40 && 10 * w.q.len() >= 40);
            }
            SparseOutcome::Structured { .. } => panic!("expected a split"),
        }
    }

    #[test]
    fn sparse_cycle_gives_hom_pair() {
        let g = crate::graph::build_named(crate::graph::NamedGraph::Cycle(100)).unwrap();
        match sparse_to_structured(&g, rat(5, 100)).unwrap() {
            SparseOutcome::HomPair(w) => {
                w.validate(&g).unwrap();
                assert!(10 * w.p.len() >= 100 && 10 * w.q.len() >= 100);
            }
            SparseOutcome::Structured { sp, .. } => {
                sp.validate().unwrap();
            }
        }
    }

    #[test]
    fn filter_full_adjacency_no_op_and_removal() {
        let sp = matched_clique_pair(10);
        let fr = filter_heavy(&sp, FilterMode::FullAdjacency).unwrap();
        assert!(fr.removed_a.is_empty() && fr.removed_b.is_empty());
        assert_eq!(fr.sp.s.len(), 10);

        // A 20-matched pair extended with one separator vertex adjacent to
        // all of A (and one B-anchor): still 1/10-structured, and the extra
        // vertex gets filtered.
        let m = 20;
        let base = matched_clique_pair(m);
        let n = 3 * m + 1;
        let mut g = Graph::new(n);
        for (u, v) in base.g.edges() {
            g.add_edge(u, v);
        }
        let star = 3 * m;
        for v in 0..m {
            g.add_edge(star, v);
        }
        g.add_edge(star, m);
        let sp2 = StructuredPair::new(
            g,
            VertexSet::from_iter(n, 0..m),
            VertexSet::from_iter(n, m..2 * m),
            VertexSet::from_iter(n, 2 * m..n),
            rat(1, 10),
        )
        .unwrap();
        let fr2 = filter_heavy(&sp2, FilterMode::FullAdjacency).unwrap();
        assert_eq!(fr2.removed_a.to_vec(), vec![star]);
        assert!(fr2.bound_asserted);
        fr2.sp.validate().unwrap();
        assert_eq!(fr2.sp.s.len(), m);
    }

    #[test]
    fn relations_on_matched_pair_are_incomparable() {
        let sp = matched_clique_pair(10);
        let rel = compute_relations(&sp).unwrap();
        let vs = rel.verts().to_vec();
        for (i, &x) in vs.iter().enumerate() {
            for &y in &vs[i + 1..] {
                assert_eq!(rel.get(x, y), Relation::Incomparable);
            }
        }
    }

    #[test]
    fn relation_classification_cases() {
        // Hand-built: N_A(x) = {a0}, N_A(y) = {a0,a1}; N_B(x) = {b0,b1},
        // N_B(y) = {b0}; x-y adjacent. Relation(x,y) should be SubA.
        let mut g = Graph::new(7);
        // A = {0,1} edge; B = {2,3} edge; S = {4,5,6}.
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        let (x, y, z) = (4, 5, 6);
        g.add_edge(x, 0);
        g.add_edge(x, 2);
        g.add_edge(x, 3);
        g.add_edge(y, 0);
        g.add_edge(y, 1);
        g.add_edge(y, 2);
        g.add_edge(x, y);
        // z keeps S large enough for eps and sees one vertex per side.
        g.add_edge(z, 1);
        g.add_edge(z, 3);
        let sp = StructuredPair::new(
            g,
            VertexSet::from_iter(7, [0, 1]),
            VertexSet::from_iter(7, [2, 3]),
            VertexSet::from_iter(7, [4, 5, 6]),
            rat(1, 1),
        )
        .unwrap();
        let rel = compute_relations(&sp).unwrap();
        assert_eq!(rel.get(x, y), Relation::SubA);
        assert_eq!(rel.get(y, x), Relation::SupA);
        // A-neighborhoods of x and z are incomparable but the B ones are
        // nested, which is none of the six patterns.
        assert_eq!(rel.get(x, z), Relation::Mixed);
        assert_eq!(rel.get(y, z), Relation::Mixed);
    }

    #[test]
    fn extract_core_on_matched_pair() {
        let sp = matched_clique_pair(12);
        let rel = compute_relations(&sp).unwrap();
        let core = extract_module_core(&sp, &rel).unwrap();
        assert_eq!(core.shat, sp.s);
        assert_eq!(core.partition.parts.len(), 12);
        let (q, _cert) =
            quotient_checks(&sp.g, &core.partition, QuotientTarget::LineOfTriangleFree).unwrap();
        assert_eq!(q.edge_count(), 0);
    }

    #[test]
    fn extract_rejects_inclusion_chains() {
        // S vertices with nested A-neighborhoods along nonedges violate the
        // axioms (the inclusion gap is non-adjacent by construction).
        let mut g = Graph::new(9);
        // A = path 0-1-2 (connected), B = single edge 3-4? B needs >= 1.
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 4);
        // x sees {0}; y sees {0,1}; z sees {0,1,2}; all see b=3; no S edges.
        for (s, nbrs) in [(5, vec![0]), (6, vec![0, 1]), (7, vec![0, 1, 2])] {
            for v in nbrs {
                g.add_edge(s, v);
            }
            g.add_edge(s, 3);
        }
        g.add_edge(8, 2);
        g.add_edge(8, 4);
        let sp = StructuredPair::new(
            g,
            VertexSet::from_iter(9, [0, 1, 2]),
            VertexSet::from_iter(9, [3, 4]),
            VertexSet::from_iter(9, [5, 6, 7, 8]),
            rat(1, 1),
        )
        .unwrap();
        let rel = compute_relations(&sp).unwrap();
        // 0 and 2 are nonadjacent within N_A(z=7)'s chain: the axioms fail
        // before the chain check can even run.
        assert!(extract_module_core(&sp, &rel).is_err());
    }

    #[test]
    fn tech_claw_free_on_matched_pair() {
        let sp = matched_clique_pair(10);
        let core = tech_claw_free(&sp).unwrap();
        assert!(5 * core.shat.len() >= sp.s.len());
        assert_eq!(core.partition.parts.len(), 10);
        assert_eq!(core.anchors.len(), 10);
        // Quotient of singleton-ish classes over disjoint attachments is
        // edgeless, trivially claw- and diamond-free.
        assert_eq!(core.quotient.edge_count(), 0);
    }

    #[test]
    fn tech_claw_free_rejects_claws() {
        let mut sp = matched_clique_pair(10);
        // Hang two extra S-vertices off a0 with no mutual edge: claw at a0.
        // (Rebuild with two separator vertices sharing an A-anchor.)
        sp.g.add_edge(21, 0);
        assert!(tech_claw_free(&sp).is_err());
    }
}
