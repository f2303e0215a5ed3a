//! Weighted homogeneous pairs in claw-free Berge graphs, via clique-separator
//! decomposition, the central-bag argument, and the elementary / nine-clique
//! dichotomy for bags without clique separators.

use crate::bits::VertexSet;
use crate::decomp::{central_bag, clique_separator_decomposition, CentralBagOutcome};
use crate::graph::Graph;
use crate::line_pairs::{line_graph_pair, LinePairOutcome};
use crate::lineroot::reconstruct_line_root;
use crate::measure::{rat, rat_string, Measure, Rat};
use crate::oracle::{self, PairKind, PairWitness};
use crate::recognition::{find_pattern, is_elementary, nine_clique_partition, Pattern};
use crate::{Error, Result};
use serde::Serialize;

/// Anti-pair / scaling constant for elementary graphs (cliques reach 3x it).
pub fn delta_elementary() -> Rat {
    rat(1, 28)
}

/// The guarantee of [`clawfree_berge_pair`].
pub fn delta_claw_free_berge() -> Rat {
    rat(1, 58)
}

/// Outcome of [`elementary_pair`], with the route that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct ElementaryPair {
    pub outcome: CliqueOrPair,
    /// "line-root" when a bipartite root was reconstructed and the line-graph
    /// lemma ran; "oracle" when the exhaustive fallback produced the witness.
    pub path: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub enum CliqueOrPair {
    /// Clique of mass >= 3/28.
    Clique(VertexSet),
    /// Anti-adjacent pair, both sides >= 1/28.
    AntiPair(PairWitness),
}

/// Weighted clique-or-anti-pair in an elementary graph.
///
/// First tries to realize `g` directly as the line graph of a bipartite
/// multigraph (parallel edge classes appear as true-twin cliques, which the
/// root reconstruction contracts), then runs the line-graph pair lemma on the
/// root; the root's edges correspond to `g`'s vertices one to one, so the
/// witness needs no translation. When no bipartite root exists at desk scale
/// the exhaustive oracles take over and the taken path is reported.
pub fn elementary_pair(g: &Graph, mu: &Measure) -> Result<ElementaryPair> {
    if g.n() == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    if mu.len() != g.n() {
        return Err(Error::Precondition("measure length must match vertex count".into()));
    }
    let elem = is_elementary(g);
    if !elem.is_elementary() {
        return Err(Error::Precondition(
            "input is not elementary (odd conflict cycle found)".into(),
        ));
    }
    let d2 = delta_elementary();
    let three_d2 = rat(3, 28);
    if let Some(root) = reconstruct_line_root(g, true)? {
        let outcome = match line_graph_pair(&root, mu)? {
            LinePairOutcome::Clique(k) => {
                debug_assert!(mu.mass(&k) >= three_d2);
                CliqueOrPair::Clique(k)
            }
            LinePairOutcome::AntiPair(w) => {
                debug_assert!(w.min_mass(mu) >= d2);
                CliqueOrPair::AntiPair(w)
            }
        };
        return Ok(ElementaryPair { outcome, path: "line-root" });
    }
    // Exhaustive fallback: heaviest clique, else best anti-adjacent pair.
    let (clique, mass) = oracle::max_weight_clique(g, mu)?;
    if mass >= three_d2 {
        return Ok(ElementaryPair {
            outcome: CliqueOrPair::Clique(clique),
            path: "oracle",
        });
    }
    if let Some(w) = oracle::best_anti_pair(g, mu)? {
        if w.min_mass(mu) >= d2 {
            return Ok(ElementaryPair {
                outcome: CliqueOrPair::AntiPair(w),
                path: "oracle",
            });
        }
    }
    Err(Error::Invariant(format!(
        "elementary graph has neither a clique of mass {} nor an anti-pair of mass {}",
        rat_string(&three_d2),
        rat_string(&d2)
    )))
}

/// A homogeneous pair in a claw-free Berge graph with both masses >= 1/58,
/// plus provenance describing which branch of the pipeline produced it.
#[derive(Clone, Debug, Serialize)]
pub struct ClawFreeBergeWitness {
    pub pair: PairWitness,
    /// Pipeline branch, e.g. "heavy-vertex", "central-bag-split",
    /// "bag-nine-cliques", "bag-elementary(line-root)".
    pub path: String,
    /// Whether the Berge property was verified exactly (only possible within
    /// the subset-enumeration cap) or taken on trust.
    pub berge_checked: bool,
}

/// Split a clique of mass >= 3*delta into an adjacent pair with both sides
/// >= delta. Requires every vertex mass < delta, which the heavy-vertex
/// shortcut guarantees upstream.
fn clique_to_adjacent_pair(
    g: &Graph,
    mu: &Measure,
    clique: &VertexSet,
    delta: Rat,
) -> Result<PairWitness> {
    let mut p = VertexSet::new(clique.capacity());
    let mut acc = rat(0, 1);
    for v in clique.iter() {
        p.insert(v);
        acc += mu.weight(v);
        if acc >= delta {
            break;
        }
    }
    let q = clique.difference(&p);
    let w = PairWitness::new(PairKind::Adjacent, p, q);
    w.validate(g)?;
    if w.p_mass(mu) < delta || w.q_mass(mu) < delta {
        return Err(Error::Invariant("clique split fell below the threshold".into()));
    }
    Ok(w)
}

/// Weighted homogeneous pair (both masses >= 1/58) in a claw-free Berge
/// graph, under any measure with `mu(v) <= 1 - 2/58` everywhere.
///
/// Pipeline: heavy-vertex shortcut; clique-separator decomposition; central
/// bag; then on the bag either a nine-clique cover (a clique of mass at least
/// a third of the bag) or the elementary route. Claw-freeness is always
/// verified; Berge is verified exactly when the graph fits the enumeration
/// cap and otherwise recorded as unchecked.
pub fn clawfree_berge_pair(g: &Graph, mu: &Measure) -> Result<ClawFreeBergeWitness> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("need at least two vertices".into()));
    }
    if mu.len() != n {
        return Err(Error::Precondition("measure length must match vertex count".into()));
    }
    if let Some(claw) = find_pattern(g, Pattern::Claw)? {
        return Err(Error::Precondition(format!(
            "graph contains a claw at {claw:?}"
        )));
    }
    let berge_checked = if n <= oracle::BERGE_CAP {
        let (ok, cert) = oracle::is_berge_small(g)?;
        if !ok {
            return Err(Error::Precondition(format!(
                "graph is not Berge: {cert:?}"
            )));
        }
        true
    } else {
        false
    };
    let d3 = delta_claw_free_berge();
    let cap = rat(1, 1) - rat(2, 1) * d3;
    for v in 0..n {
        if mu.weight(v) > cap {
            return Err(Error::Precondition(format!(
                "mu({v}) = {} exceeds 1 - 2/58",
                rat_string(&mu.weight(v))
            )));
        }
    }

    // Heavy-vertex shortcut: a vertex of mass >= delta pairs with its
    // neighborhood or its non-neighborhood, whichever carries enough mass.
    if let Some(v) = (0..n).find(|&v| mu.weight(v) >= d3) {
        let nv = g.nbrs(v).clone();
        let single = VertexSet::from_iter(n, [v]);
        let pair = if mu.mass(&nv) >= d3 {
            PairWitness::new(PairKind::Adjacent, single, nv)
        } else {
            let mut rest = nv.complement();
            rest.remove(v);
            if mu.mass(&rest) < d3 {
                return Err(Error::Invariant(
                    "neither side of the heavy vertex carries enough mass".into(),
                ));
            }
            PairWitness::new(PairKind::AntiAdjacent, single, rest)
        };
        pair.validate(g)?;
        return Ok(ClawFreeBergeWitness {
            pair,
            path: "heavy-vertex".into(),
            berge_checked,
        });
    }

    let td = clique_separator_decomposition(g)?;
    let (bag_id, bag) = match central_bag(g, mu, &td, d3)? {
        CentralBagOutcome::AntiPair(p, q) => {
            let pair = PairWitness::new(PairKind::AntiAdjacent, p, q);
            pair.validate(g)?;
            if pair.min_mass(mu) <= d3 {
                return Err(Error::Invariant("central-bag split below threshold".into()));
            }
            return Ok(ClawFreeBergeWitness {
                pair,
                path: "central-bag-split".into(),
                berge_checked,
            });
        }
        CentralBagOutcome::Bag(id, bag) => (id, bag),
    };

    let (sub, map) = g.induced(&bag);
    let bag_mass = mu.mass(&bag);
    debug_assert!(bag_mass >= rat(1, 2) - d3);

    // Nine-clique route first; an oversized bag that defeats both the exact
    // cover and the greedy heuristic falls through to the elementary route.
    let nine = match nine_clique_partition(&sub) {
        Ok(opt) => opt,
        Err(Error::SizeCap(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(parts) = nine {
        let heaviest = parts
            .iter()
            .max_by(|a, b| {
                let ma = mu.mass_of_iter(a.iter().map(|v| map[v]));
                let mb = mu.mass_of_iter(b.iter().map(|v| map[v]));
                ma.cmp(&mb).then_with(|| b.min_elem().cmp(&a.min_elem()))
            })
            .ok_or_else(|| Error::Invariant("empty nine-clique cover of a nonempty bag".into()))?;
        let clique = VertexSet::from_iter(n, heaviest.iter().map(|v| map[v]));
        let mass = mu.mass(&clique);
        if mass < rat(3, 1) * d3 {
            return Err(Error::Invariant(format!(
                "heaviest of nine cliques has mass {} < 3/58 (bag id {bag_id})",
                rat_string(&mass)
            )));
        }
        let pair = clique_to_adjacent_pair(g, mu, &clique, d3)?;
        return Ok(ClawFreeBergeWitness {
            pair,
            path: "bag-nine-cliques".into(),
            berge_checked,
        });
    }

    if is_elementary(&sub).is_elementary() {
        let local_mu = mu.conditioned_on(&bag)?;
        let sub_mu = Measure::from_weights(map.iter().map(|&v| local_mu.weight(v)).collect())?;
        let ep = elementary_pair(&sub, &sub_mu)?;
        let lift = |s: &VertexSet| VertexSet::from_iter(n, s.iter().map(|v| map[v]));
        let pair = match &ep.outcome {
            CliqueOrPair::Clique(k) => {
                let clique = lift(k);
                debug_assert!(mu.mass(&clique) >= rat(3, 1) * d3);
                clique_to_adjacent_pair(g, mu, &clique, d3)?
            }
            CliqueOrPair::AntiPair(w) => {
                let pair = PairWitness::new(PairKind::AntiAdjacent, lift(&w.p), lift(&w.q));
                pair.validate(g)?;
                pair
            }
        };
        if pair.min_mass(mu) < d3 {
            return Err(Error::Invariant(format!(
                "elementary-route pair mass {} below 1/58",
                rat_string(&pair.min_mass(mu))
            )));
        }
        return Ok(ClawFreeBergeWitness {
            pair,
            path: format!("bag-elementary({})", ep.path),
            berge_checked,
        });
    }

    Err(Error::Invariant(format!(
        "central bag {bag_id} is neither nine-clique coverable nor elementary; \
         input lies outside the claw-free Berge class or exceeds desk scale"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, NamedGraph};

    #[test]
    fn elementary_pair_on_clique() {
        let k6 = build_named(NamedGraph::Clique(6)).unwrap();
        let mu = Measure::uniform(6);
        let ep = elementary_pair(&k6, &mu).unwrap();
        match ep.outcome {
            CliqueOrPair::Clique(k) => assert_eq!(mu.mass(&k), rat(1, 1)),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn elementary_pair_on_c6() {
        // C6 is its own line graph over the bipartite root C6. The perfect
        // cut makes every root star carry 1/3 >= 3/14, so either branch of
        // the disjunction may fire; both must meet their thresholds.
        let c6 = build_named(NamedGraph::Cycle(6)).unwrap();
        let mu = Measure::uniform(6);
        let ep = elementary_pair(&c6, &mu).unwrap();
        assert_eq!(ep.path, "line-root");
        match ep.outcome {
            CliqueOrPair::Clique(k) => {
                assert!(c6.is_clique(&k));
                assert!(mu.mass(&k) >= rat(3, 28));
            }
            CliqueOrPair::AntiPair(w) => {
                w.validate(&c6).unwrap();
                assert!(w.min_mass(&mu) >= delta_elementary());
            }
        }
    }

    #[test]
    fn elementary_pair_heavy_middle_p3() {
        let p3 = build_named(NamedGraph::Path(3)).unwrap();
        let mu = Measure::from_weights(vec![rat(1, 4), rat(1, 2), rat(1, 4)]).unwrap();
        let ep = elementary_pair(&p3, &mu).unwrap();
        match ep.outcome {
            CliqueOrPair::Clique(k) => assert!(mu.mass(&k) >= rat(3, 28)),
            CliqueOrPair::AntiPair(w) => assert!(w.min_mass(&mu) >= rat(1, 28)),
        }
    }

    #[test]
    fn elementary_pair_rejects_claw() {
        let claw = build_named(NamedGraph::Claw).unwrap();
        assert!(elementary_pair(&claw, &Measure::uniform(4)).is_err());
    }

    #[test]
    fn cfb_rejects_heavy_measure() {
        let c4 = build_named(NamedGraph::Cycle(4)).unwrap();
        let mu = Measure::from_weights(vec![
            rat(99, 100),
            rat(1, 300),
            rat(1, 300),
            rat(1, 300),
        ])
        .unwrap();
        assert!(matches!(
            clawfree_berge_pair(&c4, &mu),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cfb_rejects_claws_and_odd_holes() {
        let claw = build_named(NamedGraph::Claw).unwrap();
        assert!(clawfree_berge_pair(&claw, &Measure::uniform(4)).is_err());
        let c5 = build_named(NamedGraph::Cycle(5)).unwrap();
        assert!(clawfree_berge_pair(&c5, &Measure::uniform(5)).is_err());
    }

    #[test]
    fn cfb_on_small_census_like_graphs() {
        let d3 = delta_claw_free_berge();
        for kind in [
            NamedGraph::Cycle(4),
            NamedGraph::Cycle(6),
            NamedGraph::Path(7),
            NamedGraph::Clique(5),
        ] {
            let g = build_named(kind).unwrap();
            let mu = Measure::uniform(g.n());
            let w = clawfree_berge_pair(&g, &mu).unwrap();
            w.pair.validate(&g).unwrap();
            assert!(w.pair.min_mass(&mu) >= d3, "{kind:?}");
        }
    }

    #[test]
    fn cfb_deep_pipeline_on_even_cycle() {
        // 60 vertices keeps every uniform weight below 1/58, so the pipeline
        // has to decompose instead of taking the heavy-vertex shortcut.
        let g = build_named(NamedGraph::Cycle(60)).unwrap();
        let mu = Measure::uniform(60);
        let w = clawfree_berge_pair(&g, &mu).unwrap();
        w.pair.validate(&g).unwrap();
        assert!(w.pair.min_mass(&mu) >= delta_claw_free_berge());
        assert!(w.path.starts_with("bag-"), "path = {}", w.path);
    }

    #[test]
    fn cfb_deep_pipeline_on_long_path() {
        let g = build_named(NamedGraph::Path(70)).unwrap();
        let mu = Measure::uniform(70);
        let w = clawfree_berge_pair(&g, &mu).unwrap();
        w.pair.validate(&g).unwrap();
        assert!(w.pair.min_mass(&mu) >= delta_claw_free_berge());
    }

    #[test]
    fn heavy_vertex_shortcut_fires_at_desk_scale() {
        let c6 = build_named(NamedGraph::Cycle(6)).unwrap();
        let mu = Measure::uniform(6);
        let w = clawfree_berge_pair(&c6, &mu).unwrap();
        assert_eq!(w.path, "heavy-vertex");
        assert!(w.pair.min_mass(&mu) >= delta_claw_free_berge());
    }
}
