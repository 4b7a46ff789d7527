//! Wasserstein-1 distance between day distributions.
//!
//! On the integer line the distance has a closed form: the L1 distance
//! between tail (equivalently CDF) profiles,
//!
//! ```text
//! EMD(p, q) = Σ_{K>=0} |Q_p(K) - Q_q(K)|.
//! ```
//!
//! That is the production path ([`emd`], O(N)). The coupling view is kept
//! alive twice over: [`optimal_plan`] materializes the monotone (quantile)
//! coupling whose cost matches the closed form, and [`emd_oracle`] solves the
//! generic transportation problem by min-cost flow without using the 1-D
//! structure at all, as an independent cross-check on small instances.

use thiserror::Error;

use crate::dist::FiniteDistribution;
use crate::numeric::kahan_sum;

/// Largest combined atom count the flow oracle accepts.
pub const ORACLE_MAX_ATOMS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("instance too large for oracle: {atoms} atoms > {ORACLE_MAX_ATOMS}")]
    OracleTooLarge { atoms: usize },
    #[error("min-cost flow failed to terminate")]
    FlowDiverged,
}

/// One entry of a transport plan: `mass` moved from day `from` to day `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub from: usize,
    pub to: usize,
    pub mass: f64,
}

/// Nonnegative mass assignment between two distributions whose row sums
/// reproduce the source masses and column sums the target masses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransportPlan {
    entries: Vec<PlanEntry>,
}

impl TransportPlan {
    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn cost(&self) -> f64 {
        plan_cost(self)
    }

    /// CSV rows `x,y,mass`, one per entry, for inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,mass\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.from, e.to, e.mass));
        }
        out
    }
}

/// Wasserstein-1 distance via the tail-difference closed form.
///
/// Supports of different sizes are zero-padded to the larger bound.
pub fn emd(p: &FiniteDistribution, q: &FiniteDistribution) -> f64 {
    let n = p.support_bound().max(q.support_bound());
    let (tp, tq) = (p.tail_profile(), q.tail_profile());
    kahan_sum((0..n).map(|k| (tp.q(k) - tq.q(k)).abs()))
}

/// The monotone (quantile) coupling: sweep both supports in increasing day
/// order, matching mass greedily. Optimal on the line; ties in the optimal
/// set are broken by this deterministic sweep.
pub fn optimal_plan(p: &FiniteDistribution, q: &FiniteDistribution) -> TransportPlan {
    let pa = p.atoms();
    let qa = q.atoms();
    let mut entries = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut left = pa.first().map(|a| a.1).unwrap_or(0.0);
    let mut right = qa.first().map(|a| a.1).unwrap_or(0.0);
    while i < pa.len() && j < qa.len() {
        let m = left.min(right);
        if m > 0.0 {
            entries.push(PlanEntry {
                from: pa[i].0,
                to: qa[j].0,
                mass: m,
            });
        }
        left -= m;
        right -= m;
        if left <= 0.0 {
            i += 1;
            left = pa.get(i).map(|a| a.1).unwrap_or(0.0);
        }
        if right <= 0.0 {
            j += 1;
            right = qa.get(j).map(|a| a.1).unwrap_or(0.0);
        }
    }
    TransportPlan { entries }
}

/// `Σ mass · |x - y|` over the plan's entries.
pub fn plan_cost(plan: &TransportPlan) -> f64 {
    kahan_sum(
        plan.entries
            .iter()
            .map(|e| e.mass * (e.from as f64 - e.to as f64).abs()),
    )
}

/// Difference of means. Never exceeds the transport distance, and is tight
/// exactly when all mass moves in one direction.
pub fn centroid_gap(p: &FiniteDistribution, q: &FiniteDistribution) -> f64 {
    (p.expectation() - q.expectation()).abs()
}

/// Exact minimum transportation cost by successive-shortest-path min-cost
/// flow on the bipartite atom graph. Deliberately ignorant of the 1-D
/// structure; all arc costs are integers, so shortest-path arithmetic is
/// exact.
pub fn emd_oracle(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64, TransportError> {
    let pa = p.atoms();
    let qa = q.atoms();
    let atoms = pa.len() + qa.len();
    if atoms > ORACLE_MAX_ATOMS {
        return Err(TransportError::OracleTooLarge { atoms });
    }

    let mut flow = MinCostFlow::new(2 + atoms);
    let source = 0usize;
    let sink = 1usize;
    for (idx, &(_, m)) in pa.iter().enumerate() {
        flow.add_edge(source, 2 + idx, m, 0.0);
    }
    for (jdx, &(_, m)) in qa.iter().enumerate() {
        flow.add_edge(2 + pa.len() + jdx, sink, m, 0.0);
    }
    for (idx, &(x, _)) in pa.iter().enumerate() {
        for (jdx, &(y, _)) in qa.iter().enumerate() {
            let cost = (x as f64 - y as f64).abs();
            flow.add_edge(2 + idx, 2 + pa.len() + jdx, f64::INFINITY, cost);
        }
    }

    let want = kahan_sum(pa.iter().map(|a| a.1)).min(kahan_sum(qa.iter().map(|a| a.1)));
    flow.min_cost_flow(source, sink, want)
}

const FLOW_EPS: f64 = 1e-13;

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Successive shortest paths with Bellman-Ford; capacities are real-valued
/// masses, costs are integer day distances.
struct MinCostFlow {
    nodes: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    fn new(nodes: usize) -> Self {
        Self {
            nodes,
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            cap: 0.0,
            cost: -cost,
        });
    }

    fn min_cost_flow(&mut self, source: usize, sink: usize, amount: f64) -> Result<f64, TransportError> {
        let mut remaining = amount;
        let mut total_cost = 0.0;
        // Each augmentation saturates a source or sink arc, or zeroes a
        // residual arc; cap the iteration count defensively.
        let max_rounds = 8 * self.nodes + 64;
        for _ in 0..max_rounds {
            if remaining <= FLOW_EPS {
                return Ok(total_cost);
            }
            let Some((dist, parent)) = self.shortest_path(source, sink) else {
                // No augmenting path left; acceptable only if the residual
                // demand is normalization dust.
                if remaining <= 1e-6 {
                    return Ok(total_cost);
                }
                return Err(TransportError::FlowDiverged);
            };
            let mut bottleneck = remaining;
            let mut v = sink;
            while v != source {
                let e = parent[v];
                bottleneck = bottleneck.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let e = parent[v];
                self.edges[e].cap -= bottleneck;
                if self.edges[e].cap < FLOW_EPS {
                    self.edges[e].cap = 0.0;
                }
                self.edges[e ^ 1].cap += bottleneck;
                v = self.edges[e ^ 1].to;
            }
            total_cost += bottleneck * dist;
            remaining -= bottleneck;
        }
        Err(TransportError::FlowDiverged)
    }

    /// Bellman-Ford over the residual graph (negative residual costs are
    /// fine). Returns the sink distance and the parent edge of each node.
    fn shortest_path(&self, source: usize, sink: usize) -> Option<(f64, Vec<usize>)> {
        let mut dist = vec![f64::INFINITY; self.nodes];
        let mut parent = vec![usize::MAX; self.nodes];
        dist[source] = 0.0;
        for _ in 0..self.nodes {
            let mut changed = false;
            for u in 0..self.nodes {
                if !dist[u].is_finite() {
                    continue;
                }
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap > FLOW_EPS && dist[u] + edge.cost < dist[edge.to] {
                        dist[edge.to] = dist[u] + edge.cost;
                        parent[edge.to] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_finite() {
            Some((dist[sink], parent))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::FiniteDistribution;
    use proptest::prelude::*;

    fn point(t: usize, n: usize) -> FiniteDistribution {
        FiniteDistribution::point_mass(t, n).unwrap()
    }

    #[test]
    fn emd_identity_and_displacement() {
        let d = FiniteDistribution::from_atoms(8, &[(2, 0.5), (8, 0.5)]).unwrap();
        assert_eq!(emd(&d, &d), 0.0);
        assert!((emd(&point(3, 10), &point(7, 10)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn emd_uniform_shift() {
        let a = FiniteDistribution::from_atoms(3, &[(1, 0.5), (2, 0.5)]).unwrap();
        let b = FiniteDistribution::from_atoms(3, &[(2, 0.5), (3, 0.5)]).unwrap();
        assert!((emd(&a, &b) - 1.0).abs() < 1e-12);
        assert!((emd_oracle(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emd_handles_mismatched_supports() {
        let a = point(3, 3);
        let b = point(7, 20);
        assert!((emd(&a, &b) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn plan_for_identical_inputs_is_diagonal() {
        let d = FiniteDistribution::from_atoms(8, &[(2, 0.5), (8, 0.5)]).unwrap();
        let plan = optimal_plan(&d, &d);
        assert!(plan.entries().iter().all(|e| e.from == e.to));
        assert_eq!(plan.cost(), 0.0);
    }

    #[test]
    fn plan_for_point_masses_is_single_entry() {
        let plan = optimal_plan(&point(3, 10), &point(7, 10));
        assert_eq!(
            plan.entries(),
            &[PlanEntry {
                from: 3,
                to: 7,
                mass: 1.0
            }]
        );
        assert!((plan.cost() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn plan_for_uniform_shift() {
        let a = FiniteDistribution::from_atoms(3, &[(1, 0.5), (2, 0.5)]).unwrap();
        let b = FiniteDistribution::from_atoms(3, &[(2, 0.5), (3, 0.5)]).unwrap();
        let plan = optimal_plan(&a, &b);
        assert_eq!(
            plan.entries(),
            &[
                PlanEntry {
                    from: 1,
                    to: 2,
                    mass: 0.5
                },
                PlanEntry {
                    from: 2,
                    to: 3,
                    mass: 0.5
                }
            ]
        );
        assert!((plan.cost() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plan_cost_arithmetic() {
        assert_eq!(plan_cost(&TransportPlan::default()), 0.0);
        let single = TransportPlan {
            entries: vec![PlanEntry {
                from: 3,
                to: 7,
                mass: 1.0,
            }],
        };
        assert!((plan_cost(&single) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn plan_csv_format() {
        let plan = optimal_plan(&point(3, 10), &point(7, 10));
        assert_eq!(plan.to_csv(), "x,y,mass\n3,7,1\n");
    }

    #[test]
    fn oracle_on_point_masses() {
        assert!((emd_oracle(&point(3, 10), &point(7, 10)).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let mass = vec![1.0 / 40.0; 40];
        let d = FiniteDistribution::from_dense(mass).unwrap();
        assert!(matches!(
            emd_oracle(&d, &d),
            Err(TransportError::OracleTooLarge { atoms: 80 })
        ));
    }

    #[test]
    fn oracle_matches_known_two_point_pair() {
        // Supports {1, 4, 19} vs {1, 19} with a quarter of the mass shifted:
        // the distance is 0.25 * 3 = 0.75 exactly.
        let p1 =
            FiniteDistribution::from_atoms(19, &[(1, 0.5), (4, 0.25), (19, 0.25)]).unwrap();
        let p2 = FiniteDistribution::from_atoms(19, &[(1, 0.75), (19, 0.25)]).unwrap();
        assert_eq!(emd_oracle(&p1, &p2).unwrap(), 0.75);
        assert_eq!(emd(&p1, &p2), 0.75);
    }

    #[test]
    fn centroid_gap_examples() {
        let d = FiniteDistribution::from_atoms(8, &[(2, 0.5), (8, 0.5)]).unwrap();
        assert_eq!(centroid_gap(&d, &d), 0.0);
        assert!((centroid_gap(&point(3, 10), &point(7, 10)) - 4.0).abs() < 1e-12);
        // Strictness witness: equal means but positive distance.
        let spread = FiniteDistribution::from_atoms(3, &[(1, 0.5), (3, 0.5)]).unwrap();
        let mid = point(2, 3);
        assert!(centroid_gap(&spread, &mid).abs() < 1e-12);
        assert!((emd(&spread, &mid) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_perturb_distance_is_mass_times_displacement() {
        let d = FiniteDistribution::from_atoms(10, &[(2, 0.5), (8, 0.5)]).unwrap();
        let moved = d.shift_perturb(8, 10, 0.25).unwrap();
        assert!((emd(&d, &moved) - 0.5).abs() < 1e-12);
    }

    prop_compose! {
        fn arb_dist()(weights in prop::collection::vec(0.05f64..1.0, 1..6), n in 6usize..16) -> FiniteDistribution {
            let total: f64 = weights.iter().sum();
            let atoms: Vec<(usize, f64)> = weights
                .iter()
                .enumerate()
                .map(|(i, w)| (i * 2 + 1, w / total))
                .collect();
            FiniteDistribution::from_atoms(n.max(atoms.last().unwrap().0), &atoms).unwrap()
        }
    }

    proptest! {
        #[test]
        fn metric_axioms(p in arb_dist(), q in arb_dist(), r in arb_dist()) {
            prop_assert!((emd(&p, &q) - emd(&q, &p)).abs() <= 1e-12);
            prop_assert!(emd(&p, &p).abs() <= 1e-12);
            prop_assert!(emd(&p, &r) <= emd(&p, &q) + emd(&q, &r) + 1e-9);
        }

        #[test]
        fn plan_agrees_with_closed_form(p in arb_dist(), q in arb_dist()) {
            let plan = optimal_plan(&p, &q);
            prop_assert!((plan.cost() - emd(&p, &q)).abs() <= 1e-9);
            // Marginals.
            for (day, m) in p.atoms() {
                let row: f64 = plan.entries().iter().filter(|e| e.from == day).map(|e| e.mass).sum();
                prop_assert!((row - m).abs() <= 1e-9);
            }
            for (day, m) in q.atoms() {
                let col: f64 = plan.entries().iter().filter(|e| e.to == day).map(|e| e.mass).sum();
                prop_assert!((col - m).abs() <= 1e-9);
            }
        }

        #[test]
        fn oracle_agrees_with_closed_form(p in arb_dist(), q in arb_dist()) {
            let fast = emd(&p, &q);
            let exact = emd_oracle(&p, &q).unwrap();
            prop_assert!((fast - exact).abs() <= 1e-9, "{fast} vs {exact}");
        }

        #[test]
        fn centroid_lower_bound(p in arb_dist(), q in arb_dist()) {
            prop_assert!(centroid_gap(&p, &q) <= emd(&p, &q) + 1e-9);
        }
    }
}
