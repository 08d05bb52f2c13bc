#![allow(dead_code)]

use proptest::prelude::*;
use proptest::sample::subsequence;

use solidarity::model::{EdgeDoc, NodeDoc, ScenarioDoc, Step};
use solidarity::redistribution::net_inflow;
use solidarity::{
    redistribute, validate_instance, Instance, InstanceDocument, ParticipationProfile,
};

pub const PAPER_JSON: &str = include_str!("../../examples/paper_fig1.json");

pub fn paper() -> Instance {
    Instance::from_json_str(PAPER_JSON).expect("bundled instance is valid")
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Raw integer data for a random instance; turned into an [`Instance`]
/// through the same validation path as a file.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub curves: Vec<Vec<(u32, u32)>>,
    pub edges: Vec<(usize, usize)>,
    pub scenarios: Vec<RawScenario>,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct RawScenario {
    pub resources: Vec<u32>,
    pub cap_neg: Vec<i32>,
    pub cap_pos: Vec<i32>,
}

impl RawInstance {
    pub fn build(&self) -> Instance {
        let nodes = self
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| NodeDoc {
                id: i as i64 + 1,
                name: String::new(),
                demand: c
                    .iter()
                    .map(|&(p, q)| Step {
                        price: p as f64,
                        quantity: q as f64,
                    })
                    .collect(),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(from, to))| EdgeDoc {
                id: e as i64 + 1,
                from: from as i64 + 1,
                to: to as i64 + 1,
                cap_neg: self
                    .scenarios
                    .iter()
                    .map(|s| s.cap_neg[e])
                    .min()
                    .unwrap_or(0) as f64,
                cap_pos: self
                    .scenarios
                    .iter()
                    .map(|s| s.cap_pos[e])
                    .max()
                    .unwrap_or(0) as f64,
            })
            .collect();
        let p = 1.0 / self.scenarios.len() as f64;
        let scenarios = self
            .scenarios
            .iter()
            .enumerate()
            .map(|(k, s)| ScenarioDoc {
                id: k as i64 + 1,
                probability: p,
                resources: s.resources.iter().map(|&r| r as f64).collect(),
                cap_neg: s.cap_neg.iter().map(|&c| c as f64).collect(),
                cap_pos: s.cap_pos.iter().map(|&c| c as f64).collect(),
            })
            .collect();
        let doc = InstanceDocument {
            nodes,
            edges,
            scenarios,
            alpha: self.alpha,
        };
        validate_instance(&doc).expect("generated instance is valid")
    }
}

fn arb_curve() -> impl Strategy<Value = Vec<(u32, u32)>> {
    (
        subsequence((1..=20u32).collect::<Vec<_>>(), 1..=3),
        prop::collection::vec(1..=10u32, 3),
    )
        .prop_map(|(mut prices, widths)| {
            prices.reverse();
            prices.into_iter().zip(widths).collect()
        })
}

/// Instances with at most `max_nodes` nodes, `max_edges` edges and
/// `max_scenarios` scenarios; all data are integers of magnitude <= 20.
pub fn arb_instance(
    max_nodes: usize,
    max_edges: usize,
    max_scenarios: usize,
) -> impl Strategy<Value = RawInstance> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let edge_count = if n < 2 { 0..=0 } else { 0..=max_edges };
        (
            prop::collection::vec(arb_curve(), n),
            edge_count.prop_flat_map(move |m| {
                (
                    prop::collection::vec((0..n, 1..n.max(2)), m),
                    prop::collection::vec(
                        (
                            prop::collection::vec(0..=20u32, n),
                            prop::collection::vec(-20..=0i32, m),
                            prop::collection::vec(0..=20i32, m),
                        ),
                        1..=max_scenarios,
                    ),
                )
            }),
            prop::sample::select(vec![0.25, 0.5, 1.0 / 3.0, 1.0]),
        )
            .prop_map(move |(curves, (pairs, scen), alpha)| RawInstance {
                curves,
                edges: pairs
                    .into_iter()
                    .map(|(a, off)| (a, (a + off) % n))
                    .collect(),
                scenarios: scen
                    .into_iter()
                    .map(|(resources, cap_neg, cap_pos)| RawScenario {
                        resources,
                        cap_neg,
                        cap_pos,
                    })
                    .collect(),
                alpha,
            })
    })
}

pub fn arb_case(
    max_nodes: usize,
    max_edges: usize,
    max_scenarios: usize,
) -> impl Strategy<Value = (RawInstance, Vec<u32>)> {
    arb_instance(max_nodes, max_edges, max_scenarios).prop_flat_map(|raw| {
        let n = raw.curves.len();
        (Just(raw), prop::collection::vec(0..=20u32, n))
    })
}

/// Best total consumption utility over all integer edge flows, found by
/// brute force. Overflow (free disposal) is allowed only at nodes whose
/// stock already exceeds their total demand.
pub fn integer_flow_optimum(instance: &Instance, scenario: usize, profile: &[u32]) -> f64 {
    let s = &instance.scenarios[scenario];
    let net = &instance.network;
    let n = net.nodes.len();
    let ranges: Vec<(i64, i64)> = (0..net.edges.len())
        .map(|e| (s.cap_neg[e].ceil() as i64, s.cap_pos[e].floor() as i64))
        .collect();
    let demand: Vec<f64> = net
        .nodes
        .iter()
        .map(|n| n.demand.total_quantity())
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut flows: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let mut netin = vec![0i64; n];
        for (e, edge) in net.edges.iter().enumerate() {
            netin[edge.to - 1] += flows[e];
            netin[edge.from - 1] -= flows[e];
        }
        let mut value = 0.0;
        let mut feasible = true;
        for i in 0..n {
            let stock = s.resources[i] + netin[i] as f64;
            let surplus_ok = s.resources[i] > demand[i];
            if netin[i].unsigned_abs() > u64::from(profile[i])
                || stock < 0.0
                || (stock > demand[i] && !surplus_ok)
            {
                feasible = false;
                break;
            }
            value += net.nodes[i]
                .demand
                .consumption_utility(stock.min(demand[i]));
        }
        if feasible && value > best {
            best = value;
        }
        // Odometer step.
        let mut k = 0;
        loop {
            if k == flows.len() {
                return best;
            }
            if flows[k] < ranges[k].1 {
                flows[k] += 1;
                break;
            }
            flows[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Expected shortfall of a lower tail, computed from the dual form
/// `max_t { t - E[(t - X)+] / alpha }`. The maximum sits at an atom.
pub fn es_oracle(entries: &[(f64, f64)], alpha: f64) -> f64 {
    entries
        .iter()
        .map(|&(t, _)| {
            let below: f64 = entries.iter().map(|&(v, p)| p * (t - v).max(0.0)).sum();
            t - below / alpha
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Checks every clearing invariant for each scenario of `inst` under
/// `profile`; the first broken one is reported.
pub fn check_clearing(inst: &Instance, profile: &[u32]) -> Result<(), String> {
    const TOL: f64 = 1e-7;
    let p = ParticipationProfile::from_grid(profile);
    for s in &inst.scenarios {
        let o = redistribute(inst, s, &p).map_err(|e| e.to_string())?;
        let ctx = |what: &str| format!("scenario {}: {what}", s.id);
        let netin = net_inflow(inst, &o.flows);
        for (e, f) in o.flows.iter().enumerate() {
            if *f < s.cap_neg[e] - TOL || *f > s.cap_pos[e] + TOL {
                return Err(ctx(&format!("edge {} flow {f} outside capacity", e + 1)));
            }
        }
        for (i, node) in inst.network.nodes.iter().enumerate() {
            if netin[i].abs() > f64::from(profile[i]) + TOL {
                return Err(ctx(&format!(
                    "node {} transfer {} beyond participation",
                    i + 1,
                    netin[i]
                )));
            }
            let used: f64 = o.consumptions[i].iter().sum::<f64>() + o.overflow[i];
            if (used - s.resources[i] - netin[i]).abs() > TOL {
                return Err(ctx(&format!("node {} does not conserve", i + 1)));
            }
            for (c, step) in o.consumptions[i].iter().zip(node.demand.steps()) {
                if *c < -TOL || *c > step.quantity + TOL {
                    return Err(ctx(&format!(
                        "node {} step consumption {c} out of range",
                        i + 1
                    )));
                }
            }
            if o.overflow[i] < -TOL
                || (s.resources[i] <= node.demand.total_quantity() && o.overflow[i].abs() > TOL)
            {
                return Err(ctx(&format!("node {} overflow {}", i + 1, o.overflow[i])));
            }
            if (o.net_received[i] - netin[i]).abs() > TOL {
                return Err(ctx(&format!(
                    "node {} traded quantity differs from inflow",
                    i + 1
                )));
            }
        }
        let money: f64 = o.uf.iter().sum();
        if money.abs() > 1e-6 {
            return Err(ctx(&format!("U^f sums to {money}")));
        }
        let total: f64 = o.uc.iter().sum();
        let before: f64 = o.uc_reference.iter().sum();
        if total < before - 1e-6 {
            return Err(ctx(&format!("total U^c fell from {before} to {total}")));
        }
        if o.rcp.is_none() && o.uf.iter().any(|v| *v != 0.0) {
            return Err(ctx("money moved without a price"));
        }
    }
    Ok(())
}
