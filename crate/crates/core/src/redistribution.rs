//! Per-scenario redistribution: the network LP that routes resources to
//! their highest-value use, and the settlement that follows from it
//! (consumption utilities, marginal increments, the clearing price and the
//! resulting money transfers).

use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Row};
use crate::model::{Instance, ParticipationProfile, Scenario, Side, TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RedistributionError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("redistribution LP for scenario {scenario} reported {status:?}")]
    Infeasible { scenario: usize, status: LpStatus },
    #[error("only {0} present; receivers and givers must both be nonempty")]
    OneSided(&'static str),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Where each quantity lives in the LP's variable vector.
#[derive(Debug, Clone, PartialEq)]
pub struct VarLayout {
    pub edges: usize,
    /// First consumption variable of each node; node `n` owns
    /// `consumption_start[n] .. consumption_start[n] + steps[n]`.
    pub consumption_start: Vec<usize>,
    pub steps: Vec<usize>,
    /// Zero-price overflow variable for nodes holding more than they can
    /// consume.
    pub overflow: Vec<Option<usize>>,
    pub total: usize,
}

impl VarLayout {
    pub fn consumption_range(&self, node: usize) -> std::ops::Range<usize> {
        let s = self.consumption_start[node];
        s..s + self.steps[node]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedistributionLp {
    pub problem: LpProblem,
    pub layout: VarLayout,
}

/// Builds the redistribution LP for one scenario.
///
/// Variables are the signed edge flows followed by per-step consumptions
/// (and an overflow variable where `r_s(n)` exceeds total demand). Rows are
/// one participation row per node, `-q(n) <= inflow - outflow <= q(n)`,
/// then one balance row per node, `inflow - outflow - consumed = -r_s(n)`.
pub fn build_redistribution_lp(
    instance: &Instance,
    scenario: &Scenario,
    profile: &ParticipationProfile,
) -> Result<RedistributionLp, RedistributionError> {
    check_dimensions(instance, scenario, profile)?;
    let net = &instance.network;
    let n_nodes = net.node_count();
    let n_edges = net.edge_count();

    let mut consumption_start = Vec::with_capacity(n_nodes);
    let mut steps = Vec::with_capacity(n_nodes);
    let mut next = n_edges;
    for node in &net.nodes {
        consumption_start.push(next);
        steps.push(node.demand.len());
        next += node.demand.len();
    }
    let mut overflow = vec![None; n_nodes];
    for (i, node) in net.nodes.iter().enumerate() {
        if scenario.resources[i] > node.demand.total_quantity() {
            overflow[i] = Some(next);
            next += 1;
        }
    }
    let total = next;

    let mut objective = vec![0.0; total];
    let mut var_lower = vec![0.0; total];
    let mut var_upper = vec![0.0; total];
    var_lower[..n_edges].copy_from_slice(&scenario.cap_neg);
    var_upper[..n_edges].copy_from_slice(&scenario.cap_pos);
    for (i, node) in net.nodes.iter().enumerate() {
        for (w, step) in node.demand.steps().iter().enumerate() {
            let k = consumption_start[i] + w;
            objective[k] = step.price;
            var_upper[k] = step.quantity;
        }
        if let Some(k) = overflow[i] {
            var_upper[k] = f64::INFINITY;
        }
    }

    let incidence = incidence_rows(instance, total);
    let mut rows = Vec::with_capacity(2 * n_nodes);
    for (i, coeffs) in incidence.iter().enumerate() {
        let q = profile.levels()[i];
        rows.push(Row::new(coeffs.clone(), -q, q));
    }
    for (i, coeffs) in incidence.into_iter().enumerate() {
        let mut coeffs = coeffs;
        let start = consumption_start[i];
        for c in &mut coeffs[start..start + steps[i]] {
            *c = -1.0;
        }
        if let Some(k) = overflow[i] {
            coeffs[k] = -1.0;
        }
        rows.push(Row::eq(coeffs, -scenario.resources[i]));
    }

    Ok(RedistributionLp {
        problem: LpProblem {
            objective,
            var_lower,
            var_upper,
            rows,
        },
        layout: VarLayout {
            edges: n_edges,
            consumption_start,
            steps,
            overflow,
            total,
        },
    })
}

/// Per-node `inflow - outflow` coefficient rows over the first `M` columns.
fn incidence_rows(instance: &Instance, width: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; width]; instance.node_count()];
    for (m, edge) in instance.network.edges.iter().enumerate() {
        let (from, to) = edge.endpoints();
        rows[to][m] += 1.0;
        rows[from][m] -= 1.0;
    }
    rows
}

fn check_dimensions(
    instance: &Instance,
    scenario: &Scenario,
    profile: &ParticipationProfile,
) -> Result<(), RedistributionError> {
    let n = instance.node_count();
    let m = instance.edge_count();
    if profile.len() != n {
        return Err(RedistributionError::Dimension(format!(
            "profile has {} entries for {n} nodes",
            profile.len()
        )));
    }
    if scenario.resources.len() != n {
        return Err(RedistributionError::Dimension(format!(
            "scenario {} has {} resources for {n} nodes",
            scenario.id,
            scenario.resources.len()
        )));
    }
    if scenario.cap_neg.len() != m || scenario.cap_pos.len() != m {
        return Err(RedistributionError::Dimension(format!(
            "scenario {} capacity vectors do not match {m} edges",
            scenario.id
        )));
    }
    Ok(())
}

/// Everything that happens in one scenario under one participation profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedistributionOutcome {
    pub scenario_id: usize,
    /// Signed flow per edge; negative runs against the reference direction.
    pub flows: Vec<f64>,
    /// Consumption per node per demand step.
    pub consumptions: Vec<Vec<f64>>,
    /// Resource held but not consumed (beyond total demand), per node.
    pub overflow: Vec<f64>,
    /// `consumed - r_s(n)`: positive for receivers, negative for givers.
    pub net_received: Vec<f64>,
    pub uc: Vec<f64>,
    /// Consumption utility of the node's own resources, no redistribution.
    pub uc_reference: Vec<f64>,
    /// Marginal increment: value of the last unit gained (positive) or lost
    /// (negative); zero for nodes that did not trade.
    pub mu: Vec<f64>,
    pub rcp: Option<f64>,
    pub uf: Vec<f64>,
}

impl RedistributionOutcome {
    /// Total consumed per node. Spilled surplus is not consumption.
    pub fn consumed(&self) -> Vec<f64> {
        self.consumptions
            .iter()
            .map(|c| c.iter().sum::<f64>())
            .collect()
    }

    /// `(U^c - U^c_ref) + U^f` per node.
    pub fn net_gain(&self) -> Vec<f64> {
        (0..self.uc.len())
            .map(|i| self.uc[i] - self.uc_reference[i] + self.uf[i])
            .collect()
    }

    pub fn is_receiver(&self, node: usize) -> bool {
        self.net_received[node] > TOLERANCE
    }

    pub fn is_giver(&self, node: usize) -> bool {
        self.net_received[node] < -TOLERANCE
    }
}

/// Clears one scenario.
///
/// Among utility-maximising redistributions, picks the one with least total
/// absolute flow: a second LP pins utility at the optimum and minimises
/// `sum |f_m|` with each flow split into its two directions.
pub fn redistribute(
    instance: &Instance,
    scenario: &Scenario,
    profile: &ParticipationProfile,
) -> Result<RedistributionOutcome, RedistributionError> {
    let first = build_redistribution_lp(instance, scenario, profile)?;
    let best = solve_lp(&first.problem)?;
    if best.status != LpStatus::Optimal {
        return Err(RedistributionError::Infeasible {
            scenario: scenario.id,
            status: best.status,
        });
    }

    let layout = &first.layout;
    let m = layout.edges;
    let second = min_flow_problem(&first, best.objective_value);
    let lean = solve_lp(&second)?;
    if lean.status != LpStatus::Optimal {
        return Err(RedistributionError::Infeasible {
            scenario: scenario.id,
            status: lean.status,
        });
    }
    // Second-stage layout: f+ (m), f- (m), then the first stage's non-flow
    // variables shifted by m.
    let x: Vec<f64> = lean.values.iter().map(|&v| snap(v)).collect();
    let value = |k: usize| x[k + m];
    let flows: Vec<f64> = (0..m).map(|e| snap(x[e] - x[m + e])).collect();

    let net = &instance.network;
    let n = net.node_count();
    let mut consumptions = Vec::with_capacity(n);
    let mut overflow = Vec::with_capacity(n);
    let mut uc = Vec::with_capacity(n);
    let mut uc_reference = Vec::with_capacity(n);
    for (i, node) in net.nodes.iter().enumerate() {
        let c: Vec<f64> = layout.consumption_range(i).map(value).collect();
        uc.push(
            c.iter()
                .zip(node.demand.steps())
                .map(|(q, s)| q * s.price)
                .sum(),
        );
        consumptions.push(c);
        overflow.push(layout.overflow[i].map(value).unwrap_or(0.0));
        uc_reference.push(node.demand.consumption_utility(scenario.resources[i]));
    }

    let mut outcome = RedistributionOutcome {
        scenario_id: scenario.id,
        flows,
        consumptions,
        overflow,
        net_received: vec![0.0; n],
        uc,
        uc_reference,
        mu: vec![0.0; n],
        rcp: None,
        uf: vec![0.0; n],
    };
    // Traded quantity is what crossed the edges; surplus a node could not
    // use stays in its overflow and is never sold.
    outcome.net_received = net_inflow(instance, &outcome.flows);
    let consumed = outcome.consumed();
    for (i, node) in net.nodes.iter().enumerate() {
        outcome.mu[i] = if outcome.is_receiver(i) {
            node.demand
                .marginal_value(consumed[i], Side::Below)
                .unwrap_or(0.0)
        } else if outcome.is_giver(i) {
            -node
                .demand
                .marginal_value(consumed[i].max(0.0), Side::Above)
                .unwrap_or(0.0)
        } else {
            0.0
        };
    }
    outcome.rcp = clearing_price(&outcome)?;
    outcome.uf = financial_utilities(&outcome, outcome.rcp);
    Ok(outcome)
}

/// Pulls solver round-off onto the nearest integer. Pivoting leaves
/// residue around 1e-13 on basic values; integer data then reproduce
/// integer utilities exactly.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= TOLERANCE * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

fn min_flow_problem(first: &RedistributionLp, optimum: f64) -> LpProblem {
    let p = &first.problem;
    let m = first.layout.edges;
    let rest = p.num_vars() - m;
    let width = 2 * m + rest;

    let mut objective = vec![0.0; width];
    let mut var_lower = vec![0.0; width];
    let mut var_upper = vec![0.0; width];
    for e in 0..m {
        objective[e] = -1.0;
        objective[m + e] = -1.0;
        var_upper[e] = p.var_upper[e].max(0.0);
        var_upper[m + e] = (-p.var_lower[e]).max(0.0);
    }
    var_lower[2 * m..].copy_from_slice(&p.var_lower[m..]);
    var_upper[2 * m..].copy_from_slice(&p.var_upper[m..]);

    let split = |coeffs: &[f64]| {
        let mut out = Vec::with_capacity(width);
        out.extend_from_slice(&coeffs[..m]);
        out.extend(coeffs[..m].iter().map(|c| -c));
        out.extend_from_slice(&coeffs[m..]);
        out
    };
    let mut rows: Vec<Row> = p
        .rows
        .iter()
        .map(|r| Row::new(split(&r.coeffs), r.lower, r.upper))
        .collect();
    rows.push(Row::new(split(&p.objective), optimum, f64::INFINITY));

    LpProblem {
        objective,
        var_lower,
        var_upper,
        rows,
    }
}

/// Midpoint of the lowest receiver increment and the highest giver
/// decrement magnitude. `None` when nobody trades.
pub fn clearing_price(outcome: &RedistributionOutcome) -> Result<Option<f64>, RedistributionError> {
    let n = outcome.mu.len();
    let receivers: Vec<f64> = (0..n)
        .filter(|&i| outcome.is_receiver(i))
        .map(|i| outcome.mu[i])
        .collect();
    let givers: Vec<f64> = (0..n)
        .filter(|&i| outcome.is_giver(i))
        .map(|i| -outcome.mu[i])
        .collect();
    match (receivers.is_empty(), givers.is_empty()) {
        (true, true) => Ok(None),
        (false, true) => Err(RedistributionError::OneSided("receivers")),
        (true, false) => Err(RedistributionError::OneSided("givers")),
        (false, false) => {
            let low = receivers.iter().copied().fold(f64::INFINITY, f64::min);
            let high = givers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(Some((low + high) / 2.0))
        }
    }
}

/// Money each node receives (positive) or pays (negative) when traded
/// quantities settle at `rcp`.
pub fn financial_utilities(outcome: &RedistributionOutcome, rcp: Option<f64>) -> Vec<f64> {
    let n = outcome.net_received.len();
    match rcp {
        None => vec![0.0; n],
        Some(price) => (0..n)
            .map(|i| {
                if outcome.is_receiver(i) || outcome.is_giver(i) {
                    -outcome.net_received[i] * price
                } else {
                    0.0
                }
            })
            .collect(),
    }
}

/// `inflow - outflow` per node for the given edge flows.
pub fn net_inflow(instance: &Instance, flows: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; instance.node_count()];
    for (edge, &f) in instance.network.edges.iter().zip(flows) {
        let (from, to) = edge.endpoints();
        out[to] += f;
        out[from] -= f;
    }
    out
}
