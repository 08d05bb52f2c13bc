//! Domain types for redistribution games: the pipeline network, stepwise
//! inverse demand curves, scenarios, and participation profiles.
//!
//! Instances are built from an [`InstanceDocument`] (the JSON file schema)
//! through [`validate_instance`], which reports every violated invariant at
//! once rather than stopping at the first.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for every equality check in the crate.
pub const TOLERANCE: f64 = 1e-9;

/// One step of a piecewise-constant inverse demand function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub price: f64,
    pub quantity: f64,
}

/// Side of a quantity at which a marginal value is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The unit just below the quantity, i.e. the interval `(q - eps, q)`.
    Below,
    /// The unit just above the quantity, i.e. the interval `(q, q + eps)`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("demand curve has no steps")]
    Empty,
    #[error("step {step}: quantity {quantity} must be strictly positive")]
    NonPositiveQuantity { step: usize, quantity: f64 },
    #[error("step {step}: price {price} must be strictly positive")]
    NonPositivePrice { step: usize, price: f64 },
    #[error("step {step}: price {price} is not below the previous step's price {previous}")]
    NonDecreasingPrice {
        step: usize,
        price: f64,
        previous: f64,
    },
    #[error("marginal value below zero quantity is undefined")]
    BelowZero,
    #[error("quantity {0} is negative or not finite")]
    BadQuantity(f64),
}

/// Stepwise inverse demand: prices strictly decreasing, quantities positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandCurve {
    steps: Vec<Step>,
}

impl DemandCurve {
    pub fn new(steps: Vec<Step>) -> Result<Self, Vec<CurveError>> {
        let problems = curve_problems(&steps);
        if problems.is_empty() {
            Ok(DemandCurve { steps })
        } else {
            Err(problems)
        }
    }

    /// Builds a curve from `(price, quantity)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, Vec<CurveError>> {
        Self::new(
            pairs
                .iter()
                .map(|&(price, quantity)| Step { price, quantity })
                .collect(),
        )
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sum of all step widths.
    pub fn total_quantity(&self) -> f64 {
        self.steps.iter().map(|s| s.quantity).sum()
    }

    /// Utility of consuming `quantity` units, filling steps greedily from
    /// the highest price. Anything beyond total demand is worth nothing.
    pub fn consumption_utility(&self, quantity: f64) -> f64 {
        let mut left = quantity.max(0.0);
        let mut utility = 0.0;
        for step in &self.steps {
            if left <= 0.0 {
                break;
            }
            let take = left.min(step.quantity);
            utility += take * step.price;
            left -= take;
        }
        utility
    }

    /// Price of the step holding the unit just below or just above
    /// `quantity`. At an exact boundary `Below` reads the higher-price step
    /// and `Above` the lower-price one. Zero beyond total demand.
    ///
    /// Quantities within [`TOLERANCE`] of a step boundary are treated as
    /// sitting on it.
    pub fn marginal_value(&self, quantity: f64, side: Side) -> Result<f64, CurveError> {
        if !quantity.is_finite() || quantity < -TOLERANCE {
            return Err(CurveError::BadQuantity(quantity));
        }
        if side == Side::Below && quantity <= TOLERANCE {
            return Err(CurveError::BelowZero);
        }
        let mut start = 0.0;
        for step in &self.steps {
            let end = start + step.quantity;
            let hit = match side {
                Side::Below => quantity > start + TOLERANCE && quantity <= end + TOLERANCE,
                Side::Above => quantity >= start - TOLERANCE && quantity < end - TOLERANCE,
            };
            if hit {
                return Ok(step.price);
            }
            start = end;
        }
        Ok(0.0)
    }

    /// Corner points of the step function, for plotting.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.steps.len());
        let mut start = 0.0;
        for step in &self.steps {
            out.push((start, step.price));
            start += step.quantity;
            out.push((start, step.price));
        }
        out
    }
}

fn curve_problems(steps: &[Step]) -> Vec<CurveError> {
    let mut problems = Vec::new();
    if steps.is_empty() {
        problems.push(CurveError::Empty);
    }
    for (i, step) in steps.iter().enumerate() {
        if !(step.quantity > 0.0) || !step.quantity.is_finite() {
            problems.push(CurveError::NonPositiveQuantity {
                step: i + 1,
                quantity: step.quantity,
            });
        }
        if !(step.price > 0.0) || !step.price.is_finite() {
            problems.push(CurveError::NonPositivePrice {
                step: i + 1,
                price: step.price,
            });
        }
        if i > 0 && !(step.price < steps[i - 1].price) {
            problems.push(CurveError::NonDecreasingPrice {
                step: i + 1,
                price: step.price,
                previous: steps[i - 1].price,
            });
        }
    }
    problems
}

/// A player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    /// 1-based id.
    pub id: usize,
    pub name: String,
    pub demand: DemandCurve,
}

/// A pipeline with a reference direction `from -> to`. Positive flow runs
/// along the reference direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    /// 1-based id.
    pub id: usize,
    /// 1-based node id of the tail.
    pub from: usize,
    /// 1-based node id of the head.
    pub to: usize,
    /// Largest transfer against the reference direction, as a value `<= 0`.
    pub cap_neg: f64,
    /// Largest transfer along the reference direction, `>= 0`.
    pub cap_pos: f64,
}

impl Edge {
    /// 0-based positions of `(from, to)`.
    pub fn endpoints(&self) -> (usize, usize) {
        (self.from - 1, self.to - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// One state of nature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// 1-based id.
    pub id: usize,
    pub probability: f64,
    /// Resources per node, ordered by node id.
    pub resources: Vec<f64>,
    /// Available capacity against each edge's reference direction, `<= 0`.
    pub cap_neg: Vec<f64>,
    /// Available capacity along each edge's reference direction, `>= 0`.
    pub cap_pos: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub network: Network,
    pub scenarios: Vec<Scenario>,
    /// Expected-shortfall level in `(0, 1]`.
    pub alpha: f64,
}

impl Instance {
    pub fn node_count(&self) -> usize {
        self.network.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.network.edge_count()
    }

    /// Looks up a scenario by its 1-based id.
    pub fn scenario(&self, id: usize) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    /// Copy of the instance with a different expected-shortfall level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Instance, ValidationErrors> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ValidationErrors(vec![Violation::new(
                ViolationKind::Value,
                "alpha",
                format!("alpha {alpha} must lie in (0, 1]"),
            )]));
        }
        let mut out = self.clone();
        out.alpha = alpha;
        Ok(out)
    }

    /// Parses and validates a JSON instance document.
    pub fn from_json_slice(bytes: &[u8]) -> Result<Instance, LoadError> {
        let doc: InstanceDocument = serde_json::from_slice(bytes)?;
        Ok(validate_instance(&doc)?)
    }

    pub fn from_json_str(text: &str) -> Result<Instance, LoadError> {
        Self::from_json_slice(text.as_bytes())
    }

    /// The document this instance was (or could have been) loaded from.
    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            nodes: self
                .network
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    id: n.id as i64,
                    name: n.name.clone(),
                    demand: n.demand.steps().to_vec(),
                })
                .collect(),
            edges: self
                .network
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id as i64,
                    from: e.from as i64,
                    to: e.to as i64,
                    cap_neg: e.cap_neg,
                    cap_pos: e.cap_pos,
                })
                .collect(),
            scenarios: self
                .scenarios
                .iter()
                .map(|s| ScenarioDoc {
                    id: s.id as i64,
                    probability: s.probability,
                    resources: s.resources.clone(),
                    cap_neg: s.cap_neg.clone(),
                    cap_pos: s.cap_pos.clone(),
                })
                .collect(),
            alpha: self.alpha,
        }
    }
}

/// Participation levels, one per node. Zero means the player stays out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipationProfile {
    levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("participation level {value} for node {node} must be finite and >= 0")]
    Negative { node: usize, value: f64 },
    #[error("profile has {got} entries, expected {expected}")]
    Length { got: usize, expected: usize },
}

impl ParticipationProfile {
    pub fn new(levels: Vec<f64>) -> Result<Self, ProfileError> {
        for (i, &v) in levels.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ProfileError::Negative {
                    node: i + 1,
                    value: v,
                });
            }
        }
        Ok(ParticipationProfile { levels })
    }

    pub fn zeros(n: usize) -> Self {
        ParticipationProfile {
            levels: vec![0.0; n],
        }
    }

    pub fn from_grid(levels: &[u32]) -> Self {
        ParticipationProfile {
            levels: levels.iter().map(|&l| f64::from(l)).collect(),
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn check_len(&self, expected: usize) -> Result<(), ProfileError> {
        if self.levels.len() == expected {
            Ok(())
        } else {
            Err(ProfileError::Length {
                got: self.levels.len(),
                expected,
            })
        }
    }

    /// Integer grid levels, if every entry is a whole number.
    pub fn to_grid(&self) -> Option<Vec<u32>> {
        self.levels
            .iter()
            .map(|&v| {
                if v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                    Some(v as u32)
                } else {
                    None
                }
            })
            .collect()
    }
}

impl fmt::Display for ParticipationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

/// JSON instance document. Ids are 1-based and must match array order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    pub scenarios: Vec<ScenarioDoc>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: i64,
    #[serde(default)]
    pub name: String,
    pub demand: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: i64,
    pub from: i64,
    pub to: i64,
    pub cap_neg: f64,
    pub cap_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub id: i64,
    pub probability: f64,
    pub resources: Vec<f64>,
    pub cap_neg: Vec<f64>,
    pub cap_pos: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    ProbabilitySum,
    CapacityOrder,
    DemandCurve,
    Topology,
    Dimension,
    Value,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::ProbabilitySum => "ProbabilitySumError",
            ViolationKind::CapacityOrder => "CapacityOrderError",
            ViolationKind::DemandCurve => "DemandCurveError",
            ViolationKind::Topology => "TopologyError",
            ViolationKind::Dimension => "DimensionError",
            ViolationKind::Value => "ValueError",
        }
    }
}

/// One broken invariant, located by a JSON path into the document.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            kind,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at `{}`: {}",
            self.kind.name(),
            self.path,
            self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationErrors(pub Vec<Violation>);

impl ValidationErrors {
    pub fn violations(&self) -> &[Violation] {
        &self.0
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.0.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invariant violation(s)", self.0.len())?;
        for v in &self.0 {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed instance document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
}

/// Checks a parsed document against every model invariant.
pub fn validate_instance(doc: &InstanceDocument) -> Result<Instance, ValidationErrors> {
    use ViolationKind::*;
    let mut out: Vec<Violation> = Vec::new();
    let n = doc.nodes.len();
    let m = doc.edges.len();

    if n == 0 {
        out.push(Violation::new(
            Dimension,
            "nodes",
            "at least one node is required",
        ));
    }

    let mut nodes = Vec::with_capacity(n);
    for (i, node) in doc.nodes.iter().enumerate() {
        if node.id != (i as i64) + 1 {
            out.push(Violation::new(
                Topology,
                format!("nodes[{i}].id"),
                format!(
                    "id {} does not match position (expected {})",
                    node.id,
                    i + 1
                ),
            ));
        }
        match crate::model::DemandCurve::new(node.demand.clone()) {
            Ok(curve) => nodes.push(Node {
                id: i + 1,
                name: if node.name.is_empty() {
                    format!("node {}", i + 1)
                } else {
                    node.name.clone()
                },
                demand: curve,
            }),
            Err(problems) => {
                for p in problems {
                    let path = match &p {
                        CurveError::NonPositiveQuantity { step, .. } => {
                            format!("nodes[{i}].demand[{}].quantity", step - 1)
                        }
                        CurveError::NonPositivePrice { step, .. }
                        | CurveError::NonDecreasingPrice { step, .. } => {
                            format!("nodes[{i}].demand[{}].price", step - 1)
                        }
                        _ => format!("nodes[{i}].demand"),
                    };
                    out.push(Violation::new(DemandCurve, path, p.to_string()));
                }
            }
        }
    }

    let mut edges = Vec::with_capacity(m);
    for (j, edge) in doc.edges.iter().enumerate() {
        let mut ok = true;
        if edge.id != (j as i64) + 1 {
            out.push(Violation::new(
                Topology,
                format!("edges[{j}].id"),
                format!(
                    "id {} does not match position (expected {})",
                    edge.id,
                    j + 1
                ),
            ));
        }
        for (field, end) in [("from", edge.from), ("to", edge.to)] {
            if end < 1 || end > n as i64 {
                ok = false;
                out.push(Violation::new(
                    Topology,
                    format!("edges[{j}].{field}"),
                    format!("endpoint {end} is not a node id in 1..={n}"),
                ));
            }
        }
        if edge.from == edge.to {
            ok = false;
            out.push(Violation::new(
                Topology,
                format!("edges[{j}].to"),
                format!("edge is a self-loop on node {}", edge.from),
            ));
        }
        if !(edge.cap_neg <= 0.0) || !edge.cap_neg.is_finite() {
            ok = false;
            out.push(Violation::new(
                CapacityOrder,
                format!("edges[{j}].cap_neg"),
                format!("cap_neg {} must be finite and <= 0", edge.cap_neg),
            ));
        }
        if !(edge.cap_pos >= 0.0) || !edge.cap_pos.is_finite() {
            ok = false;
            out.push(Violation::new(
                CapacityOrder,
                format!("edges[{j}].cap_pos"),
                format!("cap_pos {} must be finite and >= 0", edge.cap_pos),
            ));
        }
        if ok {
            edges.push(Edge {
                id: j + 1,
                from: edge.from as usize,
                to: edge.to as usize,
                cap_neg: edge.cap_neg,
                cap_pos: edge.cap_pos,
            });
        }
    }

    if doc.scenarios.is_empty() {
        out.push(Violation::new(
            Dimension,
            "scenarios",
            "at least one scenario is required",
        ));
    }
    let mut scenarios = Vec::with_capacity(doc.scenarios.len());
    let mut prob_sum = 0.0;
    for (k, sc) in doc.scenarios.iter().enumerate() {
        if sc.id != (k as i64) + 1 {
            out.push(Violation::new(
                Topology,
                format!("scenarios[{k}].id"),
                format!("id {} does not match position (expected {})", sc.id, k + 1),
            ));
        }
        if !(sc.probability > 0.0 && sc.probability <= 1.0) {
            out.push(Violation::new(
                Value,
                format!("scenarios[{k}].probability"),
                format!("probability {} must lie in (0, 1]", sc.probability),
            ));
        }
        prob_sum += sc.probability;
        if sc.resources.len() != n {
            out.push(Violation::new(
                Dimension,
                format!("scenarios[{k}].resources"),
                format!("has {} entries, expected {n}", sc.resources.len()),
            ));
        }
        for (i, &r) in sc.resources.iter().enumerate() {
            if !(r >= 0.0) || !r.is_finite() {
                out.push(Violation::new(
                    Value,
                    format!("scenarios[{k}].resources[{i}]"),
                    format!("resource {r} must be finite and >= 0"),
                ));
            }
        }
        for (field, caps) in [("cap_neg", &sc.cap_neg), ("cap_pos", &sc.cap_pos)] {
            if caps.len() != m {
                out.push(Violation::new(
                    Dimension,
                    format!("scenarios[{k}].{field}"),
                    format!("has {} entries, expected {m}", caps.len()),
                ));
            }
        }
        for (j, edge) in doc.edges.iter().enumerate() {
            if let Some(&c) = sc.cap_neg.get(j) {
                if !(c <= 0.0 && c >= edge.cap_neg) {
                    out.push(Violation::new(
                        CapacityOrder,
                        format!("scenarios[{k}].cap_neg[{j}]"),
                        format!("{c} must lie in [{}, 0]", edge.cap_neg),
                    ));
                }
            }
            if let Some(&c) = sc.cap_pos.get(j) {
                if !(c >= 0.0 && c <= edge.cap_pos) {
                    out.push(Violation::new(
                        CapacityOrder,
                        format!("scenarios[{k}].cap_pos[{j}]"),
                        format!("{c} must lie in [0, {}]", edge.cap_pos),
                    ));
                }
            }
        }
        scenarios.push(Scenario {
            id: k + 1,
            probability: sc.probability,
            resources: sc.resources.clone(),
            cap_neg: sc.cap_neg.clone(),
            cap_pos: sc.cap_pos.clone(),
        });
    }
    if !doc.scenarios.is_empty() && !((prob_sum - 1.0).abs() <= TOLERANCE) {
        out.push(Violation::new(
            ProbabilitySum,
            "scenarios[*].probability",
            format!("probabilities sum to {prob_sum}, expected 1"),
        ));
    }

    if !(doc.alpha > 0.0 && doc.alpha <= 1.0) {
        out.push(Violation::new(
            Value,
            "alpha",
            format!("alpha {} must lie in (0, 1]", doc.alpha),
        ));
    }

    if !out.is_empty() {
        return Err(ValidationErrors(out));
    }
    Ok(Instance {
        network: Network { nodes, edges },
        scenarios,
        alpha: doc.alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn player1() -> DemandCurve {
        DemandCurve::from_pairs(&[(25.0, 3.0), (21.0, 4.0), (13.0, 5.0)]).unwrap()
    }
    fn player2() -> DemandCurve {
        DemandCurve::from_pairs(&[(20.0, 5.0), (17.0, 9.0), (11.0, 10.0)]).unwrap()
    }
    fn player3() -> DemandCurve {
        DemandCurve::from_pairs(&[(25.0, 7.0), (18.0, 4.0), (14.0, 4.0)]).unwrap()
    }

    #[test]
    fn utility_matches_reference_values() {
        assert_eq!(player1().consumption_utility(12.0), 224.0);
        assert_eq!(player3().consumption_utility(13.0), 275.0);
        assert_eq!(player2().consumption_utility(0.0), 0.0);
        assert_eq!(player1().consumption_utility(40.0), 224.0);
    }

    #[test]
    fn marginal_values_at_boundaries() {
        assert_eq!(player3().marginal_value(10.0, Side::Below).unwrap(), 18.0);
        assert_eq!(player2().marginal_value(14.0, Side::Below).unwrap(), 17.0);
        assert_eq!(player1().marginal_value(10.0, Side::Above).unwrap(), 13.0);
        assert_eq!(player1().marginal_value(7.0, Side::Below).unwrap(), 21.0);
        assert_eq!(player1().marginal_value(7.0, Side::Above).unwrap(), 13.0);
        assert_eq!(player1().marginal_value(12.0, Side::Above).unwrap(), 0.0);
        assert_eq!(player1().marginal_value(30.0, Side::Below).unwrap(), 0.0);
        assert_eq!(player1().marginal_value(0.0, Side::Above).unwrap(), 25.0);
        assert_eq!(
            player1().marginal_value(0.0, Side::Below),
            Err(CurveError::BelowZero)
        );
    }

    #[test]
    fn marginal_value_snaps_near_boundary() {
        let c = player1();
        assert_eq!(c.marginal_value(10.0 - 1e-11, Side::Above).unwrap(), 13.0);
        assert_eq!(c.marginal_value(7.0 - 1e-11, Side::Above).unwrap(), 13.0);
        assert_eq!(c.marginal_value(7.0 + 1e-11, Side::Below).unwrap(), 21.0);
    }

    #[test]
    fn curve_rejects_bad_steps() {
        let err = DemandCurve::from_pairs(&[(10.0, 1.0), (10.0, 0.0), (-1.0, 2.0)]).unwrap_err();
        assert!(err.contains(&CurveError::NonPositiveQuantity {
            step: 2,
            quantity: 0.0
        }));
        assert!(err
            .iter()
            .any(|e| matches!(e, CurveError::NonDecreasingPrice { step: 2, .. })));
        assert!(err
            .iter()
            .any(|e| matches!(e, CurveError::NonPositivePrice { step: 3, .. })));
        assert_eq!(
            DemandCurve::new(vec![]).unwrap_err(),
            vec![CurveError::Empty]
        );
    }

    #[test]
    fn points_trace_the_steps() {
        let pts = player1().points();
        assert_eq!(
            pts,
            vec![
                (0.0, 25.0),
                (3.0, 25.0),
                (3.0, 21.0),
                (7.0, 21.0),
                (7.0, 13.0),
                (12.0, 13.0)
            ]
        );
    }

    #[test]
    fn profile_rejects_negative() {
        assert!(ParticipationProfile::new(vec![1.0, -0.5]).is_err());
        assert!(ParticipationProfile::new(vec![1.0, f64::NAN]).is_err());
        let p = ParticipationProfile::new(vec![2.0, 0.0, 4.0]).unwrap();
        assert_eq!(p.to_grid(), Some(vec![2, 0, 4]));
        assert_eq!(p.to_string(), "[2, 0, 4]");
        assert_eq!(
            ParticipationProfile::new(vec![0.5]).unwrap().to_grid(),
            None
        );
    }
}
