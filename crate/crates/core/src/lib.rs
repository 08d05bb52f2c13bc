//! Voluntary resource-redistribution games under uncertainty.
//!
//! Players sit on the nodes of a pipeline network, each holding an uncertain
//! resource stock and a stepwise inverse demand curve. Before the
//! uncertainty resolves, every player picks a participation level that caps
//! how much it may give or receive. In each scenario a linear program then
//! routes resources to their highest-value use ([`redistribution`]), and
//! traded quantities settle at a uniform clearing price. Players judge the
//! outcome by the expected shortfall of their utility ([`risk`]), which
//! defines a game over participation levels ([`game`]).

pub mod cli;
pub mod game;
pub mod lp;
pub mod model;
pub mod redistribution;
pub mod risk;

pub use game::{
    best_response, best_response_iteration, enumerate_equilibria, evaluate_profile, is_nash,
    BestResponseTrace, Game, GameError, Grid, NashVerdict, PayoffBasis, ProfileEvaluation,
    Schedule,
};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus, Row};
pub use model::{
    validate_instance, DemandCurve, Instance, InstanceDocument, LoadError, ParticipationProfile,
    Side, ValidationErrors, ViolationKind,
};
pub use redistribution::{
    build_redistribution_lp, clearing_price, financial_utilities, redistribute,
    RedistributionError, RedistributionOutcome,
};
pub use risk::{expected_shortfall, OutcomeDistribution, RiskError};
