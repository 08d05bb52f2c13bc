//! The participation game: players pick integer participation levels, the
//! payoff of a profile is each player's expected shortfall over the
//! scenario outcomes. Best responses, best-response dynamics, Nash checks
//! and exhaustive equilibrium enumeration all live here.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Instance, ParticipationProfile, TOLERANCE};
use crate::redistribution::{redistribute, RedistributionError, RedistributionOutcome};
use crate::risk::{expected_shortfall, OutcomeDistribution, RiskError};

/// Default cap on profile evaluations during enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error(transparent)]
    Redistribution(#[from] RedistributionError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("player {0} does not exist")]
    Player(usize),
    #[error("grid has {count} profiles, over the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u64 },
}

/// What a player's expected shortfall is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffBasis {
    /// Consumption utility only.
    #[default]
    Uc,
    /// Consumption utility plus money received or paid.
    UcPlusUf,
}

impl PayoffBasis {
    pub fn name(self) -> &'static str {
        match self {
            PayoffBasis::Uc => "uc",
            PayoffBasis::UcPlusUf => "uc_plus_uf",
        }
    }
}

/// Order in which players update during best-response dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Players update one after another in node order, each seeing the
    /// levels already updated this round.
    #[default]
    RoundRobin,
    /// All players respond to the previous round's profile at once.
    Simultaneous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEvaluation {
    pub profile: ParticipationProfile,
    pub per_scenario: Vec<RedistributionOutcome>,
    pub payoffs: Vec<f64>,
}

/// Runs every scenario under `profile` and returns each player's payoff.
pub fn evaluate_profile(
    instance: &Instance,
    profile: &ParticipationProfile,
    basis: PayoffBasis,
) -> Result<ProfileEvaluation, GameError> {
    if profile.len() != instance.node_count() {
        return Err(GameError::Dimension(format!(
            "profile has {} entries for {} nodes",
            profile.len(),
            instance.node_count()
        )));
    }
    let per_scenario = instance
        .scenarios
        .iter()
        .map(|s| redistribute(instance, s, profile))
        .collect::<Result<Vec<_>, _>>()?;
    let payoffs = payoffs_from(instance, &per_scenario, basis)?;
    Ok(ProfileEvaluation {
        profile: profile.clone(),
        per_scenario,
        payoffs,
    })
}

fn payoffs_from(
    instance: &Instance,
    outcomes: &[RedistributionOutcome],
    basis: PayoffBasis,
) -> Result<Vec<f64>, GameError> {
    (0..instance.node_count())
        .map(|i| {
            let entries = outcomes
                .iter()
                .zip(&instance.scenarios)
                .map(|(o, s)| {
                    let v = match basis {
                        PayoffBasis::Uc => o.uc[i],
                        PayoffBasis::UcPlusUf => o.uc[i] + o.uf[i],
                    };
                    (v, s.probability)
                })
                .collect();
            let dist = OutcomeDistribution::new(entries)?;
            Ok(expected_shortfall(&dist, instance.alpha)?)
        })
        .collect()
}

/// Per-player upper bounds of the integer strategy grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    bounds: Vec<u32>,
}

impl Grid {
    pub fn new(bounds: Vec<u32>) -> Self {
        Grid { bounds }
    }

    pub fn uniform(players: usize, max_level: u32) -> Self {
        Grid {
            bounds: vec![max_level; players],
        }
    }

    /// Each player's total demand, rounded down.
    pub fn total_demand(instance: &Instance) -> Self {
        Grid {
            bounds: instance
                .network
                .nodes
                .iter()
                .map(|n| {
                    n.demand
                        .total_quantity()
                        .floor()
                        .clamp(0.0, u32::MAX as f64) as u32
                })
                .collect(),
        }
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn profile_count(&self) -> u128 {
        self.bounds
            .iter()
            .fold(1u128, |acc, &b| acc.saturating_mul(u128::from(b) + 1))
    }

    pub fn contains(&self, profile: &[u32]) -> bool {
        profile.len() == self.bounds.len() && profile.iter().zip(&self.bounds).all(|(p, b)| p <= b)
    }
}

/// Each player's last demand step width, rounded down.
pub fn default_initial_profile(instance: &Instance) -> Vec<u32> {
    instance
        .network
        .nodes
        .iter()
        .map(|n| {
            n.demand
                .steps()
                .last()
                .map(|s| s.quantity.floor().clamp(0.0, u32::MAX as f64) as u32)
                .unwrap_or(0)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub level: u32,
    pub payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    /// 1-based player id.
    pub player: usize,
    pub level: u32,
    pub payoff: f64,
    pub current_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashVerdict {
    pub is_nash: bool,
    pub payoffs: Vec<f64>,
    /// Every unilateral move that strictly improves the mover's payoff.
    pub deviations: Vec<Deviation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseTrace {
    /// The initial profile followed by the profile after each round.
    pub iterations: Vec<Vec<u32>>,
    pub converged: bool,
    pub fixed_point: Option<Vec<u32>>,
}

impl BestResponseTrace {
    pub fn rounds(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }
}

/// Payoff evaluator for one instance and payoff basis, memoising profile
/// payoffs. Safe to share across threads.
pub struct Game<'a> {
    instance: &'a Instance,
    basis: PayoffBasis,
    cache: Mutex<HashMap<Vec<u32>, Vec<f64>>>,
}

impl<'a> Game<'a> {
    pub fn new(instance: &'a Instance, basis: PayoffBasis) -> Self {
        Game {
            instance,
            basis,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    pub fn basis(&self) -> PayoffBasis {
        self.basis
    }

    fn players(&self) -> usize {
        self.instance.node_count()
    }

    fn check_profile(&self, profile: &[u32]) -> Result<(), GameError> {
        if profile.len() != self.players() {
            return Err(GameError::Dimension(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.players()
            )));
        }
        Ok(())
    }

    fn check_grid(&self, grid: &Grid) -> Result<(), GameError> {
        if grid.bounds.len() != self.players() {
            return Err(GameError::Dimension(format!(
                "grid has {} bounds for {} players",
                grid.bounds.len(),
                self.players()
            )));
        }
        Ok(())
    }

    /// Payoffs of every player under an integer profile.
    pub fn payoffs(&self, profile: &[u32]) -> Result<Vec<f64>, GameError> {
        self.check_profile(profile)?;
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(profile) {
            return Ok(hit.clone());
        }
        let eval = evaluate_profile(
            self.instance,
            &ParticipationProfile::from_grid(profile),
            self.basis,
        )?;
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(profile.to_vec(), eval.payoffs.clone());
        Ok(eval.payoffs)
    }

    /// Best level in `0..=max_level` for `player` (0-based) with the other
    /// entries of `profile` held fixed. Ties go to the smallest level.
    pub fn best_response(
        &self,
        profile: &[u32],
        player: usize,
        max_level: u32,
    ) -> Result<BestResponse, GameError> {
        self.check_profile(profile)?;
        if player >= self.players() {
            return Err(GameError::Player(player + 1));
        }
        let mut trial = profile.to_vec();
        let mut best: Option<BestResponse> = None;
        for level in 0..=max_level {
            trial[player] = level;
            let payoff = self.payoffs(&trial)?[player];
            if best.is_none_or(|b| payoff > b.payoff + TOLERANCE) {
                best = Some(BestResponse { level, payoff });
            }
        }
        Ok(best.expect("grid holds at least level 0"))
    }

    pub fn best_response_iteration(
        &self,
        initial: &[u32],
        grid: &Grid,
        schedule: Schedule,
        max_rounds: usize,
    ) -> Result<BestResponseTrace, GameError> {
        self.check_profile(initial)?;
        self.check_grid(grid)?;
        let mut iterations = vec![initial.to_vec()];
        let mut current = initial.to_vec();
        for _ in 0..max_rounds.max(1) {
            let next = match schedule {
                Schedule::RoundRobin => {
                    let mut p = current.clone();
                    for i in 0..self.players() {
                        p[i] = self.best_response(&p, i, grid.bounds[i])?.level;
                    }
                    p
                }
                Schedule::Simultaneous => (0..self.players())
                    .map(|i| Ok(self.best_response(&current, i, grid.bounds[i])?.level))
                    .collect::<Result<Vec<_>, GameError>>()?,
            };
            iterations.push(next.clone());
            if next == current {
                return Ok(BestResponseTrace {
                    iterations,
                    converged: true,
                    fixed_point: Some(next),
                });
            }
            current = next;
        }
        Ok(BestResponseTrace {
            iterations,
            converged: false,
            fixed_point: None,
        })
    }

    /// Checks every unilateral deviation on the grid.
    pub fn is_nash(&self, profile: &[u32], grid: &Grid) -> Result<NashVerdict, GameError> {
        self.check_profile(profile)?;
        self.check_grid(grid)?;
        let payoffs = self.payoffs(profile)?;
        let mut deviations = Vec::new();
        let mut trial = profile.to_vec();
        for i in 0..self.players() {
            for level in 0..=grid.bounds[i] {
                if level == profile[i] {
                    continue;
                }
                trial[i] = level;
                let payoff = self.payoffs(&trial)?[i];
                if payoff > payoffs[i] + TOLERANCE {
                    deviations.push(Deviation {
                        player: i + 1,
                        level,
                        payoff,
                        current_payoff: payoffs[i],
                    });
                }
            }
            trial[i] = profile[i];
        }
        Ok(NashVerdict {
            is_nash: deviations.is_empty(),
            payoffs,
            deviations,
        })
    }

    /// All pure equilibria on the grid, in lexicographic order.
    pub fn enumerate_equilibria(
        &self,
        grid: &Grid,
        budget: u64,
    ) -> Result<Vec<Vec<u32>>, GameError> {
        self.check_grid(grid)?;
        let count = grid.profile_count();
        if count > u128::from(budget) {
            return Err(GameError::BudgetExceeded { count, budget });
        }
        let count = count as usize;
        let radix: Vec<usize> = grid.bounds.iter().map(|&b| b as usize + 1).collect();
        let decode = |mut idx: usize| {
            let mut p = vec![0u32; radix.len()];
            for i in (0..radix.len()).rev() {
                p[i] = (idx % radix[i]) as u32;
                idx /= radix[i];
            }
            p
        };
        let table: Vec<Vec<f64>> = (0..count)
            .into_par_iter()
            .map(|idx| {
                evaluate_profile(
                    self.instance,
                    &ParticipationProfile::from_grid(&decode(idx)),
                    self.basis,
                )
                .map(|e| e.payoffs)
            })
            .collect::<Result<_, _>>()?;

        // Mixed-radix strides, most significant player first.
        let mut stride = vec![1usize; radix.len()];
        for i in (0..radix.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * radix[i + 1];
        }
        let mut out = Vec::new();
        for idx in 0..count {
            let profile = decode(idx);
            let stable = (0..radix.len()).all(|i| {
                let own = profile[i] as usize;
                let base = idx - own * stride[i];
                let current = table[idx][i];
                (0..radix[i]).all(|l| table[base + l * stride[i]][i] <= current + TOLERANCE)
            });
            if stable {
                out.push(profile);
            }
        }
        Ok(out)
    }
}

/// Best response of `player` (0-based) without a shared cache.
pub fn best_response(
    instance: &Instance,
    profile: &[u32],
    player: usize,
    max_level: u32,
    basis: PayoffBasis,
) -> Result<BestResponse, GameError> {
    Game::new(instance, basis).best_response(profile, player, max_level)
}

pub fn best_response_iteration(
    instance: &Instance,
    initial: &[u32],
    grid: &Grid,
    schedule: Schedule,
    max_rounds: usize,
    basis: PayoffBasis,
) -> Result<BestResponseTrace, GameError> {
    Game::new(instance, basis).best_response_iteration(initial, grid, schedule, max_rounds)
}

pub fn is_nash(
    instance: &Instance,
    profile: &[u32],
    grid: &Grid,
    basis: PayoffBasis,
) -> Result<NashVerdict, GameError> {
    Game::new(instance, basis).is_nash(profile, grid)
}

pub fn enumerate_equilibria(
    instance: &Instance,
    grid: &Grid,
    budget: u64,
    basis: PayoffBasis,
) -> Result<Vec<Vec<u32>>, GameError> {
    Game::new(instance, basis).enumerate_equilibria(grid, budget)
}
