//! Seeded vote/district samplers (uniform and TV-bounded biased) and the
//! sample-size planner holding every closed-form budget.
//!
//! All budget formulas use the natural logarithm. Budgets are
//! `ceil(scale × formula)` with a floor of 1; where a second-stage budget
//! depends on the first (`l2` referencing `l1`), the scaled `l1` actually
//! drawn is substituted.

use num_rational::Ratio;
use num_traits::Zero;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::election::{DistrictProfile, Election};
use crate::error::{Error, Result};

/// Which of the paper-family algorithms a plan or run refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    /// District-based plurality prediction with known MOV bound.
    Alg1,
    /// District-based prediction with a pluggable per-district subpredictor.
    Generic,
    /// 2-candidate unknown-MOV prediction, district sizes capped by κ·(N/k).
    Alg3,
    /// 2-candidate unknown-MOV prediction, arbitrary district sizes.
    Alg4,
    /// Single-district median prediction with a known harmonious order.
    MedianKnown,
    /// Single-district median prediction via the sampled Condorcet winner.
    MedianUnknown,
    /// Single-district plurality prediction under a TV-bounded distribution.
    NoisySingle,
    /// District-based plurality prediction under TV-bounded distributions.
    NoisyDistricts,
    /// Additive-error MOV estimation for 2-candidate district elections.
    MovAdd,
    /// Multiplicative-error MOV wrapper around an additive oracle.
    MovMult,
}

impl AlgorithmId {
    /// The CLI-facing name.
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Alg1 => "alg1",
            AlgorithmId::Generic => "generic",
            AlgorithmId::Alg3 => "alg3",
            AlgorithmId::Alg4 => "alg4",
            AlgorithmId::MedianKnown => "median-known",
            AlgorithmId::MedianUnknown => "median-unknown",
            AlgorithmId::NoisySingle => "noisy-single",
            AlgorithmId::NoisyDistricts => "noisy-districts",
            AlgorithmId::MovAdd => "mov-add",
            AlgorithmId::MovMult => "mov-mult",
        }
    }

    pub const ALL: [AlgorithmId; 10] = [
        AlgorithmId::Alg1,
        AlgorithmId::Generic,
        AlgorithmId::Alg3,
        AlgorithmId::Alg4,
        AlgorithmId::MedianKnown,
        AlgorithmId::MedianUnknown,
        AlgorithmId::NoisySingle,
        AlgorithmId::NoisyDistricts,
        AlgorithmId::MovAdd,
        AlgorithmId::MovMult,
    ];
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlgorithmId> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::ParameterError(format!("unknown algorithm `{s}`")))
    }
}

/// Parameters feeding the budget formulas. `kappa` and `gamma` are only
/// consulted by the algorithms that use them.
#[derive(Debug, Clone, Copy)]
pub struct PlanParams {
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub scale: f64,
}

impl PlanParams {
    pub fn new(epsilon: f64, delta: f64) -> PlanParams {
        PlanParams { epsilon, delta, kappa: None, gamma: None, scale: 1.0 }
    }

    pub fn kappa(mut self, kappa: f64) -> PlanParams {
        self.kappa = Some(kappa);
        self
    }

    pub fn gamma(mut self, gamma: f64) -> PlanParams {
        self.gamma = Some(gamma);
        self
    }

    pub fn scale(mut self, scale: f64) -> PlanParams {
        self.scale = scale;
        self
    }
}

/// Sample budgets for one run (or one round of an iterative algorithm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub algorithm: AlgorithmId,
    /// District budget, or the vote budget for single-district algorithms.
    pub l1: u64,
    /// Per-district vote budget; 0 when the algorithm has no second stage.
    pub l2: u64,
}

/// Running totals of everything drawn, for exact sample-complexity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleLedger {
    pub votes_drawn: u64,
    pub districts_drawn: u64,
}

impl SampleLedger {
    pub fn new() -> SampleLedger {
        SampleLedger::default()
    }

    pub fn merge(&mut self, other: &SampleLedger) {
        self.votes_drawn += other.votes_drawn;
        self.districts_drawn += other.districts_drawn;
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParameterError(msg.to_string()))
    }
}

fn budget(scale: f64, formula: f64) -> u64 {
    ((scale * formula).ceil() as u64).max(1)
}

/// Closed-form sample budgets for `algorithm` at the given parameters.
pub fn plan(algorithm: AlgorithmId, p: &PlanParams) -> Result<SamplePlan> {
    require(p.scale > 0.0, "scale must be positive")?;
    require(p.delta > 0.0 && p.delta < 1.0, "delta must lie in (0, 1)")?;
    let eps = p.epsilon;
    let eps_check = || require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
    let gamma_of = |ctx: &str| {
        p.gamma
            .ok_or_else(|| Error::ParameterError(format!("{ctx} requires gamma")))
    };
    let kappa_of = |ctx: &str| {
        p.kappa
            .ok_or_else(|| Error::ParameterError(format!("{ctx} requires kappa")))
    };

    let (l1, l2) = match algorithm {
        AlgorithmId::Alg1 | AlgorithmId::Generic => {
            eps_check()?;
            let l1 = budget(p.scale, 1024.0 / (3.0 * eps * eps) * (4.0 / p.delta).ln());
            let l2 = if algorithm == AlgorithmId::Alg1 {
                budget(p.scale, 192.0 / (eps * eps) * (64.0 / eps).ln())
            } else {
                0
            };
            (l1, l2)
        }
        AlgorithmId::Alg3 => {
            let g = gamma_of("algorithm 3")?;
            let kappa = kappa_of("algorithm 3")?;
            require(kappa >= 4.0, "algorithm 3 requires kappa >= 4")?;
            require(g > 0.0 && g < 1.0, "gamma must lie in (0, 1)")?;
            let l1 = budget(
                p.scale,
                5.0 * kappa * kappa / (18.0 * g * g) * (4.0 / (g * p.delta)).ln(),
            );
            let l2 = budget(
                p.scale,
                5.0 * kappa * kappa / (2.0 * g * g)
                    * (2.0 * l1 as f64 / (g * p.delta)).ln(),
            );
            (l1, l2)
        }
        AlgorithmId::Alg4 => {
            let g = gamma_of("algorithm 4")?;
            require(g > 0.0 && g < 1.0, "gamma must lie in (0, 1)")?;
            let l1 = budget(p.scale, 175.0 / (2.0 * g * g) * (4.0 / (g * p.delta)).ln());
            let l2 = budget(
                p.scale,
                57344.0 / (9.0 * g.powi(4)) * (2.0 * l1 as f64 / (g * p.delta)).ln(),
            );
            (l1, l2)
        }
        AlgorithmId::MedianKnown | AlgorithmId::MedianUnknown => {
            eps_check()?;
            (budget(p.scale, 1.0 / (2.0 * eps * eps) * (4.0 / p.delta).ln()), 0)
        }
        AlgorithmId::NoisySingle => {
            eps_check()?;
            let g = p.gamma.unwrap_or(0.0);
            require(g >= 0.0 && g < eps, "noisy single district requires gamma < epsilon")?;
            (budget(p.scale, 3.0 / ((eps - g) * (eps - g)) * (2.0 / p.delta).ln()), 0)
        }
        AlgorithmId::NoisyDistricts => {
            eps_check()?;
            let g = p.gamma.unwrap_or(0.0);
            require(
                g >= 0.0 && 32.0 * g < 3.0 * eps,
                "noisy districts require 32*gamma < 3*epsilon",
            )?;
            let l1 = budget(
                p.scale,
                3072.0 / ((3.0 * eps - 32.0 * g) * (3.0 * eps - 32.0 * g))
                    * (4.0 / p.delta).ln(),
            );
            let l2 =
                budget(p.scale, 192.0 / ((eps - g) * (eps - g)) * (64.0 / eps).ln());
            (l1, l2)
        }
        AlgorithmId::MovAdd => {
            eps_check()?;
            let kappa = kappa_of("additive MOV estimation")?;
            require(kappa >= 2.0, "additive MOV estimation requires kappa >= 2")?;
            let l1 =
                budget(p.scale, 27.0 * kappa * kappa / eps.powi(4) * (16.0 / p.delta).ln());
            let l2 = budget(
                p.scale,
                27.0 * kappa * kappa / (eps * eps) * (8.0 * l1 as f64 / p.delta).ln(),
            );
            (l1, l2)
        }
        AlgorithmId::MovMult => {
            return Err(Error::ParameterError(
                "the multiplicative wrapper has no closed-form plan; \
                 it schedules calls to an additive oracle"
                    .into(),
            ));
        }
    };
    Ok(SamplePlan { algorithm, l1, l2 })
}

/// A probability distribution with exact rational weights and a declared
/// total-variation bound against uniform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasedDistribution {
    /// Per-item weight numerators over the common `denominator`.
    pub numerators: Vec<u64>,
    pub denominator: u64,
    /// The claimed TV bound γ; the actual distance never exceeds it.
    pub declared_tv: Ratio<i128>,
}

impl BiasedDistribution {
    pub fn new(
        numerators: Vec<u64>,
        denominator: u64,
        declared_tv: Ratio<i128>,
    ) -> Result<BiasedDistribution> {
        if numerators.iter().sum::<u64>() != denominator || denominator == 0 {
            return Err(Error::ParameterError(
                "distribution weights must sum to 1".into(),
            ));
        }
        let dist = BiasedDistribution { numerators, denominator, declared_tv };
        if dist.tv_distance() > declared_tv {
            return Err(Error::ParameterError(format!(
                "actual TV distance {} exceeds declared bound {declared_tv}",
                dist.tv_distance()
            )));
        }
        Ok(dist)
    }

    pub fn uniform(n: usize) -> BiasedDistribution {
        BiasedDistribution {
            numerators: vec![1; n],
            denominator: n as u64,
            declared_tv: Ratio::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Exact TV distance to the uniform distribution on the same support:
    /// the sum of positive deviations above 1/N.
    pub fn tv_distance(&self) -> Ratio<i128> {
        tv_distance(&self.numerators, self.denominator)
    }

    fn sampler(&self) -> WeightedIndex<u64> {
        WeightedIndex::new(self.numerators.iter().copied())
            .expect("weights validated at construction")
    }
}

/// TV distance between `numerators / denominator` and uniform.
pub fn tv_distance(numerators: &[u64], denominator: u64) -> Ratio<i128> {
    let n = numerators.len() as i128;
    let uniform = Ratio::new(1i128, n);
    numerators
        .iter()
        .map(|&w| {
            let w = Ratio::new(w as i128, denominator as i128);
            if w > uniform { w - uniform } else { Ratio::zero() }
        })
        .sum()
}

/// Parses a plain decimal string (like "0.15") into an exact rational.
pub fn decimal_to_ratio(s: &str) -> Result<Ratio<i128>> {
    let bad = || Error::ParseError(format!("`{s}` is not a plain decimal"));
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits = format!("{int}{frac}");
    let numer: i128 = digits.parse().map_err(|_| bad())?;
    let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    Ok(Ratio::new(numer, denom))
}

/// Draws `l` top choices from a district and returns their tally.
///
/// Voters are indexed in candidate blocks (the first `counts[0]` voters
/// prefer candidate 0, and so on); `dist`, when given, weights those voter
/// indices. With replacement the draws are i.i.d.; without replacement each
/// voter is drawn at most once and `l` must not exceed the population.
pub fn sample_votes(
    district: &DistrictProfile,
    l: u64,
    replacement: bool,
    dist: Option<&BiasedDistribution>,
    rng: &mut impl Rng,
    ledger: &mut SampleLedger,
) -> Result<Vec<u64>> {
    let n = district.population;
    let m = district.top_counts.len();
    if let Some(dist) = dist {
        if dist.len() as u64 != n {
            return Err(Error::DimensionError(format!(
                "distribution over {} voters, district has {n}",
                dist.len()
            )));
        }
    }
    if !replacement && l > n {
        return Err(Error::BudgetExceedsPopulation { budget: l, population: n });
    }

    let candidate_of = |voter: u64| {
        let mut cum = 0u64;
        for (c, &count) in district.top_counts.iter().enumerate() {
            cum += count;
            if voter < cum {
                return c;
            }
        }
        unreachable!("voter index within population")
    };

    let mut tally = vec![0u64; m];
    if replacement {
        match dist {
            None => {
                for _ in 0..l {
                    tally[candidate_of(rng.gen_range(0..n))] += 1;
                }
            }
            Some(dist) => {
                let sampler = dist.sampler();
                for _ in 0..l {
                    tally[candidate_of(sampler.sample(rng) as u64)] += 1;
                }
            }
        }
    } else {
        match dist {
            None => {
                let picks =
                    rand::seq::index::sample(rng, n as usize, l as usize);
                for voter in picks {
                    tally[candidate_of(voter as u64)] += 1;
                }
            }
            Some(dist) => {
                // Sequential weighted draws, removing each chosen voter.
                let mut weights = dist.numerators.clone();
                let mut remaining: u64 = weights.iter().sum();
                for _ in 0..l {
                    if remaining == 0 {
                        return Err(Error::ParameterError(
                            "weighted without-replacement draw exhausted \
                             all positive-weight voters"
                                .into(),
                        ));
                    }
                    let mut pick = rng.gen_range(0..remaining);
                    let mut chosen = 0usize;
                    for (i, &w) in weights.iter().enumerate() {
                        if pick < w {
                            chosen = i;
                            break;
                        }
                        pick -= w;
                    }
                    tally[candidate_of(chosen as u64)] += 1;
                    remaining -= weights[chosen];
                    weights[chosen] = 0;
                }
            }
        }
    }
    ledger.votes_drawn += l;
    Ok(tally)
}

/// Draws `l1` district indices i.i.d. (with replacement), uniformly or from
/// a distribution over districts.
pub fn sample_districts(
    election: &Election,
    l1: u64,
    dist: Option<&BiasedDistribution>,
    rng: &mut impl Rng,
    ledger: &mut SampleLedger,
) -> Result<Vec<usize>> {
    let k = election.num_districts();
    if let Some(dist) = dist {
        if dist.len() != k {
            return Err(Error::DimensionError(format!(
                "distribution over {} districts, election has {k}",
                dist.len()
            )));
        }
    }
    let indices = match dist {
        None => (0..l1).map(|_| rng.gen_range(0..k)).collect(),
        Some(dist) => {
            let sampler = dist.sampler();
            (0..l1).map(|_| sampler.sample(rng)).collect()
        }
    };
    ledger.districts_drawn += l1;
    Ok(indices)
}
