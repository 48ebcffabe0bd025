//! Sampling-based winner predictors: district-based plurality with known
//! and unknown margin of victory, single-district median with known or
//! hidden harmonious order, and the TV-bounded noisy variants.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::election::{
    Candidate, DistrictProfile, Election, HarmoniousOrder, RankingGroup, TieBreak,
};
use crate::error::{Error, Result};
use crate::rules::{
    condorcet_or_max_min_margin, maj_and_secmaj, median_winner, pairwise_matrix,
    plurality_winner,
};
use crate::sampling::{
    plan, sample_districts, sample_votes, AlgorithmId, BiasedDistribution, PlanParams,
    SampleLedger,
};

/// Default floor for the shrinking γ of the iterative algorithms; reaching
/// it (an effectively tied election) raises `IterationCap`.
pub const DEFAULT_GAMMA_FLOOR: f64 = 1.0 / (1 << 20) as f64;

/// Winner of one sampled district, for stage diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistrictPrediction {
    pub district: usize,
    pub winner: Candidate,
}

/// Result of one predictor run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionOutcome {
    pub winner: Candidate,
    /// Everything drawn during the run.
    pub samples: SampleLedger,
    /// Predicted winner per sampled district (final round for iterative
    /// algorithms); empty for single-district predictors.
    pub stage_log: Vec<DistrictPrediction>,
    /// Halting round of an iterative algorithm (1-based).
    pub terminated_at: Option<u32>,
    /// True when the unknown-order median path found no sampled Condorcet
    /// winner and fell back to the max-min pairwise margin.
    pub condorcet_fallback: bool,
}

impl PredictionOutcome {
    fn simple(winner: Candidate, samples: SampleLedger) -> PredictionOutcome {
        PredictionOutcome {
            winner,
            samples,
            stage_log: Vec::new(),
            terminated_at: None,
            condorcet_fallback: false,
        }
    }
}

/// A per-district winner predictor usable inside the generic district-based
/// composition: given sampling access to district `j`, predict a winner that
/// is ε·n_j-close with probability ≥ 1−δ.
pub trait DistrictSubPredictor {
    fn predict(
        &self,
        election: &Election,
        district: usize,
        epsilon: f64,
        delta: f64,
        rng: &mut dyn rand::RngCore,
        ledger: &mut SampleLedger,
    ) -> Result<Candidate>;
}

/// Plurality subpredictor: samples votes with replacement and returns the
/// sampled plurality winner. `budget_override` replaces the closed-form
/// budget, allowing exact composition with externally planned l2 values.
pub struct PluralitySub {
    pub tie: TieBreak,
    pub scale: f64,
    pub budget_override: Option<u64>,
}

impl DistrictSubPredictor for PluralitySub {
    fn predict(
        &self,
        election: &Election,
        district: usize,
        epsilon: f64,
        delta: f64,
        rng: &mut dyn rand::RngCore,
        ledger: &mut SampleLedger,
    ) -> Result<Candidate> {
        let l = match self.budget_override {
            Some(l) => l,
            None => {
                plan(
                    AlgorithmId::NoisySingle,
                    &PlanParams::new(epsilon, delta).scale(self.scale),
                )?
                .l1
            }
        };
        let tally = sample_votes(&election.districts[district], l, true, None, &mut &mut *rng, ledger)?;
        Ok(plurality_winner(&tally, &self.tie))
    }
}

/// Median subpredictor: single-district median prediction with the
/// district's harmonious order.
pub struct MedianSub {
    pub scale: f64,
}

impl DistrictSubPredictor for MedianSub {
    fn predict(
        &self,
        election: &Election,
        district: usize,
        epsilon: f64,
        delta: f64,
        rng: &mut dyn rand::RngCore,
        ledger: &mut SampleLedger,
    ) -> Result<Candidate> {
        let order = election.order_for_district(district).ok_or_else(|| {
            Error::RuleInapplicable("median subpredictor needs a harmonious order".into())
        })?;
        let l = plan(
            AlgorithmId::MedianKnown,
            &PlanParams::new(epsilon, delta).scale(self.scale),
        )?
        .l1;
        let tally = sample_votes(&election.districts[district], l, true, None, &mut &mut *rng, ledger)?;
        Ok(median_winner(&tally, order))
    }
}

/// Census subpredictor: reads the whole district (χ = n_j) and returns the
/// exact plurality winner.
pub struct CensusSub {
    pub tie: TieBreak,
}

impl DistrictSubPredictor for CensusSub {
    fn predict(
        &self,
        election: &Election,
        district: usize,
        _epsilon: f64,
        _delta: f64,
        rng: &mut dyn rand::RngCore,
        ledger: &mut SampleLedger,
    ) -> Result<Candidate> {
        let d = &election.districts[district];
        let tally = sample_votes(d, d.population, false, None, &mut &mut *rng, ledger)?;
        Ok(plurality_winner(&tally, &self.tie))
    }
}

/// District-based plurality prediction under a known MOV ≥ εN bound:
/// sample l1 districts, predict each from l2 votes, return the majority.
pub fn predict_plurality_known_mov(
    election: &Election,
    epsilon: f64,
    delta: f64,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<PredictionOutcome> {
    let plan = plan(AlgorithmId::Alg1, &PlanParams::new(epsilon, delta).scale(scale))?;
    let mut ledger = SampleLedger::new();
    let picks = sample_districts(election, plan.l1, None, rng, &mut ledger)?;
    let mut stage_log = Vec::with_capacity(picks.len());
    for j in picks {
        let tally =
            sample_votes(&election.districts[j], plan.l2, true, None, rng, &mut ledger)?;
        stage_log.push(DistrictPrediction {
            district: j,
            winner: plurality_winner(&tally, tie),
        });
    }
    let winners: Vec<Candidate> = stage_log.iter().map(|p| p.winner).collect();
    let (winner, _) = maj_and_secmaj(&winners, election.num_candidates, tie);
    Ok(PredictionOutcome {
        winner,
        samples: ledger,
        stage_log,
        terminated_at: None,
        condorcet_fallback: false,
    })
}

/// Generic district-based composition: sample l1 districts and run `sub` on
/// each at closeness ε/4 and confidence δ' = ε/32.
pub fn predict_generic_known_mov(
    election: &Election,
    sub: &dyn DistrictSubPredictor,
    epsilon: f64,
    delta: f64,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<PredictionOutcome> {
    let plan = plan(AlgorithmId::Generic, &PlanParams::new(epsilon, delta).scale(scale))?;
    let mut ledger = SampleLedger::new();
    let picks = sample_districts(election, plan.l1, None, rng, &mut ledger)?;
    let mut stage_log = Vec::with_capacity(picks.len());
    for j in picks {
        let winner =
            sub.predict(election, j, epsilon / 4.0, epsilon / 32.0, rng, &mut ledger)?;
        stage_log.push(DistrictPrediction { district: j, winner });
    }
    let winners: Vec<Candidate> = stage_log.iter().map(|p| p.winner).collect();
    let (winner, _) = maj_and_secmaj(&winners, election.num_candidates, tie);
    Ok(PredictionOutcome {
        winner,
        samples: ledger,
        stage_log,
        terminated_at: None,
        condorcet_fallback: false,
    })
}

fn ratio_from_f64(x: f64, what: &str) -> Result<Ratio<i128>> {
    Ratio::<i128>::approximate_float(x)
        .ok_or_else(|| Error::ParameterError(format!("{what} {x} is not representable")))
}

/// Shared body of the two iterative unknown-MOV predictors. Per round,
/// draws the round's plan, counts districts where a candidate clears the
/// vote-share threshold, and halts when one clears the district-count
/// threshold. Thresholds are compared in exact rational arithmetic.
#[allow(clippy::too_many_arguments)]
fn predict_iterative_2cand(
    election: &Election,
    algorithm: AlgorithmId,
    delta: f64,
    kappa: Option<f64>,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
    gamma_floor: f64,
) -> Result<PredictionOutcome> {
    if election.num_candidates != 2 {
        return Err(Error::DimensionError(format!(
            "iterative unknown-MOV prediction needs 2 candidates, got {}",
            election.num_candidates
        )));
    }
    let (start, shrink): (Ratio<i128>, i128) = match algorithm {
        AlgorithmId::Alg3 => (Ratio::new(1, 3), 3),
        AlgorithmId::Alg4 => (Ratio::new(1, 2), 2),
        _ => unreachable!("only Algorithms 3 and 4 iterate"),
    };
    let kappa_ratio = kappa.map(|k| ratio_from_f64(k, "kappa")).transpose()?;
    if let (AlgorithmId::Alg3, Some(kappa)) = (algorithm, kappa) {
        let n = election.total_population() as f64;
        let k = election.num_districts() as f64;
        let max = election.districts.iter().map(|d| d.population).max().unwrap() as f64;
        if max > kappa * n / k {
            return Err(Error::ParameterError(format!(
                "largest district ({max}) exceeds kappa*N/k = {}",
                kappa * n / k
            )));
        }
    }

    let mut gamma = start;
    let mut ledger = SampleLedger::new();
    let mut round = 0u32;
    loop {
        round += 1;
        let gamma_f = gamma.to_f64().expect("small rational");
        if gamma_f < gamma_floor {
            return Err(Error::IterationCap(format!(
                "gamma fell below the floor {gamma_floor} after {} rounds \
                 without a decisive candidate",
                round - 1
            )));
        }
        let mut params = PlanParams::new(0.5, delta).gamma(gamma_f).scale(scale);
        params.kappa = kappa;
        let round_plan = plan(algorithm, &params)?;

        // Vote-share and district-count thresholds for this round.
        let (district_thresh, vote_thresh): (Ratio<i128>, Ratio<i128>) = match algorithm {
            AlgorithmId::Alg3 => {
                let kappa = kappa_ratio.expect("checked by plan");
                (
                    Ratio::new(1, 2) + Ratio::from_integer(3) * gamma / kappa,
                    Ratio::new(1, 2) + Ratio::from_integer(2) * gamma / kappa,
                )
            }
            AlgorithmId::Alg4 => (
                Ratio::new(1, 2) + gamma / Ratio::from_integer(5),
                Ratio::new(1, 2) + Ratio::from_integer(5) * gamma * gamma / Ratio::from_integer(128),
            ),
            _ => unreachable!(),
        };

        let picks = sample_districts(election, round_plan.l1, None, rng, &mut ledger)?;
        let mut strong_wins = [0i128; 2];
        let mut stage_log = Vec::with_capacity(picks.len());
        for j in picks {
            let tally = sample_votes(
                &election.districts[j],
                round_plan.l2,
                true,
                None,
                rng,
                &mut ledger,
            )?;
            let district_winner = plurality_winner(&tally, tie);
            stage_log.push(DistrictPrediction { district: j, winner: district_winner });
            for x in 0..2usize {
                let share = Ratio::new(tally[x] as i128, round_plan.l2 as i128);
                if share >= vote_thresh {
                    strong_wins[x] += 1;
                }
            }
        }
        for x in 0..2usize {
            let fraction = Ratio::new(strong_wins[x], round_plan.l1 as i128);
            if fraction >= district_thresh {
                return Ok(PredictionOutcome {
                    winner: Candidate(x as u32),
                    samples: ledger,
                    stage_log,
                    terminated_at: Some(round),
                    condorcet_fallback: false,
                });
            }
        }
        gamma /= shrink;
    }
}

/// 2-candidate unknown-MOV prediction for elections whose districts are
/// population-capped by κ·(N/k): shrink γ by 3 per round.
#[allow(clippy::too_many_arguments)]
pub fn predict_2cand_unknown_mov_bounded(
    election: &Election,
    delta: f64,
    kappa: f64,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
    gamma_floor: f64,
) -> Result<PredictionOutcome> {
    predict_iterative_2cand(
        election,
        AlgorithmId::Alg3,
        delta,
        Some(kappa),
        tie,
        rng,
        scale,
        gamma_floor,
    )
}

/// 2-candidate unknown-MOV prediction for arbitrary district sizes:
/// shrink γ by 2 per round.
pub fn predict_2cand_unknown_mov_arbitrary(
    election: &Election,
    delta: f64,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
    gamma_floor: f64,
) -> Result<PredictionOutcome> {
    predict_iterative_2cand(
        election,
        AlgorithmId::Alg4,
        delta,
        None,
        tie,
        rng,
        scale,
        gamma_floor,
    )
}

/// Single-district median prediction.
///
/// With `order` given, the sampled-prefix median of l drawn votes. With
/// `order` hidden, the profile's full rankings are sampled, the budget is
/// rounded up to odd so a single-peaked sample has a Condorcet winner, and
/// that sampled Condorcet winner is returned.
pub fn predict_median_single(
    district: &DistrictProfile,
    epsilon: f64,
    delta: f64,
    order: Option<&HarmoniousOrder>,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<PredictionOutcome> {
    let m = district.top_counts.len();
    let algorithm = if order.is_some() {
        AlgorithmId::MedianKnown
    } else {
        AlgorithmId::MedianUnknown
    };
    let mut l = plan(algorithm, &PlanParams::new(epsilon, delta).scale(scale))?.l1;
    let mut ledger = SampleLedger::new();

    if let Some(order) = order {
        let tally = sample_votes(district, l, true, None, rng, &mut ledger)?;
        return Ok(PredictionOutcome::simple(median_winner(&tally, order), ledger));
    }

    let rankings = district.rankings.as_ref().ok_or_else(|| {
        Error::RuleInapplicable(
            "unknown-order median prediction needs full rankings".into(),
        )
    })?;
    if l % 2 == 0 {
        l += 1;
    }
    // Draw voter indices and map each to its ranking group.
    let n = district.population;
    let mut group_tally = vec![0u64; rankings.len()];
    for _ in 0..l {
        let voter = rng.gen_range(0..n);
        let mut cum = 0u64;
        for (g, group) in rankings.iter().enumerate() {
            cum += group.mult;
            if voter < cum {
                group_tally[g] += 1;
                break;
            }
        }
    }
    ledger.votes_drawn += l;

    // Best-effort single-peakedness screen: under any harmonious order a
    // bottom-ranked candidate must be one of the two extremes, so more than
    // two distinct bottoms certify a violation.
    let mut bottoms: Vec<u32> = rankings
        .iter()
        .zip(&group_tally)
        .filter(|(_, &count)| count > 0)
        .map(|(g, _)| *g.order.order().last().expect("non-empty ranking"))
        .collect();
    bottoms.sort_unstable();
    bottoms.dedup();
    if bottoms.len() > 2 {
        return Err(Error::NotSinglePeaked(format!(
            "sampled rankings have {} distinct bottom candidates",
            bottoms.len()
        )));
    }

    let sampled_groups: Vec<RankingGroup> = rankings
        .iter()
        .zip(&group_tally)
        .filter(|(_, &count)| count > 0)
        .map(|(g, &count)| RankingGroup { order: g.order.clone(), mult: count })
        .collect();
    let matrix = pairwise_matrix(&sampled_groups, m);
    let (winner, fallback) = condorcet_or_max_min_margin(&matrix, tie);
    let mut outcome = PredictionOutcome::simple(winner, ledger);
    outcome.condorcet_fallback = fallback;
    Ok(outcome)
}

/// Single-district plurality prediction when votes are drawn from a
/// distribution within TV distance γ of uniform.
#[allow(clippy::too_many_arguments)]
pub fn predict_plurality_noisy_single(
    district: &DistrictProfile,
    epsilon: f64,
    delta: f64,
    bias: &BiasedDistribution,
    replacement: bool,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<PredictionOutcome> {
    let gamma = bias.declared_tv.to_f64().expect("small rational");
    let l = plan(
        AlgorithmId::NoisySingle,
        &PlanParams::new(epsilon, delta).gamma(gamma).scale(scale),
    )?
    .l1;
    let mut ledger = SampleLedger::new();
    let tally = sample_votes(district, l, replacement, Some(bias), rng, &mut ledger)?;
    Ok(PredictionOutcome::simple(plurality_winner(&tally, tie), ledger))
}

/// District-based plurality prediction when both the district draw and each
/// district's vote draw are TV-bounded.
#[allow(clippy::too_many_arguments)]
pub fn predict_plurality_noisy_districts(
    election: &Election,
    epsilon: f64,
    delta: f64,
    district_bias: &BiasedDistribution,
    vote_biases: &[BiasedDistribution],
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<PredictionOutcome> {
    if vote_biases.len() != election.num_districts() {
        return Err(Error::DimensionError(format!(
            "{} vote distributions for {} districts",
            vote_biases.len(),
            election.num_districts()
        )));
    }
    let gamma = vote_biases
        .iter()
        .map(|b| b.declared_tv)
        .chain(std::iter::once(district_bias.declared_tv))
        .max()
        .expect("at least one distribution")
        .to_f64()
        .expect("small rational");
    let plan = plan(
        AlgorithmId::NoisyDistricts,
        &PlanParams::new(epsilon, delta).gamma(gamma).scale(scale),
    )?;
    let mut ledger = SampleLedger::new();
    let picks = sample_districts(election, plan.l1, Some(district_bias), rng, &mut ledger)?;
    let mut stage_log = Vec::with_capacity(picks.len());
    for j in picks {
        let tally = sample_votes(
            &election.districts[j],
            plan.l2,
            true,
            Some(&vote_biases[j]),
            rng,
            &mut ledger,
        )?;
        stage_log.push(DistrictPrediction {
            district: j,
            winner: plurality_winner(&tally, tie),
        });
    }
    let winners: Vec<Candidate> = stage_log.iter().map(|p| p.winner).collect();
    let (winner, _) = maj_and_secmaj(&winners, election.num_candidates, tie);
    Ok(PredictionOutcome {
        winner,
        samples: ledger,
        stage_log,
        terminated_at: None,
        condorcet_fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ranking_profile(m: usize, groups: &[(&[u32], u64)]) -> DistrictProfile {
        DistrictProfile::from_rankings(
            groups
                .iter()
                .map(|(order, mult)| RankingGroup {
                    order: crate::election::Ranking::new(order.to_vec(), m).unwrap(),
                    mult: *mult,
                })
                .collect(),
            m,
        )
    }

    fn unanimous(k: usize, n: u64) -> Election {
        Election::new(
            2,
            (0..k)
                .map(|_| DistrictProfile::from_counts(vec![n, 0]))
                .collect(),
        )
    }

    #[test]
    fn unanimous_election_is_always_predicted() {
        let e = unanimous(5, 10);
        let tie = TieBreak::ascending(2);
        for seed in 0..5 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let out = predict_plurality_known_mov(&e, 0.3, 0.2, &tie, &mut rng, 0.01).unwrap();
            assert_eq!(out.winner, Candidate(0));
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let out = predict_2cand_unknown_mov_bounded(
                &e, 0.2, 4.0, &tie, &mut rng, 0.02, DEFAULT_GAMMA_FLOOR,
            )
            .unwrap();
            assert_eq!(out.winner, Candidate(0));
            assert_eq!(out.terminated_at, Some(1));
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let out = predict_2cand_unknown_mov_arbitrary(
                &e, 0.2, &tie, &mut rng, 0.02, DEFAULT_GAMMA_FLOOR,
            )
            .unwrap();
            assert_eq!(out.winner, Candidate(0));
            assert_eq!(out.terminated_at, Some(1));
        }
    }

    #[test]
    fn ledger_matches_plan_arithmetic() {
        let e = unanimous(3, 8);
        let tie = TieBreak::ascending(2);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let out = predict_plurality_known_mov(&e, 0.4, 0.3, &tie, &mut rng, 0.001).unwrap();
        let p = plan(AlgorithmId::Alg1, &PlanParams::new(0.4, 0.3).scale(0.001)).unwrap();
        assert_eq!(out.samples.districts_drawn, p.l1);
        assert_eq!(out.samples.votes_drawn, p.l1 * p.l2);
    }

    #[test]
    fn composition_identity_with_plurality_sub() {
        let e = Election::new(
            2,
            vec![
                DistrictProfile::from_counts(vec![7, 3]),
                DistrictProfile::from_counts(vec![2, 8]),
                DistrictProfile::from_counts(vec![6, 4]),
            ],
        );
        let tie = TieBreak::ascending(2);
        let (eps, delta, scale) = (0.4, 0.3, 0.005);
        let l2 = plan(AlgorithmId::Alg1, &PlanParams::new(eps, delta).scale(scale))
            .unwrap()
            .l2;
        let sub = PluralitySub { tie: tie.clone(), scale, budget_override: Some(l2) };
        for seed in 0..10 {
            let mut rng_a = ChaCha12Rng::seed_from_u64(seed);
            let a = predict_plurality_known_mov(&e, eps, delta, &tie, &mut rng_a, scale)
                .unwrap();
            let mut rng_b = ChaCha12Rng::seed_from_u64(seed);
            let b = predict_generic_known_mov(&e, &sub, eps, delta, &tie, &mut rng_b, scale)
                .unwrap();
            assert_eq!(a.winner, b.winner);
            assert_eq!(a.stage_log, b.stage_log);
            assert_eq!(a.samples, b.samples);
        }
    }

    #[test]
    fn census_sub_always_finds_true_winner() {
        let e = Election::new(
            2,
            vec![
                DistrictProfile::from_counts(vec![7, 3]),
                DistrictProfile::from_counts(vec![2, 8]),
                DistrictProfile::from_counts(vec![6, 4]),
            ],
        );
        let tie = TieBreak::ascending(2);
        let sub = CensusSub { tie: tie.clone() };
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let out = predict_generic_known_mov(&e, &sub, 0.3, 0.2, &tie, &mut rng, 0.005).unwrap();
        assert_eq!(out.winner, Candidate(0));
    }

    #[test]
    fn tied_election_hits_iteration_cap() {
        let e = Election::new(
            2,
            (0..6).map(|_| DistrictProfile::from_counts(vec![50, 50])).collect(),
        );
        let tie = TieBreak::ascending(2);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        // Raised floors keep the runs short: the round budgets grow like
        // gamma^-2 (Algorithm 3) and gamma^-4 (Algorithm 4).
        let result = predict_2cand_unknown_mov_bounded(
            &e, 0.2, 4.0, &tie, &mut rng, 0.05, 0.1,
        );
        assert!(matches!(result, Err(Error::IterationCap(_))), "{result:?}");
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let result =
            predict_2cand_unknown_mov_arbitrary(&e, 0.2, &tie, &mut rng, 0.05, 0.3);
        assert!(matches!(result, Err(Error::IterationCap(_))), "{result:?}");
    }

    #[test]
    fn median_known_order_concentrated_district() {
        let order = HarmoniousOrder::new(vec![0, 1, 2], 3).unwrap();
        let d = DistrictProfile::from_counts(vec![0, 30, 0]);
        let tie = TieBreak::ascending(3);
        for seed in 0..10 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let out = predict_median_single(&d, 0.3, 0.2, Some(&order), &tie, &mut rng, 0.2)
                .unwrap();
            assert_eq!(out.winner, Candidate(1));
        }
    }

    #[test]
    fn median_unknown_order_single_peaked_profile() {
        // {b>a>c, b>c>a, a>b>c} scaled up: Condorcet winner is b (candidate 1).
        let d = ranking_profile(
            3,
            &[(&[1, 0, 2], 40), (&[1, 2, 0], 40), (&[0, 1, 2], 20)],
        );
        let tie = TieBreak::ascending(3);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let out = predict_median_single(&d, 0.3, 0.2, None, &tie, &mut rng, 1.0).unwrap();
        assert_eq!(out.winner, Candidate(1));
        assert!(!out.condorcet_fallback);
        // The drawn budget is odd by construction.
        assert_eq!(out.samples.votes_drawn % 2, 1);
    }

    #[test]
    fn median_unknown_order_rejects_obvious_violations() {
        // Three distinct bottom candidates cannot be single-peaked.
        let d = ranking_profile(
            3,
            &[(&[0, 1, 2], 10), (&[1, 2, 0], 10), (&[2, 0, 1], 10)],
        );
        let tie = TieBreak::ascending(3);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let result = predict_median_single(&d, 0.3, 0.2, None, &tie, &mut rng, 1.0);
        assert!(matches!(result, Err(Error::NotSinglePeaked(_))));
    }

    #[test]
    fn zero_bias_matches_uniform_noisy_run() {
        let d = DistrictProfile::from_counts(vec![35, 15]);
        let tie = TieBreak::ascending(2);
        let uniform = BiasedDistribution::uniform(50);
        for seed in 0..5 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let noisy = predict_plurality_noisy_single(
                &d, 0.3, 0.2, &uniform, true, &tie, &mut rng, 0.1,
            )
            .unwrap();
            assert_eq!(noisy.winner, Candidate(0));
            // Budget with gamma = 0 collapses to the uniform single-district plan.
            let l = plan(
                AlgorithmId::NoisySingle,
                &PlanParams::new(0.3, 0.2).scale(0.1),
            )
            .unwrap()
            .l1;
            assert_eq!(noisy.samples.votes_drawn, l);
        }
    }

    #[test]
    fn noisy_districts_unanimous() {
        let e = unanimous(4, 20);
        let tie = TieBreak::ascending(2);
        let district_bias = BiasedDistribution::uniform(4);
        let vote_biases: Vec<BiasedDistribution> =
            (0..4).map(|_| BiasedDistribution::uniform(20)).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let out = predict_plurality_noisy_districts(
            &e, 0.3, 0.2, &district_bias, &vote_biases, &tie, &mut rng, 0.001,
        )
        .unwrap();
        assert_eq!(out.winner, Candidate(0));
    }
}
