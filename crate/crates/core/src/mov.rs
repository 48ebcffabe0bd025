//! Margin-of-victory estimation: the additive 2-candidate district
//! estimator and the black-box multiplicative wrapper.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::election::{Candidate, Election, TieBreak};
use crate::error::{Error, Result};
use crate::sampling::{
    plan, sample_districts, sample_votes, AlgorithmId, PlanParams, SampleLedger,
};

/// Which error model an estimate was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovRegime {
    /// Absolute error at most εN with probability ≥ 1−δ.
    Additive,
    /// Relative error: estimate within a (1±ε) factor of the true MOV.
    Multiplicative,
}

/// An estimated margin of victory, kept as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovEstimate {
    pub value: Ratio<i128>,
    pub regime: MovRegime,
    pub samples: SampleLedger,
    /// Oracle calls made by the multiplicative wrapper; 1 for additive runs.
    pub rounds: u32,
    /// True when the multiplicative loop ran out of rounds and fell back to
    /// the terminal value of 1 vote.
    pub exhausted: bool,
    /// Sampled-election positions whose predicted flip cost entered the
    /// estimate, as (original district index, predicted cost) pairs.
    pub flipped: Vec<(usize, Ratio<i128>)>,
}

impl MovEstimate {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().expect("estimate fits in f64")
    }
}

/// Cost mass to hand the losing candidate a district with predicted
/// (real-valued) counts: half the gap. With fractional counts equality is
/// achievable exactly, so the tie-break asymmetry of the integer oracle
/// degenerates to the infimum gap/2 either way.
fn predicted_flip_cost(winner_votes: Ratio<i128>, loser_votes: Ratio<i128>) -> Ratio<i128> {
    let gap = winner_votes - loser_votes;
    if gap > Ratio::zero() {
        gap / Ratio::from_integer(2)
    } else {
        Ratio::zero()
    }
}

/// Additive-error MOV estimation for 2-candidate district elections with
/// populations capped by κ·(N/k).
///
/// Samples l1 districts; in each, predicts vote totals ĝ = (n_d/l2)·tally
/// from l2 sampled votes; computes the exact greedy MOV of the sampled
/// election on those predicted counts (in rational arithmetic) and scales
/// it by k/l1.
pub fn estimate_mov_additive(
    election: &Election,
    epsilon: f64,
    delta: f64,
    kappa: f64,
    tie: &TieBreak,
    rng: &mut impl Rng,
    scale: f64,
) -> Result<MovEstimate> {
    if election.num_candidates != 2 {
        return Err(Error::DimensionError(format!(
            "additive MOV estimation needs 2 candidates, got {}",
            election.num_candidates
        )));
    }
    let n_total = election.total_population() as f64;
    let k = election.num_districts();
    let max_pop = election.districts.iter().map(|d| d.population).max().unwrap() as f64;
    if max_pop > kappa * n_total / k as f64 {
        return Err(Error::ParameterError(format!(
            "largest district ({max_pop}) exceeds kappa*N/k = {}",
            kappa * n_total / k as f64
        )));
    }
    let plan = plan(
        AlgorithmId::MovAdd,
        &PlanParams::new(epsilon, delta).kappa(kappa).scale(scale),
    )?;

    let mut ledger = SampleLedger::new();
    let picks = sample_districts(election, plan.l1, None, rng, &mut ledger)?;

    // Predicted counts per sampled district (with multiplicity).
    let mut predicted: Vec<(usize, [Ratio<i128>; 2])> = Vec::with_capacity(picks.len());
    for j in picks {
        let d = &election.districts[j];
        let tally = sample_votes(d, plan.l2, true, None, rng, &mut ledger)?;
        let scale_up = Ratio::new(d.population as i128, plan.l2 as i128);
        predicted.push((
            j,
            [
                Ratio::from_integer(tally[0] as i128) * scale_up,
                Ratio::from_integer(tally[1] as i128) * scale_up,
            ],
        ));
    }

    // Greedy MOV of the sampled election: predicted district winners, the
    // number of flips the loser needs, then the cheapest flips first.
    let winner_of = |g: &[Ratio<i128>; 2]| -> Candidate {
        if g[0] > g[1] || (g[0] == g[1] && tie.wins_tie(Candidate(0), Candidate(1))) {
            Candidate(0)
        } else {
            Candidate(1)
        }
    };
    let district_winners: Vec<Candidate> = predicted.iter().map(|(_, g)| winner_of(g)).collect();
    let freq0 = district_winners.iter().filter(|w| w.0 == 0).count() as u64;
    let freq1 = predicted.len() as u64 - freq0;
    let overall = if freq0 > freq1 || (freq0 == freq1 && tie.wins_tie(Candidate(0), Candidate(1)))
    {
        Candidate(0)
    } else {
        Candidate(1)
    };
    let loser = Candidate(1 - overall.0);
    let (holder_count, challenger_count) = if overall.0 == 0 {
        (freq0, freq1)
    } else {
        (freq1, freq0)
    };
    let diff = holder_count - challenger_count;
    let flips_needed = if tie.wins_tie(loser, overall) {
        diff.div_ceil(2)
    } else {
        diff / 2 + 1
    } as usize;

    let mut costs: Vec<(usize, Ratio<i128>)> = predicted
        .iter()
        .zip(&district_winners)
        .filter(|(_, &w)| w == overall)
        .map(|((j, g), _)| {
            (*j, predicted_flip_cost(g[overall.index()], g[loser.index()]))
        })
        .collect();
    costs.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    costs.truncate(flips_needed);
    let sampled_mov: Ratio<i128> = costs.iter().map(|(_, c)| *c).sum();
    let value = Ratio::new(k as i128, plan.l1 as i128) * sampled_mov;

    Ok(MovEstimate {
        value,
        regime: MovRegime::Additive,
        samples: ledger,
        rounds: 1,
        exhausted: false,
        flipped: costs,
    })
}

/// An additive-MOV oracle for the multiplicative wrapper: called with the
/// per-round (ε_i, δ_i), returns an estimate in votes.
pub type AdditiveOracle<'a> = dyn FnMut(f64, f64) -> Result<Ratio<i128>> + 'a;

/// Multiplicative-error wrapper: round i calls the additive oracle at
/// ε_i = 1/(1+ε)^i and δ_i = δ/2^i, accepting the first estimate e_i with
/// e_i ≥ λ_i·N where λ_i = (1/ε + 1)/(1+ε)^i. If all
/// ceil(ln N / ln(1+ε)) rounds reject, returns 1 vote with the exhaustion
/// flag set.
pub fn estimate_mov_multiplicative(
    oracle: &mut AdditiveOracle,
    epsilon: f64,
    delta: f64,
    population: u64,
    ledger: SampleLedger,
) -> Result<MovEstimate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ParameterError("epsilon must lie in (0, 1)".into()));
    }
    let n = population as f64;
    let max_rounds = (n.ln() / (1.0 + epsilon).ln()).ceil() as u32;
    let mut shrink = 1.0;
    for i in 1..=max_rounds.max(1) {
        shrink /= 1.0 + epsilon;
        let e_i = oracle(shrink, delta / 2f64.powi(i as i32))?;
        let lambda_i = (1.0 / epsilon + 1.0) * shrink;
        if e_i.to_f64().expect("estimate fits in f64") >= lambda_i * n {
            return Ok(MovEstimate {
                value: e_i,
                regime: MovRegime::Multiplicative,
                samples: ledger,
                rounds: i,
                exhausted: false,
                flipped: Vec::new(),
            });
        }
    }
    Ok(MovEstimate {
        value: Ratio::from_integer(1),
        regime: MovRegime::Multiplicative,
        samples: ledger,
        rounds: max_rounds.max(1),
        exhausted: true,
        flipped: Vec::new(),
    })
}
