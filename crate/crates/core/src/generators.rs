//! Instance construction: planted-MOV elections, the two adversarial
//! lower-bound families, single-peaked profiles, biased sampling
//! distributions, and fully random elections.

use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::election::{
    Candidate, DistrictProfile, Election, HarmoniousOrder, Ranking, RankingGroup,
};
use crate::error::{Error, Result};
use crate::sampling::BiasedDistribution;

/// How district populations are drawn for a planted instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistrictSizes {
    /// Every district has population `n`.
    Equal { n: u64 },
    /// Populations drawn uniformly from `[n, kappa*n]`, which guarantees
    /// max_j n_j ≤ κ·(N/k).
    Capped { n: u64, kappa: u64 },
    /// One giant district holding as many voters as the `k-1` districts of
    /// population `small` combined.
    HeavyTailed { small: u64 },
}

/// Recipe for a 2-candidate election with a planted margin of victory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub k: usize,
    pub sizes: DistrictSizes,
    /// Target MOV as a fraction of the total population.
    pub gamma: f64,
    /// Reduce an unachievable target to the family's maximum instead of
    /// failing.
    pub clamp: bool,
}

/// A planted instance together with what was actually achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedElection {
    pub election: Election,
    /// round(γ·N), the requested margin in votes.
    pub target_mov: u64,
    /// The instance's exact MOV; differs from the target only when clamped.
    pub achieved_mov: u64,
    pub clamped: bool,
}

/// Builds a 2-candidate election whose exact MOV equals round(γ·N).
///
/// Candidate 0 wins. The margin is planted in the `t` least-populated
/// districts — each given flip cost `c_j` summing to the target — while
/// every other district is unanimous, so those `t` districts are the
/// cheapest and the greedy optimum is forced to the planted value.
pub fn gen_planted_2cand(spec: &PlantSpec, rng: &mut impl Rng) -> Result<PlantedElection> {
    if spec.k == 0 {
        return Err(Error::ParameterError("planted instance needs k >= 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.gamma) {
        return Err(Error::ParameterError("gamma must lie in [0, 1]".into()));
    }
    let k = spec.k;
    let mut sizes: Vec<u64> = match spec.sizes {
        DistrictSizes::Equal { n } => vec![n; k],
        DistrictSizes::Capped { n, kappa } => {
            (0..k).map(|_| rng.gen_range(n..=n * kappa)).collect()
        }
        DistrictSizes::HeavyTailed { small } => {
            let mut v = vec![small; k.saturating_sub(1)];
            v.push(small * (k as u64 - 1).max(1));
            v
        }
    };
    if sizes.iter().any(|&n| n == 0) {
        return Err(Error::ParameterError("district populations must be positive".into()));
    }
    sizes.sort_unstable();
    let total: u64 = sizes.iter().sum();
    let target = ((spec.gamma * total as f64).round() as u64).max(1);

    // Per-district cap on plantable flip cost, and the largest number of
    // winner districts the loser could ever need to flip.
    let caps: Vec<u64> = sizes.iter().map(|&n| n / 2 + 1).collect();
    let t_max = if k % 2 == 0 { k / 2 + 1 } else { k.div_ceil(2) };
    let max_plantable: u64 = caps[..t_max].iter().sum();

    let (mov, clamped) = if target <= max_plantable {
        (target, false)
    } else if spec.clamp {
        (max_plantable, true)
    } else {
        return Err(Error::Infeasible(format!(
            "target MOV {target} exceeds the family's maximum {max_plantable} \
             (k = {k}, N = {total})"
        )));
    };

    // Fewest flips that can carry the whole margin.
    let mut t = 0usize;
    let mut prefix = 0u64;
    while prefix < mov {
        prefix += caps[t];
        t += 1;
    }
    // Winner district count making exactly t flips necessary.
    let w = if k % 2 == 0 { k / 2 + t - 1 } else { (k - 1) / 2 + t };
    debug_assert!(w <= k);

    // Distribute the margin: a base cost of 1 per planted district, then
    // top up cheapest-first within each cap.
    let mut costs = vec![1u64; t];
    let mut remaining = mov - t as u64;
    for j in 0..t {
        let room = caps[j] - costs[j];
        let add = room.min(remaining);
        costs[j] += add;
        remaining -= add;
    }
    debug_assert_eq!(remaining, 0);

    let districts: Vec<DistrictProfile> = sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let counts = if j < t {
                // Gap d giving flip cost c: d = 2c-2 (n even) or 2c-1
                // (n odd), so that (n+d)/2 is integral.
                let c = costs[j];
                let d = if n % 2 == 0 { 2 * c - 2 } else { 2 * c - 1 };
                vec![(n + d) / 2, (n - d) / 2]
            } else if j >= k - (w - t) {
                vec![n, 0]
            } else {
                vec![0, n]
            };
            DistrictProfile::from_counts(counts)
        })
        .collect();

    Ok(PlantedElection {
        election: Election::new(2, districts),
        target_mov: target,
        achieved_mov: mov,
        clamped,
    })
}

/// The two adversarial lower-bound instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundFamily {
    /// District-count construction: a (1/2+4ε) fraction of districts lean
    /// toward the winner at 3n/4 votes, the rest are unanimous against.
    L1,
    /// Vote-margin construction: 11k/20 districts lean toward the winner at
    /// (1/2+20ε)n votes, the rest are unanimous against.
    L2,
}

fn exact_count(x: Ratio<i128>, what: &str) -> Result<u64> {
    if x.is_integer() && *x.numer() >= 0 {
        Ok(*x.numer() as u64)
    } else {
        Err(Error::ParameterError(format!(
            "{what} = {x} must be a non-negative integer; \
             adjust epsilon, n, or k to meet the divisibility constraints"
        )))
    }
}

/// Builds a lower-bound instance with exact MOV = εN.
///
/// The paper's winner "A" is candidate 1 and loser "B" is candidate 0, so
/// the default ascending tie-break favors the loser and the construction's
/// MOV identity holds with no rounding.
pub fn gen_lowerbound_instance(
    family: LowerBoundFamily,
    epsilon: Ratio<i128>,
    n: u64,
    k: u64,
) -> Result<Election> {
    if epsilon <= Ratio::zero() {
        return Err(Error::ParameterError("epsilon must be positive".into()));
    }
    let half = Ratio::new(1i128, 2);
    let (a_districts, a_votes) = match family {
        LowerBoundFamily::L1 => {
            if n % 4 != 0 {
                return Err(Error::ParameterError(
                    "the L1 construction needs n divisible by 4".into(),
                ));
            }
            if epsilon > Ratio::new(1, 8) {
                return Err(Error::ParameterError(
                    "the L1 construction needs epsilon <= 1/8".into(),
                ));
            }
            let a_frac = half + Ratio::from_integer(4) * epsilon;
            let a_districts =
                exact_count(a_frac * Ratio::from_integer(k as i128), "(1/2+4*epsilon)*k")?;
            (a_districts, 3 * n / 4)
        }
        LowerBoundFamily::L2 => {
            if k % 20 != 0 {
                return Err(Error::ParameterError(
                    "the L2 construction needs k divisible by 20".into(),
                ));
            }
            if epsilon > Ratio::new(1, 40) {
                return Err(Error::ParameterError(
                    "the L2 construction needs epsilon <= 1/40".into(),
                ));
            }
            let a_frac = half + Ratio::from_integer(20) * epsilon;
            let a_votes = exact_count(
                a_frac * Ratio::from_integer(n as i128),
                "(1/2+20*epsilon)*n",
            )?;
            (11 * k / 20, a_votes)
        }
    };
    let districts: Vec<DistrictProfile> = (0..k)
        .map(|j| {
            if j < a_districts {
                DistrictProfile::from_counts(vec![n - a_votes, a_votes])
            } else {
                DistrictProfile::from_counts(vec![n, 0])
            }
        })
        .collect();
    Ok(Election::new(2, districts))
}

/// Samples `n` single-peaked rankings over `order`: each voter's peak is
/// drawn from `peak_weights` (uniform when absent), then the ranking is
/// extended by repeatedly appending the nearer of the two unconsumed
/// interval endpoints, chosen by a fair coin when both remain.
pub fn gen_single_peaked(
    order: &HarmoniousOrder,
    n: u64,
    peak_weights: Option<&[u64]>,
    rng: &mut impl Rng,
) -> Result<Vec<RankingGroup>> {
    let m = order.order().len();
    if n == 0 {
        return Err(Error::ParameterError("profile needs at least one voter".into()));
    }
    if let Some(weights) = peak_weights {
        if weights.len() != m || weights.iter().sum::<u64>() == 0 {
            return Err(Error::ParameterError(
                "peak weights must cover every candidate with positive total".into(),
            ));
        }
    }
    let pick_peak = |rng: &mut dyn rand::RngCore| -> usize {
        match peak_weights {
            None => rng.gen_range(0..m),
            Some(weights) => {
                let total: u64 = weights.iter().sum();
                let mut roll = rng.gen_range(0..total);
                for (i, &w) in weights.iter().enumerate() {
                    if roll < w {
                        return i;
                    }
                    roll -= w;
                }
                unreachable!()
            }
        }
    };

    let mut groups: std::collections::BTreeMap<Vec<u32>, u64> =
        std::collections::BTreeMap::new();
    for _ in 0..n {
        let peak = pick_peak(rng);
        let mut ranked = Vec::with_capacity(m);
        ranked.push(order.order()[peak]);
        let (mut lo, mut hi) = (peak, peak);
        while ranked.len() < m {
            let take_left = match (lo > 0, hi + 1 < m) {
                (true, true) => rng.gen_bool(0.5),
                (true, false) => true,
                (false, true) => false,
                (false, false) => unreachable!("interval exhausted early"),
            };
            if take_left {
                lo -= 1;
                ranked.push(order.order()[lo]);
            } else {
                hi += 1;
                ranked.push(order.order()[hi]);
            }
        }
        *groups.entry(ranked).or_insert(0) += 1;
    }
    groups
        .into_iter()
        .map(|(ranked, mult)| {
            Ok(RankingGroup { order: Ranking::new(ranked, m)?, mult })
        })
        .collect()
}

/// How a biased distribution deviates from uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasAdversary {
    /// Move mass from the `winner`'s voters onto everyone else — the worst
    /// case for prediction.
    TiltAwayFrom { winner: Candidate },
    /// Move mass off a random half of the voters.
    Random,
}

/// Builds a per-voter distribution at exact TV distance γ from uniform.
/// Voters are indexed in candidate blocks, matching `sample_votes`.
pub fn gen_biased_distribution(
    district: &DistrictProfile,
    gamma: Ratio<i128>,
    adversary: BiasAdversary,
    rng: &mut impl Rng,
) -> Result<BiasedDistribution> {
    let n = district.population;
    if gamma < Ratio::zero() || gamma >= Ratio::from_integer(1) {
        return Err(Error::ParameterError("TV target must lie in [0, 1)".into()));
    }
    if gamma.is_zero() {
        return Ok(BiasedDistribution::uniform(n as usize));
    }
    // Weights as numerators over N·q where γ = p/q: uniform is q per voter
    // and exactly p·N units must move from donors to recipients.
    let (p, q) = (*gamma.numer() as u64, *gamma.denom() as u64);
    let move_units = p * n;

    let donor = |voter: u64| -> bool {
        match adversary {
            BiasAdversary::TiltAwayFrom { winner } => {
                let mut cum = 0u64;
                for (c, &count) in district.top_counts.iter().enumerate() {
                    cum += count;
                    if voter < cum {
                        return c == winner.index();
                    }
                }
                unreachable!()
            }
            // Decided below via a pre-drawn mask.
            BiasAdversary::Random => unreachable!(),
        }
    };
    let donor_mask: Vec<bool> = match adversary {
        BiasAdversary::Random => {
            let mut mask: Vec<bool> =
                (0..n).map(|v| v < n.div_ceil(2)).collect();
            for i in (1..mask.len()).rev() {
                mask.swap(i, rng.gen_range(0..=i));
            }
            mask
        }
        _ => (0..n).map(donor).collect(),
    };
    let donors = donor_mask.iter().filter(|&&d| d).count() as u64;
    let recipients = n - donors;
    if donors * q < move_units || recipients == 0 {
        return Err(Error::ParameterError(format!(
            "TV target {gamma} exceeds the movable mass of {donors} of {n} voters"
        )));
    }

    let mut numerators = vec![q; n as usize];
    let mut to_take = move_units;
    for (v, &is_donor) in donor_mask.iter().enumerate() {
        if is_donor && to_take > 0 {
            let take = to_take.min(q);
            numerators[v] -= take;
            to_take -= take;
        }
    }
    let mut to_give = move_units;
    for (v, &is_donor) in donor_mask.iter().enumerate() {
        if !is_donor && to_give > 0 {
            // Spread the gained mass evenly so no recipient dominates.
            let give = to_give.min(move_units.div_ceil(recipients));
            numerators[v] += give;
            to_give -= give;
        }
    }
    debug_assert_eq!(to_give, 0);
    BiasedDistribution::new(numerators, n * q, gamma)
}

/// A fully random election: every voter picks a uniform top choice.
pub fn gen_random_election(
    m: usize,
    k: usize,
    n: u64,
    rng: &mut impl Rng,
) -> Result<Election> {
    if m < 2 || k == 0 || n == 0 {
        return Err(Error::ParameterError(
            "random election needs m >= 2, k >= 1, n >= 1".into(),
        ));
    }
    let districts = (0..k)
        .map(|_| {
            let mut counts = vec![0u64; m];
            for _ in 0..n {
                counts[rng.gen_range(0..m)] += 1;
            }
            DistrictProfile::from_counts(counts)
        })
        .collect();
    Ok(Election::new(m, districts))
}
