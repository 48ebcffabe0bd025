//! Deterministic rule evaluation: plurality, median with a known order,
//! Condorcet winner, and district-level majority aggregation.

use crate::election::{
    Candidate, Election, HarmoniousOrder, RankingGroup, TieBreak,
};
use crate::error::{Error, Result};

/// Pairwise comparison counts: entry `(x, y)` is the number of voters
/// preferring `x` to `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseMatrix {
    counts: Vec<u64>,
    m: usize,
}

impl PairwiseMatrix {
    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn count(&self, x: Candidate, y: Candidate) -> u64 {
        self.counts[x.index() * self.m + y.index()]
    }

    /// Net pairwise margin of `x` over `y`.
    pub fn margin(&self, x: Candidate, y: Candidate) -> i64 {
        self.count(x, y) as i64 - self.count(y, x) as i64
    }
}

/// Per-district winners `(c_1, ..., c_k)`.
pub type DistrictWinnerList = Vec<Candidate>;

/// Which rule decides each district's winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistrictRule {
    Plurality,
    Median,
}

/// Argmax by top-choice count, ties broken by priority.
pub fn plurality_winner(counts: &[u64], tie: &TieBreak) -> Candidate {
    tie.argmax(
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (Candidate(i as u32), c)),
    )
    .expect("non-empty count vector")
}

/// First candidate along `order` at which the prefix sum reaches half the
/// voters. Comparisons are exact: `2 * prefix >= N`.
pub fn median_winner(counts: &[u64], order: &HarmoniousOrder) -> Candidate {
    let total: u64 = counts.iter().sum();
    let mut prefix = 0u64;
    for &c in order.order() {
        prefix += counts[c as usize];
        if 2 * prefix >= total {
            return Candidate(c);
        }
    }
    unreachable!("prefix sum reaches the total")
}

/// Tallies every ordered pair over a full-ranking profile.
pub fn pairwise_matrix(profile: &[RankingGroup], num_candidates: usize) -> PairwiseMatrix {
    let m = num_candidates;
    let mut counts = vec![0u64; m * m];
    for g in profile {
        let order = g.order.order();
        for (i, &x) in order.iter().enumerate() {
            for &y in &order[i + 1..] {
                counts[x as usize * m + y as usize] += g.mult;
            }
        }
    }
    PairwiseMatrix { counts, m }
}

/// The unique candidate beating every other pairwise, if one exists.
pub fn condorcet_winner(matrix: &PairwiseMatrix) -> Option<Candidate> {
    let m = matrix.num_candidates();
    'outer: for x in 0..m {
        let x = Candidate(x as u32);
        for y in 0..m {
            let y = Candidate(y as u32);
            if x != y && matrix.margin(x, y) <= 0 {
                continue 'outer;
            }
        }
        return Some(x);
    }
    None
}

/// Condorcet winner when it exists; otherwise the candidate maximizing the
/// minimum pairwise margin. The boolean flags whether the fallback fired.
pub fn condorcet_or_max_min_margin(
    matrix: &PairwiseMatrix,
    tie: &TieBreak,
) -> (Candidate, bool) {
    if let Some(w) = condorcet_winner(matrix) {
        return (w, false);
    }
    let m = matrix.num_candidates();
    let winner = tie
        .argmax((0..m).map(|x| {
            let x = Candidate(x as u32);
            let worst = (0..m)
                .filter(|&y| y != x.index())
                .map(|y| matrix.margin(x, Candidate(y as u32)))
                .min()
                .unwrap_or(0);
            (x, worst)
        }))
        .expect("at least one candidate");
    (winner, true)
}

/// `(MAJ, SEC-MAJ)` of a winner list: the most and second most frequent
/// candidates, ties broken by priority. SEC-MAJ may have frequency zero.
pub fn maj_and_secmaj(
    winners: &[Candidate],
    num_candidates: usize,
    tie: &TieBreak,
) -> (Candidate, Candidate) {
    let freq = winner_frequencies(winners, num_candidates);
    let maj = tie
        .argmax(freq.iter().enumerate().map(|(i, &f)| (Candidate(i as u32), f)))
        .expect("non-empty candidate set");
    let sec = tie
        .argmax(
            freq.iter()
                .enumerate()
                .filter(|&(i, _)| i != maj.index())
                .map(|(i, &f)| (Candidate(i as u32), f)),
        )
        .expect("at least 2 candidates");
    (maj, sec)
}

pub fn winner_frequencies(winners: &[Candidate], num_candidates: usize) -> Vec<u64> {
    let mut freq = vec![0u64; num_candidates];
    for w in winners {
        freq[w.index()] += 1;
    }
    freq
}

/// Winner of a single district under `rule`. Median uses the district's
/// harmonious order; when the order is unknown it falls back to the
/// Condorcet winner of the full rankings (exact for single-peaked
/// profiles with an odd population).
pub fn single_district_winner(
    election: &Election,
    j: usize,
    rule: DistrictRule,
    tie: &TieBreak,
) -> Result<Candidate> {
    let d = &election.districts[j];
    match rule {
        DistrictRule::Plurality => Ok(plurality_winner(&d.top_counts, tie)),
        DistrictRule::Median => {
            if let Some(order) = election.order_for_district(j) {
                Ok(median_winner(&d.top_counts, order))
            } else if let Some(rankings) = &d.rankings {
                let matrix = pairwise_matrix(rankings, election.num_candidates);
                Ok(condorcet_or_max_min_margin(&matrix, tie).0)
            } else {
                Err(Error::RuleInapplicable(format!(
                    "district {j}: median rule needs a harmonious order or full rankings"
                )))
            }
        }
    }
}

/// Evaluates `rule` in every district and aggregates by MAJ.
pub fn district_election_winner(
    election: &Election,
    rule: DistrictRule,
    tie: &TieBreak,
) -> Result<(Candidate, DistrictWinnerList)> {
    let winners: DistrictWinnerList = (0..election.num_districts())
        .map(|j| single_district_winner(election, j, rule, tie))
        .collect::<Result<_>>()?;
    let (maj, _) = maj_and_secmaj(&winners, election.num_candidates, tie);
    Ok((maj, winners))
}
