//! Canonical election data model: candidates, rankings, districts,
//! tie-breaking, and the single-peakedness check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate, identified by its index in `[0, m)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Candidate(pub u32);

impl Candidate {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for Candidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A complete preference order over all `m` candidates, most-preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ranking {
    order: Vec<u32>,
}

impl Ranking {
    /// Builds a ranking, checking that `order` is a permutation of `0..m`.
    pub fn new(order: Vec<u32>, num_candidates: usize) -> Result<Self> {
        check_permutation(&order, num_candidates, "ranking")?;
        Ok(Ranking { order })
    }

    /// Most-preferred candidate.
    pub fn top(&self) -> Candidate {
        Candidate(self.order[0])
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// True iff `x` appears before `y`.
    pub fn prefers(&self, x: Candidate, y: Candidate) -> bool {
        for &c in &self.order {
            if c == x.0 {
                return true;
            }
            if c == y.0 {
                return false;
            }
        }
        false
    }
}

fn check_permutation(order: &[u32], m: usize, what: &str) -> Result<()> {
    if order.len() != m {
        return Err(Error::InvariantViolation(format!(
            "{what} has {} entries, expected {m}",
            order.len()
        )));
    }
    let mut seen = vec![false; m];
    for &c in order {
        let idx = c as usize;
        if idx >= m || seen[idx] {
            return Err(Error::InvariantViolation(format!(
                "{what} is not a permutation of 0..{m}"
            )));
        }
        seen[idx] = true;
    }
    Ok(())
}

/// The fixed candidate ordering the median rule and single-peakedness are
/// defined against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HarmoniousOrder {
    order: Vec<u32>,
}

impl HarmoniousOrder {
    pub fn new(order: Vec<u32>, num_candidates: usize) -> Result<Self> {
        check_permutation(&order, num_candidates, "harmonious order")?;
        Ok(HarmoniousOrder { order })
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Position of each candidate along the order (inverse permutation).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0usize; self.order.len()];
        for (i, &c) in self.order.iter().enumerate() {
            pos[c as usize] = i;
        }
        pos
    }
}

/// Deterministic tie-breaking: the candidate appearing earlier in `priority`
/// wins every tie. Fixed for the lifetime of an election.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreak {
    priority: Vec<u32>,
    rank: Vec<usize>,
}

impl TieBreak {
    pub fn new(priority: Vec<u32>, num_candidates: usize) -> Result<Self> {
        check_permutation(&priority, num_candidates, "tie-break priority")?;
        let mut rank = vec![0usize; num_candidates];
        for (i, &c) in priority.iter().enumerate() {
            rank[c as usize] = i;
        }
        Ok(TieBreak { priority, rank })
    }

    /// Ascending candidate index; the reproducible default.
    pub fn ascending(num_candidates: usize) -> Self {
        let priority: Vec<u32> = (0..num_candidates as u32).collect();
        TieBreak::new(priority, num_candidates).expect("identity permutation")
    }

    pub fn priority(&self) -> &[u32] {
        &self.priority
    }

    /// True iff `a` wins a tie against `b`.
    pub fn wins_tie(&self, a: Candidate, b: Candidate) -> bool {
        self.rank[a.index()] < self.rank[b.index()]
    }

    /// Argmax over `(candidate, score)` pairs, ties resolved by priority.
    pub fn argmax<S: PartialOrd + Copy>(
        &self,
        scores: impl IntoIterator<Item = (Candidate, S)>,
    ) -> Option<Candidate> {
        let mut best: Option<(Candidate, S)> = None;
        for (c, s) in scores {
            best = match best {
                None => Some((c, s)),
                Some((bc, bs)) => {
                    if s > bs || (s == bs && self.wins_tie(c, bc)) {
                        Some((c, s))
                    } else {
                        Some((bc, bs))
                    }
                }
            };
        }
        best.map(|(c, _)| c)
    }
}

/// A ranking together with how many voters cast it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingGroup {
    pub order: Ranking,
    pub mult: u64,
}

/// Vote data for one district: the top-choice count vector, and optionally
/// the full ranking profile when Condorcet computation needs it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistrictProfile {
    pub population: u64,
    pub top_counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rankings: Option<Vec<RankingGroup>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonious_order: Option<HarmoniousOrder>,
}

impl DistrictProfile {
    /// District with top counts only; population is the sum of counts.
    pub fn from_counts(top_counts: Vec<u64>) -> Self {
        let population = top_counts.iter().sum();
        DistrictProfile {
            population,
            top_counts,
            rankings: None,
            harmonious_order: None,
        }
    }

    /// District built from a full ranking profile.
    pub fn from_rankings(rankings: Vec<RankingGroup>, num_candidates: usize) -> Self {
        let mut top_counts = vec![0u64; num_candidates];
        let mut population = 0;
        for g in &rankings {
            top_counts[g.order.top().index()] += g.mult;
            population += g.mult;
        }
        DistrictProfile {
            population,
            top_counts,
            rankings: Some(rankings),
            harmonious_order: None,
        }
    }

    pub fn num_candidates(&self) -> usize {
        self.top_counts.len()
    }
}

/// A district-based election over `m` candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Election {
    pub num_candidates: usize,
    pub districts: Vec<DistrictProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonious_order: Option<HarmoniousOrder>,
}

impl Election {
    pub fn new(num_candidates: usize, districts: Vec<DistrictProfile>) -> Self {
        Election {
            num_candidates,
            districts,
            harmonious_order: None,
        }
    }

    /// Total population `N` across all districts.
    pub fn total_population(&self) -> u64 {
        self.districts.iter().map(|d| d.population).sum()
    }

    pub fn num_districts(&self) -> usize {
        self.districts.len()
    }

    /// The harmonious order governing district `j`: the district's own order
    /// if set, otherwise the election-level default.
    pub fn order_for_district(&self, j: usize) -> Option<&HarmoniousOrder> {
        self.districts[j]
            .harmonious_order
            .as_ref()
            .or(self.harmonious_order.as_ref())
    }
}

/// Checks every structural invariant, naming the first failing check.
pub fn validate(election: &Election) -> Result<()> {
    let m = election.num_candidates;
    if m < 2 {
        return Err(Error::InvariantViolation(format!(
            "need at least 2 candidates, got {m}"
        )));
    }
    if election.districts.is_empty() {
        return Err(Error::InvariantViolation("election has no districts".into()));
    }
    if let Some(order) = &election.harmonious_order {
        check_permutation(order.order(), m, "harmonious order")?;
    }
    for (j, d) in election.districts.iter().enumerate() {
        if d.population == 0 {
            return Err(Error::InvariantViolation(format!(
                "district {j} has zero population"
            )));
        }
        if d.top_counts.len() != m {
            return Err(Error::InvariantViolation(format!(
                "district {j} has {} counts, expected {m}",
                d.top_counts.len()
            )));
        }
        let sum: u64 = d.top_counts.iter().sum();
        if sum != d.population {
            return Err(Error::InvariantViolation(format!(
                "district {j}: counts sum to {sum}, population is {}",
                d.population
            )));
        }
        if let Some(order) = &d.harmonious_order {
            check_permutation(order.order(), m, "district harmonious order")?;
        }
        if let Some(rankings) = &d.rankings {
            let mut tallies = vec![0u64; m];
            for g in rankings {
                check_permutation(g.order.order(), m, "ranking")?;
                tallies[g.order.top().index()] += g.mult;
            }
            if tallies != d.top_counts {
                return Err(Error::InvariantViolation(format!(
                    "district {j}: ranking top-choice tallies {tallies:?} disagree \
                     with top_counts {:?}",
                    d.top_counts
                )));
            }
        }
    }
    Ok(())
}

/// True iff every ranking in the profile descends monotonically on both
/// sides of its peak along `order`.
pub fn is_single_peaked(profile: &[RankingGroup], order: &HarmoniousOrder) -> bool {
    let pos = order.positions();
    profile
        .iter()
        .all(|g| ranking_is_single_peaked(&g.order, &pos))
}

pub(crate) fn ranking_is_single_peaked(ranking: &Ranking, positions: &[usize]) -> bool {
    let mut iter = ranking.order().iter();
    let peak = match iter.next() {
        Some(&c) => positions[c as usize],
        None => return true,
    };
    let (mut lo, mut hi) = (peak, peak);
    for &c in iter {
        let p = positions[c as usize];
        if lo > 0 && p == lo - 1 {
            lo -= 1;
        } else if p == hi + 1 {
            hi += 1;
        } else {
            return false;
        }
    }
    true
}
