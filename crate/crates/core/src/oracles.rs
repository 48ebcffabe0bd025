//! Ground-truth winner and margin-of-victory computation: closed-form or
//! greedy where provably exact, exhaustive brute force for small instances.

use crate::election::{Candidate, Election, HarmoniousOrder, TieBreak};
use crate::error::{Error, Result};
use crate::rules::{
    maj_and_secmaj, plurality_winner, winner_frequencies, DistrictRule,
};

/// Per-candidate minimum number of single-vote reassignments inside one
/// district needed to make that candidate the district winner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistrictFlipCost {
    pub cost: Vec<u64>,
}

/// One district alteration in a margin-of-victory witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistrictFlip {
    pub district: usize,
    pub new_winner: Candidate,
    pub altered: u64,
    pub new_counts: Vec<u64>,
}

/// Exact margin of victory with a verifiable witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovResult {
    pub value: u64,
    pub witness: Option<Vec<DistrictFlip>>,
}

impl MovResult {
    /// The election after applying the witness; its overall winner differs
    /// from the original one.
    pub fn apply_witness(&self, election: &Election) -> Option<Election> {
        let witness = self.witness.as_ref()?;
        let mut altered = election.clone();
        for flip in witness {
            altered.districts[flip.district].top_counts = flip.new_counts.clone();
        }
        Some(altered)
    }
}

/// Minimum reassignments making `target` the plurality winner, together
/// with the resulting count vector. Votes are taken one at a time from the
/// currently leading competitor.
pub fn plurality_flip(counts: &[u64], target: Candidate, tie: &TieBreak) -> (u64, Vec<u64>) {
    let mut counts = counts.to_vec();
    let mut cost = 0u64;
    loop {
        let winner = plurality_winner(&counts, tie);
        if winner == target {
            return (cost, counts);
        }
        counts[winner.index()] -= 1;
        counts[target.index()] += 1;
        cost += 1;
    }
}

/// Minimum reassignments making `target` the median winner under `order`.
///
/// With `L` the prefix sum strictly before the target and `P` the prefix
/// through it, the target wins iff `P >= ceil(N/2)` and `L <= ceil(N/2)-1`;
/// each deficit is closed by moving one vote to the target from the
/// appropriate side.
pub fn median_flip(
    counts: &[u64],
    target: Candidate,
    order: &HarmoniousOrder,
) -> (u64, Vec<u64>) {
    let total: u64 = counts.iter().sum();
    let half_up = total.div_ceil(2);
    let pos = order.positions();
    let target_pos = pos[target.index()];

    let mut left = 0u64;
    let mut through = 0u64;
    for (c, &count) in counts.iter().enumerate() {
        if pos[c] < target_pos {
            left += count;
        }
        if pos[c] <= target_pos {
            through += count;
        }
    }
    let need_from_right = half_up.saturating_sub(through);
    let need_from_left = left.saturating_sub(half_up - 1);

    let mut new_counts = counts.to_vec();
    let mut take = |side_right: bool, mut need: u64| {
        let scan: Vec<u32> = if side_right {
            order.order()[target_pos + 1..].to_vec()
        } else {
            order.order()[..target_pos].to_vec()
        };
        for c in scan {
            let avail = new_counts[c as usize].min(need);
            new_counts[c as usize] -= avail;
            need -= avail;
            if need == 0 {
                break;
            }
        }
        debug_assert_eq!(need, 0);
    };
    take(true, need_from_right);
    take(false, need_from_left);
    let moved = need_from_right + need_from_left;
    new_counts[target.index()] = counts[target.index()] + moved;
    (moved, new_counts)
}

/// Exact flip cost for every candidate in one district.
pub fn district_flip_costs(
    counts: &[u64],
    rule: DistrictRule,
    order: Option<&HarmoniousOrder>,
    tie: &TieBreak,
) -> Result<DistrictFlipCost> {
    let m = counts.len();
    let cost = (0..m)
        .map(|x| {
            let x = Candidate(x as u32);
            match rule {
                DistrictRule::Plurality => Ok(plurality_flip(counts, x, tie).0),
                DistrictRule::Median => {
                    let order = order.ok_or_else(|| {
                        Error::RuleInapplicable(
                            "median flip costs need a harmonious order".into(),
                        )
                    })?;
                    Ok(median_flip(counts, x, order).0)
                }
            }
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(DistrictFlipCost { cost })
}

/// Exact MOV of a single-district median election: the cheapest flip to any
/// non-winning candidate, by the prefix-gap formula.
pub fn median_mov_prefix_gap(counts: &[u64], order: &HarmoniousOrder) -> u64 {
    let winner = crate::rules::median_winner(counts, order);
    (0..counts.len())
        .filter(|&x| x != winner.index())
        .map(|x| median_flip(counts, Candidate(x as u32), order).0)
        .min()
        .expect("at least 2 candidates")
}

/// Number of district flips needed so `challenger` overtakes `holder` in
/// district count, respecting the tie-break.
fn district_flips_needed(
    holder_districts: u64,
    challenger_districts: u64,
    challenger_wins_tie: bool,
) -> u64 {
    let diff = holder_districts.saturating_sub(challenger_districts);
    if challenger_wins_tie {
        diff.div_ceil(2)
    } else {
        diff / 2 + 1
    }
}

/// Exact 2-candidate MOV: flip the winner's cheapest districts until the
/// loser holds a winning district count.
pub fn election_mov_greedy_2cand(election: &Election, tie: &TieBreak) -> Result<MovResult> {
    if election.num_candidates != 2 {
        return Err(Error::DimensionError(format!(
            "greedy MOV needs exactly 2 candidates, got {}",
            election.num_candidates
        )));
    }
    let winners: Vec<Candidate> = election
        .districts
        .iter()
        .map(|d| plurality_winner(&d.top_counts, tie))
        .collect();
    let freq = winner_frequencies(&winners, 2);
    let (w, _) = maj_and_secmaj(&winners, 2, tie);
    let loser = Candidate(1 - w.0);

    let t = district_flips_needed(freq[w.index()], freq[loser.index()], tie.wins_tie(loser, w));
    let mut flips: Vec<DistrictFlip> = election
        .districts
        .iter()
        .enumerate()
        .filter(|(j, _)| winners[*j] == w)
        .map(|(j, d)| {
            let (altered, new_counts) = plurality_flip(&d.top_counts, loser, tie);
            DistrictFlip { district: j, new_winner: loser, altered, new_counts }
        })
        .collect();
    flips.sort_by_key(|f| (f.altered, f.district));
    flips.truncate(t as usize);
    let value = flips.iter().map(|f| f.altered).sum();
    Ok(MovResult { value, witness: Some(flips) })
}

const BRUTE_MAX_CANDIDATES: usize = 3;
const BRUTE_MAX_DISTRICTS: usize = 8;
const BRUTE_MAX_DISTRICT_POPULATION: u64 = 12;

/// Exact MOV by enumerating every per-district target-winner assignment.
/// Restricted to the documented small-instance envelope.
pub fn election_mov_bruteforce(
    election: &Election,
    rule: DistrictRule,
    tie: &TieBreak,
) -> Result<MovResult> {
    let m = election.num_candidates;
    let k = election.num_districts();
    if m > BRUTE_MAX_CANDIDATES
        || k > BRUTE_MAX_DISTRICTS
        || election.districts.iter().any(|d| d.population > BRUTE_MAX_DISTRICT_POPULATION)
    {
        return Err(Error::SizeLimit(format!(
            "brute-force envelope is m <= {BRUTE_MAX_CANDIDATES}, k <= \
             {BRUTE_MAX_DISTRICTS}, district population <= {BRUTE_MAX_DISTRICT_POPULATION}"
        )));
    }

    let costs: Vec<DistrictFlipCost> = (0..k)
        .map(|j| {
            district_flip_costs(
                &election.districts[j].top_counts,
                rule,
                election.order_for_district(j),
                tie,
            )
        })
        .collect::<Result<_>>()?;
    let true_winner = {
        let winners: Vec<Candidate> = (0..k)
            .map(|j| crate::rules::single_district_winner(election, j, rule, tie))
            .collect::<Result<_>>()?;
        maj_and_secmaj(&winners, m, tie).0
    };

    let mut best: Option<(u64, Vec<Candidate>)> = None;
    let mut assignment = vec![Candidate(0); k];
    enumerate_assignments(&costs, m, 0, 0, &mut assignment, &mut |cost, assignment| {
        let (maj, _) = maj_and_secmaj(assignment, m, tie);
        if maj != true_winner && best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, assignment.to_vec()));
        }
    });

    let (value, assignment) = best.expect("some assignment changes the winner");
    let witness = assignment
        .iter()
        .enumerate()
        .filter_map(|(j, &target)| {
            let d = &election.districts[j];
            let (altered, new_counts) = match rule {
                DistrictRule::Plurality => plurality_flip(&d.top_counts, target, tie),
                DistrictRule::Median => median_flip(
                    &d.top_counts,
                    target,
                    election.order_for_district(j).expect("checked above"),
                ),
            };
            (altered > 0).then_some(DistrictFlip {
                district: j,
                new_winner: target,
                altered,
                new_counts,
            })
        })
        .collect();
    Ok(MovResult { value, witness: Some(witness) })
}

fn enumerate_assignments(
    costs: &[DistrictFlipCost],
    m: usize,
    j: usize,
    cost_so_far: u64,
    assignment: &mut Vec<Candidate>,
    visit: &mut impl FnMut(u64, &[Candidate]),
) {
    if j == costs.len() {
        visit(cost_so_far, assignment);
        return;
    }
    for x in 0..m {
        assignment[j] = Candidate(x as u32);
        enumerate_assignments(
            costs,
            m,
            j + 1,
            cost_so_far + costs[j].cost[x],
            assignment,
            visit,
        );
    }
}
