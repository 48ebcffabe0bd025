//! Monte Carlo evaluation of the probabilistic guarantees: seeded,
//! reproducible trials, sample-complexity accounting, and experiment
//! sweeps.

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::{DistrictProfile, Election, HarmoniousOrder, TieBreak};
use crate::error::{Error, Result};
use crate::generators::{
    gen_biased_distribution, gen_planted_2cand, gen_single_peaked, BiasAdversary,
    PlantSpec,
};
use crate::mov::{estimate_mov_additive, estimate_mov_multiplicative};
use crate::oracles::election_mov_greedy_2cand;
use crate::predictors::{
    predict_2cand_unknown_mov_arbitrary, predict_2cand_unknown_mov_bounded,
    predict_generic_known_mov, predict_median_single, predict_plurality_known_mov,
    predict_plurality_noisy_districts, predict_plurality_noisy_single, PluralitySub,
    DEFAULT_GAMMA_FLOOR,
};
use crate::rules::{district_election_winner, median_winner, DistrictRule};
use crate::sampling::{AlgorithmId, BiasedDistribution, SampleLedger};

/// The instance a Monte Carlo experiment runs on. Each trial rebuilds it
/// from the trial's own RNG, so randomized families vary across trials
/// while staying reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InstanceSpec {
    /// A 2-candidate planted-MOV district election.
    Planted(PlantSpec),
    /// A single district under the median rule with the identity
    /// harmonious order.
    MedianDistrict { counts: Vec<u64> },
    /// A single district of single-peaked rankings over the identity order
    /// (hidden from the predictor), peaks drawn by weight.
    SinglePeaked {
        m: usize,
        n: u64,
        peak_weights: Option<Vec<u64>>,
    },
    /// A fixed, explicitly given election.
    Explicit(Election),
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmId,
    pub instance: InstanceSpec,
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: Option<f64>,
    /// TV bound for the noisy algorithms (adversarial tilt at exactly this
    /// distance).
    pub gamma: Option<f64>,
    pub scale: f64,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the process default. Output is
    /// identical for every worker count.
    pub workers: Option<usize>,
}

/// Aggregate result of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    /// Per-trial total draws (votes + districts), in trial order.
    pub sample_counts: Vec<u64>,
    pub seed: u64,
    pub config: ExperimentConfig,
}

impl TrialStats {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn mean_draws(&self) -> f64 {
        self.sample_counts.iter().sum::<u64>() as f64 / self.trials as f64
    }
}

/// A small-denominator exact rational for a CLI-style float (6 decimals).
fn gamma_ratio(gamma: f64) -> Ratio<i128> {
    Ratio::new((gamma * 1e6).round() as i128, 1_000_000)
}

fn identity_order(m: usize) -> HarmoniousOrder {
    HarmoniousOrder::new((0..m as u32).collect(), m).expect("identity is a permutation")
}

fn build_instance(spec: &InstanceSpec, rng: &mut ChaCha12Rng) -> Result<Election> {
    match spec {
        InstanceSpec::Planted(plant) => Ok(gen_planted_2cand(plant, rng)?.election),
        InstanceSpec::MedianDistrict { counts } => {
            let mut e = Election::new(counts.len(), vec![DistrictProfile::from_counts(
                counts.clone(),
            )]);
            e.harmonious_order = Some(identity_order(counts.len()));
            Ok(e)
        }
        InstanceSpec::SinglePeaked { m, n, peak_weights } => {
            let order = identity_order(*m);
            let groups = gen_single_peaked(&order, *n, peak_weights.as_deref(), rng)?;
            let mut e = Election::new(
                *m,
                vec![DistrictProfile::from_rankings(groups, *m)],
            );
            e.harmonious_order = Some(order);
            Ok(e)
        }
        InstanceSpec::Explicit(e) => Ok(e.clone()),
    }
}

/// Runs one trial: build the instance, compute ground truth with the exact
/// oracles, run the algorithm, and judge success. Returns (success, draws).
fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<(bool, u64)> {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let election = build_instance(&cfg.instance, &mut rng)?;
    let m = election.num_candidates;
    let tie = TieBreak::ascending(m);

    let draws = |ledger: &SampleLedger| ledger.votes_drawn + ledger.districts_drawn;

    match cfg.algorithm {
        AlgorithmId::Alg1
        | AlgorithmId::Generic
        | AlgorithmId::Alg3
        | AlgorithmId::Alg4
        | AlgorithmId::NoisyDistricts => {
            let (truth, _) =
                district_election_winner(&election, DistrictRule::Plurality, &tie)?;
            let outcome = match cfg.algorithm {
                AlgorithmId::Alg1 => predict_plurality_known_mov(
                    &election, cfg.epsilon, cfg.delta, &tie, &mut rng, cfg.scale,
                )?,
                AlgorithmId::Generic => {
                    let sub = PluralitySub {
                        tie: tie.clone(),
                        scale: cfg.scale,
                        budget_override: None,
                    };
                    predict_generic_known_mov(
                        &election, &sub, cfg.epsilon, cfg.delta, &tie, &mut rng,
                        cfg.scale,
                    )?
                }
                AlgorithmId::Alg3 => {
                    let kappa = cfg.kappa.ok_or_else(|| {
                        Error::ParameterError("algorithm 3 requires kappa".into())
                    })?;
                    predict_2cand_unknown_mov_bounded(
                        &election, cfg.delta, kappa, &tie, &mut rng, cfg.scale,
                        DEFAULT_GAMMA_FLOOR,
                    )?
                }
                AlgorithmId::Alg4 => predict_2cand_unknown_mov_arbitrary(
                    &election, cfg.delta, &tie, &mut rng, cfg.scale,
                    DEFAULT_GAMMA_FLOOR,
                )?,
                AlgorithmId::NoisyDistricts => {
                    let gamma = gamma_ratio(cfg.gamma.unwrap_or(0.0));
                    let vote_biases: Vec<BiasedDistribution> = election
                        .districts
                        .iter()
                        .map(|d| {
                            gen_biased_distribution(
                                d,
                                gamma,
                                BiasAdversary::TiltAwayFrom { winner: truth },
                                &mut rng,
                            )
                            .or_else(|_| {
                                // Unanimous-for-the-loser districts have no
                                // recipients to tilt toward; uniform is the
                                // only distribution there.
                                Ok::<_, Error>(BiasedDistribution::uniform(
                                    d.population as usize,
                                ))
                            })
                        })
                        .collect::<Result<_>>()?;
                    let district_bias =
                        BiasedDistribution::uniform(election.num_districts());
                    predict_plurality_noisy_districts(
                        &election,
                        cfg.epsilon,
                        cfg.delta,
                        &district_bias,
                        &vote_biases,
                        &tie,
                        &mut rng,
                        cfg.scale,
                    )?
                }
                _ => unreachable!(),
            };
            Ok((outcome.winner == truth, draws(&outcome.samples)))
        }
        AlgorithmId::MedianKnown | AlgorithmId::MedianUnknown => {
            let district = &election.districts[0];
            let order = election
                .order_for_district(0)
                .cloned()
                .unwrap_or_else(|| identity_order(m));
            let truth = median_winner(&district.top_counts, &order);
            let known = (cfg.algorithm == AlgorithmId::MedianKnown).then_some(&order);
            let outcome = predict_median_single(
                district, cfg.epsilon, cfg.delta, known, &tie, &mut rng, cfg.scale,
            )?;
            Ok((outcome.winner == truth, draws(&outcome.samples)))
        }
        AlgorithmId::NoisySingle => {
            let district = &election.districts[0];
            let truth = crate::rules::plurality_winner(&district.top_counts, &tie);
            let gamma = gamma_ratio(cfg.gamma.unwrap_or(0.0));
            let bias = gen_biased_distribution(
                district,
                gamma,
                BiasAdversary::TiltAwayFrom { winner: truth },
                &mut rng,
            )?;
            let outcome = predict_plurality_noisy_single(
                district, cfg.epsilon, cfg.delta, &bias, true, &tie, &mut rng,
                cfg.scale,
            )?;
            Ok((outcome.winner == truth, draws(&outcome.samples)))
        }
        AlgorithmId::MovAdd => {
            let truth = election_mov_greedy_2cand(&election, &tie)?.value as f64;
            let kappa = cfg.kappa.ok_or_else(|| {
                Error::ParameterError("additive MOV estimation requires kappa".into())
            })?;
            let est = estimate_mov_additive(
                &election, cfg.epsilon, cfg.delta, kappa, &tie, &mut rng, cfg.scale,
            )?;
            let band = cfg.epsilon * election.total_population() as f64;
            Ok(((est.value_f64() - truth).abs() <= band, draws(&est.samples)))
        }
        AlgorithmId::MovMult => {
            // The exact greedy oracle stands in as the additive black box,
            // making the wrapper's band check deterministic.
            let truth = election_mov_greedy_2cand(&election, &tie)?.value;
            let mut oracle =
                |_: f64, _: f64| Ok(Ratio::from_integer(truth as i128));
            let est = estimate_mov_multiplicative(
                &mut oracle,
                cfg.epsilon,
                cfg.delta,
                election.total_population(),
                SampleLedger::new(),
            )?;
            let t = truth as f64;
            let ok = if truth == 0 {
                est.exhausted
            } else {
                let v = est.value_f64();
                v >= (1.0 - cfg.epsilon) * t && v <= (1.0 + cfg.epsilon) * t
            };
            Ok((ok, draws(&est.samples)))
        }
    }
}

/// Runs `cfg.trials` independent trials. Deterministic given the master
/// seed, independent of worker count; any trial error aborts the whole
/// evaluation (no partial statistics).
pub fn mc_eval(cfg: &ExperimentConfig) -> Result<TrialStats> {
    if cfg.trials == 0 {
        return Err(Error::ParameterError("trials must be at least 1".into()));
    }
    let run_all = || -> Vec<Result<(bool, u64)>> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, i))
            .collect()
    };
    let results = match cfg.workers {
        None => run_all(),
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::ParameterError(format!("worker pool: {e}")))?
            .install(run_all),
    };

    let mut successes = 0u64;
    let mut sample_counts = Vec::with_capacity(results.len());
    for r in results {
        let (ok, draws) = r?;
        successes += u64::from(ok);
        sample_counts.push(draws);
    }
    Ok(TrialStats {
        trials: cfg.trials,
        successes,
        sample_counts,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// One sweep row: the config plus its stats or error message.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub stats: Option<TrialStats>,
    pub error: Option<String>,
}

/// Evaluates each config independently; a failing row does not disturb the
/// others.
pub fn sweep(configs: &[ExperimentConfig]) -> Vec<SweepRow> {
    configs
        .iter()
        .map(|cfg| match mc_eval(cfg) {
            Ok(stats) => SweepRow { config: cfg.clone(), stats: Some(stats), error: None },
            Err(e) => SweepRow { config: cfg.clone(), stats: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// Stable CSV column order for sweep output.
pub const SWEEP_CSV_COLUMNS: &str =
    "algorithm,epsilon,delta,kappa,gamma,scale,trials,seed,successes,success_rate,mean_draws,error";

pub fn write_sweep_csv(rows: &[SweepRow], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_COLUMNS}")?;
    for row in rows {
        let c = &row.config;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let (successes, rate, mean) = match &row.stats {
            Some(s) => (
                s.successes.to_string(),
                format!("{:.6}", s.success_rate()),
                format!("{:.2}", s.mean_draws()),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let error = row.error.as_deref().unwrap_or("").replace(',', ";");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{successes},{rate},{mean},{error}",
            c.algorithm,
            c.epsilon,
            c.delta,
            opt(c.kappa),
            opt(c.gamma),
            c.scale,
            c.trials,
            c.seed,
        )?;
    }
    Ok(())
}

/// Exact lower-tail probability P(X <= x) for X ~ Binomial(n, p), computed
/// in log space. Used for the one-sided success-rate acceptance bound:
/// an observed success count `x` refutes p >= 1-δ only when this tail
/// probability (at p = 1-δ) is below the test level.
pub fn binomial_cdf(n: u64, p: f64, x: u64) -> f64 {
    if x >= n {
        return 1.0;
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (0..=x)
        .map(|k| {
            let ln_pmf = ln_fact[n as usize] - ln_fact[k as usize]
                - ln_fact[(n - k) as usize]
                + k as f64 * lp
                + (n - k) as f64 * lq;
            ln_pmf.exp()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::DistrictSizes;

    fn unanimous_config(algorithm: AlgorithmId) -> ExperimentConfig {
        let e = Election::new(
            2,
            (0..5).map(|_| DistrictProfile::from_counts(vec![10, 0])).collect(),
        );
        ExperimentConfig {
            algorithm,
            instance: InstanceSpec::Explicit(e),
            epsilon: 0.4,
            delta: 0.2,
            kappa: Some(4.0),
            gamma: Some(0.02),
            scale: 0.01,
            trials: 50,
            seed: 99,
            workers: None,
        }
    }

    #[test]
    fn unanimous_instance_always_succeeds() {
        for algorithm in [AlgorithmId::Alg1, AlgorithmId::Generic, AlgorithmId::Alg3] {
            let stats = mc_eval(&unanimous_config(algorithm)).unwrap();
            assert_eq!(stats.successes, 50, "{algorithm}");
        }
    }

    #[test]
    fn identical_seeds_give_identical_stats() {
        let cfg = ExperimentConfig {
            algorithm: AlgorithmId::Alg1,
            instance: InstanceSpec::Planted(PlantSpec {
                k: 20,
                sizes: DistrictSizes::Equal { n: 30 },
                gamma: 0.25,
                clamp: false,
            }),
            epsilon: 0.25,
            delta: 0.2,
            kappa: None,
            gamma: None,
            scale: 0.005,
            trials: 30,
            seed: 7,
            workers: None,
        };
        let a = mc_eval(&cfg).unwrap();
        let b = mc_eval(&cfg).unwrap();
        assert_eq!(a, b);
        let c = mc_eval(&ExperimentConfig { workers: Some(1), ..cfg.clone() }).unwrap();
        let d = mc_eval(&ExperimentConfig { workers: Some(8), ..cfg }).unwrap();
        assert_eq!(a.successes, c.successes);
        assert_eq!(c.successes, d.successes);
        assert_eq!(c.sample_counts, d.sample_counts);
    }

    #[test]
    fn sweep_isolates_per_row_errors() {
        let good = unanimous_config(AlgorithmId::Alg1);
        let bad = ExperimentConfig {
            kappa: Some(3.0), // below Algorithm 3's minimum
            ..unanimous_config(AlgorithmId::Alg3)
        };
        let rows = sweep(&[good, bad]);
        assert!(rows[0].stats.is_some() && rows[0].error.is_none());
        assert!(rows[1].stats.is_none() && rows[1].error.is_some());
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(SWEEP_CSV_COLUMNS));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn sweep_of_empty_list_is_header_only() {
        let mut out = Vec::new();
        write_sweep_csv(&sweep(&[]), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1);
    }

    #[test]
    fn binomial_cdf_sanity() {
        // Fair coin, n=4: P(X <= 2) = 11/16.
        assert!((binomial_cdf(4, 0.5, 2) - 11.0 / 16.0).abs() < 1e-12);
        assert!((binomial_cdf(4, 0.5, 4) - 1.0).abs() < 1e-12);
        // Extreme p where naive pmf computation would underflow.
        let tail = binomial_cdf(200, 0.9, 160);
        assert!(tail > 0.0 && tail < 0.01, "{tail}");
    }

    #[test]
    fn mov_mult_band_holds_with_exact_oracle() {
        let cfg = ExperimentConfig {
            algorithm: AlgorithmId::MovMult,
            instance: InstanceSpec::Planted(PlantSpec {
                k: 20,
                sizes: DistrictSizes::Equal { n: 30 },
                gamma: 0.2,
                clamp: false,
            }),
            epsilon: 0.5,
            delta: 0.2,
            kappa: Some(4.0),
            gamma: None,
            scale: 1.0,
            trials: 20,
            seed: 3,
            workers: None,
        };
        let stats = mc_eval(&cfg).unwrap();
        assert_eq!(stats.successes, stats.trials);
    }

    #[test]
    fn median_known_concentrated_counts() {
        let cfg = ExperimentConfig {
            algorithm: AlgorithmId::MedianKnown,
            instance: InstanceSpec::MedianDistrict { counts: vec![2, 96, 2] },
            epsilon: 0.3,
            delta: 0.2,
            kappa: None,
            gamma: None,
            scale: 0.5,
            trials: 40,
            seed: 12,
            workers: None,
        };
        let stats = mc_eval(&cfg).unwrap();
        assert_eq!(stats.successes, stats.trials);
    }
}
