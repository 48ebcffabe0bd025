//! `ballot-sampler`: generate election instances, run the sampling-based
//! predictors and MOV estimators, query the exact oracles, and drive Monte
//! Carlo evaluations and sweeps.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use ballot_sampler::election::{Election, TieBreak};
use ballot_sampler::error::{Error, Result};
use ballot_sampler::generators::{
    gen_lowerbound_instance, gen_planted_2cand, gen_random_election, gen_single_peaked,
    DistrictSizes, LowerBoundFamily, PlantSpec,
};
use ballot_sampler::harness::{
    mc_eval, sweep, write_sweep_csv, ExperimentConfig, InstanceSpec, SweepRow,
};
use ballot_sampler::io::{read_election_file, write_election_file};
use ballot_sampler::mov::{estimate_mov_additive, estimate_mov_multiplicative};
use ballot_sampler::oracles::{election_mov_bruteforce, election_mov_greedy_2cand};
use ballot_sampler::predictors::{
    predict_2cand_unknown_mov_arbitrary, predict_2cand_unknown_mov_bounded,
    predict_generic_known_mov, predict_median_single, predict_plurality_known_mov,
    PluralitySub, PredictionOutcome, DEFAULT_GAMMA_FLOOR,
};
use ballot_sampler::rules::{district_election_winner, DistrictRule};
use ballot_sampler::sampling::{decimal_to_ratio, AlgorithmId};
use ballot_sampler::{DistrictProfile, HarmoniousOrder};

#[derive(Parser)]
#[command(
    name = "ballot-sampler",
    about = "Sampling-based winner prediction and margin-of-victory estimation \
             for district-based elections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Alg1,
    Generic,
    Alg3,
    Alg4,
    MedianKnown,
    MedianUnknown,
    NoisySingle,
    NoisyDistricts,
    MovAdd,
    MovMult,
}

impl From<Algorithm> for AlgorithmId {
    fn from(a: Algorithm) -> AlgorithmId {
        match a {
            Algorithm::Alg1 => AlgorithmId::Alg1,
            Algorithm::Generic => AlgorithmId::Generic,
            Algorithm::Alg3 => AlgorithmId::Alg3,
            Algorithm::Alg4 => AlgorithmId::Alg4,
            Algorithm::MedianKnown => AlgorithmId::MedianKnown,
            Algorithm::MedianUnknown => AlgorithmId::MedianUnknown,
            Algorithm::NoisySingle => AlgorithmId::NoisySingle,
            Algorithm::NoisyDistricts => AlgorithmId::NoisyDistricts,
            Algorithm::MovAdd => AlgorithmId::MovAdd,
            Algorithm::MovMult => AlgorithmId::MovMult,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Planted,
    Lb1,
    Lb2,
    SinglePeaked,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SizeRule {
    Equal,
    Capped,
    HeavyTailed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Regime {
    Additive,
    Multiplicative,
}

#[derive(Args)]
struct CommonParams {
    /// Closeness parameter ε in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Failure probability δ in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// District-size cap factor κ (Algorithm 3, additive MOV).
    #[arg(long)]
    kappa: Option<f64>,
    /// Total-variation bound γ for the noisy algorithms.
    #[arg(long)]
    gamma: Option<f64>,
    /// Multiplies every closed-form sample budget.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an election instance and write it to a file.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of districts.
        #[arg(long, default_value_t = 20)]
        k: u64,
        /// District population (base size for capped/heavy-tailed).
        #[arg(long, default_value_t = 50)]
        n: u64,
        /// Number of candidates (single-peaked and random families).
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Target MOV fraction for the planted family.
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        /// Exact ε (plain decimal) for the lower-bound families.
        #[arg(long, default_value = "0.1")]
        epsilon: String,
        /// District-size rule for the planted family.
        #[arg(long, value_enum, default_value_t = SizeRule::Equal)]
        sizes: SizeRule,
        /// κ for capped district sizes.
        #[arg(long, default_value_t = 4)]
        size_kappa: u64,
        /// Fail instead of clamping an unachievable planted margin.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output election file (.json for JSON, anything else text).
        #[arg(long = "out")]
        out: PathBuf,
    },
    /// Run one winner-prediction algorithm on an election file.
    Predict {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        params: CommonParams,
    },
    /// Estimate the margin of victory of an election file.
    EstimateMov {
        #[arg(long, value_enum, default_value_t = Regime::Additive)]
        regime: Regime,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        params: CommonParams,
    },
    /// Exact winners and margin of victory via the oracles.
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
        /// Per-district rule.
        #[arg(long, value_enum, default_value_t = Rule::Plurality)]
        rule: Rule,
    },
    /// Monte Carlo evaluation of an algorithm's guarantee.
    Mc {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Election file for the fixed-instance mode; otherwise a planted
        /// instance is built per trial.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Districts of the per-trial planted instance.
        #[arg(long, default_value_t = 20)]
        k: u64,
        /// District population of the per-trial planted instance.
        #[arg(long, default_value_t = 50)]
        n: u64,
        /// Planted MOV fraction.
        #[arg(long, default_value_t = 0.2)]
        target: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        params: CommonParams,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Evaluate a JSON list of experiment configs; one output row each.
    Sweep {
        /// JSON array of experiment configurations.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    Plurality,
    Median,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            family,
            k,
            n,
            m,
            gamma,
            epsilon,
            sizes,
            size_kappa,
            strict,
            seed,
            out,
        } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut notes = Vec::new();
            let election = match family {
                Family::Planted => {
                    let sizes = match sizes {
                        SizeRule::Equal => DistrictSizes::Equal { n },
                        SizeRule::Capped => DistrictSizes::Capped { n, kappa: size_kappa },
                        SizeRule::HeavyTailed => DistrictSizes::HeavyTailed { small: n },
                    };
                    let spec = PlantSpec { k: k as usize, sizes, gamma, clamp: !strict };
                    let planted = gen_planted_2cand(&spec, &mut rng)?;
                    notes.push(format!("target_mov={}", planted.target_mov));
                    notes.push(format!("achieved_mov={}", planted.achieved_mov));
                    notes.push(format!("clamped={}", planted.clamped));
                    planted.election
                }
                Family::Lb1 | Family::Lb2 => {
                    let eps = decimal_to_ratio(&epsilon)?;
                    let lb_family = if family == Family::Lb1 {
                        LowerBoundFamily::L1
                    } else {
                        LowerBoundFamily::L2
                    };
                    gen_lowerbound_instance(lb_family, eps, n, k)?
                }
                Family::SinglePeaked => {
                    let order = HarmoniousOrder::new((0..m as u32).collect(), m)?;
                    let groups = gen_single_peaked(&order, n, None, &mut rng)?;
                    let mut e =
                        Election::new(m, vec![DistrictProfile::from_rankings(groups, m)]);
                    e.harmonious_order = Some(order);
                    e
                }
                Family::Random => gen_random_election(m, k as usize, n, &mut rng)?,
            };
            write_election_file(&election, &out)?;
            println!(
                "written={} m={} k={} population={}",
                out.display(),
                election.num_candidates,
                election.num_districts(),
                election.total_population()
            );
            for note in notes {
                println!("{note}");
            }
            Ok(())
        }
        Command::Predict { algorithm, input, params } => {
            let election = read_election_file(&input)?;
            let tie = TieBreak::ascending(election.num_candidates);
            let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
            let outcome: PredictionOutcome = match AlgorithmId::from(algorithm) {
                AlgorithmId::Alg1 => predict_plurality_known_mov(
                    &election, params.epsilon, params.delta, &tie, &mut rng, params.scale,
                )?,
                AlgorithmId::Generic => {
                    let sub = PluralitySub {
                        tie: tie.clone(),
                        scale: params.scale,
                        budget_override: None,
                    };
                    predict_generic_known_mov(
                        &election, &sub, params.epsilon, params.delta, &tie, &mut rng,
                        params.scale,
                    )?
                }
                AlgorithmId::Alg3 => {
                    let kappa = params.kappa.ok_or_else(|| {
                        Error::ParameterError("--kappa is required for alg3".into())
                    })?;
                    predict_2cand_unknown_mov_bounded(
                        &election, params.delta, kappa, &tie, &mut rng, params.scale,
                        DEFAULT_GAMMA_FLOOR,
                    )?
                }
                AlgorithmId::Alg4 => predict_2cand_unknown_mov_arbitrary(
                    &election, params.delta, &tie, &mut rng, params.scale,
                    DEFAULT_GAMMA_FLOOR,
                )?,
                AlgorithmId::MedianKnown | AlgorithmId::MedianUnknown => {
                    let known = AlgorithmId::from(algorithm) == AlgorithmId::MedianKnown;
                    let order = election.order_for_district(0);
                    if known && order.is_none() {
                        return Err(Error::RuleInapplicable(
                            "median-known needs a harmonious order in the input".into(),
                        ));
                    }
                    predict_median_single(
                        &election.districts[0],
                        params.epsilon,
                        params.delta,
                        if known { order } else { None },
                        &tie,
                        &mut rng,
                        params.scale,
                    )?
                }
                AlgorithmId::NoisySingle | AlgorithmId::NoisyDistricts => {
                    // The CLI has no channel for handing over the true
                    // sampling distribution; evaluate these through `mc`,
                    // which constructs the adversarial tilt itself.
                    return Err(Error::ParameterError(
                        "noisy algorithms need a generated bias; use `mc`".into(),
                    ));
                }
                AlgorithmId::MovAdd | AlgorithmId::MovMult => {
                    return Err(Error::ParameterError(
                        "use `estimate-mov` for the MOV estimators".into(),
                    ));
                }
            };
            println!("winner={}", outcome.winner);
            println!("districts_drawn={}", outcome.samples.districts_drawn);
            println!("votes_drawn={}", outcome.samples.votes_drawn);
            if let Some(round) = outcome.terminated_at {
                println!("terminated_at={round}");
            }
            if outcome.condorcet_fallback {
                println!("condorcet_fallback=true");
            }
            Ok(())
        }
        Command::EstimateMov { regime, input, params } => {
            let election = read_election_file(&input)?;
            let tie = TieBreak::ascending(election.num_candidates);
            let kappa = params.kappa.ok_or_else(|| {
                Error::ParameterError("--kappa is required for MOV estimation".into())
            })?;
            let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
            let est = match regime {
                Regime::Additive => estimate_mov_additive(
                    &election, params.epsilon, params.delta, kappa, &tie, &mut rng,
                    params.scale,
                )?,
                Regime::Multiplicative => {
                    let mut ledger = ballot_sampler::sampling::SampleLedger::new();
                    let mut oracle = |eps_i: f64, delta_i: f64| {
                        let e = estimate_mov_additive(
                            &election, eps_i, delta_i, kappa, &tie, &mut rng,
                            params.scale,
                        )?;
                        ledger.merge(&e.samples);
                        Ok(e.value)
                    };
                    let mut est = estimate_mov_multiplicative(
                        &mut oracle,
                        params.epsilon,
                        params.delta,
                        election.total_population(),
                        ballot_sampler::sampling::SampleLedger::new(),
                    )?;
                    est.samples = ledger;
                    est
                }
            };
            println!("estimate={}", est.value);
            println!("estimate_float={:.6}", est.value_f64());
            println!("rounds={}", est.rounds);
            println!("exhausted={}", est.exhausted);
            println!("districts_drawn={}", est.samples.districts_drawn);
            println!("votes_drawn={}", est.samples.votes_drawn);
            Ok(())
        }
        Command::Exact { input, rule } => {
            let election = read_election_file(&input)?;
            let tie = TieBreak::ascending(election.num_candidates);
            let rule = match rule {
                Rule::Plurality => DistrictRule::Plurality,
                Rule::Median => DistrictRule::Median,
            };
            let (overall, winners) = district_election_winner(&election, rule, &tie)?;
            println!("overall={overall}");
            println!(
                "district_winners={}",
                winners
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let mov = if election.num_candidates == 2 && rule == DistrictRule::Plurality {
                Some(election_mov_greedy_2cand(&election, &tie)?.value)
            } else {
                match election_mov_bruteforce(&election, rule, &tie) {
                    Ok(r) => Some(r.value),
                    Err(Error::SizeLimit(_)) => None,
                    Err(e) => return Err(e),
                }
            };
            match mov {
                Some(v) => println!("mov={v}"),
                None => println!("mov=unavailable(exceeds brute-force envelope)"),
            }
            Ok(())
        }
        Command::Mc {
            algorithm,
            input,
            k,
            n,
            target,
            trials,
            workers,
            params,
            format,
            out,
        } => {
            let instance = match input {
                Some(path) => InstanceSpec::Explicit(read_election_file(&path)?),
                None => InstanceSpec::Planted(PlantSpec {
                    k: k as usize,
                    sizes: DistrictSizes::Equal { n },
                    gamma: target,
                    clamp: false,
                }),
            };
            let cfg = ExperimentConfig {
                algorithm: algorithm.into(),
                instance,
                epsilon: params.epsilon,
                delta: params.delta,
                kappa: params.kappa,
                gamma: params.gamma,
                scale: params.scale,
                trials,
                seed: params.seed,
                workers,
            };
            let stats = mc_eval(&cfg)?;
            let text = match format {
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&stats)
                        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => {
                    let row = SweepRow {
                        config: stats.config.clone(),
                        stats: Some(stats),
                        error: None,
                    };
                    let mut buf = Vec::new();
                    write_sweep_csv(&[row], &mut buf)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
            };
            emit(text, out)
        }
        Command::Sweep { input, format, out } => {
            let file = std::fs::File::open(&input)?;
            let configs: Vec<ExperimentConfig> = serde_json::from_reader(file)
                .map_err(|e| Error::ParseError(format!("sweep config: {e}")))?;
            let rows = sweep(&configs);
            let text = match format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&rows)
                        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
                    s.push('\n');
                    s
                }
            };
            emit(text, out)
        }
    }
}

fn emit(text: String, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
