//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N (...): PASS|FAIL` line.

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use ballot_sampler::election::{
    is_single_peaked, DistrictProfile, Election, HarmoniousOrder, Ranking,
    RankingGroup, TieBreak,
};
use ballot_sampler::generators::{
    gen_lowerbound_instance, gen_planted_2cand, DistrictSizes, LowerBoundFamily,
    PlantSpec,
};
use ballot_sampler::harness::{
    binomial_cdf, mc_eval, ExperimentConfig, InstanceSpec,
};
use ballot_sampler::mov::estimate_mov_multiplicative;
use ballot_sampler::oracles::{election_mov_bruteforce, election_mov_greedy_2cand};
use ballot_sampler::predictors::{
    predict_median_single, predict_plurality_known_mov, predict_plurality_noisy_single,
};
use ballot_sampler::rules::{
    condorcet_winner, district_election_winner, maj_and_secmaj, median_winner,
    pairwise_matrix, winner_frequencies, DistrictRule,
};
use ballot_sampler::sampling::{
    plan, AlgorithmId, BiasedDistribution, PlanParams, SampleLedger,
};

fn report(criterion: u32, name: &str, ok: bool) {
    println!("criterion {criterion} ({name}): {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} ({name}) failed");
}

/// Criterion 1: greedy = brute-force MOV on every m=2 instance with
/// k <= 5, n_j <= 6 (district multisets, deduplicated by symmetry).
#[test]
fn criterion_1_oracle_equivalence_exhaustive() {
    let tie = TieBreak::ascending(2);
    // All district states (a, b) with 1 <= a+b <= 6.
    let states: Vec<[u64; 2]> = (1..=6u64)
        .flat_map(|n| (0..=n).map(move |a| [a, n - a]))
        .collect();

    let mut checked = 0u64;
    let mut ok = true;
    'outer: for k in 1..=5usize {
        for combo in (0..states.len()).combinations_with_replacement(k) {
            let election = Election::new(
                2,
                combo
                    .iter()
                    .map(|&s| DistrictProfile::from_counts(states[s].to_vec()))
                    .collect(),
            );
            let greedy = election_mov_greedy_2cand(&election, &tie).unwrap().value;
            let brute = election_mov_bruteforce(&election, DistrictRule::Plurality, &tie)
                .unwrap()
                .value;
            checked += 1;
            if greedy != brute {
                eprintln!("mismatch on {combo:?}: greedy {greedy} brute {brute}");
                ok = false;
                break 'outer;
            }
        }
    }
    assert!(checked > 200_000, "enumeration too small: {checked}");
    report(1, "oracle equivalence, exhaustive", ok);
}

/// Criterion 2: median winner = Condorcet winner on every single-peaked
/// profile with m <= 4, odd N <= 7, over the identity order.
#[test]
fn criterion_2_median_equals_condorcet() {
    let mut ok = true;
    for m in 2..=4usize {
        let order = HarmoniousOrder::new((0..m as u32).collect(), m).unwrap();
        let sp_rankings: Vec<Ranking> = (0..m as u32)
            .permutations(m)
            .map(|p| Ranking::new(p, m).unwrap())
            .filter(|r| {
                is_single_peaked(
                    &[RankingGroup { order: r.clone(), mult: 1 }],
                    &order,
                )
            })
            .collect();
        assert_eq!(sp_rankings.len(), 1 << (m - 1));

        for n in [1usize, 3, 5, 7] {
            for combo in (0..sp_rankings.len()).combinations_with_replacement(n) {
                let groups: Vec<RankingGroup> = combo
                    .iter()
                    .counts()
                    .into_iter()
                    .map(|(&i, mult)| RankingGroup {
                        order: sp_rankings[i].clone(),
                        mult: mult as u64,
                    })
                    .collect();
                let mut tops = vec![0u64; m];
                for g in &groups {
                    tops[g.order.top().index()] += g.mult;
                }
                let med = median_winner(&tops, &order);
                let cond = condorcet_winner(&pairwise_matrix(&groups, m));
                if cond != Some(med) {
                    eprintln!("m={m} n={n} tops={tops:?}: median {med} condorcet {cond:?}");
                    ok = false;
                }
            }
        }
    }
    report(2, "median = Condorcet on single-peaked odd-N profiles", ok);
}

/// Criterion 3: both lower-bound families have oracle MOV exactly εN on a
/// grid of valid parameters.
#[test]
fn criterion_3_lowerbound_identities() {
    let tie = TieBreak::ascending(2);
    let mut ok = true;
    let mut cases = 0;
    let l1_grid = [(1i128, 20i128), (1, 10), (1, 8)];
    for &(p, q) in &l1_grid {
        for k in [20u64, 40, 60] {
            for n in [4u64, 8, 16] {
                let eps = Ratio::new(p, q);
                let e = gen_lowerbound_instance(LowerBoundFamily::L1, eps, n, k).unwrap();
                let expected = eps * Ratio::from_integer((n * k) as i128);
                assert!(expected.is_integer());
                let mov = election_mov_greedy_2cand(&e, &tie).unwrap().value;
                ok &= mov as i128 == *expected.numer();
                cases += 1;
            }
        }
    }
    for &(p, q) in &[(1i128, 40i128), (1, 80)] {
        for k in [20u64, 40] {
            for n in [8u64, 16] {
                let eps = Ratio::new(p, q);
                let e = gen_lowerbound_instance(LowerBoundFamily::L2, eps, n, k).unwrap();
                let expected = eps * Ratio::from_integer((n * k) as i128);
                assert!(expected.is_integer());
                let mov = election_mov_greedy_2cand(&e, &tie).unwrap().value;
                ok &= mov as i128 == *expected.numer();
                cases += 1;
            }
        }
    }
    assert!(cases >= 30);
    report(3, "lower-bound instance MOV identities", ok);
}

/// Criterion 4: f(w) − f(w') >= εk/3 on 200 planted instances with
/// MOV >= εN, ε in {0.1, 0.2, 0.3}.
#[test]
fn criterion_4_structural_lemma() {
    let tie = TieBreak::ascending(2);
    let combos: [(f64, usize, DistrictSizes); 7] = [
        (0.1, 40, DistrictSizes::Equal { n: 50 }),
        (0.1, 21, DistrictSizes::Capped { n: 20, kappa: 4 }),
        (0.1, 11, DistrictSizes::HeavyTailed { small: 10 }),
        (0.2, 40, DistrictSizes::Equal { n: 50 }),
        (0.2, 15, DistrictSizes::Capped { n: 20, kappa: 2 }),
        (0.3, 5, DistrictSizes::Equal { n: 5 }),
        (0.3, 9, DistrictSizes::Equal { n: 9 }),
    ];
    let mut ok = true;
    let mut instances = 0u32;
    'outer: for seed in 0.. {
        for &(gamma, k, sizes) in &combos {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let spec = PlantSpec { k, sizes, gamma, clamp: false };
            let planted = gen_planted_2cand(&spec, &mut rng).unwrap();
            let e = &planted.election;
            let mov = election_mov_greedy_2cand(e, &tie).unwrap().value;
            assert_eq!(mov, planted.achieved_mov);

            let (_, winners) =
                district_election_winner(e, DistrictRule::Plurality, &tie).unwrap();
            let freq = winner_frequencies(&winners, 2);
            let (w, w2) = maj_and_secmaj(&winners, 2, &tie);
            let lhs = Ratio::from_integer(
                (freq[w.index()] - freq[w2.index()]) as i128,
            );
            // The lemma at the instance's own margin fraction mov/N.
            let rhs = Ratio::new(mov as i128 * k as i128, 3 * e.total_population() as i128);
            if lhs < rhs {
                eprintln!("lemma fails: gamma={gamma} k={k} lhs={lhs} rhs={rhs}");
                ok = false;
            }
            instances += 1;
            if instances >= 200 {
                break 'outer;
            }
        }
    }
    report(4, "structural lemma f(w)-f(w') >= eps*k/3", ok);
}

/// Criterion 5: each predictor's empirical success rate over 200 pinned
/// trials is consistent with >= 1−δ (δ=0.1) under the one-sided binomial
/// bound, at reduced scale, on planted instances meeting its preconditions.
#[test]
fn criterion_5_probabilistic_guarantees() {
    let planted_equal = InstanceSpec::Planted(PlantSpec {
        k: 20,
        sizes: DistrictSizes::Equal { n: 50 },
        gamma: 0.25,
        clamp: false,
    });
    let base = ExperimentConfig {
        algorithm: AlgorithmId::Alg1,
        instance: planted_equal.clone(),
        epsilon: 0.25,
        delta: 0.1,
        kappa: None,
        gamma: None,
        scale: 0.02,
        trials: 200,
        seed: 20240817,
        workers: None,
    };
    let suites: Vec<(&str, ExperimentConfig)> = vec![
        ("alg1", base.clone()),
        (
            "alg3",
            ExperimentConfig {
                algorithm: AlgorithmId::Alg3,
                kappa: Some(4.0),
                scale: 0.05,
                ..base.clone()
            },
        ),
        (
            "alg4",
            ExperimentConfig {
                algorithm: AlgorithmId::Alg4,
                instance: InstanceSpec::Planted(PlantSpec {
                    k: 41,
                    sizes: DistrictSizes::HeavyTailed { small: 10 },
                    gamma: 0.1,
                    clamp: false,
                }),
                scale: 0.01,
                ..base.clone()
            },
        ),
        (
            "median-known",
            ExperimentConfig {
                algorithm: AlgorithmId::MedianKnown,
                instance: InstanceSpec::MedianDistrict { counts: vec![2, 96, 2] },
                epsilon: 0.4,
                scale: 0.5,
                ..base.clone()
            },
        ),
        (
            "median-unknown",
            ExperimentConfig {
                algorithm: AlgorithmId::MedianUnknown,
                instance: InstanceSpec::SinglePeaked {
                    m: 3,
                    n: 100,
                    peak_weights: Some(vec![1, 18, 1]),
                },
                epsilon: 0.4,
                scale: 0.5,
                ..base.clone()
            },
        ),
        (
            "noisy-single",
            ExperimentConfig {
                algorithm: AlgorithmId::NoisySingle,
                instance: InstanceSpec::Planted(PlantSpec {
                    k: 1,
                    sizes: DistrictSizes::Equal { n: 100 },
                    gamma: 0.45,
                    clamp: false,
                }),
                epsilon: 0.4,
                gamma: Some(0.1),
                scale: 0.5,
                ..base.clone()
            },
        ),
        (
            "noisy-districts",
            ExperimentConfig {
                algorithm: AlgorithmId::NoisyDistricts,
                gamma: Some(0.02),
                scale: 0.0005,
                ..base.clone()
            },
        ),
    ];

    let mut ok = true;
    let mut failing = Vec::new();
    for (name, cfg) in suites {
        let stats = mc_eval(&cfg).unwrap();
        // Not refuted at the 5% level against p = 1-delta.
        let consistent = binomial_cdf(stats.trials, 1.0 - cfg.delta, stats.successes) > 0.05;
        if !consistent {
            failing.push(format!("{name} ({}/{})", stats.successes, stats.trials));
            ok = false;
        }
    }
    if !failing.is_empty() {
        eprintln!("failing suites: {}", failing.join(", "));
    }
    report(5, "probabilistic guarantees at reduced scale", ok);
}

/// Criterion 6: additive MOV estimates land within εN (ε = planted γ) in a
/// fraction of trials consistent with >= 1−δ.
#[test]
fn criterion_6_mov_additive() {
    let mut ok = true;
    for gamma in [0.15, 0.25] {
        let cfg = ExperimentConfig {
            algorithm: AlgorithmId::MovAdd,
            instance: InstanceSpec::Planted(PlantSpec {
                k: 40,
                sizes: DistrictSizes::Equal { n: 50 },
                gamma,
                clamp: false,
            }),
            epsilon: gamma,
            delta: 0.2,
            kappa: Some(4.0),
            gamma: None,
            scale: 0.001,
            trials: 100,
            seed: 20240817,
            workers: None,
        };
        let stats = mc_eval(&cfg).unwrap();
        let consistent = binomial_cdf(stats.trials, 1.0 - cfg.delta, stats.successes) > 0.05;
        if !consistent {
            eprintln!(
                "mov-add gamma={gamma}: {}/{} in band",
                stats.successes, stats.trials
            );
            ok = false;
        }
    }
    report(6, "additive MOV estimator band", ok);
}

/// Criterion 7: the multiplicative wrapper with the exact oracle as black
/// box lands in [(1−ε)γN, (1+ε)γN] on 50 planted instances, and the λ_i
/// closed form matches its defining expression on 20 (ε, i) pairs.
#[test]
fn criterion_7_multiplicative_wrapper() {
    let tie = TieBreak::ascending(2);
    let mut ok = true;
    let mut count = 0;
    'outer: for seed in 0..13u64 {
        for (k, gamma) in [(10usize, 0.1), (20, 0.2), (15, 0.15), (30, 0.05)] {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let spec = PlantSpec {
                k,
                sizes: DistrictSizes::Capped { n: 20, kappa: 3 },
                gamma,
                clamp: false,
            };
            let planted = gen_planted_2cand(&spec, &mut rng).unwrap();
            let truth = election_mov_greedy_2cand(&planted.election, &tie)
                .unwrap()
                .value;
            for eps in [0.25, 0.5] {
                let mut oracle =
                    |_: f64, _: f64| Ok(Ratio::from_integer(truth as i128));
                let est = estimate_mov_multiplicative(
                    &mut oracle,
                    eps,
                    0.1,
                    planted.election.total_population(),
                    SampleLedger::new(),
                )
                .unwrap();
                let (v, t) = (est.value_f64(), truth as f64);
                if est.exhausted || v < (1.0 - eps) * t || v > (1.0 + eps) * t {
                    eprintln!("wrapper out of band: seed={seed} k={k} eps={eps} v={v} t={t}");
                    ok = false;
                }
            }
            count += 1;
            if count >= 50 {
                break 'outer;
            }
        }
    }

    // lambda_i = ((1+eps)^{psi_1} + 1)/(1+eps)^i with psi_1 = ln(1/eps)/ln(1+eps)
    // collapses to (1/eps + 1)/(1+eps)^i.
    for eps in [0.1f64, 0.25, 0.5, 0.75] {
        for i in 1..=5 {
            let psi1 = (1.0 / eps).ln() / (1.0 + eps).ln();
            let defining = ((1.0 + eps).powf(psi1) + 1.0) / (1.0 + eps).powi(i);
            let closed = (1.0 / eps + 1.0) / (1.0 + eps).powi(i);
            if (defining - closed).abs() > 1e-9 * closed {
                ok = false;
            }
        }
    }
    report(7, "multiplicative wrapper with exact oracle", ok);
}

/// Criterion 8: recorded draws equal the closed-form plan values exactly
/// for 50 random parameter settings.
#[test]
fn criterion_8_sample_ledger_exactness() {
    let tie2 = TieBreak::ascending(2);
    let tie3 = TieBreak::ascending(3);
    let election = Election::new(
        2,
        (0..4).map(|_| DistrictProfile::from_counts(vec![8, 2])).collect(),
    );
    let order = HarmoniousOrder::new(vec![0, 1, 2], 3).unwrap();
    let median_district = DistrictProfile::from_counts(vec![3, 14, 3]);
    let noisy_district = DistrictProfile::from_counts(vec![30, 20]);
    let uniform = BiasedDistribution::uniform(50);

    let mut param_rng = ChaCha12Rng::seed_from_u64(88);
    let mut ok = true;
    for trial in 0..50u64 {
        let eps = param_rng.gen_range(0.1..0.9);
        let delta = param_rng.gen_range(0.05..0.5);
        let mut rng = ChaCha12Rng::seed_from_u64(trial);

        let scale = 1e-4;
        let p = plan(AlgorithmId::Alg1, &PlanParams::new(eps, delta).scale(scale)).unwrap();
        let out =
            predict_plurality_known_mov(&election, eps, delta, &tie2, &mut rng, scale)
                .unwrap();
        ok &= out.samples.districts_drawn == p.l1 && out.samples.votes_drawn == p.l1 * p.l2;

        let scale = 0.05;
        let p = plan(AlgorithmId::MedianKnown, &PlanParams::new(eps, delta).scale(scale))
            .unwrap();
        let out = predict_median_single(
            &median_district, eps, delta, Some(&order), &tie3, &mut rng, scale,
        )
        .unwrap();
        ok &= out.samples.votes_drawn == p.l1 && out.samples.districts_drawn == 0;

        let p = plan(AlgorithmId::NoisySingle, &PlanParams::new(eps, delta).scale(scale))
            .unwrap();
        let out = predict_plurality_noisy_single(
            &noisy_district, eps, delta, &uniform, true, &tie2, &mut rng, scale,
        )
        .unwrap();
        ok &= out.samples.votes_drawn == p.l1;
    }
    report(8, "sample-ledger exactness", ok);
}

/// Criterion 9: every CLI command is byte-identical across repeated runs
/// and across worker counts {1, 8} at the same seed.
#[test]
fn criterion_9_cli_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_ballot-sampler");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).display().to_string();

    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let ok = std::cell::Cell::new(true);
    let same_twice = |args: &[&str]| {
        let a = run(args);
        let b = run(args);
        if a != b {
            eprintln!("non-deterministic output: {args:?}");
            ok.set(false);
        }
        a
    };

    let e1 = path("planted.txt");
    same_twice(&[
        "generate", "--family", "planted", "--k", "12", "--n", "30", "--gamma", "0.2",
        "--seed", "7", "--out", &e1,
    ]);
    let gen_a = std::fs::read(&e1).unwrap();
    same_twice(&[
        "generate", "--family", "planted", "--k", "12", "--n", "30", "--gamma", "0.2",
        "--seed", "7", "--out", &e1,
    ]);
    if gen_a != std::fs::read(&e1).unwrap() {
        ok.set(false);
    }

    same_twice(&["exact", "--in", &e1]);
    same_twice(&[
        "predict", "--algorithm", "alg1", "--in", &e1, "--epsilon", "0.3", "--delta",
        "0.2", "--scale", "0.01", "--seed", "11",
    ]);
    same_twice(&[
        "estimate-mov", "--in", &e1, "--epsilon", "0.3", "--delta", "0.2", "--kappa",
        "4", "--scale", "0.001", "--seed", "11",
    ]);

    let mc_base = [
        "mc", "--algorithm", "alg1", "--k", "12", "--n", "30", "--target", "0.25",
        "--trials", "40", "--epsilon", "0.25", "--delta", "0.2", "--scale", "0.005",
        "--seed", "21", "--format", "csv",
    ];
    let w1 = same_twice(&[&mc_base[..], &["--workers", "1"]].concat());
    let w8 = same_twice(&[&mc_base[..], &["--workers", "8"]].concat());
    // Worker count appears nowhere in the CSV columns, so the rows must be
    // byte-identical.
    if w1 != w8 {
        eprintln!("worker counts 1 and 8 disagree");
        ok.set(false);
    }

    let sweep_cfg = path("sweep.json");
    std::fs::write(
        &sweep_cfg,
        r#"[{"algorithm":"alg1","instance":{"Planted":{"k":10,"sizes":{"Equal":{"n":20}},"gamma":0.25,"clamp":false}},"epsilon":0.25,"delta":0.2,"kappa":null,"gamma":null,"scale":0.005,"trials":20,"seed":4,"workers":null}]"#,
    )
    .unwrap();
    same_twice(&["sweep", "--in", &sweep_cfg]);

    report(9, "CLI determinism", ok.get());
}

/// Exit-code contract: 2 for parameter errors, 3 for invariant/parse
/// failures. (Supplementary to criterion 9.)
#[test]
fn cli_exit_codes() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_ballot-sampler");
    let dir = tempfile::tempdir().unwrap();

    // kappa below Algorithm 3's minimum -> parameter error, exit 2.
    let e1 = dir.path().join("e.txt");
    std::fs::write(&e1, "election m=2 k=1\ndistrict n=10 counts=7,3\n").unwrap();
    let out = Command::new(bin)
        .args([
            "predict", "--algorithm", "alg3", "--in", e1.to_str().unwrap(), "--kappa",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // Truncated election file -> parse error, exit 3.
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "election m=2 k=3\ndistrict n=10 counts=7,3\n").unwrap();
    let out = Command::new(bin)
        .args(["exact", "--in", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
