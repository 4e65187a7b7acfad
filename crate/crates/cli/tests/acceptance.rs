//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::path::Path;
use std::time::{Duration, Instant};

use planpace_core::algorithms::{run_algorithm, AlgorithmSpec, Setting};
use planpace_core::environments::{
    generate_plan, ArmMeans, EnvKind, Environment, EnvironmentSpec, NoiseModel, Phase, PlanKind, PlanSpec,
};
use planpace_core::lp::brute::{lp_brute_check, random_bounded_lp, BruteResult};
use planpace_core::lp::{solve_lp, LpStatus};
use planpace_core::minimizers::{
    default_learning_rate, DualMinimizer, Hedge, MinimizerConfig, MinimizerKind, OgdDual, PayoffRange,
};
use planpace_core::oracles::{
    error_penalty, oracle_report, opt_dynamic, opt_dynamic_eps, opt_static, opt_static_eps, realized_regrets,
    regret_bound, BoundParams, ErrorSchedule, MeanProfile,
};
use planpace_core::{Instance, SpendingPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 0.05;
const SEEDS: u64 = 20;

fn verdict(criterion: u32, name: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let status = if pass && elapsed <= limit { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} ({name}): {status} in {:.1}s (limit {}s): {detail}",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
    assert!(elapsed <= limit, "criterion {criterion} exceeded {}s", limit.as_secs());
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn uniform_instance(k: usize, horizon: usize, rho: f64) -> Instance {
    let plan = SpendingPlan::uniform(1, horizon, rho).unwrap();
    Instance::new(k, rho * horizon as f64, plan).unwrap()
}

/// Two real arms: a cheap weak one and an expensive strong one. Every value in
/// a round is scaled by one shared factor, so a learner that sees the round's
/// functions cannot profit from noise it would be unable to exploit in mean.
fn conformance_env(seed: u64, horizon: usize) -> Environment {
    let means = ArmMeans {
        rewards: vec![0.0, 0.4, 0.8],
        costs: vec![vec![0.0], vec![0.1], vec![0.7]],
    };
    Environment::new(
        EnvironmentSpec::stationary(means, NoiseModel::CommonScale { spread: 0.25 }, seed),
        horizon,
    )
    .unwrap()
}

fn random_means<R: Rng>(rng: &mut R, k: usize, m: usize) -> ArmMeans {
    let mut rewards = vec![0.0];
    let mut costs = vec![vec![0.0; m]];
    for _ in 1..k {
        rewards.push(rng.random_range(0.0..1.0));
        costs.push((0..m).map(|_| rng.random_range(0.0..1.0)).collect());
    }
    ArmMeans { rewards, costs }
}

#[test]
fn criterion_1_feasibility() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let settings = [Setting::Ora, Setting::OlrcFull, Setting::OlrcBandit];
    let (mut runs, mut violations) = (0, 0);
    for i in 0..240usize {
        let setting = settings[i % 3];
        let meta = (i / 3) % 2 == 1;
        let k = rng.random_range(2..=5);
        let m = rng.random_range(1..=3);
        let horizon = rng.random_range(50..=400);
        let budget = rng.random_range(0.05..0.6) * horizon as f64;
        let plan_kind = match rng.random_range(0..4) {
            0 => PlanKind::Uniform,
            1 => PlanKind::Frontloaded {
                imbalance: rng.random_range(1.0..1.5),
            },
            2 => PlanKind::Backloaded {
                imbalance: rng.random_range(1.0..1.5),
            },
            _ => PlanKind::Spiky {
                period: rng.random_range(2..=6),
                low_factor: Some(rng.random_range(0.2..0.9)),
            },
        };
        let Ok(plan) = generate_plan(&PlanSpec { kind: plan_kind }, horizon, m, budget) else {
            continue;
        };
        let inst = Instance::new(k, budget, plan).unwrap();
        let env_kind = [EnvKind::Stationary, EnvKind::Piecewise, EnvKind::Drifting, EnvKind::DeterministicAdversarial]
            [rng.random_range(0..4)];
        let phase_count = if env_kind == EnvKind::Stationary { 1 } else { 3 };
        let phases = (0..phase_count)
            .map(|j| Phase {
                start: 1 + j * horizon / phase_count,
                means: random_means(&mut rng, k, m),
            })
            .collect();
        let env = Environment::new(
            EnvironmentSpec {
                kind: env_kind,
                num_arms: k,
                num_resources: m,
                phases,
                noise: NoiseModel::Bernoulli,
                shared_noise: rng.random_bool(0.3),
                seed: i as u64,
            },
            horizon,
        )
        .unwrap();
        let spec = AlgorithmSpec::new(setting).with_meta(meta);
        let out = run_algorithm(&spec, &inst, &env, i as u64, DELTA).unwrap();
        runs += 1;
        let mut spent = vec![0.0; m];
        for o in &out.trace.outcomes {
            for (s, c) in spent.iter_mut().zip(&o.costs) {
                *s += c;
            }
            if spent.iter().any(|&s| s > inst.budget()) {
                violations += 1;
                break;
            }
        }
    }
    verdict(
        1,
        "feasibility",
        runs >= 200 && violations == 0,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("{runs} runs, {violations} with a prefix overspend"),
    );
}

fn random_profile<R: Rng>(rng: &mut R) -> (MeanProfile, SpendingPlan, ErrorSchedule, f64) {
    let k = rng.random_range(2..=4);
    let m = rng.random_range(1..=2);
    let horizon = rng.random_range(2..=12);
    let rounds: Vec<ArmMeans> = (0..horizon).map(|_| random_means(rng, k, m)).collect();
    let fbar = rounds.iter().map(|r| r.rewards.clone()).collect();
    let cbar = rounds.iter().map(|r| r.costs.clone()).collect();
    let profile = MeanProfile::new(fbar, cbar).unwrap();
    let row: Vec<f64> = (0..horizon).map(|_| rng.random_range(0.0..1.0)).collect();
    let budget: f64 = row.iter().sum();
    let plan = SpendingPlan::new(vec![row; m]).unwrap();
    let eps = (0..m)
        .map(|_| (0..horizon).map(|_| rng.random_range(0.0..0.2)).collect())
        .collect();
    (profile, plan, ErrorSchedule::new(eps).unwrap(), budget)
}

#[test]
fn criterion_2_oracle_correctness() {
    let start = Instant::now();
    let h = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut lp_mismatch = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=3usize);
        let lp = random_bounded_lp(&mut rng, n, 6 - n);
        let sol = solve_lp(&lp).unwrap();
        let c1: f64 = lp.objective.iter().map(|c| c.abs()).sum();
        let ok = match lp_brute_check(&lp, h) {
            BruteResult::Optimal { value, .. } => {
                sol.status == LpStatus::Optimal && (sol.objective_value - value).abs() <= 2.0 * h * c1
            }
            BruteResult::Infeasible => sol.status == LpStatus::Infeasible,
        };
        if !ok {
            lp_mismatch += 1;
        }
    }
    let mut chain_breaks = 0;
    for _ in 0..200 {
        let (profile, plan, errs, budget) = random_profile(&mut rng);
        let d = opt_dynamic(&profile, &plan).unwrap().0;
        let s = opt_static(&profile, &plan).unwrap();
        let de = opt_dynamic_eps(&profile, &plan, &errs, budget).unwrap();
        let se = opt_static_eps(&profile, &plan, &errs, budget).unwrap();
        if de < d - 1e-6 || d < s - 1e-6 || se < s - 1e-6 {
            chain_breaks += 1;
        }
    }
    verdict(
        2,
        "oracle correctness",
        lp_mismatch == 0 && chain_breaks == 0,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{lp_mismatch}/500 LPs off the grid optimum, {chain_breaks}/200 dominance-chain breaks"),
    );
}

/// Payoff sequences for the full-information check; `kind` 4 reacts to the
/// learner's current mixture.
fn adversarial_payoffs<R: Rng>(rng: &mut R, kind: usize, t: usize, k: usize, probs: &[f64]) -> Vec<f64> {
    match kind {
        0 => (0..k).map(|_| rng.random_range(0.0..1.0)).collect(),
        1 => (0..k).map(|a| f64::from(u8::from((t / 50 + a) % k == 0))).collect(),
        2 => (0..k).map(|a| if a == t % k { 1.0 } else { 0.0 }).collect(),
        3 => (0..k)
            .map(|a| if a == 0 { 0.5 + 0.1 * rng.random_range(-1.0..1.0) } else { rng.random_range(0.0..1.0) })
            .collect(),
        _ => {
            let worst = (0..k).min_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap();
            (0..k).map(|a| f64::from(u8::from(a == worst))).collect()
        }
    }
}

#[test]
fn criterion_3_subroutine_no_regret() {
    let start = Instant::now();
    let horizon = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut hedge_worst = f64::NEG_INFINITY;
    let mut hedge_fail = 0;
    for seq in 0..50 {
        let k = 2 + seq % 7;
        let mut hedge = Hedge::from_config(k, &MinimizerConfig::new(PayoffRange::unit(), horizon)).unwrap();
        let mut totals = vec![0.0; k];
        let mut earned = 0.0;
        for t in 0..horizon {
            let xi = hedge.mixture();
            let g = adversarial_payoffs(&mut rng, seq % 5, t, k, xi.probs());
            earned += xi.expectation(&g);
            for (s, v) in totals.iter_mut().zip(&g) {
                *s += v;
            }
            hedge.receive(&g);
        }
        let best = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let regret = best - earned;
        let bound = (horizon as f64 / 2.0 * (k as f64).ln()).sqrt() + 1.0;
        hedge_worst = hedge_worst.max(regret / bound);
        if regret > bound {
            hedge_fail += 1;
        }
    }

    let mut ogd_worst = f64::NEG_INFINITY;
    let mut ogd_fail = 0;
    for seq in 0..20 {
        let m = 1 + seq % 2;
        let radius = [1.0, 4.0, 10.0][seq % 3];
        let rate = default_learning_rate(MinimizerKind::Ogd, m, radius, 1.0, horizon).unwrap();
        let mut ogd = OgdDual::new(m, radius, rate.eta).unwrap();
        let mut totals = vec![0.0; m];
        let mut earned = 0.0;
        for t in 0..horizon {
            let lambda = ogd.select();
            let g: Vec<f64> = match seq % 4 {
                0 => (0..m).map(|_| rng.random_range(-1.0..1.0)).collect(),
                1 => (0..m).map(|i| if (t / 100 + i) % 2 == 0 { 1.0 } else { -1.0 }).collect(),
                2 => (0..m).map(|i| if i == 0 { 0.3 } else { -0.2 }).collect(),
                _ => (0..m).map(|_| rng.random_range(-0.2..1.0)).collect(),
            };
            earned += lambda.dot(&g);
            for (s, v) in totals.iter_mut().zip(&g) {
                *s += v;
            }
            ogd.receive(&g);
        }
        let steps = 100;
        let mut best = f64::NEG_INFINITY;
        for a in 0..=steps {
            for b in 0..=(if m == 2 { steps - a } else { 0 }) {
                let point = [a as f64 * radius / steps as f64, b as f64 * radius / steps as f64];
                let value: f64 = totals.iter().zip(point).map(|(s, p)| s * p).sum();
                best = best.max(value);
            }
        }
        let bound = 1.5 * radius * (m as f64).sqrt() * (horizon as f64).sqrt();
        ogd_worst = ogd_worst.max((best - earned) / bound);
        if best - earned > bound {
            ogd_fail += 1;
        }
    }
    verdict(
        3,
        "subroutine no-regret",
        hedge_fail == 0 && ogd_fail == 0,
        start.elapsed(),
        Duration::from_secs(120),
        &format!(
            "hedge over bound {hedge_fail}/50 (worst ratio {hedge_worst:.3}), ogd over bound {ogd_fail}/20 (worst ratio {ogd_worst:.3})"
        ),
    );
}

/// Per `(rho, T)`: seeds under the bound and the median regret.
fn conformance(setting: Setting, rho: f64, horizon: usize) -> (usize, f64) {
    let inst = uniform_instance(3, horizon, rho);
    let report = oracle_report(&conformance_env(0, horizon).mean_profile().unwrap(), inst.plan(), None).unwrap();
    let spec = AlgorithmSpec::new(setting);
    let mut under = 0;
    let mut regrets = Vec::new();
    for seed in 0..SEEDS {
        let out = run_algorithm(&spec, &inst, &conformance_env(seed, horizon), seed, DELTA).unwrap();
        let (dynamic, fixed) = realized_regrets(&out.trace, &report);
        let regret = if setting == Setting::Ora { dynamic } else { fixed };
        if regret <= out.theoretical_bound(&spec, &inst, DELTA, DELTA).unwrap() {
            under += 1;
        }
        regrets.push(regret);
    }
    (under, median(regrets))
}

fn conformance_criterion(criterion: u32, name: &str, setting: Setting) {
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for rho in [0.25, 0.5] {
        let (under_t, med_t) = conformance(setting, rho, 1000);
        let (under_4t, med_4t) = conformance(setting, rho, 4000);
        let ratio = med_4t / med_t;
        pass &= under_t >= 19 && under_4t >= 19 && ratio <= 3.0;
        details.push(format!(
            "rho_min {rho}: under bound {under_t}/20 and {under_4t}/20, median regret {med_t:.2} -> {med_4t:.2} (ratio {ratio:.3})"
        ));
    }
    verdict(criterion, name, pass, start.elapsed(), Duration::from_secs(300), &details.join("; "));
}

#[test]
fn criterion_4_ora_conformance() {
    conformance_criterion(4, "ORA conformance", Setting::Ora);
}

#[test]
fn criterion_5_olrc_full_conformance() {
    conformance_criterion(5, "OLRC full-feedback conformance", Setting::OlrcFull);
}

#[test]
fn criterion_6_bandit_conformance() {
    let start = Instant::now();
    let horizon = 5000;
    let noisy = |seed| {
        Environment::new(
            EnvironmentSpec::stationary(
                ArmMeans {
                    rewards: vec![0.0, 0.3, 0.6, 0.8],
                    costs: vec![vec![0.0], vec![0.1], vec![0.3], vec![0.8]],
                },
                NoiseModel::Bernoulli,
                seed,
            ),
            horizon,
        )
        .unwrap()
    };
    let inst = uniform_instance(4, horizon, 0.25);
    let opt = opt_static(&noisy(0).mean_profile().unwrap(), inst.plan()).unwrap();
    let spec = AlgorithmSpec::new(Setting::OlrcBandit);
    let mut under = 0;
    for seed in 0..SEEDS {
        let out = run_algorithm(&spec, &inst, &noisy(seed), seed, DELTA).unwrap();
        if opt - out.trace.total_reward <= out.theoretical_bound(&spec, &inst, DELTA, DELTA).unwrap() {
            under += 1;
        }
    }

    let separated = |seed| {
        Environment::new(
            EnvironmentSpec::stationary(
                ArmMeans {
                    rewards: vec![0.0, 0.2, 0.9, 0.2],
                    costs: vec![vec![0.0], vec![0.1], vec![0.1], vec![0.1]],
                },
                NoiseModel::Bernoulli,
                seed,
            ),
            horizon,
        )
        .unwrap()
    };
    let slack = uniform_instance(4, horizon, 0.5);
    let finals: Vec<f64> = (0..SEEDS)
        .map(|seed| {
            let out = run_algorithm(&spec, &slack, &separated(seed), seed, DELTA).unwrap();
            out.trace.outcomes.last().unwrap().mixture.prob(2)
        })
        .collect();
    let concentration = median(finals);
    verdict(
        6,
        "bandit conformance",
        under >= 18 && concentration >= 0.9,
        start.elapsed(),
        Duration::from_secs(300),
        &format!("under bound {under}/20, median final best-arm probability {concentration:.3}"),
    );
}

/// Rounds where the plan spikes are the only ones worth spending in.
fn spike_aligned_env(seed: u64, horizon: usize, period: usize) -> Environment {
    let spike = ArmMeans {
        rewards: vec![0.0, 0.05, 0.9],
        costs: vec![vec![0.0], vec![0.5], vec![0.9]],
    };
    let quiet = ArmMeans {
        rewards: vec![0.0, 0.05, 0.1],
        costs: vec![vec![0.0], vec![0.5], vec![0.9]],
    };
    let mut phases = Vec::new();
    for j in 0..horizon.div_ceil(period) {
        phases.push(Phase {
            start: period * j + 1,
            means: spike.clone(),
        });
        if period * j + 2 <= horizon {
            phases.push(Phase {
                start: period * j + 2,
                means: quiet.clone(),
            });
        }
    }
    Environment::new(
        EnvironmentSpec {
            kind: EnvKind::Piecewise,
            num_arms: 3,
            num_resources: 1,
            phases,
            noise: NoiseModel::CommonScale { spread: 0.1 },
            shared_noise: false,
            seed,
        },
        horizon,
    )
    .unwrap()
}

#[test]
fn criterion_7_meta_procedure() {
    let start = Instant::now();
    let (rho, period) = (0.25, 4);
    let mut meta_per_t = Vec::new();
    let mut pass = true;
    let mut details = Vec::new();
    for horizon in [4096usize, 16384] {
        let spec = PlanSpec {
            kind: PlanKind::Spiky { period, low_factor: None },
        };
        let budget = rho * horizon as f64;
        let inst = Instance::new(3, budget, generate_plan(&spec, horizon, 1, budget).unwrap()).unwrap();
        let threshold = rho / (2.0 * (horizon as f64).powf(0.25));
        pass &= inst.rho_min() <= threshold + 1e-15;
        let report = oracle_report(&spike_aligned_env(0, horizon, period).mean_profile().unwrap(), inst.plan(), None).unwrap();
        let mut medians = [0.0; 2];
        let mut meta_under = 0;
        for (slot, meta) in [true, false].into_iter().enumerate() {
            let spec = AlgorithmSpec::new(Setting::Ora).with_meta(meta);
            let mut regrets = Vec::new();
            for seed in 0..SEEDS {
                let env = spike_aligned_env(seed, horizon, period);
                let out = run_algorithm(&spec, &inst, &env, seed, DELTA).unwrap();
                let (dynamic, _) = realized_regrets(&out.trace, &report);
                if meta && dynamic <= out.theoretical_bound(&spec, &inst, DELTA, DELTA).unwrap() {
                    meta_under += 1;
                }
                regrets.push(dynamic);
            }
            medians[slot] = median(regrets);
        }
        let [meta_med, plain_med] = medians;
        pass &= meta_under >= 18 && plain_med >= 1.5 * meta_med && meta_med > 0.0;
        meta_per_t.push(meta_med / horizon as f64);
        details.push(format!(
            "T {horizon}: meta median {meta_med:.1} ({:.5} per round, {meta_under}/20 under bound), plain median {plain_med:.1} ({:.2}x)",
            meta_med / horizon as f64,
            plain_med / meta_med
        ));
    }
    pass &= meta_per_t[1] < meta_per_t[0];
    verdict(7, "meta procedure", pass, start.elapsed(), Duration::from_secs(600), &details.join("; "));
}

#[test]
fn criterion_8_error_robustness() {
    let start = Instant::now();
    // Plan entries straddle the kink of the per-round value at spend 0.1, so
    // letting rounds borrow from each other is worth something.
    let (horizon, rho) = (1000, 0.1);
    let budget = rho * horizon as f64;
    let plan = generate_plan(
        &PlanSpec {
            kind: PlanKind::Frontloaded { imbalance: 4.0 },
        },
        horizon,
        1,
        budget,
    )
    .unwrap();
    let inst = Instance::new(3, budget, plan).unwrap();
    let profile = conformance_env(0, horizon).mean_profile().unwrap();
    let base = opt_dynamic(&profile, inst.plan()).unwrap().0;
    let spec = AlgorithmSpec::new(Setting::Ora);
    let mut pass = true;
    let mut details = Vec::new();
    for eps in [0.0, 0.01, 0.05] {
        let errs = ErrorSchedule::uniform(1, horizon, eps).unwrap();
        let relaxed = opt_dynamic_eps(&profile, inst.plan(), &errs, inst.budget()).unwrap();
        let mut ok = 0;
        let mut worst_gap = f64::NEG_INFINITY;
        let (mut gap_seen, mut penalty_seen) = (0.0, 0.0);
        for seed in 0..SEEDS {
            let out = run_algorithm(&spec, &inst, &conformance_env(seed, horizon), seed, DELTA).unwrap();
            let params = BoundParams {
                horizon,
                rho: inst.rho(),
                rho_min: out.learner.rho_min_used,
                r_dual: out.r_dual,
                r_primal: 0.0,
                delta: DELTA,
                delta_p: DELTA,
            };
            let slack = regret_bound(Setting::Ora, false, &params).unwrap();
            let penalty = error_penalty(false, &params, errs.total()).unwrap();
            let gap = (relaxed - out.trace.total_reward) - (base - out.trace.total_reward);
            worst_gap = worst_gap.max(gap - penalty);
            (gap_seen, penalty_seen) = (gap, penalty);
            if gap <= penalty + slack {
                ok += 1;
            }
        }
        pass &= ok == SEEDS;
        details.push(format!(
            "eps {eps}: {ok}/20 within penalty plus slack, regret gap {gap_seen:.3} vs penalty {penalty_seen:.1}, largest excess over the penalty {worst_gap:.3}"
        ));
    }
    verdict(8, "error robustness", pass, start.elapsed(), Duration::from_secs(300), &details.join("; "));
}

const DETERMINISM_CONFIG: &str = r#"
[instance]
horizon = 400
num_arms = 3
num_resources = 2
rho = 0.3

[plan]
kind = "frontloaded"
imbalance = 1.5

[environment]
kind = "piecewise"
noise = "bernoulli"
seed = 5
[[environment.phases]]
at = 0.0
rewards = [0.0, 0.4, 0.8]
costs = [[0.0, 0.0], [0.1, 0.3], [0.7, 0.2]]
[[environment.phases]]
at = 0.5
rewards = [0.0, 0.7, 0.2]
costs = [[0.0, 0.0], [0.5, 0.1], [0.2, 0.6]]

[algorithm]
setting = "olrc_bandit"

[runs]
count = 4
horizons = [200, 400]

[output]
traces = true
"#;

fn run_binary(config: &Path, out: &Path) {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_planpace"))
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}

#[test]
fn criterion_9_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_binary(&config, &a);
    run_binary(&config, &b);
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| std::fs::read(a.join(n)).unwrap() != std::fs::read(b.join(n)).unwrap())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    let rows = std::fs::read_to_string(a.join("summary.csv")).unwrap().lines().count() - 1;
    verdict(
        9,
        "determinism",
        differing.is_empty() && rows == 8,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{} files compared, {rows} summary rows, differing: {differing:?}", names.len()),
    );
}
