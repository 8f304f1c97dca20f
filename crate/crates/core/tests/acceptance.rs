//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;

use cacm::bench::report::solve_record;
use cacm::bench::{brute_force_optimum, gap, parse_instance, run_batch};
use cacm::codec::{global_cost, verify_plan};
use cacm::colony::{graph_stats, init_pheromones};
use cacm::negotiation::collaborative_local_search;
use cacm::solver::{default_params, SizeClass};
use cacm::{
    decode, run, AgentPanel, Encoding, Instance, Money, PheromoneParams, RunResult, SolverParams, Variant, VotingRule,
};
use common::{desk_suite, naive_decode, random_encoding, random_instance, SMALL, TINY1, WITH_LEADS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEEDS: [u64; 3] = [0, 1, 2];
const RANDOM_CASES: u64 = 10_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn class_s(variant: Variant, rule: VotingRule, seed: u64) -> SolverParams {
    SolverParams { variant, rule, seed, ..default_params(SizeClass::S) }
}

struct Cell {
    instance: usize,
    variant: Variant,
    rule: VotingRule,
    result: RunResult,
}

fn solve_grid(suite: &[Instance], variants: &[Variant], rules: &[VotingRule], seeds: &[u64]) -> Vec<Cell> {
    let mut jobs = Vec::new();
    for k in 0..suite.len() {
        for &variant in variants {
            for &rule in rules {
                for &seed in seeds {
                    jobs.push((k, variant, rule, seed));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(k, variant, rule, seed)| {
            let inst = &suite[k];
            let panel = AgentPanel::from_instance(inst);
            let result = run(inst, &panel, &class_s(variant, rule, seed)).expect("suite run");
            Cell { instance: k, variant, rule, result }
        })
        .collect()
}

fn mean_cost<'a>(cells: impl Iterator<Item = &'a Cell>) -> f64 {
    let costs: Vec<f64> = cells.map(|c| c.result.global_cost.as_f64()).collect();
    costs.iter().sum::<f64>() / costs.len() as f64
}

fn oracle_optimality(suite: &[Instance], optima: &[Money], cells: &[Cell]) -> Verdict {
    let mut hits = 0;
    let mut gaps = Vec::new();
    for c in cells {
        let best = optima[c.instance];
        if c.result.global_cost == best {
            hits += 1;
        }
        gaps.push(if best > Money::ZERO { gap(c.result.global_cost, best).unwrap() } else { 0.0 });
    }
    let share = hits as f64 / cells.len() as f64;
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    verdict(
        share >= 0.8 && mean_gap <= 1.0,
        format!(
            "{hits}/{} cells optimal ({:.1}%), mean gap {mean_gap:.4}% over {} instances",
            cells.len(),
            share * 100.0,
            suite.len()
        ),
    )
}

fn ablation_order(cells: &[Cell]) -> Verdict {
    let mean = |v: Variant| mean_cost(cells.iter().filter(|c| c.variant == v && c.rule == VotingRule::Approval));
    let (cacm, ex, cls) = (mean(Variant::Cacm), mean(Variant::CacmEx), mean(Variant::ClsOnly));
    verdict(cacm <= ex && cacm <= cls, format!("mean cost cacm {cacm:.3}, cacm-ex {ex:.3}, cls {cls:.3}"))
}

fn rule_degeneration(suite: &[Instance], cells: &[Cell]) -> Verdict {
    let mut mismatches = 0;
    for k in 0..suite.len() {
        let runs: Vec<&Cell> = cells.iter().filter(|c| c.instance == k && c.variant == Variant::Cacm).collect();
        let reference = runs.iter().find(|c| c.rule == VotingRule::Approval).expect("approval run");
        for c in &runs {
            if c.result.outcomes != reference.result.outcomes || c.result.incumbent != reference.result.incumbent {
                mismatches += 1;
            }
        }
    }
    let events: usize = cells.iter().map(|c| c.result.outcomes.len()).sum();
    verdict(mismatches == 0, format!("{mismatches} mismatching runs, {events} vote events compared"))
}

fn unanimous_improvement(cells: &[&Cell]) -> Verdict {
    let mut violations = 0;
    let mut points = 0;
    for c in cells {
        points += c.result.trajectory.len();
        for w in c.result.trajectory.windows(2) {
            if w[1].agent_costs.iter().zip(&w[0].agent_costs).any(|(a, b)| a > b) {
                violations += 1;
            }
        }
    }
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seed = 0u64;
    while cases < RANDOM_CASES {
        seed += 1;
        let inst = random_instance(seed, if seed.is_multiple_of(2) { SMALL } else { WITH_LEADS });
        let panel = AgentPanel::from_instance(&inst);
        let input = random_encoding(&mut rng, inst.m(), inst.n());
        let Ok(before) = decode(&inst, &input) else { continue };
        cases += 1;
        let out = collaborative_local_search(&input, &panel, &inst);
        match &out.plan {
            Some(after) if panel.agents().iter().all(|a| a.evaluate(after) <= a.evaluate(&before)) => {}
            _ => violations += 1,
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} violations over {} runs ({points} trajectory points) and {cases} local-search cases",
            cells.len()
        ),
    )
}

fn decoder_correctness() -> Verdict {
    let tiny = parse_instance(TINY1).unwrap();
    let mut failures = 0;
    let mut costs = Vec::new();
    for mask in 0u8..16 {
        let bit = |k: u8| (mask >> k) & 1;
        let enc = Encoding::from_rows(&[[1, bit(3), bit(2)], [1, bit(1), bit(0)]]);
        let plan = decode(&tiny, &enc).unwrap();
        if verify_plan(&tiny, &plan).is_err() {
            failures += 1;
        }
        costs.push(global_cost(&tiny, &plan));
    }
    let min = costs.iter().min().copied().unwrap();
    let all_ones = costs[15];

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for seed in 0..RANDOM_CASES {
        let inst = random_instance(1_000_000 + seed, if seed.is_multiple_of(2) { SMALL } else { WITH_LEADS });
        let enc = random_encoding(&mut rng, inst.m(), inst.n());
        match (decode(&inst, &enc), naive_decode(&inst, &enc)) {
            (Ok(plan), Some(naive)) => {
                checked += 1;
                let lots_match = (0..inst.m()).all(|i| plan.lots_row(i) == &naive.lots[i][..]);
                if verify_plan(&inst, &plan).is_err() || global_cost(&inst, &plan) != naive.cost || !lots_match {
                    failures += 1;
                }
            }
            (Err(_), None) => checked += 1,
            _ => failures += 1,
        }
    }
    verdict(
        failures == 0 && min == Money::from_units(36) && all_ones == Money::from_units(60),
        format!("TINY-1 min {min}, all-ones {all_ones}; {failures} failures over 16 + {checked} encodings"),
    )
}

fn structure_and_bounds() -> Verdict {
    let graph_ok = (1..=10u64).all(|m| {
        (1..=10u64).all(|n| {
            let g = graph_stats(m as usize, n as usize);
            g.node_count == 2 * m * n + 1 && g.edge_count == 4 * m * n - 2
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out_of_bounds = 0;
    for _ in 0..RANDOM_CASES {
        let (m, n) = (rng.gen_range(1..4), rng.gen_range(1..5));
        let tau_min = rng.gen_range(1.0..3.0);
        let params = PheromoneParams {
            tau_min,
            tau_max: tau_min + rng.gen_range(0.5..1_500.0),
            rho: rng.gen_range(0.0..=1.0),
            sigma: rng.gen_range(0.0..=1.0),
        };
        let mut field = init_pheromones(m, n, params).unwrap();
        for _ in 0..rng.gen_range(1..30) {
            field.update(&random_encoding(&mut rng, m, n)).unwrap();
            if !field.within_bounds() {
                out_of_bounds += 1;
            }
        }
    }
    let params = default_params(SizeClass::S).pheromone;
    let field = init_pheromones(1, 1, params).unwrap();
    let draws = 10_000;
    let ones = (0..draws).filter(|_| field.construct(&mut rng).get(0, 0)).count();
    let freq = ones as f64 / draws as f64;
    let expected = (params.tau_max - 1.0) / params.tau_max;
    verdict(
        graph_ok && out_of_bounds == 0 && (freq - expected).abs() <= 0.01,
        format!(
            "graph formula {}, {out_of_bounds} bound violations, construction frequency {freq:.4} vs {expected:.4}",
            if graph_ok { "ok" } else { "wrong" }
        ),
    )
}

fn determinism(suite: &[Instance]) -> Verdict {
    let mut differing = 0;
    let sample: Vec<Instance> = suite.iter().step_by(5).cloned().collect();
    let mut configs = Vec::new();
    for variant in Variant::ALL {
        let mut p = class_s(variant, VotingRule::Borda, 0);
        p.ballot_size = 2;
        p.budget = 5_000;
        configs.push(p);
    }
    for inst in &sample {
        for p in &configs {
            let a = solve_record(inst, &SolverParams { seed: 9, ..*p }, None, true).unwrap().0;
            let b = solve_record(inst, &SolverParams { seed: 9, ..*p }, None, true).unwrap().0;
            if a.deterministic_json() != b.deterministic_json() {
                differing += 1;
            }
        }
    }
    let serial = run_batch(&sample, &configs, &SEEDS, None, 1, true).unwrap();
    let parallel = run_batch(&sample, &configs, &SEEDS, None, 4, true).unwrap();
    let texts = |r: &cacm::bench::BatchReport| r.records.iter().map(|x| x.deterministic_json()).collect::<Vec<_>>();
    let batch_equal = texts(&serial) == texts(&parallel);
    verdict(
        differing == 0 && batch_equal,
        format!(
            "{differing} differing repeated runs, 1-worker vs 4-worker batch of {} records {}",
            serial.records.len(),
            if batch_equal { "identical" } else { "differ" }
        ),
    )
}

fn main() -> ExitCode {
    let single = desk_suite(1);
    let shared = desk_suite(2);
    let optima: Vec<Money> = single.iter().map(|i| brute_force_optimum(i).unwrap().0).collect();

    let single_cells = solve_grid(&single, &[Variant::Cacm], &[VotingRule::Approval], &SEEDS);
    let shared_cells = solve_grid(&shared, &Variant::ALL, &[VotingRule::Approval], &SEEDS);
    let rule_cells = solve_grid(&shared, &[Variant::Cacm], &VotingRule::ALL, &[SEEDS[0]]);
    let all_runs: Vec<&Cell> = single_cells.iter().chain(&shared_cells).chain(&rule_cells).collect();

    let criteria = [
        ("oracle optimality at desk scale", oracle_optimality(&single, &optima, &single_cells)),
        ("ablation ordering", ablation_order(&shared_cells)),
        ("voting-rule degeneration at b = 1", rule_degeneration(&shared, &rule_cells)),
        ("unanimous-improvement invariant", unanimous_improvement(&all_runs)),
        ("decoder correctness", decoder_correctness()),
        ("structure and pheromone bounds", structure_and_bounds()),
        ("determinism", determinism(&shared)),
    ];
    let mut failed = 0;
    for (k, (name, v)) in criteria.iter().enumerate() {
        println!("[{}] {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
