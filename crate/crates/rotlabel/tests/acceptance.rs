//! Acceptance suite: nine standalone criteria, one test each. Every test
//! prints a single `acceptance N (name): PASS|FAIL` line (visible with
//! `--nocapture`; failures also fail the test run the usual way).

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rotlabel::bruteforce::{
    boundary_angles, circular_distance, exhaustive_best_activity, probe_hard_cover,
    probe_soft_overlap,
};
use rotlabel::core::angular::{AngularSet, TAU};
use rotlabel::core::exact::{build_model, SearchBudget, Unbounded};
use rotlabel::core::geometry::{hard_conflict_set, soft_conflict_set, ConflictStructure};
use rotlabel::core::greedy::{greedy_solve, GreedyEngine, GreedyOptions, GreedyStrategy};
use rotlabel::core::model::{
    check_validity, AnchorCorner, AnchoredLabel, ConflictMode, Instance, ModelConfig, Point,
    RangeModel, RotationLabeling,
};
use rotlabel::core::qapx::{qapx_greedy_solve, qapx_solve};
use rotlabel::core::CoreError;
use rotlabel::gen::{generate_random, GenSpec};
use rotlabel::harness::{range_model_code, run_solver, SolverKind};
use rotlabel::io;

fn criterion(n: usize, name: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("acceptance {n} ({name}): PASS"),
        Err(cause) => {
            println!("acceptance {n} ({name}): FAIL");
            resume_unwind(cause);
        }
    }
}

fn soft_cfg(ranges: RangeModel) -> ModelConfig {
    ModelConfig::new(ranges, ConflictMode::Soft)
}

/// Exact optimum, asserting the search ran to completion.
fn exact_objective(inst: &Instance, cs: &ConflictStructure, cfg: ModelConfig) -> f64 {
    let sol = build_model(inst, cs, cfg, false)
        .unwrap()
        .solve(&mut Unbounded)
        .unwrap();
    assert!(sol.fully_optimal());
    sol.objective
}

// ---------------------------------------------------------------- criterion 1

/// Compares one closed-form conflict set against probing its predicate:
/// membership must agree at every probe not sitting on a boundary, and every
/// probe-detected boundary must lie within 1e-6 rad of a closed-form endpoint.
fn check_set_against_probes(set: &AngularSet, pred: impl Fn(f64) -> bool) -> bool {
    const PROBES: usize = 10_000;
    let endpoints: Vec<f64> = set
        .intervals()
        .iter()
        .filter(|iv| !iv.is_full())
        .flat_map(|iv| [iv.start().rad(), iv.end().rad()])
        .collect();
    let near_endpoint = |x: f64| endpoints.iter().any(|&e| circular_distance(x, e) < 1e-6);
    for k in 0..PROBES {
        let alpha = k as f64 * TAU / PROBES as f64;
        if near_endpoint(alpha) {
            continue;
        }
        assert_eq!(pred(alpha), set.contains(alpha), "probe at {alpha}");
    }
    for b in boundary_angles(&pred, PROBES, 1e-9) {
        assert!(
            near_endpoint(b),
            "sampled boundary {b} is not near any closed-form endpoint"
        );
    }
    !set.is_empty()
}

#[test]
fn c1_geometry_matches_sampling_oracle() {
    criterion(1, "geometry vs sampling oracle", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0x01);
        let mut nonempty_soft = 0;
        let mut done = 0;
        while done < 200 {
            let base = Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let (dx, dy): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if (dx * dx + dy * dy).sqrt() < 0.05 {
                continue;
            }
            let mut mk = |id: u64, p: Point| {
                let w = rng.gen_range(0.3..1.5);
                let h = rng.gen_range(0.3..1.5);
                let corner = AnchorCorner::ALL[rng.gen_range(0..4)];
                AnchoredLabel::new(id, p, w, h, corner)
            };
            let a = mk(0, base);
            let b = mk(1, Point::new(base.x + dx, base.y + dy));
            let soft = soft_conflict_set(&a, &b).unwrap();
            if check_set_against_probes(&soft, |x| probe_soft_overlap(&a, &b, x)) {
                nonempty_soft += 1;
            }
            let hard_ab = hard_conflict_set(&a, &b).unwrap();
            check_set_against_probes(&hard_ab, |x| probe_hard_cover(&a, &b, x));
            let hard_ba = hard_conflict_set(&b, &a).unwrap();
            check_set_against_probes(&hard_ba, |x| probe_hard_cover(&b, &a, x));
            done += 1;
        }
        assert!(
            nonempty_soft >= 50,
            "only {nonempty_soft} of 200 pairs actually conflict; the family is too sparse"
        );
        let elapsed = start.elapsed();
        println!("  200 pairs checked in {elapsed:.2?} ({nonempty_soft} with soft conflicts)");
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:.2?}");
    });
}

// ---------------------------------------------------------------- criterion 2

/// Rejection-samples seeded instances with n <= 4 labels, at least one
/// conflicting pair, and at most 12 interior events, so exhaustive search
/// over regular labelings stays cheap.
fn oracle_instances(count: usize, seed: u64) -> Vec<(Instance, ConflictStructure)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 1_000_000, "rejection sampling stalled");
        let n = rng.gen_range(2..=4usize);
        let labels: Vec<AnchoredLabel> = (0..n)
            .map(|i| {
                let p = Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
                let w = rng.gen_range(0.4..1.2);
                let h = rng.gen_range(0.4..1.2);
                AnchoredLabel::new(i as u64, p, w, h, AnchorCorner::ALL[rng.gen_range(0..4)])
            })
            .collect();
        let Ok(inst) = Instance::new(labels) else {
            continue;
        };
        let cs = ConflictStructure::build(&inst).unwrap();
        let stats = cs.stats();
        if stats.pairs == 0 || stats.interior_events > 12 {
            continue;
        }
        out.push((inst, cs));
    }
    out
}

#[test]
fn c2_exact_solver_matches_exhaustive_enumeration() {
    criterion(2, "exact solver vs exhaustive enumeration", || {
        let start = Instant::now();
        let instances = oracle_instances(50, 0x02);
        let budgets = [
            RangeModel::Limited(1),
            RangeModel::Limited(2),
            RangeModel::Unlimited,
        ];
        for (idx, (inst, cs)) in instances.iter().enumerate() {
            for ranges in budgets {
                for mode in [ConflictMode::Soft, ConflictMode::Hard] {
                    let cfg = ModelConfig::new(ranges, mode);
                    let solved = exact_objective(inst, cs, cfg);
                    let brute = exhaustive_best_activity(cs, cfg);
                    assert!(
                        (solved - brute).abs() < 1e-9,
                        "instance {idx}, {:?}/{mode:?}: solver {solved} vs exhaustive {brute}",
                        ranges
                    );
                }
            }
        }
        let elapsed = start.elapsed();
        println!("  50 instances x 6 configurations agreed in {elapsed:.2?}");
        assert!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}");
    });
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn c3_objectives_are_monotone_across_models() {
    criterion(3, "model monotonicity", || {
        let budgets = [
            RangeModel::ZeroOne,
            RangeModel::Limited(1),
            RangeModel::Limited(2),
            RangeModel::Limited(3),
            RangeModel::Unlimited,
        ];
        let mut uplift_sums = vec![0.0; budgets.len()];
        let mut uplift_counts = vec![0usize; budgets.len()];
        for (idx, (inst, cs)) in oracle_instances(50, 0x02).iter().enumerate() {
            let solve_chain = |mode: ConflictMode| -> Vec<f64> {
                budgets
                    .iter()
                    .map(|&r| exact_objective(inst, cs, ModelConfig::new(r, mode)))
                    .collect()
            };
            let soft = solve_chain(ConflictMode::Soft);
            let hard = solve_chain(ConflictMode::Hard);
            for chain in [&soft, &hard] {
                for w in chain.windows(2) {
                    assert!(w[0] <= w[1] + 1e-9, "instance {idx}: chain {chain:?}");
                }
            }
            for (b, (&s, &h)) in soft.iter().zip(&hard).enumerate() {
                assert!(
                    h <= s + 1e-9,
                    "instance {idx}, {:?}: hard {h} > soft {s}",
                    budgets[b]
                );
                if h > 1e-12 {
                    uplift_sums[b] += s / h;
                    uplift_counts[b] += 1;
                }
            }
        }
        for (b, &ranges) in budgets.iter().enumerate() {
            if uplift_counts[b] > 0 {
                println!(
                    "  {}: mean soft-over-hard activity ratio {:.4} ({} instances)",
                    range_model_code(ranges),
                    uplift_sums[b] / uplift_counts[b] as f64,
                    uplift_counts[b]
                );
            }
        }
    });
}

// ---------------------------------------------------------------- criterion 4

/// Deterministic alternative to a wall-clock limit: reproducible across
/// machines, so the seeded instance family below is stable.
struct NodeBudget {
    cap: u64,
}

impl SearchBudget for NodeBudget {
    fn component_started(&mut self) {}
    fn should_stop(&mut self, nodes: u64) -> bool {
        nodes > self.cap
    }
}

#[test]
fn c4_approximation_guarantees_hold() {
    criterion(4, "greedy 1/8 and shifted-grid 1/4 guarantees", || {
        let cfg = soft_cfg(RangeModel::Limited(1));
        let mut accepted = 0;
        let mut skipped = 0;
        let mut seed = 4000u64;
        while accepted < 100 {
            let inst = generate_random(&GenSpec::unit_squares(10, 6.0, seed)).unwrap();
            seed += 1;
            let cs = ConflictStructure::build(&inst).unwrap();
            // Exact is the oracle, so instances it cannot finish within a
            // deterministic node cap are skipped (counted, bounded below).
            let sol = build_model(&inst, &cs, cfg, false)
                .unwrap()
                .solve(&mut NodeBudget { cap: 400_000 })
                .unwrap();
            if !sol.fully_optimal() {
                skipped += 1;
                assert!(skipped < 100, "oracle node cap rejects too many instances");
                continue;
            }
            accepted += 1;
            let trial = seed - 1;
            let opt = sol.objective;
            let greedy = greedy_solve(&inst, &cs, cfg, GreedyOptions::default())
                .unwrap()
                .total_activity();
            let quarter = qapx_solve(&inst, &cs, cfg, false, &mut Unbounded)
                .unwrap()
                .labeling
                .total_activity();
            assert!(greedy <= opt + 1e-9, "seed {trial}: greedy beat the optimum");
            assert!(quarter <= opt + 1e-9, "seed {trial}: qapx beat the optimum");
            assert!(
                greedy + 1e-9 >= opt / 8.0,
                "seed {trial}: greedy {greedy} < OPT/8 = {}",
                opt / 8.0
            );
            assert!(
                quarter + 1e-9 >= opt / 4.0,
                "seed {trial}: qapx {quarter} < OPT/4 = {}",
                opt / 4.0
            );
        }
        println!("  100 instances held both bounds ({skipped} skipped at the oracle's node cap)");
    });
}

// ---------------------------------------------------------------- criterion 5

fn unit(id: u64, x: f64, y: f64) -> AnchoredLabel {
    AnchoredLabel::new(id, Point::new(x, y), 1.0, 1.0, AnchorCorner::BottomLeft)
}

fn gen_spec(n: usize, region: f64, seed: u64) -> GenSpec {
    GenSpec {
        n,
        region,
        width: (0.5, 1.5),
        height: (0.3, 0.8),
        seed,
    }
}

#[test]
fn c5_every_solver_output_is_valid() {
    criterion(5, "validity across the configuration matrix", || {
        let instances = vec![
            Instance::new(vec![unit(0, 0.0, 0.0), unit(1, 1.2, 0.0)]).unwrap(),
            Instance::new(vec![unit(0, 0.0, 0.0), unit(1, 1.2, 0.0), unit(2, 2.4, 0.0)]).unwrap(),
            generate_random(&gen_spec(12, 8.0, 3)).unwrap(),
            generate_random(&gen_spec(25, 10.0, 9)).unwrap(),
            generate_random(&gen_spec(40, 12.0, 5)).unwrap(),
        ];
        let budgets = [
            RangeModel::ZeroOne,
            RangeModel::Limited(1),
            RangeModel::Limited(2),
            RangeModel::Limited(3),
            RangeModel::Unlimited,
        ];
        let greedy_family = |kind: SolverKind| {
            matches!(
                kind,
                SolverKind::GreedyMax
                    | SolverKind::GreedyLowCost
                    | SolverKind::GreedyBestRatio
                    | SolverKind::QapxGreedyMax
                    | SolverKind::QapxGreedyLowCost
                    | SolverKind::QapxGreedyBestRatio
            )
        };
        let mut ok_cells = 0;
        let mut skipped = 0;
        for (ii, inst) in instances.iter().enumerate() {
            let cs = ConflictStructure::build(inst).unwrap();
            for ranges in budgets {
                for mode in [ConflictMode::Soft, ConflictMode::Hard] {
                    let cfg = ModelConfig::new(ranges, mode);
                    for kind in SolverKind::ALL {
                        match run_solver(inst, &cs, cfg, kind, false, Some(Duration::from_secs(2)))
                        {
                            Ok(run) => {
                                let report = check_validity(&run.labeling, &cs, cfg);
                                assert!(
                                    report.is_valid(),
                                    "instance {ii}, {ranges:?}/{mode:?}/{}: {report:?}",
                                    kind.code()
                                );
                                ok_cells += 1;
                            }
                            Err(CoreError::UnsupportedRangeModel(_)) => {
                                assert!(
                                    ranges == RangeModel::ZeroOne && greedy_family(kind),
                                    "unexpected unsupported cell {ranges:?}/{}",
                                    kind.code()
                                );
                                skipped += 1;
                            }
                            Err(e) => {
                                panic!("instance {ii}, {ranges:?}/{mode:?}/{}: {e}", kind.code())
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(skipped, instances.len() * 2 * 6); // 0/1 model x 6 greedy-family solvers
        assert_eq!(ok_cells, instances.len() * 5 * 2 * 8 - skipped);
        println!("  {ok_cells} solver outputs all valid ({skipped} unsupported cells skipped)");
    });
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn c6_greedy_engines_are_equivalent() {
    criterion(6, "recompute and interval-heap engines agree", || {
        for trial in 0..100u64 {
            let n = 5 + (trial as usize % 26);
            let spec = gen_spec(n, (n as f64 * 2.2).sqrt() + 1.0, 6000 + trial);
            let inst = generate_random(&spec).unwrap();
            let cs = ConflictStructure::build(&inst).unwrap();
            for ranges in [
                RangeModel::Limited(1),
                RangeModel::Limited(2),
                RangeModel::Unlimited,
            ] {
                for mode in [ConflictMode::Soft, ConflictMode::Hard] {
                    let cfg = ModelConfig::new(ranges, mode);
                    let recompute = greedy_solve(
                        &inst,
                        &cs,
                        cfg,
                        GreedyOptions {
                            strategy: GreedyStrategy::Max,
                            engine: GreedyEngine::Recompute,
                        },
                    )
                    .unwrap();
                    let heaps = greedy_solve(
                        &inst,
                        &cs,
                        cfg,
                        GreedyOptions {
                            strategy: GreedyStrategy::Max,
                            engine: GreedyEngine::IntervalHeaps,
                        },
                    )
                    .unwrap();
                    assert_eq!(recompute, heaps, "trial {trial}, {ranges:?}/{mode:?}");
                }
            }
        }
    });
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn c7_greedy_quality_is_reported() {
    criterion(7, "greedy quality vs exact optimum", || {
        let cfg = soft_cfg(RangeModel::Limited(1));
        let strategies = [
            (GreedyStrategy::Max, "gm"),
            (GreedyStrategy::LowCost, "glc"),
            (GreedyStrategy::BestRatio, "gbr"),
        ];
        let mut sums = [0.0f64; 3];
        let mut count = 0usize;
        for trial in 0..40u64 {
            let n = 4 + (trial as usize % 5);
            let spec = GenSpec::unit_squares(n, (n as f64 * 10.0).sqrt(), 7000 + trial);
            let inst = generate_random(&spec).unwrap();
            let cs = ConflictStructure::build(&inst).unwrap();
            let opt = exact_objective(&inst, &cs, cfg);
            assert!(opt > 0.0);
            for (s, (strategy, _)) in strategies.iter().enumerate() {
                let phi = greedy_solve(&inst, &cs, cfg, GreedyOptions::strategy(*strategy))
                    .unwrap();
                let ratio = phi.total_activity() / opt;
                assert!(ratio <= 1.0 + 1e-9);
                sums[s] += ratio;
            }
            count += 1;
        }
        for (s, (_, code)) in strategies.iter().enumerate() {
            let mean = sums[s] / count as f64;
            println!("  mean t(greedy)/OPT for {code} at 1R-soft: {mean:.4} over {count} instances");
            if mean < 0.85 {
                println!("  WARNING: {code} mean ratio {mean:.4} is below the 0.85 expectation");
            }
        }
    });
}

// ---------------------------------------------------------------- criterion 8

/// Generates (seeded) until at least `target` labels survive static
/// placement, then truncates to exactly `target`.
fn big_instance(target: usize, region: f64, seed: u64) -> Instance {
    let mut requested = target + target / 4;
    loop {
        assert!(requested <= 20 * target, "cannot reach {target} labels");
        let inst = generate_random(&GenSpec::unit_squares(requested, region, seed)).unwrap();
        if inst.len() >= target {
            return Instance::new(inst.labels()[..target].to_vec()).unwrap();
        }
        requested += target / 4;
    }
}

fn timed_greedy(inst: &Instance, cs: &ConflictStructure, engine: GreedyEngine) -> (Duration, f64) {
    let cfg = soft_cfg(RangeModel::Limited(1));
    let opts = GreedyOptions {
        strategy: GreedyStrategy::Max,
        engine,
    };
    let start = Instant::now();
    let phi = greedy_solve(inst, cs, cfg, opts).unwrap();
    (start.elapsed(), phi.total_activity())
}

#[test]
fn c8_performance_and_scaling() {
    criterion(8, "performance and n log n scaling", || {
        // Density ~0.3 labels per unit area keeps the conflict degree bounded
        // while leaving plenty of pairwise conflicts.
        let region = |n: usize| (n as f64 / 0.3).sqrt();
        let inst = big_instance(2500, region(2500), 8);
        let cs = ConflictStructure::build(&inst).unwrap();
        let (t_rec, a_rec) = timed_greedy(&inst, &cs, GreedyEngine::Recompute);
        let (t_heap, a_heap) = timed_greedy(&inst, &cs, GreedyEngine::IntervalHeaps);
        assert!((a_rec - a_heap).abs() < 1e-6);
        println!("  n=2500: recompute {t_rec:.2?}, interval-heaps {t_heap:.2?}");
        assert!(
            t_rec.min(t_heap) < Duration::from_secs(2),
            "fastest engine took {:?}",
            t_rec.min(t_heap)
        );

        let mut constants = Vec::new();
        for n in [500usize, 1000, 2000, 4000] {
            let inst = big_instance(n, region(n), 9000 + n as u64);
            let cs = ConflictStructure::build(&inst).unwrap();
            let best = (0..3)
                .map(|_| timed_greedy(&inst, &cs, GreedyEngine::IntervalHeaps).0)
                .min()
                .unwrap();
            let c = best.as_secs_f64() / (n as f64 * (n as f64).ln());
            println!("  n={n}: {best:.2?} (c = {c:.3e})");
            constants.push(c);
        }
        let geo_mean =
            (constants.iter().map(|c| c.ln()).sum::<f64>() / constants.len() as f64).exp();
        for (i, &c) in constants.iter().enumerate() {
            assert!(
                c >= geo_mean / 2.0 && c <= geo_mean * 2.0,
                "point {i}: constant {c:.3e} outside the factor-2 envelope around {geo_mean:.3e}"
            );
        }
    });
}

// ---------------------------------------------------------------- criterion 9

/// One solver invocation under a deterministic node budget, so even
/// budget-stopped searches are bit-reproducible (a wall clock would not be).
fn solve_deterministic(
    inst: &Instance,
    cs: &ConflictStructure,
    cfg: ModelConfig,
    kind: SolverKind,
) -> RotationLabeling {
    let mut budget = NodeBudget { cap: 200_000 };
    let strategy = |k: SolverKind| match k {
        SolverKind::GreedyMax | SolverKind::QapxGreedyMax => GreedyStrategy::Max,
        SolverKind::GreedyLowCost | SolverKind::QapxGreedyLowCost => GreedyStrategy::LowCost,
        _ => GreedyStrategy::BestRatio,
    };
    match kind {
        SolverKind::GreedyMax | SolverKind::GreedyLowCost | SolverKind::GreedyBestRatio => {
            greedy_solve(inst, cs, cfg, GreedyOptions::strategy(strategy(kind))).unwrap()
        }
        SolverKind::Qapx => qapx_solve(inst, cs, cfg, false, &mut budget).unwrap().labeling,
        SolverKind::QapxGreedyMax
        | SolverKind::QapxGreedyLowCost
        | SolverKind::QapxGreedyBestRatio => {
            qapx_greedy_solve(inst, cs, cfg, strategy(kind), &mut budget)
                .unwrap()
                .labeling
        }
        SolverKind::Exact => build_model(inst, cs, cfg, false)
            .unwrap()
            .solve(&mut budget)
            .unwrap()
            .labeling,
    }
}

#[test]
fn c9_round_trips_and_determinism() {
    criterion(9, "byte-identical round trips and determinism", || {
        let spec = gen_spec(30, 10.0, 77);
        let inst = generate_random(&spec).unwrap();
        let text = io::write_instance(&inst);
        let reparsed = io::parse_instance(&text).unwrap();
        assert_eq!(inst.labels(), reparsed.labels(), "parse must be exact");
        assert_eq!(io::write_instance(&reparsed), text, "instance bytes");
        assert_eq!(
            io::write_instance(&generate_random(&spec).unwrap()),
            text,
            "same seed, same bytes"
        );

        let cs = ConflictStructure::build(&inst).unwrap();
        let configs = [
            soft_cfg(RangeModel::Limited(1)),
            ModelConfig::new(RangeModel::Limited(2), ConflictMode::Hard),
            soft_cfg(RangeModel::Unlimited),
        ];
        for cfg in configs {
            for kind in SolverKind::ALL {
                let first = solve_deterministic(&inst, &cs, cfg, kind);
                let second = solve_deterministic(&inst, &cs, cfg, kind);
                assert_eq!(first, second, "{kind:?} must be deterministic");
                let ltext = io::write_labeling(&first);
                let back = io::parse_labeling(&ltext, first.model()).unwrap();
                assert_eq!(io::write_labeling(&back), ltext, "labeling bytes for {kind:?}");
            }
        }
    });
}
