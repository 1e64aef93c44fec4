//! Acceptance criteria, run in order with one PASS/FAIL line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use wsrpt_core::adversary::{play, Equalizer, FixedFirst, Game};
use wsrpt_core::analysis::{closed_metrics, lb_c1, lb_intersection, nested_ratio, optimize_basic, optimize_p_s, table1};
use wsrpt_core::fuzz::{fuzz, FuzzConfig};
use wsrpt_core::instances::{gen_basic, gen_nested, gen_random, NestedParams, RandomRanges, ScenarioParams};
use wsrpt_core::numeric::{int, ratio, to_f64};
use wsrpt_core::oracle::{common_grid, optimal_bruteforce, optimal_dp_timeindexed, structured_optimal, DEFAULT_STATE_BUDGET};
use wsrpt_core::simulator::{
    default_tie, is_equality_instance, simulate, split_job, OnlinePolicy, Priority, PriorityPolicy, TieRule,
};
use wsrpt_core::{objective, Instance, JobId};

const R_B: f64 = 1.2259;

fn ratio_of(inst: &Instance) -> f64 {
    let s = simulate(inst, Priority::Wsrpt, &default_tie(inst)).unwrap();
    let online = objective(&s, inst).unwrap();
    let opt = structured_optimal(inst).unwrap().objective;
    to_f64(&(online / opt))
}

fn within(what: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{what}: {got} not within {tol} of {want}");
}

fn in_time(start: Instant, limit: Duration) {
    assert!(start.elapsed() < limit, "took {:?}, limit {limit:?}", start.elapsed());
}

fn table1_reproduction() -> String {
    let t = Instant::now();
    let rows = table1().unwrap();
    assert_eq!(rows.len(), 26);
    let worst = rows.iter().map(|r| r.max_abs_delta()).fold(0.0, f64::max);
    assert!(worst < 1e-3, "largest delta {worst}");
    let last = &rows[25].computed;
    for (got, want) in [(last.c, 6.5168), (last.c_star, 5.3160), (last.ratio, 1.2259), (last.w, 4.7521), (last.l, 2.2995)] {
        within("last row", got, want, 1e-3);
    }
    in_time(t, Duration::from_secs(5));
    format!("largest delta {worst:.2e}")
}

fn tight_ratio() -> String {
    let t = Instant::now();
    let opt = optimize_basic();
    within("ratio", opt.ratio, R_B, 5e-4);
    within("y", opt.y, 0.8157, 5e-3);
    within("v", opt.v, 0.7066, 5e-3);
    in_time(t, Duration::from_secs(30));
    format!("ratio {:.5} at y={:.5}, v={:.5}", opt.ratio, opt.y, opt.v)
}

fn discrete_convergence() -> String {
    let t = Instant::now();
    let errors: Vec<f64> = [0.01, 0.003, 0.001]
        .iter()
        .map(|&d| {
            let inst = gen_basic(&ScenarioParams::new(0.8157, Some(0.7066), None, d).unwrap()).unwrap();
            (ratio_of(&inst) - R_B).abs()
        })
        .collect();
    assert!(errors[2] < 0.02, "error at 1e-3 is {}", errors[2]);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "errors not decreasing: {errors:?}");
    in_time(t, Duration::from_secs(60));
    format!("errors {errors:.5?}")
}

fn nested_tightness() -> String {
    let opt = optimize_basic();
    let inner = closed_metrics(opt.y, Some(opt.v), None).unwrap();
    let best = optimize_p_s(0.5307, &inner);
    let closed = nested_ratio(0.5307, best.p_s, &inner).unwrap();
    within("closed nested ratio", closed, R_B, 5e-4);
    // Four decimals of p_s keep the generated rationals small.
    let p_s = (best.p_s * 1e4).round() / 1e4;
    let params = NestedParams::standard(0.5307, p_s, opt.y, Some(opt.v), 1e-3).unwrap();
    let inst = gen_nested(&params).unwrap();
    let sim = ratio_of(&inst);
    within("simulated nested ratio", sim, R_B, 0.02);
    format!("closed {closed:.5}, simulated {sim:.5} at p_s={p_s}")
}

fn coarse_generated() -> Vec<Instance> {
    let mut out = Vec::new();
    for (y, v, z, d) in [
        (0.5, None, None, 0.25),
        (0.75, Some(0.5), None, 0.25),
        (0.5, None, Some(0.5), 0.25),
        (0.5, Some(0.25), Some(0.25), 0.25),
        (0.8, Some(0.4), None, 0.4),
        (0.6, None, None, 0.2),
    ] {
        out.push(gen_basic(&ScenarioParams::new(y, v, z, d).unwrap()).unwrap());
    }
    for (r_s, p_s, iy, d) in [(0.5, 1.0, 0.5, 0.5), (0.5, 2.0, 0.5, 0.5), (0.5, 4.0, 0.5, 0.25)] {
        out.push(gen_nested(&NestedParams::standard(r_s, p_s, iy, None, d).unwrap()).unwrap());
    }
    out
}

fn oracle_agreement() -> String {
    let ranges = RandomRanges { processing: (1, 4), ..RandomRanges::default() };
    for seed in 0..100 {
        let n = 1 + (seed as usize % 6);
        let inst = gen_random(n, seed, &ranges).unwrap();
        let bf = optimal_bruteforce(&inst, 6).unwrap().objective;
        let dp = optimal_dp_timeindexed(&inst, &common_grid(&inst), DEFAULT_STATE_BUDGET).unwrap().objective;
        assert_eq!(bf, dp, "seed {seed}");
    }
    let gens = coarse_generated();
    for inst in &gens {
        assert!(inst.len() <= 8, "{} jobs in {:?}", inst.len(), inst.tags.params);
        let bf = optimal_bruteforce(inst, 8).unwrap().objective;
        assert_eq!(structured_optimal(inst).unwrap().objective, bf, "{:?}", inst.tags);
    }
    format!("100 random, {} generated", gens.len())
}

fn lower_bound() -> String {
    within("c1", lb_c1(1.0, 2.3364).unwrap(), 1.1038, 1e-4);
    let x = lb_intersection(1.0).unwrap();
    within("crossing p2", x.p2, 2.3364, 1e-3);
    within("crossing value", x.c1, 1.1038, 1e-4);
    let game = Game::default();
    let wsrpt = |tie| Box::new(PriorityPolicy::new(Priority::Wsrpt, tie)) as Box<dyn OnlinePolicy>;
    let policies: Vec<(&str, Box<dyn OnlinePolicy>, f64)> = vec![
        ("wsrpt/prefer-running", wsrpt(TieRule::PreferRunning), 1.1038),
        ("wsrpt/prefer-new-longest", wsrpt(TieRule::PreferNewLongest), 1.1038),
        ("wspt-preemptive", Box::new(PriorityPolicy::new(Priority::WsptPreemptive, TieRule::PreferRunning)), 1.1038),
        ("srpt", Box::new(PriorityPolicy::new(Priority::Srpt, TieRule::PreferRunning)), 1.1038),
        ("second-first", Box::new(FixedFirst::new(JobId(1))), 1.1038),
        ("equalizer", Box::new(Equalizer::new(ratio(3, 5))), 1.1392),
    ];
    let mut worst = f64::INFINITY;
    for (name, policy, bound) in policies {
        let t = play(policy, &game).unwrap();
        assert!(t.ratio >= bound - 0.005, "{name}: {}", t.ratio);
        worst = worst.min(t.ratio);
    }
    format!("crossing ({:.5}, {:.5}), weakest game {worst:.5}", x.p2, x.c1)
}

fn optimality_sanity() -> String {
    let t = Instant::now();
    let dir = std::env::temp_dir().join("wsrpt-acceptance");
    let cfg = FuzzConfig { trials: 10_000, n_max: 7, seed: 2024, certificate_dir: Some(dir), ..FuzzConfig::default() };
    let rep = fuzz(&cfg).unwrap();
    for c in &rep.classes {
        let ok = c.trials - c.skipped;
        match c.class {
            wsrpt_core::instances::JobClass::General => {
                assert!(c.max_ratio <= R_B + 1e-6, "general max {}", c.max_ratio)
            }
            _ => assert_eq!(c.exact_ones, ok, "{:?}: {} of {ok} exactly 1", c.class, c.exact_ones),
        }
    }
    assert!(!rep.breached);
    in_time(t, Duration::from_secs(600));
    let class = rep.worst_class.map_or("none".to_string(), |c| format!("{c:?}"));
    format!("worst {:.5} in class {class}", rep.worst_ratio)
}

fn equality_property() -> String {
    let mut insts = coarse_generated();
    for d in [0.01, 0.003] {
        insts.push(gen_basic(&ScenarioParams::new(0.8157, Some(0.7066), None, d).unwrap()).unwrap());
        insts.push(gen_basic(&ScenarioParams::new(0.75, Some(0.7062), Some(0.3623), d).unwrap()).unwrap());
        insts.push(gen_basic(&ScenarioParams::floor_only(0.5, d).unwrap()).unwrap());
    }
    insts.push(gen_nested(&NestedParams::standard(0.5307, 67.0, 0.8157, Some(0.7066), 0.01).unwrap()).unwrap());
    for inst in &insts {
        let rep = is_equality_instance(inst, &default_tie(inst)).unwrap();
        assert!(rep.pass, "{:?}: {:?}", inst.tags.params, rep.violations.first());
    }
    // An isolated job: its own busy period.
    let base = Instance::from_triples(vec![(int(0), int(2), int(1)), (int(10), ratio(7, 3), ratio(5, 2))]).unwrap();
    let job = base.job(JobId(1)).unwrap().clone();
    let before = objective(&simulate(&base, Priority::Wsrpt, &TieRule::PreferRunning).unwrap(), &base).unwrap();
    for q in 1..=6usize {
        let split = split_job(&base, JobId(1), q).unwrap();
        let after = objective(&simulate(&split, Priority::Wsrpt, &TieRule::PreferRunning).unwrap(), &split).unwrap();
        let q_r = int(q as i64);
        let expect = &job.weight * &job.processing * (&q_r - int(1)) / (int(2) * &q_r);
        assert_eq!(before.clone() - after, expect, "q={q}");
    }
    format!("{} generated instances", insts.len())
}

fn main() {
    let criteria: [(&str, fn() -> String); 8] = [
        ("table 1 reproduction", table1_reproduction),
        ("tight ratio", tight_ratio),
        ("discrete convergence", discrete_convergence),
        ("nested tightness", nested_tightness),
        ("oracle agreement", oracle_agreement),
        ("lower bound", lower_bound),
        ("optimality sanity", optimality_sanity),
        ("equality instances and splitting", equality_property),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {:.2?})", i + 1, start.elapsed()),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {} {name}: FAIL ({msg})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
