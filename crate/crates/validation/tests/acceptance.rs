//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every criterion is evaluated even when an earlier one
//! fails.

use std::sync::Arc;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestCaseError, TestRunner};
use ustash_core::analytics::{jaccard, source_entropy, RequestSet, SourceCounts, SourceMode};
use ustash_core::model::{
    closest_to_origin, completion_time_miss, farthest_from_origin, h_surface, hit_rate_from_unique, x_optimal,
    AnalyticModel, CostMode, ModelParams, NetworkParams, H_GRID_RESOLUTION,
};
use ustash_core::sim::{process_request, run, HitTime, SimParams, SplitPolicy, StashState};
use ustash_core::units::kbps;
use ustash_core::workload::{
    expected_unique, ContentCatalog, ContentClass, ContentId, ContentItem, Request, Trace, Zipf, ZipfParams,
};
use ustash_harness::experiment::{run_compare, run_simulation, run_config, sweep_rv, surface_xs};
use ustash_harness::ExperimentConfig;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn criterion_1() -> Outcome {
    let net = NetworkParams::new(kbps(500.0), kbps(800.0), 0.75).unwrap();
    let x = x_optimal(&net, 1.0).value;
    outcome(within(x, 0.6154, 0.0005), format!("x_opt = {x:.5} (target 0.6154 +/- 0.0005)"))
}

fn criterion_2() -> Outcome {
    let cfg = ExperimentConfig::default();
    let m = AnalyticModel::new(cfg.model_params()).unwrap();
    let xo = m.x_optimal().value;
    let t_opt = m.expected_completion(xo).unwrap();
    let r0 = t_opt / m.expected_completion(0.0).unwrap();
    let r1 = t_opt / m.expected_completion(1.0).unwrap();
    let steps = 1000;
    let ts: Vec<f64> = (0..=steps).map(|i| m.expected_completion(i as f64 / steps as f64).unwrap()).collect();
    let argmin = (0..=steps).fold(0, |b, i| if ts[i] < ts[b] { i } else { b });
    let unique = ts.iter().filter(|&&t| t == ts[argmin]).count() == 1;
    let at_opt = (argmin as f64 / steps as f64 - xo).abs() <= 1.0 / steps as f64;
    let u_shape = ts[..=argmin].windows(2).all(|w| w[1] < w[0]) && ts[argmin..].windows(2).all(|w| w[1] > w[0]);
    let pass_0 = within(r0, 0.40, 0.10);
    let pass_1 = within(r1, 0.75, 0.10);
    let shape = unique && at_opt && u_shape;
    outcome(
        pass_0 && pass_1 && shape,
        format!(
            "E(T)(x_opt)/E(T)(0) = {r0:.3} [{}], E(T)(x_opt)/E(T)(1) = {r1:.3} [{}], \
             U-shape with unique min at x_opt = {xo:.4}: {} (hit rate {:.4})",
            if pass_0 { "in 0.40 +/- 0.10" } else { "outside 0.40 +/- 0.10" },
            if pass_1 { "in 0.75 +/- 0.10" } else { "outside 0.75 +/- 0.10" },
            shape,
            m.hit_rate(),
        ),
    )
}

fn criterion_3(cfg: &ExperimentConfig, trace: &Trace) -> Outcome {
    let m = run_simulation(cfg, trace, false).unwrap().metrics;
    let printed = hit_rate_from_unique(120_627, 99_576.0);
    let sim_ok = m.total >= 100_000 && (0.15..=0.25).contains(&m.hit_rate);
    let printed_ok = within(printed, 0.1745, 0.0005);
    outcome(
        sim_ok && printed_ok,
        format!(
            "simulated hit rate {:.4} over {} requests (band [0.15, 0.25]); (N - E[Y])/N on printed values = {printed:.4} \
             (target 0.1745 +/- 0.0005)",
            m.hit_rate, m.total
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut cfg = ExperimentConfig::from_toml_str(
        "r_v = 1e9\nn_requests = 120627\nconstant_sizes = true\nhit_time = \"full_size\"\nmodel.n = 120627",
    )
    .unwrap();
    cfg.model_mean_size_mb = cfg.size_non_video.mean();
    let w = cfg.workload();
    let catalog = Arc::new(Trace::catalog_for(&w).unwrap());
    let trace = Trace::generate_with_catalog(catalog.clone(), &w).unwrap();
    assert_eq!(trace.count_class(ContentClass::Video), 0);
    let model = AnalyticModel::new(cfg.model_params()).unwrap();
    let mut worst = 0.0f64;
    let mut misses = 0;
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let policy = SplitPolicy::parse(&format!("fixed:{x}")).unwrap();
        let sim = ustash_core::sim::simulate(&trace, &run_config(&cfg, policy, false)).unwrap().metrics;
        let want = model.expected_completion(x).unwrap();
        worst = worst.max((sim.mean_completion_s / want - 1.0).abs());
        misses = sim.misses;
    }
    // Monte-Carlo spread of the distinct-item count over independent seeds
    let counts: Vec<f64> = (1..=20u64)
        .map(|seed| {
            let mut ws = w.clone();
            ws.seed = seed;
            Trace::generate_with_catalog(catalog.clone(), &ws).unwrap().unique_contents() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let sd = (counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64).sqrt();
    let ey = model.expected_unique();
    let misses_equal_unique = misses == trace.unique_contents() as u64;
    let in_band = (misses as f64 - ey).abs() <= 4.0 * sd;
    outcome(
        worst <= 0.05 && misses_equal_unique && in_band,
        format!(
            "max relative gap over 21 splits {:.4} (limit 0.05); misses {misses} = distinct items: {misses_equal_unique}; \
             |misses - E(Y)| = {:.1} vs 4 sd = {:.1} (E(Y) = {ey:.1}, seed mean {mean:.1})",
            worst,
            (misses as f64 - ey).abs(),
            4.0 * sd
        ),
    )
}

fn criterion_5() -> Outcome {
    let mp = ExperimentConfig::default().model_params();
    let ratios: Vec<f64> = (1..=80).map(|i| i as f64 / 80.0).collect();
    let surface = h_surface(&mp, &ratios, &surface_xs()).unwrap();
    let near = closest_to_origin(&surface).unwrap();
    let far = farthest_from_origin(&surface).unwrap();
    let near_ok = within(near.t_norm, 0.33, 0.07)
        && within(near.cb_norm, 0.67, 0.07)
        && within(near.cu_norm, 0.37, 0.07)
        && within(near.h_dist, 0.83, 0.05);
    let far_ok = (far.t_norm, far.cb_norm, far.cu_norm) == (1.0, 0.0, 1.0) && within(far.h_dist, 2f64.sqrt(), 1e-9);
    let m = AnalyticModel::new(mp).unwrap();
    let closed = m.h_argmin().unwrap();
    let grid = m.h_grid_argmin(H_GRID_RESOLUTION).unwrap();
    let argmin_ok = (closed.x - grid.x_c).abs() <= H_GRID_RESOLUTION;
    outcome(
        near_ok && far_ok && argmin_ok,
        format!(
            "closest ({:.3}, {:.3}, {:.3}) at distance {:.4} (omega_u/omega_b = {:.4}, x = {:.2}); farthest ({}, {}, {}) at {:.4}; \
             closed-form x* {:.4} vs grid {:.4}",
            near.t_norm,
            near.cb_norm,
            near.cu_norm,
            near.h_dist,
            near.omega_ratio,
            near.x,
            far.t_norm,
            far.cb_norm,
            far.cu_norm,
            far.h_dist,
            closed.x,
            grid.x_c
        ),
    )
}

fn criterion_6(cfg: &ExperimentConfig) -> Outcome {
    let rows = sweep_rv(cfg, &[1.0, 50.0, 100.0, 200.0, 400.0]).unwrap();
    let r1 = &rows[0];
    let low_ok = within(r1.video_hit_rate, 0.12, 0.04) && within(r1.video_partial_hit_rate, 0.06, 0.04);
    let high: Vec<_> = rows.iter().filter(|r| r.r_v > 200.0).collect();
    let order_ok = high.iter().all(|r| r.video_partial_hit_rate > r.video_hit_rate);
    let tail = high
        .iter()
        .map(|r| {
            format!(
                "R_v={}: partial {:.4} vs full {:.4} over {} video requests",
                r.r_v, r.video_partial_hit_rate, r.video_hit_rate, r.video_requests
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(
        low_ok && order_ok,
        format!(
            "R_v=1 video full {:.4} (0.12 +/- 0.04), partial {:.4} (0.06 +/- 0.04); {tail}",
            r1.video_hit_rate, r1.video_partial_hit_rate
        ),
    )
}

fn criterion_7(cfg: &ExperimentConfig, trace: &Trace) -> Outcome {
    let res = run_compare(cfg, trace).unwrap();
    let get = |n: &str| &res.iter().find(|r| r.scenario == n).unwrap().metrics;
    let (direct, ustash, cache) = (get("direct"), get("ustash"), get("cache-wifi"));
    let share = ustash.user_cost_cents / direct.user_cost_cents;
    outcome(
        share <= 0.5 && ustash.stash_cost_cents < cache.stash_cost_cents,
        format!(
            "ustash user cost {:.3} of direct (limit 0.5); stash cost ustash {:.0} c vs cache-wifi {:.0} c",
            share, ustash.stash_cost_cents, cache.stash_cost_cents
        ),
    )
}

/// Runs one property over 1000 generated cases.
fn check<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 1000,
        failure_persistence: None,
        ..RunnerConfig::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn small_trace(reqs: &[(u64, f64)], sizes: &[f64]) -> Trace {
    let catalog = ContentCatalog::from_items(sizes.iter().enumerate().map(|(i, &s)| ContentItem {
        id: ContentId(i as u64),
        class: ContentClass::Video,
        rank: i as u64 + 1,
        size_mb: s,
    }))
    .unwrap();
    Trace {
        catalog: Arc::new(catalog),
        requests: reqs
            .iter()
            .enumerate()
            .map(|(i, &(id, v))| Request {
                index: i as u64,
                content_id: ContentId(id % sizes.len() as u64),
                view_ratio: v,
            })
            .collect(),
        config: None,
    }
}

fn criterion_8() -> Outcome {
    let net = (0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0).prop_map(|(u, b, l)| NetworkParams::new(u, b, l).unwrap());
    let ordered = (0.01f64..2.0, 1.01f64..10.0, 1.01f64..10.0)
        .prop_map(|(u, rb, rl)| NetworkParams::new(u, u * rb, u * rb * rl).unwrap());
    let model = |net: NetworkParams, s: f64, m: u64, n: u64| ModelParams {
        zipf: ZipfParams { s, m },
        n,
        net,
        ..ModelParams::default()
    };
    let ids = || prop::collection::btree_set((0u8..30).prop_map(|v| v.to_string()), 0..20);
    let results = [
        check("pmf normalization", (0.0f64..3.0, 1u64..2000), |(s, m)| {
            let z = Zipf::new(ZipfParams { s, m }).unwrap();
            let total: f64 = (1..=m).map(|k| z.pmf(k).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            Ok(())
        }),
        check("E(Y) bounds and monotonicity", (0.0f64..3.0, 1u64..2000, 1u64..5000), |(s, m, n)| {
            let p = ZipfParams { s, m };
            let y = expected_unique(&p, n);
            prop_assert!(y >= 1.0 - 1e-9 && y <= n.min(m) as f64 + 1e-9);
            prop_assert!(expected_unique(&p, n + 1) >= y - 1e-9);
            Ok(())
        }),
        check("Jaccard axioms", (ids(), ids()), |(a, b)| {
            let a = RequestSet { label: "a".into(), ids: a };
            let b = RequestSet { label: "b".into(), ids: b };
            let v = jaccard(&a, &b).value;
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, jaccard(&b, &a).value);
            prop_assert_eq!(jaccard(&a, &a).value, 1.0);
            Ok(())
        }),
        check("entropy axioms", prop::collection::vec(0u64..40, 1..8), |cs| {
            prop_assume!(cs.iter().any(|&c| c > 0));
            let mk = |cs: &[u64]| SourceCounts {
                content_id: "c".into(),
                counts: cs.iter().enumerate().map(|(i, &c)| (i.to_string(), c)).collect(),
                n: cs.len(),
            };
            let e = source_entropy(&mk(&cs), SourceMode::Declared).unwrap();
            prop_assert!((0.0..=1.0).contains(&e));
            let mut rev = cs.clone();
            rev.reverse();
            prop_assert!((e - source_entropy(&mk(&rev), SourceMode::Declared).unwrap()).abs() < 1e-12);
            Ok(())
        }),
        check("equal legs at the optimal split", (net.clone(), 0.01f64..1.0), |(net, v)| {
            let x = v * net.omega_b / (net.omega_u + net.omega_b);
            let (u, b) = ((v - x) / net.omega_u, x / net.omega_b);
            prop_assert!((u - b).abs() <= 1e-12 * u.max(b));
            prop_assert!(completion_time_miss(1.0, v, x, &net).is_ok());
            Ok(())
        }),
        check("completion closed form vs sum", (ordered, 0.1f64..2.0, 1u64..500, 1u64..1000), |(net, s, m, n)| {
            let md = AnalyticModel::new(model(net, s, m, n)).unwrap();
            let a = md.expected_completion_min();
            let b = md.expected_completion_exact(md.x_optimal().value).unwrap();
            prop_assert!((a / b - 1.0).abs() < 1e-9);
            Ok(())
        }),
        check("cost additivity and affinity", (net, 0.0f64..=1.0), |(net, x)| {
            let md = AnalyticModel::with_expected_unique(model(net, 0.7, 100, 100), 60.0).unwrap();
            let sum = md.stash_cost(x, CostMode::Approx).unwrap() + md.user_cost(x, CostMode::Approx).unwrap();
            prop_assert!((md.system_cost(x).unwrap() - sum).abs() <= 1e-12 * sum.abs().max(1.0));
            let lin = md.system_cost(0.0).unwrap() + x * (md.system_cost(1.0).unwrap() - md.system_cost(0.0).unwrap());
            prop_assert!((md.system_cost(x).unwrap() - lin).abs() <= 1e-9 * lin.abs().max(1.0));
            Ok(())
        }),
        check(
            "byte conservation and stash monotonicity",
            (
                prop::collection::vec((0u64..10, 0.01f64..=1.0), 1..80),
                prop::collection::vec(0.01f64..100.0, 1..10),
            ),
            |(reqs, sizes)| {
                let trace = small_trace(&reqs, &sizes);
                let policy = SplitPolicy::parse("optimal").unwrap();
                let params = SimParams::default();
                let mut stash = StashState::new();
                for r in &trace.requests {
                    let item = trace.item(r).unwrap();
                    let before = stash.fraction(item.id);
                    let o = process_request(&mut stash, &item, r.view_ratio, &policy, &params, true);
                    let want = r.view_ratio * item.size_mb;
                    prop_assert!((o.requested_mb() - want).abs() <= 1e-9 * want);
                    prop_assert!(stash.fraction(item.id) >= before.max(r.view_ratio));
                }
                Ok(())
            },
        ),
        check(
            "determinism",
            (prop::collection::vec((0u64..10, 0.01f64..=1.0), 1..80), any::<bool>()),
            |(reqs, strict)| {
                let trace = small_trace(&reqs, &[3.0, 1.0, 8.0, 0.5]);
                let params = SimParams {
                    hit_time: if strict { HitTime::FullSize } else { HitTime::Consumed },
                    ..SimParams::default()
                };
                let policy = SplitPolicy::parse("fixed:0.4").unwrap();
                let a = run(&trace, &policy, &params, 7).unwrap();
                prop_assert_eq!(&a, &run(&trace, &policy, &params, 7).unwrap());
                prop_assert_eq!(a.full_hits + a.partial_hits + a.misses, trace.len() as u64);
                Ok(())
            },
        ),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "9 property suites, 1000 cases each, all hold".into()
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let cfg = ExperimentConfig::default();
    let t0 = Instant::now();
    let trace = Trace::generate(&cfg.workload()).unwrap();
    eprintln!("default trace: {} requests in {:.1?}", trace.len(), t0.elapsed());

    let criteria: Vec<Criterion> = vec![
        ("1 optimal split", Box::new(criterion_1)),
        ("2 completion-time reductions", Box::new(criterion_2)),
        ("3 hit rate", Box::new(|| criterion_3(&cfg, &trace))),
        ("4 model/sim cross-validation", Box::new(criterion_4)),
        ("5 H optimum", Box::new(criterion_5)),
        ("6 partial hits", Box::new(|| criterion_6(&cfg))),
        ("7 scenario costs", Box::new(|| criterion_7(&cfg, &trace))),
        ("8 property suites", Box::new(criterion_8)),
    ];
    let mut failed = Vec::new();
    for (name, f) in &criteria {
        let start = Instant::now();
        let o = f();
        println!(
            "{} criterion {name}: {} ({:.1?})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
        if !o.pass {
            failed.push(*name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail: {}", failed.len(), criteria.len(), failed.join(", "));
        std::process::exit(1);
    }
}
