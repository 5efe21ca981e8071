//! The acceptance suite: one PASS/FAIL line per criterion on stdout.
//!
//! `ACCEPTANCE_ONLY=8,11 cargo test --release -p lstring-cli --test acceptance` runs a subset.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lstring_cli::checks::{exact_beta, expansion_check, ladder_steps};
use lstring_core::catalan::{catalan, catalan_closed_form, catalan_table};
use lstring_core::coeff::{check_bounds, coefficient_bound, CoeffTable};
use lstring_core::concat::{factorization_check, interleaving_product, interleaving_sum, sizes};
use lstring_core::enumerate::{enumerate_vanishing, sums_over_trajectories, CatalogCache, EnumConfig};
use lstring_core::fixtures::worked_trajectory;
use lstring_core::lemmas::{check_catalog_lemmas, check_core_order, closed_walk, split_count_ok};
use lstring_core::series::{f_value, ln_magnitude_bound, master_residual_limit, parse_rational, to_f64};
use lstring_core::word::parse_sequence;
use lstring_core::{Loop, LoopSequence, SymbolicWeight, Vertex};
use lstring_gauge::chain::run_chain;
use lstring_gauge::{
    correspondence, factorization_point, haar_sample, master_residual_mc, Boundary, GaugeField, Group, Metropolis,
    Region, RunConfig,
};

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn p_at(x: i32, y: i32) -> Loop {
    Loop::from_steps(&Vertex::new(&[x, y]).unwrap(), &[1, 2, -1, -2]).unwrap()
}

fn p() -> Loop {
    p_at(0, 0)
}

fn oracle_cases() -> Vec<(&'static str, LoopSequence)> {
    let dw = Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2, 1, 2, -1, -2]).unwrap();
    vec![
        ("p", LoopSequence::single(p())),
        ("(p,p)", LoopSequence::new(vec![p(), p()]).unwrap()),
        ("(p,p⁻¹)", LoopSequence::new(vec![p(), p().inverse()]).unwrap()),
        ("double-wound p", LoopSequence::single(dw)),
    ]
}

/// Shared between the duality oracle and the bound suite.
fn table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(CoeffTable::new)
}

fn mc(n: usize, beta: f64, sweeps: usize, seed: u64) -> RunConfig {
    RunConfig { n, beta, sweeps, burn_in: 1000, replicas: 4, seed, ..Default::default() }.validated().unwrap()
}

fn ensure(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c1_worked_weight() -> Verdict {
    let t0 = Instant::now();
    let t = worked_trajectory();
    let w = t.weight();
    let dt = t0.elapsed();
    let expected = SymbolicWeight::from_ratio(-1, 226_492_416_000, 7);
    ensure(
        w == expected && t.is_vanishing() && dt < Duration::from_secs(1),
        format!("weight {w}, {} steps, replay {dt:.1?}", t.ops().len()),
    )
}

fn c2_duality() -> Verdict {
    let t0 = Instant::now();
    let cache = CatalogCache::new();
    let cfg = EnumConfig::default();
    let mut bad = Vec::new();
    let (mut cases, mut trajectories) = (0, 0u64);
    for (name, s) in oracle_cases() {
        for i in 0..=3u32 {
            for k in 0..=2u32 {
                let sums = sums_over_trajectories(i, k, &s, &cfg, &cache).map_err(|e| e.to_string())?;
                let (a, b) = (table().a(i as i64, k as i64, &s), table().b(i as i64, k as i64, &s));
                if sums.signed.coefficient != a || sums.absolute.coefficient != b || !sums.split_bound_ok {
                    bad.push(format!("{name} i={i} k={k}: Σw={} a={a} Σ|w|={} b={b}", sums.signed, sums.absolute));
                }
                cases += 1;
                trajectories += sums.count;
            }
        }
    }
    let dt = t0.elapsed();
    ensure(
        bad.is_empty() && dt < Duration::from_secs(600),
        format!("{cases} cases, {trajectories} trajectories, {dt:.1?} {}", bad.join("; ")),
    )
}

fn c3_bounds() -> Verdict {
    let d = 2;
    for (_, s) in oracle_cases() {
        for i in 0..=3 {
            for k in 0..=2 {
                table().b(i, k, &s);
            }
        }
    }
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in table().export() {
        let s = if r.loop_words == "null" {
            LoopSequence::null()
        } else {
            parse_sequence(&r.loop_words).map_err(|e| e.to_string())?.0
        };
        let val = |n: &Option<String>, dd: &Option<String>| {
            n.as_ref().map(|n| BigRational::new(n.parse().unwrap(), dd.as_ref().unwrap().parse().unwrap()))
        };
        let (a, b) = (val(&r.a_num, &r.a_den), val(&r.b_num, &r.b_den));
        let bound = coefficient_bound(r.i, r.k, &s, d);
        let ok = match (&a, &b) {
            (Some(a), Some(b)) => check_bounds(a, b, &bound),
            (None, Some(b)) => check_bounds(&BigRational::zero(), b, &bound),
            (Some(a), None) => a.abs() <= BigRational::from_integer(bound),
            (None, None) => true,
        };
        if !ok {
            bad.push(format!("i={} k={} {}", r.i, r.k, r.loop_words));
        }
        checked += 1;
    }
    // |f_{2k}(s)| ≤ (2^{3k+12} d)^{|s|} wherever the series is certified
    let mut certified = 0;
    for k in 0..=1u32 {
        let kk = BigRational::from_integer((1024 * d as i64).into());
        let beta = BigRational::one() / (BigRational::from_integer(4.into()) * num_traits::pow(kk, 5 + 2 * k as usize));
        for (name, s) in oracle_cases() {
            let v = f_value(table(), k, &s, &beta, 3, d);
            if !v.certified || (v.value.abs() + v.tail_bound).ln() > ln_magnitude_bound(k, &s, d) {
                bad.push(format!("f_{} {name}", 2 * k));
            }
            certified += 1;
        }
    }
    ensure(bad.is_empty(), format!("{checked} table entries, {certified} certified values {}", bad.join("; ")))
}

fn arb_step(d: usize) -> impl Strategy<Value = i8> {
    (1..=d as i8, any::<bool>()).prop_map(|(a, s)| if s { a } else { -a })
}

fn arb_start(d: usize) -> impl Strategy<Value = Vertex> {
    prop::collection::vec(-2i32..=2, d).prop_map(|c| Vertex::new(&c).unwrap())
}

fn arb_sequence() -> impl Strategy<Value = LoopSequence> {
    let lp = |d: usize| {
        (arb_start(d), prop::collection::vec(arb_step(d), 1..12)).prop_filter_map("null core", move |(st, steps)| {
            let l = Loop::from_steps(&st, &closed_walk(d, &steps)).ok()?;
            (!l.is_null()).then_some(l)
        })
    };
    (2usize..=3)
        .prop_flat_map(move |d| prop::collection::vec(lp(d), 1..=3))
        .prop_map(|ls| LoopSequence::new(ls).unwrap())
}

fn arb_small_sequence() -> impl Strategy<Value = LoopSequence> {
    let piece = (0i32..=1, 0i32..=1, 0usize..3, any::<bool>()).prop_map(|(x, y, shape, inv)| {
        let steps: &[i8] = match shape {
            0 => &[1, 2, -1, -2],
            1 => &[1, 1, 2, -1, -1, -2],
            _ => &[1, 2, 2, -1, -2, -2],
        };
        let l = Loop::from_steps(&Vertex::new(&[x, y]).unwrap(), steps).unwrap();
        if inv {
            l.inverse()
        } else {
            l
        }
    });
    prop::collection::vec(piece, 1..=2).prop_map(|ls| LoopSequence::new(ls).unwrap())
}

fn runner() -> TestRunner {
    let cfg = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn c4_lemmas() -> Verdict {
    let walk = (
        arb_start(3),
        prop::collection::vec(arb_step(3), 0..12),
        prop::collection::vec((any::<prop::sample::Index>(), arb_step(3)), 0..6),
        prop::collection::vec(any::<usize>(), 0..40),
    );
    runner()
        .run(&walk, |(start, steps, spurs, choices)| {
            let mut w = closed_walk(3, &steps);
            for (at, s) in spurs {
                let i = at.index(w.len() + 1);
                w.splice(i..i, [s, -s]);
            }
            prop_assert!(check_core_order(&start, &w, &choices).is_ok());
            Ok(())
        })
        .map_err(|e| format!("core order: {e}"))?;

    let entries = std::cell::Cell::new(0usize);
    runner()
        .run(&arb_sequence(), |s| {
            let n = check_catalog_lemmas(&s).map_err(TestCaseError::fail)?;
            entries.set(entries.get() + n);
            Ok(())
        })
        .map_err(|e| format!("operation lemmas: {e}"))?;

    let trajectories = std::cell::Cell::new(0usize);
    let budget = (0u32..=2, 0u32..=1, 0u32..=1, 0u32..=1).prop_filter("small", |(a, b, c, d)| a + b <= 2 && c + d <= 1);
    runner()
        .run(&(arb_small_sequence(), budget), |(s, (a, b, c, d))| {
            let cfg = EnumConfig { max_trajectories: 2_000_000, ..Default::default() };
            let ts = enumerate_vanishing(&s, a, b, c, d, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for t in &ts {
                prop_assert!(t.is_vanishing() && split_count_ok(t));
            }
            trajectories.set(trajectories.get() + ts.len());
            Ok(())
        })
        .map_err(|e| format!("splitting count: {e}"))?;
    Ok(format!(
        "3 × 1000 cases; {} catalog entries, {} enumerated trajectories",
        entries.get(),
        trajectories.get()
    ))
}

fn c5_limit_residual() -> Verdict {
    let s = LoopSequence::single(p());
    let beta = parse_rational("1e-4").unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for k in 0..=1 {
        let r = master_residual_limit(table(), &s, k, &beta, 3, 2);
        ok &= r.within_budget() && r.lower_orders_vanish() && r.top_matches();
        notes.push(format!(
            "k={k}: residual {:.2e} ≤ budget {:e}, orders ≤ 3 vanish {}, β⁴ term {} as predicted {}",
            r.residual_f64,
            r.tail_budget,
            r.lower_orders_vanish(),
            r.polynomial[4],
            r.top_matches()
        ));
    }
    let r0 = master_residual_limit(table(), &s, 0, &BigRational::zero(), 3, 2);
    ok &= r0.residual.is_zero();
    notes.push(format!("β=0 residual {}", r0.residual));
    ensure(ok, notes.join("; "))
}

fn c6_factorization() -> Verdict {
    let s = LoopSequence::single(p());
    let checks = factorization_check(&s, &s, 3, &EnumConfig::default()).map_err(|e| e.to_string())?;
    let mut ok = checks.iter().all(|c| c.holds());
    let orders: Vec<String> = checks.iter().map(|c| format!("a={}: {}", c.order, c.direct)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut identities = 0;
    for n in 0..=4 {
        for m in 0..=4 {
            for _ in 0..5 {
                let a: Vec<u64> = (0..n).map(|_| rng.random_range(1..=20)).collect();
                let b: Vec<u64> = (0..m).map(|_| rng.random_range(1..=20)).collect();
                ok &= interleaving_sum(&sizes(&a), &sizes(&b)) == interleaving_product(&sizes(&a), &sizes(&b));
                identities += 1;
            }
        }
    }
    ensure(ok, format!("Σ_(p,p) = (Σ_p)² at {}; {identities} interleaving identities", orders.join(", ")))
}

fn c7_catalan() -> Verdict {
    let c = catalan_table(60);
    let mut ok = [(0, 1u32), (1, 1), (4, 14)].iter().all(|&(n, v)| c[n] == v.into());
    ok &= (0..=60).all(|n| c[n as usize] == catalan_closed_form(n) && c[n as usize] == catalan(n));
    ok &= (0..=50).all(|n| c[n + 1] <= &c[n] * 4u32);
    ok &= (1..=40usize).all(|n| (0..n).map(|k| &c[n - 1 - k] * &c[k]).sum::<num_bigint::BigUint>() == c[n]);
    for n in 1..=20usize {
        for m in 1..=20usize {
            ok &= c[n + m - 1] <= &c[n - 1] * &c[m - 1] * ((n + m) * (n + m)) as u64;
        }
    }
    ensure(ok, "closed form n ≤ 60, growth n ≤ 50, convolution n ≤ 40, product bound n,m ≤ 20".into())
}

fn c8_finite_n_equation() -> Verdict {
    let cfg = mc(3, 0.2, 50_000, 8);
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, s) in [
        ("p", LoopSequence::single(p_at(1, 1))),
        ("(p,p)", LoopSequence::new(vec![p_at(1, 1), p_at(1, 1)]).unwrap()),
    ] {
        let m = master_residual_mc(&s, &cfg).map_err(|e| e.to_string())?;
        ok &= m.z_re.abs() <= 3.0 && m.z_im.abs() <= 3.0;
        notes.push(format!(
            "{name}: LHS {:.5} RHS {:.5} z={:.2} (im {:.2}), {} terms",
            m.lhs.mean_re, m.rhs.mean_re, m.z_re, m.z_im, m.terms
        ));
    }
    notes.push(format!("{} × {} sweeps", cfg.replicas, cfg.sweeps));
    ensure(ok, notes.join("; "))
}

fn c9_expansion_agreement() -> Verdict {
    let cfg = mc(12, 0.1, 5_000, 9);
    let s = LoopSequence::single(p_at(1, 1));
    let c = expansion_check(&s, &cfg, 3, table()).map_err(|e| e.to_string())?;
    // the truncated f_0 is β/2 exactly; a_{1,1}(p) = a_{3,1}(p) = 0 as well
    let tight = c.deviation <= 3.0 * c.phi.stderr_re;
    ensure(
        c.passed,
        format!(
            "φ_12 = {:.5} ± {:.5}, f_0 series {:.5}, deviation {:.1e} ≤ budget {:.1e}; within 3σ alone: {tight}",
            c.phi.mean_re, c.phi.stderr_re, c.series.value, c.deviation, c.budget
        ),
    )
}

fn c10_factorization_trend() -> Verdict {
    let l = p_at(1, 1);
    let mut points = Vec::new();
    for (i, n) in [4, 8, 16].into_iter().enumerate() {
        points.push(factorization_point(&l, &mc(n, 0.1, 5_000, 10 + i as u64)).map_err(|e| e.to_string())?);
    }
    let steps = ladder_steps(&points);
    let shown: Vec<String> = points
        .iter()
        .map(|p| {
            format!(
                "N={} Δ={:.2e}±{:.1e} (holomorphic {:.1e}±{:.1e})",
                p.n, p.delta.value, p.delta.stderr, p.holomorphic.value, p.holomorphic.stderr
            )
        })
        .collect();
    ensure(steps.iter().all(|&b| b), shown.join(", "))
}

fn c11_so_su() -> Verdict {
    let c = correspondence(&p_at(1, 1), &mc(16, 0.05, 5_000, 11)).map_err(|e| e.to_string())?;
    ensure(
        c.consistent,
        format!(
            "SU(2β) {:.5}±{:.5}, SO(β) {:.5}±{:.5}, |difference| {:.1e} ≤ 3σ + 1/N² = {:.1e}",
            c.su.mean_re, c.su.stderr_re, c.so.mean_re, c.so.stderr_re, c.deficit, c.budget
        ),
    )
}

fn c12_sampler() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 3;
    let draws = 100_000;
    let mut worst: f64 = 0.0;
    for group in [Group::SU, Group::SO] {
        let qs: Vec<_> = (0..draws).map(|_| haar_sample(group, n, &mut rng).unwrap()).collect();
        for j in 0..n {
            for k in 0..n {
                let samples: [Vec<f64>; 3] = [
                    qs.iter().map(|q| q[(j, k)].re).collect(),
                    qs.iter().map(|q| q[(j, k)].im).collect(),
                    qs.iter().map(|q| q[(j, k)].norm_sqr()).collect(),
                ];
                for (which, xs) in samples.iter().enumerate() {
                    let target = if which == 2 { 1.0 / n as f64 } else { 0.0 };
                    let len = xs.len() as f64;
                    let m = xs.iter().sum::<f64>() / len;
                    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (len - 1.0);
                    let se = (var / len).sqrt();
                    let z = if se > 0.0 { (m - target).abs() / se } else if m == target { 0.0 } else { f64::INFINITY };
                    worst = worst.max(z);
                }
            }
        }
    }
    // group-membership drift over 10⁶ sweeps under the shipped repair policy: the
    // largest drift seen before any re-projection
    let cfg = RunConfig {
        extent: vec![2, 2],
        n: 3,
        beta: 0.2,
        sweeps: 1_000_000,
        burn_in: 0,
        tune: false,
        ..Default::default()
    }
    .validated()
    .unwrap();
    let region = cfg.region().unwrap();
    let run = run_chain(&cfg, region.clone(), 0, 0, &|_, _| Ok(())).map_err(|e| e.to_string())?;
    let drift = run.max_drift;
    // the same number of sweeps with repair switched off, for reference
    let mut f = GaugeField::hot(region, Group::SU, 3, &mut rng).unwrap();
    let m = Metropolis::new(0.2, 0.5, 9);
    for _ in 0..1_000_000 {
        m.sweep(&mut f, &mut rng);
    }
    let raw = f.max_drift();
    // β = 0 accepts every proposal
    let mut acc_min: f64 = 1.0;
    let region = Arc::new(Region::cube(2, 4, Boundary::Free).unwrap());
    for group in [Group::SU, Group::SO] {
        let mut f = GaugeField::hot(region.clone(), group, 4, &mut rng).unwrap();
        let m = Metropolis::new(0.0, 0.7, 16);
        for _ in 0..200 {
            acc_min = acc_min.min(m.sweep(&mut f, &mut rng));
        }
    }
    ensure(
        worst <= 4.0 && drift <= 1e-10 && acc_min == 1.0,
        format!(
            "Haar moments max |z| = {worst:.2} over 10⁵ draws; drift ≤ {drift:.1e} over 10⁶ sweeps ({} re-projections; {raw:.1e} with none); β=0 acceptance {acc_min}",
            run.repairs
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        (1, "worked trajectory weight", c1_worked_weight),
        (2, "duality oracle", c2_duality),
        (3, "bound suite", c3_bounds),
        (4, "structural lemma properties", c4_lemmas),
        (5, "limit loop-equation residual", c5_limit_residual),
        (6, "concatenation and factorization", c6_factorization),
        (7, "Catalan suite", c7_catalan),
        (8, "finite-N loop equation by MC", c8_finite_n_equation),
        (9, "expansion agreement at N=12", c9_expansion_agreement),
        (10, "factorization trend", c10_factorization_trend),
        (11, "SO/SU correspondence", c11_so_su),
        (12, "sampler calibration", c12_sampler),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (n, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t0 = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let line = format!("criterion {n:>2} {tag}  {name}: {detail} [{:.1?}]\n", t0.elapsed());
        // bypass the test harness's output capture
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if verdict.is_err() {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn exact_beta_round_trips() {
    assert_eq!(exact_beta(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
    assert_eq!(to_f64(&exact_beta(0.05).unwrap()), 0.05);
}
