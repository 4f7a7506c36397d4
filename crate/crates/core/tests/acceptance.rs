// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks. Each prints one PASS/FAIL line; the process exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use qkdwa::assign::{
    brute_force_noise, brute_force_rate, brute_force_rate_split, check_equal_directions,
    check_equal_directions_weighted, conventional, dual_fiber_split, matrix_search, optimize,
    Assignment, CostMatrix, SearchOptions,
};
use qkdwa::experiments::{compare_methods, n_max, render_pattern, sweep_re, Floor, Outcome};
use qkdwa::grid::{build_grid, DwdmParams, NoiseMode, QkdParams, ScenarioConfig, Structure};
use qkdwa::noise::{Direction, LinkModel};
use qkdwa::raman::RamanCrossSectionTable;
use qkdwa::rate::{fit_linear_model, RateCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Zero-noise rate at 45 km from an independent arbitrary-precision script.
const ZERO_NOISE_RATE_45KM: f64 = 15_209_754.448_623_682;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn link(start_nm: f64, end_nm: f64, dwdm: DwdmParams) -> LinkModel {
    let grid = build_grid(start_nm, end_nm, 200.0).expect("grid");
    LinkModel::new(
        grid,
        RamanCrossSectionTable::synthetic_default(),
        QkdParams::nominal(),
        dwdm,
    )
    .expect("link")
}

fn c_band(dwdm: DwdmParams) -> LinkModel {
    link(1530.0, 1565.0, dwdm)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn fail_if(bad: bool, msg: String) -> Result<(), String> {
    if bad {
        Err(msg)
    } else {
        Ok(())
    }
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A1);
    let opts = SearchOptions::default();
    let mut instances = 0;
    let mut worst: f64 = 0.0;
    while instances < 240 {
        let d = rng.random_range(4..=10);
        let m = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        if n + m > d {
            continue;
        }
        // every fourth matrix has small integer entries to force ties
        let ties = instances % 4 == 0;
        let p = CostMatrix::from_fn(d, f64::INFINITY, |_, _| {
            if ties {
                rng.random_range(0..5) as f64
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .map_err(|e| e.to_string())?;
        let a = matrix_search(&p, n, m)
            .map_err(|e| e.to_string())?
            .ok_or("search found nothing")?;
        let b = brute_force_noise(&p, n, m, &opts)
            .map_err(|e| e.to_string())?
            .ok_or("oracle found nothing")?;
        let r = rel(a.cost, b.cost);
        worst = worst.max(r);
        fail_if(
            r > 1e-12,
            format!("D={d} N={n} M={m}: {} vs {}", a.cost, b.cost),
        )?;
        instances += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    fail_if(secs >= 60.0, format!("took {secs:.1} s"))?;
    Ok(format!(
        "{instances} matrices, worst relative difference {worst:e}, {secs:.2} s"
    ))
}

fn equal_directions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1E);
    let mut instances = 0;
    let mut counterexamples = 0;
    // uniform random matrices
    for _ in 0..30 {
        let d = rng.random_range(4..=8);
        let n = rng.random_range(1..=2);
        let m = rng.random_range(1..=2);
        let p = CostMatrix::from_fn(d, f64::INFINITY, |_, _| rng.random_range(0.0..1.0))
            .map_err(|e| e.to_string())?;
        let r = check_equal_directions(&p, n, m, u64::MAX).map_err(|e| e.to_string())?;
        instances += 1;
        counterexamples += usize::from(!r.holds);
    }
    // physical forward/backward matrices, with and without adjacent leakage
    for i in 0..30 {
        let start = rng.random_range(1530.0..1550.0);
        let len = rng.random_range(5.0..90.0);
        let dwdm = if i % 2 == 0 {
            DwdmParams::narrow_nbf(len)
        } else {
            DwdmParams::wide_nbf(len)
        };
        let l = link(start, start + 11.0, dwdm);
        let d = l.channels().min(8);
        let adjacent = i % 3 != 0;
        let leak = |dir: Direction, c: usize, q: usize| {
            if adjacent {
                l.adjacent_count(dir, c, q).unwrap()
            } else {
                0.0
            }
        };
        let fwd = CostMatrix::from_fn(d, f64::INFINITY, |c, q| {
            l.forward_raman_count(c, q) + leak(Direction::CoPropagating, c, q)
        })
        .map_err(|e| e.to_string())?;
        let bwd = CostMatrix::from_fn(d, f64::INFINITY, |c, q| {
            l.backward_raman_count(c, q) + leak(Direction::CounterPropagating, c, q)
        })
        .map_err(|e| e.to_string())?;
        let n = 1 + i % 2;
        let m = 1 + (i / 2) % 2;
        let r = check_equal_directions_weighted(&fwd, &bwd, n, m, u64::MAX)
            .map_err(|e| e.to_string())?;
        instances += 1;
        counterexamples += usize::from(!r.holds);
    }
    fail_if(
        counterexamples > 0,
        format!("{counterexamples} counterexamples in {instances} instances"),
    )?;
    Ok(format!("{instances} instances, 0 counterexamples"))
}

fn rate_engine_properties() -> Check {
    let qkd = QkdParams::nominal();
    let dwdm = DwdmParams::narrow_nbf(45.0);
    let curve = RateCurve::new(&qkd, &dwdm);
    let p_zero = curve.p_zero().map_err(|e| e.to_string())?;
    let mut violations = 0;
    let mut prev = f64::INFINITY;
    for i in 0..1000 {
        let r = curve
            .rate(1.5 * p_zero * i as f64 / 999.0)
            .map_err(|e| e.to_string())?;
        violations += usize::from(r > prev);
        prev = r;
    }
    fail_if(
        violations > 0,
        format!("{violations} increases in 1000 samples"),
    )?;

    let r0 = curve.rate(0.0).map_err(|e| e.to_string())?;
    let mut worst_trip: f64 = 0.0;
    for frac in [0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95] {
        let p = curve
            .noise_threshold(frac * r0)
            .map_err(|e| e.to_string())?;
        worst_trip = worst_trip.max(rel(curve.rate(p).map_err(|e| e.to_string())?, frac * r0));
    }
    fail_if(
        worst_trip > 1e-6,
        format!("threshold round trip off by {worst_trip:e}"),
    )?;

    let oracle = rel(r0, ZERO_NOISE_RATE_45KM);
    fail_if(
        oracle > 1e-9,
        format!("zero-noise rate {r0} vs {ZERO_NOISE_RATE_45KM}"),
    )?;
    Ok(format!("monotone over 1000 points, round trip {worst_trip:.1e}, R(0) = {r0:.9e} (rel {oracle:.1e})"))
}

fn linear_model() -> Check {
    let qkd = QkdParams::nominal();
    let dwdm = DwdmParams::narrow_nbf(45.0);
    let model = fit_linear_model(&qkd, &dwdm).map_err(|e| e.to_string())?;
    let curve = RateCurve::new(&qkd, &dwdm);
    let mut rng = ChaCha8Rng::seed_from_u64(0xA4);
    let mut worst_identity: f64 = 0.0;
    for _ in 0..5 {
        let y0 = rng.random_range(0.0..0.8 * model.y0_zero);
        let direct = model.line_substituted(y0).map_err(|e| e.to_string())?;
        worst_identity = worst_identity.max(rel(model.per_pulse_at_y0(y0), direct));
    }
    fail_if(
        worst_identity > 1e-12,
        format!("U·Y0+V differs from substitution by {worst_identity:e}"),
    )?;

    let mut worst: f64 = 0.0;
    for i in 0..=2000 {
        let p = 0.8 * model.p_zero * i as f64 / 2000.0;
        let exact = curve.rate(p).map_err(|e| e.to_string())?;
        worst = worst.max((model.rate(p) - exact).abs() / exact);
    }
    fail_if(
        worst > 0.10,
        format!("linear model off by {:.2}%", worst * 100.0),
    )?;
    Ok(format!(
        "identity {worst_identity:.1e}, linear model within {:.2}% on [0, 0.8 p_zero]",
        worst * 100.0
    ))
}

fn interior_quantum_channel() -> Check {
    let l = c_band(DwdmParams::narrow_nbf(45.0));
    let mut rows = Vec::new();
    for n in 3..=8 {
        let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanOnly, 1, n);
        let plan = optimize(&s, &l, &SearchOptions::default()).map_err(|e| e.to_string())?;
        let q = plan.assignment.quantum_u1[0];
        let a = &plan.assignment.classical_a;
        let text = render_pattern(a, &plan.assignment.quantum_u1, l.channels());
        fail_if(
            !(a.iter().any(|&c| c < q) && a.iter().any(|&c| c > q)),
            format!("N={n}: {text}"),
        )?;
        rows.push(text);
    }
    Ok(format!("N=3..8 all interior, e.g. {}", rows[2]))
}

fn distance_invariance() -> Check {
    let opts = SearchOptions::default();
    let mut cases = 0;
    for structure in [Structure::FullDuplex, Structure::DualFiber] {
        for dwdm in [
            DwdmParams::narrow_nbf as fn(f64) -> DwdmParams,
            DwdmParams::wide_nbf,
        ] {
            for m in 1..=3 {
                for n in [1, 3, 5, 8, 12, 16] {
                    let s = ScenarioConfig::new(structure, NoiseMode::RamanOnly, m, n);
                    let plans: Vec<Assignment> = [30.0, 60.0, 90.0]
                        .iter()
                        .map(|&len| optimize(&s, &c_band(dwdm(len)), &opts).map(|p| p.assignment))
                        .collect::<Result<_, _>>()
                        .map_err(|e| e.to_string())?;
                    fail_if(
                        plans[0] != plans[1] || plans[0] != plans[2],
                        format!("{structure:?} M={m} N={n}"),
                    )?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} scenarios identical at 30, 60 and 90 km"))
}

fn dual_fiber_split_optimal() -> Check {
    let opts = SearchOptions::default();
    let mut comparisons = 0;
    for (start, end) in [(1548.0, 1557.7), (1545.0, 1556.5), (1530.0, 1541.5)] {
        for dwdm in [
            DwdmParams::narrow_nbf as fn(f64) -> DwdmParams,
            DwdmParams::wide_nbf,
        ] {
            for len in [20.0, 45.0, 60.0, 70.0] {
                let l = link(start, end, dwdm(len));
                let d = l.channels();
                fail_if(d > 8, format!("grid has {d} channels"))?;
                for mode in [NoiseMode::RamanOnly, NoiseMode::RamanPlusAdjacent] {
                    for m in 1..=4 {
                        for n in 0..=3 {
                            let (k0, rest) = dual_fiber_split(m);
                            if rest + n > d {
                                continue;
                            }
                            let s = ScenarioConfig::new(Structure::DualFiber, mode, m, n);
                            let total = |k| -> Result<f64, String> {
                                Ok(brute_force_rate_split(&s, &l, k, &opts)
                                    .map_err(|e| e.to_string())?
                                    .map_or(f64::NEG_INFINITY, |p| p.total_rate_bps))
                            };
                            let base = total(k0)?;
                            for k in (0..=m).filter(|&k| k != k0 && k.max(m - k) + n <= d) {
                                let other = total(k)?;
                                fail_if(
                                    other > base && rel(other, base) > 1e-12,
                                    format!("D={d} L={len} {mode:?} M={m} N={n}: k={k} gives {other:e} > {base:e}"),
                                )?;
                                comparisons += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{comparisons} split comparisons, 0 violations"))
}

fn adjacent_convergence() -> Check {
    let opts = SearchOptions::default();
    let mut checked = 0;
    for len in [20.0, 45.0] {
        let l = c_band(DwdmParams::wide_nbf(len));
        let d = l.channels();
        let m = 3;
        for n in 8..=d - m {
            let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanPlusAdjacent, m, n);
            let plan = optimize(&s, &l, &opts).map_err(|e| e.to_string())?;
            let a = &plan.assignment;
            let text = render_pattern(&a.classical_a, &a.quantum_u1, d);
            let touching = a
                .quantum_u1
                .iter()
                .filter(|&&q| a.classical_a.iter().any(|&c| c.abs_diff(q) == 1))
                .count();
            if n < d - m {
                fail_if(
                    touching > 0,
                    format!("L={len} N={n}: {text} has {touching} adjacencies"),
                )?;
            }
            if n + 3 > d - m {
                let conv = conventional(&s, &l).map_err(|e| e.to_string())?;
                fail_if(
                    conv.assignment != plan.assignment,
                    format!("L={len} N={n}: {text} is not the two-band layout"),
                )?;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} plans, no adjacencies when avoidable, two-band layout for N=17..19"
    ))
}

fn near_optimal_gap() -> Check {
    let opts = SearchOptions::default();
    let mut instances = 0;
    let mut worst: f64 = 0.0;
    for len in [5.0, 10.0, 20.0] {
        let l = link(1540.0, 1557.7, DwdmParams::narrow_nbf(len));
        fail_if(l.channels() > 12, "grid too large".into())?;
        for (m, n) in [(1, 3), (2, 4), (3, 5), (2, 8), (4, 6), (3, 8), (1, 10)] {
            let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanOnly, m, n);
            let best = brute_force_rate(&s, &l, &opts)
                .map_err(|e| e.to_string())?
                .ok_or("no optimum")?;
            let near = optimize(&s, &l, &opts).map_err(|e| e.to_string())?;
            let gap = (best.total_rate_bps - near.total_rate_bps) / best.total_rate_bps * 100.0;
            worst = worst.max(gap);
            fail_if(gap > 1e-3, format!("L={len} M={m} N={n}: gap {gap:e}%"))?;
            instances += 1;
        }
    }

    // noise-dominated instance: 125 GHz filter, 46 km, 12 channels, N=7
    let l = link(1540.0, 1557.7, DwdmParams::wide_nbf(46.0));
    let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanOnly, 1, 7);
    let cmp = compare_methods(&s, &l, 1..=5, &opts).map_err(|e| e.to_string())?;
    let knee = cmp.knee.ok_or("optimal total never saturates")?;
    let open: Vec<_> = cmp
        .rows
        .iter()
        .filter(|r| r.floor == Floor::Unconstrained)
        .collect();
    let at_knee = open
        .iter()
        .find(|r| r.m == knee)
        .and_then(|r| r.optimal.rate())
        .ok_or("no optimum at the knee")?;
    let mut drops = false;
    for r in &open {
        let (Outcome::Rate(opt), Outcome::Rate(near)) = (r.optimal, r.near_optimal) else {
            return Err(format!("M={}: missing totals", r.m));
        };
        fail_if(
            near < 0.0 || opt < near * (1.0 - 1e-12),
            format!("M={}: optimal {opt:e} < near {near:e}", r.m),
        )?;
        if r.m > knee {
            fail_if(
                rel(opt, at_knee) > 1e-9,
                format!("M={}: optimal moved past the knee", r.m),
            )?;
            drops |= near < opt * (1.0 - 1e-6);
        }
    }
    fail_if(
        knee >= 5 || !drops,
        format!("knee at M={knee} without a near-optimal drop"),
    )?;
    Ok(format!("{instances} instances, worst gap {worst:.3}%; knee at M={knee} with flat optimum and falling near-optimal"))
}

fn optimizer_dominance() -> Check {
    let opts = SearchOptions::default();
    let mut cells = 0;
    let mut undefined = 0;
    let mut n_max_rows = 0;
    for dwdm in [
        DwdmParams::narrow_nbf(45.0),
        DwdmParams::wide_nbf(45.0),
        DwdmParams::narrow_nbf(60.0),
        DwdmParams::wide_nbf(30.0),
    ] {
        let l = c_band(dwdm);
        for structure in [Structure::FullDuplex, Structure::DualFiber] {
            for mode in [NoiseMode::RamanOnly, NoiseMode::RamanPlusAdjacent] {
                let base = ScenarioConfig::new(structure, mode, 1, 0);
                for c in sweep_re(&base, &l, 1..=3, 0..=18, &opts).map_err(|e| e.to_string())? {
                    match c.re_percent {
                        Some(re) => fail_if(
                            re < 0.0,
                            format!("{structure:?} {mode:?} M={} N={}: RE {re:e}", c.m, c.n),
                        )?,
                        None => undefined += 1,
                    }
                    cells += 1;
                }
                for m in 1..=3 {
                    let r = n_max(&base, &l, m, &opts).map_err(|e| e.to_string())?;
                    fail_if(
                        r.proposed < r.conventional,
                        format!(
                            "{structure:?} {mode:?} M={m}: n_max {} < {}",
                            r.proposed, r.conventional
                        ),
                    )?;
                    n_max_rows += 1;
                }
            }
        }
    }
    Ok(format!(
        "{cells} sweep cells ({undefined} undefined), {n_max_rows} n_max rows, 0 violations"
    ))
}

fn main() -> ExitCode {
    let checks: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("equal classical directions", equal_directions),
        ("rate engine", rate_engine_properties),
        ("linear rate model", linear_model),
        ("interior quantum channel", interior_quantum_channel),
        ("distance invariance", distance_invariance),
        ("dual-fiber split", dual_fiber_split_optimal),
        ("adjacent-leakage convergence", adjacent_convergence),
        ("near-optimal gap and knee", near_optimal_gap),
        ("optimizer dominance", optimizer_dominance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
