//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

mod common;

use common::{rel_close, rng};
use num_complex::Complex64;
use rand::Rng;
use std::time::Instant;
use szlab::cyclic::root_of_unity;
use szlab::fourier::{roth_iterate, strong_decompose};
use szlab::generators::{generate_set, GeneratorSpec};
use szlab::gowers::{self, ap3_spectral, ap_form, u2, u3, verify_gvn, CountMethod};
use szlab::graph::{
    cayley_3hypergraph, cayley_tripartite, strong_regularize, triangle_count, triangle_removal,
    EdgeFunction,
};
use szlab::primes::{mangoldt_weights, prime_ap_average_with};
use szlab::{CyclicFunction, GrowthFunction};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn phase(n: usize, p: impl Fn(u128) -> u128) -> CyclicFunction {
    CyclicFunction::from_fn(n, |x| root_of_unity((p(x as u128) % n as u128) as i128, n)).unwrap()
}

fn gauss_u2() -> Outcome {
    let mut worst = 0.0f64;
    for n in [101usize, 1009, 10007] {
        let t = Instant::now();
        let v = u2(&phase(n, |x| x * x));
        let secs = t.elapsed().as_secs_f64();
        let want = (n as f64).powf(-0.25);
        worst = worst.max((v - want).abs() / want);
        ensure(rel_close(v, want, 1e-6), || format!("N={n}: {v} vs {want}"))?;
        ensure(secs < 1.0, || format!("N={n} took {secs:.2}s"))?;
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn quadratic_u3() -> Outcome {
    let mut report = Vec::new();
    for n in [101usize, 1009, 10007] {
        let t = Instant::now();
        let v = u3(&phase(n, |x| x * x));
        let secs = t.elapsed().as_secs_f64();
        ensure((v - 1.0).abs() <= 1e-9, || format!("N={n}: u3 = {v}"))?;
        if n == 10007 {
            ensure(secs < 30.0, || format!("N=10007 took {secs:.1}s"))?;
            report.push(format!("N=10007 in {secs:.1}s"));
        }
    }
    Ok(report.join(", "))
}

fn cubic_u3() -> Outcome {
    let closed = |n: usize| ((1.0 / n as f64) * (1.0 + (n as f64 - 1.0) / n as f64)).powf(0.125);
    let f61 = phase(61, |x| x * x * x);
    let oracle = common::u3_eighth(f61.values()).powf(0.125);
    ensure(rel_close(oracle, closed(61), 1e-9), || {
        format!("closed form {} vs octuple sum {oracle}", closed(61))
    })?;
    let mut worst = 0.0f64;
    for n in [61usize, 1009, 10007] {
        let v = u3(&phase(n, |x| x * x * x));
        worst = worst.max((v - closed(n)).abs() / closed(n));
        ensure(rel_close(v, closed(n), 1e-6), || {
            format!("N={n}: {v} vs {}", closed(n))
        })?;
    }
    Ok(format!(
        "closed form confirmed by octuple sum at N=61; max relative error {worst:.1e}"
    ))
}

fn u2_identity() -> Outcome {
    let t = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = CyclicFunction::new(common::random_bounded(&mut r, 512)).unwrap();
        let d = gowers::u2_fourth_power_direct(&f).powf(0.25);
        let s = gowers::u2_fourth_power_spectral(&f).powf(0.25);
        worst = worst.max((d - s).abs() / s);
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(worst <= 1e-8, || format!("relative gap {worst:e}"))?;
    ensure(secs < 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("max relative gap {worst:.1e} in {secs:.2}s"))
}

fn gvn_suites() -> Outcome {
    let mut r = rng(5);
    let mut mk = || CyclicFunction::new(common::random_bounded(&mut r, 64)).unwrap();
    let mut slack = f64::INFINITY;
    for _ in 0..200 {
        let (a, b, c) = (mk(), mk(), mk());
        let g = verify_gvn(3, &[&a, &b, &c]).map_err(|e| e.to_string())?;
        slack = slack.min(g.rhs - g.lhs);
    }
    for _ in 0..100 {
        let (a, b, c, d) = (mk(), mk(), mk(), mk());
        let g = verify_gvn(4, &[&a, &b, &c, &d]).map_err(|e| e.to_string())?;
        slack = slack.min(g.rhs - g.lhs);
    }
    ensure(slack >= -1e-9, || format!("minimum slack {slack:e}"))?;
    let f = phase(64, |x| x * x);
    let cube = |g: &CyclicFunction| g.pointwise_mul(g).unwrap().pointwise_mul(g).unwrap();
    let fb = f.conjugate();
    let ops = [f.clone(), cube(&fb), cube(&f), fb];
    let refs: Vec<&CyclicFunction> = ops.iter().collect();
    let l4 = ap_form(4, &refs, CountMethod::Naive).unwrap().value;
    ensure((l4 - Complex64::new(1.0, 0.0)).norm() <= 1e-9, || {
        format!("Lambda_4 = {l4}")
    })?;
    Ok(format!(
        "minimum slack {slack:.3e}; Lambda_4 = {:.12}",
        l4.re
    ))
}

fn strong_fourier() -> Outcome {
    let t = Instant::now();
    let n = 4096usize;
    let mut inputs = Vec::new();
    for seed in 0..10u64 {
        let mut r = rng(600 + seed);
        let set: Vec<u64> = (0..n as u64).filter(|_| r.gen::<bool>()).collect();
        inputs.push(CyclicFunction::indicator(n, set).unwrap());
    }
    let specs = [
        "linear_quasi:alpha=1.4142135623730951,delta=0.3",
        "linear_quasi:alpha=1.7320508075688772,delta=0.5",
        "linear_quasi:alpha=0.6180339887498949,delta=0.2",
        "linear_quasi:alpha=2.718281828459045,delta=0.4",
        "quadratic_quasi:alpha=1.4142135623730951,delta=0.3",
        "quadratic_quasi:alpha=1.7320508075688772,delta=0.5",
        "quadratic_quasi:alpha=0.6180339887498949,delta=0.25",
        "bracket_quadratic:delta=0.3",
        "bracket_quadratic:delta=0.5",
        "linear_quasi:alpha=3.141592653589793,delta=0.1",
    ];
    for s in specs {
        let set = generate_set(&s.parse::<GeneratorSpec>().unwrap(), n as u64).unwrap();
        inputs.push(CyclicFunction::indicator(n, set.iter().map(|&x| x % n as u64)).unwrap());
    }
    let mut max_t = 0;
    let mut degenerate = 0;
    for (i, f) in inputs.iter().enumerate() {
        let d = strong_decompose(f, 0.1, GrowthFunction::Exp(2))
            .map_err(|e| format!("input {i}: {e}"))?;
        let sum = d
            .structured
            .add(&d.small)
            .unwrap()
            .add(&d.pseudorandom)
            .unwrap();
        let reassembly = sum.sub(f).unwrap().l2_norm();
        let lo = d
            .structured
            .values()
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min);
        let hi = d
            .structured
            .values()
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let mean_gap = (d.structured.mean().re - f.mean().re).abs();
        let fs = d.small.l2_norm();
        let fu = u2(&d.pseudorandom);
        let bound = 4.0 / 2f64.powf(d.complexity as f64);
        ensure(reassembly <= 1e-9, || {
            format!("input {i}: reassembly {reassembly:e}")
        })?;
        ensure(lo >= -1e-9 && hi <= 1.0 + 1e-9, || {
            format!("input {i}: structured range [{lo}, {hi}]")
        })?;
        ensure(mean_gap <= 1e-9, || {
            format!("input {i}: mean moved by {mean_gap:e}")
        })?;
        ensure(fs <= 0.4, || format!("input {i}: |f_S| = {fs}"))?;
        ensure(fu <= bound, || {
            format!("input {i}: |f_U|_U2 = {fu} > 4/F(T) = {bound}")
        })?;
        max_t = max_t.max(d.complexity);
        degenerate += (fu == 0.0) as usize;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "20 inputs, max T = {max_t}, {degenerate} with f_U = 0, {secs:.1}s"
    ))
}

fn roth() -> Outcome {
    let l = 10_000u64;
    let eta = 0.1;
    let mut sets = vec![(
        "quasiperiodic".to_string(),
        generate_set(
            &"linear_quasi:alpha=1.4142135623730951,delta=0.3"
                .parse()
                .unwrap(),
            l,
        )
        .unwrap(),
    )];
    for seed in 0..20 {
        let spec: GeneratorSpec = format!("random:delta=0.3,seed={seed}").parse().unwrap();
        sets.push((
            format!("random seed {seed}"),
            generate_set(&spec, l).unwrap(),
        ));
    }
    let mut increments = Vec::new();
    for (name, set) in &sets {
        let delta = set.len() as f64 / l as f64;
        let out = roth_iterate(set, l, delta, eta).map_err(|e| format!("{name}: {e}"))?;
        ensure(out.iterations.len() as u64 <= out.iteration_cap, || {
            format!("{name}: over the cap")
        })?;
        ensure(out.actual_count as f64 >= out.ap3_count_lower_bound, || {
            format!(
                "{name}: count {} < bound {}",
                out.actual_count, out.ap3_count_lower_bound
            )
        })?;
        increments.push(out.iterations.len());
    }
    ensure(increments[0] >= 1, || {
        "quasiperiodic set needed no increment".into()
    })?;
    Ok(format!(
        "{} runs, eta = {eta}; increments: quasiperiodic {}, random max {}",
        sets.len(),
        increments[0],
        increments[1..].iter().max().unwrap()
    ))
}

fn cayley() -> Outcome {
    let mut r = rng(8);
    for _ in 0..50 {
        let n = r.gen_range(1..=60);
        let a: Vec<u64> = (0..n as u64).filter(|_| r.gen::<f64>() < 0.35).collect();
        let members: Vec<bool> = (0..n as u64).map(|x| a.contains(&x)).collect();
        let g = cayley_tripartite(&a, n).map_err(|e| e.to_string())?;
        let want = n as u64 * common::ap_pairs(&members, 3);
        ensure(
            g.triangle_count == want && triangle_count(&g.graph) == want,
            || format!("N={n}: {} triangles vs {want}", g.triangle_count),
        )?;
    }
    for _ in 0..50 {
        let n = r.gen_range(1..=20);
        let a: Vec<u64> = (0..n as u64).filter(|_| r.gen::<f64>() < 0.5).collect();
        let members: Vec<bool> = (0..n as u64).map(|x| a.contains(&x)).collect();
        let h = cayley_3hypergraph(&a, n).map_err(|e| e.to_string())?;
        let want = (n * n) as u64 * common::ap_pairs(&members, 4);
        ensure(h.tetrahedron_count == want, || {
            format!("N={n}: {} tetrahedra vs {want}", h.tetrahedron_count)
        })?;
    }
    Ok("50 graphs (N <= 60) and 50 hypergraphs (N <= 20) match exactly".into())
}

fn removal() -> Outcome {
    let t = Instant::now();
    let delta = 0.1;
    let mut r = rng(9);
    let bipartite =
        EdgeFunction::from_fn(300, |x, y| ((x < 150) != (y < 150)) as u8 as f64).unwrap();
    let mut edges = Vec::new();
    for u in 0..300 {
        for v in u + 1..300 {
            if (u % 2 != v % 2) && r.gen::<f64>() < 0.3 {
                edges.push((u, v));
            }
        }
    }
    let random_bipartite = EdgeFunction::from_edges(300, edges).unwrap();
    let blowup = EdgeFunction::from_fn(200, |x, y| {
        let d = (x % 5 + 5 - y % 5) % 5;
        (d == 1 || d == 4) as u8 as f64
    })
    .unwrap();
    let mut max_c = 0.0f64;
    for (name, g) in [
        ("K150,150", &bipartite),
        ("random bipartite", &random_bipartite),
        ("C5 blow-up", &blowup),
    ] {
        let v = g.vertex_count();
        ensure(common::triangles(g.values(), v) == 0, || {
            format!("{name} is not triangle-free")
        })?;
        let (out, rep) = triangle_removal(g, delta, 1).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            out.values().iter().zip(g.values()).all(|(a, b)| a <= b),
            || format!("{name}: edge added"),
        )?;
        ensure(common::triangles(out.values(), v) == 0, || {
            format!("{name}: output has triangles")
        })?;
        let limit = rep.c_measured * delta * (v * v) as f64 / 9.0;
        ensure(
            rep.edges_removed as f64 <= limit + 1e-9 && rep.c_measured <= 300.0,
            || {
                format!(
                    "{name}: removed {} with C = {}",
                    rep.edges_removed, rep.c_measured
                )
            },
        )?;
        max_c = max_c.max(rep.c_measured);
    }
    let k = EdgeFunction::from_fn(30, |x, y| (x != y) as u8 as f64).unwrap();
    let (_, rep) = triangle_removal(&k, delta, 1).map_err(|e| e.to_string())?;
    ensure(rep.triangles_before == 4060, || {
        format!("complete graph counted {}", rep.triangles_before)
    })?;
    ensure(rep.triangle_density >= rep.claimed_density, || {
        format!(
            "density {} < c(delta) {}",
            rep.triangle_density, rep.claimed_density
        )
    })?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.0}s"))?;
    Ok(format!(
        "max C = {max_c:.3}; K30 keeps {} triangles, density {:.3} >= c = {:.3e} (T = {}); {secs:.1}s",
        rep.triangles_after, rep.triangle_density, rep.claimed_density, rep.complexity
    ))
}

fn graph_strong() -> Outcome {
    let n = 128;
    let mut r = rng(10);
    let dens = [[0.8, 0.2], [0.2, 0.6]];
    let planted = EdgeFunction::from_fn(n, |x, y| {
        let p = dens[x * 2 / n][y * 2 / n];
        (r.gen::<f64>() < p) as u8 as f64
    })
    .unwrap();
    let random = EdgeFunction::from_fn(n, |_, _| (r.gen::<f64>() < 0.5) as u8 as f64).unwrap();
    let mut summary = Vec::new();
    for (name, f) in [("planted", &planted), ("random", &random)] {
        let d = strong_regularize(f, 0.2, GrowthFunction::Shift(4), 3)
            .map_err(|e| format!("{name}: {e}"))?;
        let fu = szlab::graph::box2_norm(&d.pseudorandom);
        let bound = 4.0 / (d.complexity as f64 + 4.0);
        ensure(fu <= bound + 1e-12, || {
            format!("{name}: box norm {fu} > {bound}")
        })?;
        ensure(d.small.l2_norm() <= 0.8 + 1e-12, || {
            format!("{name}: |f_S| = {}", d.small.l2_norm())
        })?;
        let sum = d
            .structured
            .add(&d.small)
            .unwrap()
            .add(&d.pseudorandom)
            .unwrap();
        ensure(sum.sub(f).unwrap().max_abs() <= 1e-9, || {
            format!("{name}: reassembly")
        })?;
        ensure(d.checks.iter().all(|c| c.pass), || {
            format!("{name}: ledger failure")
        })?;
        let worst = d
            .energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        ensure(worst >= -1e-9, || {
            format!("{name}: energy drops by {worst:e}")
        })?;
        summary.push(format!(
            "{name} T={} cells={}",
            d.complexity,
            d.partition.cell_count()
        ));
    }
    Ok(summary.join("; "))
}

fn primes() -> Outcome {
    let m = mangoldt_weights(100_000, 11, 1).map_err(|e| e.to_string())?;
    ensure(m.modulus == 210, || format!("W = {}", m.modulus))?;
    ensure((m.mean - 1.0).abs() <= 0.05, || format!("mean {}", m.mean))?;
    let naive =
        prime_ap_average_with(3, 1000, 7, 1, CountMethod::Naive).map_err(|e| e.to_string())?;
    let spectral =
        prime_ap_average_with(3, 1000, 7, 1, CountMethod::Spectral).map_err(|e| e.to_string())?;
    ensure(rel_close(spectral.average, naive.average, 1e-6), || {
        format!("spectral {} vs naive {}", spectral.average, naive.average)
    })?;
    let t3 = Instant::now();
    let big = prime_ap_average_with(3, 100_000, 7, 1, CountMethod::Spectral)
        .map_err(|e| e.to_string())?;
    let secs3 = t3.elapsed().as_secs_f64();
    ensure((0.7..=1.3).contains(&big.average), || {
        format!("k=3 average {}", big.average)
    })?;
    ensure(secs3 < 120.0, || format!("k=3 average took {secs3:.1}s"))?;
    let mut trend = Vec::new();
    for n in [10_000u64, 100_000, 1_000_000] {
        let tn = Instant::now();
        let w = mangoldt_weights(n, 11, 1).map_err(|e| e.to_string())?;
        let secs = tn.elapsed().as_secs_f64();
        ensure(secs < 180.0, || format!("mean at N={n} took {secs:.1}s"))?;
        trend.push((n, w.mean));
    }
    let gaps: Vec<String> = trend
        .iter()
        .map(|(n, m)| format!("N={n}: {m:.4}"))
        .collect();
    Ok(format!(
        "k=3 average at N=1e5 = {:.4}; means {}",
        big.average,
        gaps.join(", ")
    ))
}

fn performance() -> Outcome {
    let mut r = rng(12);
    let n = 1 << 20;
    let signs: Vec<f64> = common::random_signs(&mut r, n);
    let f = CyclicFunction::from_real(&signs).unwrap();
    let t = Instant::now();
    let v = ap3_spectral(&f, &f, &f);
    let secs = t.elapsed().as_secs_f64();
    ensure(v.re.is_finite(), || "non-finite value".into())?;
    ensure(secs < 5.0, || format!("N=2^20 took {secs:.2}s"))?;
    let small = CyclicFunction::from_real(&common::random_signs(&mut r, 1000)).unwrap();
    let spectral = ap3_spectral(&small, &small, &small);
    let oracle = common::ap_form(&[small.values(), small.values(), small.values()]);
    ensure((spectral - oracle).norm() <= 1e-9, || {
        format!("spectral {spectral} vs naive {oracle}")
    })?;
    Ok(format!(
        "N=2^20 in {secs:.3}s; |spectral - naive| = {:.1e} at N=1000",
        (spectral - oracle).norm()
    ))
}

fn determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &["norms", "--gen", "random:delta=0.5", "--N", "300"],
        &["decompose", "--gen", "random:delta=0.5", "--N", "512"],
        &["roth", "--gen", "random:delta=0.3", "--L", "2000"],
        &[
            "regularity",
            "--gen",
            "random:delta=0.3",
            "--N",
            "12",
            "--cayley",
            "--mode",
            "strong",
        ],
        &[
            "regularity",
            "--gen",
            "random:delta=0.3",
            "--N",
            "12",
            "--cayley",
            "--delta",
            "0.2",
        ],
        &["primes", "--N", "3000", "--w", "7", "--bias"],
    ];
    for run in runs {
        let mut outs = Vec::new();
        for threads in ["1", "2", "1"] {
            let mut args: Vec<std::ffi::OsString> = [
                "szlab",
                "--no-timings",
                "--seed",
                "42",
                "--threads",
                threads,
            ]
            .iter()
            .map(Into::into)
            .collect();
            args.extend(run.iter().map(Into::into));
            let mut buf = Vec::new();
            let code = szlab::cli::main_with_args(args, &mut buf);
            ensure(code == 0, || {
                format!("{run:?} exited {code}: {}", String::from_utf8_lossy(&buf))
            })?;
            outs.push(buf);
        }
        ensure(outs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{run:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} subcommand runs byte-identical across repeats and thread counts",
        runs.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("Gauss-phase U2 law", gauss_u2),
        ("quadratic-phase U3 = 1", quadratic_u3),
        ("cubic-phase U3 closed form", cubic_u3),
        ("U2 direct = spectral", u2_identity),
        ("generalized von Neumann suites", gvn_suites),
        ("strong Fourier decomposition contract", strong_fourier),
        ("Roth density-increment pipeline", roth),
        ("triangle / AP correspondence", cayley),
        ("triangle removal contract", removal),
        ("graph strong regularity", graph_strong),
        ("primes", primes),
        ("spectral 3-AP performance", performance),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
