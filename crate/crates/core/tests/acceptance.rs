//! Acceptance criteria, one reported line each. Runs as a plain binary so the
//! lines show up in `cargo test` output; exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, RngExt, SeedableRng};

use ringphase::geomphase::{
    circle_distance, geometric_phase, global_phase_limit, phase_converged, state_path, sweep,
    ContourSpec, SweepRow,
};
use ringphase::spectrum::{
    continue_state, enumerate_states, find_root, sorted_free_roots, spectral_residual,
    ContinuationOptions, SystemConfig,
};
use ringphase::tmatrix::{make_defect, DefectParams};
use ringphase::wavefun::{amplitudes, build_state, inner_product, inner_product_quadrature, Wavefunction};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn reference_system() -> SystemConfig {
    SystemConfig::new(0.1, 5.0, 2.0, 0.0).unwrap()
}

/// `|u|² − |v|² − 1` with every product split exactly and the terms
/// accumulated in double-double, so the result is free of rounding at the
/// 1e-12 level even when |u|² is in the thousands.
fn defect_double_double(u: (f64, f64), v: (f64, f64)) -> f64 {
    let mut terms = Vec::with_capacity(9);
    for (x, sign) in [(u.0, 1.0), (u.1, 1.0), (v.0, -1.0), (v.1, -1.0)] {
        let hi = x * x;
        let lo = x.mul_add(x, -hi);
        terms.push(sign * hi);
        terms.push(sign * lo);
    }
    terms.push(-1.0);
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for t in terms {
        let s = hi + t;
        let bp = s - hi;
        lo += (hi - (s - bp)) + (t - bp);
        hi = s;
    }
    (hi + lo).abs()
}

fn group_invariant() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let eta = 5.0 * rng.random::<f64>();
        let alpha = TAU * rng.random::<f64>();
        let m = make_defect(DefectParams::new(eta, alpha).unwrap()).unwrap();
        worst = worst.max(defect_double_double((m.u.re, m.u.im), (m.v.re, m.v.im)));
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-12 && within(t, 1.0),
        format!("max ||u|^2-|v|^2-1| = {worst:.2e}, {:.2}s", t.as_secs_f64()),
    )
}

fn free_limit_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for eta in [0.5, 2.0, 4.0] {
        for alpha in [0.0, 1.0, 3.0] {
            let cfg = SystemConfig::new(0.0, 5.0, eta, alpha).unwrap();
            let a0 = (1.0 / f64::cosh(eta)).acos();
            // closed form written out independently of the library
            let mut exact: Vec<f64> = (-2..6)
                .flat_map(|n| [alpha + a0 + TAU * n as f64, alpha - a0 + TAU * n as f64])
                .map(|x| x / 5.0)
                .filter(|&k| k > 0.0)
                .collect();
            exact.sort_by(f64::total_cmp);
            let roots = sorted_free_roots(eta, alpha, 5.0, 6).unwrap();
            for i in 1..5 {
                for j in 1..5 {
                    let gap = |n: usize| (exact[n + 1] - exact[n]).min(exact[n] - exact[n - 1]);
                    let seed = (exact[i] + 0.3 * gap(i), exact[j] - 0.3 * gap(j));
                    let p = match find_root(seed.0, seed.1, &cfg, 1e-10) {
                        Ok(p) => p,
                        Err(e) => return outcome(false, format!("Newton failed at eta={eta} alpha={alpha}: {e}")),
                    };
                    worst = worst
                        .max((p.k1 - exact[i]).abs())
                        .max((p.k2 - exact[j]).abs())
                        .max((roots[i] - exact[i]).abs());
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-10 && within(t, 5.0),
        format!("max deviation {worst:.2e}, {:.2}s", t.as_secs_f64()),
    )
}

fn formulation_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = reference_system();
    let states = enumerate_states(&cfg, 8).unwrap();
    let mut worst_residual = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut weakest_off = f64::INFINITY;
    let mut weakest_off_residual = f64::INFINITY;
    for p in states.values().take(50) {
        let (f1, f2) = spectral_residual(p.k1, p.k2, &cfg).unwrap();
        worst_residual = worst_residual.max(f1.abs().max(f2.abs()));
        worst_ratio = worst_ratio.max(amplitudes(p.k1, p.k2, &cfg).unwrap().consistency_residual);
        for (d1, d2) in [(0.05, 0.0), (0.0, 0.05)] {
            let (g1, g2) = spectral_residual(p.k1 + d1, p.k2 + d2, &cfg).unwrap();
            weakest_off_residual = weakest_off_residual.min(g1.abs().max(g2.abs()));
            weakest_off = weakest_off.min(amplitudes(p.k1 + d1, p.k2 + d2, &cfg).unwrap().consistency_residual);
        }
    }
    let t = start.elapsed();
    outcome(
        worst_residual < 1e-10 && worst_ratio < 1e-8 && weakest_off > 1e-4 && weakest_off_residual > 1e-10 && within(t, 30.0),
        format!(
            "roots: residual {worst_residual:.1e}, sigma ratio {worst_ratio:.1e}; perturbed: residual >= {weakest_off_residual:.1e}, sigma ratio >= {weakest_off:.1e}; {:.2}s",
            t.as_secs_f64()
        ),
    )
}

// Draws whose root leaves the positive quadrant during continuation are
// skipped; the count is returned alongside.
fn random_states(n: usize, seed: u64) -> (Vec<Wavefunction>, usize) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut skipped = 0;
    while out.len() < n {
        let eta = 0.2 + 3.0 * rng.random::<f64>();
        let alpha = TAU * rng.random::<f64>();
        let c = 5.0 * rng.random::<f64>();
        let i = 1 + (rng.random::<f64>() * 4.0) as usize;
        let j = 1 + (rng.random::<f64>() * 4.0) as usize;
        let cfg = SystemConfig::new(c, 5.0, eta, alpha).unwrap();
        match continue_state(i, j, &cfg, &ContinuationOptions::default()).and_then(|p| build_state(&p, &cfg)) {
            Ok(w) => out.push(w),
            Err(_) => skipped += 1,
        }
    }
    (out, skipped)
}

fn integral_oracle() -> Outcome {
    let start = Instant::now();
    let (states, skipped) = random_states(50, 4);
    let mut worst = 0.0f64;
    for (n, a) in states.iter().enumerate() {
        let b = &states[(n + 1) % states.len()];
        for (x, y) in [(a, a), (a, b)] {
            let exact = inner_product(x, y).unwrap();
            let quad = match inner_product_quadrature(x, y, 64) {
                Ok(q) => q,
                Err(e) => return outcome(false, format!("quadrature: {e}")),
            };
            worst = worst.max((exact - quad).norm() / exact.norm().max(1.0));
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-8 && within(t, 60.0),
        format!(
            "max relative difference {worst:.2e} over {} states ({skipped} draws left the quadrant), {:.2}s",
            states.len(),
            t.as_secs_f64()
        ),
    )
}

fn gauge_invariance() -> Outcome {
    let start = Instant::now();
    let path = state_path(&ContourSpec::new((1, 3), 2.0, 0.1, 5.0)).unwrap();
    let base = geometric_phase(&path).unwrap().theta_g;
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let shifted: Vec<Wavefunction> = path.iter().map(|w| w.rephased(TAU * rng.random::<f64>())).collect();
        worst = worst.max(circle_distance(geometric_phase(&shifted).unwrap().theta_g, base));
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-12 && within(t, 30.0),
        format!("max change {worst:.2e} over 100 trials, {:.2}s", t.as_secs_f64()),
    )
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for c in [0.0, 0.1, 1.0, 10.0] {
        let spec = ContourSpec::new((1, 3), 2.0, c, 5.0);
        let coarse = geometric_phase(&state_path(&spec.with_steps(256)).unwrap()).unwrap().theta_g;
        let fine = geometric_phase(&state_path(&spec.with_steps(512)).unwrap()).unwrap().theta_g;
        // θ lives on the circle; 0 and 2π are the same phase
        let d = circle_distance(coarse, fine);
        worst = worst.max(d);
        parts.push(format!("c={c}: {d:.1e}"));
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-4 && within(t, 300.0),
        format!("{}; {:.1}s", parts.join(", "), t.as_secs_f64()),
    )
}

fn cycle_mapping() -> Outcome {
    let start = Instant::now();
    let path = state_path(&ContourSpec::new((1, 3), 2.0, 0.1, 5.0)).unwrap();
    let end = *path.last().unwrap().point();
    let target = continue_state(3, 5, &reference_system(), &ContinuationOptions::default()).unwrap();
    let d = (end.k1 - target.k1).abs().max((end.k2 - target.k2).abs());
    let t = start.elapsed();
    outcome(
        d < 1e-8 && within(t, 10.0),
        format!(
            "end ({:.8}, {:.8}) vs (3,5) ({:.8}, {:.8}), distance {d:.1e}, {:.2}s",
            end.k1, end.k2, target.k1, target.k2, t.as_secs_f64()
        ),
    )
}

fn zero_phase_states() -> Outcome {
    let start = Instant::now();
    let r = phase_converged(&ContourSpec::new((1, 1), 2.0, 0.1, 5.0)).unwrap();
    let d = circle_distance(r.theta_g, 0.0);
    let t = start.elapsed();
    outcome(
        d < 0.02 && within(t, 60.0),
        format!("theta_g = {:.5} (distance from 0 on the circle {d:.4}), {:.2}s", r.theta_g, t.as_secs_f64()),
    )
}

/// θ along increasing c, continued so that it has no artificial 2π jumps;
/// the first value is taken in (−π, π].
fn unwrapped(rows: &[&SweepRow]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(rows.len());
    for r in rows {
        let v = match out.last() {
            None => {
                if r.theta_g > PI {
                    r.theta_g - TAU
                } else {
                    r.theta_g
                }
            }
            Some(&prev) => prev + (r.theta_g - prev + PI).rem_euclid(TAU) - PI,
        };
        out.push(v);
    }
    out
}

fn monotonicity(rows: &[SweepRow], etas: &[f64], elapsed: Duration) -> Outcome {
    let failed = rows.iter().filter(|r| !r.ok()).count();
    let mut worst_drop = 0.0f64;
    let mut parts = Vec::new();
    for &eta in etas {
        let line: Vec<&SweepRow> = rows.iter().filter(|r| r.eta == eta && r.ok()).collect();
        let theta = unwrapped(&line);
        let mut drop = 0.0f64;
        let mut running_max = f64::NEG_INFINITY;
        for &v in &theta {
            running_max = running_max.max(v);
            drop = drop.max(running_max - v);
        }
        worst_drop = worst_drop.max(drop);
        let lo = theta.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        parts.push(format!("eta={eta}: largest decrease {drop:.3}, range [{lo:.3}, {hi:.3}]"));
    }
    outcome(
        worst_drop <= 0.02 && failed == 0 && within(elapsed, 600.0),
        format!("{}; {failed} failed cells; sweep {:.0}s", parts.join("; "), elapsed.as_secs_f64()),
    )
}

fn asymptotes(rows: &[SweepRow], small: &SweepRow) -> Outcome {
    let large = rows.iter().find(|r| r.eta == 3.0 && r.c == 30.0).unwrap();
    let d_large = circle_distance(large.theta_g, PI);
    let d_small = circle_distance(small.theta_g, PI / 2.0);
    outcome(
        large.ok() && small.ok() && d_large < 0.15 && d_small < 0.15,
        format!(
            "(eta=3, c=30): theta_g = {:.4}, {d_large:.3} from pi; (eta=0.25, c=0.01): theta_g = {:.4}, {d_small:.3} from pi/2",
            large.theta_g, small.theta_g
        ),
    )
}

fn large_barrier_reference() -> Outcome {
    let start = Instant::now();
    let r = geometric_phase(&state_path(&ContourSpec::new((1, 3), 4.0, 0.0, 5.0)).unwrap()).unwrap();
    let reference = global_phase_limit(4.0).unwrap();
    let d = circle_distance(r.global_term, reference);
    let t = start.elapsed();
    outcome(
        d < 0.05 && within(t, 60.0),
        format!("global term {:.5} vs {reference:.5}, difference {d:.4}, {:.2}s", r.global_term, t.as_secs_f64()),
    )
}

// Not a numbered criterion: the free-limit global term should follow the
// large-barrier reference for every eta >= 3.
fn free_limit_global_term() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for eta in [3.0, 4.0, 5.0] {
        let r = geometric_phase(&state_path(&ContourSpec::new((1, 3), eta, 0.0, 5.0)).unwrap()).unwrap();
        let reference = global_phase_limit(eta).unwrap();
        let d = circle_distance(r.global_term, reference);
        passed &= d < 0.05;
        parts.push(format!("eta={eta}: {:.5} vs {reference:.5}", r.global_term));
    }
    outcome(passed, parts.join("; "))
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ringphase");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let path = dir.path().join(format!("sweep_{threads}.csv"));
        let status = Command::new(exe)
            .args(["sweep", "--etas", "0.5,2", "--c-grid", "0,0.5,3,12", "--steps", "64", "--threads", threads])
            .arg("--out")
            .arg(&path)
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("sweep with {threads} threads exited with {status}"));
        }
        outputs.push(std::fs::read(&path).unwrap());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("1, 3 and 8 threads: {} bytes each, identical = {same}", outputs[0].len()))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "group invariant", group_invariant()),
        (2, "free-limit oracle", free_limit_oracle()),
        (3, "formulation equivalence", formulation_equivalence()),
        (4, "integral oracle", integral_oracle()),
        (5, "gauge invariance", gauge_invariance()),
        (6, "convergence", convergence()),
        (7, "cycle mapping", cycle_mapping()),
        (8, "zero-phase states", zero_phase_states()),
    ];

    let etas = [0.5, 1.0, 2.0, 3.0];
    let c_grid: Vec<f64> = (0..61).map(|n| 30.0 * n as f64 / 60.0).collect();
    let start = Instant::now();
    let rows = sweep((1, 3), &etas, &c_grid, 5.0, 256).unwrap();
    let small = sweep((1, 3), &[0.25], &[0.01], 5.0, 256).unwrap().remove(0);
    let elapsed = start.elapsed();
    results.push((9, "monotonicity", monotonicity(&rows, &etas, elapsed)));
    results.push((10, "asymptotes", asymptotes(&rows, &small)));
    results.push((11, "large-barrier global term", large_barrier_reference()));
    results.push((12, "determinism", determinism()));

    println!();
    for (n, name, o) in &results {
        println!("[{}] criterion {n:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    let invariant = free_limit_global_term();
    println!(
        "[{}] invariant free-limit global term for eta >= 3: {}",
        if invariant.passed { "PASS" } else { "FAIL" },
        invariant.detail
    );
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "\nacceptance: {} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
    }
    if !failed.is_empty() || !invariant.passed {
        std::process::exit(1);
    }
}
