#![allow(dead_code)]

use num_complex::Complex64;

fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson with Richardson correction; `breaks` split the range first.
pub fn simpson_integral<F: Fn(f64) -> Complex64>(f: F, breaks: &[f64], tol: f64) -> Complex64 {
    let mut edges = breaks.to_vec();
    edges.sort_by(f64::total_cmp);
    edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            let (fa, fm, fb) = (f(a), f(m), f(b));
            let whole = simpson(fa, fm, fb, b - a);
            refine(&f, a, b, fa, fm, fb, whole, tol, 48)
        })
        .sum()
}

/// Gaussian average over ±10Γ_D with extra break points around `poles`.
pub fn doppler_oracle<F: Fn(f64) -> Complex64>(
    f: F,
    gamma_d: f64,
    poles: &[f64],
    tol: f64,
) -> Complex64 {
    let span = 10.0 * gamma_d;
    let norm = 1.0 / (std::f64::consts::PI.sqrt() * gamma_d);
    let mut breaks = vec![-span, 0.0, span];
    for &p in poles {
        for d in [-5.0, -0.5, 0.0, 0.5, 5.0] {
            let x = p + d;
            if x.abs() < span {
                breaks.push(x);
            }
        }
    }
    simpson_integral(
        |w| f(w) * ((-(w / gamma_d).powi(2)).exp() * norm),
        &breaks,
        tol,
    )
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Two-sample-free Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// All-pairs delay histogram: bins [start + kΔ, start + (k+1)Δ).
pub fn brute_histogram(
    triggers: &[f64],
    stops: &[f64],
    start: f64,
    width: f64,
    n: usize,
) -> Vec<u64> {
    let mut counts = vec![0u64; n];
    for &t in triggers {
        for &s in stops {
            let x = (s - t - start) / width;
            let r = x.round();
            let k = if (x - r).abs() < 1e-9 { r } else { x.floor() };
            if k >= 0.0 && (k as usize) < n {
                counts[k as usize] += 1;
            }
        }
    }
    counts
}
