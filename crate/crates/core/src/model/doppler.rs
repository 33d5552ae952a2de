//! Gaussian velocity average by Gauss–Hermite quadrature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::{ModelError, SourceParams};

/// Smallest rule tried by [`doppler_average`].
pub const MIN_NODES: usize = 32;
/// Largest rule tried before giving up.
pub const MAX_NODES: usize = 4096;
/// Agreement required between successive doublings.
pub const TOLERANCE: f64 = 1e-9;

/// Nodes and weights for ∫ f(x) e^{−x²} dx.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch: eigenvalues of the Jacobi matrix, weights from the first
    /// eigenvector components. Only the first row of the eigenvector matrix is
    /// tracked, so the cost is O(n²).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let mut d = vec![0.0; n];
        let mut e: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        e[n - 1] = 0.0;
        let mut z = vec![0.0; n];
        z[0] = 1.0;
        tql_first_row(&mut d, &mut e, &mut z);

        let mu0 = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = d
            .into_iter()
            .zip(z)
            .map(|(x, v)| (x, mu0 * v * v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // The rule is symmetric; enforce it exactly.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    /// Cached rule of size `n`.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(Self::new(n));
        cache
            .lock()
            .expect("rule cache poisoned")
            .insert(n, rule.clone());
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (diagonal `d`, off-diagonal
/// `e[i]` between rows i and i+1), applying the rotations to one row `z`.
fn tql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

fn apply_rule<F>(rule: &GaussHermite, gamma_d: f64, f: &F) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(gamma_d * x);
        sum += v * w;
        scale += w * v.norm();
    }
    let norm = std::f64::consts::PI.sqrt().recip();
    (sum * norm, scale * norm)
}

/// ∫dω_D e^{−ω_D²/Γ_D²}/(√π Γ_D) f(ω_D), with ω_D in units of Γ.
///
/// The rule is doubled from [`MIN_NODES`] until two successive estimates agree to
/// [`TOLERANCE`], relative to the larger of the result and the mean of |f|.
pub fn doppler_average<F>(integrand: F, params: &SourceParams) -> Result<Complex64, ModelError>
where
    F: Fn(f64) -> Complex64,
{
    let gamma_d = params.gamma_doppler;
    let (mut previous, _) = apply_rule(&GaussHermite::cached(MIN_NODES), gamma_d, &integrand);
    let mut n = 2 * MIN_NODES;
    while n <= MAX_NODES {
        let (current, scale) = apply_rule(&GaussHermite::cached(n), gamma_d, &integrand);
        if !current.re.is_finite() || !current.im.is_finite() {
            return Err(ModelError::QuadratureFailure {
                previous,
                last: current,
                nodes: n,
            });
        }
        if (current - previous).norm() <= TOLERANCE * current.norm().max(scale) {
            return Ok(current);
        }
        previous = current;
        n *= 2;
    }
    let (last, _) = apply_rule(&GaussHermite::cached(MAX_NODES), gamma_d, &integrand);
    Err(ModelError::QuadratureFailure {
        previous,
        last,
        nodes: MAX_NODES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_root_pi() {
        for n in [1, 2, 5, 32, 257, 1024] {
            let rule = GaussHermite::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!(
                (s - std::f64::consts::PI.sqrt()).abs() < 1e-12,
                "n = {n}: {s}"
            );
        }
    }

    #[test]
    fn two_point_rule_is_exact() {
        let rule = GaussHermite::new(2);
        let x = 0.5f64.sqrt();
        assert!((rule.nodes[1] - x).abs() < 1e-15);
        assert!((rule.weights[0] - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn even_moments() {
        // ∫x^{2k} e^{−x²} = Γ(k+1/2)
        let rule = GaussHermite::new(64);
        let mut gamma_half = std::f64::consts::PI.sqrt();
        for k in 0..20 {
            let m: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(2 * k))
                .sum();
            assert!(((m - gamma_half) / gamma_half).abs() < 1e-11, "k = {k}");
            gamma_half *= k as f64 + 0.5;
        }
    }

    #[test]
    fn trivial_integrands() {
        let p = SourceParams::high_od();
        let one = doppler_average(|_| Complex64::new(1.0, 0.0), &p).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let odd = doppler_average(|w| Complex64::new(w, 0.0), &p).unwrap();
        assert!(odd.norm() < 1e-10);
        let second = doppler_average(|w| Complex64::new(w * w, 0.0), &p).unwrap();
        assert!((second.re - 55.0 * 55.0 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let p = SourceParams::high_od();
        let sharp = |w: f64| Complex64::new(1.0, 0.0) / Complex64::new(w - 3.0, 1e-3);
        match doppler_average(sharp, &p) {
            Err(ModelError::QuadratureFailure {
                nodes,
                previous,
                last,
            }) => {
                assert_eq!(nodes, MAX_NODES);
                assert!(previous.norm().is_finite() && last.norm().is_finite());
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
