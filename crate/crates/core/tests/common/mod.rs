//! Oracles shared by the integration tests. Nothing here calls into the
//! library's pmf machinery.

#![allow(dead_code)]

/// Law of the positive-spin count among the first `k` of `n` spins, by
/// summing the Gibbs weight over all `2^n` configurations.
pub fn brute_force_marginal(n: u32, k: u32, beta: f64, h: f64) -> Vec<f64> {
    assert!(n <= 20 && k <= n);
    let nf = n as f64;
    let mut mass = vec![0.0; k as usize + 1];
    let mut total = 0.0;
    for config in 0u32..(1 << n) {
        let up = config.count_ones() as f64;
        let s = 2.0 * up - nf;
        let w = (beta * s * s / (2.0 * nf) + h * s).exp();
        let first_k = (config & ((1u32 << k) - 1)).count_ones();
        mass[first_k as usize] += w;
        total += w;
    }
    mass.iter().map(|w| w / total).collect()
}

/// Binomial probabilities from exact integer coefficients, for `n <= 60`.
pub fn binomial_probs(n: u64, p: f64) -> Vec<f64> {
    assert!(n <= 60);
    let mut c: u128 = 1;
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        out.push(c as f64 * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32));
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    out
}

/// Composite Simpson rule on `n` panels (even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `½ ∫ |φ(t; 0, v1) - φ(t; 0, v2)| dt` by plain Simpson over a wide window.
pub fn gaussian_tv_oracle(v1: f64, v2: f64) -> f64 {
    let pdf = |t: f64, v: f64| (-t * t / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
    let r = 14.0 * v1.max(v2).sqrt();
    0.5 * simpson(|t| (pdf(t, v1) - pdf(t, v2)).abs(), -r, r, 400_000)
}

/// Half the l1 distance between two probability vectors indexed from 0.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Fixed point of `z = tanh(beta z + h)` by plain iteration from the sign of `h`
/// (or from 1 when `h = 0`), which converges to the physical branch.
pub fn magnetization_by_iteration(beta: f64, h: f64) -> f64 {
    let mut z: f64 = if h < 0.0 { -1.0 } else { 1.0 };
    for _ in 0..200_000 {
        z = (beta * z + h).tanh();
    }
    z
}
