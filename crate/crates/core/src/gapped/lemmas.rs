use serde::Serialize;

use crate::error::{Error, Result};

/// Number of points of `Z^d` at L1 distance exactly `n` from the origin.
///
/// `s(n, d) = s(n-1, d) + s(n, d-1) + s(n-1, d-1)`, `s(0, d) = 1`.
pub fn sphere_count(n: usize, d: usize) -> u64 {
    if d == 0 {
        return u64::from(n == 0);
    }
    if n == 0 {
        return 1;
    }
    // prev[e] = s(k - 1, e)
    let mut prev = vec![1u64; d + 1];
    for _ in 1..=n {
        let mut cur = vec![0u64; d + 1];
        for e in 1..=d {
            cur[e] = prev[e] + cur[e - 1] + prev[e - 1];
        }
        prev = cur;
    }
    prev[d]
}

/// Direct enumeration over the cube `[-n, n]^d`.
pub fn sphere_count_brute(n: usize, d: usize) -> u64 {
    let side = 2 * n as i64 + 1;
    let total = (side as u64).pow(d as u32);
    let mut count = 0;
    for idx in 0..total {
        let mut rest = idx;
        let mut l1 = 0i64;
        for _ in 0..d {
            l1 += ((rest % side as u64) as i64 - n as i64).abs();
            rest /= side as u64;
        }
        if l1 == n as i64 {
            count += 1;
        }
    }
    count
}

/// `2^d n^{d-1}`.
pub fn sphere_bound(n: usize, d: usize) -> f64 {
    2f64.powi(d as i32) * (n as f64).powi(d as i32 - 1)
}

fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    h(p) + h(1.0 - p)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EntropyBound {
    pub entropy: f64,
    pub bound: f64,
}

/// Checks the tail constraints of `sigma` against the schedule `s` and
/// returns `S(σ)` next to `ln s_1 + c/(1-c) ln R + H_2(1-c)/(1-c)`.
///
/// The schedule is continued past its last entry by `s_{n+1} = R s_n`.
pub fn entropy_bound_eval(sigma: &[f64], s: &[usize], c: f64, r: f64) -> Result<EntropyBound> {
    let bad = |m: String| Err(Error::ConstraintViolated(m));
    if !(c > 0.0 && c < 1.0) {
        return bad(format!("c = {c} outside (0, 1)"));
    }
    if s.is_empty() || s[0] < 1 {
        return bad("schedule must start at s_1 >= 1".into());
    }
    if !(r > 1.0 && r.is_finite()) {
        return bad(format!("ratio R = {r} must exceed 1"));
    }
    for w in s.windows(2) {
        if w[1] <= w[0] {
            return bad(format!("schedule not increasing at {} -> {}", w[0], w[1]));
        }
        if w[1] as f64 > r * w[0] as f64 * (1.0 + 1e-12) {
            return bad(format!("ratio {} / {} exceeds R = {r}", w[1], w[0]));
        }
    }
    if sigma.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return bad("probabilities must be finite and non-negative".into());
    }
    if (sigma.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return bad("probabilities must sum to 1".into());
    }
    let mut sorted = sigma.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut suffix = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let mut sn = s[0] as f64;
    let mut n = 1;
    while (sn as usize) < sorted.len() {
        let tail = suffix[sn.ceil() as usize];
        if tail > c.powi(n as i32) + 1e-12 {
            return bad(format!("tail beyond s_{n} = {sn} is {tail:.6e} > c^{n}"));
        }
        sn = match s.get(n) {
            Some(&next) => next as f64,
            None => sn * r,
        };
        n += 1;
    }
    let entropy = sorted.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    let bound = (s[0] as f64).ln() + c / (1.0 - c) * r.ln() + binary_entropy(1.0 - c) / (1.0 - c);
    Ok(EntropyBound { entropy, bound })
}

/// Block distribution saturating the tail constraints: mass `1-c` spread over
/// `s_1` entries, `(1-c)c^n` over `s_{n+1} - s_n`, and `c^K` on the last block.
pub fn extremal_distribution(s: &[usize], c: f64) -> Result<Vec<f64>> {
    if s.len() < 2 || !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter("need at least two schedule entries and 0 < c < 1".into()));
    }
    if s[0] == 0 || s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("schedule must be increasing from s_1 >= 1".into()));
    }
    let k = s.len() - 1;
    let mut out = vec![(1.0 - c) / s[0] as f64; s[0]];
    for n in 1..=k {
        let size = s[n] - s[n - 1];
        let mass = if n == k { c.powi(k as i32) } else { (1.0 - c) * c.powi(n as i32) };
        out.extend(std::iter::repeat_n(mass / size as f64, size));
    }
    Ok(out)
}

/// Entropy of [`extremal_distribution`] summed block by block.
pub fn extremal_entropy(s: &[usize], c: f64) -> Result<f64> {
    extremal_distribution(s, c)?;
    let k = s.len() - 1;
    let mut total = (1.0 - c) * (s[0] as f64 / (1.0 - c)).ln();
    for n in 1..=k {
        let size = (s[n] - s[n - 1]) as f64;
        let mass = if n == k { c.powi(k as i32) } else { (1.0 - c) * c.powi(n as i32) };
        total += mass * (size / mass).ln();
    }
    Ok(total)
}
