//! The capped geometric distribution `GeomCap(p, r)`: the index of the first
//! success among `r` Bernoulli(`p`) trials, or `r` if all fail.

use rand::Rng;

pub fn geomcap_pmf(p: f64, r: u32, i: i64) -> f64 {
    if i < 0 || i > r as i64 {
        return 0.0;
    }
    let i = i as i32;
    if i < r as i32 {
        p * (1.0 - p).powi(i)
    } else {
        (1.0 - p).powi(r as i32)
    }
}

/// First success among trials with individual success probabilities, or
/// `probs.len()`.
pub fn first_success_pmf(probs: &[f64], i: usize) -> f64 {
    let mut fail = 1.0;
    for (j, &p) in probs.iter().enumerate() {
        if j == i {
            return fail * p;
        }
        fail *= 1.0 - p;
    }
    if i == probs.len() {
        fail
    } else {
        0.0
    }
}

pub fn geomcap_sample<R: Rng + ?Sized>(p: f64, r: u32, rng: &mut R) -> u32 {
    (0..r).find(|_| rng.gen_bool(p)).unwrap_or(r)
}

/// Size of `{ i : x_i < cap && x_i - q_i in {M - 1, M} }` where `M` is the
/// maximum of `x_i - q_i`.
pub fn near_max_count(xs: &[u32], offsets: &[i64], cap: u32) -> usize {
    let shifted: Vec<i64> = xs
        .iter()
        .zip(offsets)
        .map(|(&x, &q)| x as i64 - q)
        .collect();
    let Some(&max) = shifted.iter().max() else {
        return 0;
    };
    xs.iter()
        .zip(&shifted)
        .filter(|(&x, &s)| x < cap && s >= max - 1)
        .count()
}
