//! The recovery-probability function `f(t, r)` in closed form and as a power series.

/// `f(t, r) = e^{−t(r/2+1)} [a cosh(at/2) + (2+r) sinh(at/2)] / a` with `a = √(r(4+r))`.
///
/// This is the survival probability of a two-level chain that leaves the
/// good state at rate 1, returns from the error state at rate `r` and fails
/// from it at rate 1. `f(t, 0) = e^{−t}(1 + t)`.
pub fn f_closed_form(t: f64, r: f64) -> f64 {
    assert!(t >= 0.0 && r >= 0.0, "f(t, r) needs t, r >= 0");
    if r == 0.0 {
        return (-t).exp() * (1.0 + t);
    }
    let a = (r * (4.0 + r)).sqrt();
    let x = 0.5 * a * t;
    if x <= 1.0 {
        // cosh(x) + (2+r)(t/2) sinh(x)/x avoids dividing by a small `a`.
        let sinhc = if x < 1e-4 { 1.0 + x * x / 6.0 } else { x.sinh() / x };
        (-t * (0.5 * r + 1.0)).exp() * (x.cosh() + (2.0 + r) * 0.5 * t * sinhc)
    } else {
        let ratio = (2.0 + r) / a;
        let slow = (t * (0.5 * a - 0.5 * r - 1.0)).exp();
        let fast = (-t * (0.5 * a + 0.5 * r + 1.0)).exp();
        0.5 * (slow * (1.0 + ratio) + fast * (1.0 - ratio))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Upper bound on the neglected tail.
    pub remainder_bound: f64,
}

/// `e^{−t(r+1)} Σ_{k<K} t^k/k! Σ_l r^l C(l+1, k−l)`, evaluated term by term in log space.
///
/// The inner sums satisfy `c_k ≤ B (r+2)^k` with `B = (r+3)(r+2)/(r+4)`,
/// so the tail is at most `B e^t P(N ≥ K)` for `N ~ Poisson(t(r+2))`.
pub fn f_series(t: f64, r: f64, k_terms: usize) -> SeriesValue {
    assert!(t >= 0.0 && r >= 0.0, "f(t, r) needs t, r >= 0");
    let ln_fact = ln_factorials(k_terms + 2);
    let ln_choose = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
    let shift = -t * (r + 1.0);
    let mut value = 0.0;
    #[allow(clippy::needless_range_loop)]
    for k in 0..k_terms {
        let lo = k.saturating_sub(1).div_ceil(2);
        for l in lo..=k {
            let j = k - l;
            if j > l + 1 {
                continue;
            }
            let mut ln_term = shift + ln_choose(l + 1, j) - ln_fact[k];
            if k > 0 {
                if t == 0.0 {
                    continue;
                }
                ln_term += k as f64 * t.ln();
            }
            if l > 0 {
                if r == 0.0 {
                    continue;
                }
                ln_term += l as f64 * r.ln();
            }
            value += ln_term.exp();
        }
    }
    let lambda = t * (r + 2.0);
    let b = (r + 3.0) * (r + 2.0) / (r + 4.0);
    let kf = k_terms as f64;
    let remainder_bound = if lambda == 0.0 {
        0.0
    } else if lambda < kf + 1.0 {
        let ln_head = -lambda + kf * lambda.ln() - ln_fact[k_terms];
        b * (t + ln_head).exp() / (1.0 - lambda / (kf + 1.0))
    } else {
        f64::INFINITY
    };
    SeriesValue { value, remainder_bound }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}
