use statrs::function::gamma::ln_gamma;

use super::rng::SeededRng;
use crate::strategies::OutcomeDistribution;

/// Outcome counts of one acquisition, aligned with the distribution's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    labels: Vec<String>,
    counts: Vec<u64>,
}

impl Counts {
    pub fn new(labels: Vec<String>, counts: Vec<u64>) -> Self {
        assert_eq!(labels.len(), counts.len(), "one count per label");
        Self { labels, counts }
    }

    /// Counts with the given strategy labels.
    pub fn from_slice(labels: &[&str], counts: &[u64]) -> Self {
        Self::new(
            labels.iter().map(|l| l.to_string()).collect(),
            counts.to_vec(),
        )
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, label: &str) -> Option<u64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.counts[i])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Binomial(n, p) by inversion, searching outward from the mode.
///
/// The pmf at the mode comes from log-gamma; neighbours follow from the pmf
/// ratio, so the cost is O(sqrt(n p q)) and nothing underflows for large `n`.
pub fn binomial(n: u64, p: f64, rng: &mut SeededRng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if p > 0.5 {
        return n - binomial(n, 1.0 - p, rng);
    }
    let q = 1.0 - p;
    let nf = n as f64;
    let mode = (((nf + 1.0) * p).floor() as u64).min(n);
    let mf = mode as f64;
    let log_pm = ln_gamma(nf + 1.0) - ln_gamma(mf + 1.0) - ln_gamma(nf - mf + 1.0)
        + mf * p.ln()
        + (nf - mf) * q.ln();
    let pm = log_pm.exp();
    let ratio = p / q;

    let mut u = rng.uniform() - pm;
    if u <= 0.0 {
        return mode;
    }
    let (mut lo, mut p_lo) = (mode, pm);
    let (mut hi, mut p_hi) = (mode, pm);
    loop {
        let can_up = hi < n && p_hi > 0.0;
        let can_down = lo > 0 && p_lo > 0.0;
        if !can_up && !can_down {
            // Residual mass lost to rounding.
            return mode;
        }
        if can_up {
            p_hi *= (n - hi) as f64 / (hi + 1) as f64 * ratio;
            hi += 1;
            u -= p_hi;
            if u <= 0.0 {
                return hi;
            }
        }
        if can_down {
            p_lo *= lo as f64 / (n - lo + 1) as f64 / ratio;
            lo -= 1;
            u -= p_lo;
            if u <= 0.0 {
                return lo;
            }
        }
    }
}

/// Multinomial draw of `n` events via sequential conditional binomials.
pub fn sample_counts(dist: &OutcomeDistribution, n: u64, rng: &mut SeededRng) -> Counts {
    let probs = dist.probs();
    let mut counts = vec![0u64; probs.len()];
    // Zero-probability outcomes after this one must never receive the remainder.
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut remaining = n;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate().take(last + 1) {
        if remaining == 0 {
            break;
        }
        if k == last {
            counts[k] = remaining;
            break;
        }
        let conditional = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let x = binomial(remaining, conditional, rng);
        counts[k] = x;
        remaining -= x;
        mass -= p;
    }
    Counts::new(dist.labels().to_vec(), counts)
}
