use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use super::sampling::Counts;
use crate::error::{Error, Result};
use crate::strategies::{StrategyConfig, StrategyKind};

/// Width at which the likelihood search stops (radians).
pub const MLE_TOLERANCE: f64 = 1e-9;

const LOG_FLOOR: f64 = 1e-12;
const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    #[default]
    Inversion,
    Mle,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inversion => "inversion",
            Self::Mle => "mle",
        }
    }

    pub fn estimate(self, counts: &Counts, cfg: &StrategyConfig) -> Result<f64> {
        match self {
            Self::Inversion => inversion_estimator(counts, cfg),
            Self::Mle => mle_estimator(counts, cfg),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inversion" => Ok(Self::Inversion),
            "mle" => Ok(Self::Mle),
            other => Err(Error::Invalid {
                what: "estimator",
                reason: format!("`{other}` (expected inversion or mle)"),
            }),
        }
    }
}

fn check_counts(counts: &Counts, cfg: &StrategyConfig) -> Result<u64> {
    let expected = cfg.kind.labels().len();
    if counts.counts().len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: counts.counts().len(),
        });
    }
    match counts.total() {
        0 => Err(Error::Invalid {
            what: "counts",
            reason: "no events recorded".into(),
        }),
        n => Ok(n),
    }
}

/// Solves `(n_R - n_L)/n = v sqrt(1-eta) sin φ` on the branch through π:
/// `φ̂ = π - arcsin(s)`, with `s` clamped to `[-1, 1]`.
pub fn inversion_estimator(counts: &Counts, cfg: &StrategyConfig) -> Result<f64> {
    let total = check_counts(counts, cfg)?;
    let amplitude = cfg.signal_amplitude();
    if amplitude <= 0.0 {
        return Err(Error::DegenerateSignal {
            eta: cfg.eta,
            v: cfg.v,
        });
    }
    let c = counts.counts();
    let diff = c[0] as f64 - c[1] as f64;
    let s = (diff / (total as f64 * amplitude)).clamp(-1.0, 1.0);
    Ok(PI - s.asin())
}

/// Maximum-likelihood phase on `[π/2, 3π/2]` under the closed-form outcome model.
///
/// Every model probability has the form `base_k + sign_k · A sin φ`, so the
/// objective is taken relative to the φ-independent baseline:
/// `Σ n_k ln(1 + sign_k A sin φ / base_k)`. This differs from `Σ n_k ln p_k(φ)`
/// by a constant, but each term is computed without cancellation, which keeps
/// the peak sharp to well below the search tolerance even when the counts sit
/// far from the model.
pub fn mle_estimator(counts: &Counts, cfg: &StrategyConfig) -> Result<f64> {
    check_counts(counts, cfg)?;
    let terms: Vec<(f64, f64, f64)> = signal_model(cfg)
        .into_iter()
        .zip(counts.counts())
        .filter(|&((_, slope), &n)| n > 0 && slope != 0.0)
        .map(|((base, slope), &n)| (n as f64, base, slope))
        .collect();
    let log_likelihood = |phi: f64| {
        let s = phi.sin();
        terms
            .iter()
            .map(|&(n, base, slope)| {
                let p = base + slope * s;
                let ratio = if p < LOG_FLOOR {
                    (LOG_FLOOR / base).ln()
                } else {
                    (slope * s / base).ln_1p()
                };
                n * ratio
            })
            .sum::<f64>()
    };
    Ok(golden_section_max(
        log_likelihood,
        FRAC_PI_2,
        3.0 * FRAC_PI_2,
        MLE_TOLERANCE,
    ))
}

/// `(base_k, slope_k)` with `p_k(φ) = base_k + slope_k sin φ`, in label order.
fn signal_model(cfg: &StrategyConfig) -> Vec<(f64, f64)> {
    let a = cfg.signal_amplitude();
    match cfg.kind {
        StrategyKind::SingleProbe => vec![(0.5, 0.5 * a), (0.5, -0.5 * a)],
        StrategyKind::AncillaAssisted => {
            let base = 0.25 * (2.0 - cfg.eta);
            vec![
                (base, 0.5 * a),
                (base, -0.5 * a),
                (0.5 * cfg.eta, 0.0),
                (0.0, 0.0),
            ]
        }
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`. Returns the bracket midpoint.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::rng::SeededRng;
    use crate::montecarlo::sampling::sample_counts;
    use crate::strategies::closed_form_distribution;
    use std::f64::consts::FRAC_PI_6;

    fn ancilla(eta: f64, v: f64) -> StrategyConfig {
        StrategyConfig::ancilla(eta, v, PI).unwrap()
    }

    fn counts4(c: [u64; 4]) -> Counts {
        Counts::from_slice(StrategyKind::AncillaAssisted.labels(), &c)
    }

    #[test]
    fn golden_section_on_parabola() {
        let x = golden_section_max(|x| -(x - 1.234).powi(2), 0.0, 3.0, 1e-10);
        assert!((x - 1.234).abs() < 1e-9);
        let edge = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert!((edge - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inversion_at_exact_working_point() {
        // closed form at π with η = 0.5: (0.375, 0.375, 0.25, 0) · 1000
        let phi = inversion_estimator(&counts4([375, 375, 250, 0]), &ancilla(0.5, 1.0)).unwrap();
        assert_eq!(phi, PI);
    }

    #[test]
    fn inversion_known_signal() {
        let phi = inversion_estimator(&counts4([750, 250, 0, 0]), &ancilla(0.0, 1.0)).unwrap();
        assert!((phi - (PI - FRAC_PI_6)).abs() < 1e-12);
        let mle = mle_estimator(&counts4([750, 250, 0, 0]), &ancilla(0.0, 1.0)).unwrap();
        assert!((mle - phi).abs() < 1e-8, "{mle} vs {phi}");
    }

    #[test]
    fn inversion_clamps() {
        let phi = inversion_estimator(&counts4([1000, 0, 0, 0]), &ancilla(0.5, 1.0)).unwrap();
        assert_eq!(phi, FRAC_PI_2);
        let phi = inversion_estimator(&counts4([0, 1000, 0, 0]), &ancilla(0.5, 1.0)).unwrap();
        assert_eq!(phi, 3.0 * FRAC_PI_2);
    }

    #[test]
    fn inversion_degenerate_signal() {
        let c = counts4([10, 10, 10, 0]);
        assert!(matches!(
            inversion_estimator(&c, &ancilla(1.0, 1.0)),
            Err(Error::DegenerateSignal { .. })
        ));
        assert!(matches!(
            inversion_estimator(&c, &ancilla(0.2, 0.0)),
            Err(Error::DegenerateSignal { .. })
        ));
    }

    #[test]
    fn estimators_reject_empty_or_misshapen_counts() {
        let cfg = ancilla(0.2, 1.0);
        assert!(inversion_estimator(&counts4([0, 0, 0, 0]), &cfg).is_err());
        assert!(mle_estimator(&counts4([0, 0, 0, 0]), &cfg).is_err());
        let two = Counts::from_slice(&["R", "L"], &[3, 4]);
        assert!(matches!(
            mle_estimator(&two, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mle_at_exact_model_frequencies() {
        let cfg = ancilla(0.4, 1.0);
        let phi = mle_estimator(&counts4([400, 400, 200, 0]), &cfg).unwrap();
        assert!((phi - PI).abs() < 1e-8, "{}", phi - PI);
    }

    #[test]
    fn mle_symmetric_counts() {
        for (c, eta, v) in [
            ([500, 500, 0, 0], 0.0, 1.0),
            ([731, 731, 538, 0], 0.5, 0.9),
            ([3, 3, 94, 0], 0.9, 0.95),
            ([275, 275, 450, 0], 0.9, 0.95),
        ] {
            let phi = mle_estimator(&counts4(c), &ancilla(eta, v)).unwrap();
            assert!((phi - PI).abs() < 1e-8, "{c:?}: {}", phi - PI);
        }
        let single = StrategyConfig::single_probe(0.3, PI).unwrap();
        let phi = mle_estimator(&Counts::from_slice(&["R", "L"], &[1234, 1234]), &single).unwrap();
        assert!((phi - PI).abs() < 1e-8);
    }

    #[test]
    fn mle_close_to_inversion() {
        let mut rng = SeededRng::new(2024);
        for i in 0..200 {
            let eta = 0.05 + 0.9 * (i as f64 / 200.0);
            let cfg = StrategyConfig::ancilla(eta, 0.95, PI + 0.2 * ((i % 7) as f64 - 3.0) / 3.0)
                .unwrap();
            let n = 500 + 20 * i as u64;
            let counts = sample_counts(&closed_form_distribution(&cfg).unwrap(), n, &mut rng);
            let a = mle_estimator(&counts, &cfg).unwrap();
            let b = inversion_estimator(&counts, &cfg).unwrap();
            assert!((a - b).abs() < 3.0 / (n as f64).sqrt(), "{i}: {a} {b}");
        }
    }

    #[test]
    fn estimator_parsing() {
        assert_eq!("MLE".parse::<Estimator>().unwrap(), Estimator::Mle);
        assert_eq!(Estimator::default(), Estimator::Inversion);
        assert!("bayes".parse::<Estimator>().is_err());
    }
}
