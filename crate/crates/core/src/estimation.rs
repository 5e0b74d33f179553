//! Fisher information, Cramér-Rao bounds and the closed-form QFI expressions
//! for the two estimation strategies.

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::{born_probabilities, DensityOperator, Povm};

/// Central finite-difference step for phase derivatives (radians).
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Eigenvalue pairs with `lambda_i + lambda_j` below this are outside the support.
pub const SLD_CUTOFF: f64 = 1e-12;

const PROB_FLOOR: f64 = 1e-12;
const DERIVATIVE_FLOOR: f64 = 1e-9;
const NEGATIVE_QFI_TOL: f64 = 1e-8;

/// A phase-parameterised family of states with fixed noise parameters.
///
/// `evaluate` must be a pure function of `phi`.
pub trait ProbeFamily: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, phi: f64) -> Result<DensityOperator>;
}

/// Adapts a closure into a [`ProbeFamily`].
pub struct FnFamily<F> {
    dim: usize,
    f: F,
}

impl<F> FnFamily<F>
where
    F: Fn(f64) -> Result<DensityOperator> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> ProbeFamily for FnFamily<F>
where
    F: Fn(f64) -> Result<DensityOperator> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, phi: f64) -> Result<DensityOperator> {
        (self.f)(phi)
    }
}

/// Fisher information in rad⁻², finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FisherValue(f64);

impl FisherValue {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Invalid {
                what: "Fisher information",
                reason: format!("{value} is not finite and non-negative"),
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid {
            what: "finite-difference step",
            reason: format!("{step} must be positive"),
        })
    }
}

/// Quantum Fisher information via the SLD spectral sum
/// `F = 2 Σ |<i|∂ρ|j>|² / (λi + λj)` with a central-difference `∂ρ`.
pub fn qfi_numeric<P: ProbeFamily + ?Sized>(
    family: &P,
    phi0: f64,
    step: f64,
) -> Result<FisherValue> {
    check_step(step)?;
    let rho = family.evaluate(phi0)?;
    let drho = finite_difference_derivative(family, phi0, step)?;

    let eig = rho.matrix().hermitian_eig()?;
    let v = &eig.eigenvectors;
    // Derivative in the eigenbasis of rho.
    let d = v.adjoint().matmul(&drho)?.matmul(v)?;

    let n = rho.dim();
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
            if denom > SLD_CUTOFF {
                f += 2.0 * d[(i, j)].norm_sqr() / denom;
            }
        }
    }
    if f < -NEGATIVE_QFI_TOL {
        return Err(Error::NegativeFisher { value: f });
    }
    FisherValue::new(f.max(0.0))
}

/// Classical Fisher information `Σ (∂p)²/p` from probabilities and their derivatives.
///
/// Outcomes with `p < 1e-12` are skipped when their derivative is below 1e-9
/// and rejected otherwise.
pub fn classical_fisher(labelled: &[(String, f64, f64)]) -> Result<FisherValue> {
    let mut f = 0.0;
    for (label, p, dp) in labelled {
        if *p < PROB_FLOOR {
            if dp.abs() < DERIVATIVE_FLOOR {
                continue;
            }
            return Err(Error::EstimatorSingularity {
                label: label.clone(),
                derivative: *dp,
            });
        }
        f += dp * dp / p;
    }
    FisherValue::new(f)
}

/// Classical Fisher information of `povm` on `family` at `phi0`, with
/// central-difference probability derivatives.
pub fn cfi<P: ProbeFamily + ?Sized>(
    povm: &Povm,
    family: &P,
    phi0: f64,
    step: f64,
) -> Result<FisherValue> {
    check_step(step)?;
    let p0 = born_probabilities(povm, &family.evaluate(phi0)?)?;
    let pp = born_probabilities(povm, &family.evaluate(phi0 + step)?)?;
    let pm = born_probabilities(povm, &family.evaluate(phi0 - step)?)?;
    let rows: Vec<(String, f64, f64)> = p0
        .into_iter()
        .zip(pp.iter().zip(&pm))
        .map(|((label, p), ((_, a), (_, b)))| (label, p, (a - b) / (2.0 * step)))
        .collect();
    classical_fisher(&rows)
}

/// `F_s = 1 - eta`
pub fn single_probe_qfi_closed(eta: f64) -> Result<FisherValue> {
    check_unit_interval("eta", eta)?;
    FisherValue::new(1.0 - eta)
}

/// `F_a = 2 v² (1 - eta) / (2 - eta)`
pub fn ancilla_qfi_closed(eta: f64, v: f64) -> Result<FisherValue> {
    check_unit_interval("eta", eta)?;
    check_unit_interval("v", v)?;
    FisherValue::new(2.0 * v * v * (1.0 - eta) / (2.0 - eta))
}

/// Cramér-Rao variance bound `1/(n F)` for `n` independent events.
pub fn qcrb_variance(f: FisherValue, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Invalid {
            what: "event count",
            reason: "must be at least 1".into(),
        });
    }
    if f.value() <= 0.0 {
        return Err(Error::UnboundedVariance);
    }
    Ok(1.0 / (n as f64 * f.value()))
}

/// Damping rate above which the ancilla-assisted QFI beats the single-probe
/// one at visibility `v`: `2(1 - v²)`, clamped to `[0, 1]`.
pub fn crossover_noise(v: f64) -> Result<f64> {
    check_unit_interval("v", v)?;
    if v == 0.0 {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "(0, 1]",
        });
    }
    Ok((2.0 * (1.0 - v * v)).clamp(0.0, 1.0))
}

/// `(ρ(φ+h) - ρ(φ-h)) / 2h`
pub fn finite_difference_derivative<P: ProbeFamily + ?Sized>(
    family: &P,
    phi0: f64,
    step: f64,
) -> Result<ComplexMatrix> {
    check_step(step)?;
    let plus = family.evaluate(phi0 + step)?;
    let minus = family.evaluate(phi0 - step)?;
    Ok(plus
        .matrix()
        .sub(minus.matrix())?
        .scale_real(1.0 / (2.0 * step)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{amplitude_damping, diag_state, phase_unitary, PureState};
    use std::f64::consts::PI;

    fn damped_probe(eta: f64) -> impl ProbeFamily {
        FnFamily::new(2, move |phi| {
            let rho = amplitude_damping(eta)?.apply(&diag_state().density())?;
            phase_unitary(phi).apply(&rho)
        })
    }

    #[test]
    fn closed_forms() {
        assert_eq!(single_probe_qfi_closed(0.0).unwrap().value(), 1.0);
        assert_eq!(single_probe_qfi_closed(0.5).unwrap().value(), 0.5);
        assert_eq!(single_probe_qfi_closed(1.0).unwrap().value(), 0.0);
        assert_eq!(ancilla_qfi_closed(0.0, 1.0).unwrap().value(), 1.0);
        assert!((ancilla_qfi_closed(0.5, 1.0).unwrap().value() - 2.0 / 3.0).abs() < 1e-15);
        assert!((ancilla_qfi_closed(0.5, 0.9).unwrap().value() - 0.54).abs() < 1e-15);
        assert!(single_probe_qfi_closed(1.2).is_err());
        assert!(ancilla_qfi_closed(0.5, -0.1).is_err());
    }

    #[test]
    fn cramer_rao_arithmetic() {
        let one = FisherValue::new(1.0).unwrap();
        assert!((qcrb_variance(one, 2000).unwrap() - 5e-4).abs() < 1e-18);
        let two_thirds = FisherValue::new(2.0 / 3.0).unwrap();
        assert!((qcrb_variance(two_thirds, 2000).unwrap() - 7.5e-4).abs() < 1e-15);
        assert_eq!(
            qcrb_variance(FisherValue::new(0.0).unwrap(), 2000),
            Err(Error::UnboundedVariance)
        );
        assert!(qcrb_variance(one, 0).is_err());
    }

    #[test]
    fn crossover_values() {
        assert_eq!(crossover_noise(1.0).unwrap(), 0.0);
        assert!((crossover_noise(0.95).unwrap() - 0.195).abs() < 1e-12);
        assert_eq!(crossover_noise(0.70).unwrap(), 1.0);
        assert!(crossover_noise(0.0).is_err());
    }

    #[test]
    fn crossover_matches_bisection_root() {
        // Independent route: root of F_a(eta, v) - F_s(eta) by bisection.
        let v: f64 = 0.95;
        let g = |eta: f64| 2.0 * v * v * (1.0 - eta) / (2.0 - eta) - (1.0 - eta);
        let (mut lo, mut hi) = (0.0, 0.9);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((crossover_noise(v).unwrap() - lo).abs() < 1e-12);
    }

    #[test]
    fn qfi_of_damped_probe() {
        let f = qfi_numeric(&damped_probe(0.0), PI, DEFAULT_FD_STEP).unwrap();
        assert!((f.value() - 1.0).abs() < 1e-6, "{}", f.value());
        let f = qfi_numeric(&damped_probe(0.5), PI, DEFAULT_FD_STEP).unwrap();
        assert!((f.value() - 0.5).abs() < 1e-6, "{}", f.value());
    }

    #[test]
    fn qfi_rejects_bad_step() {
        assert!(qfi_numeric(&damped_probe(0.1), PI, 0.0).is_err());
        assert!(qfi_numeric(&damped_probe(0.1), PI, -1e-5).is_err());
    }

    #[test]
    fn cfi_of_population_measurement_is_zero() {
        let hv = Povm::projective(&[("H", PureState::horizontal()), ("V", PureState::vertical())])
            .unwrap();
        let f = cfi(&hv, &damped_probe(0.0), PI, DEFAULT_FD_STEP).unwrap();
        assert!(f.value() < 1e-12);
    }

    #[test]
    fn cfi_of_circular_measurement() {
        // p_{R/L} = 1/2 ∓ (sqrt(1-eta)/2) sin(phi) ⇒ CFI = 1 - eta at phi = π.
        let rl = Povm::projective(&[
            ("R", PureState::right_circular()),
            ("L", PureState::left_circular()),
        ])
        .unwrap();
        let f = cfi(&rl, &damped_probe(0.3), PI, DEFAULT_FD_STEP).unwrap();
        assert!((f.value() - 0.7).abs() < 1e-6, "{}", f.value());
    }

    #[test]
    fn classical_fisher_singularity() {
        let ok = classical_fisher(&[("a".into(), 1.0, 0.0), ("b".into(), 0.0, 1e-12)]).unwrap();
        assert_eq!(ok.value(), 0.0);
        let err = classical_fisher(&[("a".into(), 1.0, 0.0), ("b".into(), 1e-14, 0.5)]);
        assert!(matches!(err, Err(Error::EstimatorSingularity { .. })));
    }

    #[test]
    fn fisher_value_validation() {
        assert!(FisherValue::new(-1.0).is_err());
        assert!(FisherValue::new(f64::INFINITY).is_err());
        assert!(FisherValue::new(f64::NAN).is_err());
    }
}
