//! The two estimation schemes, assembled end to end.
//!
//! Single probe: `|D>` → amplitude damping → `U_φ` → circular-basis measurement.
//!
//! Ancilla assisted: `|D>⊗|0>` → CNOT → damping and `U_φ` on the probe → CNOT
//! → visibility dephasing on the probe → four-outcome measurement
//! `{R⊗|0>, L⊗|0>, H⊗|1>, V⊗|1>}` (branch 1 = path 0, branch 2 = path 1).
//!
//! Outcome labels follow the published formulas: the outcome labelled `R`
//! is the one whose probability carries `+ sin φ`. With the crate's circular
//! convention `|R> = (|H> - i|V>)/√2` that is the projector onto `|L>`, so the
//! label and the projector are swapped once, in [`measurement_povm`]. The
//! published `p_L` repeats the `p_R` expression verbatim; the interference
//! term of `p_L` here has the opposite sign, which is what the circuit gives
//! and what normalisation requires.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_unit_interval, Error, Result};
use crate::estimation::{ancilla_qfi_closed, single_probe_qfi_closed, FisherValue, ProbeFamily};
use crate::qstate::{
    amplitude_damping, born_probabilities, cnot_pol_controls_path, diag_state, phase_unitary,
    visibility_dephasing, DensityOperator, LiftToProbe, Povm, PureState, JOINT_DIM, PROBE_DIM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    SingleProbe,
    AncillaAssisted,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SingleProbe => "single",
            Self::AncillaAssisted => "ancilla",
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Self::SingleProbe => &["R", "L"],
            Self::AncillaAssisted => &["R1", "L1", "H2", "V2"],
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" | "single-probe" => Ok(Self::SingleProbe),
            "ancilla" | "ancilla-assisted" => Ok(Self::AncillaAssisted),
            other => Err(Error::Invalid {
                what: "strategy kind",
                reason: format!("`{other}` (expected single or ancilla)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub eta: f64,
    /// Always 1 for the single-probe scheme.
    pub v: f64,
    pub phi: f64,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, eta: f64, v: f64, phi: f64) -> Result<Self> {
        check_unit_interval("eta", eta)?;
        check_unit_interval("v", v)?;
        if !phi.is_finite() {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "finite reals",
            });
        }
        let v = match kind {
            StrategyKind::SingleProbe => 1.0,
            StrategyKind::AncillaAssisted => v,
        };
        Ok(Self { kind, eta, v, phi })
    }

    pub fn single_probe(eta: f64, phi: f64) -> Result<Self> {
        Self::new(StrategyKind::SingleProbe, eta, 1.0, phi)
    }

    pub fn ancilla(eta: f64, v: f64, phi: f64) -> Result<Self> {
        Self::new(StrategyKind::AncillaAssisted, eta, v, phi)
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self::new(self.kind, eta, self.v, self.phi)
    }

    /// `v·sqrt(1 - eta)`: `p_R - p_L = signal_amplitude · sin φ`.
    pub fn signal_amplitude(&self) -> f64 {
        self.v * (1.0 - self.eta).sqrt()
    }

    /// Closed-form QFI of the configured scheme.
    pub fn qfi(&self) -> Result<FisherValue> {
        match self.kind {
            StrategyKind::SingleProbe => single_probe_qfi_closed(self.eta),
            StrategyKind::AncillaAssisted => ancilla_qfi_closed(self.eta, self.v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() || labels.is_empty() {
            return Err(Error::Invalid {
                what: "outcome distribution",
                reason: format!("{} labels for {} probabilities", labels.len(), probs.len()),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Invalid {
                what: "outcome distribution",
                reason: format!("probability {p} outside [0, 1]"),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid {
                what: "outcome distribution",
                reason: format!("probabilities sum to {total}"),
            });
        }
        Ok(Self { labels, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.probs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// The measurement of each scheme, labelled as in [`StrategyKind::labels`].
pub fn measurement_povm(kind: StrategyKind) -> Povm {
    // `+sin φ` outcome is called R; see module docs.
    let plus = PureState::left_circular();
    let minus = PureState::right_circular();
    let povm = match kind {
        StrategyKind::SingleProbe => Povm::projective(&[("R", plus), ("L", minus)]),
        StrategyKind::AncillaAssisted => {
            let b1 = PureState::path(0);
            let b2 = PureState::path(1);
            Povm::projective(&[
                ("R1", plus.tensor(&b1).expect("2x2")),
                ("L1", minus.tensor(&b1).expect("2x2")),
                ("H2", PureState::horizontal().tensor(&b2).expect("2x2")),
                ("V2", PureState::vertical().tensor(&b2).expect("2x2")),
            ])
        }
    };
    povm.expect("projectors onto an orthonormal basis")
}

/// Pre-measurement state of the configured scheme.
pub fn output_state(cfg: &StrategyConfig) -> Result<DensityOperator> {
    let damping = amplitude_damping(cfg.eta)?;
    let phase = phase_unitary(cfg.phi);
    match cfg.kind {
        StrategyKind::SingleProbe => {
            let rho = damping.apply(&diag_state().density())?;
            phase.apply(&rho)
        }
        StrategyKind::AncillaAssisted => {
            let cnot = cnot_pol_controls_path();
            let input = diag_state().tensor(&PureState::path(0))?.density();
            let rho = cnot.apply(&input)?;
            let rho = damping.lift_to_probe()?.apply(&rho)?;
            let rho = phase.lift_to_probe()?.apply(&rho)?;
            let rho = cnot.apply(&rho)?;
            visibility_dephasing(cfg.v)?.lift_to_probe()?.apply(&rho)
        }
    }
}

/// Outcome probabilities computed by running the circuit and applying the Born rule.
pub fn circuit_distribution(cfg: &StrategyConfig) -> Result<OutcomeDistribution> {
    let rho = output_state(cfg)?;
    let (labels, probs) = born_probabilities(&measurement_povm(cfg.kind), &rho)?
        .into_iter()
        .unzip();
    OutcomeDistribution::new(labels, probs)
}

/// Outcome probabilities from the analytic formulas.
pub fn closed_form_distribution(cfg: &StrategyConfig) -> Result<OutcomeDistribution> {
    let s = cfg.signal_amplitude() * cfg.phi.sin();
    let probs = match cfg.kind {
        StrategyKind::SingleProbe => vec![0.5 + 0.5 * s, 0.5 - 0.5 * s],
        StrategyKind::AncillaAssisted => {
            let base = 2.0 - cfg.eta;
            vec![
                0.25 * (base + 2.0 * s),
                0.25 * (base - 2.0 * s),
                0.5 * cfg.eta,
                0.0,
            ]
        }
    };
    let labels = cfg.kind.labels().iter().map(|l| l.to_string()).collect();
    OutcomeDistribution::new(labels, probs)
}

/// Analytic `∂p/∂φ` of [`closed_form_distribution`], in label order.
pub fn closed_form_derivative(cfg: &StrategyConfig) -> Vec<f64> {
    let ds = cfg.signal_amplitude() * cfg.phi.cos();
    match cfg.kind {
        StrategyKind::SingleProbe => vec![0.5 * ds, -0.5 * ds],
        StrategyKind::AncillaAssisted => vec![0.5 * ds, -0.5 * ds, 0.0, 0.0],
    }
}

/// Classical Fisher information of the scheme's measurement from the analytic
/// probabilities and derivatives.
pub fn closed_form_cfi(cfg: &StrategyConfig) -> Result<FisherValue> {
    let dist = closed_form_distribution(cfg)?;
    let rows: Vec<(String, f64, f64)> = dist
        .iter()
        .zip(closed_form_derivative(cfg))
        .map(|((l, p), dp)| (l.to_string(), p, dp))
        .collect();
    crate::estimation::classical_fisher(&rows)
}

/// Phase-parameterised output states of one scheme at fixed noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyFamily {
    base: StrategyConfig,
}

impl StrategyFamily {
    pub fn config(&self) -> &StrategyConfig {
        &self.base
    }
}

impl ProbeFamily for StrategyFamily {
    fn dim(&self) -> usize {
        match self.base.kind {
            StrategyKind::SingleProbe => PROBE_DIM,
            StrategyKind::AncillaAssisted => JOINT_DIM,
        }
    }

    fn evaluate(&self, phi: f64) -> Result<DensityOperator> {
        output_state(&self.base.with_phi(phi))
    }
}

pub fn make_family(kind: StrategyKind, eta: f64, v: f64) -> Result<StrategyFamily> {
    Ok(StrategyFamily {
        base: StrategyConfig::new(kind, eta, v, std::f64::consts::PI)?,
    })
}
