//! States, gates, channels and measurements for the polarisation probe and the
//! probe + path-ancilla system.
//!
//! Basis conventions are fixed crate-wide:
//! - probe (polarisation): `(H, V)`
//! - ancilla (path): `(0, 1)`
//! - joint: `(H0, H1, V0, V1)`, i.e. `probe ⊗ path`
//! - circular: `|R> = (|H> - i|V>)/√2`, `|L> = (|H> + i|V>)/√2`

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL, I, ONE, ZERO};

pub const PROBE_DIM: usize = 2;
pub const JOINT_DIM: usize = 4;

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != PROBE_DIM && amplitudes.len() != JOINT_DIM {
            return Err(Error::Invalid {
                what: "pure state",
                reason: format!("dimension {} is not 2 or 4", amplitudes.len()),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid {
                what: "pure state",
                reason: format!("squared norm {norm} differs from 1"),
            });
        }
        Ok(Self { amplitudes })
    }

    fn unchecked(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn horizontal() -> Self {
        Self::unchecked(vec![ONE, ZERO])
    }

    pub fn vertical() -> Self {
        Self::unchecked(vec![ZERO, ONE])
    }

    /// `|D> = (|H> + |V>)/√2`, the probe preparation.
    pub fn diagonal() -> Self {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked(vec![a, a])
    }

    pub fn right_circular() -> Self {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked(vec![a, -I * FRAC_1_SQRT_2])
    }

    pub fn left_circular() -> Self {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked(vec![a, I * FRAC_1_SQRT_2])
    }

    /// Path basis state `|b>` for `b` in {0, 1}.
    pub fn path(branch: usize) -> Self {
        match branch {
            0 => Self::unchecked(vec![ONE, ZERO]),
            _ => Self::unchecked(vec![ZERO, ONE]),
        }
    }

    /// `self ⊗ other`; only probe ⊗ path is meaningful here.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim() != PROBE_DIM || other.dim() != PROBE_DIM {
            return Err(Error::DimensionMismatch {
                expected: PROBE_DIM,
                actual: self.dim().max(other.dim()),
            });
        }
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self::unchecked(amps))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).expect("same vector")
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
        }
    }
}

/// `diag_state()`: the diagonal polarisation probe.
pub fn diag_state() -> PureState {
    PureState::diagonal()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::Invalid {
                what: "density operator",
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let eig = matrix.hermitian_eig()?;
        if let Some(&lmin) = eig.eigenvalues.first() {
            if lmin < -POSITIVITY_TOL {
                return Err(Error::Invalid {
                    what: "density operator",
                    reason: format!("negative eigenvalue {lmin:e}"),
                });
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).expect("square").trace().re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    matrix: ComplexMatrix,
}

impl UnitaryOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let gram = matrix.adjoint().matmul(&matrix)?;
        let dev = gram.max_abs_diff(&ComplexMatrix::identity(matrix.dim()))?;
        if dev > 1e-10 {
            return Err(Error::Invalid {
                what: "unitary",
                reason: format!("U^dag U deviates from identity by {dev:e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn compose(&self, after: &Self) -> Result<Self> {
        Ok(Self {
            matrix: after.matrix.matmul(&self.matrix)?,
        })
    }

    pub fn apply_state(&self, psi: &PureState) -> Result<PureState> {
        Ok(PureState::unchecked(self.matrix.apply(psi.amplitudes())?))
    }

    /// `U rho U^dag`
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self
            .matrix
            .matmul(rho.matrix())?
            .matmul(&self.matrix.adjoint())?;
        DensityOperator::new(out)
    }
}

/// `U_phi = |H><H| + e^{i phi} |V><V|`
pub fn phase_unitary(phi: f64) -> UnitaryOp {
    UnitaryOp {
        matrix: ComplexMatrix::from_diag(&[ONE, Complex64::from_polar(1.0, phi)]),
    }
}

/// CNOT on the joint space with polarisation as control: `|H,b> -> |H,b>`, `|V,b> -> |V,1-b>`.
pub fn cnot_pol_controls_path() -> UnitaryOp {
    let m = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("4x4");
    UnitaryOp { matrix: m }
}

/// A CPTP map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Invalid {
            what: "channel",
            reason: "no Kraus operators".into(),
        })?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &kraus {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: k.dim(),
                });
            }
            sum = sum.add(&k.adjoint().matmul(k)?)?;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if dev > COMPLETENESS_TOL {
            return Err(Error::Invalid {
                what: "channel",
                reason: format!("sum K^dag K deviates from identity by {dev:e}"),
            });
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// `sum_k K rho K^dag`
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        apply_channel(self, rho)
    }

    /// `self` first, then `after`.
    pub fn then(&self, after: &Self) -> Result<Self> {
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for b in &after.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a)?);
            }
        }
        Self::new(kraus)
    }
}

impl From<UnitaryOp> for QuantumChannel {
    fn from(u: UnitaryOp) -> Self {
        Self {
            kraus: vec![u.matrix],
        }
    }
}

pub fn apply_channel(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            actual: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for k in &ch.kraus {
        out = out.add(&k.matmul(rho.matrix())?.matmul(&k.adjoint())?)?;
    }
    DensityOperator::new(out)
}

/// Amplitude damping at rate `eta`: `K0 = |H><H| + sqrt(1-eta)|V><V|`, `K1 = sqrt(eta)|H><V|`.
pub fn amplitude_damping(eta: f64) -> Result<QuantumChannel> {
    check_unit_interval("eta", eta)?;
    let k0 = ComplexMatrix::from_real_diag(&[1.0, (1.0 - eta).sqrt()]);
    let k1 = ComplexMatrix::from_real_rows(&[&[0.0, eta.sqrt()], &[0.0, 0.0]])?;
    QuantumChannel::new(vec![k0, k1])
}

/// Polarisation dephasing that scales the H-V coherences by `v`.
pub fn visibility_dephasing(v: f64) -> Result<QuantumChannel> {
    check_unit_interval("v", v)?;
    let id = ComplexMatrix::identity(PROBE_DIM).scale_real(((1.0 + v) / 2.0).sqrt());
    let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]).scale_real(((1.0 - v) / 2.0).sqrt());
    QuantumChannel::new(vec![id, z])
}

/// Extends a probe operation to act as `op ⊗ identity` on probe ⊗ path.
pub trait LiftToProbe: Sized {
    fn lift_to_probe(&self) -> Result<Self>;
}

fn lift_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() != PROBE_DIM {
        return Err(Error::DimensionMismatch {
            expected: PROBE_DIM,
            actual: m.dim(),
        });
    }
    Ok(m.kron(&ComplexMatrix::identity(PROBE_DIM)))
}

impl LiftToProbe for UnitaryOp {
    fn lift_to_probe(&self) -> Result<Self> {
        Ok(Self {
            matrix: lift_matrix(&self.matrix)?,
        })
    }
}

impl LiftToProbe for QuantumChannel {
    fn lift_to_probe(&self) -> Result<Self> {
        Ok(Self {
            kraus: self.kraus.iter().map(lift_matrix).collect::<Result<_>>()?,
        })
    }
}

pub fn lift_to_probe<T: LiftToProbe>(op: &T) -> Result<T> {
    op.lift_to_probe()
}

/// A labelled positive-operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<(String, ComplexMatrix)>,
}

impl Povm {
    pub fn new(elements: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|(_, e)| e.dim())
            .ok_or_else(|| Error::Invalid {
                what: "POVM",
                reason: "no elements".into(),
            })?;
        let mut sum = ComplexMatrix::zeros(dim);
        for (label, e) in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: e.dim(),
                });
            }
            let lmin = e.hermitian_eig()?.eigenvalues[0];
            if lmin < -POSITIVITY_TOL {
                return Err(Error::Invalid {
                    what: "POVM",
                    reason: format!("element `{label}` has eigenvalue {lmin:e}"),
                });
            }
            sum = sum.add(e)?;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if dev > COMPLETENESS_TOL {
            return Err(Error::Invalid {
                what: "POVM",
                reason: format!("elements sum to identity only within {dev:e}"),
            });
        }
        Ok(Self { elements })
    }

    /// Projective measurement onto the given labelled pure states.
    pub fn projective(states: &[(&str, PureState)]) -> Result<Self> {
        Self::new(
            states
                .iter()
                .map(|(l, s)| (l.to_string(), s.projector()))
                .collect(),
        )
    }

    pub fn elements(&self) -> &[(String, ComplexMatrix)] {
        &self.elements
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Born-rule probabilities `Re tr(E rho)`, in POVM order.
///
/// Values in `[-1e-9, 0)` are rounding and clamp to zero; anything more
/// negative is an error.
pub fn born_probabilities(povm: &Povm, rho: &DensityOperator) -> Result<Vec<(String, f64)>> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            actual: rho.dim(),
        });
    }
    povm.elements
        .iter()
        .map(|(label, e)| {
            let p = e.matmul(rho.matrix())?.trace().re;
            if p < -POSITIVITY_TOL {
                return Err(Error::NegativeProbability {
                    label: label.clone(),
                    value: p,
                });
            }
            Ok((label.clone(), p.clamp(0.0, 1.0)))
        })
        .collect()
}
