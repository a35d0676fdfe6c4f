//! Hamiltonians and frame transforms of the modulated cavity + two-level atom.
//!
//! The lab-frame generator is
//!
//! ```text
//! H(t) = ω(t) 1₂⊗N + iχ(t) 1₂⊗(a†² - a²) + (Ω/2) σ₃⊗1 + coupling,
//! ```
//!
//! with ω(t) = ω₀(1 + ε sin ηt) and χ(t) = (d/dt log ω)/4. The rotating frame
//! V(t) = exp(-itη/4 σ₃) ⊗ exp(-itη/2 N) followed by dropping the e^{±2iηt}
//! sidebands yields the time-independent Ĥ = A + B, where A carries the
//! detuned oscillator and squeeze drive and B the Jaynes–Cummings block.

use nalgebra::Matrix2;

use crate::error::Error;
use crate::operators::{commutator, qubit_tensor, Operator, OperatorSet, Space};
use crate::{C64, CVector};

/// Physical constants of the model (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Static cavity frequency ω₀ > 0.
    pub omega0: f64,
    /// Modulation depth, 0 ≤ ε < 1.
    pub epsilon: f64,
    /// Modulation frequency η > 0.
    pub eta: f64,
    /// Atom level splitting Ω.
    pub omega_atom: f64,
    /// Atom-field coupling g ≥ 0.
    pub g: f64,
}

impl ModelParams {
    pub fn new(
        omega0: f64,
        epsilon: f64,
        eta: f64,
        omega_atom: f64,
        g: f64,
    ) -> Result<Self, Error> {
        if !(omega0 > 0.0) {
            return Err(Error::config(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::config(format!(
                "epsilon must satisfy 0 <= epsilon < 1, got {epsilon}"
            )));
        }
        if !(eta > 0.0) {
            return Err(Error::config(format!("eta must be > 0, got {eta}")));
        }
        if !(g >= 0.0) {
            return Err(Error::config(format!("g must be >= 0, got {g}")));
        }
        if !omega_atom.is_finite() {
            return Err(Error::config(format!(
                "omega_atom must be finite, got {omega_atom}"
            )));
        }
        Ok(ModelParams {
            omega0,
            epsilon,
            eta,
            omega_atom,
            g,
        })
    }
}

/// Frame-derived frequencies: α = 2(ω₀ - η/2), β = εη/4, δ = Ω - η/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

/// Recompute the derived frequencies from the physical parameters.
pub fn derive(p: &ModelParams) -> DerivedParams {
    DerivedParams {
        alpha: 2.0 * (p.omega0 - p.eta / 2.0),
        beta: p.epsilon * p.eta / 4.0,
        delta: p.omega_atom - p.eta / 2.0,
    }
}

/// Atom-field coupling retained in the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Full Rabi coupling g(σ₊+σ₋)⊗(a+a†).
    Rabi,
    /// Co-rotating Jaynes–Cummings coupling g(σ₊⊗a + σ₋⊗a†).
    Jc,
}

/// Instantaneous cavity frequency ω(t) = ω₀(1 + ε sin ηt).
pub fn omega_t(p: &ModelParams, t: f64) -> f64 {
    p.omega0 * (1.0 + p.epsilon * (p.eta * t).sin())
}

/// Squeeze-drive rate χ(t) = (d/dt log ω)/4.
///
/// `approximate` selects the leading form (εη/4) cos ηt; otherwise the exact
/// εη cos ηt / (4(1 + ε sin ηt)) is returned (ε < 1 keeps it finite).
pub fn chi_t(p: &ModelParams, t: f64, approximate: bool) -> f64 {
    let c = (p.eta * t).cos();
    if approximate {
        p.epsilon * p.eta / 4.0 * c
    } else {
        p.epsilon * p.eta * c / (4.0 * (1.0 + p.epsilon * (p.eta * t).sin()))
    }
}

fn coupling_term(g: f64, ops: &OperatorSet, coupling: Coupling) -> Operator {
    let gk = C64::new(g, 0.0);
    let jc = &qubit_tensor(&ops.sigma_plus, &ops.a).unwrap()
        + &qubit_tensor(&ops.sigma_minus, &ops.a_dag).unwrap();
    match coupling {
        Coupling::Jc => jc.scaled(gk),
        Coupling::Rabi => {
            let counter = &qubit_tensor(&ops.sigma_plus, &ops.a_dag).unwrap()
                + &qubit_tensor(&ops.sigma_minus, &ops.a).unwrap();
            (&jc + &counter).scaled(gk)
        }
    }
}

/// Lab-frame Hamiltonian H(t) with the exact χ(t).
pub fn build_h_t(p: &ModelParams, t: f64, ops: &OperatorSet, coupling: Coupling) -> Operator {
    let squeeze = &ops.k_plus - &ops.k_minus; // (a†² - a²)/2
    let field = &ops.n.scaled(C64::new(omega_t(p, t), 0.0))
        + &squeeze.scaled(C64::new(0.0, 2.0 * chi_t(p, t, false)));
    let atom = qubit_tensor(&ops.sigma3, &ops.id)
        .unwrap()
        .scaled(C64::new(p.omega_atom / 2.0, 0.0));
    let h = &qubit_tensor(&ops.id2, &field).unwrap() + &atom;
    &h + &coupling_term(p.g, ops, coupling)
}

/// Diagonal of the rotating-frame unitary V(t): entry e^{∓itη/4}·e^{-itηn/2}
/// on the excited/ground block.
pub fn frame_v_diag(p: &ModelParams, t: f64, cutoff: usize) -> CVector {
    CVector::from_fn(2 * cutoff, |idx, _| {
        let phase = -t * frame_generator_entry(p, cutoff, idx);
        C64::from_polar(1.0, phase)
    })
}

/// Diagonal entry of the frame generator G = η/4 σ₃⊗1 + η/2 1⊗N, so that
/// V(t) = exp(-itG) and dV/dt = -iG V.
fn frame_generator_entry(p: &ModelParams, cutoff: usize, idx: usize) -> f64 {
    let n = (idx % cutoff) as f64;
    let sign = if idx < cutoff { 1.0 } else { -1.0 };
    sign * p.eta / 4.0 + p.eta / 2.0 * n
}

/// The rotating-frame unitary V(t) as a composite operator.
pub fn frame_v(p: &ModelParams, t: f64, ops: &OperatorSet) -> Operator {
    let diag = frame_v_diag(p, t, ops.cutoff);
    let mut m = crate::CMatrix::zeros(2 * ops.cutoff, 2 * ops.cutoff);
    for (i, v) in diag.iter().enumerate() {
        m[(i, i)] = *v;
    }
    Operator::new(Space::Composite, m).unwrap()
}

/// Fully transformed generator V†HV - iV†(dV/dt) with the exact χ(t) and no
/// rotating-wave step. dV/dt is evaluated analytically from the diagonal
/// frame generator, giving V†HV - G.
pub fn interaction_generator(
    p: &ModelParams,
    t: f64,
    ops: &OperatorSet,
    coupling: Coupling,
) -> Operator {
    let h = build_h_t(p, t, ops, coupling);
    let v = frame_v_diag(p, t, ops.cutoff);
    let dim = 2 * ops.cutoff;
    let mut m = h.into_matrix();
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = v[i].conj() * m[(i, j)] * v[j];
        }
    }
    for i in 0..dim {
        m[(i, i)] -= C64::new(frame_generator_entry(p, ops.cutoff, i), 0.0);
    }
    Operator::new(Space::Composite, m).unwrap()
}

/// The split Ĥ = A + B together with the derived commutator data.
///
/// A = (α/2) 1₂⊗N + iβ 1₂⊗(K₊-K₋), B = (δ/2) σ₃⊗1 + JC coupling, and
/// [A,B] = g [[0, -D], [D†, 0]] with D = (α/2)a + iβa†.
#[derive(Debug, Clone)]
pub struct BlockOperators {
    pub a: Operator,
    pub b: Operator,
    pub h_hat: Operator,
    pub comm_ab: Operator,
    pub d: Operator,
    pub d_dag: Operator,
}

/// Field-space block of A: (α/2)N + iβ(K₊ - K₋).
pub fn field_a(d: &DerivedParams, ops: &OperatorSet) -> Operator {
    &ops.n.scaled(C64::new(d.alpha / 2.0, 0.0))
        + &(&ops.k_plus - &ops.k_minus).scaled(C64::new(0.0, d.beta))
}

/// Composite A = 1₂ ⊗ field_a.
pub fn block_a(d: &DerivedParams, ops: &OperatorSet) -> Operator {
    qubit_tensor(&ops.id2, &field_a(d, ops)).unwrap()
}

/// Composite B = (δ/2) σ₃⊗1 + g(σ₊⊗a + σ₋⊗a†).
pub fn block_b(d: &DerivedParams, g: f64, ops: &OperatorSet) -> Operator {
    let atom = qubit_tensor(&ops.sigma3, &ops.id)
        .unwrap()
        .scaled(C64::new(d.delta / 2.0, 0.0));
    &atom + &coupling_term(g, ops, Coupling::Jc)
}

/// Field-space D = (α/2) a + iβ a†.
pub fn field_d(d: &DerivedParams, ops: &OperatorSet) -> Operator {
    &ops.a.scaled(C64::new(d.alpha / 2.0, 0.0)) + &ops.a_dag.scaled(C64::new(0.0, d.beta))
}

/// Build A, B, Ĥ = A + B, D and the closed-form commutator block matrix.
///
/// Panics if the closed-form [A,B] disagrees with the matrix commutator on
/// interior indices beyond 1e-10; that would indicate a construction bug, not
/// a caller error.
pub fn build_blocks(p: &ModelParams, ops: &OperatorSet) -> BlockOperators {
    let d = derive(p);
    let a = block_a(&d, ops);
    let b = block_b(&d, p.g, ops);
    let h_hat = &a + &b;

    let df = field_d(&d, ops);
    let d_dag = df.adjoint();
    let zero2 = Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    let lower = Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    );
    let comm_ab = (&qubit_tensor(&zero2, &df).unwrap() + &qubit_tensor(&lower, &d_dag).unwrap())
        .scaled(C64::new(p.g, 0.0));

    let direct = commutator(&a, &b).expect("A and B share the composite space");
    let dev = comm_ab.max_abs_diff_interior(&direct, ops.interior_max());
    assert!(
        dev <= 1e-10,
        "closed-form [A,B] deviates from the matrix commutator by {dev:.3e} on interior indices"
    );

    BlockOperators {
        a,
        b,
        h_hat,
        comm_ab,
        d: df,
        d_dag,
    }
}
