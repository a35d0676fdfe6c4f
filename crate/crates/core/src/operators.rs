//! Finite-dimensional operators on a truncated Fock space.
//!
//! The photon mode keeps the lowest `cutoff` number states |0⟩ … |cutoff-1⟩
//! with a hard truncation: a†|cutoff-1⟩ = 0. Ladder identities such as
//! [a, a†] = 1 and the su(1,1) relations therefore hold exactly only away
//! from the truncation edge; the affected band is two (for a†) or three
//! (for a†²) top levels, and callers that assert algebraic identities do so
//! on the interior rows/columns with Fock index ≤ cutoff-3.
//!
//! Composite (atom ⊗ field) operators use atom-major ordering with the
//! excited block first, so a 2×2 operator-valued block matrix
//! [[X_ee, X_eg], [X_ge, X_gg]] is stored literally, and σ₃ = diag(+1, -1).

use nalgebra::Matrix2;

use crate::error::Error;
use crate::{C64, CMatrix, CVector};

/// Which Hilbert space a matrix acts on.
///
/// Field operators are `cutoff × cutoff`; composite operators act on
/// atom ⊗ field and are `2·cutoff × 2·cutoff`. Mixing the two in arithmetic
/// is a programming error and panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Field,
    Composite,
}

/// Dense square complex matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    mat: CMatrix,
}

impl Operator {
    /// Wrap a square matrix. Errors if the matrix is not square.
    pub fn new(space: Space, mat: CMatrix) -> Result<Self, Error> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::usage(format!(
                "operator matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Operator { space, mat })
    }

    pub fn zeros(space: Space, dim: usize) -> Self {
        Operator {
            space,
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(space: Space, dim: usize) -> Self {
        Operator {
            space,
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        Operator {
            space: self.space,
            mat: self.mat.adjoint(),
        }
    }

    pub fn scaled(&self, k: C64) -> Operator {
        Operator {
            space: self.space,
            mat: &self.mat * k,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(
            self.dim(),
            v.len(),
            "operator dim {} does not match vector length {}",
            self.dim(),
            v.len()
        );
        &self.mat * v
    }

    /// max_ij |self - other| over all entries.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.space, other.space, "space mismatch in comparison");
        assert_eq!(self.dim(), other.dim(), "dim mismatch in comparison");
        let mut m = 0.0f64;
        for (x, y) in self.mat.iter().zip(other.mat.iter()) {
            m = m.max((x - y).norm());
        }
        m
    }

    /// max_ij |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// max_ij |M + M†|.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                m = m.max((self.mat[(i, j)] + self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |m, x| m.max(x.norm()))
    }

    /// max |self - other| restricted to rows and columns whose Fock index is
    /// ≤ `interior_max` (both blocks of a composite operator).
    pub fn max_abs_diff_interior(&self, other: &Operator, interior_max: usize) -> f64 {
        assert_eq!(self.space, other.space, "space mismatch in comparison");
        let cutoff = match self.space {
            Space::Field => self.dim(),
            Space::Composite => self.dim() / 2,
        };
        let fock = |idx: usize| idx % cutoff;
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            if fock(i) > interior_max {
                continue;
            }
            for j in 0..self.dim() {
                if fock(j) > interior_max {
                    continue;
                }
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    fn assert_same_kind(&self, other: &Operator, what: &str) {
        assert_eq!(
            self.space, other.space,
            "space tag mismatch in operator {what}"
        );
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in operator {what}");
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_kind(rhs, "addition");
        Operator {
            space: self.space,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_kind(rhs, "subtraction");
        Operator {
            space: self.space,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_kind(rhs, "product");
        Operator {
            space: self.space,
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// Commutator [x, y] = xy - yx.
///
/// Errors if the operands act on different spaces or dimensions.
pub fn commutator(x: &Operator, y: &Operator) -> Result<Operator, Error> {
    if x.space != y.space || x.dim() != y.dim() {
        return Err(Error::usage(format!(
            "commutator operands must match: {:?}/{} vs {:?}/{}",
            x.space,
            x.dim(),
            y.space,
            y.dim()
        )));
    }
    Ok(Operator {
        space: x.space,
        mat: &x.mat * &y.mat - &y.mat * &x.mat,
    })
}

/// Tensor product q ⊗ f of a 2×2 atom matrix with a field operator,
/// in atom-major (excited block first) ordering: block (i, j) of the result
/// equals q[i,j] · f.
pub fn qubit_tensor(q: &Matrix2<C64>, f: &Operator) -> Result<Operator, Error> {
    if f.space != Space::Field {
        return Err(Error::usage(
            "qubit_tensor expects a field-space operator".to_string(),
        ));
    }
    let c = f.dim();
    let mut mat = CMatrix::zeros(2 * c, 2 * c);
    for bi in 0..2 {
        for bj in 0..2 {
            let w = q[(bi, bj)];
            if w.norm() == 0.0 {
                continue;
            }
            mat.view_mut((bi * c, bj * c), (c, c))
                .zip_apply(&f.mat, |dst, src| *dst = w * src);
        }
    }
    Ok(Operator {
        space: Space::Composite,
        mat,
    })
}

/// The fixed operator basis for one cutoff: ladder operators, su(1,1)
/// generators and the 2×2 atom matrices.
///
/// All matrices are built once and never mutated:
///
/// - a|n⟩ = √n |n-1⟩,  a†|n⟩ = √(n+1) |n+1⟩ with a†|cutoff-1⟩ = 0,
/// - K₊ = a†²/2,  K₋ = a²/2,  K₃ = (N + 1/2)/2,
/// - σ₃ = diag(1, -1), σ₊ = [[0,1],[0,0]], σ₋ = [[0,0],[1,0]].
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub cutoff: usize,
    pub a: Operator,
    pub a_dag: Operator,
    pub n: Operator,
    pub k_plus: Operator,
    pub k_minus: Operator,
    pub k3: Operator,
    pub id: Operator,
    pub sigma3: Matrix2<C64>,
    pub sigma_plus: Matrix2<C64>,
    pub sigma_minus: Matrix2<C64>,
    pub id2: Matrix2<C64>,
}

impl OperatorSet {
    /// Build the operator set for a given Fock truncation.
    ///
    /// Requires cutoff ≥ 4 so that the commutation-relation checks have
    /// interior rows to act on.
    pub fn new(cutoff: usize) -> Result<Self, Error> {
        if cutoff < 4 {
            return Err(Error::config(format!(
                "cutoff must be at least 4, got {cutoff}"
            )));
        }
        let mut a = CMatrix::zeros(cutoff, cutoff);
        for n in 1..cutoff {
            a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        let a_dag = a.adjoint();
        let n_mat = CMatrix::from_fn(cutoff, cutoff, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        // K± filled directly with √((n+1)(n+2))/2 rather than as a†a†/2;
        // a single rounding per entry keeps the commutator checks at the
        // 1e-12 level out to cutoff 128.
        let mut k_plus = CMatrix::zeros(cutoff, cutoff);
        for n in 0..cutoff.saturating_sub(2) {
            k_plus[(n + 2, n)] = C64::new((((n + 1) * (n + 2)) as f64).sqrt() * 0.5, 0.0);
        }
        let k_minus = k_plus.adjoint();
        let k3 = CMatrix::from_fn(cutoff, cutoff, |i, j| {
            if i == j {
                C64::new((i as f64 + 0.5) / 2.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });

        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let field = |m: CMatrix| Operator {
            space: Space::Field,
            mat: m,
        };
        Ok(OperatorSet {
            cutoff,
            a: field(a),
            a_dag: field(a_dag),
            n: field(n_mat),
            k_plus: field(k_plus),
            k_minus: field(k_minus),
            k3: field(k3),
            id: Operator::identity(Space::Field, cutoff),
            sigma3: Matrix2::new(one, z, z, -one),
            sigma_plus: Matrix2::new(z, one, z, z),
            sigma_minus: Matrix2::new(z, z, one, z),
            id2: Matrix2::identity(),
        })
    }

    /// Largest Fock index on which identities involving a†² are exact,
    /// i.e. cutoff - 3.
    pub fn interior_max(&self) -> usize {
        self.cutoff - 3
    }
}

/// Convenience alias for [`OperatorSet::new`].
pub fn make_operator_set(cutoff: usize) -> Result<OperatorSet, Error> {
    OperatorSet::new(cutoff)
}

/// Atom level of a composite basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomLevel {
    Excited,
    Ground,
}

impl AtomLevel {
    fn block(self) -> usize {
        match self {
            AtomLevel::Excited => 0,
            AtomLevel::Ground => 1,
        }
    }
}

/// Complex state vector with amplitudes in the same atom-major layout as
/// composite operators: excited block first, each block `cutoff` long.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

/// Norm tolerance accepted at state creation.
pub const STATE_NORM_TOL: f64 = 1e-9;

impl StateVector {
    /// Wrap an amplitude vector, requiring the norm to be 1 within `norm_tol`.
    pub fn new(amps: CVector, norm_tol: f64) -> Result<Self, Error> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > norm_tol {
            return Err(Error::usage(format!(
                "state norm {norm} deviates from 1 beyond tolerance {norm_tol}"
            )));
        }
        Ok(StateVector { amps })
    }

    /// Wrap an amplitude vector without a norm check. Evolution routines use
    /// this to carry states whose norm drift is being monitored.
    pub fn from_amps(amps: CVector) -> Self {
        StateVector { amps }
    }

    /// Composite basis state |atom, n⟩ for a given cutoff.
    pub fn composite_basis(cutoff: usize, atom: AtomLevel, n: usize) -> Result<Self, Error> {
        if n >= cutoff {
            return Err(Error::usage(format!(
                "Fock index {n} outside truncation (cutoff {cutoff})"
            )));
        }
        let mut amps = CVector::zeros(2 * cutoff);
        amps[atom.block() * cutoff + n] = C64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    /// Composite state with the atom in a definite level and the field in a
    /// truncated coherent state of amplitude `alpha`, renormalized after
    /// truncation.
    pub fn composite_coherent(cutoff: usize, atom: AtomLevel, alpha: C64) -> Result<Self, Error> {
        if alpha.norm_sqr() >= cutoff as f64 / 4.0 {
            return Err(Error::usage(format!(
                "coherent amplitude |alpha|^2 = {} too large for cutoff {cutoff} (requires < cutoff/4)",
                alpha.norm_sqr()
            )));
        }
        let mut field = CVector::zeros(cutoff);
        let mut amp = C64::new(1.0, 0.0);
        field[0] = amp;
        for n in 1..cutoff {
            amp *= alpha / C64::new((n as f64).sqrt(), 0.0);
            field[n] = amp;
        }
        let norm = field.norm();
        field /= C64::new(norm, 0.0);
        let mut amps = CVector::zeros(2 * cutoff);
        for n in 0..cutoff {
            amps[atom.block() * cutoff + n] = field[n];
        }
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// |‖ψ‖ - 1|.
    pub fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        self.amps.dotc(&other.amps)
    }
}
