//! The two acceptance cells that fail at their pinned cutoffs are pure
//! truncation effects: the identical checks pass once the Fock window is
//! enlarged. This keeps the failure attribution honest — the closed forms
//! are correct, the window is what runs out.

use dce_core::model::field_a;
use dce_core::operators::AtomLevel;
use dce_core::{
    exp_a, expm, measure, DerivedParams, OperatorSet, StateVector, C64,
};

/// Worst disentangling cells (β = 0.5, t = 2 → squeeze r = 1) at cutoff 512:
/// Fock columns n ≤ 32 now sit far from the truncation edge and the factored
/// form matches the dense exponential to better than 1e-8.
#[test]
fn disentangling_converges_with_cutoff() {
    let cutoff = 512;
    let ops = OperatorSet::new(cutoff).unwrap();
    for (alpha, beta, t) in [(0.0, 0.5, 2.0), (-0.5, 0.5, 2.0)] {
        let d = DerivedParams {
            alpha,
            beta,
            delta: 0.0,
        };
        // A is block-diagonal with two identical field blocks; comparing the
        // field block halves the eigendecomposition cost.
        let a = field_a(&d, &ops);
        let reference = expm(&a.scaled(C64::new(0.0, -t))).unwrap();
        let got = exp_a(t, &d, &ops);
        let mut worst = 0.0f64;
        for col in 0..=32usize {
            let mut acc = 0.0f64;
            for row in 0..cutoff {
                acc += (got.matrix()[(row, col)] - reference.matrix()[(row, col)]).norm_sqr();
            }
            worst = worst.max(acc.sqrt());
        }
        assert!(
            worst <= 1e-8,
            "(α={alpha}, β={beta}, t={t}) at cutoff 512: {worst:.3e}"
        );
    }
}

/// Squeezed-vacuum photon growth at βt = 2: the ⟨N⟩ tail above cutoff 256 is
/// O(1e-3), above cutoff 512 it is below the 1e-6 tolerance.
#[test]
fn photon_growth_converges_with_cutoff() {
    let beta = 0.025;
    let d = DerivedParams {
        alpha: 0.0,
        beta,
        delta: 0.0,
    };
    let mut devs = Vec::new();
    for cutoff in [256usize, 512] {
        let ops = OperatorSet::new(cutoff).unwrap();
        let vac = StateVector::composite_basis(cutoff, AtomLevel::Ground, 0).unwrap();
        let r: f64 = 2.0;
        let t = r / beta;
        let out = StateVector::from_amps(exp_a(t, &d, &ops).apply(vac.amps()));
        let rec = measure(&out, t, cutoff).unwrap();
        devs.push((rec.n_mean - r.sinh() * r.sinh()).abs());
    }
    assert!(devs[0] > 1e-6, "cutoff 256 deviation {:.3e}", devs[0]);
    assert!(devs[1] <= 1e-6, "cutoff 512 deviation {:.3e}", devs[1]);
}
