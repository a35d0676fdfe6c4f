//! Physical quantities extracted from composite states: photon statistics,
//! atomic excitation, fidelity, and a truncation alarm.

use crate::error::Error;
use crate::operators::StateVector;

/// Snapshot of the measurable quantities at one sample time.
///
/// `photon_dist` sums to the squared norm of the state (≤ 1 + 1e-9 for a
/// unitary-evolved state), and `n_mean` is its first moment. `norm_leak` is
/// the probability weight sitting on the top 10% of Fock levels; values above
/// ~1e-8 mean the cutoff is too small for the scenario.
#[derive(Debug, Clone)]
pub struct ObservableRecord {
    pub t: f64,
    pub n_mean: f64,
    pub p_excited: f64,
    pub photon_dist: Vec<f64>,
    pub norm_leak: f64,
}

/// Number of top Fock levels watched by the leak alarm.
pub fn leak_window(cutoff: usize) -> usize {
    (cutoff / 10).max(1)
}

/// Trace out the atom and collect photon statistics.
///
/// The state must live on the composite space of the given cutoff.
pub fn measure(state: &StateVector, t: f64, cutoff: usize) -> Result<ObservableRecord, Error> {
    if state.dim() % 2 != 0 {
        return Err(Error::usage(format!(
            "composite state must have even dimension, got {}",
            state.dim()
        )));
    }
    if state.dim() != 2 * cutoff {
        return Err(Error::usage(format!(
            "state dim {} does not match 2×cutoff = {}",
            state.dim(),
            2 * cutoff
        )));
    }
    let amps = state.amps();
    let mut photon_dist = vec![0.0f64; cutoff];
    let mut p_excited = 0.0f64;
    for n in 0..cutoff {
        let pe = amps[n].norm_sqr();
        let pg = amps[cutoff + n].norm_sqr();
        photon_dist[n] = pe + pg;
        p_excited += pe;
    }
    let n_mean = photon_dist
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();
    let leak_start = cutoff - leak_window(cutoff);
    let norm_leak = photon_dist[leak_start..].iter().sum();
    Ok(ObservableRecord {
        t,
        n_mean,
        p_excited,
        photon_dist,
        norm_leak,
    })
}

/// |⟨s1|s2⟩|² / (‖s1‖²‖s2‖²). Normalized so that small integrator norm drift
/// cannot push the value outside [0, 1].
pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64, Error> {
    if s1.dim() != s2.dim() {
        return Err(Error::usage(format!(
            "fidelity requires equal dims, got {} and {}",
            s1.dim(),
            s2.dim()
        )));
    }
    let n1 = s1.norm();
    let n2 = s2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::usage("fidelity of a zero-norm state".to_string()));
    }
    let overlap = s1.inner(s2).norm_sqr();
    Ok(overlap / (n1 * n1 * n2 * n2))
}
