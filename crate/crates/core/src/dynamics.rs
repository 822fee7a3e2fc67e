//! Time evolution and Zitterbewegung observables.
//!
//! [`Propagator`] evolves states exactly, one invariant subspace at a time:
//! the oscillator Hamiltonians split into 1- and 2-dimensional blocks, each
//! of which has a closed-form `SU(2)` exponential. The dense exponential in
//! [`crate::linalg`] is kept for cross-checks only.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::oscillator::{mixing_coefficients, spinor_index, ModelParams, Spin, SpinorOperator};
use crate::qalgebra::{q_number, DeformationParam, Truncation};
use crate::states::CoherentParam;
use crate::{linalg, Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on the norm of a [`SpinorState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A unit vector on the spinor basis of [`SpinorOperator`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorState {
    amplitudes: DVector<C64>,
    trunc: Truncation,
}

impl SpinorState {
    /// Accepts amplitudes whose norm is 1 within [`NORM_TOLERANCE`].
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if !amplitudes.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: amplitudes.len() + 1, got: amplitudes.len() });
        }
        let trunc = Truncation::new(amplitudes.len() / 2)?;
        if (amplitudes.norm() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Argument(format!("state norm {} is not 1", amplitudes.norm())));
        }
        Ok(Self { amplitudes, trunc })
    }

    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) {
            return Err(Error::Argument("cannot normalize the zero vector".into()));
        }
        Self::new(amplitudes / C64::new(norm, 0.0))
    }

    /// Sparse construction from `(index, amplitude)` pairs.
    pub fn from_pairs(trunc: Truncation, pairs: &[(usize, C64)]) -> Result<Self> {
        let mut v = DVector::zeros(2 * trunc.dim());
        for &(i, c) in pairs {
            if i >= v.len() {
                return Err(Error::Argument(format!("index {i} outside spinor space {}", v.len())));
            }
            v[i] = c;
        }
        Self::new(v)
    }

    /// `|n>|spin>`
    pub fn basis(trunc: Truncation, n: usize, spin: Spin) -> Result<Self> {
        Self::from_pairs(trunc, &[(spinor_index(n, spin), C64::new(1.0, 0.0))])
    }

    /// `|fock> ⊗ |spin>`
    pub fn product(fock: &DVector<C64>, spin: Spin) -> Result<Self> {
        let n = fock.len();
        let mut v = DVector::zeros(2 * n);
        for k in 0..n {
            v[spinor_index(k, spin)] = fock[k];
        }
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

#[derive(Clone, Debug)]
enum Block {
    Single { index: usize, energy: f64 },
    Pair { index: [usize; 2], h: Matrix2<C64> },
}

/// `exp(-i h τ)` for a Hermitian `2 x 2` matrix, written as
/// `e^{-i a0 τ} (cos(rτ) - i sin(rτ) n·σ)`.
pub fn su2_exponential(h: &Matrix2<C64>, tau: f64) -> Matrix2<C64> {
    let a0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let traceless = h - Matrix2::identity() * C64::new(a0, 0.0);
    let z = traceless[(0, 0)].re;
    let off = traceless[(0, 1)];
    let r = (z * z + off.norm_sqr()).sqrt();
    let global = (-I * a0 * tau).exp();
    if r == 0.0 {
        return Matrix2::identity() * global;
    }
    let rt = r * tau;
    (Matrix2::identity() * C64::new(rt.cos(), 0.0) - traceless * (I * (rt.sin() / r))) * global
}

/// Exact propagator for Hamiltonians whose invariant blocks have size at most
/// two.
#[derive(Clone, Debug)]
pub struct Propagator {
    dim: usize,
    blocks: Vec<Block>,
}

impl Propagator {
    /// Fails with [`Error::UnsupportedBlock`] if `h` couples more than two
    /// basis states into one invariant subspace.
    pub fn new(h: &SpinorOperator) -> Result<Self> {
        let m = h.matrix();
        let blocks = linalg::invariant_blocks(m)
            .into_iter()
            .map(|b| match b.as_slice() {
                &[i] => Ok(Block::Single { index: i, energy: m[(i, i)].re }),
                &[i, j] => Ok(Block::Pair {
                    index: [i, j],
                    h: Matrix2::new(m[(i, i)], m[(i, j)], m[(j, i)], m[(j, j)]),
                }),
                other => Err(Error::UnsupportedBlock(other.len())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: m.nrows(), blocks })
    }

    pub fn evolve(&self, psi: &SpinorState, tau: f64) -> Result<SpinorState> {
        let v = psi.amplitudes();
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut out = DVector::zeros(self.dim);
        for block in &self.blocks {
            match *block {
                Block::Single { index, energy } => out[index] = v[index] * (-I * energy * tau).exp(),
                Block::Pair { index: [i, j], ref h } => {
                    let u = su2_exponential(h, tau);
                    out[i] = u[(0, 0)] * v[i] + u[(0, 1)] * v[j];
                    out[j] = u[(1, 0)] * v[i] + u[(1, 1)] * v[j];
                }
            }
        }
        Ok(SpinorState { amplitudes: out, trunc: psi.trunc })
    }

    /// The full `2N x 2N` unitary assembled from the block propagators.
    pub fn unitary(&self, tau: f64) -> DMatrix<C64> {
        let mut u = DMatrix::zeros(self.dim, self.dim);
        for block in &self.blocks {
            match *block {
                Block::Single { index, energy } => u[(index, index)] = (-I * energy * tau).exp(),
                Block::Pair { index, ref h } => {
                    let b = su2_exponential(h, tau);
                    for r in 0..2 {
                        for c in 0..2 {
                            u[(index[r], index[c])] = b[(r, c)];
                        }
                    }
                }
            }
        }
        u
    }
}

/// `|ψ(τ)> = exp(-i H τ) |ψ0>`, propagated block by block.
pub fn evolve(h: &SpinorOperator, psi0: &SpinorState, tau: f64) -> Result<SpinorState> {
    Propagator::new(h)?.evolve(psi0, tau)
}

/// Mean values of `L_z`, `S_z`, `J_z` in units of `hbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularTriple {
    pub lz: f64,
    pub sz: f64,
    pub jz: f64,
}

/// Fraction `S_n(τ) = 4ξ[n]/(1+4ξ[n]) sin²(ω_n τ)` of the population moved
/// from `|n-1>|down>` to `|n>|up>`, with `ω_n = sqrt(1 + 4ξ[n])`.
pub fn transfer(n: u32, m: &ModelParams, q: &DeformationParam, tau: f64) -> f64 {
    let g2 = 4.0 * m.xi() * q_number(n, q);
    let omega = (1.0 + g2).sqrt();
    g2 / (1.0 + g2) * (omega * tau).sin().powi(2)
}

/// `<L_z>`, `<S_z>`, `<J_z>` at time `τ` for the initial state `|n-1>|down>`,
/// with the deformed orbital momentum `L_z = -[n̂]`.
pub fn zitter_number_closed(n: u32, m: &ModelParams, q: &DeformationParam, tau: f64) -> Result<AngularTriple> {
    if n < 1 {
        return Err(Error::Argument("number-state Zitterbewegung needs n >= 1".into()));
    }
    let s = transfer(n, m, q, tau);
    let lower = q_number(n - 1, q);
    let lz = -lower - q.pow(n - 1) * s;
    let sz = -0.5 + s;
    let jz = -0.5 * (1.0 + 2.0 * lower) + s * (1.0 - q.pow(n - 1));
    Ok(AngularTriple { lz, sz, jz })
}

/// `|ψ(τ)>` for `|ψ0> = |n-1>|down> = i c_- |+E_n> - i c_+ |-E_n>`, written
/// out from the two stationary components.
pub fn number_state_evolution(
    n: u32,
    m: &ModelParams,
    q: &DeformationParam,
    trunc: Truncation,
    tau: f64,
) -> Result<SpinorState> {
    let (plus, minus) = crate::oscillator::eigenstates(m, q, n, trunc)?;
    let (cp, cm) = mixing_coefficients(m, q, n);
    let w = m.energy(n, q);
    let a = I * cm * (-I * w * tau).exp();
    let b = -I * cp * (I * w * tau).exp();
    SpinorState::new(plus.amplitudes() * a + minus.amplitudes() * b)
}

/// The number distribution of a coherent state, truncated with the same
/// policy as [`crate::states::coherent_state_auto`], reused across times.
#[derive(Clone, Debug)]
pub struct CoherentZitter {
    model: ModelParams,
    q: DeformationParam,
    alpha_sq: f64,
    weights: Vec<f64>,
}

impl CoherentZitter {
    pub fn new(p: &CoherentParam, model: ModelParams) -> Self {
        let trunc = p.auto_truncation();
        Self {
            model,
            q: p.q(),
            alpha_sq: p.intensity(),
            weights: p.series().weights(trunc.dim()),
        }
    }

    /// Number of Fock levels in the sum.
    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    /// `<L_z>`, `<S_z>`, `<J_z>` at `τ` for `|ψ0> = |α>|down>`:
    /// each `|n>|down>` component oscillates inside `H_(n+1)`.
    pub fn at(&self, tau: f64) -> AngularTriple {
        let (mut l, mut s, mut j) = (0.0, 0.0, 0.0);
        for (n, &p) in self.weights.iter().enumerate() {
            let n = n as u32;
            let t = transfer(n + 1, &self.model, &self.q, tau);
            l += p * self.q.pow(n) * t;
            s += p * t;
            j += p * q_number(n, &self.q) * t;
        }
        let z = self.alpha_sq;
        AngularTriple {
            lz: -z - l,
            sz: -0.5 + s,
            jz: -0.5 * (1.0 + 2.0 * z) + (1.0 - self.q.q()) * j,
        }
    }
}

/// Closed-form series for a coherent initial state; see [`CoherentZitter`].
pub fn zitter_coherent_closed(p: &CoherentParam, m: &ModelParams, tau: f64) -> AngularTriple {
    CoherentZitter::new(p, *m).at(tau)
}

/// Sampled `(L_z, S_z, J_z)` over a strictly increasing time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub tau: Vec<f64>,
    pub lz: Vec<f64>,
    pub sz: Vec<f64>,
    pub jz: Vec<f64>,
}

impl TimeSeries {
    pub fn from_fn(tau: &[f64], mut f: impl FnMut(f64) -> AngularTriple) -> Result<Self> {
        if tau.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("time grid must be strictly increasing".into()));
        }
        let mut out = Self {
            tau: tau.to_vec(),
            lz: Vec::with_capacity(tau.len()),
            sz: Vec::with_capacity(tau.len()),
            jz: Vec::with_capacity(tau.len()),
        };
        for &t in tau {
            let v = f(t);
            out.lz.push(v.lz);
            out.sz.push(v.sz);
            out.jz.push(v.jz);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

/// `steps` evenly spaced times covering `[0, tau_max]`.
pub fn time_grid(tau_max: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![0.0];
    }
    (0..steps).map(|k| tau_max * k as f64 / (steps - 1) as f64).collect()
}

/// The collapse-revival trace `<J_z>(τ)` (with `L_z` and `S_z`) for `|α>|down>`.
pub fn fig2_trace(p: &CoherentParam, m: &ModelParams, tau: &[f64]) -> Result<TimeSeries> {
    let z = CoherentZitter::new(p, *m);
    TimeSeries::from_fn(tau, |t| z.at(t))
}

/// Moving-window peak-to-peak amplitude; entry `k` covers the samples whose
/// times lie in `[τ_k, τ_k + window]`. Windows that would run past the end of
/// the trace are dropped.
pub fn peak_to_peak_envelope(tau: &[f64], values: &[f64], window: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut end = 0;
    for start in 0..tau.len() {
        let stop = tau[start] + window;
        if stop > *tau.last().unwrap_or(&0.0) {
            break;
        }
        end = end.max(start);
        while end + 1 < tau.len() && tau[end + 1] <= stop {
            end += 1;
        }
        let slice = &values[start..=end];
        let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(hi - lo);
    }
    out
}

/// Summary of the envelope of a collapse-revival trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseRevival {
    pub window: f64,
    pub initial: f64,
    /// Smallest envelope value and where its window starts.
    pub minimum: f64,
    pub minimum_tau: f64,
    /// Largest envelope value after the minimum.
    pub revival: f64,
    pub revival_tau: f64,
}

impl CollapseRevival {
    /// `minimum / initial`
    pub fn collapse_ratio(&self) -> f64 {
        self.minimum / self.initial
    }

    /// `revival / minimum`
    pub fn revival_ratio(&self) -> f64 {
        self.revival / self.minimum
    }
}

/// Envelope window: three periods `π/ω_1` of the fastest `sin²(ω_1 τ)` term.
pub fn default_window(m: &ModelParams, q: &DeformationParam) -> f64 {
    3.0 * std::f64::consts::PI / m.energy(1, q)
}

pub fn collapse_revival(series: &TimeSeries, window: f64) -> Option<CollapseRevival> {
    let env = peak_to_peak_envelope(&series.tau, &series.jz, window);
    let initial = *env.first()?;
    let (kmin, &minimum) = env.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let (kmax, &revival) = env[kmin..].iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    Some(CollapseRevival {
        window,
        initial,
        minimum,
        minimum_tau: series.tau[kmin],
        revival,
        revival_tau: series.tau[kmin + kmax],
    })
}
