//! Number states, q-deformed coherent states and their photon statistics.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::qalgebra::{q_number, DeformationParam, FockOperator, Truncation};
use crate::{linalg, Error, Result, C64};

/// Largest probability a truncation may drop from a coherent state.
pub const TAIL_PROBABILITY: f64 = 1e-10;

/// Largest eigenvalue residual `||a_q|α> - α|α>||` accepted when the
/// truncation is chosen automatically.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Relative size of the last retained term at which a series is considered
/// summed to machine precision.
const SERIES_FLOOR: f64 = 1e-22;

/// Coherent-state label `α` together with the deformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParam {
    alpha: C64,
    q: DeformationParam,
}

impl CoherentParam {
    /// Fails with [`Error::DivergentSeries`] unless `|α|^2 < 1/(1-q)`.
    pub fn new(alpha: C64, q: DeformationParam) -> Result<Self> {
        let z = alpha.norm_sqr();
        if !z.is_finite() || z >= q.radius() {
            return Err(Error::DivergentSeries { z, radius: q.radius() });
        }
        Ok(Self { alpha, q })
    }

    pub fn real(alpha: f64, q: DeformationParam) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0), q)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn q(&self) -> DeformationParam {
        self.q
    }

    /// `|α|^2`
    pub fn intensity(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Number distribution `|α|^(2n) / [n]!` of the exact (untruncated) state,
    /// summed until the remainder is negligible.
    pub fn series(&self) -> CoherentSeries {
        CoherentSeries::new(self.intensity(), &self.q)
    }

    /// Smallest truncation that drops less than [`TAIL_PROBABILITY`] and keeps
    /// the eigenvalue residual of the renormalized state below
    /// [`EIGEN_RESIDUAL`].
    pub fn auto_truncation(&self) -> Truncation {
        let series = self.series();
        let alpha = self.alpha.norm();
        let mut dim = 2;
        loop {
            if series.tail_probability(dim) < TAIL_PROBABILITY
                && alpha * series.last_amplitude(dim) < EIGEN_RESIDUAL
            {
                return Truncation::new(dim).expect("dim >= 2");
            }
            dim += 1;
        }
    }

    /// Exact residual `||a_q|α>_N - α|α>_N||` of the renormalized state
    /// truncated to `dim` levels. Only the top component survives:
    /// `|α| |c_(N-1)|`.
    pub fn eigen_residual_bound(&self, dim: usize) -> f64 {
        self.alpha.norm() * self.series().last_amplitude(dim)
    }
}

/// Terms `t_n = z^n / [n]!` of the q-exponential, computed once.
#[derive(Clone, Debug)]
pub struct CoherentSeries {
    terms: Vec<f64>,
    /// Bound on everything past the last stored term.
    remainder: f64,
    total: f64,
    z: f64,
    q: DeformationParam,
}

impl CoherentSeries {
    fn new(z: f64, q: &DeformationParam) -> Self {
        let mut terms = vec![1.0];
        let mut total = 1.0;
        let mut n: u32 = 0;
        loop {
            let t = terms[n as usize];
            let ratio = z / q_number(n + 2, q);
            if t == 0.0 {
                return Self { terms, remainder: 0.0, total, z, q: *q };
            }
            if ratio < 1.0 {
                let next = t * z / q_number(n + 1, q);
                let bound = next / (1.0 - ratio);
                if bound < SERIES_FLOOR * total {
                    return Self { terms, remainder: bound, total: total + bound, z, q: *q };
                }
            }
            n += 1;
            let next = t * z / q_number(n, q);
            terms.push(next);
            total += next;
        }
    }

    /// `t_n = z^n / [n]!`, continued past the stored terms on demand.
    pub fn term(&self, n: usize) -> f64 {
        if let Some(&t) = self.terms.get(n) {
            return t;
        }
        let mut t = *self.terms.last().expect("series has a first term");
        for k in self.terms.len()..=n {
            t *= self.z / q_number(k as u32, &self.q);
        }
        t
    }

    /// `e_q(z)` including the remainder bound.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Probability weight the truncation to `dim` levels drops.
    pub fn tail_probability(&self, dim: usize) -> f64 {
        let kept = self.terms.iter().skip(dim).rev().sum::<f64>();
        (kept + self.remainder) / self.total
    }

    /// Modulus of the top amplitude `|c_(dim-1)|` of the renormalized
    /// truncated state.
    pub fn last_amplitude(&self, dim: usize) -> f64 {
        let kept: f64 = self.terms.iter().take(dim).sum();
        let top = self.term(dim - 1);
        (top / kept).sqrt()
    }

    /// Normalized weights `p_n` for `n < dim`, renormalized on the truncation.
    pub fn weights(&self, dim: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..dim).map(|n| self.term(n)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }
}

/// Partial sum of the q-exponential with a bound on what was left out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QExpSum {
    pub value: f64,
    pub terms: usize,
    /// Upper bound on the omitted terms, infinite when the partial sum is too
    /// short for the ratio test to apply.
    pub tail_bound: f64,
}

/// `e_q(z) = sum z^n / [n]!` summed over the first `terms` terms.
pub fn q_exponential(z: f64, q: &DeformationParam, terms: usize) -> Result<QExpSum> {
    if !(z >= 0.0) || z >= q.radius() {
        return Err(Error::DivergentSeries { z, radius: q.radius() });
    }
    if terms == 0 {
        return Err(Error::Argument("q_exponential needs at least one term".into()));
    }
    let mut value = 0.0;
    let mut t = 1.0;
    for n in 0..terms {
        if n > 0 {
            t *= z / q_number(n as u32, q);
        }
        value += t;
    }
    // t_(terms) and ratios past it are bounded by z / [terms + 1]
    let next = t * z / q_number(terms as u32, q);
    let ratio = z / q_number(terms as u32 + 1, q);
    let tail_bound = if ratio < 1.0 { next / (1.0 - ratio) } else { f64::INFINITY };
    Ok(QExpSum { value, terms, tail_bound })
}

/// A normalized vector on the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<C64>,
    basis: Truncation,
}

impl FockVector {
    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let basis = Truncation::new(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) {
            return Err(Error::Argument("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / C64::new(norm, 0.0), basis })
    }

    /// The number state `|n>`.
    pub fn number(n: usize, basis: Truncation) -> Result<Self> {
        if n >= basis.dim() {
            return Err(Error::Argument(format!("|{n}> outside truncation {}", basis.dim())));
        }
        let mut amplitudes = DVector::zeros(basis.dim());
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes, basis })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn basis(&self) -> Truncation {
        self.basis
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn expectation(&self, op: &FockOperator) -> f64 {
        linalg::expectation(op.matrix(), &self.amplitudes)
    }

    /// Number probabilities `|c_n|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// The coherent state with amplitudes `α^n / sqrt([n]!)`, renormalized on the
/// truncated space.
pub fn coherent_state(p: &CoherentParam, trunc: Truncation) -> Result<FockVector> {
    let series = p.series();
    let tail = series.tail_probability(trunc.dim());
    if tail >= TAIL_PROBABILITY {
        return Err(Error::TruncationTooSmall {
            dim: trunc.dim(),
            tail,
            suggested: p.auto_truncation().dim(),
        });
    }
    let mut amplitudes = DVector::zeros(trunc.dim());
    let mut c = C64::new(1.0, 0.0);
    amplitudes[0] = c;
    for n in 1..trunc.dim() {
        c *= p.alpha / q_number(n as u32, &p.q).sqrt();
        amplitudes[n] = c;
    }
    FockVector::normalized(amplitudes)
}

/// Coherent state on its [`CoherentParam::auto_truncation`].
pub fn coherent_state_auto(p: &CoherentParam) -> Result<FockVector> {
    coherent_state(p, p.auto_truncation())
}

/// `Q_q = (q - 1) |α|^2`, the Mandel parameter of the q-number operator.
pub fn mandel_qq(p: &CoherentParam) -> f64 {
    (p.q.q() - 1.0) * p.intensity()
}

/// Mandel parameter of an operator diagonal in the number basis, with
/// eigenvalues `f(n)`.
fn mandel_from(state: &FockVector, f: impl Fn(u32) -> f64) -> Result<f64> {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, p) in state.probabilities().into_iter().enumerate() {
        let x = f(n as u32);
        m1 += p * x;
        m2 += p * x * x;
    }
    if m1 <= 0.0 {
        return Err(Error::UndefinedStatistic("Mandel parameter of the vacuum"));
    }
    Ok((m2 - m1 * m1) / m1 - 1.0)
}

/// `Q_q` from the moments of `[n̂]` on the truncated coherent state.
pub fn mandel_qq_numeric(p: &CoherentParam, trunc: Truncation) -> Result<f64> {
    let state = coherent_state(p, trunc)?;
    mandel_from(&state, |n| q_number(n, &p.q))
}

/// `Q = Var(n̂)/<n̂> - 1` for the ordinary number operator, from the moments
/// on the truncated coherent state.
pub fn mandel_q(p: &CoherentParam, trunc: Truncation) -> Result<f64> {
    let state = coherent_state(p, trunc)?;
    mandel_from(&state, f64::from)
}

/// One row of the Mandel-parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MandelPoint {
    pub alpha_sq: f64,
    pub qq: f64,
    /// `None` at the vacuum, where `Q` is undefined.
    pub q_stat: Option<f64>,
}

/// `(|α|^2, Q_q, Q)` over a grid of intensities, each on its automatic
/// truncation.
pub fn fig1_data(q: DeformationParam, alpha_sq: &[f64]) -> Result<Vec<MandelPoint>> {
    alpha_sq
        .iter()
        .map(|&z| {
            if !(z >= 0.0) {
                return Err(Error::Argument(format!("|alpha|^2 = {z} must be >= 0")));
            }
            let p = CoherentParam::real(z.sqrt(), q)?;
            let q_stat = if z == 0.0 { None } else { Some(mandel_q(&p, p.auto_truncation())?) };
            Ok(MandelPoint { alpha_sq: z, qq: mandel_qq(&p), q_stat })
        })
        .collect()
}

/// `points` evenly spaced intensities strictly inside `(0, 1/(1-q))`; for
/// `q = 1` the range is `(0, 4)`.
pub fn fig1_grid(q: &DeformationParam, points: usize) -> Vec<f64> {
    let top = if q.is_undeformed() { 4.0 } else { q.radius() };
    (1..=points).map(|k| top * k as f64 / (points + 1) as f64).collect()
}
