//! Non-relativistic limit: first order in `xi`.

use nalgebra::DMatrix;

use crate::oscillator::{sigma_minus, sigma_plus, spinor_index, ModelParams, Spin, SpinorOperator};
use crate::qalgebra::{annihilation, q_number, DeformationParam, Truncation};
use crate::{Error, Result, C64};

/// Above this value of `xi [N]` the first-order expansion is not trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// `diag(1 + 2ξ[n̂], -1 - 2ξ[n̂ + 1])` on the spinor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveHamiltonian {
    operator: SpinorOperator,
    expansion: f64,
}

impl EffectiveHamiltonian {
    pub fn operator(&self) -> &SpinorOperator {
        &self.operator
    }

    /// `xi [N]`, the expansion parameter at the top of the truncation.
    pub fn expansion_parameter(&self) -> f64 {
        self.expansion
    }

    pub fn is_perturbative(&self) -> bool {
        self.expansion <= PERTURBATIVE_LIMIT
    }
}

pub fn effective_hamiltonian(m: &ModelParams, q: &DeformationParam, trunc: Truncation) -> EffectiveHamiltonian {
    let n = trunc.dim();
    let xi = m.xi();
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let up = spinor_index(k, Spin::Up);
        let down = spinor_index(k, Spin::Down);
        matrix[(up, up)] = C64::new(1.0 + 2.0 * xi * q_number(k as u32, q), 0.0);
        matrix[(down, down)] = C64::new(-1.0 - 2.0 * xi * q_number(k as u32 + 1, q), 0.0);
    }
    let expansion = xi * q_number(n as u32, q);
    if expansion > PERTURBATIVE_LIMIT {
        log::warn!("xi [N] = {expansion:.3} exceeds {PERTURBATIVE_LIMIT}; first-order limit is unreliable");
    }
    EffectiveHamiltonian {
        operator: SpinorOperator::from_matrix(matrix).expect("even square matrix"),
        expansion,
    }
}

/// `E_n ≈ 1 + 2 ξ [n]`
pub fn first_order_energy(n: u32, m: &ModelParams, q: &DeformationParam) -> f64 {
    1.0 + 2.0 * m.xi() * q_number(n, q)
}

/// `M = σ_- a_q + σ_+ a_q†`
pub fn m_observable(q: &DeformationParam, trunc: Truncation) -> SpinorOperator {
    let a = annihilation(q, trunc);
    SpinorOperator::kron(&a, &sigma_minus()).add(&SpinorOperator::kron(&a.adjoint(), &sigma_plus()))
}

/// `<M>(τ) = 2 c_up c_down sqrt([n]) cos(2 ω_n τ)`, `ω_n = 1 + 2ξ[n]`, for
/// `|ψ0> = c_up |n>|up> + c_down |n-1>|down>` with real coefficients.
pub fn m_expectation_closed(
    n: u32,
    c_up: f64,
    c_down: f64,
    m: &ModelParams,
    q: &DeformationParam,
    tau: f64,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::Argument("n must be >= 1".into()));
    }
    if (c_up * c_up + c_down * c_down - 1.0).abs() > 1e-12 {
        return Err(Error::Argument(format!(
            "c_up^2 + c_down^2 = {} is not 1",
            c_up * c_up + c_down * c_down
        )));
    }
    let omega = first_order_energy(n, m, q);
    Ok(2.0 * c_up * c_down * q_number(n, q).sqrt() * (2.0 * omega * tau).cos())
}

/// `<J_z>(τ)` for `|n-1>|down>` with the beam splitters kept to first order:
/// `-(1 + 2[n-1])/2 + 4ξ[n](1 - q^(n-1)) sin²(ω_n τ)`, `ω_n = 1 + 2ξ[n]`.
pub fn jz_first_order(n: u32, m: &ModelParams, q: &DeformationParam, tau: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Argument("n must be >= 1".into()));
    }
    let omega = first_order_energy(n, m, q);
    let amplitude = 4.0 * m.xi() * q_number(n, q) * (1.0 - q.pow(n - 1));
    Ok(-0.5 * (1.0 + 2.0 * q_number(n - 1, q)) + amplitude * (omega * tau).sin().powi(2))
}
