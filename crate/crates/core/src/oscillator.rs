//! The q-deformed Dirac oscillator and the (anti-)Jaynes-Cummings models.
//!
//! Operators act on the spinor space `span{|n>|s>}` with the interleaved
//! ordering `|n>|up> -> 2n`, `|n>|down> -> 2n + 1`, so each invariant
//! subspace `H_n = span{|n>|up>, |n-1>|down>}` occupies the adjacent indices
//! `2n - 1, 2n`. Only the left-handed chiral mode is represented; the
//! right-handed mode stays in its vacuum.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::dynamics::SpinorState;
use crate::qalgebra::{annihilation, number_op, q_number, q_number_op, DeformationParam, FockOperator, Truncation};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dimensionless coupling `xi = hbar omega / m c^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    xi: f64,
}

impl ModelParams {
    /// `xi = 0` is allowed and describes the decoupled limit.
    pub fn new(xi: f64) -> Result<Self> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::Argument(format!("xi = {xi} must be finite and >= 0")));
        }
        Ok(Self { xi })
    }

    #[inline]
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Coupling `sqrt(4 xi [n])` between `|n>|up>` and `|n-1>|down>`.
    pub fn coupling(&self, n: u32, q: &DeformationParam) -> f64 {
        (4.0 * self.xi * q_number(n, q)).sqrt()
    }

    /// `E_n = sqrt(1 + 4 xi [n])`.
    pub fn energy(&self, n: u32, q: &DeformationParam) -> f64 {
        (1.0 + 4.0 * self.xi * q_number(n, q)).sqrt()
    }
}

/// Detuning, coupling and phase of an (anti-)Jaynes-Cummings Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AjcParams {
    pub delta: f64,
    pub eta: f64,
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Position of `|n>|spin>` in the interleaved spinor basis.
#[inline]
pub fn spinor_index(n: usize, spin: Spin) -> usize {
    match spin {
        Spin::Up => 2 * n,
        Spin::Down => 2 * n + 1,
    }
}

/// A `2N x 2N` operator on the spinor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorOperator {
    matrix: DMatrix<C64>,
    trunc: Truncation,
}

impl SpinorOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if !matrix.is_square() || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: n + n % 2, got: matrix.ncols() });
        }
        Ok(Self { matrix, trunc: Truncation::new(n / 2)? })
    }

    /// `fock ⊗ spin` in the interleaved ordering.
    pub fn kron(fock: &FockOperator, spin: &Matrix2<C64>) -> Self {
        let n = fock.basis().dim();
        let f = fock.matrix();
        let matrix = DMatrix::from_fn(2 * n, 2 * n, |r, c| f[(r / 2, c / 2)] * spin[(r % 2, c % 2)]);
        Self { matrix, trunc: fock.basis() }
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    #[inline]
    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { matrix: &self.matrix + &rhs.matrix, trunc: self.trunc }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { matrix: &self.matrix * s, trunc: self.trunc }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix,
            trunc: self.trunc,
        }
    }

    /// Restriction to `|n>|s>` with `n <= N - 2`, i.e. leaving out the top
    /// Fock level.
    pub fn interior(&self) -> DMatrix<C64> {
        let m = 2 * (self.trunc.dim() - 1);
        self.matrix.view((0, 0), (m, m)).into_owned()
    }

    /// The `2 x 2` block on `H_n = {|n>|up>, |n-1>|down>}`, `1 <= n < N`.
    pub fn subspace(&self, n: usize) -> Matrix2<C64> {
        let up = spinor_index(n, Spin::Up);
        let down = spinor_index(n - 1, Spin::Down);
        let idx = [up, down];
        Matrix2::from_fn(|r, c| self.matrix[(idx[r], idx[c])])
    }

    pub fn expectation(&self, psi: &SpinorState) -> f64 {
        crate::linalg::expectation(&self.matrix, psi.amplitudes())
    }
}

pub(crate) fn sigma_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `sigma_+ = |up><down|`
pub(crate) fn sigma_plus() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ZERO, ZERO)
}

/// `sigma_- = |down><up|`
pub(crate) fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(ZERO, ZERO, ONE, ZERO)
}

fn sigma_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

fn sigma_y() -> Matrix2<C64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

/// `sigma_z ⊗ 1` plus spin-flip terms, shared by every builder.
fn spin_boson(
    trunc: Truncation,
    detuning: f64,
    raise: (&FockOperator, C64),
    lower: (&FockOperator, C64),
) -> SpinorOperator {
    let id = FockOperator::from_diagonal(trunc, |_| 1.0);
    SpinorOperator::kron(&id, &(sigma_z() * C64::new(detuning, 0.0)))
        .add(&SpinorOperator::kron(raise.0, &sigma_plus()).scale(raise.1))
        .add(&SpinorOperator::kron(lower.0, &sigma_minus()).scale(lower.1))
}

/// `H = sigma_z + i sqrt(4 xi) (sigma_+ a_q† - sigma_- a_q)` in units of `m c^2`.
pub fn build_dirac_q(m: &ModelParams, q: &DeformationParam, trunc: Truncation) -> SpinorOperator {
    let a = annihilation(q, trunc);
    let g = (4.0 * m.xi).sqrt();
    spin_boson(trunc, 1.0, (&a.adjoint(), I * g), (&a, -I * g))
}

/// `H = delta sigma_z + eta (sigma_+ a_q† e^{i phi} + sigma_- a_q e^{-i phi})`
pub fn build_ajc_q(p: &AjcParams, q: &DeformationParam, trunc: Truncation) -> SpinorOperator {
    let a = annihilation(q, trunc);
    let phase = C64::from_polar(p.eta, p.phi);
    spin_boson(trunc, p.delta, (&a.adjoint(), phase), (&a, phase.conj()))
}

/// `H = delta sigma_z + eta (sigma_+ a_q e^{i phi} + sigma_- a_q† e^{-i phi})`
pub fn build_jc_q(p: &AjcParams, q: &DeformationParam, trunc: Truncation) -> SpinorOperator {
    let a = annihilation(q, trunc);
    let phase = C64::from_polar(p.eta, p.phi);
    spin_boson(trunc, p.delta, (&a, phase), (&a.adjoint(), phase.conj()))
}

/// AJC parameters reproducing the Dirac oscillator: `delta = 1`,
/// `eta = 2 sqrt(xi)`, `phi = pi/2`.
pub fn equivalence_map(m: &ModelParams) -> AjcParams {
    AjcParams { delta: 1.0, eta: 2.0 * m.xi.sqrt(), phi: FRAC_PI_2 }
}

/// One `±E_n` pair of the analytic spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: u32,
    pub e_plus: f64,
    pub e_minus: f64,
}

/// Closed-form spectrum: the unpaired `E_0 = +1` of `|0>|up>` and
/// `±sqrt(1 + 4 xi [n])` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub ground: f64,
    pub levels: Vec<Level>,
}

pub fn spectrum_analytic(m: &ModelParams, q: &DeformationParam, n_max: u32) -> Result<Spectrum> {
    if n_max < 1 {
        return Err(Error::Argument("n_max must be >= 1".into()));
    }
    let levels = (1..=n_max)
        .map(|n| {
            let e = m.energy(n, q);
            Level { n, e_plus: e, e_minus: -e }
        })
        .collect();
    Ok(Spectrum { ground: 1.0, levels })
}

/// `c_± = sqrt((E_n ± 1) / (2 E_n))`
pub fn mixing_coefficients(m: &ModelParams, q: &DeformationParam, n: u32) -> (f64, f64) {
    let e = m.energy(n, q);
    (((e + 1.0) / (2.0 * e)).sqrt(), ((e - 1.0) / (2.0 * e)).sqrt())
}

/// `|±E_n> = c_± |n>|up> ∓ i c_∓ |n-1>|down>` embedded in `trunc`.
pub fn eigenstates(
    m: &ModelParams,
    q: &DeformationParam,
    n: u32,
    trunc: Truncation,
) -> Result<(SpinorState, SpinorState)> {
    if n < 1 || n as usize >= trunc.dim() {
        return Err(Error::Argument(format!("eigenstate n = {n} needs 1 <= n < {}", trunc.dim())));
    }
    let (cp, cm) = mixing_coefficients(m, q, n);
    let up = spinor_index(n as usize, Spin::Up);
    let down = spinor_index(n as usize - 1, Spin::Down);
    let plus = SpinorState::from_pairs(trunc, &[(up, C64::new(cp, 0.0)), (down, -I * cm)])?;
    let minus = SpinorState::from_pairs(trunc, &[(up, C64::new(cm, 0.0)), (down, I * cp)])?;
    Ok((plus, minus))
}

/// The Dirac oscillator restricted to `H_n`:
/// `h2 = sigma_z - sqrt(4 xi [n]) sigma_y = E_n e^{-i θ σx} σz e^{i θ σx}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceBlock {
    pub n: u32,
    /// Beam-splitter angle, `tan 2θ = sqrt(4 xi [n])`.
    pub theta: f64,
    pub energy: f64,
    pub h2: Matrix2<C64>,
}

pub fn subspace_block(m: &ModelParams, q: &DeformationParam, n: u32) -> Result<SubspaceBlock> {
    if n < 1 {
        return Err(Error::Argument("subspace index n must be >= 1".into()));
    }
    let g = m.coupling(n, q);
    Ok(SubspaceBlock {
        n,
        theta: 0.5 * g.atan2(1.0),
        energy: m.energy(n, q),
        h2: sigma_z() - sigma_y() * C64::new(g, 0.0),
    })
}

impl SubspaceBlock {
    /// `U = e^{-i θ σx} e^{-i E_n τ σz} e^{i θ σx}`: splitter, phase, splitter.
    pub fn propagator(&self, tau: f64) -> Matrix2<C64> {
        let splitter = |angle: f64| {
            Matrix2::identity() * C64::new(angle.cos(), 0.0) - sigma_x() * (I * angle.sin())
        };
        let phase = (-I * self.energy * tau).exp();
        let arms = Matrix2::new(phase, ZERO, ZERO, phase.conj());
        splitter(self.theta) * arms * splitter(-self.theta)
    }
}

/// See [`SubspaceBlock::propagator`].
pub fn block_propagator(b: &SubspaceBlock, tau: f64) -> Matrix2<C64> {
    b.propagator(tau)
}

/// Which operator plays the role of the orbital angular momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularConvention {
    /// `L_z = -[n̂]` (`hbar = 1`); not conserved for `q < 1`.
    Deformed,
    /// `L_z = -n̂`; conserved for every `q`.
    Standard,
}

/// `L_z`, `S_z = σz/2` and `J_z = L_z + S_z` with the right-handed mode in
/// its vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularMomenta {
    pub lz: SpinorOperator,
    pub sz: SpinorOperator,
    pub jz: SpinorOperator,
}

pub fn angular_momenta(q: &DeformationParam, trunc: Truncation, convention: AngularConvention) -> AngularMomenta {
    let number = match convention {
        AngularConvention::Deformed => q_number_op(q, trunc),
        AngularConvention::Standard => number_op(trunc),
    };
    let id = FockOperator::from_diagonal(trunc, |_| 1.0);
    let lz = SpinorOperator::kron(&number, &(Matrix2::identity() * C64::new(-1.0, 0.0)));
    let sz = SpinorOperator::kron(&id, &(sigma_z() * C64::new(0.5, 0.0)));
    let jz = lz.add(&sz);
    AngularMomenta { lz, sz, jz }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, hermitian_eigenvalues, max_abs, DenseExp};
    use approx::assert_relative_eq;

    fn dq(q: f64) -> DeformationParam {
        DeformationParam::new(q).unwrap()
    }

    fn mp(xi: f64) -> ModelParams {
        ModelParams::new(xi).unwrap()
    }

    fn t(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    #[test]
    fn dirac_matrix_entries() {
        let h = build_dirac_q(&mp(0.25), &dq(0.5), t(6));
        let m = h.matrix();
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], -ONE);
        // |0>|up> decoupled
        for c in 1..12 {
            assert_eq!(m[(0, c)], ZERO);
        }
        // <n up|H|n-1 down> = i sqrt(4 xi [n])
        for n in 1..6u32 {
            let up = spinor_index(n as usize, Spin::Up);
            let down = spinor_index(n as usize - 1, Spin::Down);
            let g = (4.0 * 0.25 * q_number(n, &dq(0.5))).sqrt();
            assert!((m[(up, down)] - I * g).norm() < 1e-15);
            assert!((m[(down, up)] + I * g).norm() < 1e-15);
        }
        assert_eq!(hermiticity_defect(m), 0.0);
    }

    #[test]
    fn undeformed_reduction() {
        let h1 = build_dirac_q(&mp(0.3), &DeformationParam::undeformed(), t(8));
        let a = annihilation(&DeformationParam::undeformed(), t(8));
        for n in 1..8 {
            let entry = h1.matrix()[(2 * n, 2 * n - 1)];
            assert!((entry - I * (4.0f64 * 0.3).sqrt() * a.matrix()[(n - 1, n)]).norm() < 1e-15);
        }
    }

    #[test]
    fn block_diagonal_in_subspaces() {
        let h = build_dirac_q(&mp(1.0), &dq(0.75), t(9));
        let blocks = crate::linalg::invariant_blocks(h.matrix());
        assert_eq!(blocks[0], vec![0]);
        for n in 1..9 {
            assert_eq!(blocks[n], vec![2 * n - 1, 2 * n]);
        }
        // |N-1>|down> is left alone by truncation
        assert_eq!(blocks[9], vec![17]);
    }

    #[test]
    fn analytic_spectrum_examples() {
        let s = spectrum_analytic(&mp(0.25), &dq(1.0), 3).unwrap();
        assert_eq!(s.ground, 1.0);
        assert_relative_eq!(s.levels[0].e_plus, 2f64.sqrt(), max_relative = 1e-15);
        let s = spectrum_analytic(&mp(0.25), &dq(0.5), 3).unwrap();
        assert_relative_eq!(s.levels[1].e_plus, 2.5f64.sqrt(), max_relative = 1e-15);
        assert_eq!(s.levels[1].e_minus, -s.levels[1].e_plus);
        let s = spectrum_analytic(&mp(0.0), &dq(0.5), 5).unwrap();
        assert!(s.levels.iter().all(|l| l.e_plus == 1.0));
        assert!(spectrum_analytic(&mp(0.1), &dq(0.5), 0).is_err());
    }

    #[test]
    fn numeric_spectrum_matches() {
        let (m, q) = (mp(0.25), dq(0.75));
        let h = build_dirac_q(&m, &q, t(12));
        let numeric = hermitian_eigenvalues(h.matrix());
        let mut expected = vec![1.0, -1.0];
        for n in 1..12 {
            expected.push(m.energy(n, &q));
            expected.push(-m.energy(n, &q));
        }
        expected.sort_by(f64::total_cmp);
        for (a, b) in numeric.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
    }

    #[test]
    fn eigenstates_diagonalize() {
        for &(xi, q) in &[(0.25, 1.0), (0.1, 0.5), (1.0, 0.25)] {
            let (m, d) = (mp(xi), dq(q));
            let tr = t(8);
            let h = build_dirac_q(&m, &d, tr);
            for n in 1..8u32 {
                let e = m.energy(n, &d);
                let (p, mi) = eigenstates(&m, &d, n, tr).unwrap();
                let hp = h.matrix() * p.amplitudes() - p.amplitudes() * C64::new(e, 0.0);
                let hm = h.matrix() * mi.amplitudes() + mi.amplitudes() * C64::new(e, 0.0);
                assert!(hp.norm() < 1e-10 && hm.norm() < 1e-10);
                assert!((p.amplitudes().norm() - 1.0).abs() < 1e-14);
                assert!(p.amplitudes().dotc(mi.amplitudes()).norm() < 1e-15);
            }
        }
        let (cp, cm) = mixing_coefficients(&mp(0.25), &dq(1.0), 1);
        let s2 = 2f64.sqrt();
        assert_relative_eq!(cp, ((s2 + 1.0) / (2.0 * s2)).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(cm, ((s2 - 1.0) / (2.0 * s2)).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(cp * cp + cm * cm, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn eigenstates_decouple_at_small_xi() {
        let tr = t(5);
        let (p, m) = eigenstates(&mp(1e-14), &dq(0.5), 3, tr).unwrap();
        assert!((p.amplitudes()[spinor_index(3, Spin::Up)] - ONE).norm() < 1e-6);
        assert!((m.amplitudes()[spinor_index(2, Spin::Down)] - I).norm() < 1e-6);
        assert!(eigenstates(&mp(0.1), &dq(0.5), 5, tr).is_err());
        assert!(eigenstates(&mp(0.1), &dq(0.5), 0, tr).is_err());
    }

    #[test]
    fn subspace_block_invariants() {
        for &(xi, q) in &[(0.25, 0.75), (1.0, 0.25), (0.1, 1.0)] {
            for n in 1..7 {
                let b = subspace_block(&mp(xi), &dq(q), n).unwrap();
                assert!(b.theta > 0.0 && b.theta < std::f64::consts::FRAC_PI_4);
                assert!(((2.0 * b.theta).tan() - mp(xi).coupling(n, &dq(q))).abs() < 1e-12);
                let h2 = DMatrix::from_fn(2, 2, |r, c| b.h2[(r, c)]);
                let ev = hermitian_eigenvalues(&h2);
                assert!((ev[0] + b.energy).abs() < 1e-12 && (ev[1] - b.energy).abs() < 1e-12);
                // matches the full Hamiltonian's block
                let h = build_dirac_q(&mp(xi), &dq(q), t(8));
                assert!((h.subspace(n as usize) - b.h2).norm() < 1e-15);
            }
        }
        let b = subspace_block(&mp(0.0), &dq(0.5), 2).unwrap();
        assert_eq!(b.theta, 0.0);
        assert!(subspace_block(&mp(0.1), &dq(0.5), 0).is_err());
    }

    #[test]
    fn propagator_matches_two_by_two_exponential() {
        let b = subspace_block(&mp(0.25), &dq(0.75), 1).unwrap();
        assert!((b.propagator(0.0) - Matrix2::identity()).norm() < 1e-15);
        let h2 = DMatrix::from_fn(2, 2, |r, c| b.h2[(r, c)]);
        for tau in [0.3, 1.0, 7.5] {
            let oracle = DenseExp::propagator(&h2, tau);
            let u = b.propagator(tau);
            let diff = DMatrix::from_fn(2, 2, |r, c| u[(r, c)] - oracle[(r, c)]);
            assert!(max_abs(&diff) < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn ajc_and_jc_builders() {
        let tr = t(6);
        let d = dq(0.6);
        let p = AjcParams { delta: 0.7, eta: 0.0, phi: 0.3 };
        let id = FockOperator::from_diagonal(tr, |_| 1.0);
        let expected = SpinorOperator::kron(&id, &(sigma_z() * C64::new(0.7, 0.0)));
        assert_eq!(build_ajc_q(&p, &d, tr), expected);
        assert_eq!(build_jc_q(&p, &d, tr), expected);

        let p = AjcParams { delta: 0.4, eta: 1.3, phi: 0.9 };
        let ajc = build_ajc_q(&p, &d, tr);
        let jc = build_jc_q(&p, &d, tr);
        assert!(hermiticity_defect(ajc.matrix()) < 1e-15);
        assert!(hermiticity_defect(jc.matrix()) < 1e-15);
        // JC couples |n>|up> with |n+1>|down>
        let g = 1.3 * q_number(3, &d).sqrt();
        let jc_entry = jc.matrix()[(spinor_index(2, Spin::Up), spinor_index(3, Spin::Down))];
        assert!((jc_entry - C64::from_polar(g, 0.9)).norm() < 1e-15);
        let ajc_entry = ajc.matrix()[(spinor_index(3, Spin::Up), spinor_index(2, Spin::Down))];
        assert!((ajc_entry - C64::from_polar(g, 0.9)).norm() < 1e-15);
    }

    #[test]
    fn equivalence_map_reproduces_dirac() {
        assert_eq!(equivalence_map(&mp(0.25)).eta, 1.0);
        assert_eq!(equivalence_map(&mp(1.0)).eta, 2.0);
        for &xi in &[0.1, 0.25, 1.0] {
            let p = equivalence_map(&mp(xi));
            assert_eq!((p.delta, p.phi), (1.0, FRAC_PI_2));
            for &q in &[0.25, 0.5, 0.75, 1.0] {
                let tr = t(10);
                let diff = build_dirac_q(&mp(xi), &dq(q), tr).matrix() - build_ajc_q(&p, &dq(q), tr).matrix();
                assert!(max_abs(&diff) < 1e-14);
            }
        }
    }

    #[test]
    fn two_mode_split_is_an_algebraic_identity() {
        // Two deformed modes x, y on a product Fock space; the left-handed
        // combination a_l = (a_x + i a_y)/sqrt(2) enters the Dirac coupling.
        // Splitting the mass term equally, H_D = H_x^AJC + H_y^AJC with
        // eta = sqrt(2 xi), phi_x = pi/2, phi_y = 0.
        let (n, d, xi) = (4usize, dq(0.7), 0.3);
        let a = annihilation(&d, t(n));
        let id = DMatrix::<C64>::identity(n, n);
        let ax = a.matrix().kronecker(&id);
        let ay = id.kronecker(a.matrix());
        let al = (&ax + &ay * I) * C64::new(0.5f64.sqrt(), 0.0);
        let spin = |s: Matrix2<C64>, op: &DMatrix<C64>| {
            let sd = DMatrix::from_fn(2, 2, |r, c| s[(r, c)]);
            op.kronecker(&sd)
        };
        let id2 = DMatrix::<C64>::identity(n * n, n * n);
        let g = (4.0f64 * xi).sqrt();
        let hd = spin(sigma_z(), &id2) + (spin(sigma_plus(), &al.adjoint()) * I - spin(sigma_minus(), &al) * I) * C64::new(g, 0.0);
        let ajc = |op: &DMatrix<C64>, phi: f64| {
            let ph = C64::from_polar((2.0f64 * xi).sqrt(), phi);
            spin(sigma_z(), &id2) * C64::new(0.5, 0.0)
                + spin(sigma_plus(), &op.adjoint()) * ph
                + spin(sigma_minus(), op) * ph.conj()
        };
        let split = ajc(&ax, FRAC_PI_2) + ajc(&ay, 0.0);
        assert!(max_abs(&(hd - split)) < 1e-14);
    }

    #[test]
    fn angular_momentum_conventions() {
        let tr = t(6);
        let d1 = DeformationParam::undeformed();
        let a = angular_momenta(&d1, tr, AngularConvention::Deformed);
        let b = angular_momenta(&d1, tr, AngularConvention::Standard);
        assert_eq!(a, b);
        let d = dq(0.5);
        let am = angular_momenta(&d, tr, AngularConvention::Deformed);
        for s in [Spin::Up, Spin::Down] {
            let i = spinor_index(2, s);
            assert_eq!(am.lz.matrix()[(i, i)].re, -1.5);
        }
        assert_eq!(am.sz.matrix()[(spinor_index(1, Spin::Down), spinor_index(1, Spin::Down))].re, -0.5);
    }

    #[test]
    fn j_z_commutation_dichotomy() {
        let tr = t(10);
        let m = mp(0.25);
        for &q in &[0.25, 0.5, 0.75, 1.0] {
            let d = dq(q);
            let h = build_dirac_q(&m, &d, tr);
            let std = angular_momenta(&d, tr, AngularConvention::Standard);
            assert!(h.commutator(&std.jz).interior().norm() < 1e-12);
            let def = angular_momenta(&d, tr, AngularConvention::Deformed);
            let c = h.commutator(&def.jz).interior().norm();
            if q == 1.0 {
                assert!(c < 1e-12);
            } else {
                assert!(c > 1e-3, "q {q}: {c}");
            }
        }
    }
}
