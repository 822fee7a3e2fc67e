//! q-deformed numbers and ladder operators on a truncated number basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Below this distance from `q = 1` the q-number is summed as a geometric
/// series instead of the closed form `(1 - q^n) / (1 - q)`.
const NEAR_UNDEFORMED: f64 = 1e-8;

/// The deformation `q` together with `epsilon = -ln q` and
/// `alpha = sqrt(-ln q / 2)`.
///
/// `q = 0` is accepted: it is the Susskind-Glogower limit where `[n] = 1` for
/// every `n >= 1`, and both derived quantities are infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParam {
    q: f64,
    epsilon: f64,
    alpha: f64,
}

impl DeformationParam {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidDeformation(q));
        }
        let epsilon = if q == 1.0 { 0.0 } else { -q.ln() };
        Ok(Self {
            q,
            epsilon,
            alpha: (epsilon / 2.0).sqrt(),
        })
    }

    pub fn undeformed() -> Self {
        Self {
            q: 1.0,
            epsilon: 0.0,
            alpha: 0.0,
        }
    }

    /// Builds the deformation from `epsilon = -ln q >= 0`.
    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Argument(format!("epsilon = {epsilon} must be >= 0")));
        }
        Self::new((-epsilon).exp())
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn is_undeformed(&self) -> bool {
        self.q == 1.0
    }

    /// `q^n`, with `0^0 = 1`.
    pub fn pow(&self, n: u32) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.q.powi(n as i32)
        }
    }

    /// Convergence radius `1/(1-q)` of the q-exponential; infinite at `q = 1`.
    pub fn radius(&self) -> f64 {
        if self.is_undeformed() {
            f64::INFINITY
        } else {
            1.0 / (1.0 - self.q)
        }
    }
}

impl TryFrom<f64> for DeformationParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<DeformationParam> for f64 {
    fn from(d: DeformationParam) -> f64 {
        d.q
    }
}

/// Dimension `N` of the truncated number basis `|0>, ..., |N-1>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    dim: usize,
}

impl Truncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidTruncation(dim));
        }
        Ok(Self { dim })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// The q-number `[n] = (1 - q^n) / (1 - q)`.
pub fn q_number(n: u32, q: &DeformationParam) -> f64 {
    let qv = q.q();
    if n == 0 {
        0.0
    } else if qv == 1.0 {
        n as f64
    } else if qv == 0.0 {
        1.0
    } else if qv < 1.0 - NEAR_UNDEFORMED {
        (1.0 - q.pow(n)) / (1.0 - qv)
    } else {
        // 1 + q + ... + q^(n-1)
        let mut sum = 0.0;
        let mut term = 1.0;
        for _ in 0..n {
            sum += term;
            term *= qv;
        }
        sum
    }
}

/// `[n]! = [n][n-1]...[1]`, with `[0]! = 1`.
pub fn q_factorial(n: u32, q: &DeformationParam) -> f64 {
    (1..=n).map(|k| q_number(k, q)).product()
}

/// `F(n) = sqrt([n+1] / (n+1))`, the nonlinearity in `a_q = F(a† a) a`.
pub fn nonlinearity(n: u32, q: &DeformationParam) -> f64 {
    (q_number(n + 1, q) / (n as f64 + 1.0)).sqrt()
}

/// A complex operator on the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<C64>,
    basis: Truncation,
}

impl FockOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let basis = Truncation::new(matrix.nrows())?;
        Ok(Self { matrix, basis })
    }

    pub fn from_diagonal(basis: Truncation, f: impl Fn(u32) -> f64) -> Self {
        let n = basis.dim();
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(f(i as u32), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { matrix, basis }
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    #[inline]
    pub fn basis(&self) -> Truncation {
        self.basis
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            basis: self.basis,
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix,
            basis: self.basis,
        }
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Self) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix,
            basis: self.basis,
        }
    }

    /// The `(N-1) x (N-1)` block on `|0>, ..., |N-2>`, where truncation does not
    /// disturb the operator identities.
    pub fn interior(&self) -> DMatrix<C64> {
        let m = self.basis.dim() - 1;
        self.matrix.view((0, 0), (m, m)).into_owned()
    }
}

/// `a_q` with `a_q |n> = sqrt([n]) |n-1>`.
pub fn annihilation(q: &DeformationParam, trunc: Truncation) -> FockOperator {
    let n = trunc.dim();
    let mut matrix = DMatrix::zeros(n, n);
    for k in 1..n {
        matrix[(k - 1, k)] = C64::new(q_number(k as u32, q).sqrt(), 0.0);
    }
    FockOperator {
        matrix,
        basis: trunc,
    }
}

/// `a_q†`, the conjugate transpose of [`annihilation`].
pub fn creation(q: &DeformationParam, trunc: Truncation) -> FockOperator {
    annihilation(q, trunc).adjoint()
}

/// The ordinary number operator `n̂ = diag(0, 1, ..., N-1)`.
pub fn number_op(trunc: Truncation) -> FockOperator {
    FockOperator::from_diagonal(trunc, |n| n as f64)
}

/// The q-number operator `[n̂] = a_q† a_q = diag([0], [1], ..., [N-1])`.
pub fn q_number_op(q: &DeformationParam, trunc: Truncation) -> FockOperator {
    FockOperator::from_diagonal(trunc, |n| q_number(n, q))
}

/// `F(n̂)` as a diagonal operator.
pub fn nonlinearity_op(q: &DeformationParam, trunc: Truncation) -> FockOperator {
    FockOperator::from_diagonal(trunc, |n| nonlinearity(n, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dq(q: f64) -> DeformationParam {
        DeformationParam::new(q).unwrap()
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn deformation_rejects_out_of_range() {
        assert!(DeformationParam::new(1.5).is_err());
        assert!(DeformationParam::new(-0.1).is_err());
        assert!(DeformationParam::new(f64::NAN).is_err());
        let d = dq(1.0);
        assert_eq!(d.epsilon(), 0.0);
        assert_eq!(d.alpha(), 0.0);
        let d = dq(0.5);
        assert_relative_eq!(d.epsilon(), -(0.5f64).ln(), max_relative = 1e-15);
        assert_relative_eq!(d.alpha() * d.alpha(), d.epsilon() / 2.0, max_relative = 1e-15);
        assert!(dq(0.0).epsilon().is_infinite());
    }

    #[test]
    fn truncation_minimum() {
        assert_eq!(Truncation::new(1), Err(Error::InvalidTruncation(1)));
        assert_eq!(Truncation::new(2).unwrap().dim(), 2);
    }

    #[test]
    fn q_number_examples() {
        assert_eq!(q_number(0, &dq(0.3)), 0.0);
        assert_eq!(q_number(5, &dq(1.0)), 5.0);
        assert_relative_eq!(q_number(2, &dq(0.5)), 1.5, max_relative = 1e-15);
        assert_eq!(q_number(10, &dq(0.0)), 1.0);
        assert_relative_eq!(q_number(10, &dq(1e-12)), 1.0, max_relative = 1e-11);
    }

    #[test]
    fn q_number_near_one_is_stable() {
        let d = dq(1.0 - 1e-10);
        // exact value of sum_{k<7} q^k to first order
        let expected = 7.0 - 21.0 * 1e-10;
        assert_relative_eq!(q_number(7, &d), expected, max_relative = 1e-14);
        // both branches agree across the switch point
        let below = dq(1.0 - 1.01e-8);
        let sum: f64 = (0..20).map(|k| below.q().powi(k)).sum();
        assert_relative_eq!(q_number(20, &below), sum, max_relative = 1e-7);
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, &dq(0.2)), 1.0);
        assert_eq!(q_factorial(3, &dq(1.0)), 6.0);
        assert_relative_eq!(q_factorial(3, &dq(0.5)), 2.625, max_relative = 1e-15);
    }

    #[test]
    fn nonlinearity_examples() {
        for n in 0..10 {
            assert_eq!(nonlinearity(n, &dq(1.0)), 1.0);
        }
        assert_relative_eq!(nonlinearity(1, &dq(0.5)), (0.75f64).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn nonlinearity_small_epsilon_expansion() {
        // F(n) = 1 - (eps/4) n + O(eps^2)
        for &eps in &[1e-2, 5e-3, 2.5e-3] {
            let d = DeformationParam::from_epsilon(eps).unwrap();
            for n in 0..6u32 {
                let err = (nonlinearity(n, &d) - (1.0 - eps / 4.0 * n as f64)).abs();
                assert!(err < 0.2 * (eps * (n as f64 + 1.0)).powi(2), "n={n} eps={eps} err={err}");
            }
        }
    }

    #[test]
    fn ladder_entries() {
        let t = Truncation::new(3).unwrap();
        let a = annihilation(&dq(1.0), t);
        assert_eq!(a.matrix()[(0, 1)].re, 1.0);
        assert_relative_eq!(a.matrix()[(1, 2)].re, 2f64.sqrt());
        let a = annihilation(&dq(0.5), t);
        assert_relative_eq!(a.matrix()[(1, 2)].re, 1.5f64.sqrt());
        let ad = creation(&dq(0.5), t);
        assert_relative_eq!(ad.matrix()[(2, 1)].re, 1.5f64.sqrt());
        assert_eq!(max_abs(&(a.matrix().adjoint() - ad.matrix())), 0.0);
    }

    #[test]
    fn susskind_glogower_limit() {
        let a = annihilation(&dq(0.0), Truncation::new(30).unwrap());
        for k in 1..30 {
            assert_eq!(a.matrix()[(k - 1, k)].re, 1.0);
        }
    }

    #[test]
    fn q_number_op_is_product_of_ladders() {
        let t = Truncation::new(12).unwrap();
        for &q in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let d = dq(q);
            let a = annihilation(&d, t);
            let prod = a.adjoint().compose(&a);
            let diff = prod.matrix() - q_number_op(&d, t).matrix();
            assert!(max_abs(&diff) < 1e-14);
        }
        let n3 = q_number_op(&dq(0.5), Truncation::new(3).unwrap());
        assert_eq!(n3.matrix()[(2, 2)].re, 1.5);
        assert_eq!(
            q_number_op(&dq(1.0), t).matrix(),
            number_op(t).matrix()
        );
    }

    #[test]
    fn q_commutator_holds_on_interior_only() {
        let t = Truncation::new(10).unwrap();
        for &q in &[0.1, 0.5, 0.75] {
            let d = dq(q);
            let a = annihilation(&d, t);
            let ad = a.adjoint();
            let c = a.compose(&ad).matrix() - ad.compose(&a).matrix() * C64::new(q, 0.0);
            let id = DMatrix::<C64>::identity(9, 9);
            let interior = c.view((0, 0), (9, 9)).into_owned();
            assert!(max_abs(&(interior - id)) < 1e-14);
            // the top state carries the truncation artifact
            assert!((c[(9, 9)].re - 1.0).abs() > 0.1);
        }
    }

    #[test]
    fn commutator_with_number_operator() {
        let t = Truncation::new(8).unwrap();
        let d = dq(0.6);
        let a = annihilation(&d, t);
        let c = a.commutator(&number_op(t));
        assert!(max_abs(&(c.interior() - a.interior())) < 1e-14);
        // also exact including the top state for n̂ (diagonal)
        assert!(max_abs(&(c.matrix() - a.matrix())) < 1e-14);
    }

    #[test]
    fn f_factorization_is_exact() {
        let t = Truncation::new(15).unwrap();
        for &q in &[0.0, 0.3, 0.8, 1.0] {
            let d = dq(q);
            let built = nonlinearity_op(&d, t).compose(&annihilation(&DeformationParam::undeformed(), t));
            let diff = built.matrix() - annihilation(&d, t).matrix();
            assert!(max_abs(&diff) < 1e-15, "q={q}");
        }
    }

    #[test]
    fn approaches_undeformed_linearly() {
        let t = Truncation::new(8).unwrap();
        let a1 = annihilation(&DeformationParam::undeformed(), t);
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&e| {
                let d = DeformationParam::from_epsilon(e).unwrap();
                max_abs(&(annihilation(&d, t).matrix() - a1.matrix()))
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
        }
    }

    proptest! {
        #[test]
        fn q_number_monotone_in_q(n in 2u32..40, q1 in 0.001f64..0.999, dq_ in 0.0005f64..0.5) {
            let q2 = (q1 + dq_).min(1.0);
            prop_assume!(q2 > q1);
            prop_assert!(q_number(n, &dq(q1)) < q_number(n, &dq(q2)));
        }

        #[test]
        fn q_number_bounded_by_n(n in 0u32..60, q in 0.0f64..=1.0) {
            let v = q_number(n, &dq(q));
            prop_assert!(v >= 0.0);
            prop_assert!(v <= n as f64 * (1.0 + 1e-14));
            if n >= 2 && q < 1.0 {
                prop_assert!(v < n as f64);
            }
        }
    }
}
