//! Grid realization of the differential form of `a_q`.
//!
//! The differential form combines the phases `e^{-iαz}`, `e^{-2iαz}` with
//! `e^{iα d/dz}`. The latter is a translation by the imaginary amount `iα`,
//! i.e. `e^{-α p}` with `p = -i d/dz`: Hermitian and positive, not unitary. In
//! the conjugate (momentum) representation the roles swap: `e^{-iαz}`
//! becomes the exact translation `φ(p) -> φ(p + α)` and `e^{iα d/dz}` the
//! diagonal weight `e^{-α p}`. On a periodic momentum grid with spacing
//! `h = α/k` the operator reads
//!
//! ```text
//! (A φ)_j = [φ_(j+2k) - e^{-α p_j} φ_(j+k)] / (-i sqrt(1 - e^{-2α²}))
//! ```
//!
//! and the q-commutator `A A† - q A† A = 1` holds exactly away from the
//! wrap-around. Translations by whole multiples of `k` cells never mix the
//! `k` residue classes of the grid, so the operator splits into `k`
//! independent chains, each a complete copy of the q-oscillator sampled at a
//! different offset. Every level therefore appears `k` times.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::oscillator::{AjcParams, ModelParams};
use crate::qalgebra::{q_number, DeformationParam};
use crate::{linalg, Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Largest distance kept below the vacuum centre. The weight `e^{-α p}`
/// grows without bound towards negative `p`; capping the reach keeps the
/// operator well conditioned while the Gaussian tail there is below `1e-16`.
const LOWER_REACH: f64 = 6.5;

/// Periodic momentum grid whose spacing divides `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    q: f64,
    alpha: f64,
    cells_per_shift: usize,
    points: usize,
    origin: f64,
}

impl GridConfig {
    /// Grid with `h = α / cells_per_shift`. The domain starts a quarter of its
    /// length (at most [`LOWER_REACH`]) below the vacuum centre `3α/2`, since
    /// excited states move towards positive `p`.
    pub fn new(q: &DeformationParam, cells_per_shift: usize, points: usize) -> Result<Self> {
        if q.is_undeformed() || q.q() == 0.0 {
            return Err(Error::Argument(format!(
                "grid realization needs 0 < q < 1, got {}",
                q.q()
            )));
        }
        if cells_per_shift == 0 || !points.is_multiple_of(cells_per_shift) || points < 3 * cells_per_shift {
            return Err(Error::Argument(format!(
                "{points} points cannot hold periodic chains of {cells_per_shift}-cell shifts"
            )));
        }
        let alpha = q.alpha();
        let h = alpha / cells_per_shift as f64;
        let length = points as f64 * h;
        let origin = 1.5 * alpha - (length / 4.0).min(LOWER_REACH);
        Ok(Self { q: q.q(), alpha, cells_per_shift, points, origin })
    }

    /// Grid from an explicit spacing; fails unless `α / h` is an integer.
    pub fn with_spacing(q: &DeformationParam, h: f64, points: usize) -> Result<Self> {
        let ratio = q.alpha() / h;
        let k = ratio.round();
        if !(h > 0.0) || k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
            return Err(Error::IncommensurateGrid { h, alpha: q.alpha() });
        }
        Self::new(q, k as usize, points)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spacing(&self) -> f64 {
        self.alpha / self.cells_per_shift as f64
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn cells_per_shift(&self) -> usize {
        self.cells_per_shift
    }

    /// Domain length `M h`.
    pub fn length(&self) -> f64 {
        self.points as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.origin + j as f64 * self.spacing()).collect()
    }

    /// Grid indices of chain `c`, in order of increasing momentum.
    pub fn chain(&self, c: usize) -> Vec<usize> {
        (c..self.points).step_by(self.cells_per_shift).collect()
    }
}

/// Sparse form of the grid annihilation operator.
#[derive(Clone, Debug)]
pub struct GridLadder {
    config: GridConfig,
    weights: Vec<f64>,
    /// `sqrt(1 - e^{-2α²}) = sqrt(1 - q)`
    norm: f64,
}

impl GridLadder {
    pub fn new(config: GridConfig) -> Self {
        let weights = config.coordinates().iter().map(|p| (-config.alpha * p).exp()).collect();
        let norm = (1.0 - (-2.0 * config.alpha * config.alpha).exp()).sqrt();
        Self { config, weights, norm }
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    fn shift(&self, j: usize, cells: usize) -> usize {
        (j + cells) % self.config.points
    }

    fn unshift(&self, j: usize, cells: usize) -> usize {
        (j + self.config.points - cells % self.config.points) % self.config.points
    }

    /// `A φ`
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let k = self.config.cells_per_shift;
        let scale = I / self.norm;
        DVector::from_fn(v.len(), |j, _| (v[self.shift(j, 2 * k)] - v[self.shift(j, k)] * self.weights[j]) * scale)
    }

    /// `A† φ`
    pub fn apply_adjoint(&self, v: &DVector<C64>) -> DVector<C64> {
        let k = self.config.cells_per_shift;
        let scale = -I / self.norm;
        DVector::from_fn(v.len(), |j, _| {
            let back = self.unshift(j, k);
            (v[self.unshift(j, 2 * k)] - v[back] * self.weights[back]) * scale
        })
    }

    /// The bare translation numerator `S_2k - diag(e^{-α p}) S_k`, so that
    /// `A = numerator / (-i sqrt(1 - q))`.
    pub fn numerator(&self) -> DMatrix<C64> {
        let k = self.config.cells_per_shift;
        let m = self.config.points;
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            out[(j, self.shift(j, 2 * k))] += C64::new(1.0, 0.0);
            out[(j, self.shift(j, k))] -= C64::new(self.weights[j], 0.0);
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.numerator() * (I / self.norm)
    }

    /// `A†` assembled from [`GridLadder::apply_adjoint`] column by column.
    pub fn adjoint_dense(&self) -> DMatrix<C64> {
        let m = self.config.points;
        let mut out = DMatrix::zeros(m, m);
        for c in 0..m {
            let mut e = DVector::zeros(m);
            e[c] = C64::new(1.0, 0.0);
            out.set_column(c, &self.apply_adjoint(&e));
        }
        out
    }

    /// `A` restricted to chain `c`.
    pub fn chain_matrix(&self, c: usize) -> DMatrix<C64> {
        let idx = self.config.chain(c);
        let len = idx.len();
        let scale = I / self.norm;
        let mut out = DMatrix::zeros(len, len);
        for (r, &j) in idx.iter().enumerate() {
            out[(r, (r + 2) % len)] += scale;
            out[(r, (r + 1) % len)] -= scale * self.weights[j];
        }
        out
    }

    /// Eigenpairs of `A† A`, solved chain by chain, ascending.
    pub fn number_eigen(&self) -> Vec<(f64, DVector<C64>)> {
        let m = self.config.points;
        let mut out = Vec::with_capacity(m);
        for c in 0..self.config.cells_per_shift {
            let idx = self.config.chain(c);
            let a = self.chain_matrix(c);
            let (vals, vecs) = linalg::hermitian_eigen(&(a.adjoint() * &a));
            for (col, v) in vals.into_iter().enumerate() {
                let mut full = DVector::zeros(m);
                for (r, &j) in idx.iter().enumerate() {
                    full[j] = vecs[(r, col)];
                }
                out.push((v, full));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// `||(A A† - q A† A - 1) φ||`
    pub fn q_commutator_residual(&self, v: &DVector<C64>) -> f64 {
        let q = C64::new(self.config.q, 0.0);
        let r = self.apply(&self.apply_adjoint(v)) - self.apply_adjoint(&self.apply(v)) * q - v;
        r.norm()
    }
}

/// Dense `M x M` matrix of the grid annihilation operator.
pub fn grid_annihilation(q: &DeformationParam, g: &GridConfig) -> Result<DMatrix<C64>> {
    if (q.q() - g.q).abs() > 0.0 {
        return Err(Error::Argument(format!("grid built for q = {}, asked for q = {}", g.q, q.q())));
    }
    Ok(GridLadder::new(*g).to_dense())
}

/// Hamiltonians assembled over the grid ladder operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridKind {
    Dirac,
    Jc(AjcParams),
    Ajc(AjcParams),
}

/// Interleaved spin assembly `δ σ_z ⊗ 1 + c_+ σ_+ ⊗ R + c_- σ_- ⊗ L`.
fn assemble(a: &DMatrix<C64>, m: &ModelParams, kind: GridKind) -> DMatrix<C64> {
    let ad = a.adjoint();
    let (delta, raise, lower) = match kind {
        GridKind::Dirac => {
            let g = (4.0 * m.xi()).sqrt();
            (1.0, (&ad, I * g), (a, -I * g))
        }
        GridKind::Ajc(p) => {
            let ph = C64::from_polar(p.eta, p.phi);
            (p.delta, (&ad, ph), (a, ph.conj()))
        }
        GridKind::Jc(p) => {
            let ph = C64::from_polar(p.eta, p.phi);
            (p.delta, (a, ph), (&ad, ph.conj()))
        }
    };
    let n = a.nrows();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        h[(2 * i, 2 * i)] = C64::new(delta, 0.0);
        h[(2 * i + 1, 2 * i + 1)] = C64::new(-delta, 0.0);
        for j in 0..n {
            h[(2 * i, 2 * j + 1)] = raise.0[(i, j)] * raise.1;
            h[(2 * i + 1, 2 * j)] = lower.0[(i, j)] * lower.1;
        }
    }
    h
}

/// `2M x 2M` Hamiltonian on (grid) ⊗ (spin), interleaved as in the Fock
/// builders.
pub fn grid_hamiltonian(m: &ModelParams, q: &DeformationParam, g: &GridConfig, kind: GridKind) -> Result<DMatrix<C64>> {
    Ok(assemble(&grid_annihilation(q, g)?, m, kind))
}

/// Eigenvalues of a grid Hamiltonian, solved chain by chain. Ascending.
pub fn grid_spectrum(m: &ModelParams, ladder: &GridLadder, kind: GridKind) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * ladder.config.points);
    for c in 0..ladder.config.cells_per_shift {
        out.extend(linalg::hermitian_eigenvalues(&assemble(&ladder.chain_matrix(c), m, kind)));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Splits an ascending list into consecutive groups of `multiplicity`
/// entries, returning `count` groups.
pub fn clusters(sorted: &[f64], multiplicity: usize, count: usize) -> Vec<&[f64]> {
    sorted.chunks(multiplicity).take(count).collect()
}

/// `G = c sqrt(hbar m ω) / sqrt(2 (1 - e^{-2α²}))`, in units of `m c^2`, and
/// the same constant read back off an assembled grid Dirac Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GConstant {
    pub g: f64,
    /// `|coupling block| / (2 sqrt 2 |numerator|)`; the `sqrt 2` is the chiral
    /// combination of the two planar modes and the 2 comes from
    /// `σ_± = (σ_x ± i σ_y)/2`.
    pub assembled: f64,
    pub relative_error: f64,
}

pub fn g_constant(m: &ModelParams, q: &DeformationParam) -> f64 {
    let a2 = q.alpha() * q.alpha();
    m.xi().sqrt() / (2.0 * (1.0 - (-2.0 * a2).exp())).sqrt()
}

pub fn check_g_constant(m: &ModelParams, q: &DeformationParam, g: &GridConfig) -> Result<GConstant> {
    let ladder = GridLadder::new(*g);
    let h = assemble(&ladder.to_dense(), m, GridKind::Dirac);
    let n = g.points;
    let coupling = DMatrix::from_fn(n, n, |i, j| h[(2 * i, 2 * j + 1)]);
    let assembled = coupling.norm() / ladder.numerator().norm() / (2.0 * 2f64.sqrt());
    let gc = g_constant(m, q);
    Ok(GConstant { g: gc, assembled, relative_error: (assembled - gc).abs() / gc })
}

/// One row of the grid convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub points: usize,
    pub spacing: f64,
    /// Largest q-commutator residual over the five lowest `A† A` levels.
    pub commutator_residual: f64,
    /// Largest `|λ - [n]|` over `A† A` levels `n <= 5`.
    pub number_error: f64,
    /// Largest relative error of the grid Dirac levels `E_1, E_2, E_3`.
    pub dirac_errors: [f64; 3],
}

/// Measures a grid against the Fock-space results.
pub fn convergence_row(m: &ModelParams, q: &DeformationParam, g: GridConfig) -> ConvergenceRow {
    let ladder = GridLadder::new(g);
    let k = g.cells_per_shift;
    let eig = ladder.number_eigen();
    let commutator_residual = eig
        .iter()
        .take(5 * k)
        .map(|(_, v)| ladder.q_commutator_residual(v))
        .fold(0.0, f64::max);
    let values: Vec<f64> = eig.iter().map(|(v, _)| *v).collect();
    let number_error = clusters(&values, k, 6)
        .iter()
        .enumerate()
        .flat_map(|(n, c)| c.iter().map(move |v| (v - q_number(n as u32, q)).abs()))
        .fold(0.0, f64::max);

    let spectrum = grid_spectrum(m, &ladder, GridKind::Dirac);
    let positive: Vec<f64> = spectrum.into_iter().filter(|&e| e > 0.0).collect();
    let levels = clusters(&positive, k, 4);
    let mut dirac_errors = [f64::INFINITY; 3];
    for n in 1..4 {
        if let Some(c) = levels.get(n) {
            let e = m.energy(n as u32, q);
            dirac_errors[n - 1] = c.iter().map(|v| (v - e).abs() / e).fold(0.0, f64::max);
        }
    }
    ConvergenceRow { points: g.points, spacing: g.spacing(), commutator_residual, number_error, dirac_errors }
}

/// [`convergence_row`] for each grid size at fixed spacing `α / k`.
pub fn convergence_study(
    m: &ModelParams,
    q: &DeformationParam,
    cells_per_shift: usize,
    points: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    points
        .iter()
        .map(|&p| Ok(convergence_row(m, q, GridConfig::new(q, cells_per_shift, p)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{blockwise_eigenvalues, hermiticity_defect, max_abs};
    use crate::oscillator::equivalence_map;

    fn dq(q: f64) -> DeformationParam {
        DeformationParam::new(q).unwrap()
    }

    fn mp(xi: f64) -> ModelParams {
        ModelParams::new(xi).unwrap()
    }

    /// Normalized Hermite functions sampled on the grid.
    fn hermite_functions(p: &[f64], n_max: usize) -> Vec<DVector<C64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        let pi4 = std::f64::consts::PI.powf(-0.25);
        out.push(p.iter().map(|x| pi4 * (-x * x / 2.0).exp()).collect());
        out.push(p.iter().zip(&out[0]).map(|(x, h0)| 2f64.sqrt() * x * h0).collect());
        for n in 2..=n_max {
            let a = (2.0 / n as f64).sqrt();
            let b = ((n - 1) as f64 / n as f64).sqrt();
            let next = p.iter().enumerate().map(|(j, x)| a * x * out[n - 1][j] - b * out[n - 2][j]).collect();
            out.push(next);
        }
        out.into_iter()
            .map(|v| {
                let d = DVector::from_iterator(v.len(), v.into_iter().map(|x| C64::new(x, 0.0)));
                let n = d.norm();
                d / C64::new(n, 0.0)
            })
            .collect()
    }

    #[test]
    fn config_validation() {
        let d = dq(0.75);
        assert!(GridConfig::new(&dq(1.0), 8, 256).is_err());
        assert!(GridConfig::new(&d, 8, 250).is_err());
        assert!(GridConfig::new(&d, 8, 16).is_err());
        let g = GridConfig::new(&d, 8, 256).unwrap();
        assert!((g.spacing() * 8.0 - d.alpha()).abs() < 1e-15);
        let g2 = GridConfig::with_spacing(&d, d.alpha() / 4.0, 256).unwrap();
        assert_eq!(g2.cells_per_shift(), 4);
        assert!(matches!(
            GridConfig::with_spacing(&d, d.alpha() / 4.3, 256),
            Err(Error::IncommensurateGrid { .. })
        ));
        assert!(grid_annihilation(&dq(0.5), &g).is_err());
    }

    #[test]
    fn adjoint_is_exact_conjugate_transpose() {
        let d = dq(0.6);
        let g = GridConfig::new(&d, 4, 64).unwrap();
        let l = GridLadder::new(g);
        assert_eq!(l.adjoint_dense(), l.to_dense().adjoint());
        let v = DVector::from_fn(64, |j, _| C64::new((j as f64 * 0.3).sin(), (j as f64 * 0.7).cos()));
        assert!((l.apply(&v) - l.to_dense() * &v).norm() < 1e-13);
    }

    #[test]
    fn chains_do_not_mix() {
        let d = dq(0.75);
        let g = GridConfig::new(&d, 4, 64).unwrap();
        let a = GridLadder::new(g).to_dense();
        let n = a.adjoint() * &a;
        let blocks = linalg::invariant_blocks(&n);
        assert_eq!(blocks.len(), 4);
        for (c, b) in blocks.iter().enumerate() {
            assert_eq!(*b, g.chain(c));
        }
    }

    #[test]
    fn number_spectrum_reproduces_q_numbers() {
        for q in [0.5, 0.75] {
            let d = dq(q);
            let g = GridConfig::new(&d, 8, 512).unwrap();
            let l = GridLadder::new(g);
            let vals: Vec<f64> = l.number_eigen().iter().map(|p| p.0).collect();
            for (n, c) in clusters(&vals, 8, 6).iter().enumerate() {
                for v in c.iter() {
                    assert!((v - q_number(n as u32, &d)).abs() < 1e-8, "q {q} n {n}: {v}");
                }
            }
        }
    }

    #[test]
    fn vacuum_is_annihilated() {
        let d = dq(0.75);
        let l = GridLadder::new(GridConfig::new(&d, 8, 512).unwrap());
        let eig = l.number_eigen();
        let (_, v0) = &eig[0];
        assert!(l.apply(v0).norm() / v0.norm() < 1e-6);
    }

    #[test]
    fn commutator_residual_shrinks_with_domain() {
        let d = dq(0.75);
        let rows = convergence_study(&mp(0.25), &d, 8, &[256, 512, 1024]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].commutator_residual < w[0].commutator_residual);
            for n in 0..3 {
                assert!(w[1].dirac_errors[n] <= w[0].dirac_errors[n] || w[1].dirac_errors[n] < 1e-12);
            }
        }
        let last = rows.last().unwrap();
        assert!(last.number_error < 1e-3);
        assert!(last.dirac_errors.iter().all(|&e| e < 1e-2));
    }

    #[test]
    fn approaches_undeformed_ladder() {
        // |<h_(n-1)|A|h_n>| -> sqrt(n) as q -> 1
        let errs: Vec<f64> = [0.99, 0.999]
            .iter()
            .map(|&q| {
                let d = dq(q);
                let points = (27.0 / d.alpha()).ceil() as usize;
                let g = GridConfig::new(&d, 1, points).unwrap();
                let l = GridLadder::new(g);
                let h = hermite_functions(&g.coordinates(), 4);
                (1..=4)
                    .map(|n| {
                        let el = h[n - 1].dotc(&l.apply(&h[n]));
                        (el - I * (n as f64).sqrt()).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] < 0.05, "{errs:?}");
    }

    #[test]
    fn hamiltonians_are_hermitian_and_ajc_matches_dirac() {
        let d = dq(0.75);
        let m = mp(0.25);
        let g = GridConfig::new(&d, 4, 128).unwrap();
        let hd = grid_hamiltonian(&m, &d, &g, GridKind::Dirac).unwrap();
        let ha = grid_hamiltonian(&m, &d, &g, GridKind::Ajc(equivalence_map(&m))).unwrap();
        let p = AjcParams { delta: 0.3, eta: 0.7, phi: 0.4 };
        let hj = grid_hamiltonian(&m, &d, &g, GridKind::Jc(p)).unwrap();
        for h in [&hd, &ha, &hj] {
            assert!(hermiticity_defect(h) < 1e-13);
        }
        assert!(max_abs(&(&hd - &ha)) < 1e-13);
        // chain-by-chain spectrum equals the spectrum of the full matrix
        let full = blockwise_eigenvalues(&hd);
        let chained = grid_spectrum(&m, &GridLadder::new(g), GridKind::Dirac);
        for (a, b) in full.iter().zip(&chained) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn decoupled_ajc_spectrum() {
        let d = dq(0.75);
        let g = GridConfig::new(&d, 2, 32).unwrap();
        let p = AjcParams { delta: 0.8, eta: 0.0, phi: 1.0 };
        let h = grid_hamiltonian(&mp(0.25), &d, &g, GridKind::Ajc(p)).unwrap();
        let ev = blockwise_eigenvalues(&h);
        assert!(ev[..32].iter().all(|&e| (e + 0.8).abs() < 1e-14));
        assert!(ev[32..].iter().all(|&e| (e - 0.8).abs() < 1e-14));
    }

    #[test]
    fn g_constant_consistency() {
        let m = mp(0.25);
        for q in [0.25, 0.75] {
            let d = dq(q);
            let g = GridConfig::new(&d, 2, 64).unwrap();
            let c = check_g_constant(&m, &d, &g).unwrap();
            assert!(c.g > 0.0 && c.relative_error < 1e-12, "{c:?}");
        }
        // G ~ sqrt(xi) / (2 α) as q -> 1
        for q in [0.99, 0.999] {
            let d = dq(q);
            let scaled = g_constant(&m, &d) * d.alpha();
            assert!((scaled - 0.25).abs() < 0.25 * 2.0 * d.alpha() * d.alpha());
        }
        // denominator -> 1 as q -> 0
        let d = dq(1e-12);
        assert!((g_constant(&m, &d) - (0.25f64 / 2.0).sqrt()).abs() < 1e-10);
    }
}
