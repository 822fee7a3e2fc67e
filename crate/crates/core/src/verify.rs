//! The acceptance suite: closed forms against independent numerical routes.
//!
//! Every criterion is a list of [`Check`]s. Tolerance bounds scale with
//! [`VerifyOptions::tol_scale`]; sign and ordering bounds do not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{collapse_revival, default_window, fig2_trace, time_grid, zitter_number_closed, SpinorState};
use crate::gridrep::convergence_study;
use crate::linalg::{self, max_abs, DenseExp, EigenEvolver};
use crate::nonrel::{effective_hamiltonian, first_order_energy, m_expectation_closed, m_observable};
use crate::oscillator::{
    angular_momenta, build_ajc_q, build_dirac_q, equivalence_map, spinor_index, subspace_block, AngularConvention,
    ModelParams, Spin,
};
use crate::qalgebra::{annihilation, q_number, DeformationParam, Truncation};
use crate::states::{coherent_state, fig1_data, fig1_grid, mandel_q, mandel_qq, mandel_qq_numeric, CoherentParam};
use crate::{Result, C64};

pub const Q_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const XI_GRID: [f64; 3] = [0.1, 0.25, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Bound {
    /// `measured <= value * tol_scale`
    Within(f64),
    /// `measured < value`
    Below(f64),
    /// `measured > value`
    Above(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub bound: Bound,
    pub measured: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, bound: Bound, measured: f64, opts: &VerifyOptions) -> Self {
        let pass = match bound {
            Bound::Within(t) => measured <= t * opts.tol_scale,
            Bound::Below(x) => measured < x,
            Bound::Above(x) => measured > x,
        };
        Self { name: name.to_owned(), bound, measured, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line: `PASS  3 title | name=measured ...`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self.checks.iter().map(|c| format!("{}={:.3e}", c.name, c.measured)).collect();
        format!(
            "{} {:>2} {} | {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            parts.join(" ")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub tol_scale: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tol_scale: 1.0, seed: 7 }
    }
}

fn dq(q: f64) -> DeformationParam {
    DeformationParam::new(q).expect("grid value")
}

fn mp(xi: f64) -> ModelParams {
    ModelParams::new(xi).expect("grid value")
}

fn trunc(n: usize) -> Truncation {
    Truncation::new(n).expect("grid value")
}

fn grid() -> impl Iterator<Item = (DeformationParam, ModelParams)> {
    Q_GRID.iter().flat_map(|&q| XI_GRID.iter().map(move |&xi| (dq(q), mp(xi))))
}

fn criterion(id: u8, title: &str, checks: Vec<Check>) -> Criterion {
    Criterion { id, title: title.to_owned(), checks }
}

/// Dense diagonalization at `N = 40` against `±sqrt(1 + 4ξ[n])`.
pub fn spectrum_reproduction(opts: &VerifyOptions) -> Criterion {
    let tr = trunc(40);
    let (mut worst, mut ground_miscount) = (0.0f64, 0.0f64);
    for (q, m) in grid() {
        let ev = linalg::hermitian_eigenvalues(build_dirac_q(&m, &q, tr).matrix());
        for n in 1..=35 {
            let e = m.energy(n, &q);
            for target in [e, -e] {
                let nearest = ev.iter().map(|v| (v - target).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest / e);
            }
        }
        let ground = ev.iter().filter(|v| (*v - 1.0).abs() < 1e-10).count();
        ground_miscount = ground_miscount.max((ground as f64 - 1.0).abs());
    }
    criterion(
        1,
        "spectrum reproduction",
        vec![
            Check::new("max_rel_err", Bound::Within(1e-10), worst, opts),
            Check::new("ground_miscount", Bound::Within(0.0), ground_miscount, opts),
        ],
    )
}

pub fn equivalence(opts: &VerifyOptions) -> Criterion {
    let tr = trunc(40);
    let worst = grid()
        .map(|(q, m)| {
            let hd = build_dirac_q(&m, &q, tr);
            let ha = build_ajc_q(&equivalence_map(&m), &q, tr);
            max_abs(&(hd.matrix() - ha.matrix()))
        })
        .fold(0.0, f64::max);
    criterion(2, "Dirac / anti-Jaynes-Cummings equivalence", vec![Check::new("max_entry_diff", Bound::Within(1e-14), worst, opts)])
}

/// `<L_z>, <S_z>, <J_z>` by eigendecomposition of the full matrix, initial
/// state `|n-1>|down>`.
fn brute_force_number_trace(n: u32, m: &ModelParams, q: &DeformationParam, tau: &[f64]) -> Vec<[f64; 3]> {
    let tr = trunc(n as usize + 4);
    let ev = EigenEvolver::new(build_dirac_q(m, q, tr).matrix());
    let ops = angular_momenta(q, tr, AngularConvention::Deformed);
    let psi0 = SpinorState::basis(tr, n as usize - 1, Spin::Down).expect("inside truncation");
    tau.iter()
        .map(|&t| {
            let psi = ev.evolve(psi0.amplitudes(), t);
            [
                linalg::expectation(ops.lz.matrix(), &psi),
                linalg::expectation(ops.sz.matrix(), &psi),
                linalg::expectation(ops.jz.matrix(), &psi),
            ]
        })
        .collect()
}

pub fn zitterbewegung_oracle(opts: &VerifyOptions) -> Criterion {
    let tau = time_grid(20.0, 50);
    let mut worst = 0.0f64;
    for (q, m) in grid() {
        for n in 1..=6 {
            let brute = brute_force_number_trace(n, &m, &q, &tau);
            for (b, &t) in brute.iter().zip(&tau) {
                let c = zitter_number_closed(n, &m, &q, t).expect("n >= 1");
                for (x, y) in b.iter().zip([c.lz, c.sz, c.jz]) {
                    worst = worst.max((x - y).abs() / y.abs().max(1.0));
                }
            }
        }
    }
    criterion(3, "Zitterbewegung closed forms", vec![Check::new("max_rel_err", Bound::Within(1e-9), worst, opts)])
}

fn sample_variance(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

/// Least-squares amplitude `A` of `c0 + A sin²(ω τ)`.
fn fit_sin2_amplitude(tau: &[f64], y: &[f64], omega: f64) -> f64 {
    let s: Vec<f64> = tau.iter().map(|t| (omega * t).sin().powi(2)).collect();
    let k = tau.len() as f64;
    let (ss, s1) = (s.iter().map(|v| v * v).sum::<f64>(), s.iter().sum::<f64>());
    let (sy, y1) = (s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(), y.iter().sum::<f64>());
    (k * sy - s1 * y1) / (k * ss - s1 * s1)
}

pub fn conservation_dichotomy(opts: &VerifyOptions) -> Criterion {
    let tau = time_grid(20.0, 50);
    let (mut conserved, mut amp_err) = (0.0f64, 0.0f64);
    for (q, m) in grid() {
        for n in 1..=6u32 {
            let jz: Vec<f64> = brute_force_number_trace(n, &m, &q, &tau).iter().map(|v| v[2]).collect();
            if q.is_undeformed() || n == 1 {
                conserved = conserved.max(sample_variance(&jz));
            } else {
                let g2 = 4.0 * m.xi() * q_number(n, &q);
                let expected = g2 * (1.0 - q.pow(n - 1)) / (1.0 + g2);
                amp_err = amp_err.max((fit_sin2_amplitude(&tau, &jz, m.energy(n, &q)) - expected).abs());
            }
        }
    }
    criterion(
        4,
        "J_z conservation dichotomy",
        vec![
            Check::new("conserved_variance", Bound::Within(1e-18), conserved, opts),
            Check::new("amplitude_err", Bound::Within(1e-9), amp_err, opts),
        ],
    )
}

pub fn standard_conservation(opts: &VerifyOptions) -> Criterion {
    let tr = trunc(40);
    let worst = grid()
        .map(|(q, m)| {
            let h = build_dirac_q(&m, &q, tr);
            let jz = angular_momenta(&q, tr, AngularConvention::Standard).jz;
            h.commutator(&jz).interior().norm()
        })
        .fold(0.0, f64::max);
    criterion(5, "standard-convention J_z conservation", vec![Check::new("commutator_norm", Bound::Within(1e-12), worst, opts)])
}

pub fn mandel_statistics(opts: &VerifyOptions) -> Result<Criterion> {
    let (mut err, mut min_q) = (0.0f64, f64::INFINITY);
    for q in [0.25, 0.75] {
        for z in [0.25f64, 0.5, 1.0] {
            let p = CoherentParam::real(z.sqrt(), dq(q))?;
            let tr = p.auto_truncation();
            err = err.max((mandel_qq_numeric(&p, tr)? - mandel_qq(&p)).abs());
            min_q = min_q.min(mandel_q(&p, tr)?);
        }
    }
    Ok(criterion(
        6,
        "Mandel statistics",
        vec![
            Check::new("qq_err", Bound::Within(1e-8), err, opts),
            Check::new("min_q", Bound::Above(0.0), min_q, opts),
        ],
    ))
}

fn eigen_residual(p: &CoherentParam) -> Result<f64> {
    let tr = p.auto_truncation();
    let s = coherent_state(p, tr)?;
    let a = annihilation(&p.q(), tr);
    Ok((a.matrix() * s.amplitudes() - s.amplitudes() * p.alpha()).norm())
}

/// Seeded draws of `(q, α)` with `|α|²` up to 90% of the radius of
/// convergence (at most 4) and a random phase.
pub fn random_coherent_params(seed: u64, count: usize) -> Vec<CoherentParam> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = dq(rng.gen_range(0.05..=1.0));
            let z = rng.gen_range(0.0..0.9 * q.radius().min(4.0));
            let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            CoherentParam::new(C64::from_polar(z.sqrt(), phase), q).expect("inside radius")
        })
        .collect()
}

pub fn coherent_eigen_property(opts: &VerifyOptions) -> Result<Criterion> {
    let mut fixed = 0.0f64;
    for q in Q_GRID {
        for z in [0.25f64, 0.5, 1.0] {
            fixed = fixed.max(eigen_residual(&CoherentParam::real(z.sqrt(), dq(q))?)?);
        }
    }
    let mut random = 0.0f64;
    for p in random_coherent_params(opts.seed, 16) {
        random = random.max(eigen_residual(&p)?);
    }
    Ok(criterion(
        7,
        "coherent-state eigenvalue property",
        vec![
            Check::new("residual_grid", Bound::Within(1e-8), fixed, opts),
            Check::new("residual_seeded", Bound::Within(1e-8), random, opts),
        ],
    ))
}

/// Collapse-revival trace: `α = 1`, `ξ = 0.25`, `τ ∈ [0, 200]`.
pub const FIG2_XI: f64 = 0.25;
pub const FIG2_TAU_MAX: f64 = 200.0;
pub const FIG2_STEPS: usize = 20001;

pub fn collapse_revival_structure(opts: &VerifyOptions) -> Result<Criterion> {
    let m = mp(FIG2_XI);
    let tau = time_grid(FIG2_TAU_MAX, FIG2_STEPS);
    let q = dq(0.75);
    let trace = fig2_trace(&CoherentParam::real(1.0, q)?, &m, &tau)?;
    let cr = collapse_revival(&trace, default_window(&m, &q)).expect("non-empty trace");

    // q = 1 by brute-force evolution of |α>|down>
    let p1 = CoherentParam::real(1.0, DeformationParam::undeformed())?;
    let tr = p1.auto_truncation();
    let h = build_dirac_q(&m, &p1.q(), tr);
    let ev = EigenEvolver::new(h.matrix());
    let jz = angular_momenta(&p1.q(), tr, AngularConvention::Deformed).jz;
    let psi0 = SpinorState::product(coherent_state(&p1, tr)?.amplitudes(), Spin::Down)?;
    let j0 = linalg::expectation(jz.matrix(), psi0.amplitudes());
    let flat = tau
        .iter()
        .step_by(10)
        .map(|&t| (linalg::expectation(jz.matrix(), &ev.evolve(psi0.amplitudes(), t)) - j0).abs())
        .fold(0.0, f64::max);

    Ok(criterion(
        8,
        "collapse and revival",
        vec![
            Check::new("collapse_ratio", Bound::Below(0.25), cr.collapse_ratio(), opts),
            Check::new("revival_ratio", Bound::Above(2.0), cr.revival_ratio(), opts),
            Check::new("undeformed_flatness", Bound::Within(1e-9), flat, opts),
        ],
    ))
}

pub fn interferometer(opts: &VerifyOptions) -> Criterion {
    let tr = trunc(8);
    let mut worst = 0.0f64;
    for (q, m) in grid() {
        let h = build_dirac_q(&m, &q, tr);
        for tau in [0.5, 1.0, 5.0] {
            let u = DenseExp::propagator(h.matrix(), tau);
            for n in 1..=6u32 {
                let b = subspace_block(&m, &q, n).expect("n >= 1").propagator(tau);
                let idx = [spinor_index(n as usize, Spin::Up), spinor_index(n as usize - 1, Spin::Down)];
                for r in 0..2 {
                    for c in 0..2 {
                        worst = worst.max((u[(idx[r], idx[c])] - b[(r, c)]).norm());
                    }
                }
            }
        }
    }
    criterion(9, "interferometer propagator", vec![Check::new("max_block_diff", Bound::Within(1e-10), worst, opts)])
}

/// `ξ` values for the second-order scaling of the first-order energies.
pub const NR_XI: [f64; 3] = [0.02, 0.01, 0.005];

pub fn nonrelativistic_limit(opts: &VerifyOptions) -> Result<Criterion> {
    let tr = trunc(12);
    let mut comm = 0.0f64;
    for q in Q_GRID.map(dq) {
        let h = effective_hamiltonian(&mp(0.01), &q, tr);
        for conv in [AngularConvention::Deformed, AngularConvention::Standard] {
            let ops = angular_momenta(&q, tr, conv);
            comm = comm.max(max_abs(&h.operator().commutator(&ops.sz).matrix().clone()));
            comm = comm.max(max_abs(&h.operator().commutator(&ops.lz).matrix().clone()));
        }
    }

    let mut ratio_dev = 0.0f64;
    for q in Q_GRID.map(dq) {
        for n in 1..=3 {
            let errs: Vec<f64> =
                NR_XI.iter().map(|&xi| (mp(xi).energy(n, &q) - first_order_energy(n, &mp(xi), &q)).abs()).collect();
            for w in errs.windows(2) {
                ratio_dev = ratio_dev.max((w[0] / w[1] - 4.0).abs());
            }
        }
    }

    let tau = time_grid(20.0, 50);
    let (cu, cd) = (0.6, 0.8);
    let mut m_err = 0.0f64;
    for q in Q_GRID.map(dq) {
        for xi in [0.01, 0.05] {
            let m = mp(xi);
            let h = effective_hamiltonian(&m, &q, tr);
            let ev = EigenEvolver::new(h.operator().matrix());
            let mo = m_observable(&q, tr);
            for n in 1..=4u32 {
                let psi0 = SpinorState::from_pairs(
                    tr,
                    &[
                        (spinor_index(n as usize, Spin::Up), C64::new(cu, 0.0)),
                        (spinor_index(n as usize - 1, Spin::Down), C64::new(cd, 0.0)),
                    ],
                )?;
                for &t in &tau {
                    let psi = ev.evolve(psi0.amplitudes(), t);
                    let closed = m_expectation_closed(n, cu, cd, &m, &q, t)?;
                    m_err = m_err.max((linalg::expectation(mo.matrix(), &psi) - closed).abs());
                }
            }
        }
    }

    Ok(criterion(
        10,
        "non-relativistic limit",
        vec![
            Check::new("commutator_max", Bound::Within(0.0), comm, opts),
            Check::new("ratio_minus_4", Bound::Within(0.5), ratio_dev, opts),
            Check::new("m_err", Bound::Within(1e-9), m_err, opts),
        ],
    ))
}

/// Grid sizes and spacing `h = α / GRID_CELLS` used for the grid criterion.
pub const GRID_POINTS: [usize; 3] = [256, 512, 1024];
pub const GRID_CELLS: usize = 8;
pub const GRID_Q: f64 = 0.75;
pub const GRID_XI: f64 = 0.25;

pub fn grid_realization(opts: &VerifyOptions) -> Result<Criterion> {
    let rows = convergence_study(&mp(GRID_XI), &dq(GRID_Q), GRID_CELLS, &GRID_POINTS)?;
    let worst_step = rows
        .windows(2)
        .map(|w| w[1].commutator_residual / w[0].commutator_residual)
        .fold(0.0, f64::max);
    let last = rows.last().expect("three grids");
    Ok(criterion(
        11,
        "grid realization",
        vec![
            Check::new("residual_step_ratio", Bound::Below(1.0), worst_step, opts),
            Check::new("number_err", Bound::Within(1e-3), last.number_error, opts),
            Check::new("dirac_rel_err", Bound::Within(1e-2), last.dirac_errors.iter().cloned().fold(0.0, f64::max), opts),
        ],
    ))
}

/// Interior points of each Mandel-parameter sweep.
pub const FIG1_POINTS: usize = 24;

pub fn sign_pattern(opts: &VerifyOptions) -> Result<Criterion> {
    let (mut max_qq, mut min_q) = (f64::NEG_INFINITY, f64::INFINITY);
    for q in [0.25, 0.75].map(dq) {
        for pt in fig1_data(q, &fig1_grid(&q, FIG1_POINTS))? {
            max_qq = max_qq.max(pt.qq);
            min_q = min_q.min(pt.q_stat.unwrap_or(f64::NAN));
        }
    }
    Ok(criterion(
        12,
        "Mandel sign pattern",
        vec![
            Check::new("max_qq", Bound::Below(0.0), max_qq, opts),
            Check::new("min_q", Bound::Above(0.0), min_q, opts),
        ],
    ))
}

/// Runs every criterion in order.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<Criterion>> {
    Ok(vec![
        spectrum_reproduction(opts),
        equivalence(opts),
        zitterbewegung_oracle(opts),
        conservation_dichotomy(opts),
        standard_conservation(opts),
        mandel_statistics(opts)?,
        coherent_eigen_property(opts)?,
        collapse_revival_structure(opts)?,
        interferometer(opts),
        nonrelativistic_limit(opts)?,
        grid_realization(opts)?,
        sign_pattern(opts)?,
    ])
}
