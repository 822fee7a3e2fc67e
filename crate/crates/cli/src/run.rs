//! Experiment dispatch. Each runner writes its tables into the output
//! directory and returns the checks that decide the exit status.

use std::path::Path;

use qdirac::dynamics::{
    collapse_revival, default_window, fig2_trace, time_grid, zitter_coherent_closed, zitter_number_closed, SpinorState,
    TimeSeries,
};
use qdirac::gridrep::{check_g_constant, convergence_study, GridConfig};
use qdirac::linalg::{self, max_abs, EigenEvolver};
use qdirac::nonrel::{effective_hamiltonian, first_order_energy, jz_first_order, m_expectation_closed, m_observable};
use qdirac::oscillator::{
    angular_momenta, build_ajc_q, build_dirac_q, equivalence_map, spectrum_analytic, spinor_index, AngularConvention,
    ModelParams, Spin,
};
use qdirac::qalgebra::DeformationParam;
use qdirac::states::{coherent_state, fig1_data, fig1_grid, mandel_qq_numeric, CoherentParam};
use qdirac::verify::{self, Bound, Check, VerifyOptions};
use qdirac::C64;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{fmt_num, RunReport, Table};
use crate::CliError;

struct Outcome {
    checks: Vec<Check>,
    tables: Vec<Table>,
    lines: Vec<String>,
}

pub fn run(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let experiment = config.experiment()?;
    let opts = VerifyOptions { tol_scale: config.tol_scale()?, seed: config.seed.unwrap_or(7) };
    let outcome = match experiment {
        Experiment::Spectrum => spectrum(config, &opts)?,
        Experiment::Mandel => mandel(config, &opts)?,
        Experiment::ZitterNumber => zitter_number(config, &opts)?,
        Experiment::ZitterCoherent => zitter_coherent(config, &opts)?,
        Experiment::Fig2 => fig2(config, &opts)?,
        Experiment::NrLimit => nr_limit(config, &opts)?,
        Experiment::GridVerify => grid(config, &opts)?,
        Experiment::Equivalence => equivalence(config, &opts)?,
        Experiment::Verify => verify_all(&opts)?,
    };
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for t in &outcome.tables {
        files.push(display(&t.write(&dir)?));
    }
    for line in &outcome.lines {
        println!("{line}");
    }
    let recipe = format!("{}_config.toml", experiment.id());
    std::fs::write(dir.join(&recipe), config.to_toml())?;
    files.push(recipe);
    let report = RunReport::new(experiment.id(), config.clone(), outcome.checks, files);
    report.write(&dir)?;
    Ok(report)
}

fn display(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn with_common(t: Table, q: &DeformationParam, m: Option<&ModelParams>) -> Table {
    let t = t.meta("q", fmt_num(q.q()));
    match m {
        Some(m) => t.meta("xi", fmt_num(m.xi())).meta("units", "m c^2 = hbar = 1, tau = m c^2 t / hbar"),
        None => t,
    }
}

fn series_table(name: &str, s: &TimeSeries) -> Table {
    let mut t = Table::new(name, vec!["tau", "Lz", "Sz", "Jz"]);
    t.rows = (0..s.len()).map(|k| vec![s.tau[k], s.lz[k], s.sz[k], s.jz[k]]).collect();
    t
}

fn spectrum(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (q, m, tr) = (c.deformation()?, c.model()?, c.truncation(40)?);
    let n_max = c.n.unwrap_or(tr.dim() as u32 - 1).min(tr.dim() as u32 - 1).max(1);
    let sp = spectrum_analytic(&m, &q, n_max)?;
    let ev = linalg::hermitian_eigenvalues(build_dirac_q(&m, &q, tr).matrix());
    let mut worst = 0.0f64;
    for l in &sp.levels {
        for target in [l.e_plus, l.e_minus] {
            let nearest = ev.iter().map(|v| (v - target).abs()).fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest / target.abs());
        }
    }
    let ground = ev.iter().filter(|v| (*v - 1.0).abs() < 1e-10).count();
    let mut t = with_common(Table::new("spectrum.csv", vec!["n", "E_plus", "E_minus"]), &q, Some(&m))
        .meta("trunc", tr.dim())
        .meta("ground", "E_0 = +1 on |0, up>, unpaired");
    t.rows = sp.levels.iter().map(|l| vec![l.n as f64, l.e_plus, l.e_minus]).collect();
    Ok(Outcome {
        checks: vec![
            Check::new("spectrum_rel_err", Bound::Within(1e-10), worst, opts),
            Check::new("ground_miscount", Bound::Within(0.0), (ground as f64 - 1.0).abs(), opts),
        ],
        tables: vec![t],
        lines: vec![],
    })
}

fn mandel(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let qs = match c.q {
        Some(q) => vec![q],
        None => vec![0.25, 0.75],
    };
    let points = c.mandel_points.unwrap_or(48);
    let (mut tables, mut checks) = (Vec::new(), Vec::new());
    for q in qs {
        let d = DeformationParam::new(q)?;
        let data = fig1_data(d, &fig1_grid(&d, points))?;
        let mut t = with_common(Table::new(format!("mandel_q{}.csv", fmt_num(q)), vec!["alpha_sq", "Qq", "Q"]), &d, None)
            .meta("radius", fmt_num(d.radius()));
        // the vacuum row has Q undefined
        let vacuum = fig1_data(d, &[0.0])?;
        t.rows = vacuum.iter().chain(&data).map(|p| vec![p.alpha_sq, p.qq, p.q_stat.unwrap_or(f64::NAN)]).collect();
        let mut qq_err = 0.0f64;
        for p in &data {
            let cp = CoherentParam::real(p.alpha_sq.sqrt(), d)?;
            qq_err = qq_err.max((mandel_qq_numeric(&cp, cp.auto_truncation())? - p.qq).abs());
        }
        let max_qq = data.iter().map(|p| p.qq).fold(f64::NEG_INFINITY, f64::max);
        let min_q = data.iter().map(|p| p.q_stat.unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);
        let tag = fmt_num(q);
        if d.is_undeformed() {
            let poisson = data.iter().map(|p| p.q_stat.unwrap_or(f64::NAN).abs()).fold(0.0, f64::max);
            checks.push(Check::new(&format!("q{tag}_max_abs_Q"), Bound::Within(1e-8), poisson, opts));
        } else {
            checks.push(Check::new(&format!("q{tag}_max_Qq"), Bound::Below(0.0), max_qq, opts));
            checks.push(Check::new(&format!("q{tag}_min_Q"), Bound::Above(0.0), min_q, opts));
        }
        checks.push(Check::new(&format!("q{tag}_Qq_err"), Bound::Within(1e-8), qq_err, opts));
        tables.push(t);
    }
    Ok(Outcome { checks, tables, lines: vec![] })
}

fn zitter_number(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (q, m, n) = (c.deformation()?, c.model()?, c.level()?);
    let tr = c.truncation(n as usize + 4)?;
    if n as usize >= tr.dim() {
        return Err(CliError::Config(format!("n = {n} needs trunc > {n}")));
    }
    let (tau_max, steps) = c.time(20.0, 401)?;
    let tau = time_grid(tau_max, steps);
    let series = TimeSeries::from_fn(&tau, |t| zitter_number_closed(n, &m, &q, t).expect("n >= 1"))?;

    let ev = EigenEvolver::new(build_dirac_q(&m, &q, tr).matrix());
    let jz = angular_momenta(&q, tr, AngularConvention::Deformed).jz;
    let psi0 = SpinorState::basis(tr, n as usize - 1, Spin::Down)?;
    let worst = tau
        .iter()
        .zip(&series.jz)
        .map(|(&t, &closed)| {
            let brute = linalg::expectation(jz.matrix(), &ev.evolve(psi0.amplitudes(), t));
            (brute - closed).abs() / closed.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let t = with_common(series_table("zitter_number.csv", &series), &q, Some(&m))
        .meta("initial", format!("|{}, down>", n - 1))
        .meta("convention", "L_z = -[n]");
    Ok(Outcome {
        checks: vec![Check::new("jz_rel_err_vs_evolution", Bound::Within(1e-9), worst, opts)],
        tables: vec![t],
        lines: vec![],
    })
}

fn zitter_coherent(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (p, m) = (c.coherent()?, c.model()?);
    let q = p.q();
    let (tau_max, steps) = c.time(20.0, 401)?;
    let tau = time_grid(tau_max, steps);
    let series = TimeSeries::from_fn(&tau, |t| zitter_coherent_closed(&p, &m, t))?;

    let tr = p.auto_truncation();
    let ev = EigenEvolver::new(build_dirac_q(&m, &q, tr).matrix());
    let jz = angular_momenta(&q, tr, AngularConvention::Deformed).jz;
    let psi0 = SpinorState::product(coherent_state(&p, tr)?.amplitudes(), Spin::Down)?;
    let worst = tau
        .iter()
        .zip(&series.jz)
        .map(|(&t, &closed)| {
            let brute = linalg::expectation(jz.matrix(), &ev.evolve(psi0.amplitudes(), t));
            (brute - closed).abs() / closed.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let t = with_common(series_table("zitter_coherent.csv", &series), &q, Some(&m))
        .meta("alpha", fmt_num(p.alpha().re))
        .meta("trunc", tr.dim())
        .meta("convention", "L_z = -[n]");
    Ok(Outcome {
        checks: vec![Check::new("jz_rel_err_vs_evolution", Bound::Within(1e-9), worst, opts)],
        tables: vec![t],
        lines: vec![],
    })
}

fn fig2(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (p, m) = (c.coherent()?, c.model()?);
    let q = p.q();
    let (tau_max, steps) = c.time(verify::FIG2_TAU_MAX, verify::FIG2_STEPS)?;
    let series = fig2_trace(&p, &m, &time_grid(tau_max, steps))?;
    let window = default_window(&m, &q);
    let mut checks = Vec::new();
    let mut t = with_common(series_table("fig2.csv", &series), &q, Some(&m)).meta("alpha", fmt_num(p.alpha().re));
    if let Some(cr) = collapse_revival(&series, window) {
        t = t
            .meta("envelope_window", fmt_num(window))
            .meta("envelope_minimum_tau", fmt_num(cr.minimum_tau))
            .meta("envelope_revival_tau", fmt_num(cr.revival_tau));
        if q.is_undeformed() {
            let spread = series.jz.iter().map(|v| (v - series.jz[0]).abs()).fold(0.0, f64::max);
            checks.push(Check::new("jz_flatness", Bound::Within(1e-9), spread, opts));
        } else {
            checks.push(Check::new("collapse_ratio", Bound::Below(0.25), cr.collapse_ratio(), opts));
            checks.push(Check::new("revival_ratio", Bound::Above(2.0), cr.revival_ratio(), opts));
        }
    }
    Ok(Outcome { checks, tables: vec![t], lines: vec![] })
}

fn nr_limit(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (q, m, n) = (c.deformation()?, ModelParams::new(c.xi.unwrap_or(0.01))?, c.level()?);
    let tr = c.truncation(n as usize + 4)?;
    if n as usize >= tr.dim() {
        return Err(CliError::Config(format!("n = {n} needs trunc > {n}")));
    }
    let (tau_max, steps) = c.time(20.0, 401)?;
    let tau = time_grid(tau_max, steps);
    let h = effective_hamiltonian(&m, &q, tr);
    let s = 0.5f64.sqrt();

    let ev = EigenEvolver::new(h.operator().matrix());
    let mo = m_observable(&q, tr);
    let psi0 = SpinorState::from_pairs(
        tr,
        &[
            (spinor_index(n as usize, Spin::Up), C64::new(s, 0.0)),
            (spinor_index(n as usize - 1, Spin::Down), C64::new(s, 0.0)),
        ],
    )?;
    let mut t = with_common(Table::new("nr.csv", vec!["tau", "M", "Jz"]), &q, Some(&m))
        .meta("n", n)
        .meta("M_initial", "(|n, up> + |n-1, down>)/sqrt 2")
        .meta("Jz_initial", "|n-1, down>")
        .meta("expansion_parameter", fmt_num(h.expansion_parameter()));
    let mut m_err = 0.0f64;
    for &x in &tau {
        let closed = m_expectation_closed(n, s, s, &m, &q, x)?;
        m_err = m_err.max((linalg::expectation(mo.matrix(), &ev.evolve(psi0.amplitudes(), x)) - closed).abs());
        t.rows.push(vec![x, closed, jz_first_order(n, &m, &q, x)?]);
    }

    let mut comm = 0.0f64;
    for conv in [AngularConvention::Deformed, AngularConvention::Standard] {
        let ops = angular_momenta(&q, tr, conv);
        comm = comm.max(max_abs(h.operator().commutator(&ops.sz).matrix()));
        comm = comm.max(max_abs(h.operator().commutator(&ops.lz).matrix()));
    }
    let errs: Vec<f64> = [1.0, 0.5, 0.25]
        .iter()
        .map(|f| {
            let mm = ModelParams::new(m.xi() * f).expect("scaled xi >= 0");
            (mm.energy(n, &q) - first_order_energy(n, &mm, &q)).abs()
        })
        .collect();
    let ratio_dev = errs.windows(2).map(|w| (w[0] / w[1] - 4.0).abs()).fold(0.0, f64::max);
    Ok(Outcome {
        checks: vec![
            Check::new("commutator_max", Bound::Within(0.0), comm, opts),
            Check::new("energy_ratio_minus_4", Bound::Within(0.5), ratio_dev, opts),
            Check::new("m_err", Bound::Within(1e-9), m_err, opts),
        ],
        tables: vec![t],
        lines: vec![],
    })
}

fn grid(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (q, m) = (c.deformation()?, c.model()?);
    let k = c.grid.cells_per_shift;
    let rows = convergence_study(&m, &q, k, &c.grid.points)?;
    let mut t = with_common(
        Table::new("grid.csv", vec!["M", "h", "commutator_residual", "eig_err_n1", "eig_err_n2", "eig_err_n3"]),
        &q,
        Some(&m),
    )
    .meta("cells_per_shift", k);
    t.rows = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.points as f64, r.spacing, r.commutator_residual];
            v.extend(r.dirac_errors);
            v
        })
        .collect();
    let worst_step = rows
        .windows(2)
        .map(|w| w[1].commutator_residual / w[0].commutator_residual)
        .fold(0.0, f64::max);
    let last = rows.last().ok_or_else(|| CliError::Config("grid.points is empty".into()))?;
    let gc = check_g_constant(&m, &q, &GridConfig::new(&q, k, last.points)?)?;
    let mut checks = vec![
        Check::new("number_err", Bound::Within(1e-3), last.number_error, opts),
        Check::new("dirac_rel_err", Bound::Within(1e-2), last.dirac_errors.iter().cloned().fold(0.0, f64::max), opts),
        Check::new("g_constant_rel_err", Bound::Within(1e-12), gc.relative_error, opts),
    ];
    if rows.len() > 1 {
        checks.insert(0, Check::new("residual_step_ratio", Bound::Below(1.0), worst_step, opts));
    }
    Ok(Outcome { checks, tables: vec![t], lines: vec![] })
}

fn equivalence(c: &ExperimentConfig, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let (q, m, tr) = (c.deformation()?, c.model()?, c.truncation(40)?);
    let diff = max_abs(&(build_dirac_q(&m, &q, tr).matrix() - build_ajc_q(&equivalence_map(&m), &q, tr).matrix()));
    Ok(Outcome {
        checks: vec![Check::new("max_entry_diff", Bound::Within(1e-14), diff, opts)],
        tables: vec![],
        lines: vec![],
    })
}

fn verify_all(opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let criteria = verify::run_all(opts)?;
    let lines = criteria.iter().map(|c| c.summary()).collect();
    let checks = criteria
        .into_iter()
        .flat_map(|c| {
            let id = c.id;
            c.checks.into_iter().map(move |mut k| {
                k.name = format!("c{id:02}_{}", k.name);
                k
            })
        })
        .collect();
    Ok(Outcome { checks, tables: vec![], lines })
}
