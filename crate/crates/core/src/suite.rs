//! The reproduction suite: every acceptance experiment, compared against
//! the published values with fixed tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cases::{ExperimentSpec, InitMode, InitialCondition};
use crate::diagnostics::Norm;
use crate::error::Result;
use crate::field::CellField;
use crate::flux::first_order_upwind_step;
use crate::fv2::{central_slopes, fv2_tendency, FaceTraces2};
use crate::fv4::gauss_traces;
use crate::grid::Grid;
use crate::harness::{convergence_with, ConvergenceConfig, RunCache};
use crate::io::{fmt_f64, to_csv};
use crate::limiters::{LimiterKind, SubcellRecon};
use crate::solver::{Scheme, Simulation, SpatialOperator, VelocitySamples};
use crate::timestepping::SspScheme;
use crate::velocity::{cgrid_faces, FaceVelocity, QuadVelocity, StreamCase};

/// One compared quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("{target} ± {tol}"),
            pass: (value - target).abs() <= tol,
        }
    }

    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("<= {limit:e}"),
            pass: value <= limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!(">= {limit}"),
            pass: value >= limit,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            expected: "true".into(),
            pass: ok,
        }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub number: u8,
    pub title: &'static str,
    run: fn(&mut RunCache) -> Result<Vec<Check>>,
}

/// Result of one criterion. A failed sub-run is recorded in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: &'static str,
    pub number: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

pub const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: "fv2-orders",
        number: 1,
        title: "FV2 limited L2 convergence orders, 128 to 256",
        run: fv2_orders,
    },
    Criterion {
        id: "nk-orders",
        number: 2,
        title: "NK_MP order collapse below one",
        run: nk_orders,
    },
    Criterion {
        id: "fv4-orders",
        number: 3,
        title: "FV4 unlimited L1/L2/Linf convergence orders",
        run: fv4_orders,
    },
    Criterion {
        id: "fv2-sbr",
        number: 4,
        title: "SBR LeVeque errors and extrema, FV2 100x100, 1256 steps",
        run: fv2_sbr,
    },
    Criterion {
        id: "max-principle",
        number: 5,
        title: "Per-stage maximum principles to machine precision",
        run: max_principle,
    },
    Criterion {
        id: "dominance",
        number: 6,
        title: "BJ factors never exceed N2N_MP factors",
        run: dominance,
    },
    Criterion {
        id: "identities",
        number: 7,
        title: "Structural identities",
        run: identities,
    },
    Criterion {
        id: "sign",
        number: 8,
        title: "Sign preservation under compressible face speeds",
        run: sign_preservation,
    },
];

pub fn find(id: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

pub fn evaluate(c: &Criterion, cache: &mut RunCache) -> CriterionReport {
    let (checks, error) = match (c.run)(cache) {
        Ok(checks) => (checks, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    CriterionReport {
        id: c.id,
        number: c.number,
        title: c.title,
        checks,
        error,
    }
}

/// Evaluate the selected criteria (all when `only` is empty), sharing runs.
pub fn run_suite(only: &[&'static Criterion], cache: &mut RunCache) -> Vec<CriterionReport> {
    let selected: Vec<&Criterion> = if only.is_empty() {
        CRITERIA.iter().collect()
    } else {
        only.to_vec()
    };
    selected.into_iter().map(|c| evaluate(c, cache)).collect()
}

pub const SUMMARY_HEADER: [&str; 6] = ["criterion", "id", "check", "value", "expected", "pass"];

pub fn summary_csv(reports: &[CriterionReport]) -> Result<String> {
    let rows = reports.iter().flat_map(|r| {
        let mut rows: Vec<Vec<String>> = r
            .checks
            .iter()
            .map(|c| {
                vec![
                    r.number.to_string(),
                    r.id.to_string(),
                    c.name.clone(),
                    fmt_f64(c.value),
                    c.expected.clone(),
                    c.pass.to_string(),
                ]
            })
            .collect();
        if let Some(e) = &r.error {
            rows.push(vec![
                r.number.to_string(),
                r.id.to_string(),
                "error".into(),
                String::new(),
                e.clone(),
                "false".into(),
            ]);
        }
        rows
    });
    to_csv(&SUMMARY_HEADER, rows)
}

const FV2_LIMITED: [(LimiterKind, [f64; 4]); 3] = [
    (LimiterKind::Bj, [1.677, 2.082, 2.071, 1.672]),
    (LimiterKind::N2n, [1.676, 2.087, 2.077, 1.669]),
    (LimiterKind::Kuzmin, [1.685, 2.087, 2.063, 1.676]),
];
const NK_ORDERS: [f64; 4] = [0.653, 0.813, 0.659, 0.799];
const FV4_ORDERS: [(Norm, [f64; 4]); 3] = [
    (Norm::L1, [3.806, 4.153, 3.870, 4.070]),
    (Norm::L2, [3.735, 4.050, 3.716, 4.033]),
    (Norm::Linf, [3.836, 3.552, 3.371, 4.215]),
];
/// Relative `[L1, L2, Linf]` errors after 1256 steps.
const SBR_TABLE: [(LimiterKind, [f64; 3]); 3] = [
    (LimiterKind::N2n, [0.321384, 0.368622, 0.849103]),
    (LimiterKind::Bj, [0.323794, 0.369762, 0.847545]),
    (LimiterKind::Kuzmin, [0.334256, 0.372376, 0.813771]),
];
const MP_TOL: f64 = 1e-12;

fn fv2_study(limiters: Vec<LimiterKind>) -> ConvergenceConfig {
    ConvergenceConfig {
        scheme: Scheme::Fv2,
        limiters,
        cases: StreamCase::ALL.to_vec(),
        ic: InitialCondition::CosBump,
        init_mode: None,
        time_scheme: SspScheme::Ssp22,
        courant_target: 0.5,
        resolutions: vec![128, 256],
        norms: vec![Norm::L2],
    }
}

pub fn fv4_study() -> ConvergenceConfig {
    ConvergenceConfig {
        scheme: Scheme::Fv4,
        limiters: vec![LimiterKind::Unlimited],
        cases: StreamCase::ALL.to_vec(),
        ic: InitialCondition::CosSqBump,
        init_mode: Some(InitMode::Gauss3x3),
        time_scheme: SspScheme::Ssp33,
        courant_target: 0.5,
        resolutions: vec![128, 256],
        norms: Norm::ALL.to_vec(),
    }
}

pub fn fv2_limited_study() -> ConvergenceConfig {
    fv2_study(FV2_LIMITED.iter().map(|(l, _)| *l).collect())
}

pub fn nk_study() -> ConvergenceConfig {
    fv2_study(vec![LimiterKind::Nk])
}

pub fn sbr_spec(limiter: LimiterKind) -> ExperimentSpec {
    ExperimentSpec::new(Scheme::Fv2, limiter, StreamCase::sbr(), InitialCondition::LeVeque, 100).with_steps(1256)
}

/// FV4 solid-body rotation of the LeVeque bodies at `(n, courant)`.
pub fn fv4_sbr_specs() -> Vec<ExperimentSpec> {
    let mut v = Vec::new();
    for (n, cn) in [(100, 0.5), (200, 0.3)] {
        for l in [LimiterKind::Nk, LimiterKind::N2n, LimiterKind::Global] {
            v.push(
                ExperimentSpec::new(Scheme::Fv4, l, StreamCase::sbr(), InitialCondition::LeVeque, n).with_courant(cn),
            );
        }
    }
    v
}

fn fv2_orders(cache: &mut RunCache) -> Result<Vec<Check>> {
    let t = convergence_with(&fv2_limited_study(), cache)?;
    let mut checks = Vec::new();
    for (l, targets) in FV2_LIMITED {
        for (case, target) in StreamCase::ALL.into_iter().zip(targets) {
            let o = t.order(l, Norm::L2, case).unwrap_or(f64::NAN);
            checks.push(Check::within(format!("{l} {} L2 order", case.name()), o, target, 0.2));
        }
    }
    Ok(checks)
}

fn nk_orders(cache: &mut RunCache) -> Result<Vec<Check>> {
    let t = convergence_with(&nk_study(), cache)?;
    let mut checks = Vec::new();
    for (case, target) in StreamCase::ALL.into_iter().zip(NK_ORDERS) {
        let o = t.order(LimiterKind::Nk, Norm::L2, case).unwrap_or(f64::NAN);
        checks.push(Check::within(format!("nk {} L2 order", case.name()), o, target, 0.2));
        checks.push(Check {
            name: format!("nk {} L2 order below one", case.name()),
            value: o,
            expected: "< 1".into(),
            pass: o < 1.0,
        });
    }
    Ok(checks)
}

fn fv4_orders(cache: &mut RunCache) -> Result<Vec<Check>> {
    let t = convergence_with(&fv4_study(), cache)?;
    let mut checks = Vec::new();
    for (norm, targets) in FV4_ORDERS {
        for (case, target) in StreamCase::ALL.into_iter().zip(targets) {
            let o = t.order(LimiterKind::Unlimited, norm, case).unwrap_or(f64::NAN);
            checks.push(Check::within(
                format!("{} {} order", case.name(), norm.name()),
                o,
                target,
                0.4,
            ));
            if norm == Norm::L2 {
                checks.push(Check::at_least(format!("{} l2 order floor", case.name()), o, 3.3));
            }
        }
    }
    Ok(checks)
}

fn fv2_sbr(cache: &mut RunCache) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut maxima = Vec::new();
    for (l, errs) in SBR_TABLE {
        let r = &cache.get_or_run(&sbr_spec(l))?.report;
        for (norm, target) in Norm::ALL.into_iter().zip(errs) {
            checks.push(Check::within(
                format!("{l} relative {}", norm.name()),
                r.error(norm),
                target,
                0.05 * target,
            ));
        }
        checks.push(Check::at_most(format!("{l} |min|"), r.min.abs(), 1e-12));
        checks.push(Check::at_most(format!("{l} max - 1"), r.max - 1.0, 1e-12));
        maxima.push(r.max);
    }
    checks.push(Check::holds(
        "max ordering n2n >= bj >= kuzmin",
        maxima[0] >= maxima[1] && maxima[1] >= maxima[2],
    ));
    Ok(checks)
}

fn max_principle(cache: &mut RunCache) -> Result<Vec<Check>> {
    let mut specs: Vec<ExperimentSpec> = fv2_limited_study().specs().chain(nk_study().specs()).collect();
    specs.extend(SBR_TABLE.iter().map(|(l, _)| sbr_spec(*l)));
    specs.extend(fv4_sbr_specs());
    let mut checks = Vec::new();
    for spec in specs {
        let r = cache.get_or_run(&spec)?;
        let v = r.report.max_mp_violation.unwrap_or(f64::NAN);
        checks.push(Check::at_most(
            format!(
                "{} {} {} {}x{} cn {}",
                spec.scheme,
                spec.limiter,
                spec.stream.name(),
                spec.nx,
                spec.ny,
                spec.courant_target
            ),
            v,
            MP_TOL,
        ));
    }
    Ok(checks)
}

/// Uniform values in `[0, 1)`, with a smooth component on odd seeds.
pub fn random_field(grid: &Grid, seed: u64) -> CellField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smooth = seed % 2 == 1;
    let (fx, fy) = (rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0));
    CellField::from_fn(grid, |i, j| {
        let noise: f64 = rng.gen();
        if smooth {
            let s = (std::f64::consts::TAU * (fx * grid.x_center(i) + fy * grid.y_center(j))).sin();
            0.5 + 0.4 * s + 0.1 * noise
        } else {
            noise
        }
    })
}

fn count_dominance_failures(bj: &[f64], n2n: &[f64]) -> usize {
    bj.iter().zip(n2n).filter(|(b, n)| b > n).count()
}

fn dominance(_: &mut RunCache) -> Result<Vec<Check>> {
    let grid = Grid::square(24)?;
    let mut checks = Vec::new();
    for scheme in [Scheme::Fv2, Scheme::Fv4] {
        let bj = SpatialOperator::for_stream(scheme, LimiterKind::Bj, StreamCase::sbr(), grid)?;
        let n2n = SpatialOperator::for_stream(scheme, LimiterKind::N2n, StreamCase::sbr(), grid)?;
        let mut failures = 0;
        for seed in 0..50 {
            let u = random_field(&grid, seed);
            failures += count_dominance_failures(&bj.alpha(&u, None)?, &n2n.alpha(&u, None)?);
        }
        checks.push(Check::at_most(
            format!("{scheme} random-field counterexamples"),
            failures as f64,
            0.0,
        ));
    }
    let spec = sbr_spec(LimiterKind::N2n);
    let sbr_grid = spec.grid()?;
    let bj = SpatialOperator::for_stream(Scheme::Fv2, LimiterKind::Bj, spec.stream, sbr_grid)?;
    let n2n = SpatialOperator::for_stream(Scheme::Fv2, LimiterKind::N2n, spec.stream, sbr_grid)?;
    let mut sim = Simulation::new(spec)?;
    let mut failures = 0usize;
    let mut error = None;
    sim.run_with(
        &mut |view| match (bj.alpha(view.input, None), n2n.alpha(view.input, None)) {
            (Ok(a), Ok(b)) => failures += count_dominance_failures(&a, &b),
            (Err(e), _) | (_, Err(e)) => error = Some(e),
        },
    )?;
    if let Some(e) = error {
        return Err(e);
    }
    checks.push(Check::at_most("fv2 sbr stage counterexamples", failures as f64, 0.0));
    Ok(checks)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn identities(_: &mut RunCache) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut div: f64 = 0.0;
    for case in StreamCase::ALL {
        for n in [16, 64, 100, 128, 256] {
            let grid = Grid::square(n)?;
            div = div.max(max_abs(cgrid_faces(&case, &grid, 0.0).divergence(&grid)));
        }
    }
    checks.push(Check::at_most("c-grid divergence", div, 1e-13));

    let grid = Grid::square(20)?;
    let (mut trace_mean, mut zhang): (f64, f64) = (0.0, 0.0);
    for seed in 0..10 {
        let u = random_field(&grid, seed);
        for limiter in [LimiterKind::Unlimited, LimiterKind::N2n, LimiterKind::Bj] {
            let op = SpatialOperator::for_stream(Scheme::Fv2, limiter, StreamCase::sbr(), grid)?;
            let r = central_slopes(&u, &grid);
            let alpha = op.alpha(&u, None)?;
            let mut t = FaceTraces2::with_capacity(grid.num_cells());
            for k in 0..grid.num_cells() {
                t.push(u[k], alpha[k], &r.cell_points(k));
            }
            for k in 0..grid.num_cells() {
                let scale = u[k].abs().max(1.0);
                trace_mean = trace_mean.max((0.5 * (t.r[k] + t.l[k]) - u[k]).abs() / scale);
                trace_mean = trace_mean.max((0.5 * (t.u[k] + t.d[k]) - u[k]).abs() / scale);
            }
            let op4 = SpatialOperator::for_stream(Scheme::Fv4, limiter, StreamCase::sbr(), grid)?;
            let mut r4 = crate::fv4::reconstruct(&u, &grid);
            r4.alpha = op4.alpha(&u, None)?;
            let t4 = gauss_traces(&r4);
            for k in 0..grid.num_cells() {
                zhang = zhang.max((t4.zhang_mean(k) - u[k]).abs() / u[k].abs().max(1.0));
            }
        }
    }
    checks.push(Check::at_most("fv2 trace-mean identity", trace_mean, 1e-13));
    checks.push(Check::at_most("fv4 zhang identity", zhang, 1e-13));

    let grid = Grid::square(12)?;
    let mut constancy: f64 = 0.0;
    for scheme in [Scheme::Fv2, Scheme::Fv4] {
        for limiter in LimiterKind::ALL {
            if crate::limiters::check_supported(limiter, scheme).is_err() {
                continue;
            }
            for case in StreamCase::ALL {
                let op = SpatialOperator::for_stream(scheme, limiter, case, grid)?;
                let dt = 0.25 / op.peak_courant(1.0);
                let c = 0.7;
                let mut sim =
                    Simulation::from_operator(op, scheme.default_time_scheme(), CellField::on_grid(&grid, c), dt, 3)?;
                sim.run()?;
                constancy = constancy.max(max_abs(sim.state().as_slice().iter().map(|v| v - c)));
            }
        }
    }
    checks.push(Check::at_most("constancy preservation", constancy, 1e-13));

    let mut mass: f64 = 0.0;
    for scheme in [Scheme::Fv2, Scheme::Fv4] {
        let spec = ExperimentSpec::new(
            scheme,
            LimiterKind::N2n,
            StreamCase::sin(),
            InitialCondition::LeVeque,
            24,
        )
        .with_end_time(0.25);
        let mut sim = Simulation::new(spec)?;
        let grid = *sim.grid();
        let mut prev = sim.state().mass(&grid);
        while !sim.finished() {
            sim.step()?;
            let m = sim.state().mass(&grid);
            mass = mass.max((m - prev).abs() / prev.abs());
            prev = m;
        }
    }
    checks.push(Check::at_most("mass conservation per step", mass, 1e-12));

    let grid = Grid::square(16)?;
    let vel = cgrid_faces(&StreamCase::sbr(), &grid, 0.0);
    let mut mismatches = 0;
    let mut u = random_field(&grid, 7);
    let dt = 0.4 / crate::fv2::fv2_courant(&vel, &grid, 1.0);
    for _ in 0..10 {
        let r = central_slopes(&u, &grid);
        let mut t = FaceTraces2::with_capacity(grid.num_cells());
        for k in 0..grid.num_cells() {
            t.push(u[k], 0.0, &r.cell_points(k));
        }
        let l = fv2_tendency(&t, &vel, &grid);
        let data = u.as_slice().iter().zip(&l).map(|(a, b)| a + dt * b).collect();
        let next = CellField::from_vec(grid.nx(), grid.ny(), data)?;
        let oracle = first_order_upwind_step(&u, &vel, &grid, dt);
        mismatches += next
            .as_slice()
            .iter()
            .zip(oracle.as_slice())
            .filter(|(a, b)| a.to_bits() != b.to_bits())
            .count();
        u = next;
    }
    checks.push(Check::at_most(
        "alpha=0 fv2 vs upwind, differing cells",
        mismatches as f64,
        0.0,
    ));
    Ok(checks)
}

/// Random face speeds in `[-1, 1]` laid out for `scheme`.
pub fn random_velocity(scheme: Scheme, grid: &Grid, seed: u64) -> VelocitySamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.num_cells();
    let mut draw = || (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<f64>>();
    match scheme {
        Scheme::Fv2 => VelocitySamples::Faces(FaceVelocity::from_faces(grid, draw(), draw())),
        Scheme::Fv4 => VelocitySamples::Gauss(QuadVelocity::from_points(grid, draw(), draw(), draw(), draw())),
    }
}

fn sign_preservation(_: &mut RunCache) -> Result<Vec<Check>> {
    let grid = Grid::square(24)?;
    let mut checks = Vec::new();
    for scheme in [Scheme::Fv2, Scheme::Fv4] {
        for limiter in LimiterKind::ALL.into_iter().filter(|l| l.is_limited()) {
            if crate::limiters::check_supported(limiter, scheme).is_err() {
                continue;
            }
            let mut worst = f64::INFINITY;
            for seed in 0..3 {
                let op = SpatialOperator::with_velocity(scheme, limiter, grid, random_velocity(scheme, &grid, seed))?;
                let dt = 0.99 * scheme.stage_bound(false) / op.peak_courant(1.0);
                let mut u0 = random_field(&grid, 100 + seed);
                for v in u0.as_mut_slice().iter_mut().step_by(3) {
                    *v = 0.0;
                }
                let mut sim = Simulation::from_operator(op, scheme.default_time_scheme(), u0, dt, 100)?;
                sim.run()?;
                worst = worst.min(sim.state().min());
            }
            checks.push(Check::at_least(format!("{scheme} {limiter} minimum"), worst, -1e-12));
        }
    }
    Ok(checks)
}
