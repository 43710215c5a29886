//! Stage operator (limit, reconstruct, flux, assemble) and the time
//! integration driver.

use crate::cases::{exact_solution, ExperimentSpec};
use crate::diagnostics::ErrorReport;
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::fv2::{central_slopes, fv2_courant, fv2_tendency, FaceTraces2};
use crate::fv4::{fv4_courant, fv4_tendency, reconstruct, GaussTraces4};
use crate::grid::Grid;
use crate::limiters::{alpha_field, check_supported, Bounds, LimiterBounds, LimiterKind};
use crate::timestepping::{plan_steps, ssp_step, SspScheme, StepPlan};
use crate::velocity::{cgrid_faces, peak_rate, quad_velocity, FaceVelocity, QuadVelocity, StreamCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Fv2,
    Fv4,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fv2 => "fv2",
            Scheme::Fv4 => "fv4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fv2" => Some(Scheme::Fv2),
            "fv4" => Some(Scheme::Fv4),
            _ => None,
        }
    }

    pub fn default_time_scheme(&self) -> SspScheme {
        match self {
            Scheme::Fv2 => SspScheme::Ssp22,
            Scheme::Fv4 => SspScheme::Ssp33,
        }
    }

    /// Forward-Euler stage Courant bound under which the limited scheme
    /// keeps its maximum principle (incompressible) or its sign
    /// (compressible).
    pub fn stage_bound(&self, incompressible: bool) -> f64 {
        match (self, incompressible) {
            (Scheme::Fv2, true) => 0.5,
            (Scheme::Fv2, false) => 0.25,
            (Scheme::Fv4, true) => 0.25,
            (Scheme::Fv4, false) => 0.125,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Velocity samples at full amplitude, in the layout the scheme consumes.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocitySamples {
    Faces(FaceVelocity),
    Gauss(QuadVelocity),
}

/// One forward-Euler stage `ū + Δt L(ū, t)` of a scheme/limiter pair.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    scheme: Scheme,
    limiter: LimiterKind,
    grid: Grid,
    velocity: VelocitySamples,
    /// Supplies the time factor; `None` means steady velocity.
    stream: Option<StreamCase>,
    /// Stage Courant number per unit `Δt` at time factors `+1` and `−1`.
    rate: [f64; 2],
}

impl SpatialOperator {
    /// Operator for one of the stream-function flows.
    pub fn for_stream(scheme: Scheme, limiter: LimiterKind, stream: StreamCase, grid: Grid) -> Result<Self> {
        let velocity = match scheme {
            Scheme::Fv2 => VelocitySamples::Faces(cgrid_faces(&stream, &grid, 0.0).at_time_factor(1.0)),
            Scheme::Fv4 => VelocitySamples::Gauss(quad_velocity(&stream, &grid, 0.0).at_time_factor(1.0)),
        };
        Self::new(scheme, limiter, grid, velocity, Some(stream))
    }

    /// Operator over arbitrary, steady velocity samples.
    pub fn with_velocity(scheme: Scheme, limiter: LimiterKind, grid: Grid, velocity: VelocitySamples) -> Result<Self> {
        Self::new(scheme, limiter, grid, velocity, None)
    }

    fn new(
        scheme: Scheme,
        limiter: LimiterKind,
        grid: Grid,
        velocity: VelocitySamples,
        stream: Option<StreamCase>,
    ) -> Result<Self> {
        check_supported(limiter, scheme)?;
        match (&velocity, scheme) {
            (VelocitySamples::Faces(v), Scheme::Fv2) if (v.nx, v.ny) == grid.shape() => {}
            (VelocitySamples::Gauss(v), Scheme::Fv4) if (v.nx, v.ny) == grid.shape() => {}
            _ => {
                return Err(Error::Config(format!(
                    "velocity samples do not match {} on a {}x{} grid",
                    scheme.name(),
                    grid.nx(),
                    grid.ny()
                )))
            }
        }
        let mut op = Self {
            scheme,
            limiter,
            grid,
            velocity,
            stream,
            rate: [0.0; 2],
        };
        op.rate = [op.courant_at_factor(1.0, 1.0), op.courant_at_factor(-1.0, 1.0)];
        Ok(op)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn limiter(&self) -> LimiterKind {
        self.limiter
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        self.stream.map_or(1.0, |s| s.time_factor(t))
    }

    fn set_factor(&mut self, g: f64) {
        match &mut self.velocity {
            VelocitySamples::Faces(v) => v.time_factor = g,
            VelocitySamples::Gauss(v) => v.time_factor = g,
        }
    }

    fn set_time(&mut self, t: f64) {
        self.set_factor(self.time_factor(t));
    }

    fn courant_at_factor(&mut self, g: f64, dt: f64) -> f64 {
        self.set_factor(g);
        match &self.velocity {
            VelocitySamples::Faces(v) => fv2_courant(v, &self.grid, dt),
            VelocitySamples::Gauss(v) => fv4_courant(v, &self.grid, dt),
        }
    }

    /// Stage Courant number at time `t`.
    pub fn courant(&self, t: f64, dt: f64) -> f64 {
        let g = self.time_factor(t);
        let rate = if g < 0.0 { self.rate[1] } else { self.rate[0] };
        g.abs() * rate * dt
    }

    /// Largest stage Courant number over all times.
    pub fn peak_courant(&self, dt: f64) -> f64 {
        self.rate[0].max(self.rate[1]) * dt
    }

    /// Per-cell limiter factors for the field `u`.
    pub fn alpha(&self, u: &CellField, global: Option<Bounds>) -> Result<Vec<f64>> {
        u.check_grid(&self.grid)?;
        match self.scheme {
            Scheme::Fv2 => alpha_field(self.limiter, &central_slopes(u, &self.grid), u, &self.grid, global),
            Scheme::Fv4 => alpha_field(self.limiter, &reconstruct(u, &self.grid), u, &self.grid, global),
        }
    }

    /// `L(ū, t)` with limiting applied against the bounds of `u` itself.
    pub fn tendency(&mut self, u: &CellField, t: f64, global: Option<Bounds>) -> Result<Vec<f64>> {
        Ok(self.limited_tendency(u, t, global)?.0)
    }

    /// The tendency together with the bounds used to limit it.
    fn limited_tendency(&mut self, u: &CellField, t: f64, global: Option<Bounds>) -> Result<(Vec<f64>, LimiterBounds)> {
        u.check_grid(&self.grid)?;
        self.set_time(t);
        let grid = &self.grid;
        let bounds = LimiterBounds::new(self.limiter, u, grid, global)?;
        let n = grid.num_cells();
        let l = match (&self.velocity, self.scheme) {
            (VelocitySamples::Faces(v), Scheme::Fv2) => {
                let mut traces = FaceTraces2::with_capacity(n);
                bounds.limit(&central_slopes(u, grid), u, grid, |k, a, p| traces.push(u[k], a, p))?;
                fv2_tendency(&traces, v, grid)
            }
            (VelocitySamples::Gauss(v), Scheme::Fv4) => {
                let mut traces = GaussTraces4::with_capacity(n);
                bounds.limit(&reconstruct(u, grid), u, grid, |k, a, p| traces.push(u[k], a, p))?;
                fv4_tendency(&traces, v, grid)
            }
            _ => unreachable!("velocity layout checked at construction"),
        };
        Ok((l, bounds))
    }

    /// `ū + Δt L(ū, t)`.
    pub fn euler(&mut self, u: &CellField, t: f64, dt: f64, global: Option<Bounds>) -> Result<CellField> {
        Ok(self.euler_checked(u, t, dt, global)?.0)
    }

    /// `ū + Δt L(ū, t)` and the stage's worst maximum-principle violation.
    fn euler_checked(
        &mut self,
        u: &CellField,
        t: f64,
        dt: f64,
        global: Option<Bounds>,
    ) -> Result<(CellField, Option<f64>)> {
        let (l, bounds) = self.limited_tendency(u, t, global)?;
        let data = u.as_slice().iter().zip(&l).map(|(a, b)| a + dt * b).collect();
        let out = CellField::from_vec(u.nx(), u.ny(), data)?;
        let violation = bounds.principle_violation(&out, &self.grid);
        Ok((out, violation))
    }
}

/// Diagnostics of one forward-Euler stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub step: usize,
    pub stage: usize,
    pub t: f64,
    pub courant: f64,
    /// `None` when the limiter has no maximum principle.
    pub mp_violation: Option<f64>,
}

/// What a stage hook sees.
#[derive(Debug)]
pub struct StageView<'a> {
    pub step: usize,
    pub stage: usize,
    pub t: f64,
    pub dt: f64,
    pub input: &'a CellField,
    pub output: &'a CellField,
    /// Field extrema at the start of the step.
    pub global: Bounds,
}

/// Time integration of one configuration.
#[derive(Debug, Clone)]
pub struct Simulation {
    spec: Option<ExperimentSpec>,
    op: SpatialOperator,
    time_scheme: SspScheme,
    plan: StepPlan,
    state: CellField,
    step: usize,
    log: Vec<StageRecord>,
}

/// Step plan for a spec: Courant-limited, or forced by `spec.steps`.
pub fn plan_for(spec: &ExperimentSpec, op: &SpatialOperator) -> Result<StepPlan> {
    let rate = peak_rate(&spec.stream, op.grid());
    plan_steps(
        spec.time_scheme,
        spec.end_time,
        spec.courant_target,
        rate,
        spec.steps,
        |dt| op.peak_courant(dt),
    )
}

impl Simulation {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let grid = spec.grid()?;
        let op = SpatialOperator::for_stream(spec.scheme, spec.limiter, spec.stream, grid)?;
        let plan = plan_for(&spec, &op)?;
        let state = spec.initial_field()?;
        Ok(Self {
            time_scheme: spec.time_scheme,
            spec: Some(spec),
            op,
            plan,
            state,
            step: 0,
            log: Vec::new(),
        })
    }

    /// A run over an explicit operator and step size, with no associated
    /// exact solution.
    pub fn from_operator(
        op: SpatialOperator,
        time_scheme: SspScheme,
        initial: CellField,
        dt: f64,
        n_steps: usize,
    ) -> Result<Self> {
        initial.check_grid(op.grid())?;
        Ok(Self {
            spec: None,
            op,
            time_scheme,
            plan: StepPlan {
                dt,
                n_steps,
                stage_offsets: time_scheme.stage_offsets().to_vec(),
                courant: f64::NAN,
            },
            state: initial,
            step: 0,
            log: Vec::new(),
        })
    }

    pub fn spec(&self) -> Option<&ExperimentSpec> {
        self.spec.as_ref()
    }

    pub fn grid(&self) -> &Grid {
        self.op.grid()
    }

    pub fn operator(&self) -> &SpatialOperator {
        &self.op
    }

    pub fn plan(&self) -> &StepPlan {
        &self.plan
    }

    pub fn state(&self) -> &CellField {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn finished(&self) -> bool {
        self.step >= self.plan.n_steps
    }

    pub fn time(&self) -> f64 {
        match &self.spec {
            Some(s) if self.finished() => s.end_time,
            _ => self.step as f64 * self.plan.dt,
        }
    }

    pub fn stage_log(&self) -> &[StageRecord] {
        &self.log
    }

    /// Worst per-stage maximum-principle violation so far.
    pub fn max_mp_violation(&self) -> Option<f64> {
        self.log.iter().filter_map(|r| r.mp_violation).reduce(f64::max)
    }

    pub fn max_courant(&self) -> f64 {
        self.log.iter().map(|r| r.courant).fold(0.0, f64::max)
    }

    pub fn step(&mut self) -> Result<()> {
        self.step_with(&mut |_| {})
    }

    /// Advance one step, calling `hook` after every stage.
    pub fn step_with(&mut self, hook: &mut dyn FnMut(&StageView)) -> Result<()> {
        let dt = self.plan.dt;
        let t0 = self.step as f64 * dt;
        let global = Bounds::of_field(&self.state);
        let step = self.step;
        let scheme = self.time_scheme;
        let Self { op, log, state, .. } = self;
        let mut stage = 0;
        let next = ssp_step(scheme, state, t0, dt, |u, t| {
            let (out, mp_violation) = op.euler_checked(u, t, dt, Some(global))?;
            let courant = op.courant(t, dt);
            log.push(StageRecord {
                step,
                stage,
                t,
                courant,
                mp_violation,
            });
            hook(&StageView {
                step,
                stage,
                t,
                dt,
                input: u,
                output: &out,
                global,
            });
            stage += 1;
            Ok(out)
        })?;
        self.state = next;
        self.step += 1;
        Ok(())
    }

    pub fn run(&mut self) -> Result<()> {
        self.run_with(&mut |_| {})
    }

    pub fn run_with(&mut self, hook: &mut dyn FnMut(&StageView)) -> Result<()> {
        while !self.finished() {
            self.step_with(hook)?;
        }
        Ok(())
    }

    /// Errors against the exact solution at the current time.
    pub fn report(&self) -> Result<ErrorReport> {
        let spec = self
            .spec
            .as_ref()
            .ok_or_else(|| Error::Config("run has no exact solution".into()))?;
        let exact = exact_solution(spec, self.time())?;
        ErrorReport::new(
            &self.state,
            &exact,
            self.grid(),
            self.max_mp_violation(),
            self.max_courant(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::InitialCondition;

    #[test]
    fn diag_plan() {
        let spec = ExperimentSpec::new(
            Scheme::Fv2,
            LimiterKind::Unlimited,
            StreamCase::diag(),
            InitialCondition::CosBump,
            100,
        );
        let sim = Simulation::new(spec).unwrap();
        assert_eq!(sim.plan().n_steps, 400);
        assert_eq!(sim.plan().dt, 0.0025);
    }

    #[test]
    fn sbr_plan_near_1256() {
        let spec = ExperimentSpec::new(
            Scheme::Fv2,
            LimiterKind::N2n,
            StreamCase::sbr(),
            InitialCondition::LeVeque,
            100,
        );
        let sim = Simulation::new(spec.clone()).unwrap();
        assert!(sim.plan().n_steps.abs_diff(1256) <= 1);
        assert!(sim.plan().courant <= 0.5 + 1e-12);
        let forced = Simulation::new(spec.clone().with_steps(1256)).unwrap();
        assert!((forced.plan().courant - 0.5).abs() < 0.01);
        assert!(matches!(
            Simulation::new(spec.with_steps(1000)),
            Err(Error::CourantExceeded { .. })
        ));
    }

    #[test]
    fn zero_end_time_keeps_initial_field() {
        let spec = ExperimentSpec::new(
            Scheme::Fv2,
            LimiterKind::Unlimited,
            StreamCase::diag(),
            InitialCondition::CosBump,
            16,
        )
        .with_end_time(0.0);
        let mut sim = Simulation::new(spec.clone()).unwrap();
        sim.run().unwrap();
        assert_eq!(sim.state(), &spec.initial_field().unwrap());
        assert!(sim.stage_log().is_empty());
    }

    #[test]
    fn stage_count_and_times() {
        let spec = ExperimentSpec::new(
            Scheme::Fv4,
            LimiterKind::N2n,
            StreamCase::sin(),
            InitialCondition::CosSqBump,
            16,
        );
        let mut sim = Simulation::new(spec).unwrap();
        sim.step().unwrap();
        sim.step().unwrap();
        let dt = sim.plan().dt;
        let times: Vec<f64> = sim.stage_log().iter().map(|r| r.t).collect();
        let expect = [0.0, dt, 0.5 * dt, dt, 2.0 * dt, 1.5 * dt];
        for (a, b) in times.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
