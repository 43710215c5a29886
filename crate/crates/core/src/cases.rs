//! Initial conditions, exact solutions and the experiment description.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::Grid;
use crate::limiters::LimiterKind;
use crate::solver::Scheme;
use crate::timestepping::SspScheme;
use crate::velocity::StreamCase;

const BUMP_CENTER: (f64, f64) = (0.5, 0.75);
const BUMP_RADIUS: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// Compact C¹ cosine bump of radius 0.15 about (0.5, 0.75).
    CosBump,
    /// The square of [`InitialCondition::CosBump`]; C⁴.
    CosSqBump,
    /// Slotted cylinder, cone and cosine hill.
    LeVeque,
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::CosBump => "cos",
            InitialCondition::CosSqBump => "cos2",
            InitialCondition::LeVeque => "leveque",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cos" | "cosbump" => Some(Self::CosBump),
            "cos2" | "cossq" | "cossqbump" => Some(Self::CosSqBump),
            "leveque" => Some(Self::LeVeque),
            _ => None,
        }
    }
}

/// How cell means are initialised from a point function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// `ū_{i,j} = u₀(x_i, y_j)`.
    PointSample,
    /// Tensor 3-point Gauss–Legendre average over the cell.
    Gauss3x3,
}

impl InitMode {
    pub fn name(&self) -> &'static str {
        match self {
            InitMode::PointSample => "point",
            InitMode::Gauss3x3 => "gauss",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "point" | "point_sample" => Some(Self::PointSample),
            "gauss" | "gauss3x3" => Some(Self::Gauss3x3),
            _ => None,
        }
    }
}

fn cos_bump(x: f64, y: f64) -> f64 {
    let r = ((x - BUMP_CENTER.0).powi(2) + (y - BUMP_CENTER.1).powi(2)).sqrt();
    0.5 * (1.0 + (PI * (r / BUMP_RADIUS).min(1.0)).cos())
}

fn leveque(x: f64, y: f64) -> f64 {
    let r = ((x - 0.5).powi(2) + (y - 0.75).powi(2)).sqrt();
    let r_cone = ((x - 0.5).powi(2) + (y - 0.25).powi(2)).sqrt();
    let r_cos = ((x - 0.25).powi(2) + (y - 0.5).powi(2)).sqrt();
    // First matching branch wins.
    let slot = x > 0.475 && x <= 0.525;
    if r <= 0.15 && (!slot || y >= 0.85) {
        1.0
    } else if r_cone <= 0.15 {
        1.0 - r_cone / 0.15
    } else if r_cos <= 0.15 {
        0.5 * (1.0 + (PI * r_cos / 0.15).cos())
    } else {
        0.0
    }
}

/// `u₀(x, y)`.
pub fn eval_ic(ic: InitialCondition, x: f64, y: f64) -> f64 {
    match ic {
        InitialCondition::CosBump => cos_bump(x, y),
        InitialCondition::CosSqBump => cos_bump(x, y).powi(2),
        InitialCondition::LeVeque => leveque(x, y),
    }
}

/// Cell means of `f` on `grid`.
pub fn cell_means_of(grid: &Grid, mode: InitMode, f: impl Fn(f64, f64) -> f64) -> CellField {
    match mode {
        InitMode::PointSample => CellField::from_fn(grid, |i, j| f(grid.x_center(i), grid.y_center(j))),
        InitMode::Gauss3x3 => {
            let a = (0.6f64).sqrt();
            let nodes = [-a, 0.0, a];
            let weights = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
            let (hx, hy) = (0.5 * grid.dx(), 0.5 * grid.dy());
            CellField::from_fn(grid, |i, j| {
                let (xc, yc) = (grid.x_center(i), grid.y_center(j));
                let mut sum = 0.0;
                for (ny, wy) in nodes.iter().zip(weights) {
                    for (nx, wx) in nodes.iter().zip(weights) {
                        sum += wx * wy * f(xc + nx * hx, yc + ny * hy);
                    }
                }
                sum
            })
        }
    }
}

pub fn init_cell_means(ic: InitialCondition, grid: &Grid, mode: InitMode) -> CellField {
    cell_means_of(grid, mode, |x, y| eval_ic(ic, x, y))
}

/// One fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scheme: Scheme,
    pub limiter: LimiterKind,
    pub time_scheme: SspScheme,
    pub stream: StreamCase,
    pub ic: InitialCondition,
    pub init_mode: InitMode,
    pub nx: usize,
    pub ny: usize,
    pub courant_target: f64,
    pub end_time: f64,
    /// Force a step count instead of deriving it from the Courant target.
    pub steps: Option<usize>,
}

impl ExperimentSpec {
    /// A spec with the defaults that go with `scheme`: SSP22 for FV2,
    /// SSP33 for FV4, Courant target 0.5, end time one period.
    pub fn new(scheme: Scheme, limiter: LimiterKind, stream: StreamCase, ic: InitialCondition, n: usize) -> Self {
        let init_mode = match ic {
            InitialCondition::LeVeque => InitMode::PointSample,
            _ => InitMode::Gauss3x3,
        };
        Self {
            scheme,
            limiter,
            time_scheme: scheme.default_time_scheme(),
            stream,
            ic,
            init_mode,
            nx: n,
            ny: n,
            courant_target: 0.5,
            end_time: stream.period(),
            steps: None,
        }
    }

    pub fn with_courant(mut self, cn: f64) -> Self {
        self.courant_target = cn;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_end_time(mut self, t: f64) -> Self {
        self.end_time = t;
        self
    }

    pub fn with_init_mode(mut self, mode: InitMode) -> Self {
        self.init_mode = mode;
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.courant_target > 0.0 && self.courant_target <= 1.0) {
            return Err(Error::Config(format!(
                "courant target must lie in (0, 1], got {}",
                self.courant_target
            )));
        }
        if !(self.end_time >= 0.0 && self.end_time.is_finite()) {
            return Err(Error::Config(format!(
                "end time must be finite and non-negative, got {}",
                self.end_time
            )));
        }
        crate::limiters::check_supported(self.limiter, self.scheme)?;
        Ok(())
    }

    pub fn initial_field(&self) -> Result<CellField> {
        Ok(init_cell_means(self.ic, &self.grid()?, self.init_mode))
    }
}

/// The exact cell means at time `t`, discretised with the run's init mode.
///
/// Diagonal flow translates by `(t, t)` on the torus, rotation turns by
/// `2πt` about the centre, and the reversing flows are only known at whole
/// multiples of their period, where they return to the initial state.
pub fn exact_solution(spec: &ExperimentSpec, t: f64) -> Result<CellField> {
    let grid = spec.grid()?;
    let ic = spec.ic;
    let initial = || init_cell_means(ic, &grid, spec.init_mode);
    match spec.stream {
        StreamCase::Diag => {
            let shift = t.rem_euclid(1.0);
            if shift == 0.0 {
                return Ok(initial());
            }
            Ok(cell_means_of(&grid, spec.init_mode, |x, y| {
                eval_ic(ic, (x - shift).rem_euclid(1.0), (y - shift).rem_euclid(1.0))
            }))
        }
        StreamCase::Sbr { center: (xc, yc) } => {
            let turns = t.rem_euclid(1.0);
            if turns == 0.0 {
                return Ok(initial());
            }
            let (s, c) = (2.0 * PI * turns).sin_cos();
            // Counterclockwise rotation by θ: sample u₀ at R(−θ)(x − c) + c.
            Ok(cell_means_of(&grid, spec.init_mode, |x, y| {
                let (dx, dy) = (x - xc, y - yc);
                eval_ic(ic, xc + c * dx + s * dy, yc - s * dx + c * dy)
            }))
        }
        StreamCase::Quad { period } | StreamCase::Sin { period } => {
            let cycles = t / period;
            if (cycles - cycles.round()).abs() <= 1e-12 {
                Ok(initial())
            } else {
                Err(Error::NoExactSolution {
                    case: spec.stream.name(),
                    t,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(stream: StreamCase, ic: InitialCondition, n: usize) -> ExperimentSpec {
        ExperimentSpec::new(Scheme::Fv2, LimiterKind::Unlimited, stream, ic, n)
    }

    #[test]
    fn ic_examples() {
        assert_eq!(eval_ic(InitialCondition::CosBump, 0.5, 0.75), 1.0);
        assert_eq!(eval_ic(InitialCondition::CosBump, 0.5, 0.75 + 0.15), 0.0);
        assert_eq!(eval_ic(InitialCondition::CosBump, 0.1, 0.1), 0.0);
        assert_eq!(eval_ic(InitialCondition::LeVeque, 0.5, 0.25), 1.0);
        // slot is empty below y = 0.85, filled above
        assert_eq!(eval_ic(InitialCondition::LeVeque, 0.5, 0.7), 0.0);
        assert_eq!(eval_ic(InitialCondition::LeVeque, 0.5, 0.86), 1.0);
        assert_eq!(eval_ic(InitialCondition::LeVeque, 0.4, 0.7), 1.0);
        assert_eq!(eval_ic(InitialCondition::LeVeque, 0.25, 0.5), 1.0);
    }

    #[test]
    fn ics_map_into_unit_interval() {
        let n = 1000;
        for ic in [
            InitialCondition::CosBump,
            InitialCondition::CosSqBump,
            InitialCondition::LeVeque,
        ] {
            for b in 0..n {
                for a in 0..n {
                    let v = eval_ic(ic, a as f64 / n as f64, b as f64 / n as f64);
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn squared_bump_is_square() {
        for (x, y) in [(0.5, 0.7), (0.45, 0.8), (0.6, 0.75), (0.1, 0.2)] {
            let a = eval_ic(InitialCondition::CosBump, x, y);
            assert_eq!(eval_ic(InitialCondition::CosSqBump, x, y), a * a);
        }
    }

    #[test]
    fn constant_means_are_exact() {
        let g = Grid::square(9).unwrap();
        for mode in [InitMode::PointSample, InitMode::Gauss3x3] {
            let f = cell_means_of(&g, mode, |_, _| 0.3);
            assert!(f.as_slice().iter().all(|v| (v - 0.3).abs() < 1e-15));
        }
    }

    #[test]
    fn point_sample_at_bump_center() {
        // cell (2, 4) of a 5x6 grid is centred exactly on (0.5, 0.75)
        let g = Grid::new(5, 6).unwrap();
        let f = init_cell_means(InitialCondition::CosBump, &g, InitMode::PointSample);
        assert_eq!((g.x_center(2), g.y_center(4)), (0.5, 0.75));
        assert_eq!(f.get(2, 4), 1.0);
    }

    /// 3x3 Gauss cell means against a 6x6 Gauss–Legendre oracle.
    #[test]
    fn gauss_means_match_higher_order_quadrature() {
        let g = Grid::square(64).unwrap();
        let f = init_cell_means(InitialCondition::CosBump, &g, InitMode::Gauss3x3);
        let nodes = [
            -0.932_469_514_203_152,
            -0.661_209_386_466_264_5,
            -0.238_619_186_083_196_9,
            0.238_619_186_083_196_9,
            0.661_209_386_466_264_5,
            0.932_469_514_203_152,
        ];
        let weights = [
            0.171_324_492_379_170_3,
            0.360_761_573_048_138_6,
            0.467_913_934_572_691,
            0.467_913_934_572_691,
            0.360_761_573_048_138_6,
            0.171_324_492_379_170_3,
        ];
        // cell containing (0.5, 0.75): x ∈ [0.5, 0.515625), y ∈ [0.75, ...)
        let (i, j) = (32, 48);
        let (xc, yc) = (g.x_center(i), g.y_center(j));
        let h = 0.5 / 64.0;
        let mut oracle = 0.0;
        for (a, wa) in nodes.iter().zip(weights) {
            for (b, wb) in nodes.iter().zip(weights) {
                oracle += 0.25 * wa * wb * eval_ic(InitialCondition::CosBump, xc + a * h, yc + b * h);
            }
        }
        assert!(f.get(i, j) < 1.0);
        assert!((f.get(i, j) - oracle).abs() < 1e-8, "{} vs {}", f.get(i, j), oracle);
    }

    #[test]
    fn exact_at_full_periods_is_initial() {
        for stream in [
            StreamCase::Diag,
            StreamCase::quad(),
            StreamCase::sin(),
            StreamCase::sbr(),
        ] {
            let s = spec(stream, InitialCondition::CosBump, 32);
            let init = s.initial_field().unwrap();
            assert_eq!(exact_solution(&s, 0.0).unwrap(), init);
            assert_eq!(exact_solution(&s, 1.0).unwrap(), init);
        }
    }

    #[test]
    fn reversing_flows_reject_mid_period() {
        let s = spec(StreamCase::quad(), InitialCondition::CosBump, 16);
        assert!(matches!(exact_solution(&s, 0.5), Err(Error::NoExactSolution { .. })));
    }

    #[test]
    fn quarter_rotation_moves_bump_left() {
        // Rotation-matrix oracle: counterclockwise by π/2 about (0.5, 0.5).
        let rotate = |x: f64, y: f64| (0.5 - (y - 0.5), 0.5 + (x - 0.5));
        let (cx, cy) = rotate(0.5, 0.75);
        assert!((cx - 0.25).abs() < 1e-15 && (cy - 0.5).abs() < 1e-15);
        let s = spec(StreamCase::sbr(), InitialCondition::CosBump, 40).with_init_mode(InitMode::PointSample);
        let rotated = exact_solution(&s, 0.25).unwrap();
        let g = s.grid().unwrap();
        for k in [0, 17, 333, 620, 901, 1234, 1599] {
            let (i, j) = (k % 40, k / 40);
            let (x, y) = (g.x_center(i), g.y_center(j));
            // the value at a rotated point equals u₀ at the original point
            let (rx, ry) = rotate(x, y);
            let expect = eval_ic(InitialCondition::CosBump, x, y);
            let got_i = (rx / g.dx() - 0.5).round() as usize;
            let got_j = (ry / g.dy() - 0.5).round() as usize;
            assert!((rotated.get(got_i % 40, got_j % 40) - expect).abs() < 1e-9);
        }
        // peak lands in the cell containing (0.25, 0.5)
        let peak = (0..g.num_cells())
            .max_by(|a, b| rotated[*a].partial_cmp(&rotated[*b]).unwrap())
            .unwrap();
        let (pi, pj) = (peak % 40, peak / 40);
        assert!((g.x_center(pi) - 0.25).abs() <= g.dx());
        assert!((g.y_center(pj) - 0.5).abs() <= g.dy());
    }
}
