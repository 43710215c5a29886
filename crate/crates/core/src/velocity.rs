//! Test velocity fields defined by stream functions.
//!
//! Every case has the separable form `Ψ(x, y, t) = g(t) Ψ₀(x, y)`, so a
//! discretised field is stored once as its `t`-independent base and scaled
//! by the time factor `g(t)` at each Runge–Kutta stage.
//!
//! Two discretisations are provided:
//!
//! * [`FaceVelocity`]: C-grid face-normal speeds from vertex differences of
//!   `Ψ`, which telescope to a discretely divergence-free field.
//! * [`QuadVelocity`]: the analytic velocity `(∂Ψ/∂y, −∂Ψ/∂x)` sampled at the
//!   two Gauss points of every face.

use std::f64::consts::PI;

use crate::grid::Grid;

/// Vertex stream values are snapped to this lattice spacing (2⁻⁵⁰) so the
/// vertex differences, and the face speeds built from them, are exact in
/// floating point. With `|Ψ| < 8` and `|∇Ψ| < 8` every snapped value and
/// every product `δΨ · n` stays below 2⁵³ quanta. The perturbation of a
/// face speed is at most `2⁻⁵⁰ n`.
const PSI_QUANTUM: f64 = 1.0 / (1u64 << 50) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StreamCase {
    /// `Ψ = y − x`: unit diagonal translation.
    Diag,
    /// `Ψ = 8πx(x−1)y(y−1) cos(πt/T)`: reversing quadratic deformation.
    Quad { period: f64 },
    /// `Ψ = ½ sin(2πx) sin(2πy) cos(πt/T)`: reversing sine deformation.
    Sin { period: f64 },
    /// `Ψ = −π((x−x_c)² + (y−y_c)²)`: counterclockwise rotation, period 1.
    Sbr { center: (f64, f64) },
}

impl StreamCase {
    /// The four flows in table order.
    pub const ALL: [StreamCase; 4] = [Self::diag(), Self::quad(), Self::sin(), Self::sbr()];

    pub const fn diag() -> Self {
        StreamCase::Diag
    }

    pub const fn quad() -> Self {
        StreamCase::Quad { period: 1.0 }
    }

    pub const fn sin() -> Self {
        StreamCase::Sin { period: 1.0 }
    }

    pub const fn sbr() -> Self {
        StreamCase::Sbr { center: (0.5, 0.5) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StreamCase::Diag => "diag",
            StreamCase::Quad { .. } => "quad",
            StreamCase::Sin { .. } => "sin",
            StreamCase::Sbr { .. } => "sbr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diag" => Some(Self::diag()),
            "quad" => Some(Self::quad()),
            "sin" => Some(Self::sin()),
            "sbr" => Some(Self::sbr()),
            _ => None,
        }
    }

    /// Period after which the flow map is the identity.
    pub fn period(&self) -> f64 {
        match *self {
            StreamCase::Diag => 1.0,
            StreamCase::Quad { period } | StreamCase::Sin { period } => period,
            StreamCase::Sbr { .. } => 1.0,
        }
    }

    /// `g(t)`.
    pub fn time_factor(&self, t: f64) -> f64 {
        match *self {
            StreamCase::Quad { period } | StreamCase::Sin { period } => (PI * t / period).cos(),
            _ => 1.0,
        }
    }

    /// Whether `g` varies in time.
    pub fn is_reversing(&self) -> bool {
        matches!(self, StreamCase::Quad { .. } | StreamCase::Sin { .. })
    }

    /// `Ψ₀(x, y)`.
    pub fn stream_base(&self, x: f64, y: f64) -> f64 {
        match *self {
            StreamCase::Diag => y - x,
            StreamCase::Quad { .. } => 8.0 * PI * x * (x - 1.0) * y * (y - 1.0),
            StreamCase::Sin { .. } => 0.5 * (2.0 * PI * x).sin() * (2.0 * PI * y).sin(),
            StreamCase::Sbr { center: (xc, yc) } => -PI * ((x - xc) * (x - xc) + (y - yc) * (y - yc)),
        }
    }

    pub fn stream(&self, x: f64, y: f64, t: f64) -> f64 {
        self.time_factor(t) * self.stream_base(x, y)
    }

    /// `(∂Ψ₀/∂y, −∂Ψ₀/∂x)`.
    pub fn velocity_base(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            StreamCase::Diag => (1.0, 1.0),
            StreamCase::Quad { .. } => (
                8.0 * PI * x * (x - 1.0) * (2.0 * y - 1.0),
                -8.0 * PI * (2.0 * x - 1.0) * y * (y - 1.0),
            ),
            StreamCase::Sin { .. } => (
                PI * (2.0 * PI * x).sin() * (2.0 * PI * y).cos(),
                -PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin(),
            ),
            StreamCase::Sbr { center: (xc, yc) } => (-2.0 * PI * (y - yc), 2.0 * PI * (x - xc)),
        }
    }
}

/// Closed-form velocity `(u, v) = (∂Ψ/∂y, −∂Ψ/∂x)` at `(x, y, t)`.
pub fn analytic_velocity(case: &StreamCase, x: f64, y: f64, t: f64) -> (f64, f64) {
    let g = case.time_factor(t);
    let (u, v) = case.velocity_base(x, y);
    (g * u, g * v)
}

/// C-grid face-normal speeds. `u[k]` lives on the +x face of cell `k`,
/// `v[k]` on its +y face. Actual speeds are `time_factor * base`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceVelocity {
    pub nx: usize,
    pub ny: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub time_factor: f64,
}

impl FaceVelocity {
    /// Arbitrary face speeds (for instance a compressible synthetic field).
    pub fn from_faces(grid: &Grid, u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), grid.num_cells());
        assert_eq!(v.len(), grid.num_cells());
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            u,
            v,
            time_factor: 1.0,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_faces(grid, vec![0.0; grid.num_cells()], vec![0.0; grid.num_cells()])
    }

    pub fn at_time_factor(&self, g: f64) -> Self {
        Self {
            time_factor: g,
            ..self.clone()
        }
    }

    #[inline]
    pub fn u_face(&self, k: usize) -> f64 {
        self.time_factor * self.u[k]
    }

    #[inline]
    pub fn v_face(&self, k: usize) -> f64 {
        self.time_factor * self.v[k]
    }

    /// `(u_{i+½,j} − u_{i−½,j})/Δx + (v_{i,j+½} − v_{i,j−½})/Δy` per cell.
    pub fn divergence(&self, grid: &Grid) -> Vec<f64> {
        let (nx, ny) = (grid.nx(), grid.ny());
        let (inv_dx, inv_dy) = (nx as f64, ny as f64);
        let mut div = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let js = (j + ny - 1) % ny;
            for i in 0..nx {
                let iw = (i + nx - 1) % nx;
                let k = j * nx + i;
                let du = self.u[k] - self.u[j * nx + iw];
                let dv = self.v[k] - self.v[js * nx + i];
                div.push(self.time_factor * (du * inv_dx + dv * inv_dy));
            }
        }
        div
    }
}

fn snapped_stream(case: &StreamCase, x: f64, y: f64) -> f64 {
    (case.stream_base(x, y) / PSI_QUANTUM).round() * PSI_QUANTUM
}

/// Build the C-grid face speeds at time `t` from vertex samples of `Ψ`:
///
/// `u_{i+½,j} = (Ψ(x_{i+½}, y_{j+½}) − Ψ(x_{i+½}, y_{j−½})) / Δy`
/// `v_{i,j+½} = −(Ψ(x_{i+½}, y_{j+½}) − Ψ(x_{i−½}, y_{j+½})) / Δx`
pub fn cgrid_faces(case: &StreamCase, grid: &Grid, t: f64) -> FaceVelocity {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (inv_dx, inv_dy) = (nx as f64, ny as f64);
    // Vertex values on the (nx+1) x (ny+1) lattice x = a Δx, y = b Δy.
    let vx = |a: usize| a as f64 / nx as f64;
    let vy = |b: usize| b as f64 / ny as f64;
    let mut psi = vec![0.0; (nx + 1) * (ny + 1)];
    for b in 0..ny {
        for a in 0..nx {
            psi[b * (nx + 1) + a] = snapped_stream(case, vx(a), vy(b));
        }
    }
    // Ψ is periodic up to a constant jump per period. Copying the first
    // row and column across the seam, shifted by that jump, keeps the
    // wrap-around faces consistent to the last bit.
    let base = snapped_stream(case, 0.0, 0.0);
    let jump_x = snapped_stream(case, 1.0, 0.0) - base;
    let jump_y = snapped_stream(case, 0.0, 1.0) - base;
    for b in 0..ny {
        psi[b * (nx + 1) + nx] = psi[b * (nx + 1)] + jump_x;
    }
    for a in 0..=nx {
        psi[ny * (nx + 1) + a] = psi[a] + jump_y;
    }
    let at = |a: usize, b: usize| psi[b * (nx + 1) + a];
    let mut u = Vec::with_capacity(nx * ny);
    let mut v = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            u.push((at(i + 1, j + 1) - at(i + 1, j)) * inv_dy);
            v.push(-(at(i + 1, j + 1) - at(i, j + 1)) * inv_dx);
        }
    }
    FaceVelocity {
        nx,
        ny,
        u,
        v,
        time_factor: case.time_factor(t),
    }
}

/// Offset of the two face Gauss points from the face midpoint, `Δ/(2√3)`.
#[inline]
pub fn gauss_offset(h: f64) -> f64 {
    h / (2.0 * 3f64.sqrt())
}

/// Face-normal speeds at the two Gauss points of every face.
///
/// On the +x face of cell `k` the points are `(x_{i+½}, y_j ∓ Δy/(2√3))`
/// giving `u1[k]`, `u2[k]`; on the +y face they are
/// `(x_i ∓ Δx/(2√3), y_{j+½})` giving `v1[k]`, `v2[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadVelocity {
    pub nx: usize,
    pub ny: usize,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub time_factor: f64,
}

impl QuadVelocity {
    pub fn from_points(grid: &Grid, u1: Vec<f64>, u2: Vec<f64>, v1: Vec<f64>, v2: Vec<f64>) -> Self {
        for a in [&u1, &u2, &v1, &v2] {
            assert_eq!(a.len(), grid.num_cells());
        }
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            u1,
            u2,
            v1,
            v2,
            time_factor: 1.0,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let z = vec![0.0; grid.num_cells()];
        Self::from_points(grid, z.clone(), z.clone(), z.clone(), z)
    }

    pub fn at_time_factor(&self, g: f64) -> Self {
        Self {
            time_factor: g,
            ..self.clone()
        }
    }

    /// Gauss-weighted discrete divergence per cell,
    /// `Σ_faces ½(vn₁ + vn₂) |σ| / |K|`.
    pub fn divergence(&self, grid: &Grid) -> Vec<f64> {
        let (nx, ny) = (grid.nx(), grid.ny());
        let g = self.time_factor;
        let mut div = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let js = (j + ny - 1) % ny;
            for i in 0..nx {
                let iw = (i + nx - 1) % nx;
                let k = j * nx + i;
                let w = j * nx + iw;
                let s = js * nx + i;
                let fe = 0.5 * (self.u1[k] + self.u2[k]);
                let fw = 0.5 * (self.u1[w] + self.u2[w]);
                let fnn = 0.5 * (self.v1[k] + self.v2[k]);
                let fs = 0.5 * (self.v1[s] + self.v2[s]);
                div.push(g * ((fe - fw) / grid.dx() + (fnn - fs) / grid.dy()));
            }
        }
        div
    }
}

/// Sample the analytic velocity at every face Gauss point.
pub fn quad_velocity(case: &StreamCase, grid: &Grid, t: f64) -> QuadVelocity {
    let (nx, ny) = (grid.nx(), grid.ny());
    let sy = gauss_offset(grid.dy());
    let sx = gauss_offset(grid.dx());
    let n = nx * ny;
    let (mut u1, mut u2, mut v1, mut v2) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for j in 0..ny {
        let yc = grid.y_center(j);
        let yf = grid.y_face(j);
        for i in 0..nx {
            let xc = grid.x_center(i);
            let xf = grid.x_face(i);
            u1.push(case.velocity_base(xf, yc - sy).0);
            u2.push(case.velocity_base(xf, yc + sy).0);
            v1.push(case.velocity_base(xc - sx, yf).1);
            v2.push(case.velocity_base(xc + sx, yf).1);
        }
    }
    QuadVelocity {
        nx,
        ny,
        u1,
        u2,
        v1,
        v2,
        time_factor: case.time_factor(t),
    }
}

/// Upper bound of `|u|/Δx + |v|/Δy` over the domain, sampled on the
/// half-cell lattice (vertices, face midpoints, centres) at `|g| = 1`.
pub fn peak_rate(case: &StreamCase, grid: &Grid) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut peak: f64 = 0.0;
    for b in 0..=2 * ny {
        let y = b as f64 * 0.5 * grid.dy();
        for a in 0..=2 * nx {
            let x = a as f64 * 0.5 * grid.dx();
            let (u, v) = case.velocity_base(x, y);
            peak = peak.max(u.abs() / grid.dx() + v.abs() / grid.dy());
        }
    }
    peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const CASES: [StreamCase; 4] = [
        StreamCase::Diag,
        StreamCase::Quad { period: 1.0 },
        StreamCase::Sin { period: 1.0 },
        StreamCase::Sbr { center: (0.5, 0.5) },
    ];

    #[test]
    fn diag_faces_are_unit() {
        for n in [5, 16, 100] {
            let g = Grid::square(n).unwrap();
            for t in [0.0, 0.3, 1.0] {
                let f = cgrid_faces(&StreamCase::Diag, &g, t);
                for k in 0..g.num_cells() {
                    assert!((f.u_face(k) - 1.0).abs() < 1e-9);
                    assert!((f.v_face(k) - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn quad_vanishes_at_half_period() {
        let g = Grid::square(16).unwrap();
        let f = cgrid_faces(&StreamCase::quad(), &g, 0.5);
        assert!(f.time_factor.abs() < 1e-15);
        for k in 0..g.num_cells() {
            assert!(f.u_face(k).abs() < 1e-14 && f.v_face(k).abs() < 1e-14);
        }
    }

    /// Ψ is quadratic, so its vertex difference equals the midpoint speed.
    #[test]
    fn sbr_faces_match_analytic_midpoint() {
        let g = Grid::square(100).unwrap();
        let f = cgrid_faces(&StreamCase::sbr(), &g, 0.0);
        for j in [0, 37, 49, 50, 99] {
            let i = 50;
            let k = j * 100 + i;
            let expect = -2.0 * PI * (g.y_center(j) - 0.5);
            assert!((f.u_face(k) - expect).abs() < 1e-9, "{} vs {}", f.u_face(k), expect);
            let expect_v = 2.0 * PI * (g.x_center(i) - 0.5);
            assert!((f.v_face(k) - expect_v).abs() < 1e-9);
        }
    }

    #[test]
    fn cgrid_divergence_is_machine_zero() {
        for case in CASES {
            for n in [5, 7, 32, 100, 128, 256] {
                let g = Grid::square(n).unwrap();
                for t in [0.0, 0.123, 0.77] {
                    let f = cgrid_faces(&case, &g, t);
                    let worst = f.divergence(&g).iter().fold(0.0f64, |m, d| m.max(d.abs()));
                    assert!(worst <= 1e-13, "{} n={} t={} div={}", case.name(), n, t, worst);
                }
            }
        }
        let g = Grid::new(40, 25).unwrap();
        for case in CASES {
            let f = cgrid_faces(&case, &g, 0.2);
            assert!(f.divergence(&g).iter().all(|d| d.abs() <= 1e-13));
        }
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_velocity(&StreamCase::Diag, 0.3, 0.9, 0.4), (1.0, 1.0));
        let (u, v) = analytic_velocity(&StreamCase::sbr(), 0.5, 0.5, 0.0);
        assert_eq!((u, v), (0.0, 0.0));
    }

    /// Closed-form partials against central differences of Ψ.
    #[test]
    fn analytic_velocity_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for case in CASES {
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(0.0..1.0);
                let y: f64 = rng.gen_range(0.0..1.0);
                let t: f64 = rng.gen_range(0.0..1.0);
                let (u, v) = analytic_velocity(&case, x, y, t);
                let fu = (case.stream(x, y + h, t) - case.stream(x, y - h, t)) / (2.0 * h);
                let fv = -(case.stream(x + h, y, t) - case.stream(x - h, y, t)) / (2.0 * h);
                let scale = u.abs().max(v.abs()).max(1.0);
                assert!((u - fu).abs() <= 1e-6 * scale, "{} u {} {}", case.name(), u, fu);
                assert!((v - fv).abs() <= 1e-6 * scale, "{} v {} {}", case.name(), v, fv);
            }
        }
        // the (0.25, 0.25) sine point: u = π sin(π/2) cos(π/2) ≈ 0, v = −π cos(π/2) sin(π/2) ≈ 0
        let (u, v) = analytic_velocity(&StreamCase::sin(), 0.25, 0.25, 0.0);
        assert!(u.abs() < 1e-15 && v.abs() < 1e-15);
        let (u, _) = analytic_velocity(&StreamCase::sin(), 0.25, 0.0, 0.0);
        assert!((u - PI).abs() < 1e-15);
    }

    #[test]
    fn reversing_cases_flip_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in [StreamCase::quad(), StreamCase::sin()] {
            for _ in 0..200 {
                let (x, y, t): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
                let a = analytic_velocity(&case, x, y, t);
                let b = analytic_velocity(&case, x, y, case.period() - t);
                assert!((a.0 + b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quad_velocity_divergence() {
        // The two-point rule is exact for the polynomial fields, and for the
        // separable Sin field the same quadrature factor multiplies both
        // face pairs, so every case is divergence-free up to rounding.
        for case in [
            StreamCase::Diag,
            StreamCase::quad(),
            StreamCase::sin(),
            StreamCase::sbr(),
        ] {
            let g = Grid::square(64).unwrap();
            let q = quad_velocity(&case, &g, 0.0);
            assert!(q.divergence(&g).iter().all(|d| d.abs() < 1e-11), "{}", case.name());
        }
    }

    #[test]
    fn peak_rate_examples() {
        let g = Grid::square(100).unwrap();
        assert!((peak_rate(&StreamCase::Diag, &g) - 200.0).abs() < 1e-9);
        assert!((peak_rate(&StreamCase::sbr(), &g) - 200.0 * PI).abs() < 1e-9);
    }
}
