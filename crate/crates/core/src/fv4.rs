//! Fourth-order scheme: project means to point values, differentiate with
//! centred stencils, evaluate a mean-preserving cubic at two Gauss points
//! per face, and integrate the upwind fluxes with the two-point rule.

use crate::field::CellField;
use crate::flux::upwind_flux;
use crate::fv2::assemble;
use crate::grid::Grid;
use crate::limiters::{CellPoints, Side, SubcellRecon};
use crate::solver::Scheme;
use crate::velocity::{gauss_offset, QuadVelocity};

/// `u_{i,j} = ū_{i,j} − (δ²_x ū + δ²_y ū)/24`.
pub fn project_p4(u: &CellField, grid: &Grid) -> Vec<f64> {
    let mut p = vec![0.0; grid.num_cells()];
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            let c = u[s.k];
            p[s.k] = c - (u[s.e] - 2.0 * c + u[s.w]) / 24.0 - (u[s.n] - 2.0 * c + u[s.s]) / 24.0;
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Centred stencil `Σ w (a_{·+o} − a_{·+p}) · scale` along one axis, with
/// wrap. Writing every tap as a difference makes constants vanish exactly.
/// Offsets must not exceed the grid extent along `axis`.
fn apply_stencil(a: &[f64], grid: &Grid, axis: Axis, taps: &[(isize, isize, f64)], scale: f64) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let r = taps
        .iter()
        .map(|&(o, p, _)| o.unsigned_abs().max(p.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let mut padded = vec![0.0; nx + 2 * r];
    let mut out = vec![0.0; nx * ny];
    for (j, dst) in out.chunks_exact_mut(nx).enumerate() {
        if axis == Axis::X {
            let row = grid.row(a, j);
            padded[..r].copy_from_slice(&row[nx - r..]);
            padded[r..r + nx].copy_from_slice(row);
            padded[r + nx..].copy_from_slice(&row[..r]);
        }
        // Source row for each tap, shifted so entry `i` lines up with cell `i`.
        let src = |o: isize| -> &[f64] {
            match axis {
                Axis::X => &padded[(r as isize + o) as usize..][..nx],
                Axis::Y => grid.row(a, (j as isize + o).rem_euclid(ny as isize) as usize),
            }
        };
        for &(o, p, w) in taps {
            for ((d, &x), &y) in dst.iter_mut().zip(src(o)).zip(src(p)) {
                *d += w * (x - y);
            }
        }
        for d in dst {
            *d *= scale;
        }
    }
    out
}

fn spacing(grid: &Grid, axis: Axis) -> f64 {
    match axis {
        Axis::X => grid.dx(),
        Axis::Y => grid.dy(),
    }
}

/// First derivative, `(−a₊₂ + 8a₊₁ − 8a₋₁ + a₋₂)/(12Δ)`.
pub fn w1(a: &[f64], grid: &Grid, axis: Axis) -> Vec<f64> {
    let taps = [(1, -1, 8.0), (2, -2, -1.0)];
    apply_stencil(a, grid, axis, &taps, 1.0 / (12.0 * spacing(grid, axis)))
}

/// Second derivative, `(−a₊₂ + 16a₊₁ − 30a₀ + 16a₋₁ − a₋₂)/(12Δ²)`.
pub fn w2(a: &[f64], grid: &Grid, axis: Axis) -> Vec<f64> {
    let h = spacing(grid, axis);
    let taps = [(1, 0, 16.0), (-1, 0, 16.0), (2, 0, -1.0), (-2, 0, -1.0)];
    apply_stencil(a, grid, axis, &taps, 1.0 / (12.0 * h * h))
}

/// Third derivative, `(−a₊₃ + 8a₊₂ − 13a₊₁ + 13a₋₁ − 8a₋₂ + a₋₃)/(8Δ³)`.
pub fn w3(a: &[f64], grid: &Grid, axis: Axis) -> Vec<f64> {
    let h = spacing(grid, axis);
    let taps = [(1, -1, -13.0), (2, -2, 8.0), (3, -3, -1.0)];
    apply_stencil(a, grid, axis, &taps, 1.0 / (8.0 * h * h * h))
}

/// The per-cell cubic
///
/// `p = ū + ξu_x + ηu_y + ½[(ξ² − Δx²/12)u_xx + 2ξηu_xy + (η² − Δy²/12)u_yy]
///    + ⅙[ξ³u_xxx + 3ξ²ηu_xxy + 3ξη²u_xyy + η³u_yyy]`
///
/// in local coordinates `ξ = x − x_i`, `η = y − y_j`, limited as
/// `ū + α(p − ū)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicRecon {
    pub mean: Vec<f64>,
    pub point: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub uxx: Vec<f64>,
    pub uxy: Vec<f64>,
    pub uyy: Vec<f64>,
    pub uxxx: Vec<f64>,
    pub uxxy: Vec<f64>,
    pub uxyy: Vec<f64>,
    pub uyyy: Vec<f64>,
    pub alpha: Vec<f64>,
    pub dx: f64,
    pub dy: f64,
}

/// Derivatives of the projected point values, with `α = 1`. Cross terms
/// reuse the first-pass results: `u_xy` from `u_y`, `u_xxy` from `u_xx`,
/// `u_xyy` from `u_yy`.
pub fn gradients_g3(mean: &CellField, point: Vec<f64>, grid: &Grid) -> CubicRecon {
    let uy = w1(&point, grid, Axis::Y);
    let uxx = w2(&point, grid, Axis::X);
    let uyy = w2(&point, grid, Axis::Y);
    CubicRecon {
        mean: mean.as_slice().to_vec(),
        ux: w1(&point, grid, Axis::X),
        uxy: w1(&uy, grid, Axis::X),
        uxxy: w1(&uxx, grid, Axis::Y),
        uxyy: w1(&uyy, grid, Axis::X),
        uxxx: w3(&point, grid, Axis::X),
        uyyy: w3(&point, grid, Axis::Y),
        uy,
        uxx,
        uyy,
        alpha: vec![1.0; grid.num_cells()],
        dx: grid.dx(),
        dy: grid.dy(),
        point,
    }
}

/// Unlimited reconstruction of a field: `G₃ ∘ P₄`.
pub fn reconstruct(u: &CellField, grid: &Grid) -> CubicRecon {
    gradients_g3(u, project_p4(u, grid), grid)
}

/// The derivatives of one cell, gathered for repeated evaluation.
#[derive(Debug, Clone, Copy)]
struct LocalCubic {
    d: [f64; 9],
    mx: f64,
    my: f64,
}

impl LocalCubic {
    #[inline]
    fn deviation(&self, xi: f64, eta: f64) -> f64 {
        let [ux, uy, uxx, uxy, uyy, uxxx, uxxy, uxyy, uyyy] = self.d;
        let (xx, yy) = (xi * xi, eta * eta);
        let quad = (xx - self.mx) * uxx + 2.0 * xi * eta * uxy + (yy - self.my) * uyy;
        let cubic = xx * xi * uxxx + 3.0 * xx * eta * uxxy + 3.0 * xi * yy * uxyy + yy * eta * uyyy;
        xi * ux + eta * uy + 0.5 * quad + cubic / 6.0
    }
}

impl CubicRecon {
    #[inline]
    fn local(&self, k: usize) -> LocalCubic {
        LocalCubic {
            d: [
                self.ux[k],
                self.uy[k],
                self.uxx[k],
                self.uxy[k],
                self.uyy[k],
                self.uxxx[k],
                self.uxxy[k],
                self.uxyy[k],
                self.uyyy[k],
            ],
            mx: self.dx * self.dx / 12.0,
            my: self.dy * self.dy / 12.0,
        }
    }

    /// Unlimited `p − ū` at local offset `(ξ, η)`.
    #[inline]
    pub fn deviation(&self, k: usize, xi: f64, eta: f64) -> f64 {
        self.local(k).deviation(xi, eta)
    }

    /// Limited value at local offset `(ξ, η)`.
    #[inline]
    pub fn eval_local(&self, k: usize, xi: f64, eta: f64) -> f64 {
        self.mean[k] + self.alpha[k] * self.deviation(k, xi, eta)
    }

    /// Limited value at the absolute point `(x, y)` inside cell `(i, j)`.
    pub fn eval(&self, grid: &Grid, i: usize, j: usize, x: f64, y: f64) -> f64 {
        self.eval_local(j * grid.nx() + i, x - grid.x_center(i), y - grid.y_center(j))
    }

    /// Local offsets of the 8 face Gauss points, grouped per side as
    /// `[minus, plus]` transverse offsets.
    pub fn gauss_points(&self) -> [(Side, [(f64, f64); 2]); 4] {
        let (hx, hy) = (0.5 * self.dx, 0.5 * self.dy);
        let (sx, sy) = (gauss_offset(self.dx), gauss_offset(self.dy));
        [
            (Side::East, [(hx, -sy), (hx, sy)]),
            (Side::West, [(-hx, -sy), (-hx, sy)]),
            (Side::North, [(-sx, hy), (sx, hy)]),
            (Side::South, [(-sx, -hy), (sx, -hy)]),
        ]
    }

    /// Right-hand side of the decomposition family
    /// `θ/2 p(centre) + (1−θ)/8 Σ p(face midpoints) + 1/16 Σ p(Gauss points)`.
    pub fn decomposition(&self, k: usize, theta: f64) -> f64 {
        let (hx, hy) = (0.5 * self.dx, 0.5 * self.dy);
        let mids = [(hx, 0.0), (-hx, 0.0), (0.0, hy), (0.0, -hy)]
            .iter()
            .map(|&(a, b)| self.eval_local(k, a, b))
            .sum::<f64>();
        let gauss = self
            .gauss_points()
            .iter()
            .flat_map(|(_, pts)| pts.iter())
            .map(|&(a, b)| self.eval_local(k, a, b))
            .sum::<f64>();
        0.5 * theta * self.eval_local(k, 0.0, 0.0) + (1.0 - theta) / 8.0 * mids + gauss / 16.0
    }
}

impl SubcellRecon for CubicRecon {
    fn scheme(&self) -> Scheme {
        Scheme::Fv4
    }

    /// The face points sit at `(±h, ±s)` offsets, so each side's pair
    /// shares the parts of the cubic that are even in the offsets.
    fn cell_points(&self, k: usize) -> CellPoints {
        let [ux, uy, uxx, uxy, uyy, uxxx, uxxy, uxyy, uyyy] = self.local(k).d;
        let (hx, hy) = (0.5 * self.dx, 0.5 * self.dy);
        let (sx, sy) = (gauss_offset(self.dx), gauss_offset(self.dy));
        let (mx, my) = (self.dx * self.dx / 12.0, self.dy * self.dy / 12.0);
        let center = -0.5 * (mx * uxx + my * uyy);
        // East/west points (±hx, ±sy).
        let even = 0.5 * ((hx * hx - mx) * uxx + (sy * sy - my) * uyy);
        let odd_x = hx * ux + (hx * hx * hx * uxxx + 3.0 * hx * sy * sy * uxyy) / 6.0;
        let odd_y = sy * uy + (sy * sy * sy * uyyy + 3.0 * hx * hx * sy * uxxy) / 6.0;
        let mixed = hx * sy * uxy;
        let east = [even + odd_x - odd_y - mixed, even + odd_x + odd_y + mixed];
        let west = [even - odd_x - odd_y + mixed, even - odd_x + odd_y - mixed];
        // North/south points (±sx, ±hy).
        let even = 0.5 * ((sx * sx - mx) * uxx + (hy * hy - my) * uyy);
        let odd_x = sx * ux + (sx * sx * sx * uxxx + 3.0 * sx * hy * hy * uxyy) / 6.0;
        let odd_y = hy * uy + (hy * hy * hy * uyyy + 3.0 * sx * sx * hy * uxxy) / 6.0;
        let mixed = sx * hy * uxy;
        let north = [even - odd_x + odd_y - mixed, even + odd_x + odd_y + mixed];
        let south = [even - odd_x - odd_y + mixed, even + odd_x - odd_y - mixed];
        CellPoints {
            faces: [east, west, north, south],
            per_face: 2,
            center: Some(center),
            corners: None,
        }
    }
}

/// Limited values at the 8 face Gauss points and the centre of every cell.
/// Each side holds `[minus, plus]` transverse offsets, matching the
/// point order of [`QuadVelocity`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussTraces4 {
    pub east: [Vec<f64>; 2],
    pub west: [Vec<f64>; 2],
    pub north: [Vec<f64>; 2],
    pub south: [Vec<f64>; 2],
    pub center: Vec<f64>,
}

pub fn gauss_traces(r: &CubicRecon) -> GaussTraces4 {
    let mut t = GaussTraces4::with_capacity(r.mean.len());
    for k in 0..r.mean.len() {
        t.push(r.mean[k], r.alpha[k], &r.cell_points(k));
    }
    t
}

impl GaussTraces4 {
    pub fn with_capacity(n: usize) -> Self {
        let empty = || [Vec::with_capacity(n), Vec::with_capacity(n)];
        Self {
            east: empty(),
            west: empty(),
            north: empty(),
            south: empty(),
            center: Vec::with_capacity(n),
        }
    }

    /// Appends the next cell's limited values `ū + α d` from its unlimited
    /// deviations.
    pub fn push(&mut self, mean: f64, alpha: f64, pts: &CellPoints) {
        for (dst, d) in [&mut self.east, &mut self.west, &mut self.north, &mut self.south]
            .into_iter()
            .zip(&pts.faces)
        {
            dst[0].push(mean + alpha * d[0]);
            dst[1].push(mean + alpha * d[1]);
        }
        self.center.push(mean + alpha * pts.center.unwrap_or(0.0));
    }

    /// `½ p(centre) + 1/16 Σ p(Gauss points)` for cell `k`.
    pub fn zhang_mean(&self, k: usize) -> f64 {
        let faces = self.east[0][k]
            + self.east[1][k]
            + self.west[0][k]
            + self.west[1][k]
            + self.north[0][k]
            + self.north[1][k]
            + self.south[0][k]
            + self.south[1][k];
        0.5 * self.center[k] + faces / 16.0
    }
}

/// Cell-mean tendency with the two-point Gauss rule on every face.
pub fn fv4_tendency(t: &GaussTraces4, qvel: &QuadVelocity, grid: &Grid) -> Vec<f64> {
    let n = grid.num_cells();
    let g = qvel.time_factor;
    let (mut fx, mut fy) = (vec![0.0; n], vec![0.0; n]);
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            let k = s.k;
            fx[k] = 0.5 * upwind_flux(t.east[0][k], t.west[0][s.e], g * qvel.u1[k])
                + 0.5 * upwind_flux(t.east[1][k], t.west[1][s.e], g * qvel.u2[k]);
            fy[k] = 0.5 * upwind_flux(t.north[0][k], t.south[0][s.n], g * qvel.v1[k])
                + 0.5 * upwind_flux(t.north[1][k], t.south[1][s.n], g * qvel.v2[k]);
        }
    }
    assemble(&fx, &fy, grid)
}

/// Stage Courant number with each face's outflow taken as the larger of
/// its two Gauss-point outflows.
pub fn fv4_courant(qvel: &QuadVelocity, grid: &Grid, dt: f64) -> f64 {
    let g = qvel.time_factor;
    let out = |a: f64, b: f64| (g * a).max(g * b).max(0.0);
    let mut peak: f64 = 0.0;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            let ox = out(qvel.u1[s.k], qvel.u2[s.k]) + out(-qvel.u1[s.w], -qvel.u2[s.w]);
            let oy = out(qvel.v1[s.k], qvel.v2[s.k]) + out(-qvel.v1[s.s], -qvel.v2[s.s]);
            peak = peak.max(ox / grid.dx() + oy / grid.dy());
        }
    }
    dt * peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::{quad_velocity, StreamCase};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(grid: &Grid, axis: Axis, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(grid.num_cells());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let c = match axis {
                    Axis::X => i as f64 * grid.dx(),
                    Axis::Y => j as f64 * grid.dy(),
                };
                out.push(f(c));
            }
        }
        out
    }

    #[test]
    fn projection_examples() {
        let g = Grid::square(7).unwrap();
        let c = CellField::constant(7, 7, 0.3);
        assert!(project_p4(&c, &g).iter().all(|&v| (v - 0.3).abs() < 1e-16));

        let mut u = CellField::constant(7, 7, 1.0);
        u.set(3, 3, 0.0);
        let p = project_p4(&u, &g);
        assert!((p[g.index((3, 3).into())] + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn projection_inverts_quadratic_means() {
        // Exact means of x² on [x_i ± Δx/2] are x_i² + Δx²/12. Centred on a
        // column away from the wrap seam.
        let g = Grid::square(16).unwrap();
        let h = g.dx();
        let u = CellField::from_fn(&g, |i, _| {
            let x = g.x_center(i) - 0.5;
            x * x + h * h / 12.0
        });
        let p = project_p4(&u, &g);
        for i in 2..14 {
            let x = g.x_center(i) - 0.5;
            assert!((p[g.index((i, 5).into())] - x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn stencils_differentiate_monomials() {
        let g = Grid::square(16).unwrap();
        // Evaluate around column 8 so the stencils never touch the seam.
        let at = |a: &[f64]| a[g.index((8, 4).into())];
        let x0 = 8.0 * g.dx();
        let lin = sample(&g, Axis::X, |x| x - x0);
        let sq = sample(&g, Axis::X, |x| (x - x0).powi(2));
        let cube = sample(&g, Axis::X, |x| (x - x0).powi(3));
        assert!((at(&w1(&lin, &g, Axis::X)) - 1.0).abs() < 1e-11);
        assert!(at(&w1(&sq, &g, Axis::X)).abs() < 1e-11);
        assert!((at(&w2(&sq, &g, Axis::X)) - 2.0).abs() < 1e-9);
        assert!((at(&w3(&cube, &g, Axis::X)) - 6.0).abs() < 1e-7);
        assert!(at(&w3(&sq, &g, Axis::X)).abs() < 1e-7);

        let y0 = 8.0 * g.dy();
        let at_y = |a: &[f64]| a[g.index((4, 8).into())];
        let cube = sample(&g, Axis::Y, |y| (y - y0).powi(3));
        assert!((at_y(&w3(&cube, &g, Axis::Y)) - 6.0).abs() < 1e-7);
    }

    #[test]
    fn cross_derivatives_of_mixed_monomials() {
        let g = Grid::square(16).unwrap();
        let (x0, y0) = (g.x_center(8), g.y_center(8));
        let k = g.index((8, 8).into());
        let field =
            |f: &dyn Fn(f64, f64) -> f64| CellField::from_fn(&g, |i, j| f(g.x_center(i) - x0, g.y_center(j) - y0));
        // Feed point values directly so only G₃ is exercised.
        let r = |f: &dyn Fn(f64, f64) -> f64| {
            let pts = field(f);
            gradients_g3(&pts, pts.as_slice().to_vec(), &g)
        };
        assert!((r(&|x, y| x * y).uxy[k] - 1.0).abs() < 1e-10);
        assert!((r(&|x, y| x * x * y).uxxy[k] - 2.0).abs() < 1e-8);
        assert!((r(&|x, y| x * y * y).uxyy[k] - 2.0).abs() < 1e-8);
    }

    fn random_recon(rng: &mut ChaCha8Rng, h: f64) -> CubicRecon {
        let mut c = || vec![rng.gen_range(-1.0..1.0)];
        CubicRecon {
            mean: c(),
            point: c(),
            ux: c(),
            uy: c(),
            uxx: c(),
            uxy: c(),
            uyy: c(),
            uxxx: c(),
            uxxy: c(),
            uxyy: c(),
            uyyy: c(),
            alpha: vec![1.0],
            dx: h,
            dy: h * 0.75,
        }
    }

    #[test]
    fn cubic_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut r = random_recon(&mut rng, 0.1);
        for v in [
            &mut r.ux,
            &mut r.uy,
            &mut r.uxx,
            &mut r.uxy,
            &mut r.uyy,
            &mut r.uxxx,
            &mut r.uxxy,
            &mut r.uxyy,
            &mut r.uyyy,
        ] {
            v[0] = 0.0;
        }
        assert_eq!(r.eval_local(0, 0.03, -0.02), r.mean[0]);
        r.uxx[0] = 2.0;
        let expect = r.mean[0] - r.dx * r.dx / 12.0;
        assert!((r.eval_local(0, 0.0, 0.0) - expect).abs() < 1e-16);
    }

    #[test]
    fn cubic_is_mean_preserving() {
        // 5x5 tensor Gauss-Legendre rule, exact for the cubic.
        let nodes = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let r = random_recon(&mut rng, 0.1);
            let mut avg = 0.0;
            for (a, wa) in nodes.iter().zip(&weights) {
                for (b, wb) in nodes.iter().zip(&weights) {
                    avg += wa * wb * r.eval_local(0, 0.5 * a * r.dx, 0.5 * b * r.dy);
                }
            }
            avg /= 4.0;
            assert!((avg - r.mean[0]).abs() <= 1e-13 * r.mean[0].abs().max(1.0));
        }
    }

    #[test]
    fn zhang_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = random_recon(&mut rng, 0.1);
            let t = gauss_traces(&r);
            assert!((t.zhang_mean(0) - r.mean[0]).abs() <= 1e-13 * r.mean[0].abs().max(1.0));
            assert!((r.decomposition(0, 1.0) - r.mean[0]).abs() <= 1e-13);
        }
    }

    #[test]
    fn theta_family_exact_only_for_linear_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut r = random_recon(&mut rng, 0.1);
        for v in [
            &mut r.uxx,
            &mut r.uxy,
            &mut r.uyy,
            &mut r.uxxx,
            &mut r.uxxy,
            &mut r.uxyy,
            &mut r.uyyy,
        ] {
            v[0] = 0.0;
        }
        for theta in [0.0, 0.3, 1.0] {
            assert!((r.decomposition(0, theta) - r.mean[0]).abs() < 1e-15);
        }
        r.uxx[0] = 1.0;
        assert!((r.decomposition(0, 1.0) - r.mean[0]).abs() < 1e-15);
        assert!((r.decomposition(0, 0.0) - r.mean[0]).abs() > 1e-4);
    }

    #[test]
    fn linear_term_on_top_face() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut r = random_recon(&mut rng, 0.1);
        for v in [
            &mut r.ux,
            &mut r.uxx,
            &mut r.uxy,
            &mut r.uyy,
            &mut r.uxxx,
            &mut r.uxxy,
            &mut r.uxyy,
            &mut r.uyyy,
        ] {
            v[0] = 0.0;
        }
        r.uy[0] = 1.0;
        let t = gauss_traces(&r);
        let m = r.mean[0];
        for q in 0..2 {
            assert!((t.north[q][0] - m - r.dy / 2.0).abs() < 1e-15);
            assert!((t.south[q][0] - m + r.dy / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tendency_examples() {
        let g = Grid::square(12).unwrap();
        let c = CellField::constant(12, 12, 0.7);
        let t = gauss_traces(&reconstruct(&c, &g));
        for case in [StreamCase::diag(), StreamCase::sbr()] {
            let l = fv4_tendency(&t, &quad_velocity(&case, &g, 0.0), &g);
            assert!(l.iter().all(|v| v.abs() < 1e-12), "{}", case.name());
        }
        let u = CellField::from_fn(&g, |i, j| ((i * 5 + j * 3) % 7) as f64);
        let t = gauss_traces(&reconstruct(&u, &g));
        assert!(fv4_tendency(&t, &QuadVelocity::zeros(&g), &g).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn courant_example() {
        let g = Grid::square(32).unwrap();
        let q = quad_velocity(&StreamCase::diag(), &g, 0.0);
        assert!((fv4_courant(&q, &g, g.dx() / 8.0) - 0.25).abs() < 1e-12);
        assert_eq!(fv4_courant(&QuadVelocity::zeros(&g), &g, 1.0), 0.0);
    }
}
