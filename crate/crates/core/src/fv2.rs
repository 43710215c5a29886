//! Second-order scheme: centred linear reconstruction, one upwind flux per
//! face evaluated at the face midpoint.

use crate::field::CellField;
use crate::flux::upwind_flux;
use crate::grid::{east_of, west_of, Grid};
use crate::limiters::{CellPoints, SubcellRecon};
use crate::solver::Scheme;
use crate::velocity::FaceVelocity;

/// `p(x, y) = ū + α (u_x (x − x_i) + u_y (y − y_j))` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRecon {
    pub mean: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub alpha: Vec<f64>,
    pub dx: f64,
    pub dy: f64,
}

/// Reconstruction values at the four face midpoints of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceTraces2 {
    pub r: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub d: Vec<f64>,
}

/// Centred-difference slopes with `α = 1`.
pub fn central_slopes(u: &CellField, grid: &Grid) -> LinearRecon {
    let n = grid.num_cells();
    let (mut ux, mut uy) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (sx, sy) = (0.5 / grid.dx(), 0.5 / grid.dy());
    for j in 0..grid.ny() {
        let (s, r, nr) = grid.rows3(u.as_slice(), j);
        ux.extend(east_of(r).zip(west_of(r)).map(|(e, w)| (e - w) * sx));
        uy.extend(nr.iter().zip(s).map(|(n, s)| (n - s) * sy));
    }
    LinearRecon {
        mean: u.as_slice().to_vec(),
        ux,
        uy,
        alpha: vec![1.0; n],
        dx: grid.dx(),
        dy: grid.dy(),
    }
}

impl LinearRecon {
    /// Unlimited deviations `(u_x Δx/2, u_y Δy/2)` at the east and north
    /// face midpoints; the west and south ones are their negatives.
    #[inline]
    pub fn half_jumps(&self, k: usize) -> (f64, f64) {
        (self.ux[k] * (0.5 * self.dx), self.uy[k] * (0.5 * self.dy))
    }

    /// Limited value at local offset `(ξ, η)` from the cell centre.
    pub fn eval_local(&self, k: usize, xi: f64, eta: f64) -> f64 {
        self.mean[k] + self.alpha[k] * (self.ux[k] * xi + self.uy[k] * eta)
    }
}

impl SubcellRecon for LinearRecon {
    fn scheme(&self) -> Scheme {
        Scheme::Fv2
    }

    fn cell_points(&self, k: usize) -> CellPoints {
        let (hx, hy) = self.half_jumps(k);
        CellPoints {
            faces: [[hx, 0.0], [-hx, 0.0], [hy, 0.0], [-hy, 0.0]],
            per_face: 1,
            center: None,
            corners: Some([hx + hy, -hx + hy, hx - hy, -hx - hy]),
        }
    }
}

impl FaceTraces2 {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            r: Vec::with_capacity(n),
            l: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
        }
    }

    /// Appends the next cell's limited face values `ū + α d`.
    pub fn push(&mut self, mean: f64, alpha: f64, pts: &CellPoints) {
        let [r, l, u, d] = pts.faces;
        self.r.push(mean + alpha * r[0]);
        self.l.push(mean + alpha * l[0]);
        self.u.push(mean + alpha * u[0]);
        self.d.push(mean + alpha * d[0]);
    }
}

/// `u^R, u^L, u^U, u^D = ū ± α u_x Δx/2, ū ± α u_y Δy/2`.
pub fn face_traces(r: &LinearRecon) -> FaceTraces2 {
    let mut t = FaceTraces2::with_capacity(r.mean.len());
    for k in 0..r.mean.len() {
        t.push(r.mean[k], r.alpha[k], &r.cell_points(k));
    }
    t
}

/// Cell-mean tendency `L(ū)`. Each face flux is computed once, from the
/// owner's outward trace and the neighbour's inward trace, and enters the
/// two cells with opposite signs.
pub fn fv2_tendency(traces: &FaceTraces2, vel: &FaceVelocity, grid: &Grid) -> Vec<f64> {
    let n = grid.num_cells();
    let g = vel.time_factor;
    let (mut fx, mut fy) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for j in 0..grid.ny() {
        let row = |a| grid.row(a, j);
        let north = |a| grid.row(a, (j + 1) % grid.ny());
        fx.extend(
            row(&traces.r)
                .iter()
                .zip(east_of(row(&traces.l)))
                .zip(row(&vel.u))
                .map(|((&a, b), &un)| upwind_flux(a, b, g * un)),
        );
        fy.extend(
            row(&traces.u)
                .iter()
                .zip(north(&traces.d))
                .zip(row(&vel.v))
                .map(|((&a, &b), &vn)| upwind_flux(a, b, g * vn)),
        );
    }
    assemble(&fx, &fy, grid)
}

/// `−((F_e − F_w)/Δx + (G_n − G_s)/Δy)` from per-face fluxes stored on
/// the owning (low-side) cell.
pub(crate) fn assemble(fx: &[f64], fy: &[f64], grid: &Grid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.num_cells());
    let (dx, dy) = (grid.dx(), grid.dy());
    for j in 0..grid.ny() {
        let (ys, yr, _) = grid.rows3(fy, j);
        let xr = grid.row(fx, j);
        out.extend(
            xr.iter()
                .zip(west_of(xr))
                .zip(yr.iter().zip(ys))
                .map(|((&e, w), (&n, &s))| -((e - w) / dx + (n - s) / dy)),
        );
    }
    out
}

/// `max_K Δt Σ_faces (v·n)⁺ |σ| / |K|`.
pub fn fv2_courant(vel: &FaceVelocity, grid: &Grid, dt: f64) -> f64 {
    let mut peak: f64 = 0.0;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            let out_x = vel.u_face(s.k).max(0.0) + (-vel.u_face(s.w)).max(0.0);
            let out_y = vel.v_face(s.k).max(0.0) + (-vel.v_face(s.s)).max(0.0);
            peak = peak.max(out_x / grid.dx() + out_y / grid.dy());
        }
    }
    dt * peak
}
