//! Monotone upwind numerical flux and the first-order upwind scheme.

use crate::field::CellField;
use crate::grid::Grid;
use crate::velocity::FaceVelocity;

/// Traces on either side of a face quadrature point and the normal speed
/// `v·n_KL`, with `n_KL` pointing from the inner cell K to the outer cell L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannInput {
    pub inner: f64,
    pub outer: f64,
    pub vn: f64,
}

/// `max(vn, 0)·a + min(vn, 0)·b`.
///
/// Consistent (`f(a, a, vn) = a·vn`), conservative
/// (`f(a, b, vn) = −f(b, a, −vn)`), nondecreasing in `a` and nonincreasing
/// in `b`. A stagnant face carries no flux whatever the traces.
#[inline]
pub fn upwind_flux(a: f64, b: f64, vn: f64) -> f64 {
    if vn > 0.0 {
        vn * a
    } else if vn < 0.0 {
        vn * b
    } else {
        0.0
    }
}

impl RiemannInput {
    #[inline]
    pub fn flux(&self) -> f64 {
        upwind_flux(self.inner, self.outer, self.vn)
    }
}

/// One forward-Euler step of the first-order upwind finite-volume scheme
/// on C-grid face speeds, written directly from the per-cell definition:
///
/// `ū_K ← ū_K − Δt/|K| Σ_{L∈N(K)} |σ_KL| f(ū_K, ū_L, v·n_KL)`.
pub fn first_order_upwind_step(u: &CellField, vel: &FaceVelocity, grid: &Grid, dt: f64) -> CellField {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = u.clone();
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let east = j * nx + (i + 1) % nx;
            let west = j * nx + (i + nx - 1) % nx;
            let north = ((j + 1) % ny) * nx + i;
            let south = ((j + ny - 1) % ny) * nx + i;
            let f_east = upwind_flux(u[k], u[east], vel.u_face(k));
            let f_west = upwind_flux(u[west], u[k], vel.u_face(west));
            let f_north = upwind_flux(u[k], u[north], vel.v_face(k));
            let f_south = upwind_flux(u[south], u[k], vel.v_face(south));
            out[k] = u[k] - dt * ((f_east - f_west) / grid.dx() + (f_north - f_south) / grid.dy());
        }
    }
    out
}
