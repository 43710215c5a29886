//! Slope limiters built on the Barth–Jespersen correction factor.
//!
//! Every limiter scales the whole subcell polynomial about its mean,
//! `p̃ = ū + α (p − ū)`, with one `α ∈ [0, 1]` per cell. The limiters differ
//! only in which points are constrained and against which bounds.

use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::{CellIndex, FaceId, Grid, NeighborhoodKind, Orientation, Stencil, VertexId};
use crate::solver::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimiterKind {
    Unlimited,
    /// Barth–Jespersen: flux points against the plus-stencil bounds.
    Bj,
    /// Vertex limiter: cell corners against their four-cell vertex bounds.
    Kuzmin,
    /// Face points against the two cells sharing the face.
    Nk,
    /// Face points against `N(K) ∪ N(L)`.
    N2n,
    /// Every point against the field-wide extrema of the previous step.
    Global,
}

impl LimiterKind {
    pub const ALL: [LimiterKind; 6] = [
        LimiterKind::Unlimited,
        LimiterKind::Bj,
        LimiterKind::Kuzmin,
        LimiterKind::Nk,
        LimiterKind::N2n,
        LimiterKind::Global,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LimiterKind::Unlimited => "unlimited",
            LimiterKind::Bj => "bj",
            LimiterKind::Kuzmin => "kuzmin",
            LimiterKind::Nk => "nk",
            LimiterKind::N2n => "n2n",
            LimiterKind::Global => "global",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unlimited" | "none" => Some(LimiterKind::Unlimited),
            "bj" => Some(LimiterKind::Bj),
            "kuzmin" | "kuz" => Some(LimiterKind::Kuzmin),
            "nk" | "nk_mp" => Some(LimiterKind::Nk),
            "n2n" | "n2n_mp" => Some(LimiterKind::N2n),
            "global" => Some(LimiterKind::Global),
            _ => None,
        }
    }

    pub fn is_limited(&self) -> bool {
        *self != LimiterKind::Unlimited
    }

    /// Neighbourhood of the cell-mean maximum principle this limiter
    /// guarantees for one forward-Euler stage. `None` for `Global` (field
    /// extrema) and `Unlimited` (no principle).
    pub fn principle(&self) -> Option<NeighborhoodKind> {
        match self {
            LimiterKind::Nk => Some(NeighborhoodKind::FaceInclusive),
            LimiterKind::N2n | LimiterKind::Bj => Some(NeighborhoodKind::FaceSquared),
            LimiterKind::Kuzmin => Some(NeighborhoodKind::Vertex),
            LimiterKind::Global | LimiterKind::Unlimited => None,
        }
    }
}

impl std::fmt::Display for LimiterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn check_supported(kind: LimiterKind, scheme: Scheme) -> Result<()> {
    if kind == LimiterKind::Kuzmin && scheme == Scheme::Fv4 {
        return Err(Error::UnsupportedLimiter {
            limiter: kind.name(),
            scheme: scheme.name(),
        });
    }
    Ok(())
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    /// Tightest interval holding every value.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut b = Self {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        };
        for v in values {
            b.lo = b.lo.min(v);
            b.hi = b.hi.max(v);
        }
        b
    }

    pub fn of_field(u: &CellField) -> Self {
        Self::new(u.min(), u.max())
    }

    /// Distance of `v` outside the interval, 0 inside.
    #[inline]
    pub fn violation(&self, v: f64) -> f64 {
        (self.lo - v).max(v - self.hi).max(0.0)
    }

    #[inline]
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Largest `α ∈ [0, 1]` keeping `ū + α (p − ū)` inside `b`.
#[inline]
pub fn bj_factor(p: f64, mean: f64, b: Bounds) -> f64 {
    bj_deviation(p - mean, mean, b.lo, b.hi)
}

/// [`bj_factor`] written in terms of the deviation `d = p − ū`.
#[inline]
pub fn bj_deviation(d: f64, mean: f64, lo: f64, hi: f64) -> f64 {
    let a = if d > 0.0 {
        (hi - mean) / d
    } else if d < 0.0 {
        (lo - mean) / d
    } else {
        return 1.0;
    };
    fmax(fmin(a, 1.0), 0.0)
}

fn min_max(u: &CellField, grid: &Grid, cells: &[CellIndex]) -> Bounds {
    Bounds::of(cells.iter().map(|&c| u[grid.index(c)]))
}

/// Bounds attached to the flux points of a face.
pub fn face_bounds(kind: LimiterKind, u: &CellField, f: FaceId, grid: &Grid) -> Result<Bounds> {
    match kind {
        LimiterKind::Nk => {
            let (k, l) = grid.face_cells(f);
            Ok(min_max(u, grid, &[k, l]))
        }
        LimiterKind::N2n => Ok(min_max(u, grid, &grid.face_union_neighborhood(f))),
        _ => Err(Error::Config(format!("limiter {} has no face bounds", kind.name()))),
    }
}

/// Bounds attached to a whole cell: the constraint for BJ flux points, the
/// cell centre of the face-based limiters, and every point under `Global`.
pub fn cell_bounds(
    kind: LimiterKind,
    u: &CellField,
    c: CellIndex,
    grid: &Grid,
    global: Option<Bounds>,
) -> Result<Bounds> {
    match kind {
        LimiterKind::Bj | LimiterKind::Nk => {
            Ok(min_max(u, grid, &grid.neighborhood(c, NeighborhoodKind::FaceInclusive)))
        }
        LimiterKind::N2n => Ok(min_max(u, grid, &grid.neighborhood(c, NeighborhoodKind::FaceSquared))),
        LimiterKind::Global => global.ok_or(Error::MissingGlobalBounds),
        LimiterKind::Kuzmin | LimiterKind::Unlimited => {
            Err(Error::Config(format!("limiter {} has no cell bounds", kind.name())))
        }
    }
}

pub fn vertex_bounds(u: &CellField, v: VertexId, grid: &Grid) -> Bounds {
    min_max(u, grid, &grid.vertex_cells(v))
}

/// Side of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    East,
    West,
    North,
    South,
}

/// Where a reconstruction point sits inside its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// A flux-contributing point on the given face.
    Face(Side),
    /// The cell centre (a non-flux point of the fourth-order decomposition).
    Center,
    /// A cell corner; constrained only by the vertex limiter.
    Corner { east: bool, north: bool },
}

/// A reconstruction value expressed as its deviation `p − ū`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDeviation {
    pub site: Site,
    pub deviation: f64,
}

/// Deviations `p − ū` of one cell at every point a limiter may constrain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellPoints {
    /// Flux points per side in the order east, west, north, south; only the
    /// first `per_face` entries of each side are used.
    pub faces: [[f64; 2]; 4],
    pub per_face: usize,
    /// The cell centre (FV4).
    pub center: Option<f64>,
    /// Corners in the order NE, NW, SE, SW (FV2).
    pub corners: Option<[f64; 4]>,
}

const SIDES: [Side; 4] = [Side::East, Side::West, Side::North, Side::South];
const CORNERS: [(bool, bool); 4] = [(true, true), (false, true), (true, false), (false, false)];

impl CellPoints {
    pub fn iter(&self) -> impl Iterator<Item = PointDeviation> + '_ {
        let faces = SIDES.iter().zip(&self.faces).flat_map(move |(&side, pts)| {
            pts[..self.per_face].iter().map(move |&deviation| PointDeviation {
                site: Site::Face(side),
                deviation,
            })
        });
        let center = self.center.map(|deviation| PointDeviation {
            site: Site::Center,
            deviation,
        });
        let corners = self.corners.into_iter().flat_map(|c| {
            CORNERS.iter().zip(c).map(|(&(east, north), deviation)| PointDeviation {
                site: Site::Corner { east, north },
                deviation,
            })
        });
        faces.chain(center).chain(corners)
    }
}

/// A per-cell subcell reconstruction that can be limited.
pub trait SubcellRecon {
    fn scheme(&self) -> Scheme;

    /// Unlimited deviations at all flux points, plus the centre (FV4) or
    /// the corners (FV2).
    fn cell_points(&self, k: usize) -> CellPoints;
}

/// `α_K` computed point by point from the set-based bound definitions.
/// The per-field kernel [`alpha_field`] must agree with this exactly.
pub fn limit_cell(
    kind: LimiterKind,
    recon: &impl SubcellRecon,
    u: &CellField,
    c: CellIndex,
    grid: &Grid,
    global: Option<Bounds>,
) -> Result<f64> {
    check_supported(kind, recon.scheme())?;
    if kind == LimiterKind::Unlimited {
        return Ok(1.0);
    }
    let k = grid.index(c);
    let mean = u[k];
    let mut alpha: f64 = 1.0;
    for p in recon.cell_points(k).iter() {
        let b = match (kind, p.site) {
            (LimiterKind::Kuzmin, Site::Corner { east, north }) => {
                let corner = grid.offset(c, if east { 0 } else { -1 }, if north { 0 } else { -1 });
                vertex_bounds(
                    u,
                    VertexId {
                        i: corner.i,
                        j: corner.j,
                    },
                    grid,
                )
            }
            (LimiterKind::Kuzmin, _) | (_, Site::Corner { .. }) => continue,
            (LimiterKind::Nk | LimiterKind::N2n, Site::Face(side)) => {
                face_bounds(kind, u, face_of(grid, c, side), grid)?
            }
            _ => cell_bounds(kind, u, c, grid, global)?,
        };
        alpha = alpha.min(bj_deviation(p.deviation, mean, b.lo, b.hi));
    }
    Ok(alpha)
}

fn face_of(grid: &Grid, c: CellIndex, side: Side) -> FaceId {
    match side {
        Side::East => FaceId {
            orientation: Orientation::Vertical,
            owner: c,
        },
        Side::West => FaceId {
            orientation: Orientation::Vertical,
            owner: grid.offset(c, -1, 0),
        },
        Side::North => FaceId {
            orientation: Orientation::Horizontal,
            owner: c,
        },
        Side::South => FaceId {
            orientation: Orientation::Horizontal,
            owner: grid.offset(c, 0, -1),
        },
    }
}

/// Per-cell lower and upper bounds over some neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsField {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundsField {
    #[inline]
    pub fn get(&self, k: usize) -> Bounds {
        Bounds {
            lo: self.lo[k],
            hi: self.hi[k],
        }
    }

    fn constant(n: usize, b: Bounds) -> Self {
        Self {
            lo: vec![b.lo; n],
            hi: vec![b.hi; n],
        }
    }
}

/// Extrema over the plus stencil `N(K) ∪ {K}`.
pub fn plus_bounds(u: &CellField, grid: &Grid) -> BoundsField {
    spread_plus(u.as_slice(), u.as_slice(), grid)
}

/// Extrema over the diamond `N²(K) ∪ N(K)`: the plus stencil of the plus
/// stencil.
pub fn diamond_bounds(u: &CellField, grid: &Grid) -> BoundsField {
    let p = plus_bounds(u, grid);
    spread_plus(&p.lo, &p.hi, grid)
}

/// Extrema over the four cells around the upper-right vertex of each cell.
pub fn corner_bounds(u: &CellField, grid: &Grid) -> BoundsField {
    let n = grid.num_cells();
    let (mut lo, mut hi) = (vec![0.0; n], vec![0.0; n]);
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            let (a, b, c, d) = (u[s.k], u[s.e], u[s.n], u[s.ne]);
            lo[s.k] = fmin(fmin(a, b), fmin(c, d));
            hi[s.k] = fmax(fmax(a, b), fmax(c, d));
        }
    }
    BoundsField { lo, hi }
}

/// Extrema over the 3x3 block around each cell.
pub fn box_bounds(u: &CellField, grid: &Grid) -> BoundsField {
    let v = corner_bounds(u, grid);
    let n = grid.num_cells();
    let (mut lo, mut hi) = (vec![0.0; n], vec![0.0; n]);
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let s = grid.stencil(i, j);
            lo[s.k] = fmin(fmin(v.lo[s.k], v.lo[s.w]), fmin(v.lo[s.s], v.lo[s.sw]));
            hi[s.k] = fmax(fmax(v.hi[s.k], v.hi[s.w]), fmax(v.hi[s.s], v.hi[s.sw]));
        }
    }
    BoundsField { lo, hi }
}

fn spread_plus(lo_in: &[f64], hi_in: &[f64], grid: &Grid) -> BoundsField {
    BoundsField {
        lo: plus_extreme(lo_in, grid, fmin),
        hi: plus_extreme(hi_in, grid, fmax),
    }
}

/// `pick` folded over the plus stencil of every cell, one row at a time.
fn plus_extreme(a: &[f64], grid: &Grid, pick: impl Fn(f64, f64) -> f64 + Copy) -> Vec<f64> {
    let (nx, ny) = grid.shape();
    let row = |j: usize| &a[j * nx..][..nx];
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let (r, s, n) = (row(j), row((j + ny - 1) % ny), row((j + 1) % ny));
        let at = |i: usize, w: usize, e: usize| pick(pick(r[w], r[i]), pick(r[e], pick(s[i], n[i])));
        out.push(at(0, nx - 1, 1));
        out.extend(
            r.windows(3)
                .zip(&s[1..])
                .zip(&n[1..])
                .map(|((w, &sv), &nv)| pick(pick(w[0], w[1]), pick(w[2], pick(sv, nv)))),
        );
        out.push(at(nx - 1, nx - 2, 0));
    }
    out
}

/// Cell-mean bounds of the maximum principle `kind` guarantees for one
/// forward-Euler stage starting from `u`. `None` when the limiter has no
/// principle.
pub fn principle_bounds(
    kind: LimiterKind,
    u: &CellField,
    grid: &Grid,
    global: Option<Bounds>,
) -> Result<Option<BoundsField>> {
    Ok(match kind {
        LimiterKind::Unlimited => None,
        LimiterKind::Nk => Some(plus_bounds(u, grid)),
        LimiterKind::N2n | LimiterKind::Bj => Some(diamond_bounds(u, grid)),
        LimiterKind::Kuzmin => Some(box_bounds(u, grid)),
        LimiterKind::Global => Some(BoundsField::constant(
            grid.num_cells(),
            global.ok_or(Error::MissingGlobalBounds)?,
        )),
    })
}

/// Neighbourhood extrema of one field, computed once and shared by the
/// limiter and the maximum-principle check of a stage.
#[derive(Debug, Clone)]
pub struct LimiterBounds {
    kind: LimiterKind,
    plus: Option<BoundsField>,
    diamond: Option<BoundsField>,
    corners: Option<BoundsField>,
    global: Option<Bounds>,
}

impl LimiterBounds {
    pub fn new(kind: LimiterKind, u: &CellField, grid: &Grid, global: Option<Bounds>) -> Result<Self> {
        u.check_grid(grid)?;
        let global = match kind {
            LimiterKind::Global => Some(global.ok_or(Error::MissingGlobalBounds)?),
            _ => None,
        };
        let plus = match kind {
            LimiterKind::Bj | LimiterKind::N2n | LimiterKind::Nk => Some(plus_bounds(u, grid)),
            _ => None,
        };
        let diamond = match (kind, &plus) {
            (LimiterKind::Bj | LimiterKind::N2n, Some(p)) => Some(spread_plus(&p.lo, &p.hi, grid)),
            _ => None,
        };
        let corners = match kind {
            LimiterKind::Kuzmin => Some(corner_bounds(u, grid)),
            _ => None,
        };
        Ok(Self {
            kind,
            plus,
            diamond,
            corners,
            global,
        })
    }

    pub fn kind(&self) -> LimiterKind {
        self.kind
    }

    /// `α` of the cell at stencil `s` with mean field `u`.
    #[inline]
    pub fn alpha(&self, s: &Stencil, u: &[f64], pts: &CellPoints) -> f64 {
        match pts.per_face {
            1 => self.alpha_q::<1>(s, u, pts),
            2 => self.alpha_q::<2>(s, u, pts),
            q => panic!("{q} points per face"),
        }
    }

    #[inline(always)]
    fn alpha_q<const Q: usize>(&self, s: &Stencil, u: &[f64], pts: &CellPoints) -> f64 {
        let mean = u[s.k];
        let neighbors = [s.e, s.w, s.n, s.s];
        let mut a: f64 = 1.0;
        let mut clip = |d: f64, lo: f64, hi: f64| a = fmin(a, bj_deviation(d, mean, lo, hi));
        match self.kind {
            LimiterKind::Unlimited => {}
            LimiterKind::Bj | LimiterKind::Global => {
                let b = match self.global {
                    Some(g) => g,
                    None => self.plus.as_ref().expect("plus bounds").get(s.k),
                };
                for side in &pts.faces {
                    for &d in &side[..Q] {
                        clip(d, b.lo, b.hi);
                    }
                }
                if let Some(d) = pts.center {
                    clip(d, b.lo, b.hi);
                }
            }
            LimiterKind::Nk => {
                for (side, &l) in pts.faces.iter().zip(&neighbors) {
                    let l = u[l];
                    let (lo, hi) = (fmin(mean, l), fmax(mean, l));
                    for &d in &side[..Q] {
                        clip(d, lo, hi);
                    }
                }
                if let Some(d) = pts.center {
                    let b = self.plus.as_ref().expect("plus bounds").get(s.k);
                    clip(d, b.lo, b.hi);
                }
            }
            LimiterKind::N2n => {
                let plus = self.plus.as_ref().expect("plus bounds");
                let (klo, khi) = (plus.lo[s.k], plus.hi[s.k]);
                for (side, &l) in pts.faces.iter().zip(&neighbors) {
                    let (lo, hi) = (fmin(klo, plus.lo[l]), fmax(khi, plus.hi[l]));
                    for &d in &side[..Q] {
                        clip(d, lo, hi);
                    }
                }
                if let Some(d) = pts.center {
                    let b = self.diamond.as_ref().expect("diamond bounds").get(s.k);
                    clip(d, b.lo, b.hi);
                }
            }
            LimiterKind::Kuzmin => {
                let c = self.corners.as_ref().expect("vertex bounds");
                if let Some(ds) = pts.corners {
                    for (v, d) in [s.k, s.w, s.s, s.sw].into_iter().zip(ds) {
                        clip(d, c.lo[v], c.hi[v]);
                    }
                }
            }
        }
        a
    }

    /// Limit every cell of `recon` (built from `u`), passing the cell
    /// index, its `α` and its unlimited point deviations to `visit`.
    pub fn limit<R: SubcellRecon>(
        &self,
        recon: &R,
        u: &CellField,
        grid: &Grid,
        mut visit: impl FnMut(usize, f64, &CellPoints),
    ) -> Result<()> {
        check_supported(self.kind, recon.scheme())?;
        u.check_grid(grid)?;
        let u = u.as_slice();
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let s = grid.stencil(i, j);
                let pts = recon.cell_points(s.k);
                visit(s.k, self.alpha(&s, u, &pts), &pts);
            }
        }
        Ok(())
    }

    /// Largest distance of `out` outside the cell-mean principle of the
    /// limiter, measured with these bounds. `None` for `Unlimited`.
    pub fn principle_violation(&self, out: &CellField, grid: &Grid) -> Option<f64> {
        let out = out.as_slice();
        let mut worst: f64 = 0.0;
        let mut check = |v: f64, lo: f64, hi: f64| worst = worst.max((lo - v).max(v - hi));
        match self.kind {
            LimiterKind::Unlimited => return None,
            LimiterKind::Nk | LimiterKind::Bj | LimiterKind::N2n => {
                let b = match self.kind {
                    LimiterKind::Nk => self.plus.as_ref(),
                    _ => self.diamond.as_ref(),
                }
                .expect("principle bounds");
                for (k, &v) in out.iter().enumerate() {
                    check(v, b.lo[k], b.hi[k]);
                }
            }
            LimiterKind::Kuzmin => {
                let c = self.corners.as_ref().expect("vertex bounds");
                for j in 0..grid.ny() {
                    for i in 0..grid.nx() {
                        let s = grid.stencil(i, j);
                        let vs = [s.k, s.w, s.s, s.sw];
                        let lo = vs.iter().map(|&v| c.lo[v]).fold(f64::INFINITY, f64::min);
                        let hi = vs.iter().map(|&v| c.hi[v]).fold(f64::NEG_INFINITY, f64::max);
                        check(out[s.k], lo, hi);
                    }
                }
            }
            LimiterKind::Global => {
                let g = self.global.expect("global bounds");
                for &v in out {
                    check(v, g.lo, g.hi);
                }
            }
        }
        Some(worst)
    }
}

/// `α_K` for every cell. Same result as calling [`limit_cell`] per cell,
/// with the neighbourhood extrema precomputed once per field.
pub fn alpha_field(
    kind: LimiterKind,
    recon: &impl SubcellRecon,
    u: &CellField,
    grid: &Grid,
    global: Option<Bounds>,
) -> Result<Vec<f64>> {
    let mut alpha = vec![1.0; grid.num_cells()];
    LimiterBounds::new(kind, u, grid, global)?.limit(recon, u, grid, |k, a, _| alpha[k] = a)?;
    Ok(alpha)
}

// `f64::min`/`max` also order NaNs, which keeps them out of the vector
// min/max instructions; the fields here are finite.
#[inline(always)]
fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

#[inline(always)]
fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}
