use proptest::prelude::*;

use fvmp::diagnostics::mp_check;
use fvmp::limiters::{alpha_field, check_supported, limit_cell, Bounds, CellPoints, LimiterBounds, SubcellRecon};
use fvmp::{fv2, fv4, CellField, Grid, LimiterKind, Scheme};

fn field() -> impl Strategy<Value = CellField> {
    (5usize..9, 5usize..9).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(-1.0f64..1.0, nx * ny).prop_map(move |v| CellField::from_vec(nx, ny, v).unwrap())
    })
}

fn grid_of(u: &CellField) -> Grid {
    Grid::new(u.nx(), u.ny()).unwrap()
}

fn supported(scheme: Scheme) -> impl Iterator<Item = LimiterKind> {
    LimiterKind::ALL
        .into_iter()
        .filter(move |&k| check_supported(k, scheme).is_ok())
}

fn global_of(u: &CellField) -> Option<Bounds> {
    Some(Bounds::of_field(u))
}

/// Per-cell α from the point-wise definition.
fn reference_alpha(kind: LimiterKind, recon: &impl SubcellRecon, u: &CellField, grid: &Grid) -> Vec<f64> {
    (0..grid.num_cells())
        .map(|k| limit_cell(kind, recon, u, grid.cell(k), grid, global_of(u)).unwrap())
        .collect()
}

/// A reconstruction with every deviation of cell `k` scaled by `alpha[k]`.
struct Scaled<'a, R> {
    inner: &'a R,
    alpha: &'a [f64],
}

impl<R: SubcellRecon> SubcellRecon for Scaled<'_, R> {
    fn scheme(&self) -> Scheme {
        self.inner.scheme()
    }

    fn cell_points(&self, k: usize) -> CellPoints {
        let a = self.alpha[k];
        let mut p = self.inner.cell_points(k);
        p.faces.iter_mut().flatten().for_each(|d| *d *= a);
        p.center = p.center.map(|d| d * a);
        p.corners = p.corners.map(|c| c.map(|d| d * a));
        p
    }
}

fn check_kernel(kind: LimiterKind, recon: &impl SubcellRecon, u: &CellField, grid: &Grid) {
    let fast = alpha_field(kind, recon, u, grid, global_of(u)).unwrap();
    assert_eq!(fast, reference_alpha(kind, recon, u, grid), "{kind}");
}

fn alphas(scheme: Scheme, kind: LimiterKind, u: &CellField, grid: &Grid) -> Vec<f64> {
    match scheme {
        Scheme::Fv2 => alpha_field(kind, &fv2::central_slopes(u, grid), u, grid, global_of(u)),
        Scheme::Fv4 => alpha_field(kind, &fv4::reconstruct(u, grid), u, grid, global_of(u)),
    }
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_kernel_matches_pointwise_definition(u in field()) {
        let grid = grid_of(&u);
        let lin = fv2::central_slopes(&u, &grid);
        let cub = fv4::reconstruct(&u, &grid);
        for kind in supported(Scheme::Fv2) {
            check_kernel(kind, &lin, &u, &grid);
        }
        for kind in supported(Scheme::Fv4) {
            check_kernel(kind, &cub, &u, &grid);
        }
    }

    #[test]
    fn alpha_is_a_fraction(u in field()) {
        let grid = grid_of(&u);
        for scheme in [Scheme::Fv2, Scheme::Fv4] {
            for kind in supported(scheme) {
                for a in alphas(scheme, kind, &u, &grid) {
                    prop_assert!((0.0..=1.0).contains(&a), "{scheme} {kind}: {a}");
                }
            }
        }
    }

    #[test]
    fn alpha_is_affine_invariant(u in field(), scale in 0.1f64..10.0, shift in -5.0f64..5.0, flip: bool) {
        let grid = grid_of(&u);
        let s = if flip { -scale } else { scale };
        let v = CellField::from_vec(u.nx(), u.ny(), u.as_slice().iter().map(|x| s * x + shift).collect()).unwrap();
        for scheme in [Scheme::Fv2, Scheme::Fv4] {
            for kind in supported(scheme) {
                let (a, b) = (alphas(scheme, kind, &u, &grid), alphas(scheme, kind, &v, &grid));
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-9, "{scheme} {kind}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn neighbor_of_neighbor_dominates_bj(u in field()) {
        let grid = grid_of(&u);
        for scheme in [Scheme::Fv2, Scheme::Fv4] {
            let bj = alphas(scheme, LimiterKind::Bj, &u, &grid);
            let n2n = alphas(scheme, LimiterKind::N2n, &u, &grid);
            for (b, n) in bj.iter().zip(&n2n) {
                prop_assert!(n >= b, "{scheme}: n2n {n} < bj {b}");
            }
        }
    }

    #[test]
    fn limited_reconstruction_needs_no_further_limiting(u in field()) {
        let grid = grid_of(&u);
        let lin = fv2::central_slopes(&u, &grid);
        let cub = fv4::reconstruct(&u, &grid);
        for kind in supported(Scheme::Fv2) {
            let alpha = alphas(Scheme::Fv2, kind, &u, &grid);
            let again = reference_alpha(kind, &Scaled { inner: &lin, alpha: &alpha }, &u, &grid);
            prop_assert!(again.iter().all(|&a| a >= 1.0 - 1e-12), "fv2 {kind}: {again:?}");
        }
        for kind in supported(Scheme::Fv4) {
            let alpha = alphas(Scheme::Fv4, kind, &u, &grid);
            let again = reference_alpha(kind, &Scaled { inner: &cub, alpha: &alpha }, &u, &grid);
            prop_assert!(again.iter().all(|&a| a >= 1.0 - 1e-12), "fv4 {kind}: {again:?}");
        }
    }

    #[test]
    fn principle_check_matches_diagnostic(u in field(), out in prop::collection::vec(-1.5f64..1.5, 64)) {
        let grid = grid_of(&u);
        let out = CellField::from_vec(u.nx(), u.ny(), out.into_iter().cycle().take(u.len()).collect()).unwrap();
        for kind in LimiterKind::ALL {
            let bounds = LimiterBounds::new(kind, &u, &grid, global_of(&u)).unwrap();
            let a = bounds.principle_violation(&out, &grid);
            let b = mp_check(&u, &out, kind, &grid, global_of(&u)).unwrap();
            prop_assert_eq!(a, b, "{}", kind);
        }
    }
}

#[test]
fn constant_fields_are_never_limited() {
    let grid = Grid::square(7).unwrap();
    let u = CellField::on_grid(&grid, 0.3);
    for scheme in [Scheme::Fv2, Scheme::Fv4] {
        for kind in supported(scheme) {
            assert!(
                alphas(scheme, kind, &u, &grid).iter().all(|&a| a == 1.0),
                "{scheme} {kind}"
            );
        }
    }
}
