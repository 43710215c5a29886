//! Error norms, convergence orders and maximum-principle checks.

use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::Grid;
use crate::limiters::{principle_bounds, Bounds, BoundsField, LimiterKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];

    pub fn name(&self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Some(Norm::L1),
            "l2" => Some(Norm::L2),
            "linf" => Some(Norm::Linf),
            _ => None,
        }
    }
}

/// `(Σ |v|^p |K|)^{1/p}`, or `max |v|` for `Linf`.
pub fn norm(values: impl Iterator<Item = f64>, area: f64, p: Norm) -> f64 {
    match p {
        Norm::L1 => values.map(f64::abs).sum::<f64>() * area,
        Norm::L2 => (values.map(|v| v * v).sum::<f64>() * area).sqrt(),
        Norm::Linf => values.map(f64::abs).fold(0.0, f64::max),
    }
}

/// `‖u − u_exact‖_p / ‖u_exact‖_p` with cell-mean discrete norms.
pub fn relative_error(u: &CellField, exact: &CellField, grid: &Grid, p: Norm) -> Result<f64> {
    u.check_grid(grid)?;
    exact.check_grid(grid)?;
    let area = grid.cell_area();
    let denom = norm(exact.as_slice().iter().copied(), area, p);
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff = u.as_slice().iter().zip(exact.as_slice()).map(|(a, b)| a - b);
    Ok(norm(diff, area, p) / denom)
}

/// `log(e_coarse / e_fine) / log 2` for a twofold refinement.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::NonPositiveError {
            coarse: e_coarse,
            fine: e_fine,
        });
    }
    Ok((e_coarse / e_fine).ln() / 2f64.ln())
}

/// Largest distance of any cell of `u` outside its bounds.
pub fn max_violation(u: &CellField, bounds: &BoundsField) -> f64 {
    u.as_slice()
        .iter()
        .enumerate()
        .map(|(k, &v)| bounds.get(k).violation(v))
        .fold(0.0, f64::max)
}

/// Worst violation of the cell-mean maximum principle `kind` guarantees,
/// for one forward-Euler stage from `stage_in` to `stage_out`. `None` for
/// the unlimited scheme, which promises none.
pub fn mp_check(
    stage_in: &CellField,
    stage_out: &CellField,
    kind: LimiterKind,
    grid: &Grid,
    global: Option<Bounds>,
) -> Result<Option<f64>> {
    stage_in.check_grid(grid)?;
    stage_out.check_grid(grid)?;
    Ok(principle_bounds(kind, stage_in, grid, global)?.map(|b| max_violation(stage_out, &b)))
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub rel_l1: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
    pub min: f64,
    pub max: f64,
    /// Worst per-stage maximum-principle violation; `None` when the
    /// limiter has no principle.
    pub max_mp_violation: Option<f64>,
    pub max_courant: f64,
}

impl ErrorReport {
    pub fn new(
        u: &CellField,
        exact: &CellField,
        grid: &Grid,
        max_mp_violation: Option<f64>,
        max_courant: f64,
    ) -> Result<Self> {
        Ok(Self {
            rel_l1: relative_error(u, exact, grid, Norm::L1)?,
            rel_l2: relative_error(u, exact, grid, Norm::L2)?,
            rel_linf: relative_error(u, exact, grid, Norm::Linf)?,
            min: u.min(),
            max: u.max(),
            max_mp_violation,
            max_courant,
        })
    }

    pub fn error(&self, p: Norm) -> f64 {
        match p {
            Norm::L1 => self.rel_l1,
            Norm::L2 => self.rel_l2,
            Norm::Linf => self.rel_linf,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        let g = Grid::square(6).unwrap();
        let u = CellField::from_fn(&g, |i, j| (i + 2 * j) as f64 * 0.1 + 1.0);
        for p in Norm::ALL {
            assert_eq!(relative_error(&u, &u, &g, p).unwrap(), 0.0);
        }
        let three = CellField::constant(6, 6, 3.0);
        let two = CellField::constant(6, 6, 2.0);
        for p in Norm::ALL {
            assert!((relative_error(&three, &two, &g, p).unwrap() - 0.5).abs() < 1e-15);
        }
        let e = 0.125;
        let one = CellField::constant(6, 6, 1.0);
        let pm = CellField::from_fn(&g, |i, _| if i < 3 { 1.0 + e } else { 1.0 - e });
        assert!((relative_error(&pm, &one, &g, Norm::L1).unwrap() - e).abs() < 1e-15);
        let zero = CellField::zeros(6, 6);
        assert_eq!(relative_error(&one, &zero, &g, Norm::L2), Err(Error::ZeroNorm));
    }

    #[test]
    fn relative_error_is_scale_invariant() {
        let g = Grid::square(8).unwrap();
        let u = CellField::from_fn(&g, |i, j| ((i * 7 + j * 3) % 5) as f64);
        let ex = CellField::from_fn(&g, |i, j| ((i * 7 + j * 3) % 5) as f64 + 0.1 * (i as f64));
        for p in Norm::ALL {
            let a = relative_error(&u, &ex, &g, p).unwrap();
            let scaled = |f: &CellField| CellField::from_fn(&g, |i, j| 4.0 * f.get(i, j));
            let b = relative_error(&scaled(&u), &scaled(&ex), &g, p).unwrap();
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn order_examples() {
        assert!((observed_order(0.04, 0.01).unwrap() - 2.0).abs() < 1e-15);
        assert!((observed_order(0.08, 0.01).unwrap() - 3.0).abs() < 1e-15);
        assert!(observed_order(0.0, 0.01).is_err());
    }

    #[test]
    fn mp_check_examples() {
        let g = Grid::square(7).unwrap();
        let u = CellField::from_fn(&g, |i, j| ((i * 3 + j * 5) % 7) as f64 / 7.0);
        let gb = Some(Bounds::of_field(&u));
        for kind in LimiterKind::ALL {
            let v = mp_check(&u, &u, kind, &g, gb).unwrap();
            match kind {
                LimiterKind::Unlimited => assert_eq!(v, None),
                _ => assert_eq!(v, Some(0.0)),
            }
        }
        let mut out = u.clone();
        out[0] = 2.0;
        assert!((mp_check(&u, &out, LimiterKind::Nk, &g, None).unwrap().unwrap() - (2.0 - 5.0 / 7.0)).abs() < 1e-15);
    }
}
