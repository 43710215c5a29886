//! Strong-stability-preserving Runge–Kutta in Shu–Osher form, and the
//! choice of time step from a Courant target.

use crate::error::{Error, Result};
use crate::field::CellField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SspScheme {
    Fe,
    Ssp22,
    Ssp33,
}

impl SspScheme {
    pub fn name(&self) -> &'static str {
        match self {
            SspScheme::Fe => "fe",
            SspScheme::Ssp22 => "ssp22",
            SspScheme::Ssp33 => "ssp33",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fe" | "euler" => Some(SspScheme::Fe),
            "ssp22" => Some(SspScheme::Ssp22),
            "ssp33" => Some(SspScheme::Ssp33),
            _ => None,
        }
    }

    pub fn stages(&self) -> usize {
        self.stage_offsets().len()
    }

    /// Stage times as fractions of `Δt` past the step start.
    pub fn stage_offsets(&self) -> &'static [f64] {
        match self {
            SspScheme::Fe => &[0.0],
            SspScheme::Ssp22 => &[0.0, 1.0],
            SspScheme::Ssp33 => &[0.0, 1.0, 0.5],
        }
    }
}

impl std::fmt::Display for SspScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One step of `scheme` built from a forward-Euler stage
/// `fe(v, τ) = v + Δt L(v, τ)`:
///
/// * SSP22: `u¹ = fe(u, t)`, `u' = ½u + ½fe(u¹, t+Δt)`
/// * SSP33: `u¹ = fe(u, t)`, `u² = ¾u + ¼fe(u¹, t+Δt)`,
///   `u' = ⅓u + ⅔fe(u², t+Δt/2)`
pub fn ssp_step<F>(scheme: SspScheme, u: &CellField, t: f64, dt: f64, mut fe: F) -> Result<CellField>
where
    F: FnMut(&CellField, f64) -> Result<CellField>,
{
    match scheme {
        SspScheme::Fe => fe(u, t),
        SspScheme::Ssp22 => {
            let u1 = fe(u, t)?;
            let e1 = fe(&u1, t + dt)?;
            Ok(CellField::combine(0.5, u, 0.5, &e1))
        }
        SspScheme::Ssp33 => {
            let u1 = fe(u, t)?;
            let e1 = fe(&u1, t + dt)?;
            let u2 = CellField::combine(0.75, u, 0.25, &e1);
            let e2 = fe(&u2, t + 0.5 * dt)?;
            Ok(CellField::combine(1.0 / 3.0, u, 2.0 / 3.0, &e2))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub n_steps: usize,
    /// Stage times as fractions of `dt`.
    pub stage_offsets: Vec<f64>,
    /// Largest stage Courant number at full velocity amplitude.
    pub courant: f64,
}

/// Number of equal steps covering `end_time` with steps no longer than
/// `raw_dt` (a relative slack of 1e-12 absorbs rounding in the ratio).
pub fn steps_for(end_time: f64, raw_dt: f64) -> usize {
    ((end_time / raw_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Choose `Δt = end_time / n`.
///
/// The initial `n` comes from `raw_dt = target / peak_rate`, with
/// `peak_rate` the largest `|u|/Δx + |v|/Δy` at full amplitude; `n` then
/// grows until the scheme's discrete stage Courant number `courant_at(Δt)`
/// no longer exceeds the target. A forced step count is accepted only if it
/// respects the same bound.
pub fn plan_steps(
    scheme: SspScheme,
    end_time: f64,
    target: f64,
    peak_rate: f64,
    forced: Option<usize>,
    courant_at: impl Fn(f64) -> f64,
) -> Result<StepPlan> {
    let offsets = scheme.stage_offsets().to_vec();
    if end_time == 0.0 {
        return Ok(StepPlan {
            dt: 0.0,
            n_steps: 0,
            stage_offsets: offsets,
            courant: 0.0,
        });
    }
    let tol = 1e-12;
    if let Some(n) = forced {
        if n == 0 {
            return Err(Error::Config("step count must be positive".into()));
        }
        let dt = end_time / n as f64;
        let courant = courant_at(dt);
        if courant > target + tol {
            return Err(Error::CourantExceeded {
                requested: n,
                target,
                courant,
            });
        }
        return Ok(StepPlan {
            dt,
            n_steps: n,
            stage_offsets: offsets,
            courant,
        });
    }
    if peak_rate.is_nan() || peak_rate <= 0.0 {
        return Err(Error::ZeroVelocity);
    }
    let mut n = steps_for(end_time, target / peak_rate);
    loop {
        let dt = end_time / n as f64;
        let courant = courant_at(dt);
        if courant <= target + tol {
            return Ok(StepPlan {
                dt,
                n_steps: n,
                stage_offsets: offsets,
                courant,
            });
        }
        n += 1;
    }
}
