//! Expectation values of the detected-particle displacement versus
//! interaction strength.
//!
//! Each particle's `<x>, <y>` are reported in its own local frame (the
//! `y` axis pointing away from the beam-layout centre), which is how
//! the displacement curves are plotted; only the momentum balance
//! rotates the per-particle expectations back into the global frame.
//!
//! Two evaluation routes exist for every expectation: direct first
//! moments of a sampled density grid, and the closed-form Gaussian
//! moments of the assembled terms. The analytic route is what the
//! sweeps use; the grid route is retained as a cross-check and the two
//! must agree to 1e-6 sigma.

use serde::Serialize;

use crate::branch::{expand_postselected, DetectorPattern, PostSelectedState};
use crate::density::{build_terms, probability_density, GridSpec};
use crate::error::{Error, Result};
use crate::geometry::{DeflectionGeometry, Vec2};
use crate::modes::{InteractionConfig, PhaseModel};

/// Configuration snapshot embedded in serialized sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub pattern: String,
    pub chi: f64,
    pub k: f64,
    pub phase_model: String,
    pub ensemble_spread: bool,
}

fn phase_model_name(m: PhaseModel) -> &'static str {
    match m {
        PhaseModel::None => "none",
        PhaseModel::Geometric => "geometric",
        PhaseModel::GeometricPlusInteraction => "geometric_plus_interaction",
    }
}

/// Per-particle displacement expectations over an ascending grid of
/// interaction strengths, with the incoherent baseline alongside.
#[derive(Debug, Clone)]
pub struct SweepCurve {
    pub d: Vec<f64>,
    /// `coherent[particle][i]` is `(<x>, <y>)` at `d[i]`.
    pub coherent: Vec<Vec<(f64, f64)>>,
    pub incoherent: Vec<Vec<(f64, f64)>>,
    pub config: SweepConfig,
}

impl SweepCurve {
    pub fn particle_count(&self) -> usize {
        self.coherent.len()
    }

    /// Finite-difference slope of `<y>` at `d = 0` for one particle.
    pub fn slope_at_zero(&self, particle: usize) -> Result<f64> {
        let ys: Vec<f64> = self.coherent[particle].iter().map(|p| p.1).collect();
        slope_at_zero(&self.d, &ys)
    }

    /// Same estimator on the incoherent baseline.
    pub fn incoherent_slope_at_zero(&self, particle: usize) -> Result<f64> {
        let ys: Vec<f64> = self.incoherent[particle].iter().map(|p| p.1).collect();
        slope_at_zero(&self.d, &ys)
    }
}

/// Expectation by grid integration: build the density on `spec` (or an
/// automatically sized window when `spec` is `None`) and take first
/// moments.
pub fn expectation(
    state: &PostSelectedState,
    config: &InteractionConfig,
    particle: usize,
    spec: Option<&GridSpec>,
) -> Result<(f64, f64)> {
    let terms = build_terms(state, config, particle)?;
    let auto;
    let spec = match spec {
        Some(s) => s,
        None => {
            auto = GridSpec::covering(&terms, 8.0);
            &auto
        }
    };
    let grid = probability_density(&terms, spec)?;
    Ok(grid.first_moments())
}

/// Expectation from the closed-form Gaussian moments of the terms.
pub fn expectation_analytic(
    state: &PostSelectedState,
    config: &InteractionConfig,
    particle: usize,
) -> Result<(f64, f64)> {
    let terms = build_terms(state, config, particle)?;
    Ok(terms.analytic_expectation(true))
}

/// Incoherent-baseline expectation: the coefficient-weighted mean of
/// the group mode centres (all surviving groups carry equal weight in
/// the quarter-wave configurations, so this is their plain average).
pub fn incoherent_expectation(
    state: &PostSelectedState,
    config: &InteractionConfig,
    particle: usize,
) -> Result<(f64, f64)> {
    let terms = build_terms(state, config, particle)?;
    Ok(terms.analytic_expectation(false))
}

/// Sweep the interaction strength over `d_grid` and record every
/// particle's coherent and incoherent expectations.
///
/// The per-particle symmetries of the standard configurations (equal
/// `<y>` for all particles of an all-same-detector pattern, etc.) are
/// not assumed anywhere: each particle's marginal is assembled and
/// integrated independently.
pub fn sweep(
    pattern: &DetectorPattern,
    chi: f64,
    base: &InteractionConfig,
    d_grid: &[f64],
) -> Result<SweepCurve> {
    if d_grid.is_empty() {
        return Err(Error::invalid("sweep requires at least one d value"));
    }
    if d_grid.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::invalid("sweep d values must be finite and >= 0"));
    }
    if d_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep d values must be strictly ascending"));
    }
    let n = pattern.len();
    let state = expand_postselected(n, pattern, chi)?;
    if state.nonzero_group_count() == 0 {
        return Err(Error::invalid(
            "post-selection pattern has zero amplitude at this phase shift",
        ));
    }

    use rayon::prelude::*;
    let rows: Vec<Vec<(f64, f64)>> = d_grid
        .par_iter()
        .map(|&d| {
            let config = InteractionConfig { d, ..*base };
            (0..n)
                .map(|p| {
                    let terms = build_terms(&state, &config, p)?;
                    let coh = terms.analytic_expectation(true);
                    let inc = terms.analytic_expectation(false);
                    Ok([coh, inc])
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().flatten().collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut coherent = vec![Vec::with_capacity(d_grid.len()); n];
    let mut incoherent = vec![Vec::with_capacity(d_grid.len()); n];
    for row in &rows {
        for p in 0..n {
            coherent[p].push(row[2 * p]);
            incoherent[p].push(row[2 * p + 1]);
        }
    }
    Ok(SweepCurve {
        d: d_grid.to_vec(),
        coherent,
        incoherent,
        config: SweepConfig {
            pattern: pattern.to_string(),
            chi,
            k: base.k,
            phase_model: phase_model_name(base.phase_model).to_string(),
            ensemble_spread: base.ensemble_spread,
        },
    })
}

/// Ascending `d` grid from 0 to `max` in steps of `step`.
pub fn d_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max >= 0.0) {
        return Err(Error::invalid("d grid needs max >= 0 and step > 0"));
    }
    let count = (max / step).round() as usize;
    Ok((0..=count).map(|i| i as f64 * step).collect())
}

/// Default sweep grid for a phase model: the oscillations of the full
/// phase model at k ~ 5 have period ~ 2 pi / (4 k), so it is sampled
/// five times finer over a shorter range.
pub fn default_d_grid(phase_model: PhaseModel) -> Vec<f64> {
    match phase_model {
        PhaseModel::GeometricPlusInteraction => d_grid(1.5, 0.002).unwrap(),
        _ => d_grid(3.0, 0.01).unwrap(),
    }
}

/// Vector sum of all per-particle displacement expectations, rotated
/// into the shared global frame. Transverse momentum conservation makes
/// this (0, 0) up to rounding.
pub fn momentum_sum(
    pattern: &DetectorPattern,
    chi: f64,
    base: &InteractionConfig,
    d: f64,
) -> Result<(f64, f64)> {
    let n = pattern.len();
    let config = InteractionConfig { d, ..*base };
    let state = expand_postselected(n, pattern, chi)?;
    let geometry = DeflectionGeometry::regular(n)?;
    let mut total = Vec2::ZERO;
    for p in 0..n {
        let terms = build_terms(&state, &config, p)?;
        let (ex, ey) = terms.analytic_expectation(true);
        total = total + geometry.local_to_global(p, Vec2::new(ex, ey));
    }
    Ok((total.x, total.y))
}

/// Slope of `y(d)` at `d = 0` from the two smallest positive grid
/// points, Richardson-extrapolated: fitting `y/d` linearly in `d` and
/// reading off the intercept removes the quadratic term of `y`.
///
/// Requires at least two positive `d` values no larger than 0.02 (the
/// estimator is meant for the small-`d` region).
pub fn slope_at_zero(d: &[f64], y: &[f64]) -> Result<f64> {
    if d.len() != y.len() {
        return Err(Error::invalid("d and y lengths differ"));
    }
    let mut pts: Vec<(f64, f64)> = d
        .iter()
        .zip(y)
        .filter(|(d, _)| **d > 0.0 && **d <= 0.02)
        .map(|(d, y)| (*d, *y))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid(
            "slope estimate needs two positive d points of at most 0.02",
        ));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (d1, y1) = pts[0];
    let (d2, y2) = pts[1];
    let s1 = y1 / d1;
    let s2 = y2 / d2;
    Ok((d2 * s1 - d1 * s2) / (d2 - d1))
}

/// Count the local extrema of `y(d)` strictly inside `(lo, hi)`:
/// consecutive-difference sign changes beyond the monotone incoherent
/// trend. `tol` suppresses flat-segment noise.
pub fn extrema_count(d: &[f64], y: &[f64], lo: f64, hi: f64, tol: f64) -> usize {
    let mut count = 0;
    let mut last_sign = 0i8;
    for i in 1..d.len() {
        let mid = 0.5 * (d[i] + d[i - 1]);
        if mid <= lo || mid >= hi {
            continue;
        }
        let dy = y[i] - y[i - 1];
        if dy.abs() <= tol {
            continue;
        }
        let sign = if dy > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            count += 1;
        }
        last_sign = sign;
    }
    count
}
