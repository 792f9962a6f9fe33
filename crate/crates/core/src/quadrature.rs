//! Brute-force numerical verification path.
//!
//! Everything here is deliberately independent of the closed forms it
//! checks: overlaps are integrated pointwise on tensor-product grids,
//! and the two-particle marginal is obtained by building the joint
//! amplitude on a 4-D grid and integrating out the partner coordinates,
//! with no use of the factorized cross-term structure.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::branch::{expand_postselected, DetectorPattern};
use crate::density::{DensityGrid, GridSpec};
use crate::error::{Error, Result};
use crate::geometry::{DeflectionGeometry, Vec2};
use crate::modes::{evaluate, mode_for, GaussianMode, InteractionConfig};

/// Composite quadrature rules on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    Trapezoid,
    Simpson,
}

/// One-axis uniform quadrature specification, applied per axis of the
/// tensor-product 2-D rules.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl QuadratureSpec {
    /// Simpson, 129 points per axis over [-10, 10].
    pub fn default_oracle() -> Self {
        QuadratureSpec {
            rule: QuadRule::Simpson,
            min: -10.0,
            max: 10.0,
            points: 129,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.max <= self.min {
            return Err(Error::invalid("quadrature range must be finite, max > min"));
        }
        match self.rule {
            QuadRule::Simpson => {
                if self.points < 33 || self.points.is_multiple_of(2) {
                    return Err(Error::invalid(format!(
                        "Simpson rule needs an odd point count of at least 33, got {}",
                        self.points
                    )));
                }
            }
            QuadRule::Trapezoid => {
                if self.points < 2 {
                    return Err(Error::invalid("trapezoid rule needs at least 2 points"));
                }
            }
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.min + self.step() * i as f64)
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let n = self.points;
        match self.rule {
            QuadRule::Trapezoid => (0..n)
                .map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h })
                .collect(),
            QuadRule::Simpson => (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        h / 3.0
                    } else if !i.is_multiple_of(2) {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    }
                })
                .collect(),
        }
    }

    /// Check the window leaves the requested clearance around a set of
    /// mode centres.
    fn check_covers(&self, modes: &[&GaussianMode], clearance: f64) -> Result<()> {
        for m in modes {
            let reach = m.center.x.abs().max(m.center.y.abs()) + clearance;
            if -self.min < reach || self.max < reach {
                return Err(Error::invalid(format!(
                    "quadrature range [{}, {}] too small for a mode centred at ({}, {})",
                    self.min, self.max, m.center.x, m.center.y
                )));
            }
        }
        Ok(())
    }
}

/// Overlap `integral a*(r) b(r) d^2 r` by tensor-product quadrature,
/// normalized by the geometric mean of the numerically integrated
/// self-overlaps (which keeps the estimator exactly Hermitian).
pub fn numeric_overlap(
    a: &GaussianMode,
    b: &GaussianMode,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    spec.validate()?;
    spec.check_covers(&[a, b], 6.0)?;
    let nodes = spec.nodes();
    let weights = spec.weights();
    let mut cross = Complex64::new(0.0, 0.0);
    let mut self_a = 0.0;
    let mut self_b = 0.0;
    for (y, wy) in nodes.iter().zip(&weights) {
        for (x, wx) in nodes.iter().zip(&weights) {
            let r = Vec2::new(*x, *y);
            let va = evaluate(a, r);
            let vb = evaluate(b, r);
            let w = wx * wy;
            cross += va.conj() * vb * w;
            self_a += va.norm_sqr() * w;
            self_b += vb.norm_sqr() * w;
        }
    }
    Ok(cross / (self_a * self_b).sqrt())
}

/// Two-particle marginal by direct 4-D integration.
///
/// The joint amplitude at the detectors is the sum over companion
/// groups of coefficient times the product of the two single-particle
/// modes. `|Phi|^2` is integrated over particle 2's coordinates with
/// the given rule at every grid point of particle 1, then normalized on
/// the output grid.
pub fn numeric_marginal_two_particle(
    pattern: &DetectorPattern,
    chi: f64,
    config: &InteractionConfig,
    spec: &QuadratureSpec,
) -> Result<DensityGrid> {
    if pattern.len() != 2 {
        return Err(Error::unsupported(
            "direct joint-amplitude marginalization is implemented for two particles only",
        ));
    }
    spec.validate()?;
    config.validate()?;
    let state = expand_postselected(2, pattern, chi)?;
    if state.nonzero_group_count() == 0 {
        return Err(Error::invalid(
            "post-selection pattern has zero amplitude at this phase shift",
        ));
    }
    let geometry = DeflectionGeometry::regular(2)?;
    let groups = state.groups();
    let coeffs: Vec<Complex64> = groups.iter().map(|g| g.coefficient).collect();
    let modes_p1: Vec<GaussianMode> = groups
        .iter()
        .map(|g| mode_for(0, &g.structure.companions(0), config, &geometry))
        .collect::<Result<_>>()?;
    let modes_p2: Vec<GaussianMode> = groups
        .iter()
        .map(|g| mode_for(1, &g.structure.companions(1), config, &geometry))
        .collect::<Result<_>>()?;
    let all_modes: Vec<&GaussianMode> = modes_p1.iter().chain(modes_p2.iter()).collect();
    spec.check_covers(&all_modes, 5.0)?;

    let nodes = spec.nodes();
    let weights = spec.weights();
    let np = nodes.len();

    // Partner-mode values cached over the r2 grid.
    let partner: Vec<Vec<Complex64>> = modes_p2
        .iter()
        .map(|m| {
            let mut vals = Vec::with_capacity(np * np);
            for y in &nodes {
                for x in &nodes {
                    vals.push(evaluate(m, Vec2::new(*x, *y)));
                }
            }
            vals
        })
        .collect();

    let mut values = vec![0.0; np * np];
    values
        .par_chunks_mut(np)
        .enumerate()
        .for_each(|(iy1, row)| {
            let y1 = nodes[iy1];
            for (ix1, slot) in row.iter_mut().enumerate() {
                let r1 = Vec2::new(nodes[ix1], y1);
                // Per-group amplitude factor carried by particle 1.
                let alpha: Vec<Complex64> = coeffs
                    .iter()
                    .zip(&modes_p1)
                    .map(|(c, m)| c * evaluate(m, r1))
                    .collect();
                let mut integral = 0.0;
                let mut idx = 0;
                for wy in &weights {
                    for wx in &weights {
                        let mut amp = Complex64::new(0.0, 0.0);
                        for (a, p) in alpha.iter().zip(&partner) {
                            amp += a * p[idx];
                        }
                        integral += amp.norm_sqr() * wx * wy;
                        idx += 1;
                    }
                }
                *slot = integral;
            }
        });

    let grid_spec = GridSpec {
        x_min: spec.min,
        x_max: spec.max,
        y_min: spec.min,
        y_max: spec.max,
        nx: np,
        ny: np,
    };
    Ok(DensityGrid::from_raw(grid_spec, values, f64::NAN))
}

/// First moments of a sampled density with the requested rule's weights
/// (self-normalizing, so the grid's own normalization convention does
/// not matter).
pub fn numeric_expectation(grid: &DensityGrid, rule: QuadRule) -> Result<(f64, f64)> {
    let spec_x = QuadratureSpec {
        rule,
        min: grid.spec.x_min,
        max: grid.spec.x_max,
        points: grid.spec.nx,
    };
    let spec_y = QuadratureSpec {
        rule,
        min: grid.spec.y_min,
        max: grid.spec.y_max,
        points: grid.spec.ny,
    };
    if rule == QuadRule::Simpson
        && (grid.spec.nx.is_multiple_of(2) || grid.spec.ny.is_multiple_of(2))
    {
        return Err(Error::invalid(
            "Simpson moments need odd point counts on both axes",
        ));
    }
    let wx = spec_x.weights();
    let wy = spec_y.weights();
    let mut mass = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for (iy, wy) in wy.iter().enumerate() {
        let y = grid.spec.y(iy);
        for (ix, wx) in wx.iter().enumerate() {
            let v = grid.value(ix, iy) * wx * wy;
            mass += v;
            mx += v * grid.spec.x(ix);
            my += v * y;
        }
    }
    Ok((mx / mass, my / mass))
}
