//! Single-particle marginal probability densities of the post-selected
//! state.
//!
//! For the detected particle `p` the unnormalized marginal is
//!
//! ```text
//! P(r) = sum_g |c_g|^2 |mode_pg(r)|^2
//!      + sum_{g<h} 2 Re[ c_g* c_h ( prod_{j != p} S(mode_jg, mode_jh) )
//!                        mode_pg*(r) mode_ph(r) ] * damping_gh
//! ```
//!
//! where `g, h` run over companion-structure groups, `S` is the
//! closed-form mode overlap and the optional damping factor models the
//! ensemble spread of the interaction phase. Every sign and phase in
//! the cross terms comes out of the group coefficients and the mode
//! phases; nothing is hard-coded.
//!
//! Dropping the cross terms gives the incoherent baseline: the density
//! an experiment would see if the contributions of the different
//! companion histories added without interference.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::branch::PostSelectedState;
use crate::error::{Error, Result};
use crate::geometry::{DeflectionGeometry, Vec2};
use crate::modes::{evaluate, mode_for, overlap, GaussianMode, InteractionConfig, PhaseModel};

const TWO_PI: f64 = std::f64::consts::TAU;
const SQRT3: f64 = 1.732050807568877293527446341505872367_f64;

/// Rectangular sampling window, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Points per axis, including both endpoints.
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Symmetric square grid over `[-half, half]^2`.
    pub fn square(half: f64, points: usize) -> Self {
        GridSpec {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
            nx: points,
            ny: points,
        }
    }

    /// Default figure grid: 257 x 257 over `[-8, 8]^2` (power-of-two-plus-one
    /// point counts keep the composite trapezoid and Simpson rules happy).
    pub fn default_figure() -> Self {
        GridSpec::square(8.0, 257)
    }

    /// Square grid sized so every mode centre keeps at least `margin`
    /// sigma of clearance, sampled at ~16 points per sigma.
    pub fn covering(terms: &DensityTerms, margin: f64) -> Self {
        let mut extent: f64 = 0.0;
        for t in &terms.diagonal {
            extent = extent.max(t.mode.center.x.abs()).max(t.mode.center.y.abs());
        }
        let half = (extent + margin).ceil();
        let points = 2 * (16.0 * half).ceil() as usize + 1;
        GridSpec::square(half, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.ny < 16 {
            return Err(Error::invalid(format!(
                "grid resolution must be at least 16 points per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.x_max > self.x_min && self.y_max > self.y_min)
            || !self.x_min.is_finite()
            || !self.x_max.is_finite()
            || !self.y_min.is_finite()
            || !self.y_max.is_finite()
        {
            return Err(Error::invalid("grid ranges must be finite and non-empty"));
        }
        Ok(())
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
}

/// A sampled, normalized probability density.
///
/// Values are stored row-major, `y` varying across rows:
/// `values[iy * nx + ix]`. Normalization is on the grid:
/// `sum * cell_area = 1`.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// Set when the window captured less than `1 - 1e-6` of the
    /// analytically available probability mass.
    pub coverage_warning: bool,
}

impl DensityGrid {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.nx + ix]
    }

    /// Grid integral (rectangle rule); 1 after normalization.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    /// First moments by direct grid summation.
    pub fn first_moments(&self) -> (f64, f64) {
        let mut mass = 0.0;
        let mut mx = 0.0;
        let mut my = 0.0;
        for iy in 0..self.spec.ny {
            let y = self.spec.y(iy);
            for ix in 0..self.spec.nx {
                let v = self.value(ix, iy);
                mass += v;
                mx += v * self.spec.x(ix);
                my += v * y;
            }
        }
        (mx / mass, my / mass)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Build a grid from raw unnormalized samples: verify the
    /// cancellation floor, clamp, normalize, flag poor coverage against
    /// the analytically known total mass (pass a non-finite
    /// `analytic_mass` to skip the coverage check).
    pub(crate) fn from_raw(spec: GridSpec, mut values: Vec<f64>, analytic_mass: f64) -> Self {
        let mut min = 0.0f64;
        for v in &values {
            min = min.min(*v);
        }
        assert!(
            min >= -1e-12,
            "marginal density dipped to {min}; the engine guarantees non-negativity up to rounding"
        );
        for v in &mut values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let raw_total: f64 = values.iter().sum::<f64>() * spec.cell_area();
        let coverage_warning = if analytic_mass.is_finite() {
            raw_total < (1.0 - 1e-6) * analytic_mass
        } else {
            false
        };
        let inv = 1.0 / raw_total;
        for v in &mut values {
            *v *= inv;
        }
        DensityGrid {
            spec,
            values,
            coverage_warning,
        }
    }
}

/// One diagonal contribution: `weight * |mode(r)|^2`.
#[derive(Debug, Clone)]
pub struct DiagonalTerm {
    pub weight: f64,
    pub mode: GaussianMode,
}

/// One interference contribution between a pair of groups, as seen by
/// the detected particle.
#[derive(Debug, Clone)]
pub struct CrossTerm {
    /// `c_g* c_h` times the product of the spectator-particle overlaps.
    pub prefactor: Complex64,
    pub mode_a: GaussianMode,
    pub mode_b: GaussianMode,
    /// Ensemble-spread damping factor in (0, 1]; 1 when the spread is off
    /// or the pair carries no net interaction phase.
    pub damping: f64,
    /// Net interaction phase of the pair (radians, >= 0).
    pub interaction_phase: f64,
}

impl CrossTerm {
    /// Pointwise contribution `2 Re[prefactor mode_a*(r) mode_b(r)] * damping`.
    pub fn value(&self, r: Vec2) -> f64 {
        let da = r - self.mode_a.center;
        let db = r - self.mode_b.center;
        let amp = (-(da.norm_sq() + db.norm_sq()) / 4.0).exp();
        let phase = (self.mode_b.phase_gradient - self.mode_a.phase_gradient).dot(r)
            + (self.mode_b.phase_offset - self.mode_a.phase_offset);
        2.0 * (self.prefactor * Complex64::from_polar(amp, phase)).re * self.damping
    }

    /// Overlap of the detected particle's own pair of modes.
    fn own_overlap(&self) -> Complex64 {
        overlap(&self.mode_a, &self.mode_b)
    }

    /// Contribution to the (unnormalized) plane integral, divided by 2 pi.
    fn analytic_mass(&self) -> f64 {
        2.0 * (self.prefactor * self.own_overlap()).re * self.damping
    }

    /// Contribution to the (unnormalized) first-moment integral, divided
    /// by 2 pi. The moment of a phased Gaussian product sits at the
    /// centre midpoint displaced by i times the gradient difference.
    fn analytic_moment(&self) -> (f64, f64) {
        let s = self.prefactor * self.own_overlap() * self.damping;
        let mid = (self.mode_a.center + self.mode_b.center).scaled(0.5);
        let dg = self.mode_b.phase_gradient - self.mode_a.phase_gradient;
        let mx = 2.0 * (s * Complex64::new(mid.x, dg.x)).re;
        let my = 2.0 * (s * Complex64::new(mid.y, dg.y)).re;
        (mx, my)
    }
}

/// The assembled terms of one particle's marginal density.
#[derive(Debug, Clone)]
pub struct DensityTerms {
    pub particle: usize,
    pub diagonal: Vec<DiagonalTerm>,
    pub cross: Vec<CrossTerm>,
}

impl DensityTerms {
    /// Unnormalized value of the marginal at `r` (local frame of the
    /// detected particle).
    pub fn value(&self, r: Vec2, include_cross: bool) -> f64 {
        let mut v = 0.0;
        for t in &self.diagonal {
            let dr = r - t.mode.center;
            v += t.weight * (-dr.norm_sq() / 2.0).exp();
        }
        if include_cross {
            for t in &self.cross {
                v += t.value(r);
            }
        }
        v
    }

    /// Exact plane integral of the unnormalized density.
    pub fn analytic_mass(&self, include_cross: bool) -> f64 {
        let mut m: f64 = self.diagonal.iter().map(|t| t.weight).sum();
        if include_cross {
            m += self.cross.iter().map(|t| t.analytic_mass()).sum::<f64>();
        }
        m * TWO_PI
    }

    /// Exact first moment of the normalized density.
    pub fn analytic_expectation(&self, include_cross: bool) -> (f64, f64) {
        let mut mass: f64 = 0.0;
        let mut mx = 0.0;
        let mut my = 0.0;
        for t in &self.diagonal {
            mass += t.weight;
            mx += t.weight * t.mode.center.x;
            my += t.weight * t.mode.center.y;
        }
        if include_cross {
            for t in &self.cross {
                mass += t.analytic_mass();
                let (tx, ty) = t.analytic_moment();
                mx += tx;
                my += ty;
            }
        }
        (mx / mass, my / mass)
    }
}

/// Assemble diagonal and cross terms for the marginal density of
/// `particle` (0-based) from a post-selected state.
pub fn build_terms(
    state: &PostSelectedState,
    config: &InteractionConfig,
    particle: usize,
) -> Result<DensityTerms> {
    config.validate()?;
    let n = state.particle_count();
    if particle >= n {
        return Err(Error::invalid(format!(
            "particle index {particle} out of range for {n} particles"
        )));
    }
    if state.nonzero_group_count() == 0 {
        return Err(Error::invalid(
            "post-selected state has no nonzero group; the marginal density is undefined",
        ));
    }
    let geometry = DeflectionGeometry::regular(n)?;
    let groups = state.groups();
    let mut group_modes: Vec<Vec<GaussianMode>> = Vec::with_capacity(groups.len());
    for g in groups {
        let modes = (0..n)
            .map(|j| mode_for(j, &g.structure.companions(j), config, &geometry))
            .collect::<Result<Vec<_>>>()?;
        group_modes.push(modes);
    }

    let diagonal = groups
        .iter()
        .zip(&group_modes)
        .map(|(g, modes)| DiagonalTerm {
            weight: g.coefficient.norm_sqr(),
            mode: modes[particle],
        })
        .collect();

    let mut cross = Vec::with_capacity(groups.len() * (groups.len() - 1) / 2);
    for gi in 0..groups.len() {
        for hi in gi + 1..groups.len() {
            let mut prefactor = groups[gi].coefficient.conj() * groups[hi].coefficient;
            for (j, (mg, mh)) in group_modes[gi].iter().zip(&group_modes[hi]).enumerate() {
                if j != particle {
                    prefactor *= overlap(mg, mh);
                }
            }
            let theta_g: f64 = group_modes[gi].iter().map(|m| m.phase_offset).sum();
            let theta_h: f64 = group_modes[hi].iter().map(|m| m.phase_offset).sum();
            let interaction_phase = (theta_h - theta_g).abs();
            let damping = if config.ensemble_spread && interaction_phase > 0.0 {
                // The pair separation fluctuates with standard deviation
                // sqrt(2) sigma, so the interaction phase spreads by
                // sigma_theta = sqrt(2) (sigma / r) theta_i.
                let sigma_theta = std::f64::consts::SQRT_2 / config.k * interaction_phase;
                (-0.5 * sigma_theta * sigma_theta).exp()
            } else {
                1.0
            };
            cross.push(CrossTerm {
                prefactor,
                mode_a: group_modes[gi][particle],
                mode_b: group_modes[hi][particle],
                damping,
                interaction_phase,
            });
        }
    }
    Ok(DensityTerms {
        particle,
        diagonal,
        cross,
    })
}

fn sample_density(terms: &DensityTerms, spec: &GridSpec, include_cross: bool) -> Vec<f64> {
    let mut values = vec![0.0; spec.nx * spec.ny];
    values
        .par_chunks_mut(spec.nx)
        .enumerate()
        .for_each(|(iy, row)| {
            let y = spec.y(iy);
            for (ix, slot) in row.iter_mut().enumerate() {
                *slot = terms.value(Vec2::new(spec.x(ix), y), include_cross);
            }
        });
    values
}

/// Normalized marginal density including all interference terms.
pub fn probability_density(terms: &DensityTerms, spec: &GridSpec) -> Result<DensityGrid> {
    spec.validate()?;
    let values = sample_density(terms, spec, true);
    Ok(DensityGrid::from_raw(
        *spec,
        values,
        terms.analytic_mass(true),
    ))
}

/// Normalized density with every cross term dropped.
pub fn incoherent_density(terms: &DensityTerms, spec: &GridSpec) -> Result<DensityGrid> {
    spec.validate()?;
    let values = sample_density(terms, spec, false);
    Ok(DensityGrid::from_raw(
        *spec,
        values,
        terms.analytic_mass(false),
    ))
}

/// Literal transcription of the worked three-particle, all-same-detector
/// marginal for particle 1, used purely as a regression oracle against
/// the assembled engine. Unnormalized.
///
/// `phase_model` selects between the full expression (geometric plus
/// interaction phases, scale `k`) and the phase-free variant; there is
/// no printed reference for the geometric-only model.
pub fn closed_form_reference(
    x: f64,
    y: f64,
    d: f64,
    k: f64,
    phase_model: PhaseModel,
) -> Result<f64> {
    let g0 = (-(x * x + y * y) / 4.0).exp();
    let g2 = {
        let dx = x + d / 2.0;
        let dy = y - SQRT3 * d / 2.0;
        (-(dx * dx + dy * dy) / 4.0).exp()
    };
    let g3 = {
        let dx = x - d / 2.0;
        let dy = y - SQRT3 * d / 2.0;
        (-(dx * dx + dy * dy) / 4.0).exp()
    };
    let g23 = {
        let dy = y - SQRT3 * d;
        (-(x * x + dy * dy) / 4.0).exp()
    };
    let d2 = d * d;
    match phase_model {
        PhaseModel::None => {
            let damp_far = (-d2 / 2.0).exp();
            let damp_near = (-d2 / 4.0).exp();
            Ok(g23 * g23 + g2 * g2 + g3 * g3 + g0 * g0
                - 2.0 * g23 * g2 * damp_far
                - 2.0 * g23 * g3 * damp_far
                - 2.0 * g23 * g0 * damp_near
                + 2.0 * g2 * g3 * damp_near
                + 2.0 * g2 * g0 * damp_near
                + 2.0 * g0 * g3 * damp_near)
        }
        PhaseModel::GeometricPlusInteraction => {
            let damp_far = (-d2 / 2.0 - 8.0 * d2).exp();
            let damp_near = (-d2 / 4.0 - 4.0 * d2).exp();
            let kd4 = 4.0 * k * d;
            Ok(g23 * g23 + g2 * g2 + g3 * g3 + g0 * g0
                - 2.0 * g23 * g2 * (SQRT3 * d * y + d * x + 5.0 * d2 + kd4).cos() * damp_far
                - 2.0 * g23 * g3 * (SQRT3 * d * y - d * x + 5.0 * d2 + kd4).cos() * damp_far
                - 2.0 * g23 * g0 * (2.0 * SQRT3 * d * y + 4.0 * d2 + kd4).cos() * damp_near
                + 2.0 * g2 * g3 * (2.0 * d * x).cos() * damp_near
                + 2.0 * g2 * g0 * (SQRT3 * d * y - d * x - d2).cos() * damp_near
                + 2.0 * g0 * g3 * (-SQRT3 * d * y - d * x + d2).cos() * damp_near)
        }
        PhaseModel::Geometric => Err(Error::unsupported(
            "no printed reference exists for the geometric-only phase model",
        )),
    }
}

/// Convenience wrapper: evaluate a mode product `a*(r) b(r)` pointwise.
/// Exposed for the quadrature oracle.
pub fn mode_product(a: &GaussianMode, b: &GaussianMode, r: Vec2) -> Complex64 {
    evaluate(a, r).conj() * evaluate(b, r)
}
