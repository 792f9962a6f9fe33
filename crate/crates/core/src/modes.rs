//! Detector-plane Gaussian wavepacket modes and their overlaps.
//!
//! Every mode has unit width (all lengths are in units of the beam
//! width sigma) and is frozen at the detector plane:
//!
//! ```text
//! mode(r) = exp(-|r - center|^2 / 4) * exp(i (phase_gradient . r + phase_offset))
//! ```
//!
//! so `|mode|^2` is a Gaussian of standard deviation 1 in each axis.
//!
//! Deflected packets arrive tilted and therefore lag the undeflected
//! beam by a phase that grows linearly along the deflection direction,
//! at a rate of `2 d` per sigma of displacement per sigma of deflection.
//! All stored phases follow this lag convention: the phase gradient is
//! `-2 * center` and the interaction phase offset is `-|companions| * k * d`.
//! Only relative phases between modes are observable, so the shared
//! sign is a bookkeeping choice; it is fixed once here and every cross
//! term downstream inherits it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{DeflectionGeometry, Vec2};

/// Which phases the model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseModel {
    /// Real Gaussians: no phase structure at all.
    None,
    /// Linear phase across each deflected packet from its tilted arrival.
    Geometric,
    /// Geometric phase plus the constant interaction phase accrued by
    /// co-propagating particles.
    GeometricPlusInteraction,
}

impl PhaseModel {
    pub fn geometric_enabled(self) -> bool {
        !matches!(self, PhaseModel::None)
    }

    pub fn interaction_enabled(self) -> bool {
        matches!(self, PhaseModel::GeometricPlusInteraction)
    }
}

/// Dimensionless interaction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionConfig {
    /// Deflection strength: expected pairwise deflection in units of sigma.
    pub d: f64,
    /// Phase-scale ratio r/sigma (beam separation over beam width).
    pub k: f64,
    pub phase_model: PhaseModel,
    /// Damp cross terms by the ensemble spread of the interaction phase.
    pub ensemble_spread: bool,
}

impl InteractionConfig {
    /// Real-Gaussian model used by the phase-free calculations.
    pub fn phase_free(d: f64) -> Self {
        InteractionConfig {
            d,
            k: 0.0,
            phase_model: PhaseModel::None,
            ensemble_spread: false,
        }
    }

    /// Geometric phases only.
    pub fn geometric(d: f64) -> Self {
        InteractionConfig {
            d,
            k: 0.0,
            phase_model: PhaseModel::Geometric,
            ensemble_spread: false,
        }
    }

    /// Full phase model with interaction phase scale `k = r/sigma`.
    pub fn full(d: f64, k: f64) -> Self {
        InteractionConfig {
            d,
            k,
            phase_model: PhaseModel::GeometricPlusInteraction,
            ensemble_spread: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.d.is_finite() || self.d < 0.0 {
            return Err(Error::invalid(format!(
                "interaction strength d must be finite and >= 0, got {}",
                self.d
            )));
        }
        if self.phase_model.interaction_enabled() && (!self.k.is_finite() || self.k <= 0.0) {
            return Err(Error::invalid(format!(
                "phase ratio k must be > 0 when the interaction phase is on, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// A unit-width Gaussian wavepacket at the detector plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMode {
    /// Packet centre in the particle's local frame (units of sigma).
    pub center: Vec2,
    /// Linear phase rate (radians per sigma); `-2 * center` under the
    /// lag convention when geometric phases are on, zero otherwise.
    pub phase_gradient: Vec2,
    /// Constant phase (radians); `-|companions| * k * d` when the
    /// interaction phase is on, zero otherwise.
    pub phase_offset: f64,
}

impl GaussianMode {
    /// The undeviated packet.
    pub fn undeviated() -> Self {
        GaussianMode {
            center: Vec2::ZERO,
            phase_gradient: Vec2::ZERO,
            phase_offset: 0.0,
        }
    }
}

/// Construct the detector-plane mode of `particle` given the set of
/// particles that shared its arm.
///
/// The centre is the vector sum of the pairwise unit repulsions scaled
/// by `d` (for the triangle layout a doubly-accompanied particle moves
/// by `sqrt(3) d` along its local `y`, not `2 d`).
pub fn mode_for(
    particle: usize,
    companions: &[usize],
    config: &InteractionConfig,
    geometry: &DeflectionGeometry,
) -> Result<GaussianMode> {
    config.validate()?;
    if companions.contains(&particle) {
        return Err(Error::invalid(format!(
            "particle {particle} listed among its own companions"
        )));
    }
    let mut center = Vec2::ZERO;
    let mut seen = 0u32;
    for &j in companions {
        if j >= geometry.particle_count() {
            return Err(Error::invalid(format!(
                "companion index {j} out of range for {} particles",
                geometry.particle_count()
            )));
        }
        if seen >> j & 1 == 1 {
            return Err(Error::invalid(format!("duplicate companion index {j}")));
        }
        seen |= 1 << j;
        center = center + geometry.repulsion_local(particle, j)?;
    }
    center = center.scaled(config.d);
    let phase_gradient = if config.phase_model.geometric_enabled() {
        center.scaled(-2.0)
    } else {
        Vec2::ZERO
    };
    let phase_offset = if config.phase_model.interaction_enabled() {
        -(companions.len() as f64) * config.k * config.d
    } else {
        0.0
    };
    Ok(GaussianMode {
        center,
        phase_gradient,
        phase_offset,
    })
}

/// Closed-form normalized overlap `integral of a*(r) b(r) d^2 r` over the
/// plane, for unit-width modes.
///
/// Completing the square gives
///
/// ```text
/// S(a,b) = exp(-|dc|^2/8 - |dG|^2/2) * exp(i (dG . m + dtheta))
/// ```
///
/// with `dc`, `dG`, `dtheta` the centre/gradient/offset differences and
/// `m` the centre midpoint. The magnitude lies in (0, 1] and equals 1
/// exactly when centres and gradients coincide.
pub fn overlap(a: &GaussianMode, b: &GaussianMode) -> Complex64 {
    let dc = b.center - a.center;
    let dg = b.phase_gradient - a.phase_gradient;
    let mid = (a.center + b.center).scaled(0.5);
    let magnitude = (-dc.norm_sq() / 8.0 - dg.norm_sq() / 2.0).exp();
    let phase = dg.dot(mid) + (b.phase_offset - a.phase_offset);
    Complex64::from_polar(magnitude, phase)
}

/// Pointwise, unnormalized mode value.
pub fn evaluate(mode: &GaussianMode, r: Vec2) -> Complex64 {
    let dr = r - mode.center;
    let amplitude = (-dr.norm_sq() / 4.0).exp();
    Complex64::from_polar(amplitude, mode.phase_gradient.dot(r) + mode.phase_offset)
}
