//! Physical-units feasibility calculator for an electron realization.
//!
//! Everything else in the crate works in units of the beam width sigma;
//! this module is where metres, kilograms and coulombs live. It chains
//! the diffraction-limited beam width, the deflection geometry, the
//! geometric and interaction phases, and the Coulomb-interaction
//! strength into a design-point solver for electrons.

use serde::Serialize;

use crate::error::{Error, Result};

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Planck constant (J s).
    pub planck: f64,
    /// Electron mass (kg).
    pub electron_mass: f64,
    /// Elementary charge (C).
    pub elementary_charge: f64,
    /// Vacuum permittivity (F/m).
    pub vacuum_permittivity: f64,
    /// Bohr radius (m).
    pub bohr_radius: f64,
    /// Speed of light (m/s).
    pub speed_of_light: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.054_571_817e-34,
            planck: 6.626_070_15e-34,
            electron_mass: 9.109_383_701_5e-31,
            elementary_charge: 1.602_176_634e-19,
            vacuum_permittivity: 8.854_187_812_8e-12,
            bohr_radius: 5.291_772_109_03e-11,
            speed_of_light: 299_792_458.0,
        }
    }
}

impl PhysicalConstants {
    /// Bohr radius recomputed from the other constants,
    /// `4 pi eps0 hbar^2 / (m e^2)`; agrees with the tabulated value to
    /// better than 1e-6 relative.
    pub fn bohr_radius_derived(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.vacuum_permittivity * self.hbar * self.hbar
            / (self.electron_mass * self.elementary_charge * self.elementary_charge)
    }
}

fn require_positive(value: f64, name: &str) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::invalid(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Smallest achievable beam width at the detector for path length `ell`
/// and wavelength `lambda`: `sqrt(ell lambda / 2 pi)` (metres).
pub fn sigma_min(ell: f64, lambda: f64) -> Result<f64> {
    require_positive(ell, "path length")?;
    require_positive(lambda, "wavelength")?;
    Ok((ell * lambda / std::f64::consts::TAU).sqrt())
}

/// Arrival angle of a particle deflected by `delta_r` over path length
/// `ell` under a constant transverse force: `2 delta_r / ell` (radians).
pub fn deflection_angle(delta_r: f64, ell: f64) -> Result<f64> {
    require_positive(delta_r, "deflection")?;
    require_positive(ell, "path length")?;
    Ok(2.0 * delta_r / ell)
}

/// Phase variation across a deflected beam at distance `s` from its
/// centre along the deflection direction: `2 (s / sigma) d` (radians).
pub fn geometric_phase(s: f64, sigma: f64, d: f64) -> Result<f64> {
    require_positive(sigma, "beam width")?;
    Ok(2.0 * (s / sigma) * d)
}

/// Interaction phase accrued by a co-propagating pair at separation `r`:
/// `(r / sigma) d = r delta_r / sigma^2` (radians).
pub fn interaction_phase(r: f64, sigma: f64, d: f64) -> Result<f64> {
    require_positive(r, "beam separation")?;
    require_positive(sigma, "beam width")?;
    Ok(r / sigma * d)
}

/// Coulomb interaction strength between two electrons at beam
/// separation `r` with beam width `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct CoulombStrength {
    /// Dimensionless deflection `d = (sigma^2 / r^2) (sigma / 2 a0)`.
    pub d: f64,
    /// Absolute deflection `delta_r = sigma d = sigma^4 / (2 a0 r^2)` (m).
    pub delta_r: f64,
}

/// Evaluate the Coulomb deflection formulas for electrons.
pub fn coulomb_strength(
    sigma: f64,
    r: f64,
    constants: &PhysicalConstants,
) -> Result<CoulombStrength> {
    require_positive(sigma, "beam width")?;
    require_positive(r, "beam separation")?;
    let a0 = constants.bohr_radius;
    let d = (sigma * sigma) / (r * r) * sigma / (2.0 * a0);
    Ok(CoulombStrength {
        d,
        delta_r: sigma * d,
    })
}

/// Relativistic de Broglie wavelength for an electron of the given
/// kinetic energy (eV): `lambda = h c / sqrt(E_k^2 + 2 E_k m c^2)`.
pub fn electron_wavelength(kinetic_energy_ev: f64, constants: &PhysicalConstants) -> Result<f64> {
    require_positive(kinetic_energy_ev, "kinetic energy")?;
    let ek = kinetic_energy_ev * constants.elementary_charge;
    let mc2 = constants.electron_mass * constants.speed_of_light * constants.speed_of_light;
    let pc = (ek * ek + 2.0 * ek * mc2).sqrt();
    Ok(constants.planck * constants.speed_of_light / pc)
}

fn nonrelativistic_wavelength(kinetic_energy_ev: f64, constants: &PhysicalConstants) -> f64 {
    let ek = kinetic_energy_ev * constants.elementary_charge;
    constants.planck / (2.0 * constants.electron_mass * ek).sqrt()
}

/// The physical beam configuration of one design (SI units throughout).
#[derive(Debug, Clone, Copy)]
pub struct BeamParameters {
    /// Path length inside the interferometer (m).
    pub path_length: f64,
    /// de Broglie wavelength along the beam (m).
    pub wavelength: f64,
    /// Beam width at the detector (m).
    pub beam_width: f64,
    /// Separation between neighbouring particle beams (m).
    pub beam_separation: f64,
    /// Particle mass (kg).
    pub particle_mass: f64,
    /// Particle charge (C).
    pub particle_charge: f64,
}

impl BeamParameters {
    pub fn validate(&self) -> Result<()> {
        require_positive(self.path_length, "path length")?;
        require_positive(self.wavelength, "wavelength")?;
        require_positive(self.beam_width, "beam width")?;
        require_positive(self.beam_separation, "beam separation")?;
        require_positive(self.particle_mass, "particle mass")?;
        require_positive(self.particle_charge.abs(), "particle charge")?;
        Ok(())
    }

    pub fn separation_ratio(&self) -> f64 {
        self.beam_separation / self.beam_width
    }

    /// Below a ratio of ~5 the beams overlap enough to blur the
    /// distinguishability the whole analysis rests on.
    pub fn distinguishability_warning(&self) -> Option<String> {
        let ratio = self.separation_ratio();
        (ratio < 5.0).then(|| {
            format!(
                "r/sigma = {ratio} is below ~5: the beams overlap enough to \
                 blur distinguishability"
            )
        })
    }
}

/// Derived interaction quantities of one design.
///
/// Only the product of the mutual potential and the transit time ever
/// enters the physics (the phase is `delta_V t / hbar`), so the product
/// is stored and the split is left open.
#[derive(Debug, Clone, Copy)]
pub struct InteractionPhysics {
    /// `delta_V * t` (J s).
    pub potential_time_product: f64,
    /// Dimensionless interaction strength.
    pub d: f64,
    /// Pairwise interaction phase (rad).
    pub theta_i: f64,
    /// Absolute deflection (m).
    pub delta_r: f64,
}

impl InteractionPhysics {
    /// Assemble from the beam geometry and the interaction strength;
    /// the phase is `theta_i = r delta_r / sigma^2 = (r/sigma) d` and
    /// the potential-time product follows as `hbar theta_i`.
    pub fn from_strength(
        beam: &BeamParameters,
        d: f64,
        constants: &PhysicalConstants,
    ) -> Result<InteractionPhysics> {
        beam.validate()?;
        require_positive(d, "interaction strength")?;
        let theta_i = interaction_phase(beam.beam_separation, beam.beam_width, d)?;
        Ok(InteractionPhysics {
            potential_time_product: constants.hbar * theta_i,
            d,
            theta_i,
            delta_r: beam.beam_width * d,
        })
    }
}

/// Design-point report, serialized as the feasibility JSON.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub sigma_m: f64,
    pub r_m: f64,
    pub d: f64,
    pub delta_r_m: f64,
    pub lambda_m: f64,
    pub ell_m: f64,
    pub theta_i_rad: f64,
    pub warnings: Vec<String>,
}

impl FeasibilityReport {
    fn new(beam: &BeamParameters, interaction: &InteractionPhysics, warnings: Vec<String>) -> Self {
        FeasibilityReport {
            sigma_m: beam.beam_width,
            r_m: beam.beam_separation,
            d: interaction.d,
            delta_r_m: interaction.delta_r,
            lambda_m: beam.wavelength,
            ell_m: beam.path_length,
            theta_i_rad: interaction.theta_i,
            warnings,
        }
    }
}

/// Minimum enforced path-length-to-beam-width ratio.
const MIN_ELL_OVER_SIGMA: f64 = 100.0;
/// Physical search bounds for the suggested wavelength and path length.
const LAMBDA_FLOOR_M: f64 = 1e-14;
const ELL_CEILING_M: f64 = 1.0;
/// Deflections below this are flagged as extremely challenging to measure.
const CHALLENGING_DEFLECTION_M: f64 = 1e-12;

/// Solve the electron design point: given the distinguishability ratio
/// `r / sigma` and the largest tolerable interaction strength `d`,
/// invert the Coulomb-strength formula for the beam width, then propose
/// a `(lambda, ell)` pair consistent with the diffraction limit.
///
/// The wavelength starts from the supplied electron kinetic energy
/// (default 40 keV) and is shortened if needed to keep
/// `ell / sigma >= 100`.
pub fn electron_design_point(
    r_over_sigma: f64,
    d_max: f64,
    kinetic_energy_ev: Option<f64>,
    constants: &PhysicalConstants,
) -> Result<FeasibilityReport> {
    if !r_over_sigma.is_finite() || r_over_sigma < 1.0 {
        return Err(Error::invalid(format!(
            "r / sigma must be at least 1, got {r_over_sigma}"
        )));
    }
    require_positive(d_max, "maximum interaction strength")?;
    let ke_ev = kinetic_energy_ev.unwrap_or(40e3);
    require_positive(ke_ev, "kinetic energy")?;

    // Invert d = (sigma / 2 a0) / (r/sigma)^2 for sigma.
    let sigma = 2.0 * constants.bohr_radius * r_over_sigma * r_over_sigma * d_max;
    let r = r_over_sigma * sigma;

    let mut warnings = Vec::new();
    let lambda_default = electron_wavelength(ke_ev, constants)?;
    let nonrel = nonrelativistic_wavelength(ke_ev, constants);
    let deviation_pct = 100.0 * (nonrel - lambda_default) / nonrel;
    warnings.push(format!(
        "relativistic wavelength at {:.1} keV is {:.2}% below the non-relativistic value",
        ke_ev / 1e3,
        deviation_pct
    ));

    // ell follows from the diffraction limit sigma^2 = ell lambda / 2 pi.
    let mut lambda = lambda_default;
    let mut ell = std::f64::consts::TAU * sigma * sigma / lambda;
    if ell / sigma < MIN_ELL_OVER_SIGMA {
        lambda = std::f64::consts::TAU * sigma / MIN_ELL_OVER_SIGMA;
        ell = MIN_ELL_OVER_SIGMA * sigma;
        warnings.push(format!(
            "wavelength shortened to {lambda:.3e} m (from {lambda_default:.3e} m) to keep \
             ell/sigma >= {MIN_ELL_OVER_SIGMA}"
        ));
    }
    if lambda < LAMBDA_FLOOR_M || ell > ELL_CEILING_M {
        return Err(Error::InfeasibleDesign(format!(
            "no (lambda, ell) pair with lambda >= {LAMBDA_FLOOR_M:.0e} m and \
             ell <= {ELL_CEILING_M} m satisfies sigma = {sigma:.3e} m with ell/sigma >= \
             {MIN_ELL_OVER_SIGMA}"
        )));
    }

    let beam = BeamParameters {
        path_length: ell,
        wavelength: lambda,
        beam_width: sigma,
        beam_separation: r,
        particle_mass: constants.electron_mass,
        particle_charge: constants.elementary_charge,
    };
    let interaction = InteractionPhysics::from_strength(&beam, d_max, constants)?;

    // Judge distinguishability on the exact requested ratio, not its
    // round-tripped reconstruction from the SI values.
    if r_over_sigma < 5.0 {
        warnings.insert(
            0,
            format!(
                "r/sigma = {r_over_sigma} is below ~5: the beams overlap enough to \
                 blur distinguishability"
            ),
        );
    }
    if interaction.theta_i > std::f64::consts::TAU {
        warnings.push(format!(
            "interaction phase (r/sigma) d = {:.3} rad exceeds 2 pi: phase \
             scrambling removes the interference signature",
            interaction.theta_i
        ));
    }
    if interaction.delta_r < CHALLENGING_DEFLECTION_M {
        warnings.push(format!(
            "deflection {:.3e} m is below {CHALLENGING_DEFLECTION_M:.0e} m: \
             resolving it is extremely challenging",
            interaction.delta_r
        ));
    }

    Ok(FeasibilityReport::new(&beam, &interaction, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn bohr_radius_consistency() {
        let c = consts();
        let derived = c.bohr_radius_derived();
        assert!((derived - c.bohr_radius).abs() / c.bohr_radius < 1e-6);
        // 2 a0 to three significant figures.
        assert_abs_diff_eq!(2.0 * c.bohr_radius, 1.06e-10, epsilon = 0.005e-10);
    }

    #[test]
    fn beam_width_samples() {
        let sigma = sigma_min(5e-9, 1e-12).unwrap();
        assert!((sigma - 2.8209479e-11).abs() / sigma < 1e-6);
        // Quadrupling the path doubles the width.
        let wide = sigma_min(2e-8, 1e-12).unwrap();
        assert_abs_diff_eq!(wide / sigma, 2.0, epsilon = 1e-12);
        // Unit case.
        assert_abs_diff_eq!(
            sigma_min(std::f64::consts::TAU, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(sigma_min(-1.0, 1.0).is_err());
    }

    #[test]
    fn deflection_angle_samples() {
        assert_abs_diff_eq!(deflection_angle(2.5, 5.0).unwrap(), 1.0, epsilon = 1e-15);
        let alpha = deflection_angle(2e-13, 5e-9).unwrap();
        assert_abs_diff_eq!(alpha, 8e-5, epsilon = 1e-18);
        // Round trip.
        assert_abs_diff_eq!(alpha * 5e-9 / 2.0, 2e-13, epsilon = 1e-27);
    }

    #[test]
    fn geometric_phase_samples() {
        assert_abs_diff_eq!(
            geometric_phase(1.0, 1.0, 0.25).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(geometric_phase(1.0, 1.0, 0.0).unwrap(), 0.0);
        // Consistency with the diffraction-limited width: the angular
        // form 4 pi s delta_r / (ell lambda) reduces to 2 (s/sigma) d.
        let (ell, lambda) = (5e-9, 1e-12);
        let sigma = sigma_min(ell, lambda).unwrap();
        let delta_r = 2e-13;
        let d = delta_r / sigma;
        let s = 0.7 * sigma;
        let angular = 4.0 * std::f64::consts::PI * s * delta_r / (ell * lambda);
        assert!((geometric_phase(s, sigma, d).unwrap() - angular).abs() / angular < 1e-12);
    }

    #[test]
    fn interaction_phase_samples() {
        assert_abs_diff_eq!(
            interaction_phase(5.0, 1.0, 1.0).unwrap(),
            5.0,
            epsilon = 1e-15
        );
        assert_eq!(interaction_phase(5.0, 1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            interaction_phase(5.0, 1.0, 0.005).unwrap(),
            0.025,
            epsilon = 1e-15
        );
    }

    #[test]
    fn coulomb_strength_samples() {
        let c = consts();
        let sigma = 0.25 * c.bohr_radius;
        let got = coulomb_strength(sigma, 5.0 * sigma, &c).unwrap();
        assert_abs_diff_eq!(got.d, 0.005, epsilon = 1e-15);
        // Exact identity d = sigma^3 / (2 a0 r^2).
        let direct = sigma.powi(3) / (2.0 * c.bohr_radius * (5.0 * sigma).powi(2));
        assert!((got.d - direct).abs() <= 1e-12 * direct);
        // delta_r identity against the raw formula sigma^4 / (2 a0 r^2).
        let delta_direct = sigma.powi(4) / (2.0 * c.bohr_radius * (5.0 * sigma).powi(2));
        assert!((got.delta_r - delta_direct).abs() <= 1e-12 * delta_direct);
        // Doubling the separation quarters the strength.
        let far = coulomb_strength(sigma, 10.0 * sigma, &c).unwrap();
        assert_abs_diff_eq!(got.d / far.d, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn interaction_phase_chain() {
        // coulomb_strength followed by interaction_phase reproduces
        // theta_i = r delta_r / sigma^2 exactly.
        let c = consts();
        let sigma = 3e-11;
        let r = 5.0 * sigma;
        let cs = coulomb_strength(sigma, r, &c).unwrap();
        let theta = interaction_phase(r, sigma, cs.d).unwrap();
        let direct = r * cs.delta_r / (sigma * sigma);
        assert!((theta - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn unit_scaling_invariance() {
        // Scaling all lengths from metres to nanometres scales each
        // output by its dimension.
        let scale = 1e9;
        let sigma = sigma_min(5e-9, 1e-12).unwrap();
        let sigma_scaled = sigma_min(5e-9 * scale, 1e-12 * scale).unwrap();
        assert!((sigma_scaled / sigma / scale - 1.0).abs() < 1e-12);
        let alpha = deflection_angle(2e-13, 5e-9).unwrap();
        let alpha_scaled = deflection_angle(2e-13 * scale, 5e-9 * scale).unwrap();
        assert!((alpha_scaled / alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_parameters_validation() {
        let c = consts();
        let mut beam = BeamParameters {
            path_length: 5e-9,
            wavelength: 1e-12,
            beam_width: 3e-11,
            beam_separation: 1.5e-10,
            particle_mass: c.electron_mass,
            particle_charge: -c.elementary_charge,
        };
        assert!(beam.validate().is_ok());
        assert!(beam.distinguishability_warning().is_none());
        beam.beam_separation = 3e-11;
        assert!(beam.distinguishability_warning().is_some());
        beam.beam_width = -1.0;
        assert!(beam.validate().is_err());
    }

    #[test]
    fn interaction_physics_phase_identity() {
        // theta_i derived through InteractionPhysics equals (r/sigma) d
        // bit-for-bit, and the stored potential-time product is hbar
        // times the phase.
        let c = consts();
        let beam = BeamParameters {
            path_length: 5e-9,
            wavelength: 1e-12,
            beam_width: 3e-11,
            beam_separation: 1.5e-10,
            particle_mass: c.electron_mass,
            particle_charge: -c.elementary_charge,
        };
        let phys = InteractionPhysics::from_strength(&beam, 0.005, &c).unwrap();
        assert_eq!(phys.theta_i, beam.beam_separation / beam.beam_width * 0.005);
        assert_eq!(phys.potential_time_product, c.hbar * phys.theta_i);
        assert_eq!(phys.delta_r, beam.beam_width * 0.005);
    }

    #[test]
    fn design_point_solves_coulomb_inversion_exactly() {
        let c = consts();
        let report = electron_design_point(5.0, 0.005, None, &c).unwrap();
        // The width is the exact inversion of the Coulomb strength:
        // round-tripping through coulomb_strength returns d_max.
        let back = coulomb_strength(report.sigma_m, report.r_m, &c).unwrap();
        assert!((back.d - 0.005).abs() <= 1e-12 * 0.005);
        assert!((back.delta_r - report.delta_r_m).abs() <= 1e-12 * report.delta_r_m);
        assert_abs_diff_eq!(report.sigma_m, 0.25 * c.bohr_radius, epsilon = 1e-22);
        // Proposed pair reproduces the width through the diffraction limit.
        let sigma_check = sigma_min(report.ell_m, report.lambda_m).unwrap();
        assert!((sigma_check - report.sigma_m).abs() / report.sigma_m < 1e-12);
        assert!(report.ell_m / report.sigma_m >= MIN_ELL_OVER_SIGMA - 1e-9);
        assert_abs_diff_eq!(report.theta_i_rad, 0.025, epsilon = 1e-15);
        // The sub-picometre deflection is flagged.
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("extremely challenging")));
    }

    #[test]
    fn forty_kev_wavelength() {
        let c = consts();
        let lambda = electron_wavelength(40e3, &c).unwrap();
        assert!((lambda - 6.0155e-12).abs() / lambda < 1e-3, "{lambda}");
        // Relativistic correction is ~2%, not nothing.
        let nonrel = nonrelativistic_wavelength(40e3, &c);
        let dev = (nonrel - lambda) / nonrel;
        assert!(dev > 0.01 && dev < 0.05, "deviation {dev}");
    }

    #[test]
    fn design_point_ratio_five_is_not_flagged() {
        // The requested ratio, not its round-tripped reconstruction
        // from the SI values, decides the distinguishability warning.
        let report = electron_design_point(5.0, 0.005, None, &consts()).unwrap();
        assert!(
            !report
                .warnings
                .iter()
                .any(|w| w.contains("distinguishability")),
            "{:?}",
            report.warnings
        );
    }

    #[test]
    fn design_point_warnings() {
        let c = consts();
        let loud = electron_design_point(5.0, 1.5, None, &c).unwrap();
        assert!(loud.warnings.iter().any(|w| w.contains("exceeds 2 pi")));
        let close = electron_design_point(1.0, 0.005, None, &c).unwrap();
        assert!(close
            .warnings
            .iter()
            .any(|w| w.contains("distinguishability")));
        assert!(electron_design_point(0.5, 0.005, None, &c).is_err());
        assert!(electron_design_point(5.0, 0.0, None, &c).is_err());
    }

    #[test]
    fn design_point_infeasible_outside_bounds() {
        let c = consts();
        // Huge d and separation ratio force sigma (and with it ell) far
        // beyond a metre.
        let err = electron_design_point(1000.0, 1e6, None, &c);
        assert!(matches!(err, Err(Error::InfeasibleDesign(_))));
    }
}
