//! Plane vectors and the beam-layout geometry at the detector.
//!
//! The beams of an `n`-particle run sit at the vertices of a regular
//! `n`-gon in the plane transverse to the propagation direction (for
//! `n = 3` this is the equilateral triangle of the repulsion picture,
//! for `n = 2` a pair of antipodal points). Each particle carries a
//! local coordinate frame whose `y` axis points away from the centre
//! of the polygon; deflections and densities are reported in that
//! frame, while momentum bookkeeping rotates everything back into the
//! shared global frame.

use crate::error::{Error, Result};

/// A 2-D vector in units of the beam width sigma.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Beam positions and per-particle local frames for `n` particles.
///
/// Particle `i` sits at angle `90 deg - i * 360 deg / n` on the unit
/// circle (labels run clockwise from the top vertex), so rotating the
/// whole layout by `-360 deg / n` maps each particle's geometry onto
/// the next one's. Local frames follow the same rotation, which is what
/// makes the per-particle descriptions identical up to relabelling.
#[derive(Debug, Clone)]
pub struct DeflectionGeometry {
    positions: Vec<Vec2>,
    /// Per-particle orthonormal frame (x-hat, y-hat) in global coordinates;
    /// y-hat points radially away from the polygon centre.
    frames: Vec<(Vec2, Vec2)>,
}

impl DeflectionGeometry {
    /// Regular layout for `n >= 1` particles.
    pub fn regular(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("particle count must be at least 1"));
        }
        let mut positions = Vec::with_capacity(n);
        let mut frames = Vec::with_capacity(n);
        for i in 0..n {
            let angle =
                std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
            let y_hat = Vec2::new(angle.cos(), angle.sin());
            // Right-handed local frame: x-hat is y-hat rotated by -90 deg.
            let x_hat = Vec2::new(y_hat.y, -y_hat.x);
            positions.push(y_hat);
            frames.push((x_hat, y_hat));
        }
        Ok(DeflectionGeometry { positions, frames })
    }

    pub fn particle_count(&self) -> usize {
        self.positions.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.positions.len() {
            return Err(Error::invalid(format!(
                "particle index {i} out of range for {} particles",
                self.positions.len()
            )));
        }
        Ok(())
    }

    /// Unit repulsion direction pushing particle `i` away from particle `j`,
    /// in global coordinates.
    pub fn repulsion_global(&self, i: usize, j: usize) -> Result<Vec2> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::invalid("a particle cannot repel itself"));
        }
        Ok((self.positions[i] - self.positions[j]).normalized())
    }

    /// Unit repulsion direction from `j` on `i`, expressed in particle `i`'s
    /// local frame.
    pub fn repulsion_local(&self, i: usize, j: usize) -> Result<Vec2> {
        let g = self.repulsion_global(i, j)?;
        Ok(self.global_to_local(i, g))
    }

    /// Express a global vector in particle `i`'s local frame.
    pub fn global_to_local(&self, i: usize, v: Vec2) -> Vec2 {
        let (x_hat, y_hat) = self.frames[i];
        Vec2::new(v.dot(x_hat), v.dot(y_hat))
    }

    /// Express a vector given in particle `i`'s local frame globally.
    pub fn local_to_global(&self, i: usize, v: Vec2) -> Vec2 {
        let (x_hat, y_hat) = self.frames[i];
        x_hat.scaled(v.x) + y_hat.scaled(v.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_repulsion_directions() {
        let g = DeflectionGeometry::regular(3).unwrap();
        // Particle 1 (index 0) sits at the top; repulsion from particle 2
        // points up-left, from particle 3 up-right, summing to sqrt(3) y-hat.
        let u12 = g.repulsion_local(0, 1).unwrap();
        let u13 = g.repulsion_local(0, 2).unwrap();
        assert_abs_diff_eq!(u12.x, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(u12.y, 3f64.sqrt() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u13.x, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(u13.y, 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let sum = u12 + u13;
        assert_abs_diff_eq!(sum.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sum.y, 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn cyclic_relabelling_is_a_symmetry() {
        let g = DeflectionGeometry::regular(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let a = g.repulsion_local(i, j).unwrap();
                let b = g.repulsion_local((i + 1) % 3, (j + 1) % 3).unwrap();
                assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-14);
                assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pair_repulsions_are_antiparallel_globally() {
        for n in 2..=5 {
            let g = DeflectionGeometry::regular(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let a = g.repulsion_global(i, j).unwrap();
                    let b = g.repulsion_global(j, i).unwrap();
                    assert_abs_diff_eq!(a.x, -b.x, epsilon = 1e-14);
                    assert_abs_diff_eq!(a.y, -b.y, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn two_particle_layout() {
        let g = DeflectionGeometry::regular(2).unwrap();
        let u = g.repulsion_local(0, 1).unwrap();
        assert_abs_diff_eq!(u.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u.y, 1.0, epsilon = 1e-14);
        let v = g.repulsion_local(1, 0).unwrap();
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.y, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn local_global_round_trip() {
        let g = DeflectionGeometry::regular(3).unwrap();
        let v = Vec2::new(0.3, -1.7);
        for i in 0..3 {
            let w = g.global_to_local(i, g.local_to_global(i, v));
            assert_abs_diff_eq!(w.x, v.x, epsilon = 1e-14);
            assert_abs_diff_eq!(w.y, v.y, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_particles_rejected() {
        assert!(DeflectionGeometry::regular(0).is_err());
    }
}
