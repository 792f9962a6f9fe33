//! Branch algebra for distinguishable particles in a two-arm
//! interferometer with a phase shifter in the right arm.
//!
//! Each of the `n` particles enters in an equal superposition of the
//! left (L) and right (R) arm. The phase shifter multiplies every R
//! component by `exp(i*chi)`. The recombining beam splitter sends the
//! sum of the L and R amplitudes to detector A and the difference to
//! detector B, so projecting onto a detector pattern assigns each
//! particle a factor
//!
//! | arm | detector A | detector B    |
//! |-----|------------|---------------|
//! | L   | `1`        | `1`           |
//! | R   | `e^{i chi}`| `-e^{i chi}`  |
//!
//! and a branch (one arm assignment for every particle) contributes the
//! product of its per-particle factors. Normalization factors are
//! omitted throughout; probabilities are normalized once, on the grid,
//! by the density engine.
//!
//! After the second beam splitter an assignment interferes with its
//! arm-complement (L and R swapped for every particle): the two
//! branches produce the same set of deflected wavepackets, because a
//! particle's deflection depends only on *which* particles shared its
//! arm, not on the arm label. Post-selected states therefore group the
//! `2^n` branches into `2^(n-1)` companion structures and sum the two
//! coefficients of each group.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the particle count: the expansion enumerates `2^n`
/// branches, which stops being a desk-scale computation long before the
/// bitmask representation runs out of bits.
pub const MAX_PARTICLES: usize = 20;

/// Interferometer arm labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Left,
    Right,
}

/// Output detector labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    A,
    B,
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("particle count must be at least 1"));
    }
    if n > MAX_PARTICLES {
        return Err(Error::invalid(format!(
            "particle count {n} exceeds the supported maximum of {MAX_PARTICLES}"
        )));
    }
    Ok(())
}

/// One arm per particle: bit `i` set means particle `i` took the R arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArmAssignment {
    bits: u32,
    n: usize,
}

impl ArmAssignment {
    pub fn from_bits(bits: u32, n: usize) -> Result<Self> {
        check_count(n)?;
        if bits >> n != 0 {
            return Err(Error::invalid(format!(
                "assignment bits 0b{bits:b} do not fit {n} particles"
            )));
        }
        Ok(ArmAssignment { bits, n })
    }

    /// Parse a label string such as `"LLR"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        let mut n = 0usize;
        for c in s.chars() {
            let bit = match c.to_ascii_uppercase() {
                'L' => 0,
                'R' => 1,
                other => {
                    return Err(Error::invalid(format!(
                        "arm label must be L or R, got {other:?}"
                    )))
                }
            };
            if n >= MAX_PARTICLES {
                return Err(Error::invalid(format!(
                    "assignment longer than {MAX_PARTICLES} particles"
                )));
            }
            bits |= bit << n;
            n += 1;
        }
        Self::from_bits(bits, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn arm(&self, particle: usize) -> Arm {
        if self.bits >> particle & 1 == 1 {
            Arm::Right
        } else {
            Arm::Left
        }
    }

    /// Number of particles in the R arm.
    pub fn right_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The branch with every arm swapped.
    pub fn complement(&self) -> ArmAssignment {
        let mask = mask(self.n);
        ArmAssignment {
            bits: !self.bits & mask,
            n: self.n,
        }
    }

    /// All `2^n` assignments in ascending bit order.
    pub fn enumerate(n: usize) -> Result<impl Iterator<Item = ArmAssignment>> {
        check_count(n)?;
        Ok((0u32..1 << n).map(move |bits| ArmAssignment { bits, n }))
    }
}

impl fmt::Display for ArmAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(match self.arm(i) {
                Arm::Left => "L",
                Arm::Right => "R",
            })?;
        }
        Ok(())
    }
}

/// One detector per particle: bit `i` set means particle `i` is
/// post-selected at detector B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectorPattern {
    bits: u32,
    n: usize,
}

impl DetectorPattern {
    pub fn from_bits(bits: u32, n: usize) -> Result<Self> {
        check_count(n)?;
        if bits >> n != 0 {
            return Err(Error::invalid(format!(
                "pattern bits 0b{bits:b} do not fit {n} particles"
            )));
        }
        Ok(DetectorPattern { bits, n })
    }

    /// Parse a label string such as `"ABB"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        let mut n = 0usize;
        for c in s.chars() {
            let bit = match c.to_ascii_uppercase() {
                'A' => 0,
                'B' => 1,
                other => {
                    return Err(Error::invalid(format!(
                        "detector label must be A or B, got {other:?}"
                    )))
                }
            };
            if n >= MAX_PARTICLES {
                return Err(Error::invalid(format!(
                    "pattern longer than {MAX_PARTICLES} particles"
                )));
            }
            bits |= bit << n;
            n += 1;
        }
        Self::from_bits(bits, n)
    }

    pub fn all_a(n: usize) -> Result<Self> {
        Self::from_bits(0, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn detector(&self, particle: usize) -> Detector {
        if self.bits >> particle & 1 == 1 {
            Detector::B
        } else {
            Detector::A
        }
    }
}

impl fmt::Display for DetectorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(match self.detector(i) {
                Detector::A => "A",
                Detector::B => "B",
            })?;
        }
        Ok(())
    }
}

/// Unordered arm partition with the group identity forgotten: which
/// particles travelled together, not which arm they took.
///
/// Canonical encoding: the bitmask of the side containing particle 0,
/// so an assignment and its complement map to the same value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompanionStructure {
    side_of_first: u32,
    n: usize,
}

impl CompanionStructure {
    pub fn from_assignment(a: &ArmAssignment) -> CompanionStructure {
        let m = mask(a.n);
        let side = if a.bits & 1 == 1 { a.bits } else { !a.bits & m };
        CompanionStructure {
            side_of_first: side,
            n: a.n,
        }
    }

    /// Build directly from the member set of particle 0's side.
    pub fn from_side_mask(side: u32, n: usize) -> Result<CompanionStructure> {
        check_count(n)?;
        if side & 1 == 0 || side >> n != 0 {
            return Err(Error::invalid(
                "side mask must contain particle 0 and fit the particle count",
            ));
        }
        Ok(CompanionStructure {
            side_of_first: side,
            n,
        })
    }

    pub fn particle_count(&self) -> usize {
        self.n
    }

    /// Canonical key used for ordering groups deterministically.
    pub fn canonical_key(&self) -> u32 {
        self.side_of_first
    }

    /// Do particles `i` and `j` share an arm in this structure?
    pub fn same_side(&self, i: usize, j: usize) -> bool {
        (self.side_of_first >> i & 1) == (self.side_of_first >> j & 1)
    }

    /// Indices of the particles travelling with `particle`.
    pub fn companions(&self, particle: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| j != particle && self.same_side(particle, j))
            .collect()
    }

    /// The two representative assignments of this group, lowest bits first.
    pub fn representatives(&self) -> (ArmAssignment, ArmAssignment) {
        let m = mask(self.n);
        let a = ArmAssignment {
            bits: !self.side_of_first & m,
            n: self.n,
        };
        (a, a.complement())
    }
}

impl fmt::Display for CompanionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side: Vec<String> = (0..self.n)
            .filter(|i| self.side_of_first >> i & 1 == 1)
            .map(|i| (i + 1).to_string())
            .collect();
        let rest: Vec<String> = (0..self.n)
            .filter(|i| self.side_of_first >> i & 1 == 0)
            .map(|i| (i + 1).to_string())
            .collect();
        if rest.is_empty() {
            write!(f, "{{{}}}", side.join(","))
        } else {
            write!(f, "{{{}|{}}}", side.join(","), rest.join(","))
        }
    }
}

fn mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// `exp(i*chi)`, exact for `chi` an exact floating-point multiple of
/// pi/2 so that the quarter-turn phases of the standard configurations
/// come out as exact complex integers.
fn unit_phase(chi: f64) -> Complex64 {
    let q = (chi / std::f64::consts::FRAC_PI_2).round();
    if q.abs() <= 1e15 && q * std::f64::consts::FRAC_PI_2 == chi {
        match (q as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, chi)
    }
}

/// Coefficient of one branch after the phase shifter and the detector
/// projection: the product over particles of the per-particle factors
/// listed in the module docs.
pub fn branch_coefficient(
    assignment: &ArmAssignment,
    pattern: &DetectorPattern,
    chi: f64,
) -> Result<Complex64> {
    if assignment.len() != pattern.len() {
        return Err(Error::invalid(format!(
            "assignment has {} particles but pattern has {}",
            assignment.len(),
            pattern.len()
        )));
    }
    let phase = unit_phase(chi);
    let mut coeff = Complex64::new(1.0, 0.0);
    for i in 0..assignment.len() {
        coeff *= match (assignment.arm(i), pattern.detector(i)) {
            (Arm::Left, _) => Complex64::new(1.0, 0.0),
            (Arm::Right, Detector::A) => phase,
            (Arm::Right, Detector::B) => -phase,
        };
    }
    Ok(coeff)
}

/// Classical pigeonhole witness for a single branch: with two arms and
/// more than two particles, some arm always carries at least two of
/// them; for `n <= 2` the property holds vacuously.
pub fn verify_classical_php(assignment: &ArmAssignment) -> bool {
    let n = assignment.len();
    if n <= 2 {
        return true;
    }
    let right = assignment.right_count() as usize;
    right >= 2 || n - right >= 2
}

/// One companion-structure group of a post-selected state.
#[derive(Debug, Clone)]
pub struct Group {
    pub structure: CompanionStructure,
    /// Net coefficient: the sum of the two branch coefficients of the
    /// group. Exactly zero signals complete destructive interference.
    pub coefficient: Complex64,
}

/// The post-selected state at a detector pattern: net complex
/// coefficient per companion structure, ordered by canonical key.
#[derive(Debug, Clone)]
pub struct PostSelectedState {
    n: usize,
    pattern: DetectorPattern,
    chi: f64,
    groups: Vec<Group>,
}

impl PostSelectedState {
    pub fn particle_count(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> &DetectorPattern {
        &self.pattern
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn coefficient(&self, structure: &CompanionStructure) -> Option<Complex64> {
        self.groups
            .iter()
            .find(|g| g.structure == *structure)
            .map(|g| g.coefficient)
    }

    pub fn nonzero_group_count(&self) -> usize {
        self.groups
            .iter()
            .filter(|g| g.coefficient.norm_sqr() > 0.0)
            .count()
    }
}

impl fmt::Display for PostSelectedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={} pattern={} chi={:?}",
            self.n, self.pattern, self.chi
        )?;
        for g in &self.groups {
            let (a, b) = g.structure.representatives();
            writeln!(
                f,
                "{:<16} coeff = {:<12} branches: {} (php {}), {} (php {})",
                g.structure.to_string(),
                format_complex(g.coefficient),
                a,
                php_word(&a),
                b,
                php_word(&b),
            )?;
        }
        Ok(())
    }
}

fn php_word(a: &ArmAssignment) -> &'static str {
    if verify_classical_php(a) {
        "ok"
    } else {
        "violated"
    }
}

/// Compact deterministic rendering of a complex coefficient, e.g.
/// `1-1i` or `0+2i`.
pub fn format_complex(c: Complex64) -> String {
    format!("{}{:+}i", c.re, c.im)
}

/// Expand all `2^n` branches, project on the detector pattern and group
/// each assignment with its arm-complement. Groups whose two branch
/// coefficients cancel exactly are retained with coefficient zero.
pub fn expand_postselected(
    n: usize,
    pattern: &DetectorPattern,
    chi: f64,
) -> Result<PostSelectedState> {
    check_count(n)?;
    if pattern.len() != n {
        return Err(Error::invalid(format!(
            "pattern has {} particles, expected {n}",
            pattern.len()
        )));
    }
    let mut sums: BTreeMap<CompanionStructure, Complex64> = BTreeMap::new();
    for assignment in ArmAssignment::enumerate(n)? {
        let coeff = branch_coefficient(&assignment, pattern, chi)?;
        let key = CompanionStructure::from_assignment(&assignment);
        *sums.entry(key).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }
    debug_assert_eq!(sums.len(), 1 << (n - 1));
    let groups = sums
        .into_iter()
        .map(|(structure, coefficient)| Group {
            structure,
            coefficient,
        })
        .collect();
    Ok(PostSelectedState {
        n,
        pattern: *pattern,
        chi,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn structure(side: u32, n: usize) -> CompanionStructure {
        CompanionStructure::from_side_mask(side, n).unwrap()
    }

    #[test]
    fn quarter_turn_phases_are_exact() {
        assert_eq!(unit_phase(0.0), c(1.0, 0.0));
        assert_eq!(unit_phase(FRAC_PI_2), c(0.0, 1.0));
        assert_eq!(unit_phase(PI), c(-1.0, 0.0));
        assert_eq!(unit_phase(3.0 * FRAC_PI_2), c(0.0, -1.0));
        assert_eq!(unit_phase(-FRAC_PI_2), c(0.0, -1.0));
    }

    #[test]
    fn branch_coefficient_three_particles_all_right() {
        let a = ArmAssignment::parse("RRR").unwrap();
        let p = DetectorPattern::parse("AAA").unwrap();
        assert_eq!(branch_coefficient(&a, &p, FRAC_PI_2).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn branch_coefficient_single_particle_identity() {
        let a = ArmAssignment::parse("L").unwrap();
        let p = DetectorPattern::parse("A").unwrap();
        assert_eq!(branch_coefficient(&a, &p, 0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn branch_coefficient_two_particles_same_arm() {
        let a = ArmAssignment::parse("RR").unwrap();
        let p = DetectorPattern::parse("AA").unwrap();
        assert_eq!(branch_coefficient(&a, &p, FRAC_PI_2).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn branch_coefficient_rejects_length_mismatch() {
        let a = ArmAssignment::parse("RR").unwrap();
        let p = DetectorPattern::parse("AAA").unwrap();
        assert!(branch_coefficient(&a, &p, 0.0).is_err());
    }

    #[test]
    fn pre_detection_phases_follow_right_arm_count() {
        // With chi = pi/2 and an all-A pattern the detector factors are
        // trivial, so the branch coefficient is i^(number of R arms).
        let p = DetectorPattern::all_a(3).unwrap();
        let i = c(0.0, 1.0);
        for a in ArmAssignment::enumerate(3).unwrap() {
            let expect = i.powu(a.right_count());
            assert_eq!(branch_coefficient(&a, &p, FRAC_PI_2).unwrap(), expect);
        }
    }

    #[test]
    fn three_particles_same_detector_golden() {
        let p = DetectorPattern::parse("AAA").unwrap();
        let state = expand_postselected(3, &p, FRAC_PI_2).unwrap();
        assert_eq!(state.groups().len(), 4);
        let all = structure(0b111, 3);
        let g12 = structure(0b011, 3);
        let g13 = structure(0b101, 3);
        let g23 = structure(0b001, 3); // particles 2,3 together, 1 alone
        assert_eq!(state.coefficient(&all).unwrap(), c(1.0, -1.0));
        assert_eq!(state.coefficient(&g12).unwrap(), c(-1.0, 1.0));
        assert_eq!(state.coefficient(&g13).unwrap(), c(-1.0, 1.0));
        assert_eq!(state.coefficient(&g23).unwrap(), c(-1.0, 1.0));
    }

    #[test]
    fn one_at_a_two_at_b_signs_are_two_three_symmetric() {
        // Particles 2 and 3 play identical roles in the pattern ABB, so
        // the groups {1,2|3} and {1,3|2} must carry the same sign; the
        // odd group out is {2,3|1}.
        let p = DetectorPattern::parse("ABB").unwrap();
        let state = expand_postselected(3, &p, FRAC_PI_2).unwrap();
        assert_eq!(
            state.coefficient(&structure(0b111, 3)).unwrap(),
            c(1.0, -1.0)
        );
        assert_eq!(
            state.coefficient(&structure(0b011, 3)).unwrap(),
            c(1.0, -1.0)
        );
        assert_eq!(
            state.coefficient(&structure(0b101, 3)).unwrap(),
            c(1.0, -1.0)
        );
        assert_eq!(
            state.coefficient(&structure(0b001, 3)).unwrap(),
            c(-1.0, 1.0)
        );
    }

    #[test]
    fn odd_counts_give_uniform_group_modulus() {
        // With an odd particle count at chi = pi/2, every group sums
        // i^m + i^(n-m) with n - 2m odd, so all moduli are sqrt(2).
        for n in [1usize, 3, 5, 7] {
            let p = DetectorPattern::all_a(n).unwrap();
            let state = expand_postselected(n, &p, FRAC_PI_2).unwrap();
            for g in state.groups() {
                let m = g.coefficient.norm();
                assert!(
                    (m - std::f64::consts::SQRT_2).abs() < 1e-14,
                    "n={n} group {} has modulus {m}",
                    g.structure
                );
            }
        }
    }

    #[test]
    fn two_particle_same_detector_cancellation() {
        let p = DetectorPattern::parse("AA").unwrap();
        let state = expand_postselected(2, &p, FRAC_PI_2).unwrap();
        let same = structure(0b11, 2);
        let diff = structure(0b01, 2);
        assert_eq!(state.coefficient(&same).unwrap(), c(0.0, 0.0));
        assert_eq!(state.coefficient(&diff).unwrap(), c(0.0, 2.0));
        assert_eq!(state.nonzero_group_count(), 1);
    }

    #[test]
    fn two_particle_split_detectors_travel_together() {
        let p = DetectorPattern::parse("AB").unwrap();
        let state = expand_postselected(2, &p, FRAC_PI_2).unwrap();
        assert_eq!(state.coefficient(&structure(0b11, 2)).unwrap(), c(2.0, 0.0));
        assert_eq!(state.coefficient(&structure(0b01, 2)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn zero_shift_sends_everything_to_a() {
        for n in 1..=4 {
            let p = DetectorPattern::all_a(n).unwrap();
            let state = expand_postselected(n, &p, 0.0).unwrap();
            for g in state.groups() {
                assert_eq!(g.coefficient, c(2.0, 0.0));
            }
        }
    }

    #[test]
    fn pi_shift_sends_single_particle_to_b() {
        let a = DetectorPattern::parse("A").unwrap();
        let b = DetectorPattern::parse("B").unwrap();
        let at_a = expand_postselected(1, &a, PI).unwrap();
        let at_b = expand_postselected(1, &b, PI).unwrap();
        assert_eq!(at_a.groups()[0].coefficient, c(0.0, 0.0));
        assert_eq!(at_b.groups()[0].coefficient, c(2.0, 0.0));
    }

    #[test]
    fn every_branch_obeys_classical_pigeonhole() {
        for n in 1..=6 {
            for a in ArmAssignment::enumerate(n).unwrap() {
                assert!(verify_classical_php(&a));
            }
        }
    }

    #[test]
    fn companion_structure_identifies_complements() {
        for n in 1..=5 {
            for a in ArmAssignment::enumerate(n).unwrap() {
                let s1 = CompanionStructure::from_assignment(&a);
                let s2 = CompanionStructure::from_assignment(&a.complement());
                assert_eq!(s1, s2);
            }
        }
    }

    #[test]
    fn companionship_is_symmetric() {
        let s = structure(0b1011, 4);
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                assert_eq!(s.companions(i).contains(&j), s.companions(j).contains(&i));
            }
        }
    }

    #[test]
    fn structure_labels() {
        assert_eq!(structure(0b111, 3).to_string(), "{1,2,3}");
        assert_eq!(structure(0b011, 3).to_string(), "{1,2|3}");
        assert_eq!(structure(0b101, 3).to_string(), "{1,3|2}");
        assert_eq!(structure(0b001, 3).to_string(), "{1|2,3}");
    }

    #[test]
    fn debug_rendering_is_stable() {
        let p = DetectorPattern::parse("AA").unwrap();
        let state = expand_postselected(2, &p, FRAC_PI_2).unwrap();
        let expected = "\
n=2 pattern=AA chi=1.5707963267948966
{1|2}            coeff = 0+2i         branches: LR (php ok), RL (php ok)
{1,2}            coeff = 0+0i         branches: LL (php ok), RR (php ok)
";
        assert_eq!(state.to_string(), expected);
    }

    #[test]
    fn count_guard() {
        let p = DetectorPattern::all_a(2).unwrap();
        assert!(expand_postselected(0, &p, 0.0).is_err());
        assert!(DetectorPattern::all_a(MAX_PARTICLES + 1).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Every per-particle factor is a unit phase, so each branch
            /// coefficient has modulus exactly 1 for any shifter angle.
            #[test]
            fn branch_coefficients_are_unit_phases(
                chi in -10.0f64..10.0,
                n in 1usize..6,
                bits in 0u32..1 << 5,
                pat in 0u32..1 << 5,
            ) {
                let mask = (1u32 << n) - 1;
                let a = ArmAssignment::from_bits(bits & mask, n).unwrap();
                let p = DetectorPattern::from_bits(pat & mask, n).unwrap();
                let coeff = branch_coefficient(&a, &p, chi).unwrap();
                prop_assert!((coeff.norm() - 1.0).abs() < 1e-12);
            }

            /// Each group coefficient is exactly the sum of the two
            /// branch coefficients of its representative pair, and the
            /// group count is 2^(n-1).
            #[test]
            fn groups_sum_their_branch_pair(
                chi in -10.0f64..10.0,
                n in 1usize..6,
                pat in 0u32..1 << 5,
            ) {
                let mask = (1u32 << n) - 1;
                let p = DetectorPattern::from_bits(pat & mask, n).unwrap();
                let state = expand_postselected(n, &p, chi).unwrap();
                prop_assert_eq!(state.groups().len(), 1 << (n - 1));
                for g in state.groups() {
                    let (a, b) = g.structure.representatives();
                    let sum = branch_coefficient(&a, &p, chi).unwrap()
                        + branch_coefficient(&b, &p, chi).unwrap();
                    prop_assert!((g.coefficient - sum).norm() < 1e-12);
                }
            }
        }
    }
}
