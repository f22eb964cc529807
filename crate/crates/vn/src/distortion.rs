//! Depth jumps along repelling orbits and slope growth of powers.

use serde::Serialize;

use crate::revealing::{RevealingPair, SpineData};
use crate::{Address, Element, Error, Point};

/// Depths of the repeller chain `r_0 .. r_u` (`r_0` the repeller leaf,
/// `r_u` the component root) and the depth drops between consecutive cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpProfile {
    pub repeller: Address,
    pub u: usize,
    pub depths: Vec<i64>,
    /// `jumps[0] = depth(r_u) - depth(r_1)`, `jumps[i] = depth(r_i) - depth(r_{i+1})`.
    pub jumps: Vec<i64>,
    pub spine_length: i64,
    /// The repelling point in the cone of `r_0`.
    pub point: Point,
}

/// Largest depth change in any rule of a generating set; at least 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSlopeBound(pub i64);

impl GeneratorSlopeBound {
    pub fn new(p: i64) -> Result<Self, Error> {
        if p < 1 {
            return Err(Error::Invalid(format!("slope bound must be positive, got {p}")));
        }
        Ok(GeneratorSlopeBound(p))
    }

    /// Scans the rules of every generator (inverses change depth by the same amounts).
    pub fn from_generators(gens: &[Element]) -> Self {
        let p = gens
            .iter()
            .flat_map(|g| g.rules().iter().map(|(d, r)| (d.len() as i64 - r.len() as i64).abs()))
            .max()
            .unwrap_or(0);
        GeneratorSlopeBound(p.max(1))
    }
}

fn find_repeller<'a>(rp: &'a RevealingPair, leaf: &Address) -> Option<&'a SpineData> {
    rp.repellers().find(|s| s.chain.first() == Some(leaf) || s.root == *leaf)
}

/// `repeller` may be the repeller leaf or its component root.
pub fn jump_profile(rp: &RevealingPair, repeller: &Address) -> Result<JumpProfile, Error> {
    let s = find_repeller(rp, repeller).ok_or_else(|| Error::Invalid(format!("{repeller} is not a repeller of this pair")))?;
    let depths: Vec<i64> = s.chain.iter().map(|a| a.len() as i64).collect();
    let u = depths.len() - 1;
    let mut jumps = vec![depths[u] - depths[1]];
    for i in 1..u {
        jumps.push(depths[i] - depths[i + 1]);
    }
    let profile = JumpProfile {
        repeller: s.chain[0].clone(),
        u,
        depths,
        jumps,
        spine_length: s.spine.len() as i64,
        point: s.orbit[0].clone(),
    };
    debug_assert_eq!(profile.jumps.iter().sum::<i64>(), 0);
    Ok(profile)
}

/// Sum of the first `z mod u` jumps.
pub fn partial_sum(p: &JumpProfile, z: u64) -> i64 {
    p.jumps[..(z % p.u as u64) as usize].iter().sum()
}

/// `L·(⌊z/u⌋ + 1) + S`.
pub fn formula_power_slope_exponent(p: &JumpProfile, z: u64) -> i64 {
    p.spine_length * ((z / p.u as u64) as i64 + 1) + partial_sum(p, z)
}

/// `⌈(L·⌊z/u⌋ + L + S)/P⌉`.
pub fn word_length_lower_bound(p: &JumpProfile, z: u64, bound: GeneratorSlopeBound) -> i64 {
    let x = formula_power_slope_exponent(p, z);
    x.div_euclid(bound.0) + i64::from(x.rem_euclid(bound.0) != 0)
}

fn check_periodic(alpha: &Element, p: &Point) -> Result<usize, Error> {
    let mut q = alpha.apply_point(p);
    for k in 1..=alpha.len() {
        if q == *p {
            return Ok(k);
        }
        q = alpha.apply_point(&q);
    }
    Err(Error::Invalid(format!("{p} is not a periodic point of the element")))
}

/// Slope exponent of `alpha^z` at `p`, by composing `alpha` with itself.
pub fn exact_power_slope_exponent(alpha: &Element, z: u64, p: &Point) -> Result<i64, Error> {
    check_periodic(alpha, p)?;
    Ok(alpha.pow(z as i64).slope_exponent_at(p))
}

/// The same number, summed one step at a time along the orbit of `p`.
pub fn orbit_power_slope_exponent(alpha: &Element, z: u64, p: &Point) -> Result<i64, Error> {
    let period = check_periodic(alpha, p)?;
    let mut orbit = Vec::with_capacity(period);
    let mut q = p.clone();
    for _ in 0..period {
        orbit.push(alpha.slope_exponent_at(&q));
        q = alpha.apply_point(&q);
    }
    let full: i64 = orbit.iter().sum();
    let rest: i64 = orbit[..(z % period as u64) as usize].iter().sum();
    Ok(full * (z / period as u64) as i64 + rest)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionRow {
    pub z: u64,
    pub partial_sum: i64,
    pub formula_exponent: i64,
    pub exact_exponent: i64,
    pub lower_bound: i64,
}

pub const CSV_HEADER: &str = "z,partial_sum,formula_exponent,exact_exponent,lower_bound";

impl DistortionRow {
    pub fn csv(&self) -> String {
        format!("{},{},{},{},{}", self.z, self.partial_sum, self.formula_exponent, self.exact_exponent, self.lower_bound)
    }
}

/// Rows for `z = 1..=max_z`; exact exponents come from the orbit sum.
pub fn distortion_table(
    rp: &RevealingPair,
    profile: &JumpProfile,
    max_z: u64,
    bound: GeneratorSlopeBound,
) -> Result<Vec<DistortionRow>, Error> {
    (1..=max_z)
        .map(|z| {
            Ok(DistortionRow {
                z,
                partial_sum: partial_sum(profile, z),
                formula_exponent: formula_power_slope_exponent(profile, z),
                exact_exponent: orbit_power_slope_exponent(&rp.element, z, &profile.point)?,
                lower_bound: word_length_lower_bound(profile, z, bound),
            })
        })
        .collect()
}
