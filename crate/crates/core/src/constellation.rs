//! Square QAM constellations with Maxwell–Boltzmann shaping.
//!
//! Points are coherent amplitudes `α` with the heterodyne outcome mean equal
//! to `α`, so the mean photon number of the ensemble is `Σ p_k |x_k|²`.
//! Grid points are stored row-major over `(Re, Im)` ascending: index
//! `i·m + j` holds `((2i−m+1) + i(2j−m+1))·spacing/2`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result, C64};

/// Tolerance on probability normalisation.
pub const PROB_TOL: f64 = 1e-12;

/// `m²` points `((2i−m+1) + i(2j−m+1))·spacing/2`.
pub fn qam_grid(m: usize, spacing: f64) -> Result<Vec<C64>> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::NonPhysicalInput(format!("spacing must be > 0, got {spacing}")));
    }
    let coord = |i: usize| (2.0 * i as f64 - m as f64 + 1.0) * spacing / 2.0;
    let mut points = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            points.push(C64::new(coord(i), coord(j)));
        }
    }
    Ok(points)
}

/// Optional descriptive fields carried alongside a constellation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

/// The modulation random variable: points and their prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<C64>,
    probs: Vec<f64>,
    order: usize,
    pub meta: ConstellationMeta,
}

fn side_order(len: usize) -> Result<usize> {
    let m = (len as f64).sqrt().round() as usize;
    if m == 0 || m * m != len {
        return Err(Error::InvalidConstellation(format!(
            "{len} points is not a square number"
        )));
    }
    Ok(m)
}

impl Constellation {
    /// Validates normalisation, non-negativity, `m²` cardinality and
    /// symmetry under `x ↦ −x`.
    pub fn new(points: Vec<C64>, probs: Vec<f64>) -> Result<Self> {
        if points.len() != probs.len() {
            return Err(Error::DimensionMismatch(points.len(), probs.len()));
        }
        let order = side_order(points.len())?;
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidConstellation("probabilities must be finite and >= 0".into()));
        }
        if points.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::InvalidConstellation("non-finite point".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidConstellation(format!("probabilities sum to {total}")));
        }
        let scale = points.iter().fold(1.0_f64, |acc, x| acc.max(x.norm()));
        for (x, p) in points.iter().zip(&probs) {
            let mirrored = points
                .iter()
                .zip(&probs)
                .any(|(y, q)| (x + y).norm() <= 1e-12 * scale && (p - q).abs() <= PROB_TOL);
            if !mirrored {
                return Err(Error::InvalidConstellation(format!(
                    "point {x} has no mirror image -x with equal probability"
                )));
            }
        }
        Ok(Self {
            points,
            probs,
            order,
            meta: ConstellationMeta::default(),
        })
    }

    /// Equal priors over `points`.
    pub fn uniform(points: Vec<C64>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(points, vec![1.0 / n as f64; n])
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Points per quadrature side.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ p_k |x_k|²`.
    pub fn mean_energy(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| p * x.norm_sqr())
            .sum()
    }

    /// `Σ p_k x_k`.
    pub fn first_moment(&self) -> C64 {
        self.points.iter().zip(&self.probs).map(|(x, p)| x * *p).sum()
    }

    pub fn is_uniform(&self) -> bool {
        let p0 = self.probs[0];
        self.probs.iter().all(|p| *p == p0)
    }

    /// Draws `count` point indices i.i.d. from the priors.
    pub fn sample_indices(&self, seed: u64, count: usize) -> Vec<usize> {
        let dist = WeightedIndex::new(&self.probs).expect("validated probabilities");
        let mut rng = rng::stream(seed, rng::STREAM_SYMBOLS);
        (0..count).map(|_| dist.sample(&mut rng)).collect()
    }

    /// Draws `count` points i.i.d. from the priors.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<C64> {
        self.sample_indices(seed, count)
            .into_iter()
            .map(|k| self.points[k])
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = ConstellationFile {
            points: self.points.iter().map(|x| [x.re, x.im]).collect(),
            probs: self.probs.clone(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("constellation serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ConstellationFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidConstellation(e.to_string()))?;
        let points = file.points.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let mut c = Self::new(points, file.probs)?;
        c.meta = file.meta;
        Ok(c)
    }
}

/// On-disk JSON layout: `{points: [[re, im], ...], probs: [...], meta: {...}}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstellationFile {
    points: Vec<[f64; 2]>,
    probs: Vec<f64>,
    #[serde(default)]
    meta: ConstellationMeta,
}

fn mb_weights(points: &[C64], nu: f64) -> Vec<f64> {
    // shifting by the smallest energy keeps the exponentials in range
    let emin = points.iter().map(|x| x.norm_sqr()).fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = points
        .iter()
        .map(|x| (-nu * (x.norm_sqr() - emin)).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn mb_energy(points: &[C64], nu: f64) -> f64 {
    mb_weights(points, nu)
        .iter()
        .zip(points)
        .map(|(p, x)| p * x.norm_sqr())
        .sum()
}

/// Maxwell–Boltzmann priors `p_k ∝ exp(−ν|x_k|²)`.
pub fn mb_shaped(points: Vec<C64>, nu: f64) -> Result<Constellation> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::NonPhysicalInput(format!("nu must be finite and >= 0, got {nu}")));
    }
    let probs = mb_weights(&points, nu);
    let mut c = Constellation::new(points, probs)?;
    c.meta.nu = Some(nu);
    Ok(c)
}

/// Result of matching a Maxwell–Boltzmann exponent to a mean energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapingParams {
    pub nu: f64,
    pub target_energy: f64,
    /// All points share one magnitude, so `ν` does not affect the energy.
    pub degenerate: bool,
}

/// Finds `ν ≥ 0` with `E_ν[|X|²] = target` by bisection. The energy is
/// strictly decreasing in `ν` from the uniform mean down to the smallest
/// `|x_k|²`, so targets outside that range are rejected.
pub fn solve_nu_for_energy(points: &[C64], target: f64) -> Result<ShapingParams> {
    if points.is_empty() {
        return Err(Error::InvalidConstellation("no points".into()));
    }
    if !target.is_finite() {
        return Err(Error::NonPhysicalInput(format!("target energy {target}")));
    }
    let energies: Vec<f64> = points.iter().map(|x| x.norm_sqr()).collect();
    let emin = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let emax = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e0 = mb_energy(points, 0.0);
    let tol = 1e-12 * e0.max(1.0);

    if emax - emin <= tol {
        if (target - e0).abs() <= tol {
            return Ok(ShapingParams {
                nu: 0.0,
                target_energy: target,
                degenerate: true,
            });
        }
        return Err(Error::Unreachable {
            target,
            min: e0,
            max: e0,
        });
    }
    if (target - e0).abs() <= tol {
        return Ok(ShapingParams {
            nu: 0.0,
            target_energy: target,
            degenerate: false,
        });
    }
    if target > e0 || target <= emin {
        return Err(Error::Unreachable {
            target,
            min: emin,
            max: e0,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0 / (e0 - emin);
    while mb_energy(points, hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Unreachable {
                target,
                min: emin,
                max: e0,
            });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mb_energy(points, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    Ok(ShapingParams {
        nu,
        target_energy: target,
        degenerate: false,
    })
}

/// Square `m`-QAM with the given spacing, MB-shaped to mean energy `mbar`.
/// Single-magnitude grids (`m = 2`) keep uniform priors and are flagged
/// degenerate.
pub fn shaped_qam(m: usize, spacing: f64, mbar: f64) -> Result<Constellation> {
    let points = qam_grid(m, spacing)?;
    let shaping = solve_nu_for_energy(&points, mbar)?;
    let mut c = mb_shaped(points, shaping.nu)?;
    c.meta = ConstellationMeta {
        spacing: Some(spacing),
        nu: Some(shaping.nu),
        target_energy: Some(mbar),
        degenerate: shaping.degenerate,
    };
    Ok(c)
}

/// Interval of spacings for which an `m`-QAM can be shaped (with `ν ≥ 0`) to
/// mean energy `mbar`: the uniform energy `s²(m²−1)/6` must reach `mbar`,
/// and for even `m` the innermost energy `s²/2` must stay below it. Returns
/// `None` for `m = 1` and `m = 2`, where the spacing is forced.
pub fn feasible_spacing(m: usize, mbar: f64) -> Option<(f64, f64)> {
    if m < 3 || !(mbar > 0.0) {
        return None;
    }
    let lo = (6.0 * mbar / ((m * m - 1) as f64)).sqrt();
    let hi = if m.is_multiple_of(2) {
        (2.0 * mbar).sqrt()
    } else {
        2.0 * (2.0 * mbar).sqrt()
    };
    Some((lo, hi))
}
