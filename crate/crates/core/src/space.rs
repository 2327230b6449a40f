//! Convex parameter spaces with mirror-map geometry.
//!
//! A [`ConvexParamSpace`] bundles a feasible set with the distance-generating
//! function the mirror-descent learner uses on it: the probability simplex
//! with the entropy map, or a Euclidean ball / box with the squared-norm map.
//! It exposes the pieces the iteration-budget formula and the solvers need:
//! the center (the dgf minimizer), the Bregman divergence, the Bregman radius
//! `D = max_u V(center, u)`, and the largest action norm in the geometry's
//! own norm.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormPair {
    /// Actions measured in L1, gradients in Linf. Used by the simplex.
    L1Linf,
    /// Self-dual Euclidean pairing. Used by balls and boxes.
    L2L2,
}

#[derive(Clone, Debug)]
enum Geometry {
    /// Probability simplex with the negative-entropy dgf.
    Simplex,
    /// Euclidean ball of given radius centered at the origin, squared-norm dgf.
    Ball { radius: f64 },
    /// Axis-aligned box, squared-norm dgf.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct ConvexParamSpace {
    geometry: Geometry,
    dim: usize,
}

impl ConvexParamSpace {
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("simplex dimension must be positive"));
        }
        Ok(ConvexParamSpace { geometry: Geometry::Simplex, dim })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !radius.is_finite() || radius <= 0.0 {
            return Err(Error::invalid("ball needs positive dimension and radius"));
        }
        Ok(ConvexParamSpace { geometry: Geometry::Ball { radius }, dim })
    }

    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("box bounds must be nonempty and equal length"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::invalid("box needs finite bounds with lower <= upper"));
            }
        }
        let dim = lower.len();
        Ok(ConvexParamSpace { geometry: Geometry::Box { lower, upper }, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_simplex(&self) -> bool {
        matches!(self.geometry, Geometry::Simplex)
    }

    pub fn norm_pair(&self) -> NormPair {
        match self.geometry {
            Geometry::Simplex => NormPair::L1Linf,
            _ => NormPair::L2L2,
        }
    }

    /// The dgf minimizer: uniform weights on the simplex, the projection of
    /// the origin otherwise.
    pub fn center(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Simplex => vec![1.0 / self.dim as f64; self.dim],
            Geometry::Ball { .. } => vec![0.0; self.dim],
            Geometry::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| 0.0f64.clamp(l, u))
                .collect(),
        }
    }

    /// Bregman radius `D = max_u V(center, u)` over the set.
    pub fn bregman_radius(&self) -> f64 {
        match &self.geometry {
            Geometry::Simplex => (self.dim as f64).ln(),
            Geometry::Ball { radius } => 0.5 * radius * radius,
            Geometry::Box { lower, upper } => {
                let c = self.center();
                let sq: f64 = lower
                    .iter()
                    .zip(upper)
                    .zip(&c)
                    .map(|((&l, &u), &ci)| {
                        let d = (u - ci).max(ci - l);
                        d * d
                    })
                    .sum();
                0.5 * sq
            }
        }
    }

    /// Largest action norm over the set, in the geometry's own norm
    /// (L1 for the simplex, so always 1 there; Euclidean otherwise).
    pub fn norm_radius(&self) -> f64 {
        match &self.geometry {
            Geometry::Simplex => 1.0,
            Geometry::Ball { radius } => *radius,
            Geometry::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| l.abs().max(u.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.geometry {
            Geometry::Simplex => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            Geometry::Ball { radius } => {
                x.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius + tol
            }
            Geometry::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "projection input has dimension {}, space has {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("projection input must be finite"));
        }
        Ok(match &self.geometry {
            Geometry::Simplex => project_simplex(x),
            Geometry::Ball { radius } => {
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / norm;
                    x.iter().map(|v| v * s).collect()
                }
            }
            Geometry::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| v.clamp(l, u))
                .collect(),
        })
    }

    /// Bregman divergence `V(w, u)` of the geometry's dgf: KL(u || w) on the
    /// simplex, half squared Euclidean distance otherwise. Returns infinity
    /// when `u` puts mass where `w` has none.
    pub fn bregman(&self, w: &[f64], u: &[f64]) -> Result<f64> {
        if w.len() != self.dim || u.len() != self.dim {
            return Err(Error::invalid("bregman arguments must match the space dimension"));
        }
        Ok(match &self.geometry {
            Geometry::Simplex => {
                let mut kl = 0.0;
                for (&wi, &ui) in w.iter().zip(u) {
                    if ui > 0.0 {
                        if wi <= 0.0 {
                            return Ok(f64::INFINITY);
                        }
                        kl += ui * (ui / wi).ln();
                    }
                }
                kl.max(0.0)
            }
            Geometry::Ball { .. } | Geometry::Box { .. } => {
                0.5 * w.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            }
        })
    }

    /// A point drawn from the set: Dirichlet(1) on the simplex, uniform in the
    /// ball, coordinate-uniform in the box.
    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.geometry {
            Geometry::Simplex => {
                let exps: Vec<f64> = (0..self.dim)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln().max(1e-300))
                    .collect();
                let sum: f64 = exps.iter().sum();
                exps.into_iter().map(|e| e / sum).collect()
            }
            Geometry::Ball { radius } => loop {
                let cand: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if cand.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                    return cand.into_iter().map(|v| v * radius).collect();
                }
            },
            Geometry::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| if l == u { l } else { rng.gen_range(l..u) })
                .collect(),
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (i as f64 + 1.0);
        if v - candidate > 0.0 {
            tau = candidate;
        }
    }
    x.iter().map(|&v| (v - tau).max(0.0)).collect()
}
