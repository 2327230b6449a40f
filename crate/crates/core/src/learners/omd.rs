//! Mirror descent steps on a convex parameter space.

use crate::error::{Error, Result};
use crate::simplex::SimplexWeights;
use crate::space::ConvexParamSpace;

/// One mirror descent step from `theta` against `gradient`:
/// `argmin over feasible u of <eta * gradient, u> + V(theta, u)`.
///
/// On the simplex with the entropy potential this is a multiplicative
/// update; on ball and box geometries it is a projected gradient step.
pub fn omd_step(
    space: &ConvexParamSpace,
    theta: &[f64],
    gradient: &[f64],
    eta: f64,
) -> Result<Vec<f64>> {
    if theta.len() != space.dim() || gradient.len() != space.dim() {
        return Err(Error::invalid(format!(
            "omd_step expects dimension {}, got point {} and gradient {}",
            space.dim(),
            theta.len(),
            gradient.len()
        )));
    }
    if !space.contains(theta, 1e-9) {
        return Err(Error::invalid("omd_step called from an infeasible point"));
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("omd_step gradient must be finite"));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::invalid("omd_step rate must be finite and >= 0"));
    }
    if space.is_simplex() {
        // Multiplicative update, shifted so the largest exponent is 0.
        let min = gradient.iter().cloned().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = theta
            .iter()
            .zip(gradient)
            .map(|(&w, &g)| w * (-eta * (g - min)).exp())
            .collect();
        Ok(SimplexWeights::normalized(raw)?.as_ref().to_vec())
    } else {
        let moved: Vec<f64> = theta.iter().zip(gradient).map(|(&w, &g)| w - eta * g).collect();
        space.project(&moved)
    }
}

/// Sequential mirror descent state: plays the current point, steps on every
/// observed gradient.
#[derive(Clone, Debug)]
pub struct OmdLearner {
    space: ConvexParamSpace,
    theta: Vec<f64>,
    eta: f64,
}

impl OmdLearner {
    /// Starts at the space's center, which maximizes the distance-to-anywhere
    /// budget the regret bound charges for.
    pub fn new(space: ConvexParamSpace, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid("omd rate must be positive and finite"));
        }
        let theta = space.center();
        Ok(Self { space, theta, eta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn space(&self) -> &ConvexParamSpace {
        &self.space
    }

    pub fn observe(&mut self, gradient: &[f64]) -> Result<()> {
        self.theta = omd_step(&self.space, &self.theta, gradient, self.eta)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::hedge::Hedge;
    use crate::rng::substream;
    use rand::Rng;

    #[test]
    fn zero_gradient_leaves_theta_unchanged() {
        let space = ConvexParamSpace::ball(3, 2.0).unwrap();
        let theta = vec![0.5, -0.3, 1.0];
        let out = omd_step(&space, &theta, &[0.0; 3], 0.7).unwrap();
        for (a, b) in out.iter().zip(&theta) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_euclidean_step_is_plain_gradient_descent() {
        let space = ConvexParamSpace::axis_box(vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let out = omd_step(&space, &[0.1, 0.2], &[0.5, -0.25], 0.4).unwrap();
        assert!((out[0] - (0.1 - 0.4 * 0.5)).abs() < 1e-15);
        assert!((out[1] - (0.2 + 0.4 * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn boundary_step_projects_back() {
        let space = ConvexParamSpace::ball(2, 1.0).unwrap();
        let out = omd_step(&space, &[0.8, 0.6], &[-1.0, 0.0], 1.0).unwrap();
        let norm = (out[0] * out[0] + out[1] * out[1]).sqrt();
        assert!(norm <= 1.0 + 1e-9);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let space = ConvexParamSpace::simplex(2).unwrap();
        assert!(omd_step(&space, &[0.8, 0.8], &[0.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn entropy_step_matches_hedge_on_random_sequences() {
        let mut rng = substream(21, 0);
        for _ in 0..100 {
            let k = rng.gen_range(2..6);
            let eta = rng.gen_range(0.05..1.5);
            let rounds = rng.gen_range(1..8);
            let space = ConvexParamSpace::simplex(k).unwrap();
            let mut theta = space.center();
            let mut hedge = Hedge::new(k, eta).unwrap();
            for _ in 0..rounds {
                let cost: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
                theta = omd_step(&space, &theta, &cost, eta).unwrap();
                hedge.update(&cost).unwrap();
            }
            let w = hedge.weights();
            for i in 0..k {
                assert!(
                    (theta[i] - w.get(i)).abs() < 1e-12,
                    "k={k} eta={eta} index {i}: {} vs {}",
                    theta[i],
                    w.get(i)
                );
            }
        }
    }

    #[test]
    fn learner_starts_at_center_and_stays_feasible() {
        let space = ConvexParamSpace::simplex(4).unwrap();
        let mut learner = OmdLearner::new(space, 0.3).unwrap();
        assert_eq!(learner.theta(), &[0.25; 4]);
        for i in 0..50 {
            let mut g = vec![0.0; 4];
            g[i % 4] = 1.0;
            learner.observe(&g).unwrap();
            assert!(learner.space().contains(learner.theta(), 1e-9));
        }
    }
}
