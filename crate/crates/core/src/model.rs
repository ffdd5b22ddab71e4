//! The AR(1) market: `X_{t+1} = alpha * X_t + sigma * eps_{t+1}` with i.i.d.
//! standard Gaussian innovations. Prices may go negative; nothing is clamped.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Parameters of the AR(1) price process.
///
/// `alpha` is stored; `beta = alpha - 1` is derived on access so the two can
/// never drift apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    alpha: f64,
    sigma: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return invalid(format!("alpha must be finite, got {alpha}"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return invalid(format!("sigma must be positive and finite, got {sigma}"));
        }
        Ok(Self { alpha, sigma })
    }

    pub fn from_beta(beta: f64, sigma: f64) -> Result<Self> {
        Self::new(beta + 1.0, sigma)
    }

    /// Stable parameters normalised to unit stationary variance.
    pub fn stationary(beta: f64) -> Result<Self> {
        Self::from_beta(beta, stationary_sigma(beta)?)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.alpha - 1.0
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// `|alpha| < 1`.
    pub fn is_stable(&self) -> bool {
        self.alpha.abs() < 1.0
    }
}

/// Number of trading periods, always at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Horizon(usize);

impl Horizon {
    pub fn new(periods: usize) -> Result<Self> {
        if periods == 0 {
            return invalid("horizon must be at least 1");
        }
        Ok(Self(periods))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Horizon {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Self::new(value)
    }
}

pub(crate) fn check_horizon(horizon: usize) -> Result<()> {
    Horizon::new(horizon).map(|_| ())
}

/// One realised price path together with the innovations that drove it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathBundle {
    x0: f64,
    innovations: Vec<f64>,
    prices: Vec<f64>,
}

impl PathBundle {
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `eps_1, ..., eps_T`.
    pub fn innovations(&self) -> &[f64] {
        &self.innovations
    }

    /// `X_0, ..., X_T`.
    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn horizon(&self) -> usize {
        self.innovations.len()
    }

    /// `X_t - X_{t-1}` for `t = 1..=T`.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.prices.windows(2).map(|w| w[1] - w[0])
    }
}

/// Runs the recursion from `x0` over the given innovations.
pub fn evolve_path(params: &ModelParams, x0: f64, innovations: &[f64]) -> Result<PathBundle> {
    if innovations.is_empty() {
        return invalid("innovation sequence is empty");
    }
    if !x0.is_finite() {
        return invalid(format!("initial price must be finite, got {x0}"));
    }
    let mut prices = Vec::with_capacity(innovations.len() + 1);
    prices.push(x0);
    let mut x = x0;
    for &eps in innovations {
        x = params.alpha * x + params.sigma * eps;
        prices.push(x);
    }
    Ok(PathBundle {
        x0,
        innovations: innovations.to_vec(),
        prices,
    })
}

/// Innovation scale giving a unit stationary variance, `sqrt(1 - alpha^2)`.
pub fn stationary_sigma(beta: f64) -> Result<f64> {
    if !(beta > -2.0 && beta < 0.0) {
        return Err(Error::StabilityViolation { beta });
    }
    // 1 - alpha^2 = -beta * (beta + 2)
    Ok((-beta * (beta + 2.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn evolve_examples() {
        let p = ModelParams::new(0.5, 1.0).unwrap();
        assert_eq!(evolve_path(&p, 1.0, &[0.0]).unwrap().prices(), &[1.0, 0.5]);

        let p = ModelParams::new(1.0, 1.0).unwrap();
        assert_eq!(
            evolve_path(&p, 0.0, &[1.0, 1.0]).unwrap().prices(),
            &[0.0, 1.0, 2.0]
        );

        let p = ModelParams::new(0.5, 2.0).unwrap();
        assert_eq!(
            evolve_path(&p, 1.0, &[1.0, -1.0]).unwrap().prices(),
            &[1.0, 2.5, -0.75]
        );
    }

    #[test]
    fn empty_innovations_rejected() {
        let p = ModelParams::new(0.5, 1.0).unwrap();
        assert!(matches!(evolve_path(&p, 1.0, &[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(0.5, 0.0).is_err());
        assert!(ModelParams::new(0.5, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        assert!(Horizon::new(0).is_err());
        assert_eq!(Horizon::new(3).unwrap().get(), 3);
    }

    #[test]
    fn stationary_sigma_examples() {
        assert_eq!(stationary_sigma(-1.0).unwrap(), 1.0);
        assert_relative_eq!(
            stationary_sigma(-0.5).unwrap(),
            0.75f64.sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(stationary_sigma(-0.5).unwrap(), 0.8660254, epsilon = 1e-7);
        assert!(matches!(
            stationary_sigma(0.0),
            Err(Error::StabilityViolation { .. })
        ));
        assert!(stationary_sigma(-2.0).is_err());
        assert!(stationary_sigma(0.3).is_err());
    }

    #[test]
    fn unit_root_without_noise_is_flat() {
        let p = ModelParams::from_beta(0.0, 1.3).unwrap();
        let path = evolve_path(&p, 2.5, &[0.0; 7]).unwrap();
        assert!(path.prices().iter().all(|&x| x == 2.5));
    }

    #[test]
    fn beta_accessor_tracks_alpha() {
        for &beta in &[-1.9, -0.5, -0.1, 0.0, 0.1, 0.5] {
            let p = ModelParams::from_beta(beta, 1.0).unwrap();
            assert!((p.beta() - beta).abs() <= f64::EPSILON);
            assert_eq!(p.beta(), p.alpha() - 1.0);
        }
    }

    proptest! {
        #[test]
        fn innovations_recovered_from_prices(
            alpha in -1.5f64..1.5,
            sigma in 0.1f64..3.0,
            x0 in -5.0f64..5.0,
            eps in prop::collection::vec(-4.0f64..4.0, 1..40),
        ) {
            let p = ModelParams::new(alpha, sigma).unwrap();
            let path = evolve_path(&p, x0, &eps).unwrap();
            prop_assert_eq!(path.prices()[0], x0);
            for (t, w) in path.prices().windows(2).enumerate() {
                let recovered = (w[1] - alpha * w[0]) / sigma;
                let scale = 1.0 + (alpha * w[0]).abs() / sigma + eps[t].abs();
                prop_assert!((recovered - eps[t]).abs() <= 1e-12 * scale);
            }
        }
    }
}
