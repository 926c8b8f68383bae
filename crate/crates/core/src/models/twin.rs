use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::CoefficientState;

use super::likelihood::ForwardModel;

/// Synthetic observations together with the truth that generated them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinData {
    pub truth: CoefficientState,
    pub clean: Vec<f64>,
    pub observations: Vec<f64>,
    pub sigma: f64,
    pub seed: Option<u64>,
}

/// Run `model` at `truth` and add independent `N(0, sigma^2)` noise.
pub fn synthesize_twin_data<F: ForwardModel + ?Sized, R: Rng + ?Sized>(
    model: &F,
    truth: &CoefficientState,
    sigma: f64,
    rng: &mut R,
) -> Result<TwinData> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", format!("must be >= 0, got {sigma}")));
    }
    let clean = model.forward(truth)?;
    let observations = clean
        .iter()
        .map(|g| {
            let eta: f64 = rng.sample(StandardNormal);
            g + sigma * eta
        })
        .collect();
    Ok(TwinData {
        truth: truth.clone(),
        clean,
        observations,
        sigma,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    struct Identity;

    impl ForwardModel for Identity {
        fn forward(&self, s: &CoefficientState) -> Result<Vec<f64>> {
            Ok(s.z().to_vec())
        }
    }

    #[test]
    fn zero_noise_returns_forward_output() {
        let truth = CoefficientState::new(vec![0.1, 0.2, 0.3]);
        let d = synthesize_twin_data(&Identity, &truth, 0.0, &mut stream(1, 0)).unwrap();
        assert_eq!(d.observations, d.clean);
    }

    #[test]
    fn noise_has_requested_scale() {
        let truth = CoefficientState::new(vec![0.0; 10]);
        let mut rng = stream(2, 0);
        let sigma = 0.3;
        let mut resid = Vec::new();
        for _ in 0..1000 {
            let d = synthesize_twin_data(&Identity, &truth, sigma, &mut rng).unwrap();
            resid.extend(d.observations);
        }
        let n = resid.len() as f64;
        let sd = (resid.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        // SE of the sample std of a normal is about sigma / sqrt(2n)
        assert!((sd - sigma).abs() < 3.0 * sigma / (2.0 * n).sqrt());
    }

    #[test]
    fn same_seed_same_dataset() {
        let truth = CoefficientState::new(vec![1.0; 4]);
        let a = synthesize_twin_data(&Identity, &truth, 0.5, &mut stream(3, 7)).unwrap();
        let b = synthesize_twin_data(&Identity, &truth, 0.5, &mut stream(3, 7)).unwrap();
        assert_eq!(a, b);
    }
}
