//! Separable weakly convex penalties and their proximity operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Firm-thresholding penalty `P_{τ,ρ}`.
///
/// `τ|t| - ρt²/2` on `|t| < τ/ρ` and the constant `τ²/(2ρ)` beyond, which is
/// continuous at the knee. Adding `(ρ/2)t²` makes it convex, so it is
/// `ρ`-weakly convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmPenalty {
    tau: f64,
    rho: f64,
}

impl FirmPenalty {
    pub fn new(tau: f64, rho: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) || !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "firm penalty needs tau > 0 and rho > 0, got tau = {tau}, rho = {rho}"
            )));
        }
        Ok(Self { tau, rho })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Magnitude beyond which the penalty is flat and the threshold is the identity.
    pub fn knee(&self) -> f64 {
        self.tau / self.rho
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if a < self.knee() {
            self.tau * a - 0.5 * self.rho * a * a
        } else {
            self.tau * self.tau / (2.0 * self.rho)
        }
    }

    /// Firm threshold: the proximity operator of `P_{τ,ρ}` with step `alpha`.
    pub fn threshold(&self, t: f64, alpha: f64) -> Result<f64> {
        check_step(alpha, self.rho)?;
        Ok(self.threshold_unchecked(t, alpha))
    }

    fn threshold_unchecked(&self, t: f64, alpha: f64) -> f64 {
        let a = t.abs();
        if a < alpha * self.tau {
            0.0
        } else if a < self.knee() {
            t.signum() * (a - alpha * self.tau) / (1.0 - alpha * self.rho)
        } else {
            t
        }
    }
}

fn check_step(alpha: f64, rho: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive and finite, got {alpha}"
        )));
    }
    if alpha * rho >= 1.0 {
        return Err(Error::StepTooLarge { alpha, rho });
    }
    Ok(())
}

/// A separable penalty `g(x) = Σ p(x_i)` together with its weak-convexity modulus.
///
/// All scalar evaluation and prox dispatch goes through [`Penalty::eval_scalar`]
/// and [`Penalty::prox_scalar`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    /// `g ≡ 0`.
    Zero,
    /// `τ|t|`, the convex (`ρ → 0`) limit of the firm penalty.
    L1 {
        tau: f64,
    },
    Firm(FirmPenalty),
}

impl Penalty {
    pub fn firm(tau: f64, rho: f64) -> Result<Self> {
        FirmPenalty::new(tau, rho).map(Penalty::Firm)
    }

    pub fn l1(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("l1 weight must be positive, got {tau}")));
        }
        Ok(Penalty::L1 { tau })
    }

    /// Weak-convexity modulus `ρ`.
    pub fn modulus(&self) -> f64 {
        match self {
            Penalty::Zero | Penalty::L1 { .. } => 0.0,
            Penalty::Firm(p) => p.rho,
        }
    }

    pub fn eval_scalar(&self, t: f64) -> f64 {
        match self {
            Penalty::Zero => 0.0,
            Penalty::L1 { tau } => tau * t.abs(),
            Penalty::Firm(p) => p.eval(t),
        }
    }

    /// Scalar proximity operator; requires `alpha·ρ < 1`.
    pub fn prox_scalar(&self, t: f64, alpha: f64) -> Result<f64> {
        check_step(alpha, self.modulus())?;
        Ok(self.prox_scalar_unchecked(t, alpha))
    }

    fn prox_scalar_unchecked(&self, t: f64, alpha: f64) -> f64 {
        match self {
            Penalty::Zero => t,
            Penalty::L1 { tau } => t.signum() * (t.abs() - alpha * tau).max(0.0),
            Penalty::Firm(p) => p.threshold_unchecked(t, alpha),
        }
    }

    pub fn eval(&self, x: &DenseVector) -> f64 {
        x.iter().map(|&t| self.eval_scalar(t)).sum()
    }

    /// Coordinatewise prox `J_{αg}(x)`.
    pub fn prox(&self, x: &DenseVector, alpha: f64) -> Result<DenseVector> {
        check_step(alpha, self.modulus())?;
        Ok(x.map(|t| self.prox_scalar_unchecked(t, alpha)))
    }

    /// Prox of the convexified penalty `g + (ρ/2)|·|²` with step `alpha`.
    ///
    /// Evaluated as `J_{β₁g}((β₁/α)x)` with `β₁ = α/(1+αρ)`; `β₁ρ < 1` for every
    /// positive `alpha`, so no step restriction applies.
    pub fn shifted_prox(&self, x: &DenseVector, alpha: f64) -> Result<DenseVector> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step must be positive and finite, got {alpha}"
            )));
        }
        let rho = self.modulus();
        let beta = alpha / (1.0 + alpha * rho);
        self.prox(&x.scaled(beta / alpha), beta)
    }
}

impl From<FirmPenalty> for Penalty {
    fn from(p: FirmPenalty) -> Self {
        Penalty::Firm(p)
    }
}
