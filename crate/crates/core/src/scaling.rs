//! Asymptotic scaling classes of the two GHZ-growth protocols.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance used to decide `alpha == d` or `alpha == 2d`.
pub const REGIME_TOL: f64 = 1e-12;

/// Growth class of a time `t(r)` as the characteristic length `r` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ScalingClass {
    Constant,
    Logarithmic,
    /// `log(r)^kappa`
    Polylog { kappa: f64 },
    /// `exp(gamma * sqrt(log r))`
    StretchedExponential { gamma: f64 },
    /// `r^exponent`
    Power { exponent: f64 },
}

impl ScalingClass {
    /// Evaluate the representative function with unit prefactor at `r > 1`.
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ScalingClass::Constant => 1.0,
            ScalingClass::Logarithmic => r.ln(),
            ScalingClass::Polylog { kappa } => r.ln().powf(kappa),
            ScalingClass::StretchedExponential { gamma } => (gamma * r.ln().sqrt()).exp(),
            ScalingClass::Power { exponent } => r.powf(exponent),
        }
    }
}

/// `gamma = 3 sqrt(d)` and `kappa_alpha = log 4 / log(2d/alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub gamma: f64,
    /// Defined only for `d < alpha < 2d`.
    pub kappa_alpha: Option<f64>,
}

impl ScalingConstants {
    pub fn new(alpha: f64, d: usize) -> Self {
        let df = d as f64;
        let kappa_alpha = (alpha > df + REGIME_TOL && alpha < 2.0 * df - REGIME_TOL)
            .then(|| 4f64.ln() / (2.0 * df / alpha).ln());
        Self { gamma: 3.0 * df.sqrt(), kappa_alpha }
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(invalid(format!("dimension must be 1, 2 or 3, got {d}")))
    }
}

/// Scaling of the incremental cascaded-CNOT protocol.
pub fn classify_eldredge_asymptotics(alpha: f64, d: usize) -> Result<ScalingClass> {
    check_dimension(d)?;
    if !(alpha > 0.0) {
        return Err(invalid("alpha must be positive"));
    }
    let df = d as f64;
    Ok(if (alpha - df).abs() <= REGIME_TOL {
        ScalingClass::Logarithmic
    } else if alpha < df {
        ScalingClass::Constant
    } else {
        ScalingClass::Power { exponent: (alpha - df).min(1.0) }
    })
}

/// Scaling of the recursive merging protocol; only defined for `alpha > d`.
pub fn classify_tran_asymptotics(alpha: f64, d: usize) -> Result<ScalingClass> {
    check_dimension(d)?;
    let df = d as f64;
    if !(alpha > df + REGIME_TOL) {
        return Err(Error::Regime { alpha, reason: "recursive merging needs alpha > d" });
    }
    let c = ScalingConstants::new(alpha, d);
    Ok(if (alpha - 2.0 * df).abs() <= REGIME_TOL {
        ScalingClass::StretchedExponential { gamma: c.gamma }
    } else if alpha < 2.0 * df {
        ScalingClass::Polylog { kappa: c.kappa_alpha.expect("d < alpha < 2d") }
    } else {
        ScalingClass::Power { exponent: (alpha - 2.0 * df).min(1.0) }
    })
}

/// Which of the three recursive-protocol regimes `alpha` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `d < alpha < 2d`
    Sub,
    /// `alpha = 2d`
    Critical,
    /// `alpha > 2d`
    Super,
}

pub fn regime(alpha: f64, d: usize) -> Result<Regime> {
    match classify_tran_asymptotics(alpha, d)? {
        ScalingClass::Polylog { .. } => Ok(Regime::Sub),
        ScalingClass::StretchedExponential { .. } => Ok(Regime::Critical),
        _ => Ok(Regime::Super),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eldredge_classes() {
        assert_eq!(classify_eldredge_asymptotics(1.5, 2).unwrap(), ScalingClass::Constant);
        assert_eq!(classify_eldredge_asymptotics(2.0, 2).unwrap(), ScalingClass::Logarithmic);
        assert_eq!(
            classify_eldredge_asymptotics(3.0, 2).unwrap(),
            ScalingClass::Power { exponent: 1.0 }
        );
        assert_eq!(
            classify_eldredge_asymptotics(2.5, 2).unwrap(),
            ScalingClass::Power { exponent: 0.5 }
        );
        assert!(classify_eldredge_asymptotics(3.0, 4).is_err());
    }

    #[test]
    fn tran_classes() {
        match classify_tran_asymptotics(3.0, 2).unwrap() {
            ScalingClass::Polylog { kappa } => {
                let expected = 4f64.ln() / (4.0f64 / 3.0).ln();
                assert!((kappa - expected).abs() < 1e-12);
                assert!((kappa - 4.8188).abs() < 1e-4);
            }
            other => panic!("{other:?}"),
        }
        match classify_tran_asymptotics(6.0, 3).unwrap() {
            ScalingClass::StretchedExponential { gamma } => {
                assert!((gamma - 3.0 * 3f64.sqrt()).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            classify_tran_asymptotics(6.5, 3).unwrap(),
            ScalingClass::Power { exponent: 0.5 }
        );
        assert!(matches!(classify_tran_asymptotics(2.0, 2), Err(Error::Regime { .. })));
    }

    #[test]
    fn kappa_exceeds_two_on_domain() {
        for d in 1..=3usize {
            let df = d as f64;
            for k in 1..100 {
                let alpha = df + df * k as f64 / 100.0;
                let c = ScalingConstants::new(alpha, d);
                assert!(c.gamma > 0.0);
                assert!(c.kappa_alpha.unwrap() > 2.0);
            }
        }
    }
}
