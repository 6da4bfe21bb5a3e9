use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameter pair `(α, β)` with `α ≥ β ≥ -1/2` and `α > -1/2`.
///
/// The derived `ρ = α + β + 1` is strictly positive under these constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiParams<T: Real> {
    alpha: T,
    beta: T,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let half = T::lit(0.5);
        let ok = alpha.is_finite()
            && beta.is_finite()
            && alpha >= beta
            && beta >= -half
            && alpha > -half;
        if !ok {
            return Err(Error::InvalidParams(format!(
                "need alpha >= beta >= -1/2 and alpha > -1/2, got alpha = {}, beta = {}",
                alpha, beta
            )));
        }
        Ok(Self { alpha, beta })
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> T {
        self.beta
    }

    #[inline]
    pub fn rho(&self) -> T {
        self.alpha + self.beta + T::one()
    }

    /// `(α + 1, β + 1)`, the pair entering the odd part of the eigenfunction.
    pub fn shifted(&self) -> Self {
        Self {
            alpha: self.alpha + T::one(),
            beta: self.beta + T::one(),
        }
    }

    pub fn to_f64(&self) -> JacobiParams<f64> {
        JacobiParams {
            alpha: self.alpha.as_f64(),
            beta: self.beta.as_f64(),
        }
    }
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl<'de> Deserialize<'de> for JacobiParams<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawParams::deserialize(d)?;
        JacobiParams::new(raw.alpha, raw.beta).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraints() {
        assert!(JacobiParams::new(0.5, -0.5).is_ok());
        assert!(JacobiParams::new(0.0, 0.0).is_ok());
        assert!(JacobiParams::new(-0.5, -0.5).is_err());
        assert!(JacobiParams::new(0.2, 0.3).is_err());
        assert!(JacobiParams::new(1.0, -0.6).is_err());
        assert!(JacobiParams::new(f64::NAN, 0.0).is_err());
        let p = JacobiParams::new(1.3, 0.4).unwrap();
        assert_eq!(p.rho(), 1.3 + 0.4 + 1.0);
    }

    #[test]
    fn json_rejects_invalid() {
        let ok: JacobiParams<f64> = serde_json::from_str(r#"{"alpha":0.5,"beta":-0.5}"#).unwrap();
        assert_eq!(ok.rho(), 1.0);
        assert!(serde_json::from_str::<JacobiParams<f64>>(r#"{"alpha":0.1,"beta":0.5}"#).is_err());
    }
}
