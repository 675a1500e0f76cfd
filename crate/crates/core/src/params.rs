//! Physical and integration parameters.

use crate::error::ParamsError;

/// Physical rates and integration controls. Time is measured in units of the
/// measurement strength: set k = 1 and give gamma and omega as multiples of k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Measurement strength (rate of information extraction).
    pub k: f64,
    /// Thermal damping rate.
    pub gamma: f64,
    /// Thermal occupation of the bath.
    pub n_t: f64,
    /// Maximum feedback rotation speed.
    pub omega: f64,
    /// Integration step.
    pub dt: f64,
    /// Burn-in duration discarded before averaging.
    pub t_burn: f64,
    /// Averaging duration.
    pub t_avg: f64,
    /// Master RNG seed; per-trajectory streams derive from it.
    pub seed: u64,
}

impl SimParams {
    /// Validate ranges and the stability guard dt*max(k, gamma*(nT+1), omega) <= 0.1.
    pub fn validate(&self) -> Result<(), ParamsError> {
        let checks: [(&'static str, f64, &'static str, bool); 7] = [
            ("k", self.k, ">= 0", self.k >= 0.0),
            ("gamma", self.gamma, ">= 0", self.gamma >= 0.0),
            ("nT", self.n_t, ">= 0", self.n_t >= 0.0),
            ("omega", self.omega, ">= 0", self.omega >= 0.0),
            ("dt", self.dt, "> 0", self.dt > 0.0),
            ("t_burn", self.t_burn, ">= 0", self.t_burn >= 0.0),
            ("t_avg", self.t_avg, "> 0", self.t_avg > 0.0),
        ];
        for (field, value, requirement, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(ParamsError::Invalid {
                    field,
                    requirement,
                    value,
                });
            }
        }
        let fastest = self.k.max(self.gamma * (self.n_t + 1.0)).max(self.omega);
        let product = self.dt * fastest;
        if product > 0.1 {
            return Err(ParamsError::StepTooLarge { product });
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self, ParamsError> {
        self.validate()?;
        Ok(self)
    }
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            gamma: 0.1,
            n_t: 0.1,
            omega: 10.0,
            dt: 1e-4,
            t_burn: 0.0,
            t_avg: 100.0,
            seed: 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SimParams::default().validate().unwrap();
    }

    #[test]
    fn zero_k_allowed() {
        let p = SimParams {
            k: 0.0,
            omega: 0.0,
            ..SimParams::default()
        };
        p.validate().unwrap();
    }

    #[test]
    fn negative_rates_rejected() {
        let p = SimParams {
            gamma: -0.1,
            ..SimParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamsError::Invalid { field: "gamma", .. })
        ));
    }

    #[test]
    fn stability_guard() {
        let p = SimParams {
            omega: 50.0,
            dt: 0.01,
            ..SimParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamsError::StepTooLarge { .. })
        ));
        let p = SimParams {
            omega: 50.0,
            dt: 1e-3,
            ..SimParams::default()
        };
        p.validate().unwrap();
    }

    #[test]
    fn zero_t_avg_rejected() {
        let p = SimParams {
            t_avg: 0.0,
            ..SimParams::default()
        };
        assert!(p.validate().is_err());
    }
}
