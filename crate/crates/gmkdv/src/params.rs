use crate::error::{Error, Result};

/// Coefficients of the gmKdV equation
///
/// ```text
/// (u - alpha^2 eps^2 u_xx)_t
///   + (c0 u + c1 u^3 - c2 eps^2 (u_x)^2 + eps^2 (gamma - c3 u) u_xx)_x = 0
/// ```
///
/// Only the cubic nonlinearity is supported here; `epsilon` sets the
/// dispersion scale and is treated as a small fixed constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub gamma: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(
        alpha: f64,
        gamma: f64,
        c0: f64,
        c1: f64,
        c2: f64,
        c3: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            gamma,
            c0,
            c1,
            c2,
            c3,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidParams(
                "alpha and gamma must be non-negative".into(),
            ));
        }
        if self.alpha + self.gamma <= 0.0 {
            return Err(Error::InvalidParams("alpha + gamma must be positive".into()));
        }
        if self.c2 < 0.0 || self.c3 < 0.0 {
            return Err(Error::InvalidParams("c2 and c3 must be non-negative".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParams("epsilon must be positive".into()));
        }
        Ok(())
    }

    /// mKdV: `u_t + (2u^3 + eps^2 u_xx)_x = 0`, with the exact sech soliton.
    pub fn mkdv_example1() -> Self {
        Self {
            alpha: 0.0,
            gamma: 1.0,
            c0: 0.0,
            c1: 2.0,
            c2: 0.0,
            c3: 0.0,
            epsilon: 0.1,
        }
    }

    /// mgDP coefficient set of the second experiment: c3 = c2 = 2, gamma = 2,
    /// c1 = c0 = alpha = 1.
    pub fn mgdp_example2() -> Self {
        Self {
            alpha: 1.0,
            gamma: 2.0,
            c0: 1.0,
            c1: 1.0,
            c2: 2.0,
            c3: 2.0,
            epsilon: 0.1,
        }
    }

    /// mgDP coefficient set of the third experiment: alpha = c1 = c3 = c2 = 1,
    /// gamma = c0 = 2.
    pub fn mgdp_example3() -> Self {
        Self {
            alpha: 1.0,
            gamma: 2.0,
            c0: 2.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            epsilon: 0.1,
        }
    }

    /// Nonlinear-dispersion shape exponent r = c3 / (c2 + c3).
    ///
    /// Requires `c2 + c3 > 0`; the pure-mKdV coefficient set (c2 = c3 = 0)
    /// has no profile exponent and uses the sech shape instead.
    pub fn shape_exponent(&self) -> Result<f64> {
        if self.c2 + self.c3 <= 0.0 {
            return Err(Error::InvalidParams(
                "r = c3/(c2+c3) requires c2 + c3 > 0".into(),
            ));
        }
        Ok(self.c3 / (self.c2 + self.c3))
    }

    /// True for the dispersion pattern of the exact-soliton mKdV case
    /// (alpha = c0 = c2 = c3 = 0).
    pub fn is_pure_mkdv(&self) -> bool {
        self.alpha == 0.0 && self.c0 == 0.0 && self.c2 == 0.0 && self.c3 == 0.0
    }
}
