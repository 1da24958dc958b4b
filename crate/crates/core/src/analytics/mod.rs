//! Exact spacing densities of the rank-one ensemble.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod finite;
pub mod kernel;

pub use finite::{
    expanded_denominator, expanded_numerator, finite_n_densities, finite_n_f, gap_probability, numerator_pieces,
    FPieces, FVariant, GapProbability,
};
pub use kernel::{
    build_workspace, curves, densities_signed, evaluate, p_ex_exact, p_gue_exact, p_in_exact, p_zero_closed_form,
    uniform_grid, CurvePoint, KernelWorkspace, DEFAULT_N,
};

/// Gap intervals `[eps_min, eps_max]` and `[lamb_min, lamb_max]` in phase units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct GapBounds {
    pub eps_min: f64,
    pub eps_max: f64,
    pub lamb_min: f64,
    pub lamb_max: f64,
}

impl GapBounds {
    pub fn new(eps_min: f64, eps_max: f64, lamb_min: f64, lamb_max: f64) -> Result<Self> {
        let b = Self { eps_min, eps_max, lamb_min, lamb_max };
        b.validate()?;
        Ok(b)
    }

    /// The same interval `[−h, h]` for both species.
    pub fn symmetric(h: f64) -> Result<Self> {
        Self::new(-h, h, -h, h)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_min, self.eps_max, self.lamb_min, self.lamb_max];
        if all.iter().any(|x| !x.is_finite()) || self.eps_min > self.eps_max || self.lamb_min > self.lamb_max {
            return Err(Error::InvalidParameter(format!("bad gap bounds {self:?}")));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.eps_min == self.eps_max && self.lamb_min == self.lamb_max
    }

    /// Whether the two spectra leave both intervals empty.
    pub fn is_gap(&self, eps: &[f64], lambdas: &[f64]) -> bool {
        eps.iter().all(|&e| !(e > self.eps_min && e < self.eps_max))
            && lambdas.iter().all(|&l| !(l > self.lamb_min && l < self.lamb_max))
    }
}
