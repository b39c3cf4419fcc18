use crate::symbolic::{GenPoly, RationalExpr};

use super::{ModelError, ThermoModel};

/// State functions derived from the fundamental equation, all symbolic.
#[derive(Clone, Debug)]
pub struct ThermoQuantities {
    /// `T = ∂M/∂E^1`
    pub temperature: GenPoly,
    /// `∂M/∂E^a` for the remaining variables, in order (`Φ_e`, then `L` when `l` is variable).
    pub conjugates: Vec<GenPoly>,
    /// `C = M_{,1} / M_{,11}` at fixed remaining variables.
    pub heat_capacity: RationalExpr,
    /// `f = Σ_a E^a ∂M/∂E^a`
    pub conformal_factor: GenPoly,
    /// Row-major Hessian of `M`.
    pub hessian: Vec<GenPoly>,
}

impl ThermoQuantities {
    pub fn phi(&self) -> Option<&GenPoly> {
        self.conjugates.first()
    }

    pub fn l_dual(&self) -> Option<&GenPoly> {
        self.conjugates.get(1)
    }

    /// Unfolded denominator of the heat capacity, `∂²M/∂(E^1)²`.
    pub fn heat_capacity_denominator(&self) -> &GenPoly {
        &self.hessian[0]
    }
}

pub fn thermo_quantities(model: &ThermoModel) -> Result<ThermoQuantities, ModelError> {
    let m = model.potential();
    let n = model.dim();
    let temperature = m.diff_index(0);
    let conjugates = (1..n).map(|a| m.diff_index(a)).collect();
    let hessian = model.hessian();
    if hessian[0].is_zero() {
        return Err(ModelError::UndefinedHeatCapacity);
    }
    let heat_capacity = RationalExpr::new(temperature.clone(), hessian[0].clone())?;
    Ok(ThermoQuantities { temperature, conjugates, heat_capacity, conformal_factor: m.euler(), hessian })
}
