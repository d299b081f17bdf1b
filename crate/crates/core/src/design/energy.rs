use crate::error::{Error, Result};
use crate::gait::{positive_work, GaitProfile, SimulationTrace};

/// Push-off energy split between the natural ankle and the DF springs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub natural_pushoff_energy: f64,
    pub df_released_energy: f64,
    /// `max(0, natural − df)`, J.
    pub deficit: f64,
    pub ees_required_stroke: f64,
    /// Spring rate that stores `deficit` over `ees_required_stroke`, N/m.
    pub ees_required_k: f64,
}

impl EnergyBudget {
    pub fn from_energies(natural: f64, df: f64, stroke: f64) -> Result<Self> {
        if !(stroke > 0.0) {
            return Err(Error::Domain(format!("stroke must be positive, got {stroke}")));
        }
        let deficit = (natural - df).max(0.0);
        Ok(Self {
            natural_pushoff_energy: natural,
            df_released_energy: df,
            deficit,
            ees_required_stroke: stroke,
            ees_required_k: 2.0 * deficit / (stroke * stroke),
        })
    }
}

/// Positive push-off work of the natural ankle minus what the DF springs
/// release over the same window of `df_trace`.
pub fn ees_energy_budget(natural: &GaitProfile, df_trace: &SimulationTrace, stroke: f64) -> Result<EnergyBudget> {
    let idx: Vec<usize> = df_trace.pushoff_indices().collect();
    if idx.len() < 2 {
        return Err(Error::Grid("push-off window has fewer than two grid points".into()));
    }
    let splines = natural.splines()?;
    let nat: Vec<f64> = idx
        .iter()
        .map(|&i| splines.power.eval(df_trace.grid[i]))
        .collect::<Result<_>>()?;
    let df: Vec<f64> = idx
        .iter()
        .map(|&i| df_trace.torque_df[i] * df_trace.omega[i])
        .collect();
    let dt = df_trace.dt();
    EnergyBudget::from_energies(positive_work(&nat, dt), positive_work(&df, dt), stroke)
}

/// Battery pack of identical cells in series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySpec {
    pub cell_voltage_nominal: f64,
    /// Ah.
    pub cell_capacity: f64,
    pub cells_in_series: u32,
    /// kg.
    pub cell_mass: f64,
}

impl BatterySpec {
    /// Eight 3.7 V, 4.2 Ah lithium-ion cells. The cell mass is a typical
    /// catalogue value, not a measured one.
    pub const REFERENCE: BatterySpec = BatterySpec {
        cell_voltage_nominal: 3.7,
        cell_capacity: 4.2,
        cells_in_series: 8,
        cell_mass: 0.068,
    };

    pub fn validate(&self) -> Result<()> {
        if self.cell_voltage_nominal > 0.0 && self.cell_capacity > 0.0 && self.cells_in_series > 0 && self.cell_mass > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("battery spec fields must be positive: {self:?}")))
        }
    }

    pub fn pack_voltage(&self) -> f64 {
        self.cells_in_series as f64 * self.cell_voltage_nominal
    }

    pub fn pack_mass(&self) -> f64 {
        self.cells_in_series as f64 * self.cell_mass
    }

    /// Series cells share one capacity.
    pub fn is_sufficient(&self, required_ah: f64) -> bool {
        self.cell_capacity >= required_ah
    }
}

/// Charge needed for `steps` strides at `energy_per_step` J each, Ah.
pub fn battery_capacity(energy_per_step: f64, steps: f64, nominal_voltage: f64) -> Result<f64> {
    if !(energy_per_step >= 0.0 && steps >= 0.0 && energy_per_step.is_finite() && steps.is_finite()) {
        return Err(Error::Domain("energy and step count must be finite and >= 0".into()));
    }
    if !(nominal_voltage > 0.0) {
        return Err(Error::Domain(format!("voltage must be positive, got {nominal_voltage}")));
    }
    Ok(energy_per_step * steps / 3600.0 / nominal_voltage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_arithmetic() {
        let b = EnergyBudget::from_energies(10.0, 5.5, 0.020).unwrap();
        assert!((b.deficit - 4.5).abs() < 1e-12);
        assert!((b.ees_required_k - 22_500.0).abs() < 1e-6);
        let b = EnergyBudget::from_energies(4.0, 6.0, 0.020).unwrap();
        assert_eq!((b.deficit, b.ees_required_k), (0.0, 0.0));
    }

    #[test]
    fn battery_examples() {
        let ah = battery_capacity(10.0, 5000.0, 24.0).unwrap();
        assert!((ah - 50_000.0 / 3600.0 / 24.0).abs() < 1e-12);
        assert_eq!(battery_capacity(10.0, 0.0, 24.0).unwrap(), 0.0);
        assert!(BatterySpec::REFERENCE.is_sufficient(ah));
        assert!((BatterySpec::REFERENCE.pack_voltage() - 29.6).abs() < 1e-12);
        assert!(battery_capacity(10.0, 1.0, 0.0).is_err());
    }
}
