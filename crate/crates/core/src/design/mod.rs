//! Parameter fitting and energy sizing.

mod calibrate;
mod curve;
mod energy;
mod pipeline;
mod spring_fit;

pub use calibrate::{
    calibrate_geometry, geometry_from_params, params_of, CalibrationBounds, CalibrationResult,
    PARAM_NAMES, RESTARTS,
};
pub use curve::{derive_force_deflection, ForceDeflectionCurve};
pub use energy::{battery_capacity, ees_energy_budget, BatterySpec, EnergyBudget};
pub use pipeline::{synthesize_design, torque_nrmse, AnkleDesign, DesignInputs, EesTemplate};
pub use spring_fit::{
    fit_nrmse_percent, fit_parallel_springs, fit_parallel_springs_seeded, MIN_FIT_POINTS,
    OFFSET_CANDIDATES, SOLID_MARGIN,
};
