//! Gait-cycle simulation against natural ankle reference data.

mod akima;
mod metrics;
mod profile;
mod sim;

pub use akima::{akima_build, akima_eval, AkimaSpline, MIN_KNOTS};
pub use metrics::{compare, energy, pearson, positive_work, power_profile, ComparisonMetrics, Peak, Series};
pub use profile::{
    angular_velocity, scan_gait_csv, GaitProfile, GaitRow, GaitSample, ProfileSplines, Speed,
    FAST_WALK_CSV, GAIT_CSV_HEADER, MIN_SAMPLES, NORMAL_WALK_CSV, REFERENCE_BODY_MASS,
};
pub(crate) use profile::golden_min;
pub use sim::{
    percent_grid, simulate_gait_cycle, ResolvedSchedule, Schedule, SimulationTrace, SourceEnergies,
    DEFAULT_GRID_STEP,
};
