//! Chirp excitation and second-order transfer-function identification.

mod chirp;
mod fit;
mod signal;
mod tf;

pub use chirp::{chirp_generate, chirp_phase, instantaneous_frequency, ChirpSpec};
pub use fit::{fit_percent, fit_second_order, FitReport, MIN_FIT_SAMPLES};
pub use signal::{add_white_noise, io_from_csv_str, io_to_csv, Signal, IO_CSV_HEADER, SIGNAL_CSV_HEADER};
pub use tf::{tf_simulate, DiscreteTf, SecondOrderTf};
