//! Baseline detectors: ADWIN, DDM, EDDM, STEPD and ECDD.

pub mod adwin;
pub mod ddm;
pub mod ecdd;
pub mod eddm;
pub mod stepd;

pub use adwin::{Adwin, AdwinConfig};
pub use ddm::{Ddm, DdmConfig};
pub use ecdd::{calibrated_grid, Calibration, ControlLimitGrid, Ecdd, EcddConfig};
pub use eddm::{Eddm, EddmConfig};
pub use stepd::{Stepd, StepdConfig};
