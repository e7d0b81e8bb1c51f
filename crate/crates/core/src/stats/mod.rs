//! Numerical foundations shared by the detectors: special functions, t and F
//! quantiles, and the incremental sliding window.

mod dist;
mod special;
mod window;

pub use dist::{f_cdf, f_pdf, f_ppf, t_cdf, t_pdf, t_ppf};
pub use special::{ln_gamma, reg_incomplete_beta};
pub use window::{RollingWindow, SubWindowMoments};

pub(crate) use dist::{f_ppf_unchecked, t_ppf_unchecked};
