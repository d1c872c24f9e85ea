//! Self-guided smoothing filters as implicit graph-Laplacian operators, and
//! accelerated ways to iterate them.
//!
//! * [`filters`]: bilateral, guided and total-variation filters, each a
//!   [`Filter`] that binds a guidance signal `g` and applies `W(g)`.
//! * [`accel`]: repeated application, restarted PCG and Nesterov drivers,
//!   with work counted in basic-filter calls.
//! * [`bench`]: phantom, seeded noise, PSNR and scripted experiments.
//! * [`io`]: binary PGM and the text graph-signal format.
//!
//! ```
//! use graph_smooth::{accel, bench, filters::{Bilateral, BilateralParams}};
//!
//! let clean = bench::phantom(64).unwrap();
//! let noisy = bench::add_noise(&clean, &bench::NoiseSpec { seed: 7, ..Default::default() }).unwrap();
//! let filter = Bilateral::new(BilateralParams::default()).unwrap();
//! let report = accel::run_nesterov(&filter, &noisy, 5, Some(&clean)).unwrap();
//! assert_eq!(report.basic_filter_calls, 5);
//! assert!(report.final_psnr().unwrap() > bench::psnr_signals(&clean, &noisy, 1.0).unwrap());
//! ```

pub mod accel;
pub mod bench;
pub mod cli;
mod error;
pub mod filters;
pub mod io;
pub mod operator;
pub mod signal;

pub use error::{Error, Result};
pub use operator::{BoundFilter, Filter};
pub use signal::{dot, Edge, GraphTopology, Grid2D, Signal, Topology};
