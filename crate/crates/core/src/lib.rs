//! Switch-level construction, verification and benchmarking of binary,
//! ternary and quaternary CNTFET full adders and carry-propagate adders.
//!
//! The device and analysis math is generic over [`Scalar`] (`f32`/`f64`);
//! the aliases at the crate root fix it to `f64`.

pub mod adders;
pub mod analysis;
pub mod device;
pub mod gates;
pub mod logic;
pub mod netlist;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

/// Timing model evaluated in `f64`.
pub type Timing = analysis::TimingModel<f64>;
/// Benchmark row evaluated in `f64`.
pub type Report = analysis::BenchReport<f64>;
/// Delay quadruple evaluated in `f64`.
pub type DelaySet = analysis::Delays<f64>;
/// Load sweep evaluated in `f64`.
pub type LoadSweep = analysis::Sweep<f64>;
/// Device calibration evaluated in `f64`.
pub type Calibration = device::DeviceCalibration<f64>;
