//! Minimax-optimal linear-phase FIR equalizers for DAC reconstruction
//! pulses, across Nyquist bands 1-6, plus closed-form filter-order
//! estimation and minimax curve fitting of the estimate parameters.
//!
//! The crate is organized around the design pipeline:
//!
//! * [`pulses`] — the four DAC pulses (NRTZ, RTZ, RTC, RTCZ) and their
//!   frequency responses;
//! * [`fir`] — the four linear-phase filter types, zero-phase expansions,
//!   structural zeros and equalized-system delays;
//! * [`bands`] — Nyquist-band design intervals and frequency grids;
//! * [`mod@design`] — the minimax engines (Remez exchange and the
//!   LP-on-grid oracle) plus independent verification of the complex error;
//! * [`search`] — minimal-order search and resumable (B, delta) sweeps;
//! * [`estimate`] — the closed-form order estimates with the built-in
//!   published parameter table;
//! * [`fit`] — minimax curve fitting of estimate parameters to sweep data;
//! * [`io`] — filter/parameter JSON and sweep CSV formats.

pub mod bands;
pub mod design;
pub mod error;
pub mod estimate;
pub mod fir;
pub mod fit;
pub mod io;
pub mod pulses;
pub mod search;

pub use bands::{make_grid, BandSpec, FrequencyGrid};
pub use design::{
    design, design_lp, design_remez, reduce_to_chebyshev, verify_design, DesignProblem,
    DesignResult, Engine, EngineOptions,
};
pub use error::{Error, Result};
pub use estimate::{basic_estimate, builtin_params, estimate_order, EstimateParams};
pub use fir::{compatible, delay_k, multiplier_count, Delay, FirFilter, LinearPhaseType};
pub use pulses::PulseKind;
pub use search::{minimal_order, sweep, OrderSpec, SweepConfig, SweepGrid};
