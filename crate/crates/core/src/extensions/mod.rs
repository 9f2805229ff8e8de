//! Output variants built on the suffix method: maximal and closed n-grams,
//! and per-year time series instead of plain counts.

pub mod maximal;
pub mod timeseries;

pub use maximal::{reverse_post_filter, run_suffix_sigma_filtered, FilterMode, PrefixFilter};
pub use timeseries::{run_suffix_sigma_timeseries, TimeSeries};
