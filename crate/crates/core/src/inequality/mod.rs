//! The inequality lab: exact admissibility checks on rational parameters and
//! numerical measurement of the ratios the inequalities bound.

pub mod compact;
pub mod conditions;
pub mod measure;
pub mod params;

pub use conditions::{check_conditions, Admissibility};
pub use measure::{default_family, measure_ratio, measure_ratio_unchecked, MeasureOptions, RatioReport, Sample, SampleFlag};
pub use params::{Exponent, ParamSet, TheoremId};
