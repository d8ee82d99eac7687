//! File formats: scenario input, JSON reports and SVG figures.

pub mod report;
pub mod scenario;
pub mod svg;
