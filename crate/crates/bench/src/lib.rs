//! Shared fixtures for the benchmarks.

use fex_core::{
    build_peak, canonical_operator, difference_set, greedy_base_set, ExtensionOperator, GroupSpec,
    PeakFunction, PointSet,
};

pub struct Instance {
    pub spec: GroupSpec,
    pub points: PointSet,
    pub peak: PeakFunction,
}

impl Instance {
    pub fn new(factors: &[i64], points: &[usize]) -> Self {
        let spec = GroupSpec::new(factors).expect("valid factors");
        let points = PointSet::from_indices(&spec, points).expect("valid points");
        let base = greedy_base_set(&spec, &difference_set(&spec, &points));
        let peak = build_peak(&spec, &base).expect("greedy base set is valid");
        Self { spec, points, peak }
    }

    pub fn canonical(&self) -> ExtensionOperator {
        canonical_operator(&self.spec, &self.points, &self.peak).expect("peak is admissible")
    }
}
