//! Fixtures shared by the benchmarks.

use latsample_core::topology::synthetic::{metro, MetroParams};
use latsample_core::{PathDelayModel, Topology};

pub fn blue() -> PathDelayModel {
    PathDelayModel::equal_stages(44.0, 19.0, 3).expect("valid model")
}

pub fn green() -> PathDelayModel {
    PathDelayModel::equal_stages(68.0, 5.0, 4).expect("valid model")
}

/// Six distinct stages, the worst case for the CDF.
pub fn mixed() -> PathDelayModel {
    PathDelayModel::new(30.0, vec![1.2, 2.5, 3.1, 4.8, 6.0, 7.7]).expect("valid model")
}

pub fn metro_topology() -> Topology {
    metro(&MetroParams::default())
}
