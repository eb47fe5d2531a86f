use crate::graph::{Exposome, ExposomeParams};
use crate::synth::nodes_from_corteges;

pub fn graph_from_corteges(corteges: &[&[&str]]) -> Exposome {
    Exposome::build(&nodes_from_corteges(corteges), ExposomeParams::default()).unwrap()
}
