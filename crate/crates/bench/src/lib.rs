//! Benchmark fixtures shared by the criterion benches.

use shapedrm_core::{EntryDistribution, EntryKind, Partition, ShapedMatrix, StreamId};

/// One draw of the block-shaped matrix `N·staircase(r)` with complex
/// Gaussian entries.
pub fn block_sample(r: usize, n: usize, seed: u64) -> ShapedMatrix {
    let shape = Partition::staircase(r)
        .and_then(|p| p.dilate(n))
        .expect("valid shape");
    shapedrm_core::sample_shaped(
        &shape,
        &EntryDistribution::new(EntryKind::ComplexGaussian),
        StreamId::new(seed, 0),
    )
    .expect("sampling succeeds")
}
