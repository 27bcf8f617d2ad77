use crate::graph::NodeId;

/// Which decision a tape value feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Stream {
    /// ICM test of one incoming recommendation
    Accept = 1,
    /// LTM threshold, drawn once per node
    Threshold = 2,
    /// choice of the cashback recipient
    Cashback = 3,
}

/// Pre-drawn uniform randomness, addressable by
/// `(trial, node, stream, event)`.
///
/// Values are a pure function of the indices, so a replay under an edited
/// strategy sees exactly the same thresholds, in any evaluation order and on
/// any thread.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThresholdTape {
    master: u64,
}

impl ThresholdTape {
    pub fn new(master_seed: u64) -> Self {
        ThresholdTape {
            master: master_seed,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    /// An unrelated tape derived from this one, e.g. for a new search pass.
    pub fn rotated(&self, round: u64) -> Self {
        ThresholdTape {
            master: splitmix(self.master ^ splitmix(round.wrapping_add(0x5eed))),
        }
    }

    /// Uniform value in `[0, 1)`.
    pub fn uniform(&self, trial: u64, node: NodeId, stream: Stream, event: u32) -> f64 {
        let mut h = splitmix(self.master);
        h = splitmix(h ^ trial);
        h = splitmix(h ^ node as u64);
        h = splitmix(h ^ ((stream as u64) << 32 | event as u64));
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// The splitmix64 finalizer.
fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
