/*!
Laboratory for the colourability of random regular graphs.

The crate samples the configuration model and its planted variant, counts
colourings exactly on small instances, evaluates the rate functions of the
first and second moment method, explores the second-moment function over
doubly stochastic matrices, computes core and cluster geometry of planted
colourings, and tabulates the colourability thresholds. The
[`experiments`] module ties these together into seeded, reproducible runs.
*/

pub mod birkhoff;
pub mod clustergeo;
pub mod colorings;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod limits;
pub mod moments;
pub mod rng;
pub mod threshold;

pub use colorings::{Coloring, OverlapMatrix};
pub use error::{Error, Result, Violation};
pub use graphs::{CloneId, Configuration, CycleCensus, MultiGraph};
pub use limits::{OracleLimits, LIMITS};
pub use moments::{AdmissiblePair, CompatiblePair, Distribution};
pub use rng::{stream_rng, StreamRng};
