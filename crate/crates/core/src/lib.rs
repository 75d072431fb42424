pub mod ac;
pub mod bits;
pub mod channel;
pub mod detection;
pub mod error;
pub mod harness;
pub mod moac;
pub mod moapc;
pub mod prefix;
pub mod source;

pub use bits::BitString;
pub use channel::{ChannelParams, ChannelTrace};
pub use detection::{DetectionParams, MinRule};
pub use error::{Error, Result};
pub use harness::{Codec, ErrorReport, Scheme, SchemeStats};
pub use prefix::Codebook;
pub use source::{Alphabet, CumulativeModel, Symbol, WordInterval};
