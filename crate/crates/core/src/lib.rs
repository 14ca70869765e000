//! Low-spread arrangements of integers in k-dimensional matrices, the index
//! assignments of multiple-description scalar quantizers.
//!
//! An [`Arrangement`] places `0..m` in the cells of a [`Shape`]. Sending a
//! value over `k` channels means sending its coordinates; when some channels
//! fail, the receiver only knows the slice through the surviving
//! coordinates, and the worst-case error is that slice's spread.
//!
//! ```
//! use spreadlab::{herringbone_merge, max_spread, merge_upper_bound};
//!
//! let a = herringbone_merge(3, 2).unwrap();
//! assert_eq!(max_spread(&a, 1).unwrap().max_spread, 5);
//! assert_eq!(merge_upper_bound(3, 2).unwrap(), 5);
//! ```

pub mod arrangement;
pub mod bounds;
pub mod diagonal;
pub mod error;
pub mod exec;
pub mod herringbone;
pub mod merge;
pub mod oracle;
pub mod shape;
pub mod sim;
pub mod spread;

pub use arrangement::Arrangement;
pub use bounds::{
    corner, crude_smalls_bound, exact_pairing_lb, merge_upper_bound, multi_failure_spread,
    theorem1_lower_bound, BoundsReport,
};
pub use diagonal::{blocked_diagonal, diagonal_in_cube, infinite_diagonal_window, DiagonalSpec};
pub use error::{Error, Result};
pub use exec::Exec;
pub use herringbone::{
    hb_closed_form, hb_max_arrangement, hb_min_central_line, herringbone_recursive,
    HerringboneSpec, Orientation,
};
pub use merge::{herringbone_merge, merge_spread_check, MergeLayout};
pub use oracle::{brute_force_optimal, verify_smalls_dominance, SearchConfig, SearchMode};
pub use shape::{Shape, SliceSpec};
pub use sim::{decode, distortion_profile, encode, simulate, ChannelSystem, FailurePattern};
pub use spread::{
    bigs_sequence, is_monotonic, make_monotonic, max_spread, max_spread_with, pairing_bound,
    slice_spread, smalls_sequence, SpreadReport,
};
