//! Computational toolkit for noncommutative domains `D_f^m`: weighted-shift
//! models on truncated Fock spaces, free power series, completely positive
//! defect maps, Berezin transforms and linear-biholomorphism certificates.

pub mod acceptance;
pub mod berezin;
pub mod cp_maps;
pub mod error;
pub mod fock_model;
pub mod io;
pub mod linalg;
pub mod rigidity;
pub mod sampling;
pub mod series;
pub mod tolerances;
pub mod tuple;
pub mod weights;
pub mod words;

pub use cp_maps::{membership, MembershipVerdict};
pub use error::{Error, Result};
pub use fock_model::{build_model, HereditaryTerm, TruncatedModel};
pub use series::{FreeSeries, PositiveRegularFunction};
pub use tuple::OperatorTuple;
pub use weights::{weights_direct, weights_oracle, WeightTable};
pub use words::{Word, WordIndex};
