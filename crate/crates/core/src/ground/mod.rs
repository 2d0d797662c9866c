//! Ground sets, their codings by natural numbers, and descriptions of subsets.

pub mod descr;
pub mod finite;
pub mod sexpr;
pub mod shape;
pub mod space;

pub use descr::{member, members_below, PeriodicWord, SetDescription};
pub use finite::FiniteSet;
pub use space::{decode_binseq, encode_binseq, pair, unpair, Extension, GrowthVector, Point, Space, SpaceSeq};
