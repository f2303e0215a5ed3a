//! Versioned JSON witnesses and their re-validators.

use crate::measure::{rat_string, Rat};
use serde::Serializer;

/// Version stamp of the witness JSON schema.
pub const SCHEMA_VERSION: u32 = 1;

/// Serialize a rational as the string `"p/q"`.
pub fn ser_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

/// Serialize an optional rational as an optional `"p/q"` string.
pub fn ser_rat_opt<S: Serializer>(
    r: &Option<Rat>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&rat_string(r)),
        None => s.serialize_none(),
    }
}
