//! Canonical JSON: object keys sorted, compact separators, trailing newline.
//!
//! The CLI and the HTTP service both render through here so their outputs can
//! be compared byte for byte.

use serde::Serialize;

use crate::Result;

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // serde_json::Map is a BTreeMap unless `preserve_order` is enabled, so
    // going through Value sorts every object's keys.
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string(&value)?;
    out.push('\n');
    Ok(out)
}
