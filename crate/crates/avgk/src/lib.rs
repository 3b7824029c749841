//! File formats and process-level plumbing around [`avgk_core`].
//!
//! The core crate is pure computation; everything that touches the file
//! system or a serialization format lives here:
//!
//! - scores CSV: no header, one row per sample, comma-separated decimal
//!   fields, `.` decimal separator, optional whitespace around fields;
//! - labels: one base-10 class index per line (0-based);
//! - set output: one line per sample of semicolon-separated ascending class
//!   indices (an empty line is an empty set), or an `N x C` 0/1 CSV mask;
//! - distribution JSON: `{"n_classes": C, "zones": [{"weight": w, "eta":
//!   [...]}]}`;
//! - noise groups JSON: `{"groups": [[0, 1], [2, 3, 4]]}`.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! identical bits, so a save/load round trip is exact.

pub mod io;

pub use avgk_core as core;
