//! File formats: binary PGM images and plain-text graph signals.

mod gsig;
mod pgm;

pub use gsig::{decode_graph_signal, encode_graph_signal, read_graph_signal, write_graph_signal};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, PgmImage};
