//! Channel documents in and result artifacts out.

mod channel_file;
mod output;

pub(crate) use channel_file::{context, json_error};
pub use channel_file::{
    load_channel_file, matrix_from_doc, matrix_to_doc, parse_channel_spec, state_from_doc,
    BasisDoc, ChannelDocument, DimsDoc, MarkovDoc, MatrixDoc, StateDoc,
};
pub use output::{format_number, json_bytes, ArtifactSet, Cell, CsvTable, CSV_SIGNIFICANT_DIGITS};
