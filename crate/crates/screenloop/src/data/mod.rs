//! Data ingestion and preparation: file formats, corruption transforms, and
//! dataset splitting.

pub mod csvio;
pub mod idx;
pub mod split;
pub mod transforms;
