//! Graph model, file formats, structural analysis, layout and collection
//! generators for the open graph archive.

pub mod analysis;
pub mod formats;
pub mod generators;
pub mod layout;
pub mod metadata;
pub mod model;

pub use formats::{FormatError, FormatId, LossKind, LossReport};
pub use metadata::Metadata;
pub use model::{Graph, ModelError};
