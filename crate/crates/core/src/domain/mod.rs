//! Groups, resources, annotations, memberships and the activity log, kept in
//! an embedded transactional store.

pub mod curation;
pub mod error;
pub mod model;
mod state;
pub mod store;

pub use curation::*;
pub use error::DomainError;
pub use model::*;
pub use store::{IndexEvent, Store, StoreOptions, SCHEMA_VERSION};
