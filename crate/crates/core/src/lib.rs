//! Curation and discovery over web archive collections.

pub mod clock;
pub mod config;
pub mod domain;
pub mod export;
pub mod fixtures;
pub mod ingest;
pub mod memento;
pub mod search;
pub mod service;
pub mod urlnorm;
