//! Session service, HTTP front end and command-line driver for the
//! dots-polygons engines.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod http;
pub mod service;

pub use error::ServiceError;
pub use game::{AiPolicy, Game, Move};
pub use service::{CreateConfig, Service, ServiceConfig};
