//! HTTP service, event-log persistence and admin CLI for the podium
//! practice platform.

pub mod api;
pub mod app;
pub mod cli;
pub mod store;

pub use app::{Clock, Service, ServiceOptions, VideoStatus};
pub use store::DataDir;
