//! Independent reference implementations and seeded fixtures shared by the
//! integration and acceptance tests.

pub mod disk;
pub mod fixtures;
pub mod oracle;

pub use disk::*;
pub use fixtures::*;
pub use oracle::*;
