//! Command implementations behind the `maxdet` binary.

pub mod commands;
pub mod manifest;
pub mod verify;
