//! Library surface behind the `iclt` binary: argument definitions, the
//! subcommand implementations, the line-record codec, and the verification
//! battery. Exposed as a library so integration tests can parse the
//! binary's output with the same codec that produced it.

pub mod args;
pub mod commands;
pub mod record;
pub mod verify;
