//! Library surface of the `gearforge` command: the document language, the
//! per-kind builder registry, and the subcommand orchestration. The binary
//! in `main.rs` is a thin argument-parsing shell over [`run`].

pub mod dsl;
pub mod registry;
pub mod run;
