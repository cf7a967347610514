//! Command-line front end, plan files, the BFS oracle and the bundled suite.

pub mod bfs;
pub mod cli;
pub mod config;
pub mod planfile;
pub mod suite;
