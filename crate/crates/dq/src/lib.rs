//! File formats, directory persistence and the `dq` command line on top of
//! [`dq_core`].

pub mod cli;
pub mod nquads;
pub mod report_csv;
pub mod scenario_file;
pub mod store_dir;
