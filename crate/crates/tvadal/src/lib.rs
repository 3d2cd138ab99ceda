//! File formats, synthetic test images, the iteration-count benchmark and
//! the command-line front end for [`tvadal_core`].

pub mod bench;
pub mod cli;
pub mod pgm;
pub mod synth;
pub mod trace_csv;
