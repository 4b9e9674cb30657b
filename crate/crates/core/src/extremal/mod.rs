// SPDX-License-Identifier: Apache-2.0

//! Extremal machinery: exhaustive scans of `f(f(n))`, minimal preimages and
//! their structure checks, the two auxiliary inequalities, the series constant
//! `C_g` and the explicit witness construction.

pub mod bounds;
pub mod constant;
pub mod preimage;
pub mod scan;
pub mod witness;

pub use bounds::{cs_bound, cs_bound_with, omega_bound_diagnostic, CsBound, OmegaBound};
pub use constant::{constant_c, partial_sum, SeriesConstant};
pub use preimage::{
    check_preimage_structure, cmp_factored, min_preimage, preimage_table, MinPreimage,
    PreimageStructureReport, DEFAULT_PARTITION_BUDGET,
};
pub use scan::{scan_max, MaxRecord, ScanOptions, DEFAULT_SCAN_CAP};
pub use witness::{block_exponents, build_witness, y_closed_form, ExtremalWitness};
