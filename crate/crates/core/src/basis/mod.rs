//! Conversion between spherical-harmonic coefficients and 2D Fourier
//! coefficients on the torus.

pub mod cache;
mod fourier;
mod table;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub use fourier::FourierCoeffs2D;
pub(crate) use table::fourier_to_sh_masked;
pub use table::{
    build_conversion_table, fourier_to_sh, fourier_to_sh_counted, sh_to_fourier, sh_to_fourier_counted,
    sh_to_fourier_sparse_filter, sh_to_fourier_sparse_filter_counted, ConversionTable, TableEntry, IMAG_RESIDUE_LIMIT,
    MAX_INPUT_DEGREE, MAX_TABLE_DEGREE, PRUNE_THRESHOLD,
};

use crate::error::Result;

fn registry() -> &'static RwLock<HashMap<usize, Arc<ConversionTable>>> {
    static R: OnceLock<RwLock<HashMap<usize, Arc<ConversionTable>>>> = OnceLock::new();
    R.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The process-wide table of degree `lmax`, built on first use.
///
/// Concurrent first calls may each build the table; the contents are
/// deterministic so whichever insert lands is equivalent.
pub fn conversion_table(lmax: usize) -> Result<Arc<ConversionTable>> {
    if let Some(t) = lookup_table(lmax) {
        return Ok(t);
    }
    let t = build_conversion_table(lmax)?;
    Ok(install_table(t))
}

pub fn lookup_table(lmax: usize) -> Option<Arc<ConversionTable>> {
    registry().read().expect("table registry poisoned").get(&lmax).cloned()
}

/// Makes `t` the process-wide table for its degree, replacing any previous one.
pub fn install_table(t: ConversionTable) -> Arc<ConversionTable> {
    let t = Arc::new(t);
    registry().write().expect("table registry poisoned").insert(t.lmax(), Arc::clone(&t));
    t
}
