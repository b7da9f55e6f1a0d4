//! Exact set algebra over a finite field: sumsets, productsets, ratio and
//! quotient sets, energies and the slope decomposition of `A x A`.

mod energy;
mod fset;
mod ops;

pub use energy::{
    additive_energy, additive_energy_quadruples, multiplicative_energy,
    multiplicative_energy_quadruples, slope_decomposition, EnergyKind, EnergyReport,
    SlopeDecomposition, QUADRUPLE_ORACLE_LIMIT,
};
pub use fset::{FSet, SetExport};
pub use ops::{
    combine, difference_set, dilate, kfold_sum, productset, quotient_set, quotient_witness, ratio_set, sumset,
    translate, CombineKind,
};
