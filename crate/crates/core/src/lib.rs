//! The extended nu-metric for stabilizable SISO plants over H-infinity.
//!
//! Plants are rational transfer functions, optionally multiplied by a
//! dead-time factor `exp(-sT)`, read on the unit disk through the Cayley
//! map. The crate provides normalized coprime factorization, winding and
//! Toeplitz indices, the annulus metrics `d_nu^rho` and their limit
//! `d_nu^inf`, the classical unit-circle metric, and closed-loop stability
//! margins.
//!
//! ```
//! use nu_metric::{nu_infinity, AnnulusScan, TransferFunction};
//!
//! let p1 = TransferFunction::rational(&[0.0, 1.0], &[-1.0, 1.0])?.with_delay(1.0)?;
//! let p2 = TransferFunction::rational(&[0.0, 1.0], &[-2.0, 1.0])?.with_delay(1.0)?;
//! let scan = AnnulusScan::dyadic(3, 10, 512, 1e-9, 3)?;
//! let d = nu_infinity(&p1, &p2, &scan)?;
//! assert!((d.value - 1.0 / (3.0 * 2f64.sqrt())).abs() < 1e-4);
//! # Ok::<(), nu_metric::NuError>(())
//! ```

pub mod cli;
pub mod error;
pub mod factorization;
pub mod index;
pub mod numetric;
pub mod poly;
pub mod stability;
pub mod transfer;

pub use error::{NuError, Result};
pub use factorization::{graph_symbols, normalize, spectral_factor, CoprimeFactors, GraphSymbol, TfMatrix};
pub use index::{annulus_index, circle_winding, fredholm_index_toeplitz, winding_number, FredholmVerdict};
pub use numetric::{
    condition_c, nu_classical, nu_infinity, nu_rho, sup_norm, AnnulusScan, NuMetricResult, PlantInput,
    ToGraphSymbol,
};
pub use poly::Poly;
pub use stability::{closed_loop, is_stabilized, margin, robustness_check, ClosedLoop, MarginResult};
pub use transfer::{cayley, inverse_cayley, CircleSampling, Domain, TransferFunction};
