//! Optimal covariant `N -> M` broadcasting of mixed qubit states.
//!
//! Given `N` copies of a qubit with Bloch length `r`, the channels built here
//! produce `M` output qubits whose single-site Bloch vector is `p(r) * r`.
//! Whenever `p(r) > 1` the channel broadcasts and purifies at once
//! (superbroadcasting). Two covariance classes are covered:
//!
//! * [`universal`]: covariant under all of SU(2);
//! * [`phase`]: covariant under rotations about `z`, for equatorial inputs.
//!
//! Supporting modules provide the angular-momentum kernel ([`spin`]), the
//! block structure of `rho^{(x)N}` ([`product_state`]), partial traces of
//! symmetric states ([`reduced`]), two-qubit entanglement ([`entanglement`]),
//! threshold scans ([`thresholds`]) and a brute-force Choi-operator
//! [`oracle`] that checks every closed form at small sizes.
//!
//! ```
//! use superbroadcast::universal;
//!
//! // 4 -> 5 universal broadcasting purifies inputs with r below ~0.787
//! let p = universal::scaling_factor(4, 5, 0.5).unwrap();
//! assert!(p > 1.0);
//! let p = universal::scaling_factor(4, 5, 0.9).unwrap();
//! assert!(p < 1.0);
//! ```

pub mod entanglement;
pub mod error;
pub mod oracle;
pub mod phase;
pub mod product_state;
pub mod reduced;
pub mod spin;
pub mod thresholds;
pub mod universal;

pub use error::{Error, Result};
pub use product_state::{Axis, BlochQubit};
pub use spin::Spin;
pub use thresholds::{Family, Outputs};

// Every chapter of the guide is compiled and run as a doctest.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spin-algebra.md")]
    mod spin_algebra {}
    #[doc = include_str!("../../../book/src/product-states.md")]
    mod product_states {}
    #[doc = include_str!("../../../book/src/universal.md")]
    mod universal {}
    #[doc = include_str!("../../../book/src/phase-covariant.md")]
    mod phase_covariant {}
    #[doc = include_str!("../../../book/src/reduced-states.md")]
    mod reduced_states {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
