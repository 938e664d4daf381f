//! Decide whether the statistics of local measurements on a bipartite quantum
//! state admit a local hidden variable (LHV) model, extract a Bell-inequality
//! certificate when they do not, and convert certificates into entanglement
//! witnesses.
//!
//! The pipeline, bottom to top:
//!
//! * [`qcore`]: dense complex matrices, Hermitian eigensystems, Kronecker
//!   products, partial trace/transpose, and the generalized Gell-Mann basis.
//! * [`states`]: reference states (singlet, Werner line, Tiles UPB state),
//!   seeded random states, and the PPT separability test.
//! * [`measurements`]: POVMs, measurement configurations, event vectors
//!   (joint + marginal outcome probabilities), the complete tomographic
//!   measurement set, and linear-inversion state reconstruction.
//! * [`lhvcone`]: the extremal generators of the LHV cone for a fixed
//!   configuration: every Boolean product assignment vector.
//! * [`certify`]: conic feasibility by phase-I simplex: is the event vector
//!   a nonnegative combination of generators? Infeasibility yields a
//!   separating (Farkas) vector, re-verified independently of the solver.
//!   Also a seeded derivative-free search over measurement angles.
//! * [`witness`]: the bridge between Farkas vectors and entanglement
//!   witnesses, the CHSH worked example, see-saw minimization over product
//!   states, and the reverse decomposition over a complete configuration.
//! * [`cli`]: the `bellcert` command-line front end with JSON I/O.
//!
//! Start with the runnable examples (`cargo run --example chsh_pipeline`)
//! for end-to-end walkthroughs of each capability.

pub mod certify;
pub mod cli;
pub mod lhvcone;
pub mod measurements;
mod optim;
pub mod qcore;
pub mod states;
pub mod witness;

pub use qcore::{ComplexMatrix, DensityMatrix, HermitianBasis, HermitianOperator, Side};
