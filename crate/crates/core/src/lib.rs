//! Inverse kinematics of 2RP3R, 2R2P2R, 3RP2R and 6R serial manipulators.
//!
//! Poses are points of the Study quadric in P⁷. The left and right three-joint
//! workspaces are each contained in a one-parameter family of linear 3-spaces;
//! stacking one family from each side gives a point `P(u, w)`, and intersecting
//! with the quadric reduces the problem to two bivariate polynomials that are
//! solved by elimination.
//!
//! ```
//! use ik6rp::{ChainSpec, JointVector, SolverOptions};
//!
//! let chain = ChainSpec::from_table(&[
//!     ('R', None, Some(0.0), 0.1, 90.0),
//!     ('R', None, Some(0.0), -0.425, 0.0),
//!     ('P', Some(0.0), None, -0.39225, 0.0),
//!     ('R', None, Some(0.10915), 0.01, 90.0),
//!     ('R', None, Some(0.09465), 0.0, -90.0),
//!     ('R', None, Some(0.0), 0.0, 0.0),
//! ])
//! .unwrap();
//! let q = JointVector::from_external(&chain, [60.0, -70.0, -0.2, 40.0, 19.0, 67.0]).unwrap();
//! let pose = ik6rp::forward_kinematics(&chain, &q);
//! let out = ik6rp::solve_ik(&chain, &pose, &SolverOptions::default()).unwrap();
//! assert_eq!(out.solutions.len(), 4);
//! ```

pub mod chain;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod quat;
pub mod scalar;
pub mod solver;
pub mod spaces;

pub use chain::{forward_kinematics, right_chain_pose, ChainError, ChainSpec, DhRow, JointType, JointVector, Pattern};
pub use linalg::Matrix;
pub use poly::{Poly1, Poly2, PolyError};
pub use quat::{DualQuaternion, QuatError, Quaternion, StudyPoint};
pub use scalar::{Ring, Scalar};
pub use solver::{solve_ik, IkOutput, IkSolution, SolveMeta, SolverError, SolverOptions};
pub use spaces::{LinearSpaceFamily, ParamLinearForm, SpaceError};

/// Double-precision quaternion.
pub type Quat = Quaternion<f64>;
/// Double-precision dual quaternion.
pub type DualQuat = DualQuaternion<f64>;
/// Double-precision Study point.
pub type Study = StudyPoint<f64>;
/// Double-precision chain description.
pub type Chain = ChainSpec<f64>;
/// Double-precision joint vector.
pub type Joints = JointVector<f64>;
/// Double-precision univariate polynomial.
pub type Poly1f = Poly1<f64>;
/// Double-precision bivariate polynomial.
pub type Poly2f = Poly2<f64>;
/// Double-precision solver result.
pub type Solution = IkSolution<f64>;
