//! External rays, wakes and rotation-number arithmetic for quadratic
//! polynomials `z ↦ z² + c` with an irrationally indifferent fixed point.
//!
//! The crate is organised bottom-up:
//!
//! * [`rotnum`]: continued fractions, arithmetic classes of rotation numbers
//!   and the critical-angle series.
//! * [`circle`]: exact arithmetic on the circle of external angles.
//! * [`quadmap`]: the quadratic family, fixed points and Green's function.
//! * [`raytrace`]: external rays and equipotentials by Böttcher pullback.
//! * [`wakes`]: ray pairs, wakes and the separation search.
//! * [`harness`]: experiments, Brolin-measure sampling and rendering.

pub mod circle;
pub mod error;
pub mod harness;
pub mod quadmap;
pub mod raytrace;
pub mod rotnum;
pub mod wakes;

mod par;

pub use circle::Angle;
pub use error::{Error, Result};
pub use quadmap::QuadraticMap;
pub use raytrace::{LandingEstimate, RayTrail, TraceConfig};
pub use rotnum::{AngleApproximation, ContinuedFraction};
pub use wakes::{RayPair, Wake};
