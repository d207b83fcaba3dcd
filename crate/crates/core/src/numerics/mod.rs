//! Dense numerical kernels shared by the scattering solvers.

pub mod diff;
pub mod grid;
pub mod interp;
pub mod lstsq;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use diff::differentiate;
pub use faer::{Mat, MatRef};
pub use grid::{ComplexSamples, UniformGrid};
pub use lstsq::{
    constrained_least_squares_solve, least_squares_solve, nested_least_squares, tall_least_squares_solve,
    LeastSquaresSolution,
};
pub use ode::{integrate_linear_ode2, Direction, OdeSolution};
pub use quadrature::{cumulative_integral_from_left, cumulative_integral_from_right, integral};
pub use roots::polynomial_roots;
