//! The Dirichlet heat semigroup on balls and its mass.

mod contour;
mod kernel;
mod mass;
mod operator;
mod stiff;
mod uniformization;
mod volume_series;

pub use kernel::{
    comparison_test, dirichlet_kernel, KernelComparison, SphereKernel, DEFAULT_KERNEL_CAP,
};
pub use mass::{
    dirichlet_mass, dirichlet_mass_operator, evolve, mass_limit, sphere_masses, survival,
    DoublingOptions, MassCurve, MassDiagnostics, MassOptions, MassRow, SolverChoice, SolverKind,
    DEFAULT_TIMES,
};
pub use operator::{
    build_decorated_operator, build_path_operator, build_radial_operator, family_operator,
    RadialOperator,
};
pub use volume_series::{decorated_volume_ratio_series, volume_ratio_series, VolumeRatioSeries};
