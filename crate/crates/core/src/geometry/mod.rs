//! Domains, meshes and quadrature.

mod domain;
mod mesh;
mod quadrature;

pub use domain::{norm2, sphere_area, sphere_lp_moment, CompactSet, Domain};
pub use mesh::{build_disk_mesh, build_interval_mesh, inscribed_polygon_area, Grading, Mesh};
pub use quadrature::{
    cell_points, gauss_legendre, integrate, integrate_checked, integrate_radial, QuadratureRule, RadialIntegral, DEFAULT_ORDER,
};
