mod certify;
mod grid;

pub use certify::{
    certify, grid_applicable, grid_cost, grid_value, CertTarget, AUTO_CERTIFY_DIMENSION, CERTIFY_TOLERANCE,
};
pub use grid::{
    compositions, grid_maximize, simplex_points, GridPoint, GridResult, GridSpec, DEFAULT_RESOLUTION, MAX_GRID_POINTS,
};
