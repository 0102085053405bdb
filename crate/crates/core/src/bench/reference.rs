//! Published convergence factors used as the comparison column of the tables.

/// One published cell: `None` marks a cell reported as non-convergent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceCell {
    pub n: usize,
    pub n_c: usize,
    pub rho: Option<f64>,
}

const fn cell(n: usize, n_c: usize, rho: f64) -> ReferenceCell {
    ReferenceCell {
        n,
        n_c,
        rho: Some(rho),
    }
}

const fn nc(n: usize, n_c: usize) -> ReferenceCell {
    ReferenceCell { n, n_c, rho: None }
}

/// LFA two-grid factors for GS-LEX with full weighting, indexed by `nu - 1`.
pub const RHO_LOC: [f64; 4] = [0.400, 0.193, 0.119, 0.084];

/// Circle, lambda = 0. Columns TGCS, V, W for N = 64, 128, 256.
pub const BADRHO_11: [(usize, [f64; 3]); 3] = [
    (64, [0.67, 0.68, 0.71]),
    (128, [0.68, 0.73, 0.68]),
    (256, [0.70, 0.71, 0.70]),
];
pub const BADRHO_21: [(usize, [f64; 3]); 3] = [
    (64, [0.58, 0.72, 0.58]),
    (128, [0.58, 0.73, 0.59]),
    (256, [0.61, 0.83, 0.60]),
];

pub const CIRCLE_NU2: &[ReferenceCell] = &[
    cell(16, 8, 0.052),
    cell(32, 8, 0.053),
    cell(64, 8, 0.11),
    cell(128, 8, 0.13),
    cell(256, 8, 0.14),
    cell(32, 16, 0.061),
    cell(64, 16, 0.11),
    cell(128, 16, 0.13),
    cell(256, 16, 0.14),
    cell(64, 32, 0.11),
    cell(128, 32, 0.13),
    cell(256, 32, 0.14),
    cell(128, 64, 0.13),
    cell(256, 64, 0.14),
    cell(256, 128, 0.14),
];

pub const CIRCLE_NU3: &[ReferenceCell] = &[
    cell(16, 8, 0.06),
    cell(32, 8, 0.03),
    cell(64, 8, 0.09),
    cell(128, 8, 0.08),
    cell(256, 8, 0.08),
    cell(32, 16, 0.04),
    cell(64, 16, 0.09),
    cell(128, 16, 0.08),
    cell(256, 16, 0.08),
    cell(64, 32, 0.09),
    cell(128, 32, 0.08),
    cell(256, 32, 0.08),
    cell(128, 64, 0.09),
    cell(256, 64, 0.08),
    cell(256, 128, 0.09),
];

pub const ELLIPSE_NU2: &[ReferenceCell] = &[
    cell(16, 8, 0.34),
    cell(32, 8, 0.09),
    cell(64, 8, 0.14),
    cell(128, 8, 0.14),
    cell(256, 8, 0.15),
    cell(32, 16, 0.65),
    cell(64, 16, 0.45),
    cell(128, 16, 0.19),
    cell(256, 16, 0.15),
    cell(64, 32, 0.14),
    cell(128, 32, 0.14),
    cell(256, 32, 0.15),
    cell(128, 64, 0.15),
    cell(256, 64, 0.15),
    cell(256, 128, 0.15),
];

pub const ELLIPSE_NU3: &[ReferenceCell] = &[
    cell(16, 8, 0.44),
    cell(32, 8, 0.06),
    cell(64, 8, 0.12),
    cell(128, 8, 0.11),
    cell(256, 8, 0.09),
    cell(32, 16, 0.55),
    cell(64, 16, 0.30),
    cell(128, 16, 0.09),
    cell(256, 16, 0.09),
    cell(64, 32, 0.13),
    cell(128, 32, 0.10),
    cell(256, 32, 0.09),
    cell(128, 64, 0.12),
    cell(256, 64, 0.08),
    cell(256, 128, 0.09),
];

pub const SADDLE_NU3: &[ReferenceCell] = &[
    cell(16, 8, 0.36),
    cell(32, 8, 0.08),
    cell(64, 8, 0.09),
    cell(128, 8, 0.12),
    cell(256, 8, 0.09),
    cell(32, 16, 0.12),
    cell(64, 16, 0.09),
    cell(128, 16, 0.12),
    cell(256, 16, 0.09),
    cell(64, 32, 0.09),
    cell(128, 32, 0.12),
    cell(256, 32, 0.09),
    cell(128, 64, 0.13),
    cell(256, 64, 0.09),
    cell(256, 128, 0.09),
];

pub const FLOWER_NU3: &[ReferenceCell] = &[
    nc(16, 8),
    nc(32, 8),
    nc(64, 8),
    nc(128, 8),
    nc(256, 8),
    cell(32, 16, 0.89),
    cell(64, 16, 0.75),
    cell(128, 16, 0.50),
    cell(256, 16, 0.25),
    cell(64, 32, 0.49),
    cell(128, 32, 0.25),
    cell(256, 32, 0.12),
    cell(128, 64, 0.24),
    cell(256, 64, 0.11),
    cell(256, 128, 0.09),
];

/// The 1D benchmark at N = 64, N_c = 8, for nu = 2 and 3.
pub const ONE_D: [(usize, f64); 2] = [(2, 0.185), (3, 0.122)];
