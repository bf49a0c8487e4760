//! Published reference values used by the `table` command and the
//! acceptance tests. Each block names the table, the row and the column it
//! was transcribed from.

/// Table I, `α = 0.5`, `B = 1`: basis sizes of the rows.
pub const TABLE1_SIZES: [usize; 5] = [1, 2, 3, 5, 10];
/// Table I, `λ = 0.1`, column `E_0^{A=0}`.
pub const TABLE1_L01_A0: [f64; 5] = [3.102277, 3.102167, 3.102151, 3.102143, 3.102140];
/// Table I, `λ = 0.1`, column `E_0^{A}` (minimised over `A`).
pub const TABLE1_L01_OPT: [f64; 5] = [3.102185, 3.102149, 3.102143, 3.102141, 3.102139];
/// Table I, `λ = 1000`, column `E_0^{A=0}`. The 5×5 entry is printed as
/// 549.825333; the sequence and a direct computation give 546.825333.
pub const TABLE1_L1000_A0: [f64; 5] = [1025.765672, 746.081846, 642.417430, 549.825333, 461.349666];
/// Table I, `λ = 1000`, column `E_0^{A}`.
pub const TABLE1_L1000_OPT: [f64; 5] = [415.934312, 415.932051, 415.890659, 415.889798, 415.889785];

/// Table II, `α = 1`: couplings of the rows.
pub const TABLE2_LAMBDAS: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];
/// Table II, column `E` (variational bound).
pub const TABLE2_E: [f64; 5] = [3.001128, 3.011276, 3.112068, 4.057888, 10.577485];

/// Table III, `α = 4`, `λ = 1000`, 30×30 matrix: dimensions of the rows.
pub const TABLE3_DIMS: [u32; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
/// Table III, column `E^U`.
pub const TABLE3_EU: [f64; 9] = [
    21.350246, 21.369463, 21.427056, 21.522859, 21.656596, 21.827883, 22.036232, 22.281057,
    22.561680,
];
/// Table III, column `E` (direct integration).
pub const TABLE3_E: [f64; 9] = TABLE3_EU;

/// Table IV, `α = 4`, `λ = 1000`, one dimension: `TABLE4[k][j]` is level `k`
/// from the `(k + j + 1)`-dimensional matrix (column `D×D`, `D = k+j+1`).
pub const TABLE4: [&[f64]; 7] = [
    &[
        21.42779, 21.38212, 21.37400, 21.37007, 21.36972, 21.36951, 21.36946,
    ],
    &[26.29842, 26.18948, 26.16699, 26.15544, 26.15418, 26.15340],
    &[31.09717, 30.91924, 30.87834, 30.85656, 30.85194],
    &[35.83486, 35.58750, 35.52579, 35.49211],
    &[40.52033, 40.20549, 40.12162],
    &[45.16079, 44.78142],
    &[49.76216],
];

/// Table V couplings (columns, paired with `α = 4` and `α = 6`).
pub const TABLE5_LAMBDAS: [f64; 3] = [0.0025, 0.005, 0.01];
/// Table V, row `E^U`, `α = 4`.
pub const TABLE5_A4: [f64; 3] = [3.10795, 3.14900, 3.205486];
/// Table V, row `E^U`, `α = 6`.
pub const TABLE5_A6: [f64; 3] = [3.354095, 3.42295, 3.505492];
/// Decimals printed for the `TABLE5_A4` and `TABLE5_A6` entries.
pub const TABLE5_A4_DECIMALS: [usize; 3] = [5, 5, 6];
pub const TABLE5_A6_DECIMALS: [usize; 3] = [6, 5, 6];
/// Table V, extrapolated comparison row (six digits), `α = 4`.
pub const TABLE5_EXTRAPOLATED_A4: [f64; 3] = [3.10681, 3.14835, 3.20507];
/// Table V, extrapolated comparison row, `α = 6`.
pub const TABLE5_EXTRAPOLATED_A6: [f64; 3] = [3.35392, 3.42288, 3.50545];

/// Table VI couplings (rows).
pub const TABLE6_LAMBDAS: [f64; 6] = [1000.0, 100.0, 10.0, 1.0, 0.1, 0.01];
/// Table VI, variational ground state, `α = 4`.
pub const TABLE6_A4: [f64; 6] = [21.369462, 11.265080, 6.606622, 4.494179, 3.575557, 3.205486];
/// Table VI, variational ground state, `α = 6`.
pub const TABLE6_A6: [f64; 6] = [12.718617, 8.413358, 6.003209, 4.659940, 3.915665, 3.505492];
