//! Emulated quantum subroutines and analytic cost models.

pub mod emulator;
pub mod table1;

pub use emulator::{
    durr_hoyer_min_emulated, grover_search_emulated, grover_success_probability, lin_lin_first_hit_emulated,
    repetitions, Emulator, EmulatorConfig, QueryTally,
};
pub use table1::{
    bnb_polylog, gradient_table_costs, grover_direction_cost, line_search_costs, nelder_mead_table_costs,
    table1_report, table1_row, AlgorithmKind, AlgorithmStats, CostReport, CostRow,
};
