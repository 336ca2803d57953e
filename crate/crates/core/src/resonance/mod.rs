//! Resonance detection, triad tables and the dyadic counting bound.

pub mod counting;
pub mod exact;
pub mod table;

pub use counting::{counting_lemma_planar, counting_lemma_sup, CaseTally, CountingReport, CountingRow};
pub use exact::{phase_rate, phase_rate_f64, resonance_holds, squarefree_decompose, PhaseRate, TriadCase};
pub use table::{
    build_triad_table, build_triad_table_with_budget, interaction_coefficient, ResonantTriad, TriadEntry, TriadTable,
    DEFAULT_MEMORY_BUDGET,
};
