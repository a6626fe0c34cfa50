//! Numerical tolerances shared by every module.

/// Idempotency, unitarity and family-axiom checks.
pub const STRUCTURAL: f64 = 1e-10;
/// Hermiticity of operators and exact-equality assertions.
pub const EQUALITY: f64 = 1e-12;
/// A state vector counts as normalized when `| ‖ψ‖ − 1 | ≤ NORMALIZED`.
pub const NORMALIZED: f64 = 1e-12;
/// Default bound on `|⟨Ψ_α|Ψ_β⟩|`, α ≠ β, for certifying a history set.
pub const DEFAULT_EPSILON: f64 = 1e-8;
/// Conditioning on an event whose probability is at or below this is refused.
pub const DIVISION_FLOOR: f64 = 1e-12;
/// Default cap on the number of histories a grid may enumerate.
pub const DEFAULT_MAX_HISTORIES: usize = 4096;
/// Diagonal decoherence-functional entries may dip this far below zero.
pub const NEGATIVE_PROBABILITY: f64 = 1e-12;
