//! Micro-macro decomposition of highly oscillatory linear ODEs.
//!
//! This crate splits stiff linear systems `du/dt = a(t/eps) u`, whose
//! coefficient field combines quasi-periodic oscillations with exponentially
//! decaying transients, into a smooth macro part evolved by an averaged
//! constant-coefficient equation and a small micro remainder.  Standard
//! one-step schemes applied to the pair converge with rates that do not
//! degrade as `eps -> 0`.
//!
//! The main layers are:
//!
//! * [`algebra`] — canonical exponential-trigonometric matrix polynomials:
//!   the closed function class in which every averaging computation happens.
//! * [`averaging`] — the fixed-point iteration producing the change of
//!   variables `Phi`, the averaged matrices `A`, and the defect `delta`,
//!   together with certified norm bounds.
//! * [`integrators`] — micro-macro and direct time steppers (explicit Euler
//!   and a midpoint scheme, each with an exact-window variant).
//! * [`models`] — the scalar toy problem with closed-form solution and a
//!   three-level Bloch-type transition-rate model.
//! * [`harness`] — error sweeps over `(dt, eps)` grids, order fits, and CSV
//!   emission for the accompanying examples.

pub mod algebra;
pub mod averaging;
pub mod harness;
pub mod integrators;
pub mod models;
