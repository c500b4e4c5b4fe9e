//! State-vector simulation of driven Rydberg arrays.

pub mod evolve;
pub mod ground;
pub mod hamiltonian;
pub mod schedule;
pub mod state;

pub use evolve::{evolve, step_halving_deviation, Evolver, Perturbation, DEFAULT_DT};
pub use ground::{exact_ground_state, ground_configurations};
pub use hamiltonian::{build_hamiltonian, Hamiltonian, HamiltonianSpec, Interaction, Mode};
pub use schedule::{angular, AnnealSchedule, ConstantDrive, Drive};
pub use state::{measure, StateVector};
