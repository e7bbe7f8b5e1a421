//! Built-in energy models.

mod facility;
mod ising;
mod potts;
mod quadratic;
mod table;

pub use facility::{FacilityLocationModel, MixtureParams};
pub use ising::IsingModel;
pub use potts::PottsModel;
pub use quadratic::QuadraticModel;
pub use table::TableModel;
