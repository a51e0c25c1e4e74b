pub mod funfield;
pub mod linalg;
pub mod mpoly;
pub mod numeric;
pub mod localsys;
pub mod opers;
pub mod monoidquot;
pub mod barhomology;
pub mod tsen;
pub mod cli;
