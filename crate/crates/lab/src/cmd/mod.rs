pub mod blowup;
pub mod cantor;
pub mod curve;
pub mod hinge;
pub mod infconv;
pub mod sweep;
