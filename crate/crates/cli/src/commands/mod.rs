pub mod bound;
pub mod paper;
pub mod scan;
pub mod verify;
