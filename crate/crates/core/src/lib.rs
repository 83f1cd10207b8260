pub mod exact;
pub mod ring;
pub mod symfun;
pub mod classes;
pub mod intersect;
pub mod verify;
