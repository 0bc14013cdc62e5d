pub mod embodied;
pub mod operate;
pub mod rank;
pub mod ratio_map;
pub mod scenario;
pub mod validate;
pub mod withdraw;
