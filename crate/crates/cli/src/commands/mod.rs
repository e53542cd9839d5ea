pub mod dims;
pub mod leakage;
pub mod rates;
pub mod simulate;
pub mod sweep;
