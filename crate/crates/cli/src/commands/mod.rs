pub mod bplot;
pub mod curves;
pub mod nullsim;
pub mod power;
