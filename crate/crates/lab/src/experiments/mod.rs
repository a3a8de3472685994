pub mod first_zero;
pub mod oracle;
pub mod sweep;
pub mod theorem1;
pub mod theorem2;
