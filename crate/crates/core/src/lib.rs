pub mod closed_forms;
pub mod entropy;
pub mod error;
pub mod measures;
pub mod optimize;
pub mod oracle;
pub mod roof;
pub mod states;
pub mod subset;
pub mod suites;
pub mod swaptest;
pub mod tensor;
