//! Java method simplification engine.

pub mod catalog;
pub mod corpus;
pub mod evalharness;
pub mod gateway;
pub mod localization;
pub mod metrics;
pub mod reducer;
pub mod syntax;
pub mod validator;

#[cfg(test)]
pub(crate) mod test_fixtures;
