pub mod examples;
pub mod filtering;
pub mod flow;
pub mod geometry;
