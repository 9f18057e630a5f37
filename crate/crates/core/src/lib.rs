pub mod cli;
pub mod conceptmap;
pub mod corpus;
pub mod evaluate;
pub mod model;
pub mod multilingual;
pub mod ontology;
pub mod pipeline;
pub mod preprocess;
pub mod sparse;
pub mod text;
