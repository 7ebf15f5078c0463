//! Instance documents, seeded generators and the non-degeneracy perturbation.

mod document;
mod generate;
mod perturb;

pub use document::{
    parse_instance, serialize_instance, DocumentBody, InstanceDocument, ParseError, ParseErrorKind, SCHEMA_VERSION,
};
pub use generate::{gen_random, gen_random_any, gen_random_network, corner_tree, corner_trees, GenerationError, GENERATION_RETRIES};
pub use perturb::{perturb_to_nondegenerate, PerturbError};
