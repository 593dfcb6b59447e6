//! Unification, generalization and identity-type strictification for free
//! generalized algebraic theories.

pub mod signature;
pub mod syntax;
pub mod unify;
pub mod generalize;
pub mod strictify;
pub mod oracle;
pub mod random;
