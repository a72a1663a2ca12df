use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TribeError {
    #[error("invalid groupoid data: {what}")]
    Invalid { what: String },
    #[error("invalid functor: {what}")]
    InvalidFunctor { what: String },
    #[error("endpoint mismatch: {what}")]
    EndpointMismatch { what: String },
    #[error("not an isofibration: no lift of morphism {morphism} at object {object}")]
    NotIsofibration { object: u32, morphism: u32 },
    #[error("square does not commute: {what}")]
    NotCommuting { what: String },
    #[error("resource cap exceeded: {what} ({actual} > {limit})")]
    ResourceCap {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("exchange format: {0}")]
    Exchange(String),
}

/// Size caps. User-supplied groupoids are held to the small cap (overridable
/// through `HOTT_MAX_OBJECTS`); constructed groupoids to a larger one.
pub mod limits {
    use super::TribeError;

    pub const DEFAULT_MAX_OBJECTS: usize = 8;
    pub const DEFAULT_MAX_MORPHISMS: usize = 48;
    pub const INTERNAL_MAX_OBJECTS: usize = 250_000;
    pub const INTERNAL_MAX_MORPHISMS: usize = 2_000_000;
    pub const INTERNAL_MAX_TABLE: usize = 20_000_000;

    /// `(objects, morphisms)` cap for inputs. The morphism cap scales with
    /// the object cap when the environment override is used.
    pub fn input_caps() -> (usize, usize) {
        match std::env::var("HOTT_MAX_OBJECTS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(n) => (n, n * DEFAULT_MAX_MORPHISMS / DEFAULT_MAX_OBJECTS),
            None => (DEFAULT_MAX_OBJECTS, DEFAULT_MAX_MORPHISMS),
        }
    }

    fn cap(what: &'static str, actual: usize, limit: usize) -> Result<(), TribeError> {
        if actual > limit {
            Err(TribeError::ResourceCap { what, limit, actual })
        } else {
            Ok(())
        }
    }

    pub fn check_input(objects: usize, morphisms: usize) -> Result<(), TribeError> {
        let (o, m) = input_caps();
        cap("objects", objects, o)?;
        cap("morphisms", morphisms, m)
    }

    pub fn check_internal(objects: usize, morphisms: usize) -> Result<(), TribeError> {
        cap("constructed objects", objects, INTERNAL_MAX_OBJECTS)?;
        cap("constructed morphisms", morphisms, INTERNAL_MAX_MORPHISMS)
    }

    pub fn check_table(entries: usize) -> Result<(), TribeError> {
        cap("composition table entries", entries, INTERNAL_MAX_TABLE)
    }
}
