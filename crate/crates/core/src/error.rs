use thiserror::Error;

/// Errors raised by the simulation, network and training kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape mismatch: {what}: expected {expected}, got {actual}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("index out of range: {what} = {index} (limit {limit})")]
    Index {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("training aborted at episode {episode}: {source}")]
    Aborted {
        episode: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Shape {
            what,
            expected,
            actual,
        })
    }
}

pub(crate) fn check_finite(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::Numerical(format!(
            "{what}: non-finite value {} at index {i}",
            values[i]
        ))),
    }
}
