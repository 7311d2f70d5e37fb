use std::fmt::Display;

/// A command error tagged with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or input files. Exit code 2.
    Usage(anyhow::Error),
    /// The computation itself failed. Exit code 1.
    Compute(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Compute(e) => e,
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn usage(self) -> Outcome<T>;
    fn compute(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Outcome<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn compute(self) -> Outcome<T> {
        self.map_err(|e| Failure::Compute(e.into()))
    }
}

pub fn usage(msg: impl Display) -> Failure {
    Failure::Usage(anyhow::anyhow!("{msg}"))
}
