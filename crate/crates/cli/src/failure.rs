use std::fmt;

/// Process exit status of a failed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Bad flags or arguments.
    Usage = 1,
    /// Bad or unencodable input; output may be partial.
    Data = 2,
    /// The grammar provider failed.
    Provider = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub message: String,
}

pub type Outcome<T> = Result<T, Failure>;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            kind: ExitKind::Data,
            message: message.into(),
        }
    }

    pub fn provider(message: impl Into<String>) -> Self {
        Failure {
            kind: ExitKind::Provider,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<noncanon::Error> for Failure {
    fn from(e: noncanon::Error) -> Self {
        match e {
            noncanon::Error::Provider(_) => Failure::provider(e.to_string()),
            noncanon::Error::InvalidArgument(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}
