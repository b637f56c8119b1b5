//! Scheme and method labels shared by the evaluators and the sweep runner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SopError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// One user (M forced to 1) facing all L eavesdroppers.
    SingleUser,
    /// Suboptimal scheduling: best legitimate SNR.
    SS,
    /// Optimal scheduling: best instantaneous secrecy rate.
    OS,
    /// Best antenna-user pair over K source antennas.
    BestPair,
    /// Best and worst user served together by power-domain NOMA.
    NOMA,
    /// Decode-and-forward relay with the direct link.
    RelayDL,
    /// Decode-and-forward relay without the direct link.
    RelayNDL,
}

impl Scheme {
    pub const ALL: [Scheme; 7] =
        [Scheme::SingleUser, Scheme::SS, Scheme::OS, Scheme::BestPair, Scheme::NOMA, Scheme::RelayDL, Scheme::RelayNDL];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SingleUser => "SingleUser",
            Scheme::SS => "SS",
            Scheme::OS => "OS",
            Scheme::BestPair => "BestPair",
            Scheme::NOMA => "NOMA",
            Scheme::RelayDL => "RelayDL",
            Scheme::RelayNDL => "RelayNDL",
        }
    }

    pub fn is_relay(self) -> bool {
        matches!(self, Scheme::RelayDL | Scheme::RelayNDL)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SopError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SopError::Parse(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::ClosedForm, Method::Asymptotic, Method::Quadrature, Method::MonteCarlo];

    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "ClosedForm",
            Method::Asymptotic => "Asymptotic",
            Method::Quadrature => "Quadrature",
            Method::MonteCarlo => "MonteCarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SopError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SopError::Parse(format!("unknown method '{s}'")))
    }
}
