use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// What happens to the preconditioner before a system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// Factor the current matrix; it becomes the new reference.
    RecomputePrec,
    /// Map the current matrix onto the reference and reuse its factors.
    ComputeSam,
    /// Keep the preconditioner used for the previous system.
    Reuse,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::RecomputePrec => "prec",
            Action::ComputeSam => "sam",
            Action::Reuse => "reuse",
        }
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "prec" | "recompute" | "recompute_prec" => Ok(Action::RecomputePrec),
            "sam" | "compute_sam" => Ok(Action::ComputeSam),
            "reuse" => Ok(Action::Reuse),
            other => Err(Error::InvalidArgument(format!(
                "unknown action `{other}` (expected prec, sam or reuse)"
            ))),
        }
    }
}

/// Preconditioner update schedule over a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    RecomputeEvery,
    ReuseFirst,
    SamEvery,
    /// Explicit `(index, action)` schedule; unlisted systems reuse.
    Events(Vec<(usize, Action)>),
}

impl Strategy {
    /// Builds a validated [`Strategy::Events`].
    pub fn events(list: Vec<(usize, Action)>) -> Result<Self> {
        let s = Strategy::Events(list);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Strategy::Events(list) = self else {
            return Ok(());
        };
        match list.first() {
            Some(&(0, Action::RecomputePrec)) => {}
            Some(&(i, a)) => {
                return Err(Error::InvalidArgument(format!(
                    "event schedule must start with 0:prec, found {i}:{}",
                    a.as_str()
                )))
            }
            None => return Err(Error::InvalidArgument("event schedule is empty".into())),
        }
        if let Some(w) = list.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument(format!(
                "event indices must increase strictly, found {} after {}",
                w[1].0, w[0].0
            )));
        }
        Ok(())
    }

    /// Action for system `k`. System 0 always gets a fresh factorization.
    pub fn action(&self, k: usize) -> Action {
        if k == 0 {
            return Action::RecomputePrec;
        }
        match self {
            Strategy::RecomputeEvery => Action::RecomputePrec,
            Strategy::ReuseFirst => Action::Reuse,
            Strategy::SamEvery => Action::ComputeSam,
            Strategy::Events(list) => list
                .binary_search_by_key(&k, |e| e.0)
                .map_or(Action::Reuse, |p| list[p].1),
        }
    }

    /// Parses a schedule such as `[0:prec, 15:sam]`.
    pub fn parse_events(text: &str) -> Result<Self> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(inner);
        let mut list = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (idx, act) = item.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("event `{item}` is not index:action"))
            })?;
            let idx = idx
                .trim()
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("event index `{idx}`: {e}")))?;
            list.push((idx, act.parse()?));
        }
        Strategy::events(list)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::RecomputeEvery => f.write_str("recompute_every"),
            Strategy::ReuseFirst => f.write_str("reuse_first"),
            Strategy::SamEvery => f.write_str("sam_every"),
            Strategy::Events(list) => {
                f.write_str("events[")?;
                for (k, (i, a)) in list.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{i}:{}", a.as_str())?;
                }
                f.write_str("]")
            }
        }
    }
}
