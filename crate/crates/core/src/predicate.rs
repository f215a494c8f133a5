//! Observable predicates on states and the preserve/reflect/respect modes
//! relating them across a pair.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A concrete predicate on a single state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    HasBarb(String),
    ReachesBarb(String),
    HasSuccess,
    ReachesSuccess,
    Divergent,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::HasBarb(a) => write!(f, "has-barb({a})"),
            Predicate::ReachesBarb(a) => write!(f, "reaches-barb({a})"),
            Predicate::HasSuccess => f.write_str("has-success"),
            Predicate::ReachesSuccess => f.write_str("reaches-success"),
            Predicate::Divergent => f.write_str("divergent"),
        }
    }
}

/// Whether an observable is checked at the state itself or over its weak
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strength {
    Has,
    Reaches,
}

impl FromStr for Strength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "has" => Ok(Strength::Has),
            "reaches" => Ok(Strength::Reaches),
            other => Err(Error::Usage(format!("unknown strength `{other}` (expected has|reaches)"))),
        }
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Has => "has",
            Strength::Reaches => "reaches",
        })
    }
}

/// A predicate or a barb-indexed family of predicates. A barb selector
/// without a name stands for every barb of the alphabet in scope.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    Divergent,
    Success(Strength),
    Barb(Strength, Option<String>),
}

impl Selector {
    pub fn success(strength: Strength) -> Self {
        Selector::Success(strength)
    }

    pub fn all_barbs(strength: Strength) -> Self {
        Selector::Barb(strength, None)
    }

    pub fn expand(&self, alphabet: &BTreeSet<String>) -> Vec<Predicate> {
        match self {
            Selector::Divergent => vec![Predicate::Divergent],
            Selector::Success(Strength::Has) => vec![Predicate::HasSuccess],
            Selector::Success(Strength::Reaches) => vec![Predicate::ReachesSuccess],
            Selector::Barb(strength, Some(name)) => vec![barb_predicate(*strength, name)],
            Selector::Barb(strength, None) => alphabet.iter().map(|name| barb_predicate(*strength, name)).collect(),
        }
    }
}

fn barb_predicate(strength: Strength, name: &str) -> Predicate {
    match strength {
        Strength::Has => Predicate::HasBarb(name.to_owned()),
        Strength::Reaches => Predicate::ReachesBarb(name.to_owned()),
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Divergent => f.write_str("divergent"),
            Selector::Success(s) => write!(f, "{s}-success"),
            Selector::Barb(s, None) => write!(f, "{s}-barb"),
            Selector::Barb(s, Some(a)) => write!(f, "{s}-barb({a})"),
        }
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once('(') {
            Some((head, rest)) => {
                let arg = rest
                    .strip_suffix(')')
                    .filter(|a| is_token(a))
                    .ok_or_else(|| Error::Usage(format!("malformed predicate `{s}`")))?;
                (head, Some(arg.to_owned()))
            }
            None => (s, None),
        };
        let selector = match (head, arg) {
            ("divergent", None) => Selector::Divergent,
            ("has-success", None) => Selector::Success(Strength::Has),
            ("reaches-success", None) => Selector::Success(Strength::Reaches),
            ("has-barb", arg) => Selector::Barb(Strength::Has, arg),
            ("reaches-barb", arg) => Selector::Barb(Strength::Reaches, arg),
            _ => return Err(Error::Usage(format!("unknown predicate `{s}`"))),
        };
        Ok(selector)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Preserve,
    Reflect,
    Respect,
}

impl Mode {
    /// Whether a pair whose left component satisfies the predicate iff
    /// `left` (and likewise `right`) is admitted by this mode.
    pub fn admits(self, left: bool, right: bool) -> bool {
        match self {
            Mode::Preserve => !left || right,
            Mode::Reflect => !right || left,
            Mode::Respect => left == right,
        }
    }

    pub const ALL: [Mode; 3] = [Mode::Preserve, Mode::Reflect, Mode::Respect];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Preserve => "preserve",
            Mode::Reflect => "reflect",
            Mode::Respect => "respect",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preserve" => Ok(Mode::Preserve),
            "reflect" => Ok(Mode::Reflect),
            "respect" => Ok(Mode::Respect),
            other => Err(Error::Usage(format!("unknown mode `{other}` (expected preserve|reflect|respect)"))),
        }
    }
}

/// A per-pair requirement: the relation must relate states in a way the mode
/// admits for the selected predicate(s).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub selector: Selector,
    pub mode: Mode,
}

impl Constraint {
    pub fn new(selector: Selector, mode: Mode) -> Self {
        Constraint { selector, mode }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.selector, self.mode)
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sel, mode) = s.rsplit_once(':').ok_or_else(|| Error::Usage(format!("expected pred:mode, got `{s}`")))?;
        Ok(Constraint { selector: sel.parse()?, mode: mode.parse()? })
    }
}

/// Non-empty, no whitespace, no comma.
pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == ',')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_text_round_trips() {
        for text in [
            "divergent",
            "has-success",
            "reaches-success",
            "has-barb",
            "reaches-barb",
            "reaches-barb(a)",
            "has-barb(tick)",
        ] {
            let sel: Selector = text.parse().unwrap();
            assert_eq!(sel.to_string(), text);
        }
        assert!("reaches-barb()".parse::<Selector>().is_err());
        assert!("sometimes".parse::<Selector>().is_err());
    }

    #[test]
    fn constraint_parses_mode_suffix() {
        let c: Constraint = "reaches-barb(a):respect".parse().unwrap();
        assert_eq!(c.selector, Selector::Barb(Strength::Reaches, Some("a".into())));
        assert_eq!(c.mode, Mode::Respect);
        assert!("divergent".parse::<Constraint>().is_err());
    }

    #[test]
    fn modes_admit_expected_pairs() {
        assert!(Mode::Preserve.admits(false, true));
        assert!(!Mode::Preserve.admits(true, false));
        assert!(Mode::Reflect.admits(true, false));
        assert!(!Mode::Reflect.admits(false, true));
        assert!(!Mode::Respect.admits(false, true));
        assert!(Mode::Respect.admits(true, true));
    }
}
