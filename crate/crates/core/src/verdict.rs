use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// One reason a check failed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Counterexample {
    /// Involved state ids, most significant first; the sort key.
    pub states: Vec<String>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub challenge: Option<(String, String)>,
    pub detail: String,
}

impl Counterexample {
    pub fn new(kind: impl Into<String>, states: Vec<String>, detail: impl Into<String>) -> Self {
        Counterexample { states, kind: kind.into(), challenge: None, detail: detail.into() }
    }

    pub fn with_challenge(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.challenge = Some((from.into(), to.into()));
        self
    }
}

/// Outcome of a check. It holds exactly when no counterexample was found;
/// counterexamples are kept sorted so reports are reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    counterexamples: Vec<Counterexample>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict::default()
    }

    pub fn fail(cx: Counterexample) -> Self {
        Verdict { counterexamples: vec![cx] }
    }

    pub fn from_counterexamples(mut counterexamples: Vec<Counterexample>) -> Self {
        counterexamples.sort();
        counterexamples.dedup();
        Verdict { counterexamples }
    }

    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn counterexamples(&self) -> &[Counterexample] {
        &self.counterexamples
    }

    /// Conjunction: all counterexamples of both.
    pub fn and(mut self, other: Verdict) -> Verdict {
        self.counterexamples.extend(other.counterexamples);
        Verdict::from_counterexamples(self.counterexamples)
    }
}

impl FromIterator<Counterexample> for Verdict {
    fn from_iter<I: IntoIterator<Item = Counterexample>>(iter: I) -> Self {
        Verdict::from_counterexamples(iter.into_iter().collect())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Verdict", 2)?;
        st.serialize_field("holds", &self.holds())?;
        st.serialize_field("counterexamples", &self.counterexamples)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_by_states_first() {
        let v: Verdict = [
            Counterexample::new("b", vec!["t2".into()], ""),
            Counterexample::new("a", vec!["s1".into(), "t1".into()], ""),
            Counterexample::new("a", vec!["s1".into(), "t1".into()], ""),
        ]
        .into_iter()
        .collect();
        assert!(!v.holds());
        assert_eq!(v.counterexamples().len(), 2);
        assert_eq!(v.counterexamples()[0].states[0], "s1");
        assert!(Verdict::pass().holds());
    }
}
