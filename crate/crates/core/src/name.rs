use std::fmt;
use std::sync::Arc;

/// An identifier: an action name, a locality, or a site name.
///
/// Cloning is cheap; the text is shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(text: &str) -> Self {
        Name(Arc::from(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(text: &str) -> Self {
        Name::new(text)
    }
}

impl From<String> for Name {
    fn from(text: String) -> Self {
        Name(Arc::from(text))
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A transition label: a local action, or the locality an agent migrates to.
///
/// Which namespace a name belongs to is fixed by where it occurs in the
/// source text. Policies compare labels by name only, which is exact because
/// a validated system never uses the same identifier in both namespaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Action(Name),
    Locality(Name),
}

impl Label {
    pub fn action(name: &str) -> Self {
        Label::Action(Name::new(name))
    }

    pub fn locality(name: &str) -> Self {
        Label::Locality(Name::new(name))
    }

    pub fn name(&self) -> &Name {
        match self {
            Label::Action(n) | Label::Locality(n) => n,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self.name(), f)
    }
}

/// A finite sequence of labels.
pub type Trace = Vec<Label>;

/// Space-separated rendering of a trace; `-` for the empty trace.
pub fn format_trace(trace: &[Label]) -> String {
    if trace.is_empty() {
        return "-".to_string();
    }
    trace
        .iter()
        .map(|l| l.name().as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
