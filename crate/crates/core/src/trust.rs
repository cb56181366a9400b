use std::cmp::Ordering;
use std::fmt;

/// How much a site trusts another one.
///
/// `Unknown` sits below both `Good` and `Bad`; `Good` and `Bad` are
/// incomparable. `PartialOrd` implements exactly this order, so `a <= b`
/// reads as "a may be refined to b".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrustLevel {
    Good,
    Bad,
    Unknown,
}

impl TrustLevel {
    pub const ALL: [TrustLevel; 3] = [TrustLevel::Good, TrustLevel::Bad, TrustLevel::Unknown];

    pub fn keyword(self) -> &'static str {
        match self {
            TrustLevel::Good => "good",
            TrustLevel::Bad => "bad",
            TrustLevel::Unknown => "unknown",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "good" => Some(TrustLevel::Good),
            "bad" => Some(TrustLevel::Bad),
            "unknown" => Some(TrustLevel::Unknown),
            _ => None,
        }
    }
}

impl PartialOrd for TrustLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use TrustLevel::*;
        match (self, other) {
            (a, b) if a == b => Some(Ordering::Equal),
            (Unknown, _) => Some(Ordering::Less),
            (_, Unknown) => Some(Ordering::Greater),
            _ => None,
        }
    }
}

impl fmt::Display for TrustLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}
