use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ten defect-prediction beliefs under assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BeliefId {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    B9,
    B10,
}

impl BeliefId {
    pub const ALL: [BeliefId; 10] = [
        BeliefId::B1,
        BeliefId::B2,
        BeliefId::B3,
        BeliefId::B4,
        BeliefId::B5,
        BeliefId::B6,
        BeliefId::B7,
        BeliefId::B8,
        BeliefId::B9,
        BeliefId::B10,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        [
            "B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B9", "B10",
        ][self.index()]
    }

    pub fn statement(self) -> &'static str {
        match self {
            BeliefId::B1 => "A file with a complex code change process tends to be buggy",
            BeliefId::B2 => "A file that is changed by more developers is more bug-prone",
            BeliefId::B3 => "A file with more added lines is more bug-prone",
            BeliefId::B4 => "Recently changed files tend to be buggy",
            BeliefId::B5 => "A commit that involves more added and removed lines is more bug-prone",
            BeliefId::B6 => "Recently bug-fixed files tend to be buggy",
            BeliefId::B7 => "A file with more fixed bugs tends to be more bug-prone",
            BeliefId::B8 => "A file with more commits is more bug-prone",
            BeliefId::B9 => "A file with more removed lines is more bug-prone",
            BeliefId::B10 => "Files with fewer lines contributed by their owners are bug-prone",
        }
    }

    /// Share of surveyed practitioners agreeing with the belief, in percent.
    pub fn practitioner_agreement(self) -> u32 {
        [76, 64, 61, 58, 57, 49, 48, 46, 35, 30][self.index()]
    }
}

impl fmt::Display for BeliefId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeliefId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BeliefId::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown belief id {s:?}"))
    }
}
