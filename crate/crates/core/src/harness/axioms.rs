use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The dynamic-universe tests and their sharper variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestId {
    /// T1: same universe and prices at base and current gives 1.
    Identity,
    /// T2: same universe and quantities gives the value ratio.
    FixedBasket,
    /// T3: non-shrinking universe with non-rising persistent prices gives at most 1.
    UpperBound,
    /// T4: non-expanding universe with non-falling persistent prices gives at least 1.
    LowerBound,
    /// t3: strictly expanding universe with unchanged persistent prices gives at most 1.
    SharpUpper,
    /// t4: strictly shrinking universe with unchanged persistent prices gives at least 1.
    SharpLower,
    /// T5: with births or deaths the index must not always reduce to the persistent data.
    Responsiveness,
    /// t5: with unchanged persistent prices the index must not always equal 1.
    SharpResponsiveness,
}

impl TestId {
    pub const ALL: [TestId; 8] = [
        TestId::Identity,
        TestId::FixedBasket,
        TestId::UpperBound,
        TestId::LowerBound,
        TestId::SharpUpper,
        TestId::SharpLower,
        TestId::Responsiveness,
        TestId::SharpResponsiveness,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            TestId::Identity => "T1",
            TestId::FixedBasket => "T2",
            TestId::UpperBound => "T3",
            TestId::LowerBound => "T4",
            TestId::SharpUpper => "t3",
            TestId::SharpLower => "t4",
            TestId::Responsiveness => "T5",
            TestId::SharpResponsiveness => "t5",
        }
    }

    pub(crate) fn ordinal(&self) -> u64 {
        TestId::ALL.iter().position(|t| t == self).expect("listed") as u64
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TestId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestId::ALL
            .into_iter()
            .find(|t| t.code() == s)
            .ok_or_else(|| format!("unknown test {s:?}; expected one of T1 T2 T3 T4 t3 t4 T5 t5"))
    }
}

/// Which way the universe changes in a responsiveness scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChurnSetting {
    /// Births only, as in t3.
    Expanding,
    /// Deaths only, as in t4.
    Shrinking,
    /// Births and deaths.
    #[default]
    Mixed,
}

/// The five columns of the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Column {
    Identity,
    FixedBasket,
    UpperBound,
    LowerBound,
    Responsiveness,
}

impl Column {
    pub const ALL: [Column; 5] = [
        Column::Identity,
        Column::FixedBasket,
        Column::UpperBound,
        Column::LowerBound,
        Column::Responsiveness,
    ];

    pub fn title(&self) -> &'static str {
        match self {
            Column::Identity => "Identity",
            Column::FixedBasket => "Fixed-basket",
            Column::UpperBound => "Upper-bound",
            Column::LowerBound => "Lower-bound",
            Column::Responsiveness => "Responsiveness",
        }
    }
}
