//! Seed lists such as `1..20`, `3`, or `1..4,9,12..13` (ranges inclusive).

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedList(pub Vec<u64>);

impl SeedList {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

impl FromStr for SeedList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            if part.is_empty() {
                bail!("empty item in seed list {s:?}");
            }
            match part.split_once("..") {
                Some((a, b)) => {
                    let a: u64 = a
                        .trim()
                        .parse()
                        .with_context(|| format!("bad seed {a:?}"))?;
                    let b: u64 = b
                        .trim()
                        .parse()
                        .with_context(|| format!("bad seed {b:?}"))?;
                    if b < a {
                        bail!("descending seed range {part:?}");
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().with_context(|| format!("bad seed {part:?}"))?),
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(d) = out.iter().find(|s| !seen.insert(**s)) {
            bail!("seed {d} listed twice");
        }
        Ok(SeedList(out))
    }
}

impl fmt::Display for SeedList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        let s: SeedList = "1..20".parse().unwrap();
        assert_eq!(s.0, (1..=20).collect::<Vec<_>>());
        let s: SeedList = "1..3, 7,9..9".parse().unwrap();
        assert_eq!(s.0, vec![1, 2, 3, 7, 9]);
        assert_eq!(s.to_string(), "1,2,3,7,9");
    }

    #[test]
    fn rejects_malformed_lists() {
        for bad in ["", "3..1", "a", "1,,2", "1..x", "1,1"] {
            assert!(bad.parse::<SeedList>().is_err(), "{bad}");
        }
    }
}
