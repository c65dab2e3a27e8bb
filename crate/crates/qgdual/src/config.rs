//! Lattice configurations and their enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Site state of the doubly-occupied auxiliary state.
pub const DOUBLE: u8 = 3;

/// Site states: 0 empty, 1 and 2 the two particle types, 3 doubly occupied
/// (written `T`). Site 1 is stored first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    sites: Vec<u8>,
}

/// Occupation counts around a site, as in N^L, Ñ^L, N^R, Ñ^R.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountStats {
    /// Occupied sites strictly left.
    pub n_left: usize,
    /// Type-1 sites strictly left.
    pub n1_left: usize,
    /// Occupied sites strictly right.
    pub n_right: usize,
    /// Type-1 sites strictly right.
    pub n1_right: usize,
}

impl Configuration {
    pub fn new(sites: Vec<u8>) -> Result<Self> {
        if let Some(s) = sites.iter().find(|&&s| s > DOUBLE) {
            return Err(Error::Domain(format!("invalid site state {s}")));
        }
        Ok(Self { sites })
    }

    pub fn empty(len: usize) -> Self {
        Self { sites: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[u8] {
        &self.sites
    }

    /// State at a 1-based site.
    pub fn at(&self, i: usize) -> u8 {
        self.sites[i - 1]
    }

    pub fn set(&mut self, i: usize, s: u8) {
        self.sites[i - 1] = s;
    }

    /// Base-`d` index with site 1 most significant.
    pub fn index(&self, d: usize) -> usize {
        self.sites.iter().fold(0, |acc, &s| acc * d + s as usize)
    }

    pub fn from_index(mut idx: usize, d: usize, len: usize) -> Self {
        let mut sites = vec![0u8; len];
        for k in (0..len).rev() {
            sites[k] = (idx % d) as u8;
            idx /= d;
        }
        Self { sites }
    }

    /// All configurations over `d` site states, in index order.
    pub fn enumerate(d: usize, len: usize) -> Vec<Configuration> {
        (0..d.pow(len as u32))
            .map(|i| Self::from_index(i, d, len))
            .collect()
    }

    pub fn has_double(&self) -> bool {
        self.sites.contains(&DOUBLE)
    }

    pub fn max_state(&self) -> u8 {
        self.sites.iter().copied().max().unwrap_or(0)
    }

    pub fn count(&self, state: u8) -> usize {
        self.sites.iter().filter(|&&s| s == state).count()
    }

    pub fn occupied(&self) -> usize {
        self.sites.iter().filter(|&&s| s != 0).count()
    }

    /// Occupation pattern 1_{η_i ≠ 0}.
    pub fn occupation(&self) -> Configuration {
        Self {
            sites: self.sites.iter().map(|&s| u8::from(s != 0)).collect(),
        }
    }

    pub fn counting_stats(&self, i: usize) -> Result<CountStats> {
        if i == 0 || i > self.len() {
            return Err(Error::Domain(format!("site {i} outside 1..={}", self.len())));
        }
        let (left, right) = (&self.sites[..i - 1], &self.sites[i..]);
        Ok(CountStats {
            n_left: left.iter().filter(|&&s| s != 0).count(),
            n1_left: left.iter().filter(|&&s| s == 1).count(),
            n_right: right.iter().filter(|&&s| s != 0).count(),
            n1_right: right.iter().filter(|&&s| s == 1).count(),
        })
    }

    /// Number of sites j < i (1-based i) whose state satisfies `pred`.
    pub fn count_left(&self, i: usize, pred: impl Fn(u8) -> bool) -> usize {
        self.sites[..i - 1].iter().filter(|&&s| pred(s)).count()
    }

    pub fn count_right(&self, i: usize, pred: impl Fn(u8) -> bool) -> usize {
        self.sites[i..].iter().filter(|&&s| pred(s)).count()
    }

    /// Copy with the bond (i, i+1) swapped.
    pub fn swapped(&self, i: usize) -> Configuration {
        let mut c = self.clone();
        c.sites.swap(i - 1, i);
        c
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.sites {
            let ch = match s {
                DOUBLE => 'T',
                s => (b'0' + s) as char,
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl FromStr for Configuration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                'T' => Ok(DOUBLE),
                other => Err(Error::Parse(format!("bad site symbol {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { sites })
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
