use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered split of `p` variables into `q` consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockPartition {
    sizes: Vec<usize>,
    // cumulative[i] = p_1 + ... + p_i, cumulative[0] = 0
    cumulative: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("block {} is empty", i + 1)));
        }
        let mut cumulative = Vec::with_capacity(sizes.len() + 1);
        cumulative.push(0);
        let mut acc = 0usize;
        for &s in &sizes {
            acc += s;
            cumulative.push(acc);
        }
        Ok(Self { sizes, cumulative })
    }

    /// `count` blocks of `size` variables each.
    pub fn uniform(count: usize, size: usize) -> Result<Self> {
        Self::new(vec![size; count])
    }

    /// `p` blocks of size one (diagonal covariance hypothesis).
    pub fn unit(p: usize) -> Result<Self> {
        Self::uniform(p, 1)
    }

    /// Number of blocks `q`.
    pub fn q(&self) -> usize {
        self.sizes.len()
    }

    /// Total dimension `p`.
    pub fn p(&self) -> usize {
        *self.cumulative.last().unwrap()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Partial sums `0 = p_0* < p_1* < ... < p_q* = p`.
    pub fn cumulative(&self) -> &[usize] {
        &self.cumulative
    }

    /// Zero-based column range of block `i` (zero-based).
    pub fn block_range(&self, i: usize) -> Result<Range<usize>> {
        if i >= self.q() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.q(),
            });
        }
        Ok(self.cumulative[i]..self.cumulative[i + 1])
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.cumulative.windows(2).map(|w| w[0]..w[1])
    }

    /// Zero-based block index containing zero-based column `col`.
    pub fn block_of(&self, col: usize) -> Option<usize> {
        if col >= self.p() {
            return None;
        }
        Some(self.cumulative.partition_point(|&c| c <= col) - 1)
    }
}

impl TryFrom<Vec<usize>> for BlockPartition {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        Self::new(sizes)
    }
}

impl From<BlockPartition> for Vec<usize> {
    fn from(part: BlockPartition) -> Self {
        part.sizes
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"2,2,3"` or the shorthand `"30x2"` (thirty blocks of size two).
/// Comma items may themselves use the shorthand, e.g. `"29x1,31"`.
impl FromStr for BlockPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sizes = Vec::new();
        for item in s.split(',').map(str::trim) {
            let bad = || Error::InvalidPartition(format!("cannot parse `{item}`"));
            match item.split_once(['x', 'X']) {
                Some((count, size)) => {
                    let count: usize = count.trim().parse().map_err(|_| bad())?;
                    let size: usize = size.trim().parse().map_err(|_| bad())?;
                    if count == 0 {
                        return Err(bad());
                    }
                    sizes.extend(std::iter::repeat_n(size, count));
                }
                None => sizes.push(item.parse().map_err(|_| bad())?),
            }
        }
        Self::new(sizes)
    }
}
