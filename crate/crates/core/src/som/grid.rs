use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular map; unit `j = r * cols + c` sits at lattice point `(r, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTopology {
    pub rows: usize,
    pub cols: usize,
}

impl GridTopology {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!("grid {rows}x{cols} has no units")));
        }
        Ok(Self { rows, cols })
    }

    /// Parses `RxC`, e.g. `7x7`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("grid `{spec}` is not of the form RxC"));
        let (r, c) = spec.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        Self::new(r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?)
    }

    pub fn unit_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn unit(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn coords(&self, j: usize) -> (usize, usize) {
        (j / self.cols, j % self.cols)
    }

    /// Euclidean lattice distance.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra as f64 - rb as f64;
        let dc = ca as f64 - cb as f64;
        (dr * dr + dc * dc).sqrt()
    }

    pub fn max_distance_sq(&self) -> f64 {
        let r = (self.rows - 1) as f64;
        let c = (self.cols - 1) as f64;
        r * r + c * c
    }

    /// 4-neighborhood of unit `j`.
    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        let (r, c) = self.coords(j);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.unit(r - 1, c));
        }
        if c > 0 {
            out.push(self.unit(r, c - 1));
        }
        if c + 1 < self.cols {
            out.push(self.unit(r, c + 1));
        }
        if r + 1 < self.rows {
            out.push(self.unit(r + 1, c));
        }
        out
    }
}

impl std::fmt::Display for GridTopology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = GridTopology::parse("3x4").unwrap();
        assert_eq!(g.unit_count(), 12);
        assert_eq!(g.coords(7), (1, 3));
        assert_eq!(g.distance(0, 11), (4.0f64 + 9.0).sqrt());
        assert_eq!(g.neighbors(0), vec![1, 4]);
        assert_eq!(g.neighbors(5), vec![1, 4, 6, 9]);
        assert_eq!(g.to_string(), "3x4");
        assert!(GridTopology::parse("0x3").is_err());
        assert!(GridTopology::parse("7").is_err());
    }
}
