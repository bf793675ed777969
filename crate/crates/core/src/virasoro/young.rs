use serde::{Deserialize, Serialize};
use std::fmt;

/// A partition `nu(1) >= nu(2) >= ... > 0`, labelling the descendant
/// `L_{-nu(k)} ... L_{-nu(1)} Psi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YoungDiagram {
    parts: Vec<u32>,
}

impl YoungDiagram {
    pub fn empty() -> Self {
        YoungDiagram { parts: Vec::new() }
    }

    /// Sorts the parts into weakly decreasing order; zero parts are invalid.
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.iter().any(|&p| p == 0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(YoungDiagram { parts })
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        YoungDiagram { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn level(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` in lexicographically descending order.
pub fn diagrams_at_level(n: usize) -> Vec<YoungDiagram> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(n as u32, n as u32, &mut cur, &mut out);
    out
}

fn fill(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
    if rem == 0 {
        out.push(YoungDiagram::from_sorted(cur.clone()));
        return;
    }
    for p in (1..=rem.min(max)).rev() {
        cur.push(p);
        fill(rem - p, p, cur, out);
        cur.pop();
    }
}
