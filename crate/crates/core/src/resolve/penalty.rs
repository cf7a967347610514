use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::task::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Every penalty starts at γ0.
    #[default]
    Ipc4,
    /// Every penalty starts at zero.
    New,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ipc4" => Ok(Strategy::Ipc4),
            "new" => Ok(Strategy::New),
            other => Err(format!("unknown strategy `{other}` (expected ipc4 or new)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Ipc4 => "ipc4",
            Strategy::New => "new",
        })
    }
}

/// Violation counts between pairs of subproblems. Symmetric, zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationMatrix {
    n: usize,
    m: Vec<u64>,
}

impl ViolationMatrix {
    pub fn zeros(n: usize) -> Self {
        ViolationMatrix { n, m: vec![0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, t: usize, k: usize) -> u64 {
        self.m[t * self.n + k]
    }

    /// Adds `v` to both (t, k) and (k, t). The diagonal is left alone.
    pub fn add(&mut self, t: usize, k: usize, v: u64) {
        if t == k {
            return;
        }
        self.m[t * self.n + k] += v;
        self.m[k * self.n + t] += v;
    }

    /// Sum over unordered pairs.
    pub fn total(&self) -> u64 {
        (0..self.n)
            .flat_map(|t| (t + 1..self.n).map(move |k| (t, k)))
            .map(|(t, k)| self.get(t, k))
            .sum()
    }

    /// Violations involving subproblem `t`.
    pub fn row_total(&self, t: usize) -> u64 {
        (0..self.n).map(|k| self.get(t, k)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenaltyMatrix {
    n: usize,
    gamma: Vec<Rational>,
    pub strategy: Strategy,
    pub gamma0: Rational,
    pub xi: Rational,
}

impl PenaltyMatrix {
    pub fn new(n: usize, strategy: Strategy, gamma0: Rational, xi: Rational) -> Self {
        let start = match strategy {
            Strategy::Ipc4 => gamma0,
            Strategy::New => Rational::zero(),
        };
        let mut gamma = vec![start; n * n];
        for t in 0..n {
            gamma[t * n + t] = Rational::zero();
        }
        PenaltyMatrix {
            n,
            gamma,
            strategy,
            gamma0,
            xi,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, t: usize, k: usize) -> Rational {
        self.gamma[t * self.n + k]
    }

    /// γ_{t,k} for every k, with zero at k = t.
    pub fn row(&self, t: usize) -> Vec<Rational> {
        (0..self.n).map(|k| self.get(t, k)).collect()
    }

    pub fn max(&self) -> Rational {
        self.gamma.iter().copied().max().unwrap_or_else(Rational::zero)
    }

    /// γ_{t,k} += ξ·m_{t,k} for every off-diagonal pair.
    pub fn update(&mut self, m: &ViolationMatrix) {
        assert_eq!(m.n(), self.n, "penalty and violation matrices differ in size");
        for t in 0..self.n {
            for k in 0..self.n {
                if t != k {
                    self.gamma[t * self.n + k] += self.xi * Rational::from_integer(m.get(t, k) as i64);
                }
            }
        }
    }
}

pub fn update_penalties(p: &PenaltyMatrix, m: &ViolationMatrix) -> PenaltyMatrix {
    let mut next = p.clone();
    next.update(m);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn zero_violations_leave_penalties_alone() {
        let p = PenaltyMatrix::new(3, Strategy::Ipc4, r(100, 1), r(1, 10));
        assert_eq!(update_penalties(&p, &ViolationMatrix::zeros(3)), p);
    }

    #[test]
    fn ipc4_update() {
        let p = PenaltyMatrix::new(2, Strategy::Ipc4, r(100, 1), r(1, 10));
        let mut m = ViolationMatrix::zeros(2);
        m.add(0, 1, 3);
        let q = update_penalties(&p, &m);
        assert_eq!(q.get(0, 1), r(1003, 10));
        assert_eq!(q.get(1, 0), r(1003, 10));
        assert_eq!(q.get(0, 0), r(0, 1));
    }

    #[test]
    fn new_strategy_starts_from_zero() {
        let mut p = PenaltyMatrix::new(2, Strategy::New, r(100, 1), r(1, 10));
        let mut m = ViolationMatrix::zeros(2);
        m.add(0, 1, 5);
        p.update(&m);
        assert_eq!(p.get(0, 1), r(1, 2));
        let mut m = ViolationMatrix::zeros(2);
        m.add(0, 1, 2);
        p.update(&m);
        assert_eq!(p.get(0, 1), r(7, 10));
    }
}
