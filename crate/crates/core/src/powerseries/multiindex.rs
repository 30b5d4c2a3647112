use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Exponent vector of a monomial. Ordered graded-lex: total degree first,
/// then larger exponents in earlier variables come first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    deg: u32,
    exps: SmallVec<[u16; 10]>,
}

impl MultiIndex {
    pub fn zero(nvars: usize) -> MultiIndex {
        MultiIndex { deg: 0, exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn unit(nvars: usize, i: usize) -> MultiIndex {
        let mut m = MultiIndex::zero(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_slice(exps: &[u32]) -> MultiIndex {
        let exps: SmallVec<[u16; 10]> = exps.iter().map(|&e| e as u16).collect();
        let deg = exps.iter().map(|&e| e as u32).sum();
        MultiIndex { deg, exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn get(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exps(&self) -> Vec<u32> {
        self.exps.iter().map(|&e| e as u32).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.deg == 0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        MultiIndex { deg: self.deg + other.deg, exps }
    }

    /// `self - other`, or `None` when some exponent would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex { deg: self.deg - other.deg, exps })
    }

    pub fn bump(&self, i: usize) -> MultiIndex {
        let mut m = self.clone();
        m.exps[i] += 1;
        m.deg += 1;
        m
    }

    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.deg -= 1;
        Some(m)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `alpha!` as a product of factorials.
    pub fn factorial(&self) -> u128 {
        self.exps.iter().map(|&e| (1..=e as u128).product::<u128>()).product()
    }

    /// Concatenate exponent vectors.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut exps = self.exps.clone();
        exps.extend_from_slice(&other.exps);
        MultiIndex { deg: self.deg + other.deg, exps }
    }

    pub fn slice(&self, start: usize, end: usize) -> MultiIndex {
        let exps: SmallVec<[u16; 10]> = self.exps[start..end].into();
        let deg = exps.iter().map(|&e| e as u32).sum();
        MultiIndex { deg, exps }
    }

    /// All multi-indices in `nvars` variables of total degree exactly `d`,
    /// in graded-lex order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if pos + 1 == n {
                cur[pos] = left;
                out.push(MultiIndex::from_slice(cur));
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        if nvars == 0 {
            if d == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out
    }

    /// All multi-indices of total degree at most `d`, graded-lex.
    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| MultiIndex::of_degree(nvars, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &MultiIndex) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &MultiIndex) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}
