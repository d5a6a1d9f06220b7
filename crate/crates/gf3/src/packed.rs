use crate::F3;

/// A vector over F3 packed into two bit planes: plane `a` marks entries equal
/// to 1, plane `b` entries equal to 2. One u64 pair covers 64 entries, and
/// row operations become a handful of bitwise ops per word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PackedVec {
    len: usize,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl PackedVec {
    pub fn zero(len: usize) -> PackedVec {
        let words = len.div_ceil(64);
        PackedVec {
            len,
            a: vec![0; words],
            b: vec![0; words],
        }
    }

    pub fn from_slice(v: &[F3]) -> PackedVec {
        let mut out = PackedVec::zero(v.len());
        for (i, &c) in v.iter().enumerate() {
            out.set(i, c);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> F3 {
        debug_assert!(i < self.len);
        let (w, s) = (i / 64, i % 64);
        let a = (self.a[w] >> s) & 1;
        let b = (self.b[w] >> s) & 1;
        F3::new((a + 2 * b) as i64)
    }

    #[inline]
    pub fn set(&mut self, i: usize, c: F3) {
        debug_assert!(i < self.len);
        let (w, s) = (i / 64, i % 64);
        let mask = !(1u64 << s);
        self.a[w] &= mask;
        self.b[w] &= mask;
        match c.value() {
            1 => self.a[w] |= 1 << s,
            2 => self.b[w] |= 1 << s,
            _ => {}
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&w| w == 0) && self.b.iter().all(|&w| w == 0)
    }

    /// Index of the first nonzero entry.
    pub fn leading_index(&self) -> Option<usize> {
        for w in 0..self.a.len() {
            let nz = self.a[w] | self.b[w];
            if nz != 0 {
                let i = w * 64 + nz.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
        }
        None
    }

    /// self += other
    pub fn add_assign(&mut self, other: &PackedVec) {
        debug_assert_eq!(self.len, other.len);
        for w in 0..self.a.len() {
            let (a1, b1) = (self.a[w], self.b[w]);
            let (a2, b2) = (other.a[w], other.b[w]);
            let n1 = !(a1 | b1);
            let n2 = !(a2 | b2);
            self.a[w] = (a1 & n2) | (a2 & n1) | (b1 & b2);
            self.b[w] = (b1 & n2) | (b2 & n1) | (a1 & a2);
        }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: F3, other: &PackedVec) {
        match c.value() {
            0 => {}
            1 => self.add_assign(other),
            _ => {
                // adding 2*x is adding the negation, i.e. swapped planes
                debug_assert_eq!(self.len, other.len);
                for w in 0..self.a.len() {
                    let (a1, b1) = (self.a[w], self.b[w]);
                    let (a2, b2) = (other.b[w], other.a[w]);
                    let n1 = !(a1 | b1);
                    let n2 = !(a2 | b2);
                    self.a[w] = (a1 & n2) | (a2 & n1) | (b1 & b2);
                    self.b[w] = (b1 & n2) | (b2 & n1) | (a1 & a2);
                }
            }
        }
    }

    pub fn scale(&mut self, c: F3) {
        match c.value() {
            1 => {}
            2 => std::mem::swap(&mut self.a, &mut self.b),
            _ => {
                self.a.iter_mut().for_each(|w| *w = 0);
                self.b.iter_mut().for_each(|w| *w = 0);
            }
        }
    }

    /// dst[offset + k] += c * src[k] for all k
    pub fn add_shifted(&mut self, c: F3, src: &PackedVec, offset: usize) {
        if c.is_zero() {
            return;
        }
        for (k, v) in src.iter_nonzero() {
            let i = offset + k;
            let cur = self.get(i);
            self.set(i, cur + c * v);
        }
    }

    /// Dot product over F3.
    pub fn dot(&self, other: &PackedVec) -> F3 {
        debug_assert_eq!(self.len, other.len);
        let mut ones: u32 = 0;
        let mut twos: u32 = 0;
        for w in 0..self.a.len() {
            let (a1, b1) = (self.a[w], self.b[w]);
            let (a2, b2) = (other.a[w], other.b[w]);
            let prod_a = (a1 & a2) | (b1 & b2);
            let prod_b = (a1 & b2) | (b1 & a2);
            ones += prod_a.count_ones();
            twos += prod_b.count_ones();
        }
        F3::new((ones + 2 * twos) as i64)
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, F3)> + '_ {
        (0..self.len)
            .map(|i| (i, self.get(i)))
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn to_vec(&self) -> Vec<F3> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl std::fmt::Debug for PackedVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i).value())?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_matches_scalar_arithmetic() {
        let n = 131;
        let mut x: Vec<F3> = (0..n).map(|i| F3::new(i as i64 * 7 + 1)).collect();
        let y: Vec<F3> = (0..n).map(|i| F3::new(i as i64 * 5 + 2)).collect();
        let mut px = PackedVec::from_slice(&x);
        let py = PackedVec::from_slice(&y);
        for c in 0..3 {
            let c = F3::new(c);
            px.axpy(c, &py);
            for i in 0..n {
                x[i] = x[i] + c * y[i];
            }
            assert_eq!(px.to_vec(), x);
        }
    }

    #[test]
    fn leading_index_and_dot() {
        let mut v = PackedVec::zero(200);
        assert_eq!(v.leading_index(), None);
        v.set(77, F3::new(2));
        v.set(150, F3::new(1));
        assert_eq!(v.leading_index(), Some(77));
        let mut w = PackedVec::zero(200);
        w.set(77, F3::new(2));
        w.set(150, F3::new(1));
        // 2*2 + 1*1 = 5 = 2 mod 3
        assert_eq!(v.dot(&w), F3::new(2));
    }
}
