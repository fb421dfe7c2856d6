//! Packed monomials (up to 16 variables, exponents < 128) and monomial orders.

use std::cmp::Ordering;

pub const MAX_VARS: usize = 16;
pub const MAX_EXP: u16 = 127;

const GUARD: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;
const ONES: u128 = 0x0101_0101_0101_0101_0101_0101_0101_0101;

/// Exponent vector packed one byte per variable, variable 0 in the low byte.
/// The top bit of each byte is a guard bit that must stay clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub bits: u128,
    pub deg: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { bits: 0, deg: 0 };

    pub fn from_exps(exps: &[u16]) -> Option<Mono> {
        if exps.len() > MAX_VARS || exps.iter().any(|&e| e > MAX_EXP) {
            return None;
        }
        let mut bits = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            bits |= (e as u128) << (8 * i);
        }
        Some(Mono { bits, deg: exps.iter().map(|&e| e as u32).sum() })
    }

    pub fn var(i: usize) -> Mono {
        Mono { bits: 1u128 << (8 * i), deg: 1 }
    }

    pub fn exp(&self, i: usize) -> u16 {
        ((self.bits >> (8 * i)) & 0x7f) as u16
    }

    pub fn exps(&self, n: usize) -> Vec<u16> {
        (0..n).map(|i| self.exp(i)).collect()
    }

    /// Product, or `None` on exponent overflow.
    #[inline]
    pub fn mul(self, o: Mono) -> Option<Mono> {
        let bits = self.bits + o.bits;
        if bits & GUARD != 0 {
            return None;
        }
        Some(Mono { bits, deg: self.deg + o.deg })
    }

    #[inline]
    pub fn divides(self, o: Mono) -> bool {
        self.deg <= o.deg && ((o.bits | GUARD) - self.bits) & GUARD == GUARD
    }

    /// `self / o`, assuming `o` divides `self`.
    #[inline]
    pub fn div(self, o: Mono) -> Mono {
        Mono { bits: self.bits - o.bits, deg: self.deg - o.deg }
    }

    #[inline]
    fn nonzero_bytes(self) -> u128 {
        ((self.bits | GUARD) - ONES) & GUARD
    }

    #[inline]
    pub fn coprime(self, o: Mono) -> bool {
        self.nonzero_bytes() & o.nonzero_bytes() == 0
    }

    pub fn lcm(self, o: Mono) -> Mono {
        let mut bits = 0u128;
        let mut deg = 0;
        for i in 0..MAX_VARS {
            let e = self.exp(i).max(o.exp(i));
            bits |= (e as u128) << (8 * i);
            deg += e as u32;
        }
        Mono { bits, deg }
    }

    /// Bit i set iff variable i occurs.
    pub fn support(self) -> u16 {
        let nz = self.nonzero_bytes();
        let mut mask = 0u16;
        for i in 0..MAX_VARS {
            if nz >> (8 * i + 7) & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }
}

/// Monomial orders. Variables are ranked x_0 > x_1 > ... in each case;
/// `Block(k)` compares the first k variables by graded reverse lex and breaks
/// ties by graded reverse lex on the rest (an elimination order for them).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MonomialOrder {
    #[default]
    GrevLex,
    Lex,
    Block(usize),
}

fn mask_below(k: usize) -> u128 {
    if k >= MAX_VARS {
        u128::MAX
    } else {
        (1u128 << (8 * k)) - 1
    }
}

fn masked_degree(bits: u128, mask: u128) -> u32 {
    (bits & mask).to_le_bytes().iter().map(|&b| b as u32).sum()
}

impl MonomialOrder {
    #[inline]
    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match *self {
            MonomialOrder::GrevLex => a.deg.cmp(&b.deg).then_with(|| b.bits.cmp(&a.bits)),
            MonomialOrder::Lex => a.bits.swap_bytes().cmp(&b.bits.swap_bytes()),
            MonomialOrder::Block(k) => {
                let m = mask_below(k);
                let (a1, b1) = (a.bits & m, b.bits & m);
                masked_degree(a1, m)
                    .cmp(&masked_degree(b1, m))
                    .then_with(|| b1.cmp(&a1))
                    .then_with(|| (a.deg - masked_degree(a1, m)).cmp(&(b.deg - masked_degree(b1, m))))
                    .then_with(|| (b.bits & !m).cmp(&(a.bits & !m)))
            }
        }
    }
}
