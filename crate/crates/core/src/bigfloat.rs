//! Minimal fixed-precision binary floating point (640-bit mantissa) for the
//! one computation that genuinely exceeds f64: the smallest eigenvalue of an
//! arc Gram matrix, which decays like e^{−cM} far below 10^{−308}.
//!
//! Value = sign · mant · 2^exp, with `mant` a little-endian 10-limb integer
//! normalized so its top bit is set. Operations truncate (no directed
//! rounding); with 640 bits of precision the accumulated error over an
//! O(n³) elimination stays below 10^{−170}, ample for eigenvalues down to
//! e^{−300} at 0.1% relative accuracy.

pub const LIMBS: usize = 10;
const BITS: i64 = 64 * LIMBS as i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigF {
    /// −1, 0, or +1.
    pub sign: i8,
    pub exp: i64,
    pub mant: [u64; LIMBS],
}

// exp = -638
pub const PI: BigF = BigF {
    sign: 1,
    exp: -638,
    mant: [
        0xf44c42e9a637ed6b,
        0xe485b576625e7ec6,
        0x4fe1356d6d51c245,
        0x302b0a6df25f1437,
        0xef9519b3cd3a431b,
        0x514a08798e3404dd,
        0x020bbea63b139b22,
        0x29024e088a67cc74,
        0xc4c6628b80dc1cd1,
        0xc90fdaa22168c234,
    ],
};

// exp = -639
pub const SQRT2: BigF = BigF {
    sign: 1,
    exp: -639,
    mant: [
        0x53059c6011bc337b,
        0xd2202e8742af1f4e,
        0x780487363dfa2768,
        0x0f74a85e439c7b4a,
        0xa8b1fe6fdc83db39,
        0x4afc83043ab8a2c3,
        0xed17ac8583339915,
        0x1d6f60ba893ba84c,
        0x597d89b3754abe9f,
        0xb504f333f9de6484,
    ],
};

pub const ZERO: BigF = BigF { sign: 0, exp: 0, mant: [0; LIMBS] };

/// Index of the highest set bit across the limb array, or None if zero.
fn top_bit(m: &[u64; LIMBS]) -> Option<i64> {
    for i in (0..LIMBS).rev() {
        if m[i] != 0 {
            return Some(64 * i as i64 + 63 - m[i].leading_zeros() as i64);
        }
    }
    None
}

/// Shift the limb array left by `k` bits (k ≥ 0), dropping overflow.
fn shl(m: &[u64; LIMBS], k: i64) -> [u64; LIMBS] {
    let mut out = [0u64; LIMBS];
    if k >= BITS {
        return out;
    }
    let limb = (k / 64) as usize;
    let bit = (k % 64) as u32;
    for i in (0..LIMBS).rev() {
        let src = i as i64 - limb as i64;
        if src < 0 {
            continue;
        }
        let src = src as usize;
        let mut v = m[src] << bit;
        if bit > 0 && src > 0 {
            v |= m[src - 1] >> (64 - bit);
        }
        out[i] = v;
    }
    out
}

/// Shift right by `k` bits (k ≥ 0), truncating.
fn shr(m: &[u64; LIMBS], k: i64) -> [u64; LIMBS] {
    let mut out = [0u64; LIMBS];
    if k >= BITS {
        return out;
    }
    let limb = (k / 64) as usize;
    let bit = (k % 64) as u32;
    for i in 0..LIMBS {
        let src = i + limb;
        if src >= LIMBS {
            continue;
        }
        let mut v = m[src] >> bit;
        if bit > 0 && src + 1 < LIMBS {
            v |= m[src + 1] << (64 - bit);
        }
        out[i] = v;
    }
    out
}

fn add_mant(a: &[u64; LIMBS], b: &[u64; LIMBS]) -> ([u64; LIMBS], bool) {
    let mut out = [0u64; LIMBS];
    let mut carry = false;
    for i in 0..LIMBS {
        let (s1, c1) = a[i].overflowing_add(b[i]);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        out[i] = s2;
        carry = c1 || c2;
    }
    (out, carry)
}

/// a − b assuming a ≥ b as integers.
fn sub_mant(a: &[u64; LIMBS], b: &[u64; LIMBS]) -> [u64; LIMBS] {
    let mut out = [0u64; LIMBS];
    let mut borrow = false;
    for i in 0..LIMBS {
        let (d1, b1) = a[i].overflowing_sub(b[i]);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        out[i] = d2;
        borrow = b1 || b2;
    }
    debug_assert!(!borrow);
    out
}

fn cmp_mant(a: &[u64; LIMBS], b: &[u64; LIMBS]) -> std::cmp::Ordering {
    for i in (0..LIMBS).rev() {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

impl BigF {
    fn normalized(sign: i8, exp: i64, mant: [u64; LIMBS]) -> BigF {
        match top_bit(&mant) {
            None => ZERO,
            Some(t) => {
                let want = BITS - 1;
                if t < want {
                    BigF { sign, exp: exp - (want - t), mant: shl(&mant, want - t) }
                } else {
                    BigF { sign, exp, mant }
                }
            }
        }
    }

    pub fn from_f64(x: f64) -> BigF {
        if x == 0.0 {
            return ZERO;
        }
        let sign = if x > 0.0 { 1 } else { -1 };
        let (m, e) = frexp(x.abs()); // x = m·2^e, m ∈ [0.5, 1)
        let mant_u = (m * (1u128 << 63) as f64 * 2.0) as u128; // 64 significant bits
        let mut mant = [0u64; LIMBS];
        mant[LIMBS - 1] = (mant_u >> 0) as u64;
        BigF::normalized(sign, e - 64 - (BITS - 64), mant)
    }

    pub fn from_i64(x: i64) -> BigF {
        BigF::from_f64(x as f64) // exact: |x| < 2^53 in all uses; larger handled below
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        // value ≈ m·2^{e2} with m ∈ [0.5, 1); apply the exponent in two
        // halves so the scale factor itself cannot under/overflow first
        let m = self.mant[LIMBS - 1] as f64 / 2f64.powi(64)
            + self.mant[LIMBS - 2] as f64 / 2f64.powi(128);
        let e2 = self.exp + BITS;
        if e2 > 1100 {
            return self.sign as f64 * f64::INFINITY;
        }
        if e2 < -1140 {
            return 0.0;
        }
        let h1 = (e2 / 2) as i32;
        let h2 = (e2 - e2 / 2) as i32;
        self.sign as f64 * m * 2f64.powi(h1) * 2f64.powi(h2)
    }

    /// Base-2 logarithm (f64 accuracy), defined for positive values.
    pub fn log2_abs(&self) -> f64 {
        assert!(self.sign != 0);
        let hi = self.mant[LIMBS - 1] as f64 / 2f64.powi(64)
            + self.mant[LIMBS - 2] as f64 / 2f64.powi(128);
        hi.log2() + (self.exp + BITS) as f64
    }

    pub fn neg(&self) -> BigF {
        BigF { sign: -self.sign, ..*self }
    }

    pub fn abs(&self) -> BigF {
        BigF { sign: self.sign.abs(), ..*self }
    }

    pub fn add(&self, other: &BigF) -> BigF {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        // order by exponent so a has the larger scale
        let (a, b) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let shift = a.exp - b.exp;
        let bm = shr(&b.mant, shift);
        if self.sign == other.sign {
            let (sum, carry) = add_mant(&a.mant, &bm);
            if carry {
                let mut m = shr(&sum, 1);
                m[LIMBS - 1] |= 1u64 << 63;
                BigF { sign: a.sign, exp: a.exp + 1, mant: m }
            } else {
                BigF { sign: a.sign, exp: a.exp, mant: sum }
            }
        } else {
            match cmp_mant(&a.mant, &bm) {
                std::cmp::Ordering::Equal => ZERO,
                std::cmp::Ordering::Greater => {
                    BigF::normalized(a.sign, a.exp, sub_mant(&a.mant, &bm))
                }
                std::cmp::Ordering::Less => {
                    BigF::normalized(b.sign, a.exp, sub_mant(&bm, &a.mant))
                }
            }
        }
    }

    pub fn sub(&self, other: &BigF) -> BigF {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BigF) -> BigF {
        if self.sign == 0 || other.sign == 0 {
            return ZERO;
        }
        // schoolbook 10×10 → 20 limbs
        let mut prod = [0u64; 2 * LIMBS];
        for i in 0..LIMBS {
            let mut carry: u128 = 0;
            for j in 0..LIMBS {
                let cur = prod[i + j] as u128
                    + self.mant[i] as u128 * other.mant[j] as u128
                    + carry;
                prod[i + j] = cur as u64;
                carry = cur >> 64;
            }
            prod[i + LIMBS] = prod[i + LIMBS].wrapping_add(carry as u64);
        }
        // top bit is at position 2·BITS−1 or 2·BITS−2
        let top_set = prod[2 * LIMBS - 1] >> 63 != 0;
        let shift = if top_set { BITS } else { BITS - 1 };
        let mut mant = [0u64; LIMBS];
        let limb = (shift / 64) as usize;
        let bit = (shift % 64) as u32;
        for i in 0..LIMBS {
            let src = i + limb;
            let mut v = if src < 2 * LIMBS { prod[src] >> bit } else { 0 };
            if bit > 0 && src + 1 < 2 * LIMBS {
                v |= prod[src + 1] << (64 - bit);
            }
            mant[i] = v;
        }
        BigF {
            sign: self.sign * other.sign,
            exp: self.exp + other.exp + shift,
            mant,
        }
    }

    /// Reciprocal by Newton iteration r ← r(2 − b·r), seeded from f64.
    pub fn recip(&self) -> BigF {
        assert!(self.sign != 0, "division by zero");
        // seed from the top two limbs: b ≈ m·2^{exp+BITS}, m ∈ [0.5, 1)
        let m = self.mant[LIMBS - 1] as f64 / 2f64.powi(64)
            + self.mant[LIMBS - 2] as f64 / 2f64.powi(128);
        let mut r = BigF::from_f64(1.0 / m);
        r.exp -= self.exp + BITS;
        r.sign = self.sign;
        let two = BigF::from_f64(2.0);
        let b = self.abs();
        let mut r_abs = r.abs();
        for _ in 0..5 {
            let t = two.sub(&b.mul(&r_abs));
            r_abs = r_abs.mul(&t);
        }
        BigF { sign: self.sign, ..r_abs }
    }

    pub fn div(&self, other: &BigF) -> BigF {
        self.mul(&other.recip())
    }

    /// Rational constructor p/q (exact numerator and denominator).
    pub fn ratio(p: i64, q: i64) -> BigF {
        BigF::from_i64(p).div(&BigF::from_i64(q))
    }
}

/// Decompose |x| = m·2^e with m ∈ [0.5, 1).
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    if exp_field == 0 {
        // subnormal: scale up
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = exp_field - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}
