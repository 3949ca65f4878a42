//! Good words in the free group on `a`, `b`.
//!
//! A good word is `a^k b^{s1} a^{r1} b^{s2} a^{r2} ... b^{sm} a^{rm}` where the
//! b-exponents alternate in sign. Interior a-exponents are never zero: a zero
//! interior power collapses the two neighbouring b-letters.

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("not a good word: {0}")]
    NotGood(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
}

/// Freely reduced word as a run-length list of letters with nonzero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeWord(pub Vec<(Letter, i64)>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    pub fn push(&mut self, l: Letter, e: i64) {
        if e == 0 {
            return;
        }
        match self.0.last_mut() {
            Some((last, le)) if *last == l => {
                *le += e;
                if *le == 0 {
                    self.0.pop();
                }
            }
            _ => self.0.push((l, e)),
        }
    }

    pub fn from_letters<I: IntoIterator<Item = (Letter, i64)>>(it: I) -> Self {
        let mut w = FreeWord::identity();
        for (l, e) in it {
            w.push(l, e);
        }
        w
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut w = self.clone();
        for &(l, e) in &other.0 {
            w.push(l, e);
        }
        w
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord::from_letters(self.0.iter().rev().map(|&(l, e)| (l, -e)))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Impose b^2 = 1: reduce every b-exponent mod 2 and re-reduce until stable.
    pub fn reduce_order2(&self) -> FreeWord {
        let mut cur = self.clone();
        loop {
            let next =
                FreeWord::from_letters(cur.0.iter().map(|&(l, e)| match l {
                    Letter::B => (l, e.rem_euclid(2)),
                    Letter::A => (l, e),
                }));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

/// Parity / balance / regularity of a good word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Classification {
    pub even: bool,
    pub balanced: bool,
    pub regular: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}",
            if self.even { "even" } else { "odd" },
            if self.balanced { "balanced" } else { "unbalanced" },
            if self.regular { "regular" } else { "irregular" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoodWord {
    pub leading_a: i64,
    /// `(s, r)`: b-exponent ±1 followed by the a-exponent trailing it.
    pub syllables: Vec<(i8, i64)>,
    pub order2: bool,
}

impl GoodWord {
    pub fn identity(order2: bool) -> Self {
        GoodWord { leading_a: 0, syllables: Vec::new(), order2 }
    }

    pub fn is_identity(&self) -> bool {
        self.leading_a == 0 && self.syllables.is_empty()
    }

    /// Number of b-letters.
    pub fn m(&self) -> usize {
        self.syllables.len()
    }

    pub fn a_exponent_sum(&self) -> i64 {
        self.leading_a + self.syllables.iter().map(|&(_, r)| r).sum::<i64>()
    }

    pub fn max_abs_a(&self) -> i64 {
        self.syllables
            .iter()
            .map(|&(_, r)| r.abs())
            .chain(std::iter::once(self.leading_a.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn to_free(&self) -> FreeWord {
        let mut w = FreeWord::identity();
        w.push(Letter::A, self.leading_a);
        for &(s, r) in &self.syllables {
            w.push(Letter::B, s as i64);
            w.push(Letter::A, r);
        }
        w
    }

    /// Build from a free word. In order-2 mode b^2 = 1 is imposed first and the
    /// b-signs are reassigned to alternate starting from +1.
    pub fn from_free(w: &FreeWord, order2: bool) -> Result<Self, WordError> {
        let w = if order2 { w.reduce_order2() } else { w.clone() };
        let mut leading_a = 0;
        let mut syllables: Vec<(i8, i64)> = Vec::new();
        for &(l, e) in &w.0 {
            match l {
                Letter::A => match syllables.last_mut() {
                    Some(last) => last.1 += e,
                    None => leading_a += e,
                },
                Letter::B => {
                    if e.abs() != 1 {
                        return Err(WordError::NotGood(format!("b-exponent {e} is not ±1")));
                    }
                    syllables.push((e as i8, 0));
                }
            }
        }
        if order2 {
            let mut s = 1i8;
            for syl in syllables.iter_mut() {
                syl.0 = s;
                s = -s;
            }
        } else {
            for pair in syllables.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(WordError::NotGood("b-exponents do not alternate".into()));
                }
            }
        }
        Ok(GoodWord { leading_a, syllables, order2 })
    }

    pub fn classify(&self) -> Classification {
        Classification {
            even: self.a_exponent_sum().rem_euclid(2) == 0,
            balanced: self.m() % 2 == 0,
            regular: self.syllables.first().map_or(true, |&(s, _)| s == 1),
        }
    }

    /// Flip every b-sign.
    pub fn to_regular(&self) -> GoodWord {
        if self.classify().regular {
            return self.clone();
        }
        self.flip_b()
    }

    pub fn flip_b(&self) -> GoodWord {
        GoodWord {
            leading_a: self.leading_a,
            syllables: self.syllables.iter().map(|&(s, r)| (-s, r)).collect(),
            order2: self.order2,
        }
    }

    pub fn append_a(&self) -> GoodWord {
        self.append(Letter::A, 1).expect("appending a keeps a good word")
    }

    /// Right-multiply by a letter power and renormalize. Signs are taken
    /// literally, so appending a b-letter fails unless it continues the alternation.
    pub fn append(&self, l: Letter, e: i64) -> Result<GoodWord, WordError> {
        let mut f = self.to_free();
        f.push(l, e);
        GoodWord::from_free(&f, false).map(|mut w| {
            w.order2 = self.order2;
            w
        })
    }

    pub fn invert(&self) -> GoodWord {
        let inv = self.to_free().inverse();
        let mut w = GoodWord::from_free(&inv, false).expect("inverse of a good word is good");
        w.order2 = self.order2;
        if self.order2 {
            w = GoodWord::from_free(&w.to_free(), true).unwrap();
        }
        w
    }

    /// `self ∗ other = self(a, other(a, b))`. Both words are treated in order-2 mode.
    /// The identity result is returned as a word with `is_identity()`.
    pub fn star(&self, other: &GoodWord) -> GoodWord {
        let sub = other.to_free();
        let sub_inv = sub.inverse();
        let mut out = FreeWord::identity();
        out.push(Letter::A, self.leading_a);
        for &(s, r) in &self.syllables {
            out = out.concat(if s > 0 { &sub } else { &sub_inv });
            out.push(Letter::A, r);
        }
        GoodWord::from_free(&out, true).expect("order-2 normalization always succeeds")
    }

    /// Regular balanced even word whose quaternion defines this word's polynomials,
    /// following the order irregular -> odd -> unbalanced.
    pub fn core(&self) -> GoodWord {
        let mut w = self.to_regular();
        if !w.classify().even {
            w = w.append_a();
        }
        if !w.classify().balanced {
            // regular and unbalanced, so the last b-letter is b^{+1}
            w = w.append(Letter::B, -1).expect("b^-1 continues the alternation");
        }
        w.order2 = false;
        w
    }

    /// Decompose a regular balanced even word into unit tokens of
    /// `G1 = a^2`, `G2 = b a^2 b^-1`, `G3 = [b,a] = b a b^-1 a^-1`.
    pub fn decompose_rbe(&self) -> Result<Vec<GenToken>, WordError> {
        let c = self.classify();
        if !(c.regular && c.balanced && c.even) {
            return Err(WordError::Precondition(format!(
                "decompose_rbe needs a regular balanced even word, got {c}"
            )));
        }
        let mut out = Vec::new();
        let k = self.leading_a;
        let mut carry = 0;
        if k.rem_euclid(2) == 0 {
            push_pow(&mut out, Gen::G1, k / 2);
        } else {
            // a b = [a,b] b a = G3^{-1} b a
            push_pow(&mut out, Gen::G1, (k - 1).div_euclid(2));
            push_pow(&mut out, Gen::G3, -1);
            carry = 1;
        }
        for pair in self.syllables.chunks(2) {
            let mut i = pair[0].1 + carry;
            let mut j = pair[1].1;
            carry = 0;
            let mixed = (i - j).rem_euclid(2) == 1;
            if mixed {
                j -= 1;
            }
            if i.rem_euclid(2) == 0 {
                push_pow(&mut out, Gen::G2, i / 2);
                push_pow(&mut out, Gen::G1, j / 2);
            } else {
                i -= 1;
                push_pow(&mut out, Gen::G2, i / 2);
                push_pow(&mut out, Gen::G3, 1);
                push_pow(&mut out, Gen::G1, (j + 1) / 2);
            }
            if mixed {
                push_pow(&mut out, Gen::G3, -1);
                carry = 1;
            }
        }
        debug_assert_eq!(carry, 0, "even word leaves no carry");
        Ok(out)
    }
}

fn push_pow(out: &mut Vec<GenToken>, gen: Gen, n: i64) {
    for _ in 0..n.unsigned_abs() {
        out.push(GenToken { gen, inverse: n < 0 });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    G1,
    G2,
    G3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenToken {
    pub gen: Gen,
    pub inverse: bool,
}

impl GenToken {
    pub fn free_word(&self) -> FreeWord {
        use Letter::*;
        let w = match self.gen {
            Gen::G1 => FreeWord::from_letters([(A, 2)]),
            Gen::G2 => FreeWord::from_letters([(B, 1), (A, 2), (B, -1)]),
            Gen::G3 => FreeWord::from_letters([(B, 1), (A, 1), (B, -1), (A, -1)]),
        };
        if self.inverse {
            w.inverse()
        } else {
            w
        }
    }
}

impl fmt::Display for GenToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.gen {
            Gen::G1 => "G1",
            Gen::G2 => "G2",
            Gen::G3 => "G3",
        };
        if self.inverse {
            write!(f, "{name}^-1")
        } else {
            write!(f, "{name}")
        }
    }
}

/// Free expansion of a token list.
pub fn expand_tokens(tokens: &[GenToken]) -> FreeWord {
    tokens.iter().fold(FreeWord::identity(), |acc, t| acc.concat(&t.free_word()))
}

fn fmt_power(f: &mut fmt::Formatter<'_>, ch: char, e: i64) -> fmt::Result {
    if e == 1 {
        write!(f, "{ch}")
    } else {
        write!(f, "{ch}^{e}")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, &(l, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            fmt_power(f, if l == Letter::A { 'a' } else { 'b' }, e)?;
        }
        Ok(())
    }
}

impl fmt::Display for GoodWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_free().fmt(f)
    }
}

/// Parse a word. Grammar: tokens `a`, `b`, `A` (= a^-1), `B` (= b^-1), each with an
/// optional `^<int>` exponent, whitespace ignored; `[b,a]` expands to `b a B A`
/// (any two letters may appear inside the brackets); `1` is the identity.
pub fn parse_word(text: &str, order2: bool) -> Result<GoodWord, WordError> {
    let free = parse_free(text)?;
    GoodWord::from_free(&free, order2)
}

pub fn parse_free(text: &str) -> Result<FreeWord, WordError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut out = FreeWord::identity();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let letter = |c: u8| -> Option<(Letter, i64)> {
        match c {
            b'a' => Some((Letter::A, 1)),
            b'b' => Some((Letter::B, 1)),
            b'A' => Some((Letter::A, -1)),
            b'B' => Some((Letter::B, -1)),
            _ => None,
        }
    };
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        let c = bytes[pos];
        let base: FreeWord = if c == b'[' {
            pos += 1;
            skip_ws(&mut pos);
            let (l1, e1) = bytes.get(pos).and_then(|&c| letter(c)).ok_or_else(|| WordError::Syntax {
                pos,
                msg: "expected letter in commutator".into(),
            })?;
            pos += 1;
            skip_ws(&mut pos);
            if bytes.get(pos) != Some(&b',') {
                return Err(WordError::Syntax { pos, msg: "expected ','".into() });
            }
            pos += 1;
            skip_ws(&mut pos);
            let (l2, e2) = bytes.get(pos).and_then(|&c| letter(c)).ok_or_else(|| WordError::Syntax {
                pos,
                msg: "expected letter in commutator".into(),
            })?;
            pos += 1;
            skip_ws(&mut pos);
            if bytes.get(pos) != Some(&b']') {
                return Err(WordError::Syntax { pos, msg: "expected ']'".into() });
            }
            pos += 1;
            FreeWord::from_letters([(l1, e1), (l2, e2), (l1, -e1), (l2, -e2)])
        } else if c == b'1' {
            pos += 1;
            FreeWord::identity()
        } else if let Some((l, e)) = letter(c) {
            pos += 1;
            FreeWord::from_letters([(l, e)])
        } else {
            return Err(WordError::Syntax { pos, msg: format!("unexpected character '{}'", c as char) });
        };
        skip_ws(&mut pos);
        let mut exp = 1i64;
        if bytes.get(pos) == Some(&b'^') {
            pos += 1;
            skip_ws(&mut pos);
            let start = pos;
            if matches!(bytes.get(pos), Some(b'-') | Some(b'+')) {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits = &text[start..pos];
            exp = digits
                .parse::<i64>()
                .map_err(|_| WordError::Syntax { pos: start, msg: format!("bad exponent '{digits}'") })?;
        }
        let piece = if exp >= 0 { base.clone() } else { base.inverse() };
        for _ in 0..exp.unsigned_abs() {
            out = out.concat(&piece);
        }
    }
    Ok(out)
}

/// All order-2-mode words `b a^{r1} b a^{r2} ... b` with `1..=max_syllables`
/// b-letters and interior exponents in `[-max_exp, max_exp] \ {0}`, in search order:
/// syllable count, then max |exponent|, then lexicographic on the exponents.
pub fn enumerate_order2(max_syllables: usize, max_exp: i64) -> Vec<GoodWord> {
    let mut out = Vec::new();
    for m in 1..=max_syllables {
        let mut level: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 1..m {
            let mut next = Vec::with_capacity(level.len() * (2 * max_exp as usize));
            for prefix in &level {
                for r in -max_exp..=max_exp {
                    if r != 0 {
                        let mut p = prefix.clone();
                        p.push(r);
                        next.push(p);
                    }
                }
            }
            level = next;
        }
        level.sort_by_key(|rs| (rs.iter().map(|r| r.abs()).max().unwrap_or(0), rs.clone()));
        for rs in level {
            out.push(order2_from_exponents(&rs));
        }
    }
    out
}

/// `b a^{r1} b a^{r2} ... a^{r_{m-1}} b` in order-2 form.
pub fn order2_from_exponents(rs: &[i64]) -> GoodWord {
    let mut syl = Vec::with_capacity(rs.len() + 1);
    let mut s = 1i8;
    for &r in rs {
        syl.push((s, r));
        s = -s;
    }
    syl.push((s, 0));
    GoodWord { leading_a: 0, syllables: syl, order2: true }
}

/// Random normalized good word with `m` b-letters (exactly, unless collapse is
/// impossible since interior exponents are drawn nonzero) and |a-exponents| <= max_exp.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, m: usize, max_exp: i64, regular: Option<bool>) -> GoodWord {
    let s1: i8 = match regular {
        Some(true) => 1,
        Some(false) => -1,
        None => {
            if rng.gen_bool(0.5) {
                1
            } else {
                -1
            }
        }
    };
    let leading_a = rng.gen_range(-max_exp..=max_exp);
    let mut syllables = Vec::with_capacity(m);
    let mut s = s1;
    for idx in 0..m {
        let r = if idx + 1 == m {
            rng.gen_range(-max_exp..=max_exp)
        } else {
            let mut r = 0;
            while r == 0 {
                r = rng.gen_range(-max_exp..=max_exp);
            }
            r
        };
        syllables.push((s, r));
        s = -s;
    }
    GoodWord { leading_a, syllables, order2: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> GoodWord {
        parse_word(s, false).unwrap()
    }

    #[test]
    fn parse_examples() {
        let x = w("b a^2 b^-1");
        assert_eq!(x.syllables, vec![(1, 2), (-1, 0)]);
        assert_eq!(x.leading_a, 0);
        let y = parse_word("bab", true).unwrap();
        assert_eq!(y.syllables, vec![(1, 1), (-1, 0)]);
        assert_eq!(w("b a^3 b^-1 a^0 b a b^-1"), w("b a^4 b^-1"));
        assert_eq!(w("[b,a]"), w("b a B A"));
        assert_eq!(w("baBA").to_string(), "b a b^-1 a^-1");
        assert!(matches!(parse_word("b a b", false), Err(WordError::NotGood(_))));
        assert!(matches!(parse_word("b c", false), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("b^x", false), Err(WordError::Syntax { .. })));
        assert!(w("").is_identity());
        assert!(w("1").is_identity());
    }

    #[test]
    fn order2_reduction() {
        assert_eq!(parse_word("b b a", true).unwrap(), parse_word("a", true).unwrap());
        assert_eq!(parse_word("b a b a^-1 b", true).unwrap().to_string(), "b a b^-1 a^-1 b");
        assert_eq!(parse_word("B a B", true).unwrap().to_string(), "b a b^-1");
        assert_eq!(parse_word("b a^2 b^3 a b", true).unwrap().to_string(), "b a^2 b^-1 a b");
    }

    #[test]
    fn classification() {
        let c = w("b a b^-1").classify();
        assert_eq!(c, Classification { even: false, balanced: true, regular: true });
        let c = w("b a^2 b^-1 a^2").classify();
        assert_eq!(c, Classification { even: true, balanced: true, regular: true });
        assert!(!w("b^-1 a b").classify().regular);
        assert!(w("a^3").classify().regular);
    }

    #[test]
    fn unary_ops() {
        assert_eq!(w("b^-1 a b").to_regular(), w("b a b^-1"));
        assert_eq!(w("b a b^-1").append_a(), w("b a b^-1 a"));
        assert_eq!(w("b a^2 b^-1").invert(), w("b a^-2 b^-1"));
        assert_eq!(w("b a b^-1").append_a().classify().even, true);
    }

    #[test]
    fn star_examples() {
        let x = parse_word("b a b^-1", true).unwrap();
        assert_eq!(x.star(&x).to_string(), "b a b^-1 a b a^-1 b^-1");
        let a = parse_word("a", true).unwrap();
        assert_eq!(a.star(&x), a);
        let b = parse_word("b", true).unwrap();
        assert!(b.star(&GoodWord::identity(true)).is_identity());
    }

    #[test]
    fn decompose_examples() {
        use Gen::*;
        let t = |g, inv| GenToken { gen: g, inverse: inv };
        assert_eq!(w("b a^2 b^-1").decompose_rbe().unwrap(), vec![t(G2, false)]);
        assert_eq!(w("b a b^-1 a").decompose_rbe().unwrap(), vec![t(G3, false), t(G1, false)]);
        let x = w("b a b^-1 a^-1 b a b^-1 a");
        let toks = x.decompose_rbe().unwrap();
        assert_eq!(expand_tokens(&toks), x.to_free());
        assert_eq!(toks, vec![t(G3, false), t(G3, false), t(G1, false)]);
        assert!(w("b a b^-1").decompose_rbe().is_err());
    }

    #[test]
    fn enumeration_order() {
        let ws = enumerate_order2(3, 2);
        assert_eq!(ws.len(), 1 + 4 + 16);
        assert_eq!(ws[0].to_string(), "b");
        assert_eq!(ws[1].to_string(), "b a^-1 b^-1");
        assert_eq!(ws[2].to_string(), "b a b^-1");
        assert!(ws.iter().all(|x| x.order2));
    }

    fn word_strategy(max_m: usize, max_exp: i64) -> impl Strategy<Value = GoodWord> {
        (any::<u64>(), 0..=max_m).prop_map(move |(seed, m)| {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            random_word(&mut rng, m, max_exp, None)
        })
    }

    fn rbe_strategy() -> impl Strategy<Value = GoodWord> {
        (any::<u64>(), 0..=5usize).prop_map(|(seed, half)| {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut x = random_word(&mut rng, 2 * half, 5, Some(true));
            if !x.classify().even {
                x = x.append_a();
            }
            x
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn decompose_expands_back(x in rbe_strategy()) {
            let toks = x.decompose_rbe().unwrap();
            prop_assert_eq!(expand_tokens(&toks), x.to_free());
        }
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(x in word_strategy(8, 5)) {
            prop_assert_eq!(parse_word(&x.to_string(), false).unwrap(), x);
        }

        #[test]
        fn invert_involution(x in word_strategy(8, 5)) {
            prop_assert_eq!(x.invert().invert(), x.clone());
            prop_assert!(x.to_free().concat(&x.invert().to_free()).is_identity());
        }

        #[test]
        fn star_associative(a in word_strategy(3, 2), b in word_strategy(3, 2), c in word_strategy(3, 2)) {
            let a = GoodWord::from_free(&a.to_free(), true).unwrap();
            let b = GoodWord::from_free(&b.to_free(), true).unwrap();
            let c = GoodWord::from_free(&c.to_free(), true).unwrap();
            prop_assert_eq!(a.star(&b).star(&c), a.star(&b.star(&c)));
        }

        #[test]
        fn star_stays_good(a in word_strategy(4, 3), b in word_strategy(4, 3)) {
            let a = GoodWord::from_free(&a.to_free(), true).unwrap();
            let b = GoodWord::from_free(&b.to_free(), true).unwrap();
            let s = a.star(&b);
            prop_assert!(s.order2);
            prop_assert!(s.syllables.windows(2).all(|p| p[0].0 != p[1].0));
        }
    }
}
