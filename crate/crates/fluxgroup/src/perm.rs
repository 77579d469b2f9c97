//! Permutations on a small point set.
//!
//! Composition follows `(g * h)(x) = g(h(x))`: the right factor acts first.

use std::fmt;

use crate::GroupError;

/// Largest supported degree. Images are stored as bytes.
pub const MAX_DEGREE: usize = 255;

/// A permutation of `{0, .., k-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        assert!((1..=MAX_DEGREE).contains(&degree), "degree out of range");
        Perm {
            images: (0..degree).map(|i| i as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self, GroupError> {
        let k = images.len();
        if k == 0 || k > MAX_DEGREE {
            return Err(GroupError::BadDegree(k));
        }
        let mut seen = vec![false; k];
        for &x in &images {
            let x = x as usize;
            if x >= k || seen[x] {
                return Err(GroupError::NotPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(GroupError::BadDegree(degree));
        }
        let mut images: Vec<u8> = (0..degree).map(|i| i as u8).collect();
        let mut touched = vec![false; degree];
        for cyc in cycles {
            for (i, &p) in cyc.iter().enumerate() {
                if p >= degree {
                    return Err(GroupError::NotPermutation(format!(
                        "point {} exceeds degree {}",
                        p + 1,
                        degree
                    )));
                }
                if touched[p] {
                    return Err(GroupError::NotPermutation(format!(
                        "point {} repeated",
                        p + 1
                    )));
                }
                touched[p] = true;
                images[p] = cyc[(i + 1) % cyc.len()] as u8;
            }
        }
        Ok(Perm { images })
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)` or `(345)`.
    ///
    /// Digits inside a cycle without separators are read as single points.
    pub fn parse(text: &str, degree: usize) -> Result<Self, GroupError> {
        let cycles = parse_cycles(text, 1)?;
        let mut zero_based = Vec::with_capacity(cycles.len());
        for cyc in cycles {
            zero_based.push(cyc.into_iter().map(|p| p - 1).collect::<Vec<_>>());
        }
        Self::from_cycles(degree, &zero_based)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`, i.e. `other` applied first.
    pub fn compose(&self, other: &Perm) -> Result<Perm, GroupError> {
        if self.degree() != other.degree() {
            return Err(GroupError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.mul(other))
    }

    /// Unchecked composition; panics on degree mismatch.
    pub fn mul(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm { images: inv }
    }

    /// `self * g * self^-1`.
    pub fn conjugate(&self, g: &Perm) -> Perm {
        self.mul(g).mul(&self.inverse())
    }

    pub fn pow(&self, n: i64) -> Perm {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..n.unsigned_abs() {
            out = base.mul(&out);
        }
        out
    }

    pub fn order(&self) -> usize {
        let mut acc = 1usize;
        for c in self.cycles() {
            acc = lcm(acc, c.len());
        }
        acc
    }

    /// Non-trivial cycles, each starting at its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }

    /// Concatenated canonical cycle listing; used as a human-readable ordering key.
    pub fn cycle_key(&self) -> Vec<usize> {
        self.cycles().into_iter().flatten().collect()
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self)
    }
}

/// Parses a cycle list; reports 1-based columns relative to `text` on error.
pub(crate) fn parse_cycles(text: &str, line: usize) -> Result<Vec<Vec<usize>>, GroupError> {
    let err = |col: usize, msg: &str| GroupError::Parse {
        line,
        col,
        msg: msg.to_string(),
    };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut cycles = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c != '(' {
            return Err(err(i + 1, "expected '('"));
        }
        let open = i;
        i += 1;
        let mut body = String::new();
        while i < chars.len() && chars[i] != ')' {
            if chars[i] == '(' {
                return Err(err(i + 1, "nested '('"));
            }
            body.push(chars[i]);
            i += 1;
        }
        if i == chars.len() {
            return Err(err(open + 1, "unclosed cycle"));
        }
        i += 1;
        let tokens: Vec<&str> = body
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty())
            .collect();
        let mut cyc = Vec::new();
        if tokens.len() == 1 && tokens[0].len() > 1 {
            for (j, ch) in tokens[0].chars().enumerate() {
                let d = ch
                    .to_digit(10)
                    .ok_or_else(|| err(open + 2 + j, "expected digit"))?;
                cyc.push(d as usize);
            }
        } else {
            for t in tokens {
                let p: usize = t
                    .parse()
                    .map_err(|_| err(open + 2, &format!("bad point '{t}'")))?;
                cyc.push(p);
            }
        }
        if cyc.iter().any(|&p| p == 0) {
            return Err(err(open + 1, "points are 1-based"));
        }
        if cyc.len() > 1 {
            cycles.push(cyc);
        }
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_compact_and_spaced_agree() {
        let a = Perm::parse("(345)", 5).unwrap();
        let b = Perm::parse("(3 4 5)", 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(3 4 5)");
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let g = Perm::parse("(1 2)", 3).unwrap();
        let h = Perm::parse("(2 3)", 3).unwrap();
        // h sends 1 to 1, g then sends 1 to 2.
        assert_eq!(g.mul(&h).apply(0), 1);
        assert_eq!(g.mul(&h), Perm::parse("(1 2 3)", 3).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Perm::parse("(1 1)", 3).is_err());
        assert!(Perm::parse("(1 4)", 3).is_err());
        assert!(Perm::parse("1 2", 3).is_err());
        assert!(Perm::parse("(1 2", 3).is_err());
        assert!(Perm::from_images(vec![0, 0]).is_err());
        let g = Perm::identity(3);
        let h = Perm::identity(4);
        assert_eq!(g.compose(&h), Err(GroupError::DegreeMismatch(3, 4)));
    }

    #[test]
    fn order_and_parity() {
        let g = Perm::parse("(1 2)(3 4 5)", 5).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_even());
        assert_eq!(g.pow(6), Perm::identity(5));
        assert_eq!(g.pow(-1), g.inverse());
    }
}
