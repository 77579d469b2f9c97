//! Standard groups used throughout the crate family.

use crate::group::FiniteGroup;
use crate::perm::Perm;
use crate::GroupError;

fn cycle(degree: usize, pts: &[usize]) -> Perm {
    Perm::from_cycles(degree, &[pts.to_vec()]).expect("valid cycle")
}

/// `Z_n` acting regularly on `n` points.
pub fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    let pts: Vec<usize> = (0..n).collect();
    FiniteGroup::generate(n, &[cycle(n, &pts)])
}

/// `S_n` for `1 <= n <= 8`.
pub fn symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    check_small(n)?;
    if n == 1 {
        return FiniteGroup::generate(1, &[]);
    }
    let pts: Vec<usize> = (0..n).collect();
    FiniteGroup::generate(n, &[cycle(n, &[0, 1]), cycle(n, &pts)])
}

/// `A_n` for `1 <= n <= 8`, generated by the 3-cycles `(1 2 i)`.
pub fn alternating(n: usize) -> Result<FiniteGroup, GroupError> {
    check_small(n)?;
    let gens: Vec<Perm> = (2..n).map(|i| cycle(n, &[0, 1, i])).collect();
    FiniteGroup::generate(n, &gens)
}

fn check_small(n: usize) -> Result<(), GroupError> {
    if (1..=8).contains(&n) {
        Ok(())
    } else {
        Err(GroupError::BadDegree(n))
    }
}

/// `G x H` acting on the disjoint union of the point sets.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    let k = g.degree() + h.degree();
    let mut gens = Vec::new();
    for &x in g.generators() {
        let mut images: Vec<u8> = g.elem(x).images().to_vec();
        images.extend((g.degree()..k).map(|i| i as u8));
        gens.push(Perm::from_images(images)?);
    }
    for &x in h.generators() {
        let mut images: Vec<u8> = (0..g.degree()).map(|i| i as u8).collect();
        images.extend(h.elem(x).images().iter().map(|&i| i + g.degree() as u8));
        gens.push(Perm::from_images(images)?);
    }
    FiniteGroup::generate(k, &gens)
}

/// `SL(2,5)` acting on the 24 non-zero vectors of `F_5^2`.
///
/// Vector `(x, y)` is point `5x + y - 1`.
pub fn sl2_5() -> Result<FiniteGroup, GroupError> {
    let act = |m: [[u32; 2]; 2]| -> Result<Perm, GroupError> {
        let mut images = Vec::with_capacity(24);
        for x in 0..5u32 {
            for y in 0..5u32 {
                if x == 0 && y == 0 {
                    continue;
                }
                let nx = (m[0][0] * x + m[0][1] * y) % 5;
                let ny = (m[1][0] * x + m[1][1] * y) % 5;
                images.push((5 * nx + ny - 1) as u8);
            }
        }
        Perm::from_images(images)
    };
    let t = act([[1, 1], [0, 1]])?;
    let s = act([[0, 4], [1, 0]])?;
    FiniteGroup::generate(24, &[t, s])
}
