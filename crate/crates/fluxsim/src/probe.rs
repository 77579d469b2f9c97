use std::collections::BTreeMap;
use std::sync::Arc;

use fluxgroup::{ElemId, FiniteGroup};
use num_complex::Complex64;
use rand::Rng;

use crate::system::{Amps, AnyonSystem, Branch, PairId, ProbeSlot, PRUNE_AMP2};
use crate::{AnyonId, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbeId(pub u32);

/// Unitary representation given by one `m x m` matrix per group element.
#[derive(Clone, Debug)]
pub struct Representation {
    name: String,
    dim: usize,
    /// Row-major, indexed by element id.
    mats: Vec<Vec<Complex64>>,
}

fn matmul(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for k in 0..m {
            let x = a[i * m + k];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[i * m + j] += x * b[k * m + j];
            }
        }
    }
    out
}

impl Representation {
    /// Checks `R(1) = I` and `R(x s) = R(x) R(s)` for every element `x` and
    /// generator `s`, which forces a homomorphism; also checks unitarity.
    pub fn from_matrices(
        g: &FiniteGroup,
        name: &str,
        dim: usize,
        mats: Vec<Vec<Complex64>>,
    ) -> Result<Representation, SimError> {
        if mats.len() != g.order() || mats.iter().any(|m| m.len() != dim * dim) || dim == 0 {
            return Err(SimError::DimensionMismatch);
        }
        let mut dev: f64 = 0.0;
        let id = &mats[g.identity() as usize];
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((id[i * dim + j] - want).norm());
            }
        }
        for x in g.ids() {
            let m = &mats[x as usize];
            for &s in g.generators() {
                let prod = matmul(m, &mats[s as usize], dim);
                let want = &mats[g.mul(x, s) as usize];
                for (a, b) in prod.iter().zip(want) {
                    dev = dev.max((a - b).norm());
                }
            }
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        s += m[k * dim + i].conj() * m[k * dim + j];
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    dev = dev.max((s - want).norm());
                }
            }
        }
        if dev > 1e-9 {
            return Err(SimError::NotHomomorphism(dev));
        }
        Ok(Representation {
            name: name.to_string(),
            dim,
            mats,
        })
    }

    /// One-dimensional trivial representation; such a probe always fuses
    /// to the vacuum.
    pub fn trivial(g: &FiniteGroup) -> Representation {
        Representation {
            name: "trivial".into(),
            dim: 1,
            mats: vec![vec![Complex64::new(1.0, 0.0)]; g.order()],
        }
    }

    /// The permutation action on the points, restricted to the sum-zero
    /// subspace (dimension `degree - 1`) in an orthonormal Helmert basis.
    pub fn standard(g: &FiniteGroup) -> Result<Representation, SimError> {
        let n = g.degree();
        if n < 2 {
            return Err(SimError::DimensionMismatch);
        }
        let m = n - 1;
        let basis: Vec<Vec<f64>> = (1..n)
            .map(|k| {
                let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
                let mut v = vec![0.0; n];
                for x in v.iter_mut().take(k) {
                    *x = s;
                }
                v[k] = -(k as f64) * s;
                v
            })
            .collect();
        let mats = g
            .elements()
            .iter()
            .map(|p| {
                let mut out = vec![Complex64::new(0.0, 0.0); m * m];
                for i in 0..m {
                    for j in 0..m {
                        let mut s = 0.0;
                        for x in 0..n {
                            s += basis[i][p.apply(x)] * basis[j][x];
                        }
                        out[i * m + j] = Complex64::new(s, 0.0);
                    }
                }
                out
            })
            .collect();
        Representation::from_matrices(g, "standard", m, mats)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: ElemId) -> &[Complex64] {
        &self.mats[g as usize]
    }

    pub fn character(&self, g: ElemId) -> Complex64 {
        let m = self.matrix(g);
        (0..self.dim).map(|i| m[i * self.dim + i]).sum()
    }

    /// Probability that a probe around flux `g` fuses to the vacuum.
    pub fn vacuum_probability(&self, g: ElemId) -> f64 {
        self.character(g).norm_sqr() / (self.dim * self.dim) as f64
    }
}

impl AnyonSystem {
    fn probe_index(&self, p: ProbeId) -> Result<usize, SimError> {
        self.probes
            .iter()
            .position(|s| s.id == p)
            .ok_or(SimError::NoSuchProbe(p.0))
    }

    /// Charge pair in `sum_n |n>|n*> / sqrt(m)` with trivial total flux.
    pub fn create_charge_probe(&mut self, rep: Arc<Representation>) -> ProbeId {
        let id = ProbeId(self.next_probe);
        self.next_probe += 1;
        let m = rep.dim();
        let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        for b in &mut self.branches {
            let old = std::mem::take(&mut b.amps);
            let mut amps = Amps::new();
            for (k, a) in old {
                for n in 0..m as u16 {
                    let mut key = k.clone();
                    key.push(n);
                    key.push(n);
                    amps.insert(key, a * amp);
                }
            }
            b.amps = amps;
        }
        self.probes.push(ProbeSlot { id, rep });
        id
    }

    /// Drags the probe's first charge around the anyons, in their line
    /// order; the charge index is acted on by `R(g_total)`.
    pub fn encircle_with_probe(&mut self, probe: ProbeId, anyons: &[AnyonId]) -> Result<(), SimError> {
        let mut ordered: Vec<(usize, AnyonId)> = anyons
            .iter()
            .map(|&a| self.position(a).map(|p| (p, a)))
            .collect::<Result<_, _>>()?;
        ordered.sort_unstable();
        let word: Vec<(AnyonId, bool)> = ordered.into_iter().map(|(_, a)| (a, false)).collect();
        self.encircle_word(probe, &word)
    }

    /// Like [`encircle_with_probe`](Self::encircle_with_probe) for a general
    /// loop: the holonomy is the product of the listed fluxes, inverted
    /// where flagged.
    pub fn encircle_word(&mut self, probe: ProbeId, word: &[(AnyonId, bool)]) -> Result<(), SimError> {
        let pi = self.probe_index(probe)?;
        let off = self.probe_offset(pi);
        let ss: Vec<(usize, bool)> = word
            .iter()
            .map(|&(a, inv)| self.slot_index(a).map(|s| (s, inv)))
            .collect::<Result<_, _>>()?;
        let rep = self.probes[pi].rep.clone();
        let m = rep.dim();
        let g = self.group_arc().clone();
        for b in &mut self.branches {
            let old = std::mem::take(&mut b.amps);
            let mut amps = Amps::new();
            for (k, a) in old {
                let h = ss.iter().fold(g.identity(), |acc, &(s, inv)| {
                    g.mul(acc, if inv { g.inv(k[s]) } else { k[s] })
                });
                if h == g.identity() {
                    *amps.entry(k).or_default() += a;
                    continue;
                }
                let mat = rep.matrix(h);
                let n = k[off] as usize;
                for n2 in 0..m {
                    let c = mat[n2 * m + n];
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut key = k.clone();
                    key[off] = n2 as u16;
                    *amps.entry(key).or_default() += a * c;
                }
            }
            amps.retain(|_, a| a.norm_sqr() > PRUNE_AMP2);
            b.amps = amps;
        }
        Ok(())
    }

    /// Fuses the two charges of a probe. Vacuum removes the probe; a
    /// residual charge is carried away and traced out.
    pub fn fuse_probe(&mut self, probe: ProbeId) -> Result<bool, SimError> {
        let pi = self.probe_index(probe)?;
        let off = self.probe_offset(pi);
        let m = self.probes[pi].rep.dim();
        let s = 1.0 / (m as f64).sqrt();
        let drop = [off, off + 1];
        let projections: Vec<BTreeMap<Vec<u16>, Complex64>> = self
            .branches
            .iter()
            .map(|b| {
                let mut v: BTreeMap<Vec<u16>, Complex64> = BTreeMap::new();
                for (k, a) in &b.amps {
                    if k[off] == k[off + 1] {
                        let rest: Vec<u16> = k
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| !drop.contains(i))
                            .map(|(_, &x)| x)
                            .collect();
                        *v.entry(rest).or_default() += a * s;
                    }
                }
                v
            })
            .collect();
        let probs: Vec<f64> = projections
            .iter()
            .map(|v| v.values().map(|a| a.norm_sqr()).sum())
            .collect();
        let p: f64 = self
            .branches
            .iter()
            .zip(&probs)
            .map(|(b, q)| b.weight * q)
            .sum::<f64>()
            .clamp(0.0, 1.0) + 0.0;
        let u: f64 = self.rng().gen();
        let vacuum = u < p;
        let old = std::mem::take(&mut self.branches);
        if vacuum {
            for ((b, v), q) in old.into_iter().zip(projections).zip(probs) {
                if q <= 0.0 {
                    continue;
                }
                let n = q.sqrt();
                self.branches.push(Branch {
                    weight: b.weight * q / p,
                    charges: b.charges,
                    amps: v
                        .into_iter()
                        .filter(|(_, a)| a.norm_sqr() > PRUNE_AMP2)
                        .map(|(k, a)| (k, a / n))
                        .collect(),
                });
            }
            self.remove_probe_slot(pi);
            self.normalize_and_merge();
        } else {
            for ((mut b, v), q) in old.into_iter().zip(projections).zip(probs) {
                if q >= 1.0 - 1e-12 {
                    continue;
                }
                let n = (1.0 - q).sqrt();
                let mut amps = std::mem::take(&mut b.amps);
                for (rest, c) in v {
                    for k in 0..m as u16 {
                        let mut key = rest.clone();
                        key.insert(off, k);
                        key.insert(off + 1, k);
                        *amps.entry(key).or_default() -= c * s;
                    }
                }
                amps.retain(|_, a| a.norm_sqr() > PRUNE_AMP2);
                let amps: Amps = amps.into_iter().map(|(k, a)| (k, a / n)).collect();
                b.amps = amps;
                b.weight *= (1.0 - q) / (1.0 - p);
                self.branches.push(b);
            }
            self.trace_out_keys(&drop, &[]);
            self.remove_probe_slot(pi);
        }
        self.note(|| {
            format!(
                "probe-fuse {} -> {} p_vac={p:.12}",
                probe.0,
                if vacuum { "vacuum" } else { "residual" }
            )
        });
        Ok(vacuum)
    }

    /// Probe test of whether the loop `word` has trivial holonomy: true iff
    /// all `reps` fresh probes fuse to the vacuum. Stops at the first
    /// failure; returns the verdict and the number of probes used.
    pub fn loop_is_trivial(
        &mut self,
        word: &[(AnyonId, bool)],
        reps: usize,
        rep: &Arc<Representation>,
    ) -> Result<(bool, usize), SimError> {
        for k in 0..reps {
            let p = self.create_charge_probe(rep.clone());
            self.encircle_word(p, word)?;
            if !self.fuse_probe(p)? {
                return Ok((false, k + 1));
            }
        }
        Ok((true, reps))
    }

    /// Checks `g1 = g2` for the first fluxes of two pairs by looping probes
    /// around the first anyon of `pair1` and the second anyon of `pair2`.
    /// One-sided: equal fluxes are never reported unequal.
    pub fn compare_fluxes(
        &mut self,
        pair1: PairId,
        pair2: PairId,
        reps: usize,
        rep: &Arc<Representation>,
    ) -> Result<bool, SimError> {
        let ok = self
            .loop_is_trivial(&[(pair1.first, false), (pair2.second, false)], reps, rep)?
            .0;
        self.note(|| format!("compare {} {} -> {}", pair1.first, pair2.second, ok));
        Ok(ok)
    }
}
