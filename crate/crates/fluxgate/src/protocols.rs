use std::f64::consts::PI;

use fluxsim::{AnyonSystem, Complex64, PairId};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::register::{LogicalOutcome, QuditId, QuditRegister, Tally, XZeroFilter};
use crate::GateError;

fn copies_for(eps: f64, p: f64) -> usize {
    if p >= 1.0 {
        return 1;
    }
    (eps.ln() / (1.0 - p).ln()).ceil().max(1.0) as usize
}

impl QuditRegister {
    fn class_size_b(&self) -> usize {
        let q = self.ctx.logical_group();
        q.class_of(self.ctx.params().b).len()
    }

    /// Default copies for `measure_z`: inconclusive rate `epsilon` at
    /// per-copy success `1/|C(b)|`.
    pub fn default_z_copies(&self) -> usize {
        copies_for(self.opts.epsilon, 1.0 / self.class_size_b() as f64)
    }

    /// Default rounds for `measure_x`, at per-test success `d/|C(b)|`.
    pub fn default_x_copies(&self) -> usize {
        copies_for(self.opts.epsilon, self.d() as f64 / self.class_size_b() as f64)
    }

    fn bootstrap_tests(&self) -> usize {
        copies_for(self.opts.bootstrap_epsilon, self.d() as f64 / self.class_size_b() as f64)
    }

    /// Logical X eigenvector `x~_j = sum_n w^(-jn) |n> / sqrt d`.
    pub(crate) fn x_vector(&self, j: usize) -> Vec<Complex64> {
        let d = self.d();
        (0..d)
            .map(|n| Complex64::from_polar(1.0 / (d as f64).sqrt(), -2.0 * PI * ((j * n) % d) as f64 / d as f64))
            .collect()
    }

    /// Measures `q` in the computational basis.
    ///
    /// Each round makes one entangled copy per candidate digit `n` with a
    /// controlled-sum onto a `|0>` ancilla and fuses it with an ancilla of
    /// flux `x_n^-1`. Only the true digit can vanish, with probability
    /// `1/|C(b)|`; copies are discarded after one test.
    pub fn measure_z(&mut self, q: QuditId, copies: Option<usize>) -> Result<LogicalOutcome, GateError> {
        let target = self.pair(q)?;
        let d = self.d();
        let rounds = copies.unwrap_or_else(|| self.default_z_copies()).max(1);
        let p = 1.0 / self.class_size_b() as f64;
        let mut tallies = vec![Tally::default(); d];
        for _ in 0..rounds {
            for n in 0..d {
                let copy = self.basis_ancilla(0)?;
                self.csum_pairs(target, copy, false)?;
                let probe = self.inverse_basis_ancilla(n as u32)?;
                tallies[n].tests += 1;
                if self.fuse_noted(copy.first, probe.first, &format!("mz q{q} n={n}"))? {
                    tallies[n].vacua += 1;
                    self.sys.discard(&[copy.second, probe.second])?;
                    self.note(format!("mz q{q} -> {n}"));
                    return Ok(LogicalOutcome::from_tallies(n, tallies, p));
                }
                self.sys.discard(&[copy.first, copy.second, probe.first, probe.second])?;
            }
        }
        self.note(format!("mz q{q} -> inconclusive"));
        Err(GateError::Inconclusive(tallies))
    }

    /// One attempt of the incomplete swap between a vacuum pair and a
    /// `|0>` ancilla. Returns the ancilla when the filter certifies it.
    fn xzero_attempt(&mut self, k: usize) -> Result<Option<PairId>, GateError> {
        let v = self.vacuum_pair()?;
        let a = self.basis_ancilla(0)?;
        self.conjugate_by_extension(v, a, false)?;
        self.conjugate_by_extension(a, v, true)?;
        let ok = match self.opts.xzero_filter {
            XZeroFilter::Fusion => {
                let r = self.inverse_basis_ancilla(0)?;
                let ok = self.fuse_noted(v.first, r.first, &format!("xzero attempt {k}"))?;
                if ok {
                    self.sys.discard(&[v.second, r.second])?;
                } else {
                    self.sys.discard(&[v.first, v.second, r.first, r.second])?;
                }
                ok
            }
            XZeroFilter::Probe { reps } => {
                let r = self.basis_ancilla(0)?;
                let ok = self.probe_noted(&[(v.first, false), (r.second, false)], reps, &format!("xzero attempt {k}"))?;
                self.sys.discard(&[v.first, v.second, r.first, r.second])?;
                ok
            }
        };
        if ok {
            Ok(Some(a))
        } else {
            self.sys.discard(&a.anyons())?;
            Ok(None)
        }
    }

    /// Runs `f` on an empty side system that shares this register's random
    /// stream, then moves the surviving anyons over as a product state.
    fn in_side_system<T>(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<T, GateError>,
    ) -> Result<(T, Vec<u32>), GateError> {
        let mut side = AnyonSystem::new(self.ctx.sim_group().clone(), ChaCha8Rng::seed_from_u64(0));
        side.set_recording(false);
        std::mem::swap(self.sys.rng(), side.rng());
        let main = std::mem::replace(&mut self.sys, side);
        let r = f(self);
        let mut side = std::mem::replace(&mut self.sys, main);
        std::mem::swap(self.sys.rng(), side.rng());
        let t = r?;
        let ids = self.sys.absorb(side)?;
        Ok((t, ids))
    }

    pub(crate) fn xzero_pair(&mut self) -> Result<PairId, GateError> {
        let cap = self.opts.retry_cap;
        let (found, ids) = self.in_side_system(|reg| {
            for k in 1..=cap {
                if reg.xzero_attempt(k)?.is_some() {
                    return Ok(true);
                }
            }
            Ok(false)
        })?;
        if !found {
            return Err(GateError::ProtocolStalled { attempts: cap });
        }
        Ok(PairId {
            first: ids[0],
            second: ids[1],
        })
    }

    /// Prepares `x~0`, the uniform superposition of basis states.
    pub fn prepare_xzero(&mut self) -> Result<QuditId, GateError> {
        let p = self.xzero_pair()?;
        Ok(self.adopt(p))
    }

    /// Runs single x~0 attempts, for rate measurements. Successful
    /// outputs are discarded.
    pub fn xzero_attempts(&mut self, n: usize) -> Result<usize, GateError> {
        let mut ok = 0;
        for k in 1..=n {
            if let Some(p) = self.xzero_attempt(k)? {
                self.sys.discard(&p.anyons())?;
                ok += 1;
            }
        }
        Ok(ok)
    }

    /// Like a single attempt, but keeps the output as a qudit.
    pub fn xzero_single_attempt(&mut self) -> Result<Option<QuditId>, GateError> {
        Ok(self.xzero_attempt(1)?.map(|p| self.adopt(p)))
    }

    /// Maximally mixed qudit: `x~0` control, controlled-X^-1 onto `|0>`,
    /// target discarded. The ensemble is then written in `vectors`.
    fn mixed_pair(&mut self, vectors: &[Vec<Complex64>]) -> Result<PairId, GateError> {
        let k = self.xzero_pair()?;
        let t = self.basis_ancilla(0)?;
        self.csum_pairs(k, t, true)?;
        self.sys.discard(&t.anyons())?;
        let ctx = self.ctx.clone();
        self.sys.dephase_pair(k, &|x| ctx.classify(x), vectors)?;
        Ok(k)
    }

    /// Fixes the root of unity: draws a uniformly random X eigenstate,
    /// rejects `x~0` by zero tests on copies and keeps the survivor as
    /// `x~1`.
    pub fn bootstrap_xone(&mut self) -> Result<(), GateError> {
        let d = self.d();
        let vectors: Vec<_> = (0..d).map(|j| self.x_vector(j)).collect();
        let tests = self.bootstrap_tests();
        for attempt in 1..=self.opts.retry_cap {
            let k = self.mixed_pair(&vectors)?;
            let mut zero = false;
            for t in 0..tests {
                let a = self.xzero_pair()?;
                // |x~0> |x~i> -> |x~i> |x~i>
                self.csum_pairs(a, k, true)?;
                if self.fuse_noted(a.first, a.second, &format!("bootstrap {attempt} zero-test {t}"))? {
                    zero = true;
                    break;
                }
                self.sys.discard(&a.anyons())?;
            }
            if zero {
                self.note(format!("bootstrap {attempt} -> rejected"));
                self.sys.discard(&k.anyons())?;
                continue;
            }
            self.note(format!("bootstrap {attempt} -> accepted"));
            if let Some(old) = self.xone.replace(k) {
                self.sys.discard(&old.anyons())?;
            }
            if self.opts.unravel_bootstrap {
                self.sample_world();
            }
            return Ok(());
        }
        Err(GateError::ProtocolStalled {
            attempts: self.opts.retry_cap,
        })
    }

    /// Copies the `x~1` reference into a fresh pair.
    pub fn copy_xone(&mut self) -> Result<QuditId, GateError> {
        let x1 = self.xone.ok_or(GateError::BootstrapRequired)?;
        let a = self.xzero_pair()?;
        self.csum_pairs(a, x1, true)?;
        Ok(self.adopt(a))
    }

    /// Measures `q` in the X basis; digit `i` means `q = Z^-i x~0`.
    ///
    /// Each test copies `q` into a fresh `x~0` ancilla by controlled-X^-1,
    /// rotates the copy by `Z^i` and fuses its two anyons.
    pub fn measure_x(&mut self, q: QuditId, copies: Option<usize>) -> Result<LogicalOutcome, GateError> {
        let target = self.pair(q)?;
        self.measure_x_pair(target, &format!("q{q}"), copies)
    }

    pub(crate) fn measure_x_pair(&mut self, target: PairId, label: &str, copies: Option<usize>) -> Result<LogicalOutcome, GateError> {
        if self.xone.is_none() {
            return Err(GateError::BootstrapRequired);
        }
        let d = self.d();
        let rounds = copies.unwrap_or_else(|| self.default_x_copies()).max(1);
        let p = d as f64 / self.class_size_b() as f64;
        let mut tallies = vec![Tally::default(); d];
        for _ in 0..rounds {
            for i in 0..d {
                let a = self.xzero_pair()?;
                self.csum_pairs(a, target, true)?;
                for _ in 0..i {
                    self.z_pair(a, false)?;
                }
                tallies[i].tests += 1;
                if self.fuse_noted(a.first, a.second, &format!("mx {label} i={i}"))? {
                    tallies[i].vacua += 1;
                    self.note(format!("mx {label} -> {i}"));
                    return Ok(LogicalOutcome::from_tallies(i, tallies, p));
                }
                self.sys.discard(&a.anyons())?;
            }
        }
        self.note(format!("mx {label} -> inconclusive"));
        Err(GateError::Inconclusive(tallies))
    }

    /// Multiplies by `w^(k m n)` for control digit `m` and target digit
    /// `n`: Toffoli into a scratch `|0>`, `Z` on the scratch, uncompute.
    fn controlled_phase_pairs(&mut self, c: PairId, t: PairId, k: u32) -> Result<(), GateError> {
        if k % self.d() as u32 == 0 {
            return Ok(());
        }
        let s = self.basis_ancilla(0)?;
        for _ in 0..k {
            self.toffoli_pairs(c, t, s, false)?;
        }
        self.z_pair(s, false)?;
        for _ in 0..k {
            self.toffoli_pairs(c, t, s, true)?;
        }
        self.sys.discard(&s.anyons())?;
        Ok(())
    }

    /// Multiplies by `w^(k m (m-1)/2)` for control digit `m`.
    fn triangular_phase_pair(&mut self, c: PairId, k: u32) -> Result<(), GateError> {
        if k % self.d() as u32 == 0 {
            return Ok(());
        }
        let s = self.basis_ancilla(0)?;
        self.phase_pair(c, s, k, false)?;
        self.z_pair(s, false)?;
        self.phase_pair(c, s, k, true)?;
        self.sys.discard(&s.anyons())?;
        Ok(())
    }

    /// Controlled `Z X` for `d = 2`: `X^m` then `Z^m` on the target.
    pub(crate) fn controlled_zx_pairs(&mut self, c: PairId, t: PairId) -> Result<(), GateError> {
        self.csum_pairs(c, t, false)?;
        self.controlled_phase_pairs(c, t, 1)
    }

    /// Phase estimation of `X^a Z^b` on `q`; returns `j` for eigenvalue
    /// `w^j`. Needs odd `d`. For `d = 2` only `(a, b) = (1, 1)` is
    /// accepted: the result is 1 when `q` has the designated `ZX`
    /// eigenvalue of the `iY` reference and 0 otherwise.
    pub fn measure_xazb(&mut self, q: QuditId, a: u32, b: u32) -> Result<u32, GateError> {
        let d = self.d() as u32;
        let target = self.pair(q)?;
        if self.xone.is_none() {
            return Err(GateError::BootstrapRequired);
        }
        if d == 2 {
            if (a % 2, b % 2) != (1, 1) {
                return Err(GateError::Unsupported("d = 2 supports only X Z".into()));
            }
            let r = self.copy_y_pair()?;
            self.controlled_zx_pairs(r, target)?;
            let out = self.measure_x_pair(r, &format!("xz q{q}"), None);
            self.sys.discard(&r.anyons())?;
            let out = out?;
            self.note(format!("mxz q{q} 1 1 -> {}", out.digit));
            return Ok(out.digit);
        }
        let (a, b) = (a % d, b % d);
        let k = self.xzero_pair()?;
        // (X^a Z^b)^m = w^(ab m(m-1)/2) X^(am) Z^(bm)
        self.controlled_phase_pairs(k, target, b)?;
        for _ in 0..a {
            self.csum_pairs(k, target, false)?;
        }
        self.triangular_phase_pair(k, (a * b) % d)?;
        let out = self.measure_x_pair(k, &format!("xz q{q}"), None);
        self.sys.discard(&k.anyons())?;
        let digit = out?.digit;
        let j = (d - digit) % d;
        self.note(format!("mxz q{q} {a} {b} -> {j}"));
        Ok(j)
    }

    /// `d = 2`: makes the `iY` reference. A Bell pair with one half
    /// discarded leaves `I/2`, written as the two `ZX` eigenstates; the
    /// survivor is designated the `+i` eigenstate.
    pub fn bootstrap_iy(&mut self) -> Result<(), GateError> {
        if self.d() != 2 {
            return Err(GateError::Unsupported("iY reference is for d = 2".into()));
        }
        if self.xone.is_none() {
            return Err(GateError::BootstrapRequired);
        }
        let h = 1.0 / 2f64.sqrt();
        let vectors = vec![
            vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            vec![Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        ];
        let k = self.mixed_pair(&vectors)?;
        if let Some(old) = self.yref.replace(k) {
            self.sys.discard(&old.anyons())?;
        }
        self.note("iy reference designated +i".into());
        if self.opts.unravel_bootstrap {
            self.sample_world();
        }
        Ok(())
    }

    fn copy_y_pair(&mut self) -> Result<PairId, GateError> {
        let y = self.yref.ok_or(GateError::BootstrapRequired)?;
        let a = self.xzero_pair()?;
        self.controlled_zx_pairs(a, y)?;
        Ok(a)
    }

    /// Copies the `iY` reference: controlled-ZX from `x~0` onto it.
    pub fn copy_y(&mut self) -> Result<QuditId, GateError> {
        let p = self.copy_y_pair()?;
        Ok(self.adopt(p))
    }

    /// Compares two `ZX` eigenstates: controlled-ZX from `c` onto `t`
    /// turns `c` into `x~1` when they agree, `x~0` otherwise. Returns the
    /// X digit of `c`, which is consumed.
    pub fn compare_y(&mut self, c: QuditId, t: QuditId) -> Result<u32, GateError> {
        if c == t {
            return Err(GateError::SameQudit);
        }
        let (cp, tp) = (self.pair(c)?, self.pair(t)?);
        self.controlled_zx_pairs(cp, tp)?;
        let out = self.measure_x(c, None)?;
        self.release(c)?;
        Ok(out.digit)
    }
}
