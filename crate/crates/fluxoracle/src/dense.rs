use std::f64::consts::PI;

use num_complex::Complex64;

use crate::OracleError;

pub const MAX_QUDITS: usize = 6;

/// Logical gates with `omega = exp(2 pi i / d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// `|i> -> omega^i |i>`.
    Z,
    /// `|i> -> |i + 1>`.
    X,
    /// `|l, m, n> -> |l, m, l m + n>`.
    Toffoli,
    /// `|m, n> -> |m, m + n>`.
    Csum,
    /// `X^a Z^b`.
    Phase { a: u32, b: u32 },
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Toffoli => 3,
            Gate::Csum => 2,
            _ => 1,
        }
    }
}

fn omega(d: usize, k: i64) -> Complex64 {
    let t = 2.0 * PI * (k.rem_euclid(d as i64) as f64) / d as f64;
    Complex64::new(t.cos(), t.sin())
}

/// Unit vector over `d^k` basis states, qudit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    d: usize,
    k: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn basis(d: usize, digits: &[usize]) -> Result<DenseState, OracleError> {
        if digits.len() > MAX_QUDITS {
            return Err(OracleError::TooManyQudits(MAX_QUDITS));
        }
        if d < 2 || digits.iter().any(|&x| x >= d) {
            return Err(OracleError::DimensionMismatch);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); d.pow(digits.len() as u32)];
        let idx = digits.iter().fold(0, |acc, &x| acc * d + x);
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(DenseState {
            d,
            k: digits.len(),
            amps,
        })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(d: usize, k: usize, amps: Vec<Complex64>) -> Result<DenseState, OracleError> {
        if k > MAX_QUDITS {
            return Err(OracleError::TooManyQudits(MAX_QUDITS));
        }
        if d < 2 || amps.len() != d.pow(k as u32) {
            return Err(OracleError::DimensionMismatch);
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-300 {
            return Err(OracleError::ZeroNorm);
        }
        Ok(DenseState {
            d,
            k,
            amps: amps.into_iter().map(|a| a / n).collect(),
        })
    }

    /// `x~_j = sum_n omega^(-j n) |n> / sqrt d`, so `Z x~_j = x~_(j-1)`.
    pub fn x_eigenstate(d: usize, j: usize) -> DenseState {
        let amps = (0..d).map(|n| omega(d, -((j * n) as i64))).collect();
        DenseState::from_amplitudes(d, 1, amps).expect("non-zero")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn digits_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for q in (0..self.k).rev() {
            out[q] = idx % self.d;
            idx /= self.d;
        }
        out
    }

    fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d + x)
    }

    pub fn tensor(&self, other: &DenseState) -> Result<DenseState, OracleError> {
        if self.d != other.d {
            return Err(OracleError::DimensionMismatch);
        }
        if self.k + other.k > MAX_QUDITS {
            return Err(OracleError::TooManyQudits(MAX_QUDITS));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(DenseState {
            d: self.d,
            k: self.k + other.k,
            amps,
        })
    }

    pub fn inner(&self, other: &DenseState) -> Result<Complex64, OracleError> {
        if self.d != other.d || self.k != other.k {
            return Err(OracleError::DimensionMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Exact action of a gate on the listed qudits.
    pub fn apply(&self, gate: Gate, qudits: &[usize]) -> Result<DenseState, OracleError> {
        if qudits.len() != gate.arity() {
            return Err(OracleError::DimensionMismatch);
        }
        for (i, &q) in qudits.iter().enumerate() {
            if q >= self.k {
                return Err(OracleError::IndexOutOfRange(q));
            }
            if qudits[..i].contains(&q) {
                return Err(OracleError::DimensionMismatch);
            }
        }
        let d = self.d;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut digits = self.digits_of(idx);
            let mut phase = Complex64::new(1.0, 0.0);
            match gate {
                Gate::Z => phase = omega(d, digits[qudits[0]] as i64),
                Gate::X => digits[qudits[0]] = (digits[qudits[0]] + 1) % d,
                Gate::Toffoli => {
                    let (l, m) = (digits[qudits[0]], digits[qudits[1]]);
                    digits[qudits[2]] = (digits[qudits[2]] + l * m) % d;
                }
                Gate::Csum => digits[qudits[1]] = (digits[qudits[1]] + digits[qudits[0]]) % d,
                Gate::Phase { a: pa, b: pb } => {
                    let q = qudits[0];
                    phase = omega(d, (pb as usize * digits[q]) as i64);
                    digits[q] = (digits[q] + pa as usize) % d;
                }
            }
            out[self.index_of(&digits)] += a * phase;
        }
        Ok(DenseState {
            d,
            k: self.k,
            amps: out,
        })
    }

    pub fn apply_power(&self, gate: Gate, qudits: &[usize], times: usize) -> Result<DenseState, OracleError> {
        let mut s = self.clone();
        for _ in 0..times {
            s = s.apply(gate, qudits)?;
        }
        Ok(s)
    }

    pub fn density(&self) -> DensityMatrix {
        let n = self.amps.len();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { d: self.d, k: self.k, m }
    }
}

/// `|<s1|s2>|^2`.
pub fn fidelity(s1: &DenseState, s2: &DenseState) -> Result<f64, OracleError> {
    Ok(s1.inner(s2)?.norm_sqr())
}

/// Density operator on `d^k` states, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub(crate) d: usize,
    pub(crate) k: usize,
    pub(crate) m: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(d: usize, k: usize) -> DensityMatrix {
        let n = d.pow(k as u32);
        DensityMatrix {
            d,
            k,
            m: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.k as u32)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.k
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i * self.dim() + j]
    }

    pub(crate) fn add_pure(&mut self, w: f64, v: &[Complex64]) {
        let n = self.dim();
        for i in 0..n {
            if v[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                self.m[i * n + j] += v[i] * v[j].conj() * w;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i).re).sum()
    }

    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.entry(i, j) * self.entry(j, i)).re;
            }
        }
        s
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with(&self, psi: &DenseState) -> Result<f64, OracleError> {
        if psi.d != self.d || psi.k != self.k {
            return Err(OracleError::DimensionMismatch);
        }
        let n = self.dim();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += psi.amps[i].conj() * self.entry(i, j) * psi.amps[j];
            }
        }
        Ok(s.re)
    }

    /// Basis states with non-negligible population.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.entry(i, i).re > 1e-12).collect()
    }
}

/// Eigenstates of `X^a Z^b` as `(j, state)` with eigenvalue `omega^j`.
/// Needs `(X^a Z^b)^d = 1`, which holds for odd `d`.
pub fn eigenstates(d: usize, a: u32, b: u32) -> Result<Vec<(usize, DenseState)>, OracleError> {
    let u = Gate::Phase { a, b };
    let mut out = Vec::new();
    for j in 0..d {
        for start in 0..d {
            let e = DenseState::basis(d, &[start])?;
            let mut acc = vec![Complex64::new(0.0, 0.0); d];
            let mut cur = e.clone();
            for t in 0..d {
                let w = omega(d, -((j * t) as i64));
                for (x, y) in acc.iter_mut().zip(cur.amplitudes()) {
                    *x += w * y;
                }
                cur = cur.apply(u, &[0])?;
            }
            if acc.iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-9 {
                out.push((j, DenseState::from_amplitudes(d, 1, acc)?));
                break;
            }
        }
    }
    Ok(out)
}

/// Distribution of the eigenvalue index from phase estimation of
/// `X^a Z^b` on a one-qudit state with an `x~_0` control.
pub fn phase_estimation(psi: &DenseState, a: u32, b: u32) -> Result<Vec<f64>, OracleError> {
    if psi.k != 1 {
        return Err(OracleError::DimensionMismatch);
    }
    let d = psi.d;
    let u = Gate::Phase { a, b };
    let mut powers = vec![psi.clone()];
    for m in 1..d {
        powers.push(powers[m - 1].apply(u, &[0])?);
    }
    // Control |m> picks up U^m; projecting the control on x~_i gives the
    // index j = -i.
    let mut dist = vec![0.0; d];
    for i in 0..d {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for (m, pm) in powers.iter().enumerate() {
            let c = omega(d, (i * m) as i64) / (d as f64);
            for (x, y) in v.iter_mut().zip(pm.amplitudes()) {
                *x += c * y;
            }
        }
        let j = (d - i) % d;
        dist[j] += v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    }
    Ok(dist)
}
