//! Characters of `O`, fast Fourier analysis of locally constant functions,
//! and the Fourier-analytic variation.
//!
//! Characters that are trivial on the depth-n disc around 0 are indexed by
//! integers `m < q^n`.  The *level* of a character is the smallest `l` such
//! that it is constant on every depth-l disc; exactly `q^l` characters have
//! level at most `l`.  In p-adic mode the character indexed by `m` sends a
//! point with integer value `x` to `exp(2 pi i m x / q^n)`; in power-series
//! mode digits never interact and the phase is `sum_j m_j x_j / q` with
//! `m_j` the base-q digits of `m`.
//!
//! The coefficient transform is exact in structure (a plain DFT of the
//! level-n cell values) but numeric in value; everything downstream of this
//! module is floating point.

use num::complex::Complex64;

use crate::funcspace::LcFunction;
use crate::ring::{ArithmeticMode, Point, RingSpec};
use crate::{Error, Result};

/// Tables kept below this size; a level-n group needs `q^n` complex roots.
const MAX_TABLE: u64 = 1 << 22;

/// The characters of `O` trivial on the depth-`level` disc around 0.
pub struct CharacterGroup {
    spec: RingSpec,
    level: usize,
    size: u64,
    /// Order of the root-of-unity table: `q^level` p-adic, `q` power-series.
    modulus: u64,
    /// `roots[r] = exp(2 pi i r / modulus)`.
    roots: Vec<Complex64>,
}

impl CharacterGroup {
    /// Characters of the additive group at the given level.  Needs a prime
    /// q in either mode: for composite q the digitwise phase formula does
    /// not describe the additive characters of a residue field.
    pub fn new(spec: RingSpec, level: usize) -> Result<CharacterGroup> {
        if !spec.has_prime_q() {
            return Err(Error::PrimeRequired {
                q: spec.q(),
                context: "character theory",
            });
        }
        let q = spec.q() as u64;
        let size = q
            .checked_pow(level.try_into().unwrap_or(u32::MAX))
            .filter(|&s| s <= MAX_TABLE)
            .ok_or(Error::TableTooLarge {
                q: spec.q(),
                level,
            })?;
        let modulus = match spec.mode() {
            ArithmeticMode::Padic => size,
            ArithmeticMode::PowerSeries => q,
        };
        let step = std::f64::consts::TAU / modulus as f64;
        let roots = (0..modulus)
            .map(|r| Complex64::from_polar(1.0, step * r as f64))
            .collect();
        Ok(CharacterGroup {
            spec,
            level,
            size,
            modulus,
            roots,
        })
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of characters, `q^level`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Smallest `l` such that character `m` is constant on depth-l discs.
    pub fn character_level(&self, m: u64) -> usize {
        let q = self.spec.q() as u64;
        if m == 0 {
            return 0;
        }
        match self.spec.mode() {
            ArithmeticMode::Padic => {
                let mut v = 0;
                let mut m = m;
                while m % q == 0 {
                    m /= q;
                    v += 1;
                }
                self.level - v
            }
            ArithmeticMode::PowerSeries => {
                let mut digits = 0;
                let mut m = m;
                while m > 0 {
                    m /= q;
                    digits += 1;
                }
                digits
            }
        }
    }

    /// Index of the inverse character.
    pub fn negate_index(&self, m: u64) -> u64 {
        let q = self.spec.q() as u64;
        match self.spec.mode() {
            ArithmeticMode::Padic => (self.size - m) % self.size,
            ArithmeticMode::PowerSeries => {
                let mut out = 0;
                let mut place = 1;
                let mut m = m;
                for _ in 0..self.level {
                    out += ((q - m % q) % q) * place;
                    place *= q;
                    m /= q;
                }
                out
            }
        }
    }

    /// Character `m` evaluated at `x`; only the first `level` digits of `x`
    /// matter.
    pub fn eval(&self, m: u64, x: &Point) -> Complex64 {
        let q = self.spec.q() as u64;
        let phase = match self.spec.mode() {
            ArithmeticMode::Padic => {
                let mut xbar = 0u64;
                let mut place = 1u64;
                for i in 0..self.level {
                    xbar += x.digit(i) as u64 * place;
                    place = place.wrapping_mul(q);
                }
                (m % self.modulus) * (xbar % self.modulus) % self.modulus
            }
            ArithmeticMode::PowerSeries => {
                let mut s = 0u64;
                let mut m = m;
                for i in 0..self.level {
                    s += m % q * x.digit(i) as u64;
                    m /= q;
                }
                s % q
            }
        };
        self.roots[phase as usize]
    }

    /// All character indices of level at most `cutoff`, ascending.
    pub fn indices_up_to_level(&self, cutoff: usize) -> Result<Vec<u64>> {
        if cutoff > self.level {
            return Err(Error::CutoffTooDeep {
                cutoff,
                level: self.level,
            });
        }
        let q = self.spec.q() as u64;
        let count = q.pow(cutoff as u32);
        Ok(match self.spec.mode() {
            ArithmeticMode::Padic => {
                let step = self.size / count;
                (0..count).map(|k| k * step).collect()
            }
            ArithmeticMode::PowerSeries => (0..count).collect(),
        })
    }
}

/// All Fourier coefficients of `f` at its own level.
pub struct FourierTable {
    group: CharacterGroup,
    coeffs: Vec<Complex64>,
}

pub fn fourier_coefficients(f: &LcFunction) -> Result<FourierTable> {
    let group = CharacterGroup::new(f.spec(), f.level())?;
    let mut data: Vec<Complex64> = (0..group.size)
        .map(|idx| {
            let x = Point::from_cell_index(idx, group.level, group.spec);
            Complex64::new(f.evaluate(&x).to_f64(), 0.0)
        })
        .collect();
    match group.spec.mode() {
        ArithmeticMode::Padic => {
            data = dft_radix_q(&data, group.spec.q() as usize, &group.roots, 1);
        }
        ArithmeticMode::PowerSeries => {
            dft_per_digit(&mut data, group.spec.q() as usize, group.level, &group.roots);
        }
    }
    let scale = 1.0 / group.size as f64;
    for c in &mut data {
        *c *= scale;
    }
    Ok(FourierTable {
        group,
        coeffs: data,
    })
}

/// Forward DFT of size `q^k`, decimation in time, one radix-q split per
/// recursion step.  `roots` has positive sign, so twiddles conjugate it;
/// `stride` is the root-table step for the current transform size.
fn dft_radix_q(values: &[Complex64], q: usize, roots: &[Complex64], stride: u64) -> Vec<Complex64> {
    let n = values.len();
    if n == 1 {
        return values.to_vec();
    }
    let sub = n / q;
    let parts: Vec<Vec<Complex64>> = (0..q)
        .map(|r| {
            let slice: Vec<Complex64> = values.iter().skip(r).step_by(q).copied().collect();
            dft_radix_q(&slice, q, roots, stride * q as u64)
        })
        .collect();
    let order = roots.len() as u64;
    let mut out = Vec::with_capacity(n);
    for k in 0..n as u64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, part) in parts.iter().enumerate() {
            let tw = roots[((r as u64 * k * stride) % order) as usize].conj();
            acc += tw * part[k as usize % sub];
        }
        out.push(acc);
    }
    out
}

/// Forward DFT over `(Z/q)^level`: one size-q pass per digit position.
fn dft_per_digit(data: &mut [Complex64], q: usize, level: usize, roots: &[Complex64]) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); q];
    let mut stride = 1;
    for _ in 0..level {
        // Block bases are exactly the indices whose current digit is zero.
        for base in 0..data.len() {
            if (base / stride) % q != 0 {
                continue;
            }
            for (k, slot) in scratch.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..q {
                    acc += roots[j * k % q].conj() * data[base + j * stride];
                }
                *slot = acc;
            }
            for (k, &v) in scratch.iter().enumerate() {
                data[base + k * stride] = v;
            }
        }
        stride *= q;
    }
}

impl FourierTable {
    pub fn group(&self) -> &CharacterGroup {
        &self.group
    }

    pub fn coefficient(&self, m: u64) -> Complex64 {
        self.coeffs[m as usize]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The Fourier-analytic variation: sum of `q^level(m) * |coeff(m)|`
    /// over nontrivial characters.
    pub fn variation(&self) -> f64 {
        let q = self.group.spec.q() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| q.powi(self.group.character_level(m as u64) as i32) * c.norm())
            .sum()
    }

    /// The partial sum over characters of level at most `cutoff` at `x`.
    pub fn partial_sum(&self, cutoff: usize, x: &Point) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in self.group.indices_up_to_level(cutoff)? {
            acc += self.coeffs[m as usize] * self.group.eval(m, x);
        }
        Ok(acc)
    }
}

/// Real part of the level-`cutoff` Fourier partial sum of `f` at `x`.  For
/// real `f` this equals the average of `f` over the depth-`cutoff` disc
/// around `x`.
pub fn partial_fourier_sum(f: &LcFunction, cutoff: usize, x: &Point) -> Result<f64> {
    Ok(fourier_coefficients(f)?.partial_sum(cutoff, x)?.re)
}

/// Fourier-analytic variation of `f`, computed at the function's own level.
pub fn fourier_variation(f: &LcFunction) -> Result<f64> {
    Ok(fourier_coefficients(f)?.variation())
}

/// Sum of all characters of level at most `cutoff` at `x`: `q^cutoff` when
/// the first `cutoff` digits of `x` vanish, 0 otherwise.
pub fn dirichlet_kernel(group: &CharacterGroup, cutoff: usize, x: &Point) -> Result<f64> {
    if cutoff > group.level {
        return Err(Error::CutoffTooDeep {
            cutoff,
            level: group.level,
        });
    }
    let vanishes = (0..cutoff).all(|i| x.digit(i) == 0);
    Ok(if vanishes {
        (group.spec.q() as f64).powi(cutoff as i32)
    } else {
        0.0
    })
}
