//! Complex discrete Fourier transform for arbitrary lengths.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; every other length
//! goes through Bluestein's chirp-z reduction onto a radix-2 transform.
//! Transforms are unnormalized: `inverse(forward(x)) = len * x`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Trivial,
    Radix2 {
        twiddles: Vec<Complex64>,
        bitrev: Vec<u32>,
    },
    Bluestein {
        inner: Box<Fft>,
        chirp: Vec<Complex64>,
        kernel_hat: Vec<Complex64>,
    },
}

impl Fft {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let kind = if len == 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            let bits = len.trailing_zeros();
            let twiddles = (0..len / 2)
                .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
                .collect();
            let bitrev = (0..len as u32)
                .map(|i| i.reverse_bits() >> (32 - bits))
                .collect();
            Kind::Radix2 { twiddles, bitrev }
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = Fft::new(m);
            // w_j = exp(-iπ j²/N); j² reduced mod 2N keeps the phase exact.
            let modulus = 2 * len as u64;
            let chirp: Vec<Complex64> = (0..len as u64)
                .map(|j| {
                    let q = (j * j) % modulus;
                    Complex64::from_polar(1.0, -PI * q as f64 / len as f64)
                })
                .collect();
            let mut kernel = vec![Complex64::new(0.0, 0.0); m];
            kernel[0] = chirp[0].conj();
            for j in 1..len {
                kernel[j] = chirp[j].conj();
                kernel[m - j] = chirp[j].conj();
            }
            inner.forward(&mut kernel);
            Kind::Bluestein {
                inner: Box::new(inner),
                chirp,
                kernel_hat: kernel,
            }
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform, X_k = Σ_j x_j e^{-2πi jk/N}.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2 { twiddles, bitrev } => radix2(buf, twiddles, bitrev),
            Kind::Bluestein {
                inner,
                chirp,
                kernel_hat,
            } => {
                let m = inner.len();
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (j, (w, x)) in chirp.iter().zip(buf.iter()).enumerate() {
                    work[j] = x * w;
                }
                inner.forward(&mut work);
                for (a, b) in work.iter_mut().zip(kernel_hat) {
                    *a *= b;
                }
                inner.inverse(&mut work);
                let scale = 1.0 / m as f64;
                for (k, out) in buf.iter_mut().enumerate() {
                    *out = work[k] * chirp[k] * scale;
                }
            }
        }
    }

    /// In-place inverse transform without the 1/N factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for z in buf.iter_mut() {
            *z = z.conj();
        }
        self.forward(buf);
        for z in buf.iter_mut() {
            *z = z.conj();
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64], bitrev: &[u32]) {
    let n = buf.len();
    for i in 0..n {
        let j = bitrev[i] as usize;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let step = n / size;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let w = twiddles[k * step];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        size *= 2;
    }
}
