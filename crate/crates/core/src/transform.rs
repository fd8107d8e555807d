//! 8×8 orthonormal DCT-II and plane ↔ block helpers shared by the digital
//! codec and the analog mapper.

use std::sync::OnceLock;

use crate::scalar::Real;

pub const N: usize = 8;
pub const BLOCK: usize = N * N;

pub type Block<T> = [T; BLOCK];

fn basis_f64() -> &'static [[f64; N]; N] {
    static C: OnceLock<[[f64; N]; N]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [[0.0; N]; N];
        for (k, row) in c.iter_mut().enumerate() {
            let a = if k == 0 {
                (1.0 / N as f64).sqrt()
            } else {
                (2.0 / N as f64).sqrt()
            };
            for (n, v) in row.iter_mut().enumerate() {
                *v = a
                    * ((2 * n + 1) as f64 * k as f64 * std::f64::consts::PI / (2 * N) as f64).cos();
            }
        }
        c
    })
}

fn basis<T: Real>() -> [[T; N]; N] {
    let b = basis_f64();
    let mut c = [[T::zero(); N]; N];
    for k in 0..N {
        for n in 0..N {
            c[k][n] = T::lit(b[k][n]);
        }
    }
    c
}

/// Forward 2-D DCT, row-major in and out (`out[u·8 + v]`, `u` vertical).
pub fn dct8x8<T: Real>(x: &Block<T>) -> Block<T> {
    let c = basis::<T>();
    let mut tmp = [T::zero(); BLOCK];
    for r in 0..N {
        for v in 0..N {
            let mut s = T::zero();
            for n in 0..N {
                s += c[v][n] * x[r * N + n];
            }
            tmp[r * N + v] = s;
        }
    }
    let mut out = [T::zero(); BLOCK];
    for u in 0..N {
        for v in 0..N {
            let mut s = T::zero();
            for r in 0..N {
                s += c[u][r] * tmp[r * N + v];
            }
            out[u * N + v] = s;
        }
    }
    out
}

pub fn idct8x8<T: Real>(x: &Block<T>) -> Block<T> {
    let c = basis::<T>();
    let mut tmp = [T::zero(); BLOCK];
    for u in 0..N {
        for m in 0..N {
            let mut s = T::zero();
            for v in 0..N {
                s += c[v][m] * x[u * N + v];
            }
            tmp[u * N + m] = s;
        }
    }
    let mut out = [T::zero(); BLOCK];
    for r in 0..N {
        for m in 0..N {
            let mut s = T::zero();
            for u in 0..N {
                s += c[u][r] * tmp[u * N + m];
            }
            out[r * N + m] = s;
        }
    }
    out
}

/// Splits a `height × width` plane into 8×8 blocks (raster order) and
/// transforms each one.
pub fn forward_plane<T: Real>(plane: &[T], height: usize, width: usize) -> Vec<Block<T>> {
    let (bh, bw) = (height / N, width / N);
    let mut blocks = Vec::with_capacity(bh * bw);
    for by in 0..bh {
        for bx in 0..bw {
            let mut b = [T::zero(); BLOCK];
            for r in 0..N {
                let row = (by * N + r) * width + bx * N;
                b[r * N..r * N + N].copy_from_slice(&plane[row..row + N]);
            }
            blocks.push(dct8x8(&b));
        }
    }
    blocks
}

/// Inverse of [`forward_plane`].
pub fn inverse_plane<T: Real>(blocks: &[Block<T>], height: usize, width: usize) -> Vec<T> {
    let bw = width / N;
    let mut plane = vec![T::zero(); height * width];
    for (i, coeffs) in blocks.iter().enumerate() {
        let (by, bx) = (i / bw, i % bw);
        let b = idct8x8(coeffs);
        for r in 0..N {
            let row = (by * N + r) * width + bx * N;
            plane[row..row + N].copy_from_slice(&b[r * N..r * N + N]);
        }
    }
    plane
}
