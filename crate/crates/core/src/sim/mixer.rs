//! Single-site generators for the qudit mixer.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `ω^m` with `ω = e^{2πi/d}`, reducing `m mod d` first for accuracy.
fn root_of_unity(m: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (m % d) as f64 / d as f64)
}

/// Unitary `d`-point DFT, `F[a][k] = ω^{ak} / √d`, row-major.
pub fn dft_matrix(d: usize) -> Vec<Complex64> {
    let norm = 1.0 / (d as f64).sqrt();
    let mut f = Vec::with_capacity(d * d);
    for a in 0..d {
        for k in 0..d {
            f.push(root_of_unity(a * k, d) * norm);
        }
    }
    f
}

/// Eigenvalues `2cos(2πk/d)` of `S + S†` in the Fourier basis.
pub fn shift_generator_spectrum(d: usize) -> Vec<f64> {
    (0..d)
        .map(|k| 2.0 * (2.0 * PI * k as f64 / d as f64).cos())
        .collect()
}

/// `U_d(β) = exp(−iβ(S + S†)) = F · diag(e^{−iβ·2cos(2πk/d)}) · F†`, row-major.
pub fn mixer_unitary(d: usize, beta: f64) -> Vec<Complex64> {
    let phases: Vec<Complex64> = shift_generator_spectrum(d)
        .into_iter()
        .map(|lambda| Complex64::from_polar(1.0, -beta * lambda))
        .collect();
    let inv_d = 1.0 / d as f64;
    let mut u = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..d {
        for b in 0..d {
            // Σ_k F[a][k] phase_k conj(F[b][k]) = (1/d) Σ_k ω^{(a−b)k} phase_k
            let shift = (a + d - b) % d;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ph) in phases.iter().enumerate() {
                acc += root_of_unity(shift * k, d) * ph;
            }
            u[a * d + b] = acc * inv_d;
        }
    }
    u
}
