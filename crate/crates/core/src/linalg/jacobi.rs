use super::{CMatrix, Complex, Hermitian};

/// Stopping rule for the cyclic Jacobi sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiConfig {
    /// Stop once the off-diagonal Frobenius norm drops below
    /// `rel_threshold * ‖H‖_F`.
    pub rel_threshold: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        Self {
            rel_threshold: 1e-14,
            max_sweeps: 100,
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian(h: &Hermitian) -> Vec<f64> {
    eigenvalues_hermitian_with(h, &JacobiConfig::default())
}

pub fn eigenvalues_hermitian_with(h: &Hermitian, cfg: &JacobiConfig) -> Vec<f64> {
    let n = h.dim();
    let m: &CMatrix = h.matrix();
    let mut a: Vec<Complex> = m.as_slice().to_vec();
    // Start from an exactly Hermitian copy.
    for i in 0..n {
        a[i * n + i] = Complex::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let z = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }

    let total = m.frobenius_norm();
    let threshold = cfg.rel_threshold * total;

    for _ in 0..cfg.max_sweeps {
        if off_diagonal_norm(&a, n) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

fn off_diagonal_norm(a: &[Complex], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `U = diag-phase · Givens`:
/// `U_pp = c`, `U_pq = s`, `U_qp = -s e^{-iα}`, `U_qq = c e^{-iα}`, where
/// `α = arg a[p][q]`. The matrix is replaced by `U† A U`.
fn rotate(a: &mut [Complex], n: usize, p: usize, q: usize) {
    let g = a[p * n + q];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = g / g_abs; // e^{iα}
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();

    // A ← A U (columns p, q)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * phase_conj * s;
        a[k * n + q] = akp * s + akq * phase_conj * c;
    }
    // A ← U† A (rows p, q)
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * phase * s;
        a[q * n + k] = apk * s + aqk * phase * c;
    }
    a[p * n + q] = Complex::new(0.0, 0.0);
    a[q * n + p] = Complex::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}
