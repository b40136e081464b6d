#![allow(dead_code)]

use adkey_core::{CMatrix, DensityMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// GG†/tr with G of shape d × rank.
pub fn random_state_rank(rng: &mut impl Rng, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_state(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    random_state_rank(rng, d, d)
}

/// Full rank most of the time, occasionally rank deficient or pure.
pub fn random_state_mixed_rank(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let rank = match rng.random_range(0..6) {
        0 => 1,
        1 => rng.random_range(1..=d),
        _ => d,
    };
    random_state_rank(rng, d, rank)
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    ginibre(rng, d, d).qr().q()
}

/// Uniform on the simplex.
pub fn random_distribution(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = x.iter().sum();
    x.into_iter().map(|v| v / s).collect()
}

/// Simplex point with some entries forced to zero.
pub fn random_sparse_distribution(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    loop {
        let mut p = random_distribution(rng, k);
        for v in p.iter_mut() {
            if rng.random_bool(0.2) {
                *v = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        if s > 0.0 {
            return p.into_iter().map(|v| v / s).collect();
        }
    }
}

/// Σ_x min(π₀ P₀ⁿ(x), π₁ P₁ⁿ(x)) by walking every length-n string.
pub fn enumerate_product_error(prior_0: f64, p0: &[f64], p1: &[f64], n: usize) -> f64 {
    let k = p0.len();
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut a = prior_0;
        let mut b = 1.0 - prior_0;
        for &i in &idx {
            a *= p0[i];
            b *= p1[i];
        }
        total += a.min(b);
        let mut pos = 0;
        loop {
            if pos == n {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Von Neumann entropy in bits straight from a Hermitian eigensolve.
pub fn entropy_bits(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

/// H(C|E) = H(CE) − H(E) for Σ_c p_c |c⟩⟨c| ⊗ ω_c.
pub fn cond_entropy_oracle(priors: &[f64], states: &[CMatrix]) -> f64 {
    let mut h_ce = 0.0;
    let mut avg = CMatrix::zeros(states[0].nrows(), states[0].ncols());
    for (p, s) in priors.iter().zip(states) {
        if *p > 0.0 {
            h_ce += -p * p.log2() + p * entropy_bits(s);
        }
        avg += s * C64::new(*p, 0.0);
    }
    h_ce - entropy_bits(&avg)
}

pub fn kron_power(m: &CMatrix, n: usize) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kronecker(m);
    }
    out
}
