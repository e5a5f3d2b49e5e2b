//! `L†L` in dense form and as an explicit Pauli expansion.
//!
//! With `K = H⊗I − I⊗H*` and `D[F] = F⊗F* − ½F†F⊗I − ½I⊗FᵀF*` the Liouvillian
//! is `L = −iK + Σ λ_α D[F_α]`, so
//!
//! `L†L = K² + Σ λ_α i(K·D_α − D_α†·K) + Σ λ_α λ_β D_α†·D_β`.
//!
//! Each block below is written out as a sum of `row ⊗ column` products of
//! `n`-qubit sums; nothing is multiplied on the doubled register.

use crate::error::{Error, Result};
use crate::linalg::c;
use crate::pauli::{PauliString, PauliSum};

use super::spec::LmeSpec;
use super::superop::{build_liouvillian, SuperOp};

/// Bilinear Hamiltonian block: `(H1⊗I − I⊗H1*)(H2⊗I − I⊗H2*)`.
pub fn hamiltonian_block(h1: &PauliSum, h2: &PauliSum) -> PauliSum {
    let n = h1.n();
    let id = PauliSum::identity(n);
    let (h1c, h2c) = (h1.conj(), h2.conj());
    let mut out = (h1 * h2).tensor(&id);
    out = &out - &h1.tensor(&h2c);
    out = &out - &h2.tensor(&h1c);
    &out + &id.tensor(&(&h1c * &h2c))
}

/// Hamiltonian-dissipator cross block `i(K·D − D†·K)`, linear in `H` and in the rate.
pub fn cross_block(h: &PauliSum, f: &PauliSum) -> PauliSum {
    let n = h.n();
    let id = PauliSum::identity(n);
    let i = c(0.0, 1.0);
    let (fd, fc, ft, hc) = (f.adjoint(), f.conj(), f.transpose(), h.conj());
    let fdf = &fd * f;
    let ftfc = &ft * &fc;
    let mut out = (h * f).tensor(&fc);
    out = &out - &(&fd * h).tensor(&ft);
    out = &out + &fd.tensor(&(&ft * &hc));
    out = &out - &f.tensor(&(&hc * &fc));
    let comm_row = &(&fdf * h) - &(h * &fdf);
    let comm_col = &(&hc * &ftfc) - &(&ftfc * &hc);
    out = &out + &comm_row.tensor(&id).scale_real(0.5);
    out = &out + &id.tensor(&comm_col).scale_real(0.5);
    out.scale(i)
}

/// Dissipator product block `D[F_a]†·D[F_b]`.
pub fn dissipator_block(fa: &PauliSum, fb: &PauliSum) -> PauliSum {
    let n = fa.n();
    let id = PauliSum::identity(n);
    let (fad, fat, fac) = (fa.adjoint(), fa.transpose(), fa.conj());
    let (fbd, fbt, fbc) = (fb.adjoint(), fb.transpose(), fb.conj());
    let fadfa = &fad * fa;
    let fbdfb = &fbd * fb;
    let fatfac = &fat * &fac;
    let fbtfbc = &fbt * &fbc;

    let terms = [
        ((&fad * fb).tensor(&(&fat * &fbc)), 1.0),
        (fad.tensor(&(&fat * &fbtfbc)), -0.5),
        (fb.tensor(&(&fatfac * &fbc)), -0.5),
        ((&fad * &fbdfb).tensor(&fat), -0.5),
        ((&fadfa * fb).tensor(&fbc), -0.5),
        (fadfa.tensor(&fbtfbc), 0.25),
        (fbdfb.tensor(&fatfac), 0.25),
        (id.tensor(&(&fatfac * &fbtfbc)), 0.25),
        ((&fadfa * &fbdfb).tensor(&id), 0.25),
    ];
    let mut out = PauliSum::zero(2 * n);
    for (t, w) in terms {
        out = &out + &t.scale_real(w);
    }
    out
}

/// Symbolic `L†L` for a concrete spec. No dense matrices are formed, so this
/// works past the dense cap.
pub fn ldl_pauli(spec: &LmeSpec) -> PauliSum {
    let h = spec.hamiltonian();
    let mut out = hamiltonian_block(h, h);
    let jumps = spec.jumps();
    for ja in jumps {
        out = &out + &cross_block(h, &ja.op).scale_real(ja.rate);
        for jb in jumps {
            out = &out + &dissipator_block(&ja.op, &jb.op).scale_real(ja.rate * jb.rate);
        }
    }
    out
}

/// Both forms of `L†L` plus the disagreement between them.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub dense: SuperOp,
    pub pauli: PauliSum,
    /// Largest coefficient difference between the expansion and the Pauli
    /// decomposition of the dense product.
    pub dual_path_error: f64,
}

pub fn build_ldl(spec: &LmeSpec) -> Result<Ldl> {
    let l = build_liouvillian(spec)?;
    let dense = SuperOp::new(spec.n(), l.matrix().adjoint() * l.matrix())?;
    let pauli = ldl_pauli(spec);
    let decomposed = crate::pauli::pauli_decompose(dense.matrix())?;
    let err = pauli.max_abs_diff(&decomposed);
    let scale = decomposed.iter().map(|(_, v)| v.norm()).fold(1.0, f64::max);
    if err > 1e-10 * scale {
        return Err(Error::Consistency(format!("symbolic L†L differs from the dense product by {err:e}")));
    }
    Ok(Ldl { dense, pauli, dual_path_error: err })
}

/// Largest violation of `g_ji = (−1)^{#Y(P_i)+#Y(P_j)} g_ij*`, where `g_ij` is
/// the weight of `P_i ⊗ P_j` on a `2n`-qubit register. This is the Pauli-basis
/// form of the exchange time-reversal symmetry `S·M*·S = M`.
pub fn exchange_symmetry_violation(sum: &PauliSum) -> Result<f64> {
    if !sum.n().is_multiple_of(2) {
        return Err(Error::Shape(format!("exchange symmetry needs an even qubit count, got {}", sum.n())));
    }
    let n = sum.n() / 2;
    let mut worst: f64 = 0.0;
    for (s, g) in sum.iter() {
        let (pi, pj) = s.split_at(n);
        let swapped: PauliString = pj.tensor(&pi);
        let expect = g.conj() * pi.transpose_sign() * pj.transpose_sign();
        worst = worst.max((sum.coeff(&swapped) - expect).norm());
    }
    Ok(worst)
}
