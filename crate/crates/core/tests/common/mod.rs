#![allow(dead_code)]

use qrate::entropic::BipartiteState;
use qrate::qcore::matrix::{permute_vector, tensor_vec, ComplexMatrix};
use qrate::qcore::state::purify;
use qrate::qcore::{DensityMatrix, QuantumChannel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(id ⊗ N)(ψ_1 ⊗ ψ_2)` on `R_1 R_2 B_1 B_2` for a channel `A_1 A_2 → B_1 B_2`
/// with `dim B_i = dim A_i`.
pub fn joint_output(n: &QuantumChannel, rho1: &DensityMatrix, rho2: &DensityMatrix) -> (ComplexMatrix, [usize; 4]) {
    let p1 = purify(rho1).unwrap();
    let p2 = purify(rho2).unwrap();
    let (r1, a1, r2, a2) = (p1.dim_r(), p1.dim_a(), p2.dim_r(), p2.dim_a());
    let v = tensor_vec(p1.vector(), p2.vector());
    // R1 A1 R2 A2 -> R1 R2 A1 A2.
    let v = permute_vector(&v, &[r1, a1, r2, a2], &[0, 2, 1, 3]).unwrap();
    let proj = ComplexMatrix::outer(&v, &v);
    let out = n.apply_on_second(&proj, r1 * r2);
    assert_eq!(n.dim_out(), a1 * a2, "outputs B_i have the input dimensions");
    (out, [r1, r2, a1, a2])
}

pub fn bipartite(m: ComplexMatrix, da: usize, db: usize) -> BipartiteState {
    BipartiteState::new(DensityMatrix::new(m.hermitian_part()).unwrap(), da, db).unwrap()
}
