//! Fixtures shared by the benchmarks in `benches/`.

use twistcohom::foliation::MappingTorusModel;
use twistcohom::{TorusModel, TrigPoly, TwistClass};

/// The suspension of `[[2, 1], [1, 1]]`.
pub fn cat_map(cutoff: usize) -> MappingTorusModel {
    MappingTorusModel::from_matrix([[2, 1], [1, 1]], cutoff).expect("hyperbolic and unimodular")
}

/// A flat torus with the twist `dx^1`, or `dx^1 + df` for a one-term potential.
pub fn twisted_torus(dim: usize, cutoff: usize, with_potential: bool) -> (TorusModel, TwistClass) {
    let t = TorusModel::new(dim, cutoff).expect("supported dimension");
    let mut theta = vec![0.0; dim];
    theta[0] = 1.0;
    let mut k = vec![0; dim];
    k[dim - 1] = 1;
    let f = with_potential.then(|| TrigPoly::sin(&k, 0.2));
    let twist = t.twist(&theta, f);
    (t, twist)
}
