use nalgebra::{Complex, DMatrix};

fn main() {
    // Hermitian 4x4
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let mut m = DMatrix::<Complex<f64>>::zeros(4, 4);
    for k in 0..4 { m[(k, k)] = Complex::new(k as f64 + 1.0, 0.0); }
    m[(0, 1)] = one * 0.5 + i * 0.25; m[(1, 0)] = m[(0, 1)].conj();
    m[(2, 3)] = one * 0.1 - i * 0.7;  m[(3, 2)] = m[(2, 3)].conj();
    let se = m.clone().symmetric_eigen();
    println!("eigenvalues: {:?}", se.eigenvalues.as_slice());
    // reconstruct check
    let d = DMatrix::from_diagonal(&se.eigenvalues.map(|v| Complex::new(v, 0.0)));
    let rec = &se.eigenvectors * d * se.eigenvectors.adjoint();
    println!("reconstruction error: {:.3e}", (&rec - &m).norm());
}
