//! Hermitian and unitary eigendecompositions, with the Jacobi solver as a cross-check.

use floquet::model::fleet::random_model;
use floquet::numerics::{expm_hermitian, hermitian_eig, jacobi_eig, unitary_eig};

fn main() -> floquet::Result<()> {
    let h = random_model(6, 0, 0.0, 11).h0().clone();

    let eig = hermitian_eig(&h)?;
    let jac = jacobi_eig(&h)?;
    println!("eigenvalues      {:.6?}", eig.real_values());
    println!("residual         {:.1e}", eig.max_residual(&h));
    let spread = eig
        .real_values()
        .iter()
        .zip(jac.real_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("vs jacobi        {spread:.1e}");

    let u = expm_hermitian(&h, 0.8)?;
    let ueig = unitary_eig(&u)?;
    let worst = ueig.values.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    println!("unitarity of U   {:.1e}", u.unitarity_defect());
    println!("max ||z| - 1|    {worst:.1e}");
    println!("residual         {:.1e}", ueig.max_residual(&u));
    Ok(())
}
