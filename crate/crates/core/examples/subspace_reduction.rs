//! The clean walk never leaves the span of the uniform column states: the
//! full Hamiltonian compresses to the (2n+1)-site line exactly.

use glued_localization::line::{compress_hamiltonian, verify_subspace_closure};
use glued_localization::{column_basis, reduced_hamiltonian, GluedTreeGraph};

fn main() -> glued_localization::Result<()> {
    let gamma = 1.0;
    println!(" n  vertices  closure residual  max entry error");
    for n in 1..=8 {
        let g = GluedTreeGraph::build(n)?;
        let basis = column_basis(&g);
        let residual = verify_subspace_closure(&g, &basis, gamma)?;
        let compressed = compress_hamiltonian(&g, &basis, gamma)?;
        let line = reduced_hamiltonian(n, gamma)?.to_dense();
        let err = (compressed - line).abs().max();
        println!(
            "{n:>2}  {:>8}  {residual:>16.2e}  {err:>15.2e}",
            g.vertex_count()
        );
    }
    let h = reduced_hamiltonian(3, gamma)?;
    println!("\nline Hamiltonian for n = 3");
    println!("diagonal     {:?}", h.diagonal());
    println!("off-diagonal {:?}", h.off_diagonal());
    Ok(())
}
