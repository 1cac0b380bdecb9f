//! Build G_n and print its column structure.
//!
//! cargo run --example glued_tree -- 4

use glued_localization::GluedTreeGraph;

fn main() -> glued_localization::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(Ok(4), |s| s.parse())
        .expect("depth");
    let g = GluedTreeGraph::build(n)?;
    println!(
        "G_{n}: {} vertices, {} edges, {} columns",
        g.vertex_count(),
        g.edge_count(),
        g.column_count()
    );
    for j in 0..g.column_count() {
        let range = g.column_range(j);
        let degrees: Vec<usize> = range.clone().map(|v| g.degree(v)).collect();
        let (lo, hi) = (degrees.iter().min().unwrap(), degrees.iter().max().unwrap());
        println!(
            "column {j:>3}: {:>5} vertices, degree {lo}..={hi}",
            g.column_size(j)
        );
    }
    let left = g.leftmost();
    println!("left root {left} -> {:?}", g.neighbors(left));
    Ok(())
}
