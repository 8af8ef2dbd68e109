//! Real Clifford representations and their defining relations.
use delone_topo::clifford::*;

fn main() -> delone_topo::Result<()> {
    for (p, q) in [(1, 1), (2, 0), (0, 3), (3, 1), (4, 4)] {
        let rep = build_rep(p, q)?;
        let check = verify_relations(&rep);
        println!(
            "Cl_{{{p},{q}}}: dim {:3}, {:2} relations, max residual {}, spanning rank {}",
            rep.dim,
            check.relations_checked,
            check.max_residual,
            spanning_rank(&rep)
        );
    }
    let rep = build_rep(2, 0)?;
    let g = grading_operator(&rep);
    let anti: f64 = rep.generators().map(|e| g.mul(e).add(&e.mul(&g)).max_abs()).fold(0.0, f64::max);
    println!("grading anticommutes with Cl_{{2,0}} generators: residual {anti}");
    Ok(())
}
