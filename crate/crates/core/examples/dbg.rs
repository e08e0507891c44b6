use tropcone::graphs::*;
fn main() {
    let all = enumerate_stable_graphs(3, None);
    for g in all.iter().filter(|g| g.total_weight() == 0 && g.n_edges() == 6) {
        println!("{:?} reversing={} autos={}", g.edges,
            has_orientation_reversing_automorphism(g, None),
            automorphisms(g, None).len());
    }
}
