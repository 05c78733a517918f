use quadlim::collapse::*;
use quadlim::folding::FoldingPath;

fn main() {
    let cfg = CollapseConfig::build(3.84, 14, 40).unwrap();
    println!("strips q: {:?}", (0..3).map(|j| cfg.strip_q(j)).collect::<Vec<_>>());
    println!("strips t: {:?}", (0..3).map(|j| cfg.strip_t(j)).collect::<Vec<_>>());
    println!("p: {:?}", cfg.cycle.p);
    println!("p_hat: {:?}", cfg.cycle.p_hat);
    println!("J: {:?}", cfg.cycle.intervals);
    // anchor point
    let x = grid_anchor_point(&cfg, 0, 36).unwrap();
    println!("anchor coords[0..8] = {:?}", &x.coords[..8]);
    match locate(&x, &cfg) {
        Ok(c) => println!("anchor located: {:?} lambda {:?}", c.case_tag, c.lambda),
        Err(e) => println!("anchor locate error: {e}"),
    }
    // salient transfer debug
    let path_q = FoldingPath::grown(cfg.q, 0, 5).unwrap();
    let path_t = FoldingPath::grown(cfg.t, 0, 5).unwrap();
    println!("q nodes {} t nodes {}", path_q.node_count(), path_t.node_count());
    for i in 0..path_q.node_count().min(40) {
        print!("({:?},{:.3}) ", path_q.level(i), path_q.value(i));
    }
    println!();
    for i in 0..path_t.node_count().min(40) {
        print!("({:?},{:.3}) ", path_t.level(i), path_t.value(i));
    }
    println!();
}
