use selentropy::bounds::{bipartite_ucr_residual, BipartiteEps};
use selentropy::operators::{random_povm, random_state, SystemLayout};
use rayon::prelude::*;

fn main() {
    let eps = BipartiteEps { eps: 0.005, eps_bar: 0.02, eps_tilde: 0.01, eps_tilde_prime: 0.01 };
    let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
    let fails: usize = (0..200u64).into_par_iter().map(|seed| {
        let rho = random_state(&layout, 2, 81000 + seed).unwrap();
        let x = random_povm(2, 2, 2300 + seed).unwrap();
        let y = random_povm(2, 2, 2700 + seed).unwrap();
        match bipartite_ucr_residual(&rho, "A", &["B"], &x, &y, eps) {
            Ok(r) => { assert!(r >= -1e-5, "seed {seed}: {r}"); 0 }
            Err(e) => { println!("seed {seed}: {e}"); 1 }
        }
    }).sum();
    println!("fails {fails}/200");
}
