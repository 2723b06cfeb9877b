use symker::kernels::KernelFamily;
use symker::quad::QuadratureSpec;

fn main() {
    let fam = KernelFamily::frac_poisson(0.5, 0.0).unwrap();
    let inner = QuadratureSpec { rel_tol: 5e-9, abs_tol: 1e-300, max_subdivisions: 1200 };
    let ev = fam.evaluator().unwrap().with_spec(inner);
    let t = 0.5;
    let mut r = 0.05f64;
    while r < 1e12 {
        match ev.eval_ln(t, r) {
            Ok(_) => {}
            Err(e) => { println!("inner fails at r = {r:.4e}: {e}"); break; }
        }
        r *= 3.7;
    }
    println!("scan done");
}
