use symker::kernels::KernelFamily;
use symker::quad::QuadratureSpec;

fn main() {
    let inner = QuadratureSpec { rel_tol: 5e-7, abs_tol: 1e-300, max_subdivisions: 1200 };
    for fam in [KernelFamily::frac_poisson(0.5, 0.0).unwrap(), KernelFamily::frac_heat(0.5, 0.0).unwrap()] {
        let ev = fam.evaluator().unwrap().with_spec(inner);
        for r in [0.0f64, 0.5, 2.0, 10.0, 100.0] {
            let v = ev.eval(0.5, r).map(|x| x.ln());
            let l = ev.eval_ln(0.5, r);
            println!("{} r={r}: ln(eval) {v:?} eval_ln {l:?}", fam.label());
        }
    }
}
