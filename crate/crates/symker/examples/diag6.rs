use symker::kernels::{spherical_mass, KernelFamily};

fn main() {
    for zeta in [0.0, 0.5, 1.0] {
        for alpha in [0.5, 1.0, 1.5] {
            for t in [0.5f64, 1.0] {
                let fam = KernelFamily::frac_heat(alpha, zeta).unwrap();
                match spherical_mass(&fam, t) {
                    Ok(got) => {
                        let want = (-t * (zeta as f64).powf(alpha)).exp();
                        let err = (got - want).abs();
                        if err > 1e-6 { println!("alpha={alpha} zeta={zeta} t={t}: ERR {err:.3e}"); }
                    }
                    Err(e) => println!("alpha={alpha} zeta={zeta} t={t}: FAILED {e}"),
                }
            }
        }
    }
    // extension bound
    for zeta in [0.0, 0.5, 1.0] {
        for sigma in [0.25, 0.5, 0.75] {
            for t in [0.5f64, 1.0] {
                let fam = KernelFamily::frac_poisson(sigma, zeta).unwrap();
                match spherical_mass(&fam, t) {
                    Ok(got) => { if got - 1.0 > 1e-8 { println!("Q sigma={sigma} zeta={zeta} t={t}: excess {:.3e}", got - 1.0); } }
                    Err(e) => println!("Q sigma={sigma} zeta={zeta} t={t}: FAILED {e}"),
                }
            }
        }
    }
    println!("done");
}
