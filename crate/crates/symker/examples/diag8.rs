use std::time::Instant;
use symker::kernels::{spherical_mass, KernelFamily};

fn main() {
    for (alpha, zeta) in [(0.5, 0.0), (1.5, 0.0), (0.5, 1.0)] {
        let t0 = Instant::now();
        let fam = KernelFamily::frac_heat(alpha, zeta).unwrap();
        let m = spherical_mass(&fam, 1.0);
        println!("frac_heat({alpha},{zeta}): {m:?} in {:?}", t0.elapsed());
    }
    for (sigma, zeta) in [(0.5, 0.0), (0.25, 0.0)] {
        let t0 = Instant::now();
        let fam = KernelFamily::frac_poisson(sigma, zeta).unwrap();
        let m = spherical_mass(&fam, 1.0);
        println!("frac_poisson({sigma},{zeta}): {m:?} in {:?}", t0.elapsed());
    }
}
