use pwacert_core::*;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "va".into());
    let t0 = Instant::now();
    if which == "va" {
        let sys = presets::quadrant_system(0.15).unwrap();
        let net = presets::quadrant_controller().unwrap();
        let opts = reach::ReachOptions::for_dim(2);
        let config = certify::CertifyConfig { eps_bar: 1e-3, ..Default::default() };
        match certify::assemble_certificate(&sys, &net, &opts, &config) {
            Ok(cert) => {
                println!("V-A: f_max iters={} k_bar={:?} alpha={:?} delta={:?} verdict={:?}",
                    cert.f_max_iterations, cert.k_bar, cert.alpha, cert.delta_max, cert.stability_verdict);
                println!("f_max supports: {:?}", cert.f_max.b().iter().collect::<Vec<_>>());
                if let Some(r) = &cert.r_min { println!("r_min supports: {:?}", r.b().iter().collect::<Vec<_>>()); }
            }
            Err(e) => println!("V-A FAILED: {e}"),
        }
    } else {
        let f = |x: &nalgebra::DVector<f64>, u: &nalgebra::DVector<f64>| presets::nonlinear_double_integrator(x, u);
        let (dx, du) = presets::double_integrator_domain();
        let guards = approx::chessboard_guards(&[-4.0, 0.0, 4.0], 2.0, 1);
        let data = approx::SampledDynamics::from_grid(&f, &dx, &du, 30, 5).unwrap();
        let fit = approx::fit_least_squares(&data, &guards).unwrap();
        let val = approx::SampledDynamics::from_grid(&f, &dx, &du, 120, 20).unwrap();
        let bounded = approx::error_bound(&fit, &val, 0.01, false).unwrap();
        println!("global bound: {:?}", bounded.region_bounds[0]);
        let net = presets::double_integrator_controller().unwrap();
        let opts = reach::ReachOptions::for_dim(2);
        let config = certify::CertifyConfig { eps_bar: 1e-3, ..Default::default() };
        match approx::uub_certify(&bounded, &net, &opts, &config) {
            Ok(cert) => {
                println!("V-B: f_max iters={} k_bar={:?} alpha={:?} uub={:?}",
                    cert.f_max_iterations, cert.k_bar, cert.alpha, cert.uub_verdict);
                if let Some(r) = &cert.r_min { println!("r_min supports: {:?}", r.b().iter().collect::<Vec<_>>()); }
            }
            Err(e) => println!("V-B FAILED: {e}"),
        }
    }
    println!("elapsed: {:.1}s", t0.elapsed().as_secs_f64());
}
