//! Prints the Bessel-transform bound ratios used to freeze `BESSEL_C`.
use modkit::spectral::bessel_bound_ratios;
use modkit::Exec;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let t = std::time::Instant::now();
    let r = bessel_bound_ratios(&[1.0, 2.0, 4.0, 8.0], n, Exec::Parallel).unwrap();
    println!("n={n} check={:.6} tilde={:.6} tail={:.3e} ({:.2}s)", r.check, r.tilde, r.tail, t.elapsed().as_secs_f64());
}
