use hadamard_core::{parse, Interval, quadrature::*};
fn main() {
    let f = parse("max(x, 1-x)").unwrap();
    let a = -0.6878415393676307; let b = a + 2.8485866921380505;
    let anti = |x: f64| if x <= 0.5 { x - x*x/2.0 } else { x*x/2.0 + 0.25 };
    let r = integrate(&f, Interval::new(a,b).unwrap(), DEFAULT_TOL).unwrap();
    println!("{:?} err {}", r, r.value-(anti(b)-anti(a)));
    // dig: subpanel near kink
    for n in [128usize, 256, 512, 1024, 2048, 4096, 8192] {
        let ivs = Interval::new(a,b).unwrap().split(n);
        for iv in ivs { if iv.contains(0.5) { let r = integrate_with(&f, iv, 1e3, 3).unwrap(); println!("{n} {iv} {:?} err {}", r, r.value - (anti(iv.hi())-anti(iv.lo()))); } }
    }
}
