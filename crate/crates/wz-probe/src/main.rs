use wz_core::*;
fn main() {
    let e = expr::parse("(-1)^k*binomial(2*n, n+k)^3").unwrap();
    let t = hyper::to_hyper_term(&e, "n", &["k".to_string()]).unwrap();
    let mut cost = Cost::new();
    let sys = telescope::build_linear_system(&t, 1, &mut cost).unwrap();
    println!("L=1 dims: unknowns={} equations={} d={:?}", sys.unknowns(), sys.equations(), sys.degree_bound);
    let mut cost2 = Cost::new();
    let cert = telescope::find_recurrence(&t, 6, &mut cost2).unwrap();
    println!("find_recurrence cost: {:?}", cost2);
    println!("meta: {:?}", cert.degree_meta);
}
