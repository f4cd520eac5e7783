use ies_control::ocp::OcpProblem;
use ies_control::nlp::{solve_nlp_traced, NlpSettings};

#[test]
fn dbg_two_stage() {
    let prob = OcpProblem::new(
        2, 1.0, 1, 2,
        vec![0.0],
        Box::new(|_, x, u| Ok(vec![x[0] + u[0] * u[1]])),
        Box::new(|_, x_next, u| (x_next[0] - 1.0).powi(2) + 0.01 * u[0] * u[0]),
    ).unwrap()
    .with_bounds(vec![0.0, 1.0, 0.0, 1.0], vec![2.0, 1.0, 2.0, 1.0]).unwrap();
    let mut trace = Vec::new();
    let sol = solve_nlp_traced(&prob, Some(&[0.5, 1.0, 0.5, 1.0]), &NlpSettings::default(), &mut trace);
    eprintln!("u = {:?} obj = {} status = {:?} iters = {}", sol.u, sol.objective, sol.status, sol.iterations);
    for r in &trace {
        eprintln!("round {} iter {} merit {} step {}", r.round, r.iteration, r.merit, r.step_length);
    }
    assert!((sol.u[0] - 0.9902).abs() < 1e-3, "a = {}", sol.u[0]);
    assert!((sol.u[2] - 0.00971).abs() < 1e-3, "b = {}", sol.u[2]);
}
