//! Solves the 2R2P2R example chain for a pose produced by forward kinematics.

use ik6rp::{forward_kinematics, solve_ik, Chain, Joints, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain = Chain::from_table(&[
        ('R', None, Some(0.0), 0.0, 90.0),
        ('R', None, Some(0.0), 0.25, 45.0),
        ('P', Some(30.0), None, 0.1, 60.0),
        ('P', Some(-40.0), None, 0.2, 30.0),
        ('R', None, Some(0.3), 0.15, -45.0),
        ('R', None, Some(0.0), 0.0, 0.0),
    ])?;
    let q = Joints::from_external(&chain, [25.0, -40.0, 0.3, -0.1, 70.0, 10.0])?;
    let pose = forward_kinematics(&chain, &q);
    println!("pose {:?}", pose.canonical().coords());

    let out = solve_ik(&chain, &pose, &SolverOptions::default())?;
    for s in &out.solutions {
        println!("{:10.4?}  residual {:.1e}", s.external, s.residual);
    }
    println!("families {}, {} candidate(s), {} rejected", out.meta.families(), out.meta.candidates, out.meta.rejected);
    Ok(())
}
