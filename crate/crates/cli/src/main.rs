use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ik6rp::io::{emit_chain, format_pose, parse_chain, parse_pose, IoError, SolutionReport};
use ik6rp::spaces::{left_families, right_families, FamilyCandidates};
use ik6rp::{forward_kinematics, Chain, Joints, SolverError, SolverOptions, Study};

#[derive(Parser)]
#[command(name = "ik6rp", version, about = "Inverse kinematics of 2RP3R, 2R2P2R, 3RP2R and 6R manipulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for all real joint vectors reaching a pose.
    Solve {
        #[arg(long)]
        chain: PathBuf,
        /// Study coordinates "x0,…,x3,y0,…,y3" or a row-major 3×4/4×4 matrix. Repeat for a batch.
        #[arg(long, required = true, allow_hyphen_values = true)]
        pose: Vec<String>,
        /// Largest accepted Study residual of the pose.
        #[arg(long, env = "IK6RP_TOL", default_value_t = 1e-3)]
        tol: f64,
        /// Largest accepted FK residual of a solution.
        #[arg(long, default_value_t = 1e-6)]
        accept: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Print family coefficient tables and elimination data to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Forward kinematics; θ in degrees, d as lengths.
    Fk {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        joints: String,
    },
    /// Report which linear-space families of the chain are usable.
    Check {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Re-emit a chain file in normalized form.
    Fmt {
        #[arg(long)]
        chain: PathBuf,
    },
}

enum Failure {
    Io(String),
    Degenerate(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NotOnStudyQuadric { .. } | SolverError::Pose(_) => Failure::Io(e.to_string()),
            _ => Failure::Degenerate(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Degenerate(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve { chain, pose, tol, accept, format, trace } => {
            let chain = parse_chain(&chain)?;
            let poses = pose.iter().map(|p| parse_pose(p, tol)).collect::<Result<Vec<_>, _>>()?;
            let opts = SolverOptions { pose_tolerance: tol, accept_tolerance: accept, ..Default::default() };
            let results: Vec<_> = poses
                .par_iter()
                .map(|p| {
                    let t = Instant::now();
                    let out = ik6rp::solve_ik(&chain, &p.point, &opts);
                    (out, t.elapsed())
                })
                .collect();
            let mut reports = Vec::with_capacity(results.len());
            for (i, (out, elapsed)) in results.into_iter().enumerate() {
                let out = out?;
                let mut report = SolutionReport::new(&out);
                // The solver sees the already projected pose; report the input's correction.
                report.meta.pose_correction = poses[i].correction;
                if trace {
                    print_trace(&chain, &poses[i].point, &report);
                }
                reports.push((report, elapsed));
            }
            match format {
                Format::Json if reports.len() == 1 => print!("{}", reports[0].0.to_json()),
                Format::Json => {
                    let docs: Vec<_> = reports.iter().map(|(r, _)| r).collect();
                    println!("{}", serde_json::to_string_pretty(&docs).expect("serializable"));
                }
                Format::Table => {
                    for (k, (r, t)) in reports.iter().enumerate() {
                        if reports.len() > 1 {
                            println!("pose {}: {}", k + 1, pose[k]);
                        }
                        print!("{}", r.to_table(&chain, Some(*t)));
                    }
                }
            }
            Ok(())
        }
        Command::Fk { chain, joints } => {
            let chain = parse_chain(&chain)?;
            let vals: Vec<f64> = joints
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| Failure::Io(format!("'{s}' is not a number"))))
                .collect::<Result<_, _>>()?;
            if vals.len() != 6 {
                return Err(Failure::Io(format!("expected 6 joint values, found {}", vals.len())));
            }
            let q = Joints::from_external(&chain, std::array::from_fn(|i| vals[i]))
                .map_err(|e| Failure::Io(e.to_string()))?;
            println!("{}", format_pose(&forward_kinematics(&chain, &q).canonical()));
            Ok(())
        }
        Command::Check { chain } => {
            let chain = parse_chain(&chain)?;
            print!("{}", check_report(&chain));
            Ok(())
        }
        Command::Fmt { chain } => {
            print!("{}", emit_chain(&parse_chain(&chain)?));
            Ok(())
        }
    }
}

fn describe_side(out: &mut String, c: &FamilyCandidates<f64>) {
    for f in [&c.outer, &c.inner] {
        match f {
            Ok(f) if f.in_study_quadric => {
                out.push_str(&format!("{} in Study quadric ({})\n", f.label(), f.condition));
            }
            Ok(f) => out.push_str(&format!("{} usable ({})\n", f.label(), f.condition)),
            Err(e) => out.push_str(&format!("{e}\n")),
        }
    }
    match c.preferred() {
        Ok(f) => out.push_str(&format!("  {:?} side uses {}\n", c.side, f.label())),
        Err(e) => out.push_str(&format!("  {e}\n")),
    }
}

fn check_report(chain: &Chain) -> String {
    let mut s = format!("pattern {} ({})\n", chain.pattern(), chain.pattern().manipulator_name());
    describe_side(&mut s, &left_families(chain));
    // Membership in the quadric does not depend on the pose.
    let identity = Study::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).expect("identity");
    describe_side(&mut s, &right_families(chain, &identity));
    s
}

fn print_trace(chain: &Chain, pose: &Study, report: &SolutionReport) {
    let lc = left_families(chain);
    let rc = right_families(chain, pose);
    for c in [&lc, &rc] {
        if let Ok(f) = c.preferred() {
            eprintln!("{} ({:?} side, {:?} segment):", f.label(), f.side, f.segment);
            for (k, form) in f.forms.iter().enumerate() {
                eprintln!("  [{k}] {form}");
            }
        }
    }
    let m = &report.meta;
    eprintln!("dropped form {}; subset {:?}", m.dropped_form, m.subset);
    eprintln!("deg f = {:?}, deg g = {:?} (u, w)", m.f_degrees, m.g_degrees);
    eprintln!("resultant degree ≤ {}; common w-factor degree {}", m.resultant_degree, m.gcd_degree);
    eprintln!("real roots u: {:?}", m.u_roots);
    eprintln!("candidates {}, rejected {}", m.candidates, m.rejected);
    for n in &m.notes {
        eprintln!("  {n}");
    }
}
