//! Generates the seeded synthetic lesion loop that starts at the initial tip of
//! the bundled scenario.
//!
//! ```text
//! cargo run --example lesion_path -- [seed] [out.csv]
//! ```

use std::path::Path;

use rcm_admm::config::{write_trajectory, Experiment};
use rcm_admm::controller::SystemState;
use rcm_admm::instances::{seeded, synthetic_lesion_path};

fn main() -> rcm_admm::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(7);
    let out = args.next();

    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let exp = Experiment::load(&data.join("experiment.toml"))?;
    let start = SystemState::new(&exp.model, exp.initial)?.tip();
    let path = synthetic_lesion_path(&mut seeded(seed), &start, 36, 60.0);

    let (lo, hi) = path.iter().fold((start, start), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
    println!("seed {seed}: {} waypoints, bounding box {:.1} x {:.1} x {:.1} mm", path.len(), hi.x - lo.x, hi.y - lo.y, hi.z - lo.z);

    match out {
        Some(out) => {
            write_trajectory(Path::new(&out), &path, Some(seed))?;
            println!("wrote {out}");
        }
        None => {
            for p in &path {
                println!("{:.6},{:.6},{:.6}", p.x, p.y, p.z);
            }
        }
    }
    Ok(())
}
