// Border filtering and compression of cluster trajectories, batch and
// incremental.

use std::error::Error;

use persona_miner::trajectory::{compress, filter_border, unique_trajectories, FilterConfig, Runs, Trajectory};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ids = vec![0, 0, 0, 0, 8, 8, 8, 6, 8];
    let t = Trajectory {
        session_id: "a".into(),
        cluster_ids: ids.clone(),
    };
    for theta in [1, 2, 3, 5] {
        let cfg = FilterConfig { theta };
        let filtered = filter_border(&t, &cfg);
        println!("theta={theta}: filtered {:?} -> path {:?}", filtered.cluster_ids, compress(&filtered).path);
    }

    // the live service keeps run lengths and extends them step by step
    let mut runs = Runs::default();
    for &id in &ids {
        runs.push(id);
        println!("after {id}: path {:?}", runs.path(3));
    }

    let sessions = [("a", ids.clone()), ("b", vec![0, 0, 0, 8, 8, 8, 8]), ("c", vec![0, 0, 0, 5, 5, 5, 6, 6, 6])];
    let trajs: Vec<Trajectory> = sessions
        .iter()
        .map(|(id, c)| Trajectory {
            session_id: id.to_string(),
            cluster_ids: c.clone(),
        })
        .collect();
    for u in unique_trajectories(&trajs, &FilterConfig::default()) {
        println!("{:?} x{} {:?}", u.path, u.multiplicity, u.session_ids);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
