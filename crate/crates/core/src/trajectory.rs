//! Per-step cluster trajectories, border filtering and compression.
//!
//! Short visits to a cluster (fewer than `theta` consecutive steps) are
//! treated as border noise and removed before consecutive duplicates are
//! collapsed into a path.

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, StyleModel};
use crate::trace::DesignSession;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub session_id: String,
    pub cluster_ids: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Minimum run length that survives filtering.
    pub theta: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { theta: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedTrajectory {
    pub session_id: String,
    pub path: Vec<usize>,
}

/// Cluster id of every step under `model`.
pub fn assign_clusters(session: &DesignSession, model: &StyleModel) -> Result<Trajectory, ModelError> {
    Ok(Trajectory {
        session_id: session.session_id().to_string(),
        cluster_ids: model.classify_session(session)?,
    })
}

/// Run-length form of a trajectory, extendable one step at a time.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Runs {
    runs: Vec<(usize, usize)>,
}

impl Runs {
    pub fn from_ids(ids: &[usize]) -> Self {
        let mut r = Self::default();
        ids.iter().for_each(|&id| r.push(id));
        r
    }

    pub fn push(&mut self, id: usize) {
        match self.runs.last_mut() {
            Some((last, len)) if *last == id => *len += 1,
            _ => self.runs.push((id, 1)),
        }
    }

    pub fn runs(&self) -> &[(usize, usize)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Runs that survive `theta`; the longest (earliest on ties) run when
    /// none does.
    fn surviving(&self, theta: usize) -> Vec<(usize, usize)> {
        let kept: Vec<_> = self.runs.iter().copied().filter(|&(_, len)| len >= theta).collect();
        if !kept.is_empty() || self.runs.is_empty() {
            return kept;
        }
        let longest = self
            .runs
            .iter()
            .copied()
            .reduce(|best, r| if r.1 > best.1 { r } else { best })
            .expect("non-empty");
        vec![longest]
    }

    pub fn filtered(&self, theta: usize) -> Vec<usize> {
        self.surviving(theta)
            .into_iter()
            .flat_map(|(id, len)| std::iter::repeat_n(id, len))
            .collect()
    }

    pub fn path(&self, theta: usize) -> Vec<usize> {
        let mut path: Vec<usize> = Vec::new();
        for (id, _) in self.surviving(theta) {
            if path.last() != Some(&id) {
                path.push(id);
            }
        }
        path
    }
}

pub fn filter_border(traj: &Trajectory, config: &FilterConfig) -> Trajectory {
    Trajectory {
        session_id: traj.session_id.clone(),
        cluster_ids: Runs::from_ids(&traj.cluster_ids).filtered(config.theta),
    }
}

pub fn compress(traj: &Trajectory) -> CompressedTrajectory {
    let mut path = traj.cluster_ids.clone();
    path.dedup();
    CompressedTrajectory {
        session_id: traj.session_id.clone(),
        path,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquePath {
    pub path: Vec<usize>,
    pub multiplicity: usize,
    pub session_ids: Vec<String>,
}

/// Filters and compresses every trajectory, then merges identical paths.
/// Output is in order of first appearance.
pub fn unique_trajectories(trajectories: &[Trajectory], config: &FilterConfig) -> Vec<UniquePath> {
    let mut out: Vec<UniquePath> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for t in trajectories {
        let c = compress(&filter_border(t, config));
        match index.get(&c.path) {
            Some(&i) => {
                let u: &mut UniquePath = &mut out[i];
                u.multiplicity += 1;
                u.session_ids.push(c.session_id);
            }
            None => {
                index.insert(c.path.clone(), out.len());
                out.push(UniquePath {
                    path: c.path,
                    multiplicity: 1,
                    session_ids: vec![c.session_id],
                });
            }
        }
    }
    out
}

/// One JSON-lines export record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub session_id: String,
    pub raw: Vec<usize>,
    pub filtered: Vec<usize>,
    pub path: Vec<usize>,
}

impl TrajectoryRecord {
    pub fn new(traj: &Trajectory, config: &FilterConfig) -> Self {
        let filtered = filter_border(traj, config);
        let path = compress(&filtered).path;
        Self {
            session_id: traj.session_id.clone(),
            raw: traj.cluster_ids.clone(),
            filtered: filtered.cluster_ids,
            path,
        }
    }

    pub fn trajectory(&self) -> Trajectory {
        Trajectory {
            session_id: self.session_id.clone(),
            cluster_ids: self.raw.clone(),
        }
    }
}

pub fn write_jsonl<W: std::io::Write>(records: &[TrajectoryRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(text: &str) -> Result<Vec<TrajectoryRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(ids: &[usize]) -> Trajectory {
        Trajectory {
            session_id: "s".into(),
            cluster_ids: ids.to_vec(),
        }
    }

    const THETA3: FilterConfig = FilterConfig { theta: 3 };

    #[test]
    fn lone_border_visits_are_dropped() {
        let f = filter_border(&t(&[0, 0, 0, 0, 8, 8, 8, 6, 8]), &THETA3);
        assert_eq!(f.cluster_ids, vec![0, 0, 0, 0, 8, 8, 8]);
        assert_eq!(compress(&f).path, vec![0, 8]);
    }

    #[test]
    fn all_short_runs_keep_the_earliest_longest() {
        assert_eq!(filter_border(&t(&[1, 2, 3]), &THETA3).cluster_ids, vec![1]);
        assert_eq!(filter_border(&t(&[1, 2, 2, 3, 3]), &THETA3).cluster_ids, vec![2, 2]);
    }

    #[test]
    fn dropping_a_run_can_join_equal_neighbours() {
        let f = filter_border(&t(&[4, 4, 4, 9, 4, 4, 4]), &THETA3);
        assert_eq!(f.cluster_ids, vec![4; 6]);
        assert_eq!(compress(&f).path, vec![4]);
    }

    #[test]
    fn compress_cases() {
        assert_eq!(compress(&t(&[5, 5, 5])).path, vec![5]);
        assert_eq!(compress(&t(&[1, 2, 1, 2])).path, vec![1, 2, 1, 2]);
    }

    #[test]
    fn planted_path_survives_border_noise() {
        let mut ids = Vec::new();
        for (id, noise) in [(0, Some(5)), (8, Some(2)), (3, None), (7, Some(11))] {
            ids.extend([id; 6]);
            if let Some(n) = noise {
                ids.extend([n; 2]);
            }
        }
        assert_eq!(compress(&filter_border(&t(&ids), &THETA3)).path, vec![0, 8, 3, 7]);
    }

    #[test]
    fn unique_paths_count_multiplicity() {
        let mut a = t(&[1, 1, 1, 2, 2, 2]);
        let mut b = t(&[1, 1, 1, 1, 7, 2, 2, 2]);
        let c = t(&[3, 3, 3]);
        a.session_id = "a".into();
        b.session_id = "b".into();
        let u = unique_trajectories(&[a, b, c], &THETA3);
        assert_eq!(u.len(), 2);
        assert_eq!(u[0].path, vec![1, 2]);
        assert_eq!(u[0].multiplicity, 2);
        assert_eq!(u[0].session_ids, vec!["a", "b"]);
        assert!(unique_trajectories(&[], &THETA3).is_empty());
    }

    #[test]
    fn jsonl_round_trip() {
        let recs = vec![TrajectoryRecord::new(&t(&[0, 0, 0, 0, 8, 8, 8, 6, 8]), &THETA3)];
        let mut buf = Vec::new();
        write_jsonl(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"session_id\":\"s\",\"raw\":[0,0,0,0,8,8,8,6,8],\"filtered\":[0,0,0,0,8,8,8],\"path\":[0,8]}\n"
        );
        assert_eq!(read_jsonl(&text).unwrap(), recs);
    }

    fn arb_ids() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..5, 1..60)
    }

    proptest! {
        #[test]
        fn compress_is_idempotent(ids in arb_ids()) {
            let once = compress(&t(&ids));
            let twice = compress(&t(&once.path));
            prop_assert_eq!(once.path, twice.path);
        }

        #[test]
        fn filter_properties(ids in arb_ids(), theta in 1usize..6) {
            let f = filter_border(&t(&ids), &FilterConfig { theta });
            prop_assert!(f.cluster_ids.iter().all(|id| ids.contains(id)));
            prop_assert!(!f.cluster_ids.is_empty() && f.cluster_ids.len() <= ids.len());
            let p = compress(&f).path;
            prop_assert!(!p.is_empty() && p.len() <= ids.len());
            prop_assert!(p.windows(2).all(|w| w[0] != w[1]));
        }

        #[test]
        fn theta_one_is_identity(ids in arb_ids()) {
            prop_assert_eq!(filter_border(&t(&ids), &FilterConfig { theta: 1 }).cluster_ids, ids);
        }

        #[test]
        fn incremental_runs_match_batch(ids in arb_ids(), theta in 1usize..6) {
            let mut runs = Runs::default();
            for (i, &id) in ids.iter().enumerate() {
                runs.push(id);
                let prefix = t(&ids[..=i]);
                let f = filter_border(&prefix, &FilterConfig { theta });
                prop_assert_eq!(runs.path(theta), compress(&f).path);
            }
        }
    }
}
