//! Small task-set fixtures shared by unit and integration tests.

use crate::model::{DependencyEdge, JobId, JobSpec, NodeId, RawTaskSet, TaskId, TaskSet, TaskSpec};

/// The six-task, two-job example graph: job 0 = {5,4,3,2,0} with leaf 0 and
/// period 10, job 1 = {5,4,1} with leaf 1 and period 5. Five nodes; tasks 1
/// and 2 share a node.
pub fn fig1_taskset() -> TaskSet {
    let t = |id: u32, node: u32| TaskSpec {
        id: TaskId(id),
        node: NodeId(node),
        max_jitter: 1,
    };
    let e = |from: u32, to: u32, age: u32| DependencyEdge {
        from: TaskId(from),
        to: TaskId(to),
        max_age: age,
    };
    TaskSet::build(RawTaskSet {
        channels: 2,
        nodes: (0..5).map(NodeId).collect(),
        tasks: vec![t(0, 0), t(1, 1), t(2, 1), t(3, 2), t(4, 3), t(5, 4)],
        edges: vec![
            e(5, 0, 10),
            e(5, 3, 5),
            e(5, 4, 3),
            e(3, 0, 10),
            e(2, 0, 10),
            e(4, 1, 3),
        ],
        jobs: vec![
            JobSpec {
                id: JobId(0),
                period: 10,
                leaf: TaskId(0),
                members: vec![TaskId(0), TaskId(2), TaskId(3), TaskId(4), TaskId(5)],
            },
            JobSpec {
                id: JobId(1),
                period: 5,
                leaf: TaskId(1),
                members: vec![TaskId(1), TaskId(4), TaskId(5)],
            },
        ],
        hyperperiod: None,
    })
    .expect("fig1 fixture is valid")
}

/// A single chain job 0 -> 1 -> ... -> n-1 on distinct nodes.
///
/// All edges carry `max_age = age`, all tasks `max_jitter = jitter`, one job
/// with the given period (the hyperperiod).
pub fn chain_taskset(n: u32, period: u32, age: u32, jitter: u32) -> TaskSet {
    chain_taskset_channels(n, period, age, jitter, 1)
}

pub fn chain_taskset_channels(n: u32, period: u32, age: u32, jitter: u32, channels: u32) -> TaskSet {
    let tasks = (0..n)
        .map(|i| TaskSpec {
            id: TaskId(i),
            node: NodeId(i),
            max_jitter: jitter,
        })
        .collect();
    let edges = (0..n.saturating_sub(1))
        .map(|i| DependencyEdge {
            from: TaskId(i),
            to: TaskId(i + 1),
            max_age: age,
        })
        .collect();
    TaskSet::build(RawTaskSet {
        channels,
        nodes: (0..n).map(NodeId).collect(),
        tasks,
        edges,
        jobs: vec![JobSpec {
            id: JobId(0),
            period,
            leaf: TaskId(n - 1),
            members: (0..n).map(TaskId).collect(),
        }],
        hyperperiod: None,
    })
    .expect("chain fixture is valid")
}

/// Independent single-task jobs, one per entry of `specs` (period, jitter).
///
/// Tasks execute on distinct nodes unless `shared_node` is set.
pub fn independent_tasks(specs: &[(u32, u32)], channels: u32, shared_node: bool) -> TaskSet {
    let n = specs.len() as u32;
    let nodes: Vec<NodeId> = if shared_node {
        vec![NodeId(0)]
    } else {
        (0..n).map(NodeId).collect()
    };
    let tasks = specs
        .iter()
        .enumerate()
        .map(|(i, &(_, jitter))| TaskSpec {
            id: TaskId(i as u32),
            node: if shared_node { NodeId(0) } else { NodeId(i as u32) },
            max_jitter: jitter,
        })
        .collect();
    let jobs = specs
        .iter()
        .enumerate()
        .map(|(i, &(period, _))| JobSpec {
            id: JobId(i as u32),
            period,
            leaf: TaskId(i as u32),
            members: vec![TaskId(i as u32)],
        })
        .collect();
    TaskSet::build(RawTaskSet {
        channels,
        nodes,
        tasks,
        edges: vec![],
        jobs,
        hyperperiod: None,
    })
    .expect("independent fixture is valid")
}

/// One task, one job with the given period.
pub fn single_task(period: u32, jitter: u32, channels: u32) -> TaskSet {
    let raw = RawTaskSet {
        channels,
        nodes: vec![NodeId(0)],
        tasks: vec![TaskSpec {
            id: TaskId(0),
            node: NodeId(0),
            max_jitter: jitter,
        }],
        edges: vec![],
        jobs: vec![JobSpec {
            id: JobId(0),
            period,
            leaf: TaskId(0),
            members: vec![TaskId(0)],
        }],
        hyperperiod: None,
    };
    TaskSet::build(raw).expect("single-task fixture is valid")
}
