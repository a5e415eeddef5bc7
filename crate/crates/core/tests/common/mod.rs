#![allow(dead_code)]

use rand::Rng;
use tabletamp::logic::{Reference, RelationAtom, RelationKind, RelationSet};

/// Sign table written out independently of the library.
pub fn expected_signs(kind: RelationKind) -> (i8, i8) {
    match kind.to_string().as_str() {
        "left_of" => (-1, 0),
        "right_of" => (1, 0),
        "above" => (0, 1),
        "below" => (0, -1),
        "above_left" => (-1, 1),
        "above_right" => (1, 1),
        "below_left" => (-1, -1),
        "below_right" => (1, -1),
        "on_top_of" | "centered_on_table" => (0, 0),
        other => panic!("unexpected kind {other}"),
    }
}

fn sign_ok(want: i8, d: i64) -> bool {
    match want {
        -1 => d < 0,
        0 => d == 0,
        _ => d > 0,
    }
}

fn axis_satisfiable(n: usize, cons: &[(usize, usize, i8)], k: usize) -> bool {
    let total = k.pow(n as u32);
    let mut v = vec![0i64; n];
    for code in 0..total {
        let mut c = code;
        for slot in v.iter_mut() {
            *slot = (c % k) as i64;
            c /= k;
        }
        if cons.iter().all(|&(a, b, s)| sign_ok(s, v[a] - v[b])) {
            return true;
        }
    }
    false
}

/// Exhaustive search over a `k x k` qualitative grid and two stacking layers.
/// The table center is one extra grid entity. Axes and layers share no
/// constraint, so each is enumerated on its own.
pub fn brute_force_consistent(rels: &RelationSet, objects: &[String], k: usize) -> bool {
    let n = objects.len();
    let idx = |id: &str| objects.iter().position(|o| o == id).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut stacks = Vec::new();
    for a in rels {
        let s = idx(&a.subject);
        let r = match &a.reference {
            Reference::Object(id) => idx(id),
            Reference::Table => n,
        };
        let (sx, sy) = expected_signs(a.kind);
        xs.push((s, r, sx));
        ys.push((s, r, sy));
        if a.kind == RelationKind::OnTopOf {
            stacks.push((s, r));
        }
    }
    let layers_ok = (0..(1u32 << n)).any(|bits| {
        stacks.iter().all(|&(s, r)| ((bits >> s) & 1) > ((bits >> r) & 1))
    });
    layers_ok && axis_satisfiable(n + 1, &xs, k) && axis_satisfiable(n + 1, &ys, k)
}

pub fn object_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("o{i}")).collect()
}

/// Random duplicate-free relation set over `objects`.
pub fn random_relation_set(rng: &mut impl Rng, objects: &[String], max_atoms: usize) -> RelationSet {
    let mut set = RelationSet::new();
    let count = rng.gen_range(0..=max_atoms);
    for _ in 0..count {
        let kind = RelationKind::ALL[rng.gen_range(0..RelationKind::ALL.len())];
        let s = rng.gen_range(0..objects.len());
        let atom = if kind.is_unary() {
            RelationAtom::centered(&objects[s])
        } else {
            if objects.len() < 2 {
                continue;
            }
            let mut r = rng.gen_range(0..objects.len() - 1);
            if r >= s {
                r += 1;
            }
            RelationAtom::new(&objects[s], kind, &objects[r])
        };
        let _ = set.push(atom);
    }
    set
}

pub fn fixtures_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_mock() -> tabletamp::llm::ScriptedMock {
    tabletamp::llm::ScriptedMock::from_dir(&fixtures_dir().join("llm")).unwrap()
}

/// Symbolic goal and distances for a benchmark task from the shipped scripts.
pub fn task_goal(task: u32) -> (tabletamp::llm::SymbolicGoal, Vec<tabletamp::llm::DistanceSuggestion>) {
    use tabletamp::llm::*;
    let spec = tabletamp::tasks::task_by_id(task).unwrap();
    let mock = fixture_mock();
    let params = GoalGenParams::default();
    let goal = generate_symbolic_goal(&spec.objects, &mock, &params).unwrap();
    let d = generate_distances(&goal, &mock, &params).unwrap();
    (goal, d)
}

pub fn desk_table() -> tabletamp::world::Obstacle {
    tabletamp::world::Obstacle::new("center", tabletamp::world::ObstacleKind::Table, 0.0, 0.0, 0.4, 0.2)
}

pub fn catalog_objects(ids: &[String]) -> Vec<tabletamp::world::ObjectSpec> {
    ids.iter().map(|id| tabletamp::tasks::object_spec(id, "left", [0.0, 0.0]).unwrap()).collect()
}

/// Random `w x h` occupancy grid at unit resolution with roughly `density`
/// of its cells blocked.
pub fn random_grid(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> tabletamp::world::OccupancyGrid {
    tabletamp::world::OccupancyGrid {
        resolution: 1.0,
        origin: tabletamp::geometry::Pose2D::new(0.0, 0.0, 0.0),
        width: w,
        height: h,
        cells: (0..w * h).map(|_| rng.gen_bool(density)).collect(),
    }
}

/// Plain Dijkstra over 8-connected moves that may not cut a blocked
/// corner. Returns path length in cells, `None` when unreachable.
pub fn dijkstra_oracle(g: &tabletamp::world::OccupancyGrid, start: (usize, usize), goal: (usize, usize)) -> Option<f64> {
    let (w, h) = (g.width as i64, g.height as i64);
    let blocked = |x: i64, y: i64| x < 0 || y < 0 || x >= w || y >= h || g.cells[(y * w + x) as usize];
    if blocked(start.0 as i64, start.1 as i64) || blocked(goal.0 as i64, goal.1 as i64) {
        return None;
    }
    let n = (w * h) as usize;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[start.1 * g.width + start.0] = 0.0;
    loop {
        let mut best = None;
        for i in 0..n {
            if !done[i] && dist[i].is_finite() && best.map_or(true, |b: usize| dist[i] < dist[b]) {
                best = Some(i);
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        let (ux, uy) = ((u % g.width) as i64, (u / g.width) as i64);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if (dx, dy) == (0, 0) || blocked(ux + dx, uy + dy) {
                    continue;
                }
                if dx != 0 && dy != 0 && (blocked(ux + dx, uy) || blocked(ux, uy + dy)) {
                    continue;
                }
                let v = ((uy + dy) * w + ux + dx) as usize;
                let step = if dx != 0 && dy != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
                if dist[u] + step < dist[v] {
                    dist[v] = dist[u] + step;
                }
            }
        }
    }
    let d = dist[goal.1 * g.width + goal.0];
    d.is_finite().then_some(d)
}
