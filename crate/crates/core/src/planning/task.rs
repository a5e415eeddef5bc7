use super::PlanningError;
use crate::grounding::GoalConfiguration;
use crate::world::{SceneState, Side};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Location id of the pickup pose beside a table.
pub fn pickup_location(table: &str) -> String {
    format!("{table}:pickup")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum TaskAction {
    Navigate { from: String, to: String },
    Load { object: String, location: String },
    Unload { object: String, location: String },
}

impl TaskAction {
    pub fn is_navigation(&self) -> bool {
        matches!(self, TaskAction::Navigate { .. })
    }
}

impl fmt::Display for TaskAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskAction::Navigate { from, to } => write!(f, "navigate {from} -> {to}"),
            TaskAction::Load { object, location } => write!(f, "load {object} at {location}"),
            TaskAction::Unload { object, location } => write!(f, "unload {object} at {location}"),
        }
    }
}

/// Alternating navigation and manipulation actions. Every object is fetched
/// from its start table, then carried to one side of the target table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPlan {
    pub order: Vec<String>,
    pub sides: Vec<Side>,
    pub actions: Vec<TaskAction>,
}

impl TaskPlan {
    /// Number of navigation/manipulation pairs.
    pub fn len(&self) -> usize {
        self.actions.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&TaskAction, &TaskAction)> {
        self.actions.chunks(2).map(|c| (&c[0], &c[1]))
    }

    pub fn build(scene: &SceneState, target: &str, order: &[String], sides: &[Side]) -> Result<Self, PlanningError> {
        let mut actions = Vec::new();
        let mut at = "start".to_string();
        for (obj, side) in order.iter().zip(sides) {
            let spec = scene.object(obj).ok_or_else(|| PlanningError::UnknownObject(obj.clone()))?;
            let pick = pickup_location(&spec.initial_location);
            actions.push(TaskAction::Navigate { from: at, to: pick.clone() });
            actions.push(TaskAction::Load { object: obj.clone(), location: pick.clone() });
            let drop = format!("{target}:{side}");
            actions.push(TaskAction::Navigate { from: pick, to: drop.clone() });
            actions.push(TaskAction::Unload { object: obj.clone(), location: drop.clone() });
            at = drop;
        }
        Ok(Self { order: order.to_vec(), sides: sides.to_vec(), actions })
    }
}

/// Replays `plan` symbolically from the scene's initial state and reports the
/// first violated precondition. `support` maps stacked objects to the object
/// they rest on.
pub fn simulate(plan: &TaskPlan, scene: &SceneState, support: &BTreeMap<String, String>) -> Result<(), String> {
    let mut robot = "start".to_string();
    let mut in_hand: Option<String> = None;
    let mut where_: BTreeMap<String, String> =
        scene.objects.iter().map(|o| (o.id.clone(), pickup_location(&o.initial_location))).collect();
    let mut placed: Vec<String> = Vec::new();
    for (i, a) in plan.actions.iter().enumerate() {
        if a.is_navigation() != (i % 2 == 0) {
            return Err(format!("action {i} breaks nav/manip alternation"));
        }
        match a {
            TaskAction::Navigate { from, to } => {
                if *from != robot {
                    return Err(format!("action {i}: robot is at {robot}, not {from}"));
                }
                robot = to.clone();
            }
            TaskAction::Load { object, location } => {
                if *location != robot || where_.get(object) != Some(location) {
                    return Err(format!("action {i}: {object} and robot not co-located at {location}"));
                }
                if in_hand.is_some() {
                    return Err(format!("action {i}: hand already full"));
                }
                where_.remove(object);
                in_hand = Some(object.clone());
            }
            TaskAction::Unload { object, location } => {
                if in_hand.as_ref() != Some(object) {
                    return Err(format!("action {i}: {object} not in hand"));
                }
                if *location != robot {
                    return Err(format!("action {i}: robot not at {location}"));
                }
                if let Some(s) = support.get(object) {
                    if !placed.contains(s) {
                        return Err(format!("action {i}: {object} placed before its support {s}"));
                    }
                }
                in_hand = None;
                where_.insert(object.clone(), location.clone());
                placed.push(object.clone());
            }
        }
    }
    Ok(())
}

/// Lexicographic permutations of `items` in which every object comes after
/// its support.
fn stacking_orders(items: &[String], support: &BTreeMap<String, String>, cap: usize) -> Vec<Vec<String>> {
    fn rec(
        rest: &mut Vec<String>,
        cur: &mut Vec<String>,
        support: &BTreeMap<String, String>,
        out: &mut Vec<Vec<String>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let o = rest[i].clone();
            if support.get(&o).is_some_and(|s| !cur.contains(s)) {
                continue;
            }
            rest.remove(i);
            cur.push(o.clone());
            rec(rest, cur, support, out, cap);
            cur.pop();
            rest.insert(i, o);
        }
    }
    let mut sorted = items.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    rec(&mut sorted, &mut Vec::new(), support, &mut out, cap);
    out
}

/// Stacking supports declared by a configuration.
pub fn supports(config: &GoalConfiguration) -> BTreeMap<String, String> {
    config
        .positions
        .keys()
        .filter_map(|id| config.support_of(id).map(|s| (id.clone(), s.to_string())))
        .collect()
}

/// Every stacking-consistent object order times every assignment of a side
/// to each unload, orders outermost and sides counting like an odometer with
/// the last object fastest. Truncated to `cap` plans.
pub fn enumerate_task_plans(
    config: &GoalConfiguration,
    scene: &SceneState,
    sides: &[Side],
    cap: usize,
) -> Result<Vec<TaskPlan>, PlanningError> {
    let objects: Vec<String> = config.positions.keys().cloned().collect();
    if objects.is_empty() || sides.is_empty() || cap == 0 {
        return Err(PlanningError::NoTaskPlan);
    }
    let support = supports(config);
    let mut plans = Vec::new();
    let n = objects.len();
    let combos = sides.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    for order in stacking_orders(&objects, &support, cap) {
        for code in 0..combos {
            if plans.len() >= cap {
                return Ok(plans);
            }
            let mut chosen = vec![sides[0]; n];
            let mut c = code;
            for slot in chosen.iter_mut().rev() {
                *slot = sides[c % sides.len()];
                c /= sides.len();
            }
            let plan = TaskPlan::build(scene, &config.table_id, &order, &chosen)?;
            debug_assert!(simulate(&plan, scene, &support).is_ok());
            plans.push(plan);
        }
    }
    if plans.is_empty() {
        return Err(PlanningError::NoTaskPlan);
    }
    Ok(plans)
}
