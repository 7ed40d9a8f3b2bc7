//! Tree-driven parallel execution.
//!
//! At an internal node the mid subtree is routed to completion first
//! (blocked), then the left and right subtrees are handed to the pool with
//! no ordering between them. Leaves route their connections one by one.
//! Blocked waits run on rayon scopes, whose waiting threads execute pending
//! tasks instead of sleeping, so nesting never exhausts the pool.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use rayon::{Scope, ThreadPool, ThreadPoolBuilder};
use serde::Serialize;

use super::{RouteError, Router};
use crate::rptt::RpttNode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvent {
    pub connection: u32,
    pub net: u32,
    pub thread: usize,
    /// Offsets from router construction.
    pub start: Duration,
    pub end: Duration,
}

/// `None` for a single thread: the tree is then walked in place.
pub(super) fn build_pool(threads: usize) -> Result<Option<ThreadPool>, RouteError> {
    if threads <= 1 {
        return Ok(None);
    }
    ThreadPoolBuilder::new()
        .num_threads(threads)
        .thread_name(|i| format!("route-{i}"))
        .build()
        .map(Some)
        .map_err(|e| RouteError::ThreadPool(e.to_string()))
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

impl Router<'_> {
    pub(super) fn run_tree(&self, tree: &RpttNode, pool: Option<&ThreadPool>) -> Result<(), RouteError> {
        let run = || match pool {
            Some(pool) => pool.install(|| self.blocked_route(tree)),
            None => self.sequential_route(tree),
        };
        catch_unwind(AssertUnwindSafe(run)).map_err(|p| RouteError::WorkerPanic(panic_message(p)))
    }

    fn route_task(&self, conn: u32) {
        if self.first_error.lock().is_some() {
            return;
        }
        let start = self.epoch.elapsed();
        let result = self.route_connection(conn);
        let end = self.epoch.elapsed();
        if self.config.trace {
            self.events.lock().push(TraceEvent {
                connection: conn,
                net: self.netlist.connection(conn).net_id,
                thread: rayon::current_thread_index().unwrap_or(0),
                start,
                end,
            });
        }
        if let Err(e) = result {
            self.first_error.lock().get_or_insert(e);
        }
    }

    fn route_leaf(&self, node: &RpttNode) {
        for &c in &node.connections {
            self.route_task(c);
        }
    }

    /// Routes the whole subtree and returns once every task it spawned is done.
    fn blocked_route(&self, node: &RpttNode) {
        rayon::scope(|s| self.parallel_route(node, s));
    }

    fn parallel_route<'s>(&'s self, node: &'s RpttNode, scope: &Scope<'s>) {
        if node.is_leaf() {
            self.route_leaf(node);
            return;
        }
        if let Some(mid) = &node.mid {
            self.blocked_route(mid);
        }
        for side in [&node.left, &node.right].into_iter().flatten() {
            scope.spawn(move |s| self.parallel_route(side, s));
        }
    }

    fn sequential_route(&self, node: &RpttNode) {
        if node.is_leaf() {
            self.route_leaf(node);
            return;
        }
        for child in [&node.mid, &node.left, &node.right].into_iter().flatten() {
            self.sequential_route(child);
        }
    }
}

/// Violations of the scheduling contract found in one iteration's events.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScheduleCheck {
    /// Internal nodes where a side connection started before a mid
    /// connection finished.
    pub order_violations: usize,
    /// Pairs of same-net connections whose routing overlapped in time.
    pub intra_net_overlaps: usize,
    /// Connections in the tree without exactly one event.
    pub missing_events: usize,
}

impl ScheduleCheck {
    pub fn is_clean(&self) -> bool {
        *self == Self::default()
    }
}

/// Checks `events` against the ordering contract of `tree`.
pub fn check_schedule(tree: &RpttNode, events: &[TraceEvent]) -> ScheduleCheck {
    let mut by_conn: HashMap<u32, TraceEvent> = HashMap::new();
    let mut check = ScheduleCheck::default();
    for e in events {
        if by_conn.insert(e.connection, *e).is_some() {
            check.missing_events += 1;
        }
    }

    // (earliest start, latest end) over a subtree.
    fn span(n: &RpttNode, by_conn: &HashMap<u32, TraceEvent>, check: &mut ScheduleCheck) -> Option<(Duration, Duration)> {
        if n.is_leaf() {
            let mut acc: Option<(Duration, Duration)> = None;
            for c in &n.connections {
                match by_conn.get(c) {
                    Some(e) => acc = Some(acc.map_or((e.start, e.end), |(s, t)| (s.min(e.start), t.max(e.end)))),
                    None => check.missing_events += 1,
                }
            }
            return acc;
        }
        let mid = n.mid.as_ref().and_then(|m| span(m, by_conn, check));
        let left = n.left.as_ref().and_then(|m| span(m, by_conn, check));
        let right = n.right.as_ref().and_then(|m| span(m, by_conn, check));
        let sides = [left, right].into_iter().flatten().reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
        if let (Some(m), Some(s)) = (mid, sides) {
            if m.1 > s.0 {
                check.order_violations += 1;
            }
        }
        [mid, sides].into_iter().flatten().reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
    span(tree, &by_conn, &mut check);

    let mut per_net: HashMap<u32, Vec<TraceEvent>> = HashMap::new();
    for e in by_conn.values() {
        per_net.entry(e.net).or_default().push(*e);
    }
    for evs in per_net.values_mut() {
        evs.sort_by_key(|e| e.start);
        check.intra_net_overlaps += evs.windows(2).filter(|w| w[0].end > w[1].start).count();
    }
    check
}
