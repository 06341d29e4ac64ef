//! The `(2,3)` pebble game (Jacobs–Hendrickson) for planar generic rigidity.

use crate::graph::{Edge, Graph, Vertex};

/// Outcome of running the pebble game over the sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleResult {
    /// Edges accepted as independent, in the order they were tested.
    pub independent: Vec<Edge>,
    /// `2n - 3` for `n >= 2`.
    pub target: usize,
}

impl PebbleResult {
    /// Laman-rigid: the independent edges reach `2n - 3` (vacuous for a single vertex).
    pub fn rigid(&self) -> bool {
        self.independent.len() == self.target
    }
}

struct Game {
    pebbles: Vec<u8>,
    // out[v]: heads of directed edges leaving v
    out: Vec<Vec<Vertex>>,
}

impl Game {
    // Try to free one pebble at `root` without touching vertices in `blocked`, by reversing a
    // directed path from `root` to a vertex that still holds a pebble.
    fn find_pebble(&mut self, root: Vertex, blocked: [Vertex; 2]) -> bool {
        let n = self.pebbles.len();
        let mut parent: Vec<Option<Vertex>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        for b in blocked {
            seen[b] = true;
        }
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for i in 0..self.out[v].len() {
                let w = self.out[v][i];
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                parent[w] = Some(v);
                if self.pebbles[w] > 0 {
                    // reverse the path root -> ... -> w
                    self.pebbles[w] -= 1;
                    let mut cur = w;
                    while let Some(p) = parent[cur] {
                        let pos = self.out[p].iter().position(|&x| x == cur).expect("edge exists");
                        self.out[p].swap_remove(pos);
                        self.out[cur].push(p);
                        cur = p;
                    }
                    self.pebbles[root] += 1;
                    return true;
                }
                stack.push(w);
            }
        }
        false
    }

    fn gather(&mut self, u: Vertex, v: Vertex) -> bool {
        // need 4 pebbles on {u, v}: 2 on each
        while self.pebbles[u] < 2 {
            if !self.find_pebble(u, [v, u]) {
                return false;
            }
        }
        while self.pebbles[v] < 2 {
            if !self.find_pebble(v, [u, v]) {
                return false;
            }
        }
        true
    }
}

pub fn pebble_game(g: &Graph) -> PebbleResult {
    let n = g.n();
    let mut game = Game { pebbles: vec![2; n], out: vec![Vec::new(); n] };
    let mut independent = Vec::new();
    for e in g.edges() {
        let (u, v) = (e.u(), e.v());
        if game.gather(u, v) {
            game.pebbles[u] -= 1;
            game.out[u].push(v);
            independent.push(e);
        }
    }
    PebbleResult { independent, target: (2 * n).saturating_sub(3) }
}
