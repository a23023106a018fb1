//! Small graph utilities shared by liveness pruning, the heuristics, and the
//! lasso oracle. Everything is iterative; no recursion depth limits.

/// Strongly connected components of a digraph given as adjacency lists.
/// Returned in reverse topological order (Tarjan); every node appears in
/// exactly one component.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();
    // explicit DFS frame: (node, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Nodes reachable from `start` (including `start`).
pub fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut work = vec![start];
    seen[start] = true;
    while let Some(v) = work.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                work.push(w);
            }
        }
    }
    seen
}

/// Nodes from which some node in `targets` is reachable (backward closure).
pub fn can_reach(adj: &[Vec<usize>], targets: &[usize]) -> Vec<bool> {
    let n = adj.len();
    let mut radj = vec![Vec::new(); n];
    for (v, succs) in adj.iter().enumerate() {
        for &w in succs {
            radj[w].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut work: Vec<usize> = Vec::new();
    for &t in targets {
        if !seen[t] {
            seen[t] = true;
            work.push(t);
        }
    }
    while let Some(v) = work.pop() {
        for &w in &radj[v] {
            if !seen[w] {
                seen[w] = true;
                work.push(w);
            }
        }
    }
    seen
}

/// Nodes lying on some cycle: members of a nontrivial SCC or with a self-loop.
pub fn on_cycle(adj: &[Vec<usize>]) -> Vec<bool> {
    let mut result = vec![false; adj.len()];
    for component in sccs(adj) {
        if component.len() > 1 {
            for &v in &component {
                result[v] = true;
            }
        } else {
            let v = component[0];
            if adj[v].contains(&v) {
                result[v] = true;
            }
        }
    }
    result
}
