//! Exact max-flow over rational capacities (Edmonds–Karp).

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub(crate) struct FlowNetwork {
    cap: Vec<Vec<BigRational>>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            cap: vec![vec![BigRational::zero(); nodes]; nodes],
        }
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, capacity: BigRational) {
        self.cap[from][to] += capacity;
    }

    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> BigRational {
        let n = self.cap.len();
        let mut total = BigRational::zero();
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[source] = source;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for (v, cap) in self.cap[u].iter().enumerate() {
                    if prev[v] == usize::MAX && cap.is_positive() {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[sink] == usize::MAX {
                return total;
            }
            let mut bottleneck: Option<BigRational> = None;
            let mut v = sink;
            while v != source {
                let u = prev[v];
                let c = &self.cap[u][v];
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = sink;
            while v != source {
                let u = prev[v];
                self.cap[u][v] -= &b;
                self.cap[v][u] += &b;
                v = u;
            }
            total += b;
        }
    }
}
