//! Multi-source Dijkstra on a chart grid, with edge lengths measured in the chart metric.
//! Graph paths are realizable curves, so the result bounds true distances from above.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use nalgebra::DVector;

use super::chart::ChartMetric;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    /// Identify y0 with y1 (the last row is then omitted).
    pub periodic_y: bool,
}

impl Grid {
    fn dy(&self) -> f64 {
        if self.periodic_y {
            (self.y1 - self.y0) / self.ny as f64
        } else {
            (self.y1 - self.y0) / (self.ny - 1) as f64
        }
    }

    fn dx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        self.dx().max(self.dy())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x0 + i as f64 * self.dx(), self.y0 + j as f64 * self.dy()]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for i in 0..self.nx {
            for j in 0..self.ny {
                out.push(self.node(i, j));
            }
        }
        out
    }
}

#[derive(PartialEq, PartialOrd)]
struct Key(f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

const STENCIL: [(i64, i64); 16] = [
    (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1),
    (2, 1), (2, -1), (-2, 1), (-2, -1), (1, 2), (1, -2), (-1, 2), (-1, -2),
];

/// Shortest graph distances from the seeded nodes (index, initial distance).
pub fn grid_distances(grid: &Grid, metric: &dyn ChartMetric, seeds: &[(usize, f64)]) -> Vec<f64> {
    let n = grid.nx * grid.ny;
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &(i, d) in seeds {
        if d < dist[i] {
            dist[i] = d;
            heap.push(Reverse((Key(d), i)));
        }
    }
    let (dx, dy) = (grid.dx(), grid.dy());
    while let Some(Reverse((Key(d), idx))) = heap.pop() {
        if d > dist[idx] {
            continue;
        }
        let (i, j) = ((idx / grid.ny) as i64, (idx % grid.ny) as i64);
        for (di, dj) in STENCIL {
            let ni = i + di;
            let mut nj = j + dj;
            if ni < 0 || ni >= grid.nx as i64 {
                continue;
            }
            if grid.periodic_y {
                nj = nj.rem_euclid(grid.ny as i64);
            } else if nj < 0 || nj >= grid.ny as i64 {
                continue;
            }
            let p = grid.node(i as usize, j as usize);
            let mid = [p[0] + 0.5 * di as f64 * dx, p[1] + 0.5 * dj as f64 * dy];
            if !metric.contains(&mid) {
                continue;
            }
            let step = DVector::from_vec(vec![di as f64 * dx, dj as f64 * dy]);
            let g = metric.metric(&mid);
            let len = (step.transpose() * g * &step)[(0, 0)].sqrt();
            let nidx = grid.index(ni as usize, nj as usize);
            if d + len < dist[nidx] {
                dist[nidx] = d + len;
                heap.push(Reverse((Key(d + len), nidx)));
            }
        }
    }
    dist
}
