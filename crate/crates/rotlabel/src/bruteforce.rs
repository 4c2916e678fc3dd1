//! Reference computations for the acceptance suite, kept deliberately
//! independent of the closed-form geometry and the branch-and-bound solver:
//! conflicts are re-decided by direct rectangle tests at sampled angles, and
//! optima are re-derived by exhaustive search over regular labelings.

use rotlabel_core::angular::TAU;
use rotlabel_core::geometry::ConflictStructure;
use rotlabel_core::model::{AnchoredLabel, ConflictMode, ModelConfig, RangeModel};

/// Screen-frame displacement of `b`'s anchor from `a`'s when the map is
/// rotated clockwise by `alpha` while labels stay horizontal.
fn rotated_displacement(a: &AnchoredLabel, b: &AnchoredLabel, alpha: f64) -> (f64, f64) {
    let ux = b.anchor.x - a.anchor.x;
    let uy = b.anchor.y - a.anchor.y;
    let (s, c) = alpha.sin_cos();
    (ux * c + uy * s, uy * c - ux * s)
}

fn open_overlap(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> bool {
    a_lo < b_hi && b_lo < a_hi
}

/// Open-interior overlap of the two label rectangles at rotation `alpha`,
/// decided directly on the axis-aligned screen rectangles.
pub fn probe_soft_overlap(a: &AnchoredLabel, b: &AnchoredLabel, alpha: f64) -> bool {
    let (dx, dy) = rotated_displacement(a, b, alpha);
    let (oax, oay) = a.corner.offset(a.width, a.height);
    let (obx, oby) = b.corner.offset(b.width, b.height);
    open_overlap(oax, oax + a.width, dx + obx, dx + obx + b.width)
        && open_overlap(oay, oay + a.height, dy + oby, dy + oby + b.height)
}

/// Whether `a`'s rectangle strictly contains `b`'s anchor at rotation
/// `alpha`.
pub fn probe_hard_cover(a: &AnchoredLabel, b: &AnchoredLabel, alpha: f64) -> bool {
    let (dx, dy) = rotated_displacement(a, b, alpha);
    let (oax, oay) = a.corner.offset(a.width, a.height);
    oax < dx && dx < oax + a.width && oay < dy && dy < oay + a.height
}

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Boundary angles of a predicate over the circle: probe a uniform grid,
/// bisect every sign change down to `tol`. Boundaries thinner than the grid
/// step are invisible, which is the usual sampling caveat.
pub fn boundary_angles(pred: impl Fn(f64) -> bool, probes: usize, tol: f64) -> Vec<f64> {
    let step = TAU / probes as f64;
    let vals: Vec<bool> = (0..probes).map(|k| pred(k as f64 * step)).collect();
    let mut out = Vec::new();
    for k in 0..probes {
        let a = vals[k];
        if a == vals[(k + 1) % probes] {
            continue;
        }
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if pred(mid) == a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push((0.5 * (lo + hi)).rem_euclid(TAU));
    }
    out
}

fn circular_runs(mask: u64, m: usize) -> usize {
    if mask == 0 {
        return 0;
    }
    let full = full_mask(m);
    if mask == full {
        return 1;
    }
    let mut runs = 0;
    for j in 0..m {
        let prev = (j + m - 1) % m;
        if mask >> j & 1 == 1 && mask >> prev & 1 == 0 {
            runs += 1;
        }
    }
    runs
}

fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Exhaustive optimum over regular labelings: activity is decided per atomic
/// interval of the conflict structure's event grid, every per-label atom
/// subset honoring the range budget is enumerated, and labels are combined
/// depth-first under the pairwise conflict constraints. Exponential; meant
/// for instances with a handful of labels and events.
pub fn exhaustive_best_activity(conflicts: &ConflictStructure, cfg: ModelConfig) -> f64 {
    let events = conflicts.events();
    let m = events.len() - 1;
    assert!(m <= 63, "too many atomic intervals for the exhaustive oracle");
    let mids: Vec<f64> = (0..m).map(|j| 0.5 * (events[j] + events[j + 1])).collect();
    let lens: Vec<f64> = (0..m).map(|j| events[j + 1] - events[j]).collect();
    let ids = conflicts.labels();
    let n = ids.len();

    let atoms_in = |set: &rotlabel_core::angular::AngularSet| -> u64 {
        mids.iter()
            .enumerate()
            .filter(|&(_, &mid)| set.contains(mid))
            .fold(0u64, |acc, (j, _)| acc | 1 << j)
    };

    let allowed_of: Vec<u64> = ids
        .iter()
        .map(|&id| match cfg.conflicts {
            ConflictMode::Soft => full_mask(m),
            ConflictMode::Hard => full_mask(m) & !atoms_in(&conflicts.hard_cover_set(id)),
        })
        .collect();

    // Without a range budget the atoms decouple: each atomic interval
    // independently takes a maximum independent set of the labels allowed
    // there, so no cross-atom search is needed.
    if matches!(cfg.ranges, RangeModel::Unlimited) {
        assert!(n <= 16, "too many labels for the exhaustive oracle");
        let mut edges: Vec<(u32, u32, u64)> = Vec::new();
        for p in conflicts.pairs() {
            let a = ids.binary_search(&p.i).unwrap();
            let b = ids.binary_search(&p.j).unwrap();
            let mask = atoms_in(&p.soft);
            if mask != 0 {
                edges.push((1 << a, 1 << b, mask));
            }
        }
        let mut total = 0.0;
        for j in 0..m {
            let avail: u32 = (0..n)
                .filter(|&i| allowed_of[i] >> j & 1 == 1)
                .fold(0, |acc, i| acc | 1 << i);
            let live: Vec<(u32, u32)> = edges
                .iter()
                .filter(|&&(_, _, em)| em >> j & 1 == 1)
                .map(|&(a, b, _)| (a, b))
                .collect();
            let mut best = 0;
            for sub in 0..=avail {
                if sub & !avail != 0 {
                    continue;
                }
                if live.iter().any(|&(a, b)| sub & a != 0 && sub & b != 0) {
                    continue;
                }
                best = best.max(sub.count_ones());
            }
            total += lens[j] * best as f64;
        }
        return total;
    }

    // Per label: candidate (mask, activity) lists, best first.
    let mut cands: Vec<Vec<(u64, f64)>> = Vec::with_capacity(n);
    for &allowed in &allowed_of {
        let activity = |mask: u64| -> f64 {
            (0..m).filter(|&j| mask >> j & 1 == 1).map(|j| lens[j]).sum()
        };
        let mut list: Vec<(u64, f64)> = Vec::new();
        match cfg.ranges {
            RangeModel::ZeroOne => {
                if allowed == full_mask(m) {
                    list.push((allowed, TAU));
                }
                list.push((0, 0.0));
            }
            RangeModel::Limited(k) => {
                let mut sub = allowed;
                loop {
                    if circular_runs(sub, m) <= k as usize {
                        list.push((sub, activity(sub)));
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & allowed;
                }
            }
            RangeModel::Unlimited => unreachable!(),
        }
        list.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        cands.push(list);
    }

    // Pairwise conflicting atoms, indexed against earlier labels only.
    let mut conf: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for p in conflicts.pairs() {
        let a = ids.binary_search(&p.i).unwrap();
        let b = ids.binary_search(&p.j).unwrap();
        let mask = atoms_in(&p.soft);
        if mask != 0 {
            conf[a.max(b)].push((a.min(b), mask));
        }
    }

    let mut suffix_max = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix_max[i] = suffix_max[i + 1] + cands[i].first().map_or(0.0, |c| c.1);
    }

    struct Dfs<'a> {
        cands: &'a [Vec<(u64, f64)>],
        conf: &'a [Vec<(usize, u64)>],
        suffix_max: &'a [f64],
        chosen: Vec<u64>,
        best: f64,
    }
    impl Dfs<'_> {
        fn run(&mut self, i: usize, acc: f64) {
            if i == self.cands.len() {
                self.best = self.best.max(acc);
                return;
            }
            for &(mask, act) in &self.cands[i] {
                if acc + act + self.suffix_max[i + 1] <= self.best {
                    break;
                }
                if self
                    .conf[i]
                    .iter()
                    .all(|&(j, cm)| mask & self.chosen[j] & cm == 0)
                {
                    self.chosen[i] = mask;
                    self.run(i + 1, acc + act);
                }
            }
            self.chosen[i] = 0;
        }
    }
    let mut dfs = Dfs {
        cands: &cands,
        conf: &conf,
        suffix_max: &suffix_max,
        chosen: vec![0; n],
        best: 0.0,
    };
    dfs.run(0, 0.0);
    dfs.best
}
