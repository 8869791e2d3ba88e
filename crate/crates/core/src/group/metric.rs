use std::collections::{BTreeSet, HashMap, HashSet};

use super::{GeneratorSet, GroupElement, GroupModel, Word};
use crate::error::{Error, Result};

/// Default limit on the number of elements a breadth-first search may visit.
pub const DEFAULT_BALL_BOUND: usize = 2_000_000;

/// The word metric of a generating set.
///
/// Uses a closed form for `Z^k` and the lamplighter group when every
/// generator is a standard generator, its inverse, or the identity;
/// otherwise distances come from bidirectional breadth-first search.
#[derive(Clone, Debug)]
pub struct WordMetric<'a> {
    gens: &'a GeneratorSet,
    closed_form: bool,
    ball_bound: usize,
}

impl<'a> WordMetric<'a> {
    pub fn new(gens: &'a GeneratorSet) -> Self {
        let model = gens.model();
        let closed_form = matches!(model, GroupModel::Abelian(_) | GroupModel::Lamplighter) && {
            let std = model.standard_generators();
            let id = model.identity();
            let values: HashSet<&GroupElement> =
                gens.generators().iter().map(|g| &g.value).collect();
            gens.generators()
                .iter()
                .all(|g| g.value == id || std.find_value(&g.value).is_some())
                && std.generators().iter().all(|g| values.contains(&g.value))
        };
        WordMetric { gens, closed_form, ball_bound: DEFAULT_BALL_BOUND }
    }

    pub fn with_ball_bound(mut self, bound: usize) -> Self {
        self.ball_bound = bound;
        self
    }

    pub fn generators(&self) -> &GeneratorSet {
        self.gens
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form
    }

    fn model(&self) -> GroupModel {
        self.gens.model()
    }

    /// Length of `g` in the closed-form metric.
    fn closed_norm(&self, g: &GroupElement) -> u64 {
        match g {
            GroupElement::Abelian(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
            GroupElement::Lamplighter { lamps, cursor } => lamplighter_norm(lamps, *cursor),
            _ => unreachable!("closed form only for abelian and lamplighter models"),
        }
    }

    /// `d(g, h)`.  With a cap, searches stop and report
    /// [`Error::DistanceExceedsCap`] once the distance is known to exceed it.
    pub fn distance(&self, g: &GroupElement, h: &GroupElement, cap: Option<u64>) -> Result<u64> {
        let model = self.model();
        model.check(g)?;
        model.check(h)?;
        if self.closed_form {
            let d = self.closed_norm(&model.multiply(&model.inverse(g), h));
            return match cap {
                Some(c) if d > c => Err(Error::DistanceExceedsCap { cap: c }),
                _ => Ok(d),
            };
        }
        self.bfs_distance(g, h, cap)
    }

    pub fn norm(&self, g: &GroupElement) -> Result<u64> {
        self.distance(&self.model().identity(), g, None)
    }

    fn bfs_distance(&self, g: &GroupElement, h: &GroupElement, cap: Option<u64>) -> Result<u64> {
        if g == h {
            return Ok(0);
        }
        let model = self.model();
        let mut seen = [HashMap::new(), HashMap::new()];
        let mut frontier = [vec![g.clone()], vec![h.clone()]];
        seen[0].insert(g.clone(), 0u64);
        seen[1].insert(h.clone(), 0u64);
        let mut radius = [0u64, 0u64];
        loop {
            if let Some(c) = cap {
                if radius[0] + radius[1] >= c {
                    return Err(Error::DistanceExceedsCap { cap: c });
                }
            }
            let side = usize::from(frontier[1].len() < frontier[0].len());
            if frontier[side].is_empty() {
                // Finite group component exhausted without meeting.
                return Err(Error::DistanceExceedsCap { cap: cap.unwrap_or(u64::MAX) });
            }
            let r = radius[side] + 1;
            let mut next = Vec::new();
            let mut best: Option<u64> = None;
            for x in &frontier[side] {
                for gen in self.gens.generators() {
                    let y = model.multiply(x, &gen.value);
                    if seen[side].contains_key(&y) {
                        continue;
                    }
                    if let Some(&d) = seen[1 - side].get(&y) {
                        best = Some(best.map_or(r + d, |b| b.min(r + d)));
                    }
                    seen[side].insert(y.clone(), r);
                    next.push(y);
                }
            }
            if let Some(d) = best {
                return match cap {
                    Some(c) if d > c => Err(Error::DistanceExceedsCap { cap: c }),
                    _ => Ok(d),
                };
            }
            if seen[0].len() + seen[1].len() > self.ball_bound {
                return Err(Error::BallBoundExceeded(self.ball_bound));
            }
            frontier[side] = next;
            radius[side] = r;
        }
    }

    /// A geodesic word from `g` to `h`: at each step the first generator, in
    /// set order, that decreases the distance to `h`.
    pub fn geodesic(&self, g: &GroupElement, h: &GroupElement, cap: Option<u64>) -> Result<Word> {
        let model = self.model();
        let d = self.distance(g, h, cap)?;
        if self.closed_form {
            let mut cur = g.clone();
            let mut out = Vec::with_capacity(d as usize);
            for left in (0..d).rev() {
                let (i, next) = self
                    .gens
                    .generators()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (i, model.multiply(&cur, &s.value)))
                    .find(|(_, y)| self.distance(y, h, None).ok() == Some(left))
                    .expect("some generator decreases the distance");
                out.push(i);
                cur = next;
            }
            return Ok(Word(out));
        }
        // Distances to `h` on the ball of radius d around it.
        let mut dist: HashMap<GroupElement, u64> = HashMap::from([(h.clone(), 0)]);
        let mut layer = vec![h.clone()];
        for r in 1..=d {
            let mut next = Vec::new();
            for x in &layer {
                for s in self.gens.generators() {
                    let y = model.multiply(x, &s.value);
                    if !dist.contains_key(&y) {
                        dist.insert(y.clone(), r);
                        next.push(y);
                    }
                }
            }
            if dist.len() > self.ball_bound {
                return Err(Error::BallBoundExceeded(self.ball_bound));
            }
            layer = next;
        }
        let mut cur = g.clone();
        let mut out = Vec::with_capacity(d as usize);
        for left in (0..d).rev() {
            let (i, next) = self
                .gens
                .generators()
                .iter()
                .enumerate()
                .map(|(i, s)| (i, model.multiply(&cur, &s.value)))
                .find(|(_, y)| dist.get(y) == Some(&left))
                .expect("some generator decreases the distance");
            out.push(i);
            cur = next;
        }
        Ok(Word(out))
    }

    /// Elements at distance at most `radius` from the identity, sorted.
    pub fn ball(&self, radius: u64) -> Result<Vec<GroupElement>> {
        let model = self.model();
        let mut seen: HashSet<GroupElement> = HashSet::from([model.identity()]);
        let mut layer = vec![model.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &layer {
                for s in self.gens.generators() {
                    let y = model.multiply(x, &s.value);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if seen.len() > self.ball_bound {
                return Err(Error::BallBoundExceeded(self.ball_bound));
            }
            layer = next;
        }
        let mut out: Vec<GroupElement> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }
}

/// Word length of `(lamps, cursor)` over `{t, t^-1, a}`: one move per lamp
/// plus the shortest cursor tour from 0 covering every lamp and ending at
/// the cursor.
pub fn lamplighter_norm(lamps: &BTreeSet<i64>, cursor: i64) -> u64 {
    let lo = lamps.first().copied().unwrap_or(0).min(0).min(cursor);
    let hi = lamps.last().copied().unwrap_or(0).max(0).max(cursor);
    let left_first = (0 - lo) + (hi - lo) + (hi - cursor);
    let right_first = hi + (hi - lo) + (cursor - lo);
    lamps.len() as u64 + left_first.min(right_first) as u64
}
