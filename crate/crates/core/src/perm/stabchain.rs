//! Base and strong generating set for a permutation group.
//!
//! Deterministic Schreier–Sims. Used for orders, membership and for
//! stabilisers of initial base segments (kernels of actions on parts are
//! read off by placing the part-points first in the base).

use super::Permutation;

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    /// `transversal[x]` maps `base` to `x`, for `x` in the basic orbit.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        let mut level = Level { base, gens: Vec::new(), transversal: vec![None; degree], orbit: Vec::new() };
        level.rebuild_orbit(degree);
        level
    }

    fn rebuild_orbit(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.base] = Some(Permutation::identity(degree));
        self.orbit = vec![self.base];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            let ux = self.transversal[x].clone().expect("orbit point has transversal");
            for s in &self.gens {
                let y = s.apply(x);
                if self.transversal[y].is_none() {
                    self.transversal[y] = Some(ux.then(s));
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Builds a chain whose base starts with `base_prefix`.
    pub fn new(degree: usize, generators: &[Permutation], base_prefix: &[usize]) -> Self {
        let mut chain = StabChain { degree, levels: Vec::new() };
        for &b in base_prefix {
            chain.levels.push(Level::new(degree, b));
        }
        let gens: Vec<Permutation> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in gens {
            if chain.sift(&g, 0).0.is_identity() {
                continue;
            }
            chain.add_strong_generator(g, 0);
            chain.schreier_sims();
        }
        chain
    }

    /// Sifts `g` from `level`, returning the residue and the level where it stopped.
    fn sift(&self, g: &Permutation, level: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (l, lev) in self.levels.iter().enumerate().skip(level) {
            let beta = h.apply(lev.base);
            match &lev.transversal[beta] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    /// Adds a non-identity `g` fixing the base points before `from` as a strong
    /// generator at levels `from..=j`, extending the base if needed.
    fn add_strong_generator(&mut self, g: Permutation, from: usize) {
        let fixes_all = self.levels.iter().skip(from).all(|lev| g.apply(lev.base) == lev.base);
        if fixes_all {
            let moved = (0..self.degree)
                .find(|&x| g.apply(x) != x && !self.levels.iter().any(|l| l.base == x))
                .expect("non-identity permutation moves a non-base point");
            self.levels.push(Level::new(self.degree, moved));
        }
        let mut l = from;
        loop {
            let lev = &mut self.levels[l];
            lev.gens.push(g.clone());
            lev.rebuild_orbit(self.degree);
            if g.apply(self.levels[l].base) != self.levels[l].base {
                break;
            }
            l += 1;
        }
    }

    fn schreier_sims(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let l = i - 1;
            let orbit = self.levels[l].orbit.clone();
            let gens = self.levels[l].gens.clone();
            for &beta in &orbit {
                let u_beta = self.levels[l].transversal[beta].clone().unwrap();
                for s in &gens {
                    let image = s.apply(beta);
                    let u_image = self.levels[l].transversal[image].as_ref().unwrap();
                    let schreier = u_beta.then(s).then(&u_image.inverse());
                    if schreier.is_identity() {
                        continue;
                    }
                    let (residue, stop) = self.sift(&schreier, l + 1);
                    if !residue.is_identity() {
                        self.add_strong_generator(residue, l + 1);
                        i = stop + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.degree() == self.degree && self.sift(p, 0).0.is_identity()
    }

    /// Generators of the pointwise stabiliser of the first `k` base points.
    pub fn stabiliser_generators(&self, k: usize) -> Vec<Permutation> {
        match self.levels.get(k) {
            Some(level) => level.gens.clone(),
            // Beyond the base the stabiliser is trivial.
            None => Vec::new(),
        }
    }

    /// Basic orbit at level `k`.
    pub fn basic_orbit(&self, k: usize) -> &[usize] {
        &self.levels[k].orbit
    }
}
