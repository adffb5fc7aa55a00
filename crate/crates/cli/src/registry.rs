//! Registered experiments with the statement each one checks.

pub struct Entry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub backends: &'static str,
    pub params: &'static str,
}

pub const EXPERIMENTS: &[Entry] = &[
    Entry {
        name: "green_residual",
        anchor: "Green formula",
        backends: "mock, interval",
        params: "pairs, u, v, tol",
    },
    Entry { name: "vishik", anchor: "Lemma 1", backends: "mock, interval", params: "y, tol" },
    Entry {
        name: "alpha_oracle",
        anchor: "D'Alembert oracle",
        backends: "interval",
        params: "t, dt, refinements, n_cells, tol",
    },
    Entry {
        name: "representation",
        anchor: "sine and cosine wave forms",
        backends: "mock, interval",
        params: "t_final, dt, tol",
    },
    Entry { name: "duality", anchor: "Lemma 3", backends: "mock, interval", params: "triples, t_min, t_max, dt, tol" },
    Entry {
        name: "fs_membership",
        anchor: "Theorem 1",
        backends: "interval",
        params: "sigma, tau, times, dt, n_cells, margin, refine, tol",
    },
    Entry {
        name: "wave_support",
        anchor: "support of boundary waves",
        backends: "interval",
        params: "times, dt, n_cells, margin, tol",
    },
    Entry {
        name: "local_controllability",
        anchor: "local controllability",
        backends: "interval",
        params: "tau, n_samples, dt, n_cells, tol",
    },
    Entry {
        name: "growth_profile",
        anchor: "Convention 1",
        backends: "mock, interval",
        params: "taus, n_samples, dt, omega_max, n_terms, ramp_width, rank_tol",
    },
    Entry { name: "splitting", anchor: "Lemma 6", backends: "mock", params: "t_final, n_intervals, tol" },
    Entry {
        name: "blagoveshchenskii",
        anchor: "Lemma 4",
        backends: "mock, interval",
        params: "t_max, n_intervals, stride, tol, order_ratio",
    },
    Entry {
        name: "completeness",
        anchor: "completeness lemma",
        backends: "interval",
        params: "tau, t, n_sources, dt, reg_width_steps, n_cells, n_basis, n_targets, doubling, tol, impulse_tol",
    },
    Entry { name: "interior_domain", anchor: "interior support lemma", backends: "interval", params: "tau, tol" },
];

pub fn find(name: &str) -> Option<&'static Entry> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.name).collect()
}

/// One line per experiment: `name (anchor)`, backends and parameters.
pub fn listing() -> String {
    let width = EXPERIMENTS.iter().map(|e| e.name.len() + e.anchor.len() + 3).max().unwrap_or(0);
    let mut out = String::new();
    for e in EXPERIMENTS {
        let head = format!("{} ({})", e.name, e.anchor);
        out.push_str(&format!("{head:<width$}  [{}]  {}\n", e.backends, e.params));
    }
    out
}
