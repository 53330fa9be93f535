//! Shared fixed grid of model instances used by the acceptance suite:
//! expectation models, infinitesimal-weight models, and ranked models over
//! small state spaces and two- or three-value consequence scales.

use gqp::hyperreal::rat;
use gqp::{
    expectation_structure, hyperreal_structure, ranked_structure, BigRational,
    ConditionalPreferenceStructure, ConsequenceScale, Hyperreal, ProbabilityModel, RankedModel,
    StateSpace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Expectation,
    Hyperreal { infinitesimal: bool },
    Ranked,
}

pub struct GridEntry {
    pub label: String,
    pub kind: GridKind,
    pub structure: ConditionalPreferenceStructure,
}

const STATE_NAMES: [&str; 4] = ["a", "b", "c", "d"];

pub fn space(n: usize) -> StateSpace {
    StateSpace::new(STATE_NAMES[..n].iter().copied()).unwrap()
}

pub fn two_values() -> ConsequenceScale {
    ConsequenceScale::with_values(["z", "o"], vec![rat(0, 1), rat(1, 1)]).unwrap()
}

pub fn three_values() -> ConsequenceScale {
    ConsequenceScale::with_values(["z", "h", "o"], vec![rat(0, 1), rat(1, 2), rat(1, 1)]).unwrap()
}

/// Two distinct consequence names sharing one value.
pub fn tied_values() -> ConsequenceScale {
    ConsequenceScale::with_values(["z", "o1", "o2"], vec![rat(0, 1), rat(1, 1), rat(1, 1)])
        .unwrap()
}

/// The fixed rational weight vectors of the expectation grid, per state
/// count.
pub fn expectation_weights() -> Vec<Vec<BigRational>> {
    vec![
        vec![rat(1, 1)],
        vec![rat(1, 2), rat(1, 2)],
        vec![rat(2, 3), rat(1, 3)],
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        vec![rat(1, 2), rat(1, 3), rat(1, 6)],
        vec![rat(4, 7), rat(2, 7), rat(1, 7)],
        vec![rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)],
        vec![rat(8, 15), rat(4, 15), rat(2, 15), rat(1, 15)],
        vec![rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)],
    ]
}

fn scales_for(_n: usize) -> Vec<(&'static str, ConsequenceScale)> {
    vec![("F2", two_values()), ("F3", three_values())]
}

pub fn expectation_grid() -> Vec<GridEntry> {
    let mut out = Vec::new();
    for weights in expectation_weights() {
        let n = weights.len();
        for (tag, scale) in scales_for(n) {
            let m = ProbabilityModel::standard(space(n), weights.clone()).unwrap();
            out.push(GridEntry {
                label: format!("expectation n={n} {tag} {}", weight_label(&weights)),
                kind: GridKind::Expectation,
                structure: expectation_structure(&m, &scale).unwrap(),
            });
        }
    }
    // One entry with two consequences tied at the same value.
    let m = ProbabilityModel::standard(space(2), vec![rat(1, 2), rat(1, 2)]).unwrap();
    out.push(GridEntry {
        label: "expectation n=2 tied-values".into(),
        kind: GridKind::Expectation,
        structure: expectation_structure(&m, &tied_values()).unwrap(),
    });
    out
}

fn weight_label(weights: &[BigRational]) -> String {
    let parts: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Builds a hyperreal weight from sparse (power, numer, denom) coefficients.
pub fn eps(coeffs: &[(usize, i64, i64)], degree: usize) -> Hyperreal {
    let mut cs = vec![rat(0, 1); degree + 1];
    for &(k, n, d) in coeffs {
        cs[k] = rat(n, d);
    }
    Hyperreal::new(cs)
}

/// The infinitesimal-weight vectors of the grid, per state count.
pub fn hyperreal_weight_sets() -> Vec<(String, Vec<Hyperreal>)> {
    vec![
        (
            "n=2 (1-eps, eps)".into(),
            vec![eps(&[(0, 1, 1), (1, -1, 1)], 4), eps(&[(1, 1, 1)], 4)],
        ),
        (
            "n=3 (1-eps-eps^2, eps, eps^2)".into(),
            vec![
                eps(&[(0, 1, 1), (1, -1, 1), (2, -1, 1)], 6),
                eps(&[(1, 1, 1)], 6),
                eps(&[(2, 1, 1)], 6),
            ],
        ),
        (
            "n=3 (1/2, 1/2-eps, eps)".into(),
            vec![
                eps(&[(0, 1, 2)], 6),
                eps(&[(0, 1, 2), (1, -1, 1)], 6),
                eps(&[(1, 1, 1)], 6),
            ],
        ),
        (
            "n=3 (1-eps, eps-eps^2, eps^2)".into(),
            vec![
                eps(&[(0, 1, 1), (1, -1, 1)], 6),
                eps(&[(1, 1, 1), (2, -1, 1)], 6),
                eps(&[(2, 1, 1)], 6),
            ],
        ),
        (
            "n=4 (1-eps-eps^2-eps^3, eps, eps^2, eps^3)".into(),
            vec![
                eps(&[(0, 1, 1), (1, -1, 1), (2, -1, 1), (3, -1, 1)], 8),
                eps(&[(1, 1, 1)], 8),
                eps(&[(2, 1, 1)], 8),
                eps(&[(3, 1, 1)], 8),
            ],
        ),
    ]
}

pub fn hyperreal_grid() -> Vec<GridEntry> {
    let mut out = Vec::new();
    for (label, weights) in hyperreal_weight_sets() {
        let n = weights.len();
        for (tag, scale) in scales_for(n) {
            let m = ProbabilityModel::new(space(n), weights.clone()).unwrap();
            let infinitesimal = !m.is_standard();
            out.push(GridEntry {
                label: format!("hyperreal {label} {tag}"),
                kind: GridKind::Hyperreal { infinitesimal },
                structure: hyperreal_structure(&m, &scale).unwrap(),
            });
        }
    }
    out
}

/// Ranked-model state orders of the grid (state indices, least plausible
/// first).
pub fn ranked_orders() -> Vec<Vec<usize>> {
    vec![
        vec![0],
        vec![0, 1],
        vec![0, 1, 2],
        vec![2, 0, 1],
        vec![0, 1, 2, 3],
        vec![3, 1, 0, 2],
    ]
}

pub fn ranked_grid() -> Vec<GridEntry> {
    let mut out = Vec::new();
    for order in ranked_orders() {
        let n = order.len();
        for (tag, scale) in scales_for(n) {
            let m = RankedModel::new(space(n), order.clone()).unwrap();
            out.push(GridEntry {
                label: format!("ranked n={n} order={order:?} {tag}"),
                kind: GridKind::Ranked,
                structure: ranked_structure(&m, &scale).unwrap(),
            });
        }
    }
    out
}

pub fn full_grid() -> Vec<GridEntry> {
    let mut out = expectation_grid();
    out.extend(hyperreal_grid());
    out.extend(ranked_grid());
    out
}
