use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_switch::families::{recipe_halfrange_2kk, recipe_j2n4, recipe_qkneser, recipe_sporadic, Recipe, SPORADIC_NAMES};
use spectral_switch::graph::{Graph, VertexSet};
use spectral_switch::schemes::build;
use spectral_switch::spectra::{cospectral, DEFAULT_SEED};
use spectral_switch::switching::{GmSpec, SwitchSpec, WqhSpec};

fn small_recipes() -> Vec<Recipe> {
    let mut out: Vec<Recipe> = (8..=10).map(|n| recipe_j2n4(n).unwrap()).collect();
    out.push(recipe_halfrange_2kk(5).unwrap());
    for (n, k) in [(4, 2), (5, 2), (6, 3)] {
        out.push(recipe_qkneser(n, k).unwrap());
    }
    out.extend(SPORADIC_NAMES.iter().map(|s| recipe_sporadic(s).unwrap()));
    out
}

fn sorted_eigenvalues(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let m = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn same_spectrum_float(g: &Graph, h: &Graph) -> bool {
    sorted_eigenvalues(g).iter().zip(sorted_eigenvalues(h)).all(|(a, b)| (a - b).abs() < 1e-6)
}

/// tr(A^k) for k = 1..=n, exactly while it fits; equal power sums mean equal spectra.
fn power_sums(g: &Graph) -> Vec<u128> {
    let n = g.n();
    let a: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| u128::from(g.has_edge(i, j))).collect()).collect();
    let mut p = a.clone();
    let mut out = Vec::new();
    for _ in 0..n {
        out.push((0..n).map(|i| p[i][i]).sum());
        p = (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| p[i][l] * a[l][j]).sum()).collect()).collect();
    }
    out
}

fn count_in(g: &Graph, v: usize, set: &[usize]) -> usize {
    set.iter().filter(|&&u| g.has_edge(u, v)).count()
}

/// Switching done by hand from the definitions.
fn switch_by_hand(g: &Graph, spec: &SwitchSpec) -> Graph {
    let n = g.n();
    let mut adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j)).collect()).collect();
    let mut toggle = |v: usize, set: &[usize]| {
        for &u in set {
            adj[u][v] = !adj[u][v];
            adj[v][u] = !adj[v][u];
        }
    };
    match spec {
        SwitchSpec::Gm(gm) => {
            let cells: Vec<&[usize]> = gm.cells().iter().map(|c| c.as_slice()).collect();
            for v in (0..n).filter(|v| !cells.iter().any(|c| c.contains(v))) {
                for c in &cells {
                    if 2 * count_in(g, v, c) == c.len() {
                        toggle(v, c);
                    }
                }
            }
        }
        SwitchSpec::Wqh(w) => {
            let (c1, c2) = (w.c1().as_slice(), w.c2().as_slice());
            let both: Vec<usize> = c1.iter().chain(c2).copied().collect();
            for v in (0..n).filter(|v| !both.contains(v)) {
                let (a, b) = (count_in(g, v, c1), count_in(g, v, c2));
                if (a, b) == (c1.len(), 0) || (a, b) == (0, c2.len()) {
                    toggle(v, &both);
                }
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| adj[i][j]).collect();
    Graph::from_edges(n, &edges).unwrap()
}

#[test]
fn recipes_validate_and_switch_as_defined() {
    for r in small_recipes() {
        let g = build(&r.params).unwrap();
        let report = r.spec.validate(&g).unwrap();
        assert!(report.valid, "{}: {}", r.name, report.summary());
        let h = r.spec.apply(&g).unwrap();
        assert!(h.same_adjacency(&switch_by_hand(&g, &r.spec)), "{}", r.name);
        assert!(r.spec.apply(&h).unwrap().same_adjacency(&g), "{} is not an involution", r.name);
        assert!(!h.same_adjacency(&g), "{} switched nothing", r.name);
        if g.n() <= 500 {
            assert!(same_spectrum_float(&g, &h), "{}", r.name);
        }
        if let SwitchSpec::Wqh(w) = &r.spec {
            let swapped = SwitchSpec::Wqh(w.swapped()).apply(&g).unwrap();
            assert!(swapped.same_adjacency(&h), "{}", r.name);
        }
    }
}

/// Symmetric subset of Z_m, as a set of differences.
fn random_differences(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    let mut d = Vec::new();
    for x in 1..=m / 2 {
        if rng.gen_bool(0.5) {
            d.push(x);
            d.push(m - x);
        }
    }
    d
}

/// Random graph with one or two planted GM cells of size 4 or 6, plus the cells.
fn planted_gm(rng: &mut ChaCha8Rng) -> (Graph, Vec<Vec<usize>>) {
    let cell_count = rng.gen_range(1..=2);
    let m = if rng.gen_bool(0.5) { 4 } else { 6 };
    let outside = rng.gen_range(2..=12);
    let n = cell_count * m + outside;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let cells: Vec<Vec<usize>> = (0..cell_count).map(|c| order[c * m..(c + 1) * m].to_vec()).collect();
    let rest = &order[cell_count * m..];
    let mut edges = Vec::new();
    for a in 0..cell_count {
        for b in a..cell_count {
            let diffs = random_differences(rng, m);
            let shift = if a == b { 0 } else { rng.gen_range(0..m) };
            for i in 0..m {
                for j in 0..m {
                    let d = (i + m - (j + shift) % m) % m;
                    if (a != b || i < j) && diffs.contains(&d) {
                        edges.push((cells[a][i], cells[b][j]));
                    }
                }
            }
        }
    }
    for &v in rest {
        for c in &cells {
            let take = [0, m / 2, m][rng.gen_range(0..3)];
            let mut members = c.clone();
            members.shuffle(rng);
            edges.extend(members[..take].iter().map(|&u| (u, v)));
        }
    }
    for (i, &u) in rest.iter().enumerate() {
        for &v in &rest[i + 1..] {
            if rng.gen_bool(0.4) {
                edges.push((u, v));
            }
        }
    }
    (Graph::from_edges(n, &edges).unwrap(), cells)
}

fn gm_spec(cells: &[Vec<usize>]) -> SwitchSpec {
    SwitchSpec::Gm(GmSpec::new(cells.iter().map(|c| VertexSet::new(c.clone()).unwrap()).collect()).unwrap())
}

#[test]
fn planted_gm_cells_validate_and_give_cospectral_mates() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let (g, cells) = planted_gm(&mut rng);
        let spec = gm_spec(&cells);
        let report = spec.validate(&g).unwrap();
        assert!(report.valid, "trial {trial}: {}", report.summary());
        let h = spec.apply(&g).unwrap();
        assert!(h.same_adjacency(&switch_by_hand(&g, &spec)), "trial {trial}");
        assert_eq!(power_sums(&g), power_sums(&h), "trial {trial}");
        assert!(cospectral(&g, &h, 2, DEFAULT_SEED).unwrap().equal, "trial {trial}");
    }
}

#[test]
fn perturbed_planted_cells_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    while checked < 300 {
        let (g, cells) = planted_gm(&mut rng);
        let c = &cells[0];
        let Some(v) = (0..g.n()).find(|v| !cells.iter().any(|c| c.contains(v))) else { continue };
        let mut b = g.to_builder();
        b.toggle(c[0], v);
        let broken = b.build();
        // one vertex more or fewer of the cell is neither 0, half nor all
        let report = gm_spec(&cells).validate(&broken).unwrap();
        assert!(!report.valid);
        assert!(report.violations.iter().any(|x| x.vertex == v && x.condition == "gm-ii"), "{report:?}");
        assert!(gm_spec(&cells).apply(&broken).is_err());
        checked += 1;
    }
}

#[test]
fn perturbed_recipe_sets_are_rejected() {
    let r = recipe_j2n4(8).unwrap();
    let g = build(&r.params).unwrap();
    let SwitchSpec::Wqh(w) = &r.spec else { panic!("expected WQH") };
    let inside: Vec<usize> = w.c1().iter().chain(w.c2().iter()).collect();
    let v = (0..g.n()).find(|v| !inside.contains(v)).unwrap();
    let mut b = g.to_builder();
    b.toggle(w.c1().as_slice()[0], v);
    let broken = b.build();
    assert!(!r.spec.validate(&broken).unwrap().valid);

    // replacing one member of C2 breaks the constant-difference condition or an outside class
    let other = (0..g.n()).find(|x| !inside.contains(x) && *x != v).unwrap();
    let mut c2 = w.c2().as_slice().to_vec();
    c2[0] = other;
    let spec = SwitchSpec::Wqh(WqhSpec::new(w.c1().clone(), VertexSet::new(c2).unwrap()).unwrap());
    assert!(!spec.validate(&g).unwrap().valid);
}
