//! Subspace counts and intersections against a closure-based enumeration
//! over prime fields: a subspace is the set of all its vectors, grown one
//! generator at a time.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_switch::algebra::{gauss_binom, intersection_dim, FieldTable, MatrixFq};
use spectral_switch::schemes::{enumerate_vertices, SchemeParams, Vertices};

fn encode(v: &[u8], q: u32) -> u32 {
    v.iter().fold(0, |acc, &x| acc * q + u32::from(x))
}

fn add_scaled(mut a: u32, mut b: u32, c: u32, n: usize, q: u32) -> u32 {
    let (mut out, mut place) = (0, 1);
    for _ in 0..n {
        out += (a % q + c * (b % q)) % q * place;
        a /= q;
        b /= q;
        place *= q;
    }
    out
}

fn extend(space: &[u32], v: u32, n: usize, q: u32) -> Vec<u32> {
    let mut out: Vec<u32> = space
        .iter()
        .flat_map(|&s| (0..q).map(move |c| (s, c)))
        .map(|(s, c)| add_scaled(s, v, c, n, q))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All subspaces of F_q^n of dimension ≤ `max_dim`, by dimension, as sorted vector sets.
fn closure_subspaces(n: usize, q: u32, max_dim: usize) -> Vec<HashSet<Vec<u32>>> {
    let total = q.pow(n as u32);
    let mut levels = vec![HashSet::from([vec![0u32]])];
    for d in 1..=max_dim.min(n) {
        let mut next = HashSet::new();
        for s in &levels[d - 1] {
            for v in 0..total {
                if s.binary_search(&v).is_err() {
                    next.insert(extend(s, v, n, q));
                }
            }
        }
        levels.push(next);
    }
    levels
}

fn span_set(m: &MatrixFq, q: u32) -> Vec<u32> {
    let n = m.cols();
    (0..m.rows()).fold(vec![0u32], |acc, r| extend(&acc, encode(m.row(r), q), n, q))
}

#[test]
fn gauss_binom_matches_closure_enumeration() {
    for q in [2u32, 3] {
        for n in 1..=6usize {
            // q = 3, n = 6 is counted up to k = 3; orthogonal complement is a
            // bijection between k- and (n−k)-spaces for the rest
            let max_dim = if q == 3 && n == 6 { 3 } else { n };
            let levels = closure_subspaces(n, q, max_dim);
            for k in 0..=n {
                let count = if k <= max_dim { levels[k].len() } else { levels[n - k].len() };
                assert_eq!(gauss_binom(n as u64, k as u64, q as u64), BigUint::from(count), "q={q} n={n} k={k}");
            }
        }
    }
}

#[test]
fn rref_vertices_are_exactly_the_subspaces() {
    for (q, n_max) in [(2u32, 6usize), (3, 5)] {
        for n in 2..=n_max {
            let levels = closure_subspaces(n, q, n);
            for k in 1..n {
                let p = SchemeParams::grassmann(n, k, q, &[0]).unwrap();
                let Vertices::Subspaces(vs) = enumerate_vertices(&p, 1_000_000).unwrap() else { panic!("subspaces") };
                let ours: HashSet<Vec<u32>> = vs.iter().map(|v| span_set(v.basis(), q)).collect();
                assert_eq!(ours.len(), vs.len(), "duplicate subspace for q={q} n={n} k={k}");
                assert_eq!(ours, levels[k], "q={q} n={n} k={k}");
                assert!(vs.iter().all(|v| v.basis().is_rref()));
            }
        }
    }
}

#[test]
fn intersection_dimension_matches_vector_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [2u32, 3] {
        let f = FieldTable::get(q).unwrap();
        let n = 5;
        for _ in 0..300 {
            let mut random_matrix = || {
                let rows = rng.gen_range(1..=3);
                let data: Vec<Vec<u8>> = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(0..q) as u8).collect()).collect();
                MatrixFq::from_rows(f, n, &data).unwrap()
            };
            let (a, b) = (random_matrix(), random_matrix());
            let (sa, sb): (BTreeSet<u32>, BTreeSet<u32>) = (span_set(&a, q).into_iter().collect(), span_set(&b, q).into_iter().collect());
            let common = sa.intersection(&sb).count();
            let d = intersection_dim(&a, &b).unwrap();
            assert_eq!(common, q.pow(d as u32) as usize);
            assert_eq!(sa.len(), q.pow(a.rank() as u32) as usize);
        }
    }
}

#[test]
fn qkneser_cell_intersections() {
    // the four k-spaces through π pairwise meet exactly in π, and τ misses p1p2p3π
    let f = FieldTable::get(2).unwrap();
    let e = |i: &[usize]| -> Vec<u8> { (1..=6).map(|c| u8::from(i.contains(&c))).collect() };
    let m = |rows: Vec<Vec<u8>>| MatrixFq::from_rows(f, 6, &rows).unwrap();
    let cell = [
        m(vec![e(&[1]), e(&[2]), e(&[4])]),
        m(vec![e(&[1]), e(&[3]), e(&[4])]),
        m(vec![e(&[2]), e(&[3]), e(&[4])]),
        m(vec![e(&[1, 2]), e(&[1, 3]), e(&[4])]),
    ];
    for i in 0..4 {
        for j in i + 1..4 {
            assert_eq!(intersection_dim(&cell[i], &cell[j]).unwrap(), 2, "cells {i},{j}");
        }
    }
    let tau = m(vec![e(&[5]), e(&[6])]);
    let big = m(vec![e(&[1]), e(&[2]), e(&[3]), e(&[4])]);
    assert_eq!(intersection_dim(&big, &tau).unwrap(), 0);
    let sa = span_set(&cell[3], 2);
    assert_eq!(sa.len(), 8);
}
