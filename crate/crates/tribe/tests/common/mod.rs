//! Brute-force oracles that share no code with the search engine.
#![allow(dead_code)]

use grpd_tribe::groupoid::{codiscrete, cyclic, discrete, FinGroupoid, Mor, Obj, G};

pub fn small() -> Vec<(&'static str, G)> {
    vec![
        ("d0", discrete(0)),
        ("d1", discrete(1)),
        ("d2", discrete(2)),
        ("BZ2", cyclic(2)),
        ("BZ3", cyclic(3)),
        ("K2", codiscrete(2)),
    ]
}

/// Every pair of object and morphism tables, filtered by the functor laws.
pub fn brute_functors(a: &FinGroupoid, b: &FinGroupoid) -> Vec<(Vec<Obj>, Vec<Mor>)> {
    let na = a.object_count();
    let nb = b.object_count() as u64;
    let mut out = Vec::new();
    let total = nb.pow(na as u32);
    for code in 0..total {
        let mut c = code;
        let obj: Vec<Obj> = (0..na)
            .map(|_| {
                let v = (c % nb.max(1)) as Obj;
                c /= nb.max(1);
                v
            })
            .collect();
        let choices: Vec<Vec<Mor>> = a
            .morphisms()
            .map(|m| {
                b.morphisms()
                    .filter(|&n| b.src(n) == obj[a.src(m) as usize] && b.dst(n) == obj[a.dst(m) as usize])
                    .collect()
            })
            .collect();
        let mut mor = vec![0; a.morphism_count()];
        enumerate(0, &choices, &mut mor, &mut |mor| {
            let ids = a.objects().all(|x| mor[a.id(x) as usize] == b.id(obj[x as usize]));
            let comp = a.morphisms().all(|f| {
                a.out(a.dst(f))
                    .iter()
                    .all(|&g| mor[a.compose(g, f) as usize] == b.compose(mor[g as usize], mor[f as usize]))
            });
            if ids && comp {
                out.push((obj.clone(), mor.to_vec()));
            }
        });
    }
    out
}

fn enumerate(i: usize, choices: &[Vec<Mor>], cur: &mut Vec<Mor>, visit: &mut dyn FnMut(&[Mor])) {
    if i == choices.len() {
        visit(cur);
        return;
    }
    for &c in &choices[i] {
        cur[i] = c;
        enumerate(i + 1, choices, cur, visit);
    }
}

/// All natural isomorphisms between two functors given as tables.
pub fn brute_nat_isos(
    a: &FinGroupoid,
    b: &FinGroupoid,
    f: &(Vec<Obj>, Vec<Mor>),
    g: &(Vec<Obj>, Vec<Mor>),
) -> Vec<Vec<Mor>> {
    let choices: Vec<Vec<Mor>> = a
        .objects()
        .map(|x| b.hom(f.0[x as usize], g.0[x as usize]).to_vec())
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0; a.object_count()];
    enumerate(0, &choices, &mut cur, &mut |c| {
        let natural = a.morphisms().all(|m| {
            b.compose(g.1[m as usize], c[a.src(m) as usize]) == b.compose(c[a.dst(m) as usize], f.1[m as usize])
        });
        if natural {
            out.push(c.to_vec());
        }
    });
    out
}

/// `g ∘ f`.
pub fn compose_tables(f: &(Vec<Obj>, Vec<Mor>), g: &(Vec<Obj>, Vec<Mor>)) -> (Vec<Obj>, Vec<Mor>) {
    (
        f.0.iter().map(|&x| g.0[x as usize]).collect(),
        f.1.iter().map(|&m| g.1[m as usize]).collect(),
    )
}

pub fn identity_table(a: &FinGroupoid) -> (Vec<Obj>, Vec<Mor>) {
    (a.objects().collect(), a.morphisms().collect())
}

/// Exhaustive: some `g` with `g ∘ f ≅ id` and `f ∘ g ≅ id`.
pub fn brute_is_equivalence(a: &FinGroupoid, b: &FinGroupoid, f: &(Vec<Obj>, Vec<Mor>)) -> bool {
    brute_functors(b, a).iter().any(|g| {
        !brute_nat_isos(a, a, &compose_tables(f, g), &identity_table(a)).is_empty()
            && !brute_nat_isos(b, b, &compose_tables(g, f), &identity_table(b)).is_empty()
    })
}

/// Natural-isomorphism classes of functors, by exhaustive comparison.
pub fn brute_classes(a: &FinGroupoid, b: &FinGroupoid) -> usize {
    let fs = brute_functors(a, b);
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..fs.len() {
        if !reps.iter().any(|&r| !brute_nat_isos(a, b, &fs[r], &fs[i]).is_empty()) {
            reps.push(i);
        }
    }
    reps.len()
}
