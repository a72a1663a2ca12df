//! Named-variable mirror of the core syntax, used as an independent oracle for
//! shifting and substitution.
//!
//! Free variables are named `f0, f1, ...` after their de Bruijn index in the
//! enclosing context; binders get names `b0, b1, ...`. Substitution renames
//! binders that would capture, the textbook way.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::syntax::{RcTerm, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Named {
    Var(String),
    /// Any other constructor: a template for the non-variable data plus the
    /// children, each with the names it binds (outermost first).
    Node(Box<Term>, Vec<(Vec<String>, Named)>),
}

fn free_name(i: usize) -> String {
    format!("f{i}")
}

fn free_index(name: &str) -> Option<usize> {
    name.strip_prefix('f')?.parse().ok()
}

/// Convert with `free(i)` naming the free variable of index `i`.
pub fn to_named(t: &Term, free: &dyn Fn(usize) -> String) -> Named {
    let mut counter = 0;
    go_named(t, &mut Vec::new(), free, &mut counter)
}

fn go_named(
    t: &Term,
    bound: &mut Vec<String>,
    free: &dyn Fn(usize) -> String,
    counter: &mut usize,
) -> Named {
    if let Term::Var(i) = t {
        return Named::Var(match bound.len().checked_sub(i + 1) {
            Some(pos) => bound[pos].clone(),
            None => free(i - bound.len()),
        });
    }
    let mut children = Vec::new();
    t.for_each_child(|c, extra| {
        let names: Vec<String> = (0..extra)
            .map(|_| {
                *counter += 1;
                format!("b{counter}")
            })
            .collect();
        let depth = bound.len();
        bound.extend(names.iter().cloned());
        let child = go_named(c, bound, free, counter);
        bound.truncate(depth);
        children.push((names, child));
    });
    Named::Node(Box::new(t.clone()), children)
}

/// Convert back, mapping free names through `free_index`.
pub fn from_named(n: &Named, free_idx: &dyn Fn(&str) -> usize) -> Term {
    go_index(n, &mut Vec::new(), free_idx)
}

fn go_index(n: &Named, bound: &mut Vec<String>, free_idx: &dyn Fn(&str) -> usize) -> Term {
    match n {
        Named::Var(x) => match bound.iter().rposition(|b| b == x) {
            Some(pos) => Term::Var(bound.len() - 1 - pos),
            None => Term::Var(bound.len() + free_idx(x)),
        },
        Named::Node(template, children) => {
            let kids: Vec<RcTerm> = children
                .iter()
                .map(|(names, c)| {
                    let depth = bound.len();
                    bound.extend(names.iter().cloned());
                    let t = go_index(c, bound, free_idx);
                    bound.truncate(depth);
                    Arc::new(t)
                })
                .collect();
            rebuild(template, kids)
        }
    }
}

/// Replace the children of `template` (in `for_each_child` order).
fn rebuild(template: &Term, k: Vec<RcTerm>) -> Term {
    let mut it = k.into_iter();
    let mut next = || it.next().expect("child count matches");
    match template {
        Term::Var(_) | Term::Global(_) | Term::Univ(_) | Term::CodeUniv(_) | Term::Axiom(_) => {
            template.clone()
        }
        Term::Pi(..) => Term::Pi(next(), next()),
        Term::Sigma(..) => Term::Sigma(next(), next()),
        Term::Lam(_) => Term::Lam(next()),
        Term::App(..) => Term::App(next(), next()),
        Term::Pair(..) => Term::Pair(next(), next()),
        Term::CodePi(..) => Term::CodePi(next(), next()),
        Term::CodeSigma(..) => Term::CodeSigma(next(), next()),
        Term::Fst(_) => Term::Fst(next()),
        Term::Snd(_) => Term::Snd(next()),
        Term::Refl(_) => Term::Refl(next()),
        Term::El(_) => Term::El(next()),
        Term::Lift(_) => Term::Lift(next()),
        Term::IdTy(..) => Term::IdTy(next(), next(), next()),
        Term::CodeId(..) => Term::CodeId(next(), next(), next()),
        Term::J { .. } => Term::J {
            motive: next(),
            base: next(),
            lhs: next(),
            rhs: next(),
            path: next(),
        },
    }
}

fn free_vars(n: &Named, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match n {
        Named::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Named::Node(_, children) => {
            for (names, c) in children {
                let depth = bound.len();
                bound.extend(names.iter().cloned());
                free_vars(c, bound, out);
                bound.truncate(depth);
            }
        }
    }
}

fn all_names(n: &Named, out: &mut BTreeSet<String>) {
    match n {
        Named::Var(x) => {
            out.insert(x.clone());
        }
        Named::Node(_, children) => {
            for (names, c) in children {
                out.extend(names.iter().cloned());
                all_names(c, out);
            }
        }
    }
}

/// Rename free occurrences according to `f`.
fn rename_free(n: &Named, bound: &mut Vec<String>, f: &dyn Fn(&str) -> String) -> Named {
    match n {
        Named::Var(x) if bound.contains(x) => Named::Var(x.clone()),
        Named::Var(x) => Named::Var(f(x)),
        Named::Node(t, children) => Named::Node(
            t.clone(),
            children
                .iter()
                .map(|(names, c)| {
                    let depth = bound.len();
                    bound.extend(names.iter().cloned());
                    let r = rename_free(c, bound, f);
                    bound.truncate(depth);
                    (names.clone(), r)
                })
                .collect(),
        ),
    }
}

/// Capture-avoiding substitution of `s` for the free name `x`.
pub fn subst_named(n: &Named, x: &str, s: &Named) -> Named {
    let mut fv = BTreeSet::new();
    free_vars(s, &mut Vec::new(), &mut fv);
    let mut used = BTreeSet::new();
    all_names(n, &mut used);
    all_names(s, &mut used);
    let mut fresh = 0usize;
    subst_go(n, x, s, &fv, &mut used, &mut fresh)
}

fn subst_go(
    n: &Named,
    x: &str,
    s: &Named,
    fv: &BTreeSet<String>,
    used: &mut BTreeSet<String>,
    fresh: &mut usize,
) -> Named {
    match n {
        Named::Var(y) if y == x => s.clone(),
        Named::Var(_) => n.clone(),
        Named::Node(t, children) => {
            let mut out = Vec::new();
            for (names, c) in children {
                if names.iter().any(|b| b == x) {
                    out.push((names.clone(), c.clone()));
                    continue;
                }
                let mut names = names.clone();
                let mut body = c.clone();
                for b in names.iter_mut() {
                    if fv.contains(b) {
                        let new = loop {
                            *fresh += 1;
                            let cand = format!("r{fresh}");
                            if !used.contains(&cand) {
                                break cand;
                            }
                        };
                        used.insert(new.clone());
                        let old = b.clone();
                        body = rename_free(&body, &mut Vec::new(), &|v: &str| {
                            if v == old {
                                new.clone()
                            } else {
                                v.to_string()
                            }
                        });
                        *b = new;
                    }
                }
                out.push((names, subst_go(&body, x, s, fv, used, fresh)));
            }
            Named::Node(t.clone(), out)
        }
    }
}

fn index_of_free(name: &str) -> usize {
    free_index(name).expect("free variables are named f<i>")
}

/// Oracle for `shift(t, amount, cutoff)` (amount must not underflow).
pub fn shift_oracle(t: &Term, amount: isize, cutoff: usize) -> Term {
    let named = to_named(t, &free_name);
    let moved = rename_free(&named, &mut Vec::new(), &|v: &str| {
        let i = index_of_free(v);
        if i >= cutoff {
            free_name((i as isize + amount) as usize)
        } else {
            v.to_string()
        }
    });
    from_named(&moved, &index_of_free)
}

/// Oracle for `substitute(t, target, s)`.
pub fn substitute_oracle(t: &Term, target: usize, s: &Term) -> Term {
    let named_t = to_named(t, &free_name);
    // `s` lives in the context with `target` deleted.
    let named_s = to_named(s, &|i| free_name(if i < target { i } else { i + 1 }));
    let replaced = subst_named(&named_t, &free_name(target), &named_s);
    let lowered = rename_free(&replaced, &mut Vec::new(), &|v: &str| {
        let i = index_of_free(v);
        if i > target {
            free_name(i - 1)
        } else {
            v.to_string()
        }
    });
    from_named(&lowered, &index_of_free)
}
