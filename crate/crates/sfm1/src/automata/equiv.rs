//! Subset construction and the three equivalence deciders.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{epsilon_closure, step, AutomataError, Nfa, StateId, Witness};
use crate::terms::{Label, Symbol};

/// Largest automaton accepted by [`isomorphic`].
pub const ISO_LIMIT: usize = 64;

/// A complete deterministic automaton: no ε-moves and exactly one successor
/// per state and symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    nfa: Nfa,
    delta: BTreeMap<(StateId, Symbol), StateId>,
}

impl Dfa {
    /// Checks the determinism invariants.
    pub fn from_nfa(nfa: Nfa) -> Result<Dfa, AutomataError> {
        let mut delta = BTreeMap::new();
        for (s, l, t) in nfa.transitions() {
            let Label::Sym(a) = l else {
                return Err(AutomataError::Malformed(format!("ε-transition from `{s}`")));
            };
            if delta.insert((s.clone(), a.clone()), t.clone()).is_some() {
                return Err(AutomataError::Malformed(format!("two `{a}`-transitions from `{s}`")));
            }
        }
        for q in nfa.states() {
            for a in nfa.alphabet() {
                if !delta.contains_key(&(q.clone(), a.clone())) {
                    return Err(AutomataError::Malformed(format!("no `{a}`-transition from `{q}`")));
                }
            }
        }
        Ok(Dfa { nfa, delta })
    }

    pub fn as_nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn into_nfa(self) -> Nfa {
        self.nfa
    }

    pub fn next(&self, q: &str, a: &Symbol) -> Option<&StateId> {
        self.delta.get(&(q.to_string(), a.clone()))
    }
}

fn subset_name(set: &BTreeSet<StateId>) -> StateId {
    let parts: Vec<&str> = set.iter().map(String::as_str).collect();
    format!("{{{}}}", parts.join(","))
}

/// States from which some final state is reachable.
fn live_states(n: &Nfa) -> BTreeSet<StateId> {
    let mut live: BTreeSet<StateId> = n.finals().clone();
    loop {
        let before = live.len();
        for (s, _, t) in n.transitions() {
            if live.contains(t) {
                live.insert(s.clone());
            }
        }
        if live.len() == before {
            return live;
        }
    }
}

/// Subset construction over `alphabet`, which should include the automaton's
/// own alphabet. Only subsets reachable from the initial one are built. States
/// that cannot reach a final state are left out of every subset, so all dead
/// behaviour ends in the empty subset, the sink.
pub fn determinize(n: &Nfa, alphabet: &BTreeSet<Symbol>) -> Dfa {
    let alphabet: BTreeSet<Symbol> = alphabet.union(n.alphabet()).cloned().collect();
    let live = live_states(n);
    let prune = |set: BTreeSet<StateId>| -> BTreeSet<StateId> { set.intersection(&live).cloned().collect() };
    let start = prune(epsilon_closure(n, &BTreeSet::from([n.initial().clone()])));
    let mut names: BTreeMap<BTreeSet<StateId>, StateId> = BTreeMap::new();
    let mut queue = VecDeque::new();
    names.insert(start.clone(), subset_name(&start));
    queue.push_back(start.clone());
    let mut transitions = BTreeSet::new();
    let mut finals = BTreeSet::new();
    while let Some(set) = queue.pop_front() {
        let name = names[&set].clone();
        if set.iter().any(|q| n.is_final(q)) {
            finals.insert(name.clone());
        }
        for a in &alphabet {
            let target = prune(epsilon_closure(n, &step(n, &set, a)));
            let target_name = names
                .entry(target.clone())
                .or_insert_with(|| {
                    queue.push_back(target.clone());
                    subset_name(&target)
                })
                .clone();
            transitions.insert((name.clone(), Label::Sym(a.clone()), target_name));
        }
    }
    let nfa = Nfa::new(names.into_values(), alphabet, subset_name(&start), finals, transitions)
        .expect("subset construction yields a well-formed automaton");
    Dfa::from_nfa(nfa).expect("subset construction yields a complete DFA")
}

/// Outcome of a language-equivalence query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LangVerdict {
    Equal,
    Distinct(Witness),
}

impl LangVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, LangVerdict::Equal)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Language equivalence by determinizing both sides over the joint alphabet.
/// A distinguishing witness is shortest, ties broken lexicographically.
pub fn language_equiv(n1: &Nfa, n2: &Nfa) -> LangVerdict {
    let alphabet: BTreeSet<Symbol> = n1.alphabet().union(n2.alphabet()).cloned().collect();
    let d1 = determinize(n1, &alphabet);
    let d2 = determinize(n2, &alphabet);
    if union_find_equal(&d1, &d2, &alphabet) {
        return LangVerdict::Equal;
    }
    LangVerdict::Distinct(shortest_witness(&d1, &d2, &alphabet))
}

fn union_find_equal(d1: &Dfa, d2: &Dfa, alphabet: &BTreeSet<Symbol>) -> bool {
    let index1: HashMap<&str, usize> = d1.nfa.states().iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
    let offset = index1.len();
    let index2: HashMap<&str, usize> =
        d2.nfa.states().iter().enumerate().map(|(i, q)| (q.as_str(), i + offset)).collect();
    let mut uf = UnionFind::new(offset + index2.len());
    let mut stack = vec![(d1.nfa.initial().clone(), d2.nfa.initial().clone())];
    uf.union(index1[d1.nfa.initial().as_str()], index2[d2.nfa.initial().as_str()]);
    while let Some((p, q)) = stack.pop() {
        if d1.nfa.is_final(&p) != d2.nfa.is_final(&q) {
            return false;
        }
        for a in alphabet {
            let p2 = d1.next(&p, a).expect("complete");
            let q2 = d2.next(&q, a).expect("complete");
            if uf.union(index1[p2.as_str()], index2[q2.as_str()]) {
                stack.push((p2.clone(), q2.clone()));
            }
        }
    }
    true
}

type Pair = (StateId, StateId);

fn shortest_witness(d1: &Dfa, d2: &Dfa, alphabet: &BTreeSet<Symbol>) -> Witness {
    let start = (d1.nfa.initial().clone(), d2.nfa.initial().clone());
    let mut parent: HashMap<Pair, Option<(Pair, Symbol)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        if d1.nfa.is_final(&pair.0) != d2.nfa.is_final(&pair.1) {
            let mut word = Vec::new();
            let mut cur = pair;
            while let Some(Some((prev, a))) = parent.get(&cur) {
                word.push(a.clone());
                cur = prev.clone();
            }
            word.reverse();
            return Witness(word);
        }
        for a in alphabet {
            let next = (d1.next(&pair.0, a).expect("complete").clone(), d2.next(&pair.1, a).expect("complete").clone());
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((pair.clone(), a.clone())));
                queue.push_back(next);
            }
        }
    }
    unreachable!("shortest_witness called on equivalent automata")
}

/// Strong bisimilarity of the initial states, with ε treated as an ordinary
/// label, by partition refinement over the disjoint union.
pub fn bisimilar(n1: &Nfa, n2: &Nfa) -> bool {
    let mut states: Vec<(usize, &StateId)> = Vec::new();
    states.extend(n1.states().iter().map(|q| (0, q)));
    states.extend(n2.states().iter().map(|q| (1, q)));
    let index: HashMap<(usize, &str), usize> =
        states.iter().enumerate().map(|(i, (side, q))| ((*side, q.as_str()), i)).collect();
    let mut succ: Vec<Vec<(&Label, usize)>> = vec![Vec::new(); states.len()];
    for (side, n) in [(0usize, n1), (1, n2)] {
        for (s, a, t) in n.transitions() {
            succ[index[&(side, s.as_str())]].push((a, index[&(side, t.as_str())]));
        }
    }
    let is_final = |i: usize| {
        let (side, q) = states[i];
        if side == 0 {
            n1.is_final(q)
        } else {
            n2.is_final(q)
        }
    };
    let mut block: Vec<usize> = (0..states.len()).map(|i| usize::from(is_final(i))).collect();
    let mut count = block.iter().collect::<BTreeSet<_>>().len();
    loop {
        #[allow(clippy::type_complexity)]
        let mut sigs: BTreeMap<(usize, BTreeSet<(&Label, usize)>), usize> = BTreeMap::new();
        let next: Vec<usize> = (0..states.len())
            .map(|i| {
                let sig = (block[i], succ[i].iter().map(|(a, t)| (*a, block[*t])).collect());
                let fresh = sigs.len();
                *sigs.entry(sig).or_insert(fresh)
            })
            .collect();
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    block[index[&(0, n1.initial().as_str())]] == block[index[&(1, n2.initial().as_str())]]
}

/// An initial-anchored bijection preserving finality and transitions, if one
/// exists. Alphabet symbols that label no transition are ignored.
pub fn isomorphic(n1: &Nfa, n2: &Nfa) -> Result<Option<BTreeMap<StateId, StateId>>, AutomataError> {
    for n in [n1, n2] {
        if n.states().len() > ISO_LIMIT {
            return Err(AutomataError::TooLarge { states: n.states().len(), limit: ISO_LIMIT });
        }
    }
    if n1.states().len() != n2.states().len()
        || n1.transitions().len() != n2.transitions().len()
        || n1.finals().len() != n2.finals().len()
    {
        return Ok(None);
    }
    let g1 = Graph::new(n1);
    let g2 = Graph::new(n2);
    let order = g1.search_order();
    let mut map = vec![usize::MAX; g1.len()];
    let mut used = vec![false; g2.len()];
    if !g1.compatible(g1.initial, &g2, g2.initial) {
        return Ok(None);
    }
    if extend(&g1, &g2, &order, 0, &mut map, &mut used) {
        let out = map.iter().enumerate().map(|(i, &j)| (g1.names[i].clone(), g2.names[j].clone())).collect();
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

/// Whether `map` is an initial-anchored bijection from `n1` to `n2`
/// preserving finality and transitions.
pub fn is_isomorphism(n1: &Nfa, n2: &Nfa, map: &BTreeMap<StateId, StateId>) -> bool {
    let image: BTreeSet<&StateId> = map.values().collect();
    if map.len() != n1.states().len()
        || image.len() != n2.states().len()
        || !n1.states().iter().all(|q| map.contains_key(q))
        || !image.iter().all(|q| n2.states().contains(*q))
        || map.get(n1.initial()) != Some(n2.initial())
        || n1.transitions().len() != n2.transitions().len()
    {
        return false;
    }
    n1.states().iter().all(|q| n1.is_final(q) == n2.is_final(&map[q]))
        && n1
            .transitions()
            .iter()
            .all(|(s, a, t)| n2.transitions().contains(&(map[s].clone(), a.clone(), map[t].clone())))
}

struct Graph<'a> {
    names: Vec<&'a StateId>,
    initial: usize,
    finals: Vec<bool>,
    out: Vec<BTreeSet<(&'a Label, usize)>>,
    inc: Vec<BTreeSet<(&'a Label, usize)>>,
    signature: Vec<(bool, Vec<&'a Label>, Vec<&'a Label>)>,
}

impl<'a> Graph<'a> {
    fn new(n: &'a Nfa) -> Self {
        let names: Vec<&StateId> = n.states().iter().collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
        let mut out = vec![BTreeSet::new(); names.len()];
        let mut inc = vec![BTreeSet::new(); names.len()];
        for (s, a, t) in n.transitions() {
            out[index[s.as_str()]].insert((a, index[t.as_str()]));
            inc[index[t.as_str()]].insert((a, index[s.as_str()]));
        }
        let finals: Vec<bool> = names.iter().map(|q| n.is_final(q)).collect();
        let signature = (0..names.len())
            .map(|i| {
                let mut o: Vec<&Label> = out[i].iter().map(|(a, _)| *a).collect();
                let mut m: Vec<&Label> = inc[i].iter().map(|(a, _)| *a).collect();
                o.sort();
                m.sort();
                (finals[i], o, m)
            })
            .collect();
        Graph { initial: index[n.initial().as_str()], names, finals, out, inc, signature }
    }

    fn len(&self) -> usize {
        self.names.len()
    }

    fn compatible(&self, i: usize, other: &Graph, j: usize) -> bool {
        self.signature[i] == other.signature[j] && self.finals[i] == other.finals[j]
    }

    /// Breadth-first from the initial state over both edge directions, then
    /// any leftover states.
    fn search_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::new();
        let mut roots: Vec<usize> = vec![self.initial];
        roots.extend(0..self.len());
        for root in roots {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                order.push(i);
                for (_, j) in self.out[i].iter().chain(self.inc[i].iter()) {
                    if !seen[*j] {
                        seen[*j] = true;
                        queue.push_back(*j);
                    }
                }
            }
        }
        order
    }
}

fn consistent(g1: &Graph, g2: &Graph, map: &[usize], i: usize, j: usize) -> bool {
    let image = |k: usize| if k == i { j } else { map[k] };
    let ok_out = g1.out[i].iter().all(|(a, t)| {
        let ti = image(*t);
        ti == usize::MAX || g2.out[j].contains(&(*a, ti))
    });
    let ok_in = g1.inc[i].iter().all(|(a, s)| {
        let si = image(*s);
        si == usize::MAX || g2.inc[j].contains(&(*a, si))
    });
    ok_out && ok_in
}

fn extend(g1: &Graph, g2: &Graph, order: &[usize], depth: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    let Some(&i) = order.get(depth) else {
        return true;
    };
    let candidates: Vec<usize> = if i == g1.initial {
        vec![g2.initial]
    } else {
        // Any mapped neighbour pins the candidates to its corresponding neighbours.
        let pinned = g1.inc[i]
            .iter()
            .find(|(_, s)| map[*s] != usize::MAX)
            .map(|(a, s)| g2.out[map[*s]].iter().filter(|(b, _)| b == a).map(|(_, t)| *t).collect())
            .or_else(|| {
                g1.out[i]
                    .iter()
                    .find(|(_, t)| map[*t] != usize::MAX)
                    .map(|(a, t)| g2.inc[map[*t]].iter().filter(|(b, _)| b == a).map(|(_, s)| *s).collect())
            });
        pinned.unwrap_or_else(|| (0..g2.len()).collect())
    };
    for j in candidates {
        if used[j] || !g1.compatible(i, g2, j) || !consistent(g1, g2, map, i, j) {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if extend(g1, g2, order, depth + 1, map, used) {
            return true;
        }
        map[i] = usize::MAX;
        used[j] = false;
    }
    false
}
