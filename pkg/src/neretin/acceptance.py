"""Acceptance criteria as deterministic, seedable checks.

Each criterion returns a :class:`CriterionResult`; ``run_suite`` groups them
by module for the command line ``verify`` subcommand.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

from . import perm as Pm
from .aaut import (
    classify,
    compose,
    parity,
    parity_of_representative,
    translation_b,
    verify_translation_witness,
)
from .cube import (
    CubeVertex,
    ball,
    base_vertex,
    cube_orbit_census,
    degree,
    descending_link,
    expected_degree,
    link,
    stabilizes,
    verify_stabilizer_certificate,
)
from .errors import BudgetExceeded
from .sampling import random_element, random_finite_order, random_forest_automorphism, random_tree
from .simplicial import (
    SimplicialComplex,
    complexes_isomorphic,
    connected_components,
    homology,
    interval_complex,
    is_flag,
    join as complex_join,
    map_is_isomorphism,
)
from .trees import count_admissible_trees, all_trees_up_to_depth, feasible_leaf_count, special_tree

DEFAULT_SEED = 42


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.key}: {self.title}"

    def to_json(self) -> dict:
        return {"criterion": self.key, "title": self.title, "passed": self.passed, "detail": self.detail}


def _timed(key: str, title: str, fn, *args) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = fn(*args)
    return CriterionResult(key, title, bool(passed), detail, time.perf_counter() - start)


# criterion 1

def _explored(d: int, radius: int = 3, max_height: int = 7):
    return ball(base_vertex(d), radius, max_height=max_height)


def check_degrees(seed: int = DEFAULT_SEED):
    detail = {}
    ok = True
    for d in (2, 3):
        b = _explored(d)
        bad = [v.height for v in b.vertices if v.height > 1 and degree(v) != expected_degree(v.height, d)]
        detail[f"d={d}"] = {"vertices": len(b.vertices), "max_height": max(b.heights), "violations": len(bad)}
        ok = ok and not bad
    return ok, detail


# criterion 2

def check_descending_links(seed: int = DEFAULT_SEED, max_height: int = 9, samples: int = 3):
    rng = random.Random(seed)
    detail = {}
    ok = True
    for d in (2, 3):
        vertices = [v for v in _explored(d).vertices if v.height <= max_height]
        for h in range(1, max_height + 1):
            if not feasible_leaf_count(h, d):
                continue
            vertices.append(CubeVertex(special_tree(h, d)))
            for _ in range(samples):
                tree = random_tree(rng, d, (h - 1) // (d - 1))
                vertices.append(CubeVertex(tree, random_element(rng, d, 2)))
        checked = 0
        models = {}
        for v in vertices:
            if v.height == 1:
                continue
            model = models.setdefault(v.height, interval_complex(d, v.height))
            L = descending_link(v)
            if not map_is_isomorphism(L.complex, model, L.phi):
                ok = False
            checked += 1
        # independent graph-isomorphism check, once per height
        for h, model in sorted(models.items()):
            if h <= 7 and not complexes_isomorphic(descending_link(CubeVertex(special_tree(h, d))).complex, model):
                ok = False
        detail[f"d={d}"] = {"checked": checked, "heights": sorted(models)}
    return ok, detail


# criterion 3

@lru_cache(maxsize=None)
def _links(d: int):
    b = ball(base_vertex(d), 2, max_height=6 if d == 2 else 7)
    return tuple((v, link(v)) for v in b.vertices)


def check_links_flag(seed: int = DEFAULT_SEED):
    detail = {}
    ok = True
    for d in (2, 3):
        count = 0
        for v, L in _links(d):
            flag, _ = is_flag(L.complex)
            ok = ok and flag
            count += 1
        detail[f"d={d}"] = {"links": count}
    return ok, detail


def check_links_join(seed: int = DEFAULT_SEED):
    """The link against join(simplex on ups, descending link)."""
    detail = {}
    ok = True
    for d in (2, 3):
        first_failure = None
        failures = 0
        for v, L in _links(d):
            ups = [lab for lab in L.labels if lab[0] == "up"]
            downs = descending_link(v) if v.height > 1 else None
            up_simplex = SimplicialComplex.simplex(ups)
            if downs is None or not downs.neighbors:
                expected = up_simplex
            else:
                relabel = {i: ("down",) + s for i, s in downs.phi.items()}
                expected = complex_join(up_simplex, downs.complex.relabel(relabel))
            if expected != L.complex:
                failures += 1
                if first_failure is None:
                    first_failure = {
                        "height": v.height,
                        "link_f_vector": list(L.complex.f_vector()),
                        "join_f_vector": list(expected.f_vector()),
                    }
        detail[f"d={d}"] = {"failures": failures, "example": first_failure}
        ok = ok and failures == 0
    return ok, detail


# criterion 4

def check_interval_connectivity(seed: int = DEFAULT_SEED):
    comps4 = connected_components(interval_complex(2, 4))
    connected = {q: connected_components(interval_complex(2, q)) == 1 for q in (6, 7, 8)}
    report = homology(interval_complex(2, 10), max_dim=1)
    detail = {
        "I(2,4) components": comps4,
        "connected": {str(q): v for q, v in connected.items()},
        "betti1 I(2,10)": report.betti[1],
        "torsion1 I(2,10)": report.torsion[1],
        "caveat": "homology is a proxy: vanishing H1 does not by itself give simple connectivity",
    }
    return comps4 == 3 and all(connected.values()), detail


# criterion 5

def check_orbit_census(seed: int = DEFAULT_SEED):
    detail = {}
    ok = True
    for d in (2, 3):
        # radius large enough that heights up to 7 occur
        b = ball(base_vertex(d), 5 if d == 2 else 3, max_height=7)
        census = cube_orbit_census(b, 7)
        ok = ok and census.within_bound and all(v == 1 for v in census.vertex_classes.values())
        detail[f"d={d}"] = census.to_json()
    return ok, detail


# criterion 6

def check_parity_laws(seed: int = DEFAULT_SEED, cases: int = 1000):
    from .cremona.parity import expand_at, expected_expansion_sign

    rng = random.Random(seed)
    sign_failures = 0
    for _ in range(cases):
        n = rng.randint(1, 8)
        d = rng.choice((2, 3, 4))
        p = list(range(n))
        rng.shuffle(p)
        s = rng.randint(1, n)
        r = p[s - 1] + 1
        beta = list(range(d))
        rng.shuffle(beta)
        out = expand_at(p, s, r, d, beta)
        if Pm.sign(out) != expected_expansion_sign(p, s, r, d, beta) or Pm.sign(out) != Pm.sign_by_inversions(out):
            sign_failures += 1

    # representative independence, odd arity
    rep_failures = 0
    elements = 0
    reps = 0
    while elements < 40:
        g = random_element(rng, 3, rng.randint(0, 3), even=True, portrait_depth=2)
        # every representative counts here, so the canonical labels must be even
        if not g.all_labels_even():
            continue
        value = parity(g)
        elements += 1
        c = g.canonical
        trees = [c.domain] + [c.domain.expand_all(sub) for k in range(1, len(c.domain.leaves) + 1)
                              for sub in itertools.combinations(c.domain.leaves, k)]
        for _ in range(10):
            t = c.domain
            while True:
                options = [u for u in t.leaves if len(u) < 4]
                if not options or rng.random() < 0.15:
                    break
                t = t.expand(rng.choice(options))
            trees.append(t)
        for t in trees:
            reps += 1
            if parity_of_representative(c, t) != value:
                rep_failures += 1

    # multiplicativity
    mult_failures = 0
    pairs = 0
    while pairs < cases:
        g = random_element(rng, 3, rng.randint(0, 3), even=True)
        f = random_element(rng, 3, rng.randint(0, 3), even=True)
        pg, pf = parity(g), parity(f)
        pgf = parity(compose(g, f))
        pairs += 1
        if pgf != pg * pf:
            mult_failures += 1
    detail = {
        "sign_law_cases": cases,
        "sign_law_failures": sign_failures,
        "elements": elements,
        "representatives": reps,
        "representative_failures": rep_failures,
        "pairs": pairs,
        "multiplicative_failures": mult_failures,
    }
    return sign_failures == rep_failures == mult_failures == 0, detail


# criterion 7

def check_pgl2_census(seed: int = DEFAULT_SEED):
    from .cremona.parity import pgl2_parity_census

    expected = {4: True, 8: True, 2: False, 3: False, 5: False}
    got = {}
    ok = True
    for q, want in expected.items():
        r = pgl2_parity_census(q)
        got[str(q)] = {"allEven": r["allEven"], "order": r["order"]}
        ok = ok and r["allEven"] == want and r["order"] == r["expected_order"]
    return ok, got


# criterion 8

def check_cremona_q4(seed: int = DEFAULT_SEED, samples: int = 100):
    from .cremona.bubbles import induced_aaut_level1
    from .cremona.fields import GF
    from .cremona.parity import random_linear
    from .cremona.projective import QuadraticStd

    F = GF(4)
    rng = random.Random(seed)
    signs = []
    for _ in range(samples):
        g = induced_aaut_level1(random_linear(rng, F), F)
        signs.append(parity_of_representative(g, g.domain))
    std = induced_aaut_level1(QuadraticStd(F), F)
    std_sign = parity_of_representative(std, std.domain)
    detail = {"linear_signs": sorted(set(signs)), "quadratic_std_sign": std_sign,
              "quadratic_std_leaves": std.domain.leaf_count, "modulus": F.modulus_string()}
    return set(signs) == {1} and std_sign == 1 and std.domain.leaf_count == 33, detail


# criterion 9

def check_closure(seed: int = DEFAULT_SEED):
    from .cremona.fields import GF
    from .cremona.groups import alternating_generators, group_closure, naive_closure, symmetric_generators
    from .cremona.parity import pgl3_generators, pgl_elements
    from .cremona.projective import induced_permutation

    rng = random.Random(seed)
    F2 = GF(2)
    pgl = group_closure([induced_permutation(g, F2) for g in pgl3_generators(F2)], 7)
    cases = {
        "PGL3(F2)": [induced_permutation(g, F2) for g in pgl3_generators(F2)],
        "PGL3(F3)": [induced_permutation(g, GF(3)) for g in pgl3_generators(GF(3))],
        "PGL2(F5)": [induced_permutation(g, GF(5)) for g in pgl_elements(GF(5), 2)[:6]],
        "Sym(7)": symmetric_generators(7),
        "Alt(8)": alternating_generators(8),
    }
    for i in range(6):
        n = rng.randint(3, 9)
        gens = []
        for _ in range(rng.randint(1, 3)):
            p = list(range(n))
            rng.shuffle(p)
            gens.append(tuple(p))
        cases[f"random{i}(n={n})"] = gens
    orders = {}
    ok = pgl.order() == 168
    for name, gens in cases.items():
        n = len(gens[0])
        bsgs = group_closure(gens, n)
        naive = naive_closure(gens, n)
        member_ok = all(bsgs.contains(g) for g in itertools.islice(naive, 200))
        orders[name] = {"bsgs": bsgs.order(), "naive": len(naive)}
        ok = ok and bsgs.order() == len(naive) and member_ok
    return ok, {"PGL3(F2) image order": pgl.order(), "cross_checks": orders}


# criterion 10

def check_fixed_point(seed: int = DEFAULT_SEED, graphs: int = 200):
    from .median import fixed_region, random_instance

    rng = random.Random(seed)
    sizes = []
    failures = []
    for i in range(graphs):
        inst = random_instance(rng, rng.randint(2, 10), rng.randint(2, 5), gens=2, cap=512)
        G, A = inst.graph, inst.action
        sizes.append(G.n)
        try:
            report = fixed_region(G, A)
        except AssertionError as exc:
            failures.append({"graph": i, "error": str(exc)})
            continue
        checks = dict(report.trace)
        if not all(checks.values()) or not report.region:
            failures.append({"graph": i, "trace": report.trace})
    detail = {"graphs": graphs, "max_vertices": max(sizes), "mean_vertices": round(sum(sizes) / len(sizes), 2),
              "failures": failures[:3]}
    return not failures, detail


# criterion 11

def check_classification(seed: int = DEFAULT_SEED, samples: int = 50, budget: int = 64):
    rng = random.Random(seed)
    b = translation_b()
    result = classify(b, budget)
    ok = result.kind == "Translation" and verify_translation_witness(b, result.address, result.exponent, result.image)
    detail = {"b": result.to_json() if result.kind == "Translation" else result.kind}
    kinds = {"Elliptic": 0, "Translation": 0, "BudgetExceeded": 0}
    for _ in range(samples):
        g = random_finite_order(rng, 2)
        try:
            kinds[classify(g, budget).kind] += 1
        except BudgetExceeded:
            kinds["BudgetExceeded"] += 1
    detail["finite_order"] = kinds
    return ok and kinds["Elliptic"] == samples, detail


# criterion 12

def check_stabilizers(seed: int = DEFAULT_SEED, samples: int = 100):
    rng = random.Random(seed)
    failures = 0
    for _ in range(samples):
        d = rng.choice((2, 3))
        tree = random_tree(rng, d, rng.randint(0, 3))
        phi = random_element(rng, d, 2)
        x = CubeVertex(tree, phi)
        f = random_forest_automorphism(rng, tree)
        g = compose(compose(phi, f), phi.invert())
        result = stabilizes(g, x)
        if not result or not verify_stabilizer_certificate(x, result.certificate):
            failures += 1
    return failures == 0, {"samples": samples, "failures": failures}


# trees suite (no numbered criterion)

def check_trees(seed: int = DEFAULT_SEED):
    ok = True
    detail = {}
    for d in (2, 3):
        for depth in (1, 2):
            trees = all_trees_up_to_depth(d, depth)
            detail[f"d={d},depth={depth}"] = len(trees)
    for d in (2, 3, 4):
        for k in range(6):
            h = 1 + k * (d - 1)
            t = special_tree(h, d)
            ok = ok and t.leaf_count == h
    detail["fuss_catalan"] = [count_admissible_trees(k + 1, 2) for k in range(6)]
    ok = ok and detail["fuss_catalan"] == [1, 1, 2, 5, 14, 42]
    return ok, detail


CRITERIA = {
    "1": ("neighbor-count law", check_degrees),
    "2": ("descending links are interval complexes", check_descending_links),
    "3a": ("vertex links are flag", check_links_flag),
    "3b": ("vertex links split as join(ascending simplex, descending link)", check_links_join),
    "4": ("interval-complex connectivity", check_interval_connectivity),
    "5": ("cell-orbit bound", check_orbit_census),
    "6": ("parity laws", check_parity_laws),
    "7": ("PGL2 parity census", check_pgl2_census),
    "8": ("Cremona parity at q=4", check_cremona_q4),
    "9": ("permutation closure", check_closure),
    "10": ("fixed-point engine", check_fixed_point),
    "11": ("classification", check_classification),
    "12": ("stabilizer certificates", check_stabilizers),
}

SUITES = {
    "trees": ["trees"],
    "aaut": ["6", "11"],
    "cube": ["1", "2", "3a", "3b", "5", "12"],
    "simplicial": ["4"],
    "median": ["10"],
    "cremona": ["7", "8", "9"],
}
SUITES["all"] = ["trees"] + list(CRITERIA)


def run_criterion(key: str, seed: int = DEFAULT_SEED) -> CriterionResult:
    if key == "trees":
        return _timed("trees", "tree-core sanity", check_trees, seed)
    title, fn = CRITERIA[key]
    return _timed(key, title, fn, seed)


def run_suite(name: str, seed: int = DEFAULT_SEED) -> list:
    if name not in SUITES:
        raise KeyError(name)
    return [run_criterion(k, seed) for k in SUITES[name]]
