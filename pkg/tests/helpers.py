"""Independent brute-force oracles and hypothesis strategies shared by the tests."""

from itertools import product

from hypothesis import strategies as st

from meetimp.catalog import catalog, implicative_catalog
from meetimp.syntax import TOP, And, Box, Imp, Letter, Mon


# ---------------------------------------------------------------- brute-force oracles


def subsets(n):
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


def brute_filters(A):
    """Filters by the definition: non-empty, up-closed, meet-closed."""
    out = []
    for s in subsets(A.size):
        if not s:
            continue
        if any(A.le(x, y) and y not in s for x in s for y in range(A.size)):
            continue
        if any(A.meet(x, y) not in s for x in s for y in s):
            continue
        out.append(s)
    return out


def brute_glb(A, x, y):
    lower = [z for z in range(A.size) if A.le(z, x) and A.le(z, y)]
    greatest = [z for z in lower if all(A.le(w, z) for w in lower)]
    return greatest[0] if len(greatest) == 1 else None


def brute_imp(A, y, z):
    cands = [x for x in range(A.size) if A.le(A.meet(x, y), z)]
    best = [x for x in cands if all(A.le(w, x) for w in cands)]
    return best[0] if best else None


def brute_distributive(A):
    n = range(A.size)
    for a, b, c in product(n, repeat=3):
        if A.le(A.meet(a, b), c):
            if not any(A.meet(a2, b2) == c for a2 in n for b2 in n if A.le(a, a2) and A.le(b, b2)):
                return False
    return True


def is_prime_downset(A, d):
    """Down-closed set where ``a & a2 in d`` forces ``a in d`` or ``a2 in d``."""
    for x in d:
        for y in range(A.size):
            if A.le(y, x) and y not in d:
                return False
    for a, b in product(range(A.size), repeat=2):
        if A.meet(a, b) in d and a not in d and b not in d:
            return False
    return True


def brute_implication_set(A, a, b):
    return frozenset(x for x in range(A.size) if all(y in b for y in range(A.size) if A.le(x, y) and y in a))


# ---------------------------------------------------------------- strategies

NAMES = ("p", "q", "r")


def formulas(names=NAMES, modalities=(), max_leaves=8):
    base = st.sampled_from([TOP] + [Letter(n) for n in names])

    def extend(children):
        options = [
            st.builds(And, children, children),
            st.builds(Imp, children, children),
        ]
        if "box" in modalities:
            options.append(st.builds(Box, children))
        if "mon" in modalities:
            options.append(st.builds(Mon, children))
        return st.one_of(*options)

    return st.recursive(base, extend, max_leaves=max_leaves)


catalog_lattices = st.sampled_from([e.lattice for e in catalog(5)])
implicative_lattices = st.sampled_from([e.lattice for e in implicative_catalog(5)])


# ---------------------------------------------------------------- random derivations


def small_formulas(names=("p", "q")):
    from meetimp.syntax import formulas_up_to_depth

    return formulas_up_to_depth(names, 1)


def random_derivation(rng, context, steps=8, atoms=None):
    """A random checking H-derivation over ``context`` built from ass, ax and mp only."""
    from meetimp import hilbert as H
    from meetimp.syntax import And, Imp

    atoms = list(atoms or small_formulas()) + list(context)
    pool = [H.ass(context, a) for a in context]
    pool.append(H.ax(context, rng.choice(["H1", "H3", "H5", "H6"]), {k: rng.choice(atoms) for k in "pqr"}))
    for _ in range(steps):
        move = rng.randrange(5)
        x = rng.choice(pool)
        c = x.conclusion
        if move == 0:
            axiom = rng.choice(["H1", "H2", "H3", "H4", "H5", "H6"])
            pool.append(H.ax(context, axiom, {k: rng.choice(atoms) for k in "pqr"}))
        elif move == 1:
            h1 = H.ax(context, "H1", {"p": c, "q": rng.choice(atoms)})
            pool.append(H.mp(x, h1))
        elif move == 2:
            y = rng.choice(pool)
            h5 = H.ax(context, "H5", {"p": c, "q": y.conclusion})
            pool.append(H.mp(y, H.mp(x, h5)))
        elif move == 3 and isinstance(c, And):
            axiom = rng.choice(["H3", "H4"])
            pool.append(H.mp(x, H.ax(context, axiom, {"p": c.left, "q": c.right})))
        else:
            majors = [y for y in pool if isinstance(y.conclusion, Imp) and y.conclusion.left == c]
            if majors:
                pool.append(H.mp(x, rng.choice(majors)))
            elif isinstance(c, Imp):
                minors = [y for y in pool if y.conclusion == c.left]
                if minors:
                    pool.append(H.mp(rng.choice(minors), x))
    return max(pool[-3:], key=lambda n: n.size())


def random_eq_derivation(rng, steps=4, atoms=None):
    """A random checking E-derivation seeded from E1-E4 instances and closed under the rules."""
    from meetimp import equational as E

    atoms = list(atoms or small_formulas())
    pick = lambda: rng.choice(atoms)

    def seed():
        k = rng.randrange(4)
        if k == 0:
            return E.e1(pick(), pick(), pick())
        if k == 1:
            return E.e2(pick(), pick())
        if k == 2:
            return E.e3(pick())
        return E.e4(pick())

    pool = [seed() for _ in range(3)]
    for _ in range(steps):
        x = rng.choice(pool)
        move = rng.randrange(7)
        if move == 0:
            pool.append(seed())
        elif move == 1:
            pool.append(E.sym(x))
        elif move == 2:
            y = rng.choice(pool)
            pool.append(E.cong_and(x, y))
        elif move == 3:
            y = rng.choice(pool)
            pool.append(E.cong_imp(x, y))
        elif move == 4:
            ys = [y for y in pool if y.concl.lhs == x.concl.rhs]
            if ys:
                pool.append(E.trans(x, rng.choice(ys)))
            else:
                pool.append(E.trans(x, E.sym(x)))
        elif move == 5:
            pool.append(E.ref(pick()))
        else:
            for rule in (E.res_up, E.res_down):
                try:
                    pool.append(rule(x))
                    break
                except E.InvalidInput:
                    continue
    return pool[-1]


# ---------------------------------------------------------------- Kripke oracle


def brute_sat(m, x, f):
    """Satisfaction at world ``x`` straight from the forcing clauses (no filter arithmetic)."""
    from meetimp.syntax import Top

    fr = m.frame
    A = fr.base.algebra
    if isinstance(f, Top):
        return True
    if isinstance(f, Letter):
        return x in m.value(f.name)
    if isinstance(f, And):
        return brute_sat(m, x, f.left) and brute_sat(m, x, f.right)
    if isinstance(f, Imp):
        return all(brute_sat(m, y, f.right) for y in range(A.size) if A.le(x, y) and brute_sat(m, y, f.left))
    if isinstance(f, Box):
        return all(brute_sat(m, y, f.body) for (x2, y) in fr.R if x2 == x)
    if isinstance(f, Mon):
        truth = frozenset(y for y in range(A.size) if brute_sat(m, y, f.body))
        return truth in fr.nbhd[x]
    raise TypeError(f)


def brute_denotation(m, f):
    return frozenset(x for x in range(m.frame.base.algebra.size) if brute_sat(m, x, f))


def small_frames(kind, max_worlds=3):
    from meetimp.search import enumerate_frames

    return list(enumerate_frames(kind, max_worlds))
