"""Finite spectral spaces as finite posets under specialization.

Convention: leq[x][y] means y lies in the closure of {x} (x specializes to
y), so closed points are maximal, closed sets are up-closed, and opens are
the generization-closed (down-closed) sets.  Every finite poset satisfies the
basis condition for spectral spaces, quotients by connected components are
discrete, and pro-clopen coincides with clopen; the operations below verify
these coincidences rather than assume them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator


@dataclass(frozen=True)
class FinitePoset:
    size: int
    leq: tuple[tuple[bool, ...], ...]  # leq[x][y]: x specializes to y

    def __post_init__(self):
        n = self.size
        matrix = tuple(tuple(bool(v) for v in row) for row in self.leq)
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError("specialization matrix must be n x n")
        object.__setattr__(self, "leq", matrix)
        for x in range(n):
            if not matrix[x][x]:
                raise ValueError("specialization must be reflexive")
        for x in range(n):
            for y in range(n):
                if x != y and matrix[x][y] and matrix[y][x]:
                    raise ValueError("mutually specializing distinct points")
                if matrix[x][y]:
                    for z in range(n):
                        if matrix[y][z] and not matrix[x][z]:
                            raise ValueError("specialization must be transitive")

    @classmethod
    def from_relations(cls, size: int, relations: Iterable[tuple[int, int]]) -> "FinitePoset":
        """Build from generating pairs (x, y) meaning x specializes to y."""
        leq = [[i == j for j in range(size)] for i in range(size)]
        for x, y in relations:
            if not (0 <= x < size and 0 <= y < size):
                raise ValueError(f"relation ({x},{y}) out of range")
            leq[x][y] = True
        changed = True
        while changed:
            changed = False
            for x in range(size):
                for y in range(size):
                    if leq[x][y]:
                        for z in range(size):
                            if leq[y][z] and not leq[x][z]:
                                leq[x][z] = True
                                changed = True
        return cls(size, tuple(tuple(row) for row in leq))

    @classmethod
    def antichain(cls, size: int) -> "FinitePoset":
        return cls.from_relations(size, [])

    @classmethod
    def chain(cls, size: int) -> "FinitePoset":
        return cls.from_relations(size, [(i, i + 1) for i in range(size - 1)])

    def comparable(self, x: int, y: int) -> bool:
        return self.leq[x][y] or self.leq[y][x]

    def is_closed(self, subset: frozenset[int]) -> bool:
        """Closed = stable under specialization (up-closed)."""
        return all(self.leq[x][y] <= (y in subset) for x in subset for y in range(self.size))

    def is_open(self, subset: frozenset[int]) -> bool:
        """Open = stable under generization (down-closed)."""
        return self.is_closed(frozenset(range(self.size)) - subset)

    def is_clopen(self, subset: frozenset[int]) -> bool:
        return self.is_closed(subset) and self.is_open(subset)

    def is_discrete(self) -> bool:
        return all(not self.leq[x][y] for x in range(self.size) for y in range(self.size)
                   if x != y)

    def subsets(self) -> Iterator[frozenset[int]]:
        elements = list(range(self.size))
        for mask in range(1 << self.size):
            yield frozenset(e for e in elements if mask & (1 << e))


@dataclass(frozen=True)
class Pi0:
    """Connected-component data: partition, index map, discrete quotient."""

    components: tuple[frozenset[int], ...]
    component_of: tuple[int, ...]
    quotient: FinitePoset

    @property
    def count(self) -> int:
        return len(self.components)


def pi0(space: FinitePoset) -> Pi0:
    """Connected components of the comparability graph; discrete quotient."""
    n = space.size
    label = [-1] * n
    components: list[list[int]] = []
    for start in range(n):
        if label[start] != -1:
            continue
        index = len(components)
        stack = [start]
        label[start] = index
        bucket = [start]
        while stack:
            x = stack.pop()
            for y in range(n):
                if label[y] == -1 and space.comparable(x, y):
                    label[y] = index
                    stack.append(y)
                    bucket.append(y)
        components.append(bucket)
    quotient = FinitePoset.antichain(len(components))
    return Pi0(
        components=tuple(frozenset(b) for b in components),
        component_of=tuple(label),
        quotient=quotient,
    )


def clopen_sets(space: FinitePoset) -> list[frozenset[int]]:
    """All clopen subsets = unions of connected components (2^|pi0| of them)."""
    parts = pi0(space).components
    out = []
    for mask in range(1 << len(parts)):
        subset: frozenset[int] = frozenset()
        for i, part in enumerate(parts):
            if mask & (1 << i):
                subset |= part
        out.append(subset)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def pro_clopen_check(space: FinitePoset, subset: frozenset[int]) -> bool:
    """Closed and a union of components; verified to coincide with clopen."""
    subset = frozenset(subset)
    parts = pi0(space).components
    union_of_components = all(
        part <= subset or not (part & subset) for part in parts
    )
    verdict = space.is_closed(subset) and union_of_components
    if verdict != space.is_clopen(subset):
        raise AssertionError(
            "pro-clopen and clopen disagree on a finite space; impossible")
    return verdict


def lemma_b2_verify(space: FinitePoset) -> bool:
    """Brute-force the three inclusion-preserving bijections along p^{-1}.

    closed subsets of pi0 <-> pro-clopen subsets, singletons <-> minimal
    nonempty pro-clopen subsets, clopen <-> clopen; with inverse given by the
    image under p.
    """
    data = pi0(space)
    quotient = data.quotient
    parts = data.components

    def preimage(sub_q: frozenset[int]) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for i in sub_q:
            out |= parts[i]
        return out

    def image(sub_x: frozenset[int]) -> frozenset[int]:
        return frozenset(data.component_of[x] for x in sub_x)

    pro_clopens = {s for s in space.subsets() if pro_clopen_check(space, s)}
    closed_q = {s for s in quotient.subsets() if quotient.is_closed(s)}
    mapped = {preimage(s) for s in closed_q}
    if mapped != pro_clopens or len(mapped) != len(closed_q):
        return False
    if any(image(preimage(s)) != s for s in closed_q):
        return False

    minimal = {s for s in pro_clopens if s
               and not any(t and t < s for t in pro_clopens)}
    singletons = {frozenset([i]) for i in range(quotient.size)}
    if {preimage(s) for s in singletons} != minimal:
        return False

    clopens_x = {s for s in space.subsets() if space.is_clopen(s)}
    clopens_q = {s for s in quotient.subsets() if quotient.is_clopen(s)}
    if {preimage(s) for s in clopens_q} != clopens_x:
        return False
    if any(image(preimage(s)) != s for s in clopens_q):
        return False
    return True


@dataclass(frozen=True)
class MonotoneMap:
    """Specialization-preserving map; continuity is checked on construction."""

    source: FinitePoset
    target: FinitePoset
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if len(mapping) != self.source.size:
            raise ValueError("mapping must cover the source")
        if any(not (0 <= v < self.target.size) for v in mapping):
            raise ValueError("mapping value out of range")
        object.__setattr__(self, "mapping", mapping)
        for x in range(self.source.size):
            for y in range(self.source.size):
                if self.source.leq[x][y] and not self.target.leq[mapping[x]][mapping[y]]:
                    raise ValueError("map does not preserve specialization")
        # continuity = openness of preimages, equivalent to monotonicity here;
        # verified directly so the equivalence is exercised, not assumed
        for open_t in self.target.subsets():
            if self.target.is_open(open_t) and not self.source.is_open(self.preimage(open_t)):
                raise AssertionError("monotone map with a non-open preimage; impossible")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def preimage(self, subset: frozenset[int]) -> frozenset[int]:
        return frozenset(x for x in range(self.source.size) if self.mapping[x] in subset)


def compose(second: MonotoneMap, first: MonotoneMap) -> MonotoneMap:
    if first.target is not second.source and first.target != second.source:
        raise ValueError("maps are not composable")
    return MonotoneMap(first.source, second.target,
                       tuple(second.mapping[v] for v in first.mapping))


def pi0_map(f: MonotoneMap) -> tuple[Pi0, Pi0, tuple[int, ...]]:
    """Induced map on connected components."""
    src, tgt = pi0(f.source), pi0(f.target)
    induced = [0] * src.count
    for i, part in enumerate(src.components):
        representative = next(iter(part))
        induced[i] = tgt.component_of[f.mapping[representative]]
    return src, tgt, tuple(induced)


@dataclass(frozen=True)
class PropB3Report:
    clopen_bijection: bool
    pi0_bijective: bool
    pi0_homeomorphism: bool

    @property
    def all_equivalent(self) -> bool:
        return self.clopen_bijection == self.pi0_bijective == self.pi0_homeomorphism

    def __iter__(self):
        return iter((self.clopen_bijection, self.pi0_bijective, self.pi0_homeomorphism))


def prop_b3_check(f: MonotoneMap) -> PropB3Report:
    """Evaluate the three conditions independently and report them."""
    clopens_y = clopen_sets(f.target)
    preimages = [f.preimage(s) for s in clopens_y]
    clopens_x = set(clopen_sets(f.source))
    clopen_bijection = (
        all(s in clopens_x for s in preimages)
        and len(set(preimages)) == len(clopens_y)
        and set(preimages) == clopens_x
    )
    src, tgt, induced = pi0_map(f)
    bijective = len(set(induced)) == src.count and src.count == tgt.count
    homeomorphism = _is_homeomorphism(src.quotient, tgt.quotient, induced)
    return PropB3Report(clopen_bijection, bijective, homeomorphism)


def _is_homeomorphism(source: FinitePoset, target: FinitePoset,
                      mapping: tuple[int, ...]) -> bool:
    if len(set(mapping)) != source.size or source.size != target.size:
        return False
    inverse = [0] * target.size
    for x, y in enumerate(mapping):
        inverse[y] = x
    forward_continuous = all(
        source.is_open(frozenset(x for x in range(source.size)
                                 if mapping[x] in subset))
        for subset in target.subsets() if target.is_open(subset)
    )
    backward_continuous = all(
        target.is_open(frozenset(y for y in range(target.size)
                                 if inverse[y] in subset))
        for subset in source.subsets() if source.is_open(subset)
    )
    return forward_continuous and backward_continuous


def homeo_criterion(f: MonotoneMap) -> bool:
    """For maps of discrete spaces: clopen bijectivity, compared against a
    direct homeomorphism test (the finite stand-in for the pro-finite case)."""
    if not f.source.is_discrete() or not f.target.is_discrete():
        raise ValueError("criterion applies to discrete spaces only")
    report = prop_b3_check(f)
    direct = _is_homeomorphism(f.source, f.target, f.mapping)
    if report.clopen_bijection != direct:
        raise AssertionError("clopen criterion disagrees with homeomorphism test")
    return report.clopen_bijection


# ---------------------------------------------------------------------------
# Exhaustive generators (used by the verification suites)
# ---------------------------------------------------------------------------


def all_posets(size: int) -> Iterator[FinitePoset]:
    """All posets on `size` labeled points, up to isomorphism and beyond.

    Enumerates exactly the posets whose labeling is a linear extension
    (relation matrix upper triangular); every isomorphism class appears.
    """
    if size == 0:
        yield FinitePoset(0, ())
        return
    pairs = [(i, j) for i in range(size) for j in range(i + 1, size)]
    for mask in range(1 << len(pairs)):
        chosen = [pairs[b] for b in range(len(pairs)) if mask & (1 << b)]
        closure = [[i == j for j in range(size)] for i in range(size)]
        for i, j in chosen:
            closure[i][j] = True
        transitive = True
        for i, j in pairs:
            if closure[i][j]:
                continue
            # transitivity may force (i, j); the subset is then not closed
            if any(closure[i][l] and closure[l][j] for l in range(size)):
                transitive = False
                break
        if transitive:
            yield FinitePoset(size, tuple(tuple(row) for row in closure))


def all_monotone_maps(source: FinitePoset, target: FinitePoset) -> Iterator[MonotoneMap]:
    if source.size == 0:
        yield MonotoneMap(source, target, ())
        return
    for values in product(range(target.size), repeat=source.size):
        ok = all(
            target.leq[values[x]][values[y]]
            for x in range(source.size)
            for y in range(source.size)
            if source.leq[x][y]
        )
        if ok:
            yield MonotoneMap(source, target, values)
