"""
2CSP instances, brute-force values, and the randomized 3SAT -> 2CSP reduction.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

from config import make_rng
from errors import NotSatisfying
from gf2codes import check_budget

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
LabelPair = Tuple[int, int]


@dataclass(frozen=True)
class Csp2Instance:
    """Binary CSP on a directed constraint graph.

    Attributes:
        num_vertices: |V|, vertices are 0..|V|-1.
        alphabet_size: |Σ|, labels are 0..|Σ|-1.
        edges: Ordered vertex pairs, no duplicates.
        constraints: Allowed (label_u, label_v) pairs, parallel to `edges`.
    """

    num_vertices: int
    alphabet_size: int
    edges: Tuple[Edge, ...]
    constraints: Tuple[FrozenSet[LabelPair], ...]

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("a 2CSP needs at least one vertex")
        if self.alphabet_size < 1:
            raise ValueError("alphabet must be nonempty")
        if len(self.edges) != len(self.constraints):
            raise ValueError("one constraint set per edge is required")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        for (u, v), allowed in zip(self.edges, self.constraints):
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices) or u == v:
                raise ValueError(f"invalid edge ({u}, {v})")
            for a, b in allowed:
                if not (0 <= a < self.alphabet_size and 0 <= b < self.alphabet_size):
                    raise ValueError(f"label pair ({a}, {b}) outside the alphabet on edge ({u}, {v})")

    @classmethod
    def create(cls, num_vertices: int, alphabet_size: int,
               constraints: Dict[Edge, Sequence[LabelPair]]) -> "Csp2Instance":
        edges = tuple(constraints)
        return cls(num_vertices, alphabet_size, edges,
                   tuple(frozenset(tuple(p) for p in constraints[e]) for e in edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def satisfies_edge(self, index: int, psi: Sequence[int]) -> bool:
        u, v = self.edges[index]
        return (psi[u], psi[v]) in self.constraints[index]

    def satisfied_count(self, psi: Sequence[int]) -> int:
        return sum(1 for i in range(self.num_edges) if self.satisfies_edge(i, psi))

    def value_of(self, psi: Sequence[int]) -> Fraction:
        """Fraction of satisfied edges under psi (1 when there are no edges)."""
        if len(psi) != self.num_vertices:
            raise ValueError("assignment length does not match the vertex count")
        if not self.edges:
            return Fraction(1)
        return Fraction(self.satisfied_count(psi), self.num_edges)

    def first_violated_edge(self, psi: Sequence[int]) -> Optional[Edge]:
        for i, edge in enumerate(self.edges):
            if not self.satisfies_edge(i, psi):
                return edge
        return None


def best_assignment(gamma: Csp2Instance, budget: Optional[int] = None) -> Tuple[Tuple[int, ...], Fraction]:
    """Brute-force optimum; ties go to the first assignment in product order."""
    check_budget("2CSP assignment scan", gamma.alphabet_size ** gamma.num_vertices, budget)
    best_psi = (0,) * gamma.num_vertices
    best = -1
    for psi in product(range(gamma.alphabet_size), repeat=gamma.num_vertices):
        count = gamma.satisfied_count(psi)
        if count > best:
            best, best_psi = count, psi
            if count == gamma.num_edges:
                break
    return best_psi, gamma.value_of(best_psi)


def csp_value(gamma: Csp2Instance, budget: Optional[int] = None) -> Fraction:
    """val(Γ): the exact maximum fraction of satisfied edges."""
    return best_assignment(gamma, budget)[1]


def random_csp(num_vertices: int, alphabet_size: int, num_edges: int, density: float,
               seed=None, planted: Optional[Sequence[int]] = None) -> Csp2Instance:
    """Random 2CSP on distinct ordered pairs; each label pair is allowed with probability `density`.

    When `planted` is given every edge also allows the planted pair, so the instance is satisfiable.
    """
    rng = make_rng(seed)
    pairs = [(u, v) for u in range(num_vertices) for v in range(num_vertices) if u != v]
    if num_edges > len(pairs):
        raise ValueError(f"at most {len(pairs)} edges on {num_vertices} vertices")
    chosen = sorted(rng.choice(len(pairs), size=num_edges, replace=False).tolist())
    constraints = {}
    for idx in chosen:
        u, v = pairs[idx]
        allowed = {(a, b) for a in range(alphabet_size) for b in range(alphabet_size)
                   if rng.random() < density}
        if planted is not None:
            allowed.add((planted[u], planted[v]))
        constraints[(u, v)] = allowed
    return Csp2Instance.create(num_vertices, alphabet_size, constraints)


# ---------------------------------------------------------------------------
# 3CNF formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cnf3Formula:
    """CNF with at most three literals per clause (DIMACS signed literals)."""

    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("variable count must be non-negative")
        for clause in self.clauses:
            if not 1 <= len(clause) <= 3:
                raise ValueError(f"clause {clause} must have 1 to 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} references an undeclared variable")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def occurrences(self) -> Counter:
        return Counter(v for clause in self.clauses for v in {abs(lit) for lit in clause})

    @property
    def max_occurrence(self) -> int:
        """Δ: the largest number of clauses any variable appears in."""
        occ = self.occurrences
        return max(occ.values()) if occ else 0

    def clause_variables(self, index: int) -> Tuple[int, ...]:
        return tuple(sorted({abs(lit) for lit in self.clauses[index]}))

    @staticmethod
    def clause_satisfied(clause: Sequence[int], values: Dict[int, bool]) -> bool:
        return any(values[abs(lit)] == (lit > 0) for lit in clause)

    def satisfied_fraction(self, assignment: Sequence[bool]) -> Fraction:
        """Fraction of satisfied clauses; assignment[i] is the value of variable i+1."""
        if len(assignment) != self.num_vars:
            raise ValueError("assignment length does not match the variable count")
        if not self.clauses:
            return Fraction(1)
        values = {i + 1: bool(b) for i, b in enumerate(assignment)}
        good = sum(1 for c in self.clauses if self.clause_satisfied(c, values))
        return Fraction(good, self.num_clauses)

    def max_satisfied_fraction(self, budget: Optional[int] = None) -> Fraction:
        check_budget("3SAT assignment scan", 2 ** self.num_vars, budget)
        best = Fraction(0)
        for assignment in product((False, True), repeat=self.num_vars):
            best = max(best, self.satisfied_fraction(assignment))
            if best == 1:
                break
        return best

    def pad_to_multiple(self, k: int) -> "Cnf3Formula":
        """Append tautologies (z or not z) on one fresh variable until k divides the clause count."""
        missing = -self.num_clauses % k
        if not missing:
            return self
        fresh = self.num_vars + 1
        logger.debug("Padding %d clauses with %d tautologies", self.num_clauses, missing)
        return Cnf3Formula(fresh, self.clauses + ((fresh, -fresh),) * missing)


def random_cnf(num_vars: int, num_clauses: int, seed=None, max_occurrence: Optional[int] = None,
               planted: Optional[Sequence[bool]] = None) -> Cnf3Formula:
    """Random 3CNF; clauses are resampled until the planted assignment satisfies them."""
    rng = make_rng(seed)
    occ = Counter()
    clauses = []
    attempts = 0
    while len(clauses) < num_clauses:
        attempts += 1
        if attempts > 1000 * num_clauses:
            raise ValueError("could not sample a formula with the requested occurrence bound")
        pool = [v for v in range(1, num_vars + 1)
                if max_occurrence is None or occ[v] < max_occurrence]
        if len(pool) < min(3, num_vars):
            raise ValueError("occurrence bound too tight for the clause count")
        width = min(3, len(pool))
        variables = rng.choice(pool, size=width, replace=False).tolist()
        clause = tuple(int(v) if rng.random() < 0.5 else -int(v) for v in variables)
        if planted is not None:
            values = {i + 1: bool(b) for i, b in enumerate(planted)}
            if not Cnf3Formula.clause_satisfied(clause, values):
                continue
        clauses.append(clause)
        occ.update(abs(lit) for lit in clause)
    return Cnf3Formula(num_vars, tuple(clauses))


# ---------------------------------------------------------------------------
# 3SAT -> 2CSP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CnfPartition:
    """Random clause partition with each part's satisfying partial assignments.

    Attributes:
        formula: The (padded) formula that was partitioned.
        parts: Clause indices per part.
        part_vars: Sorted variables touched by each part.
        alphabets: Satisfying partial assignments per part, as value tuples over `part_vars`.
    """

    formula: Cnf3Formula
    parts: Tuple[Tuple[int, ...], ...]
    part_vars: Tuple[Tuple[int, ...], ...]
    alphabets: Tuple[Tuple[Tuple[bool, ...], ...], ...]

    @property
    def k(self) -> int:
        return len(self.parts)

    def pairwise_overlaps(self) -> Dict[Edge, int]:
        sets = [set(v) for v in self.part_vars]
        return {(i, j): len(sets[i] & sets[j])
                for i in range(self.k) for j in range(i + 1, self.k)}


def _satisfying_partial_assignments(formula: Cnf3Formula, clause_ids: Sequence[int],
                                    variables: Sequence[int]) -> Tuple[Tuple[bool, ...], ...]:
    found = []
    for values in product((False, True), repeat=len(variables)):
        lookup = dict(zip(variables, values))
        if all(Cnf3Formula.clause_satisfied(formula.clauses[c], lookup) for c in clause_ids):
            found.append(values)
    return tuple(found)


def build_partition(phi: Cnf3Formula, k: int, seed=None) -> CnfPartition:
    """Pad φ, then split its clauses into k equal random parts."""
    if k < 2:
        raise ValueError("the partition needs at least two parts")
    padded = phi.pad_to_multiple(k)
    size = padded.num_clauses // k
    if size == 0:
        raise ValueError("fewer clauses than parts")
    rng = make_rng(seed)
    order = rng.permutation(padded.num_clauses).tolist()
    parts, part_vars, alphabets = [], [], []
    for i in range(k):
        clause_ids = tuple(sorted(order[i * size:(i + 1) * size]))
        variables = tuple(sorted({v for c in clause_ids for v in padded.clause_variables(c)}))
        check_budget("partial assignments of a part", 2 ** len(variables))
        parts.append(clause_ids)
        part_vars.append(variables)
        alphabets.append(_satisfying_partial_assignments(padded, clause_ids, variables))
    logger.debug("Partition into %d parts of %d clauses, alphabet sizes %s",
                 k, size, [len(a) for a in alphabets])
    return CnfPartition(padded, tuple(parts), tuple(part_vars), tuple(alphabets))


def csp_from_partition(partition: CnfPartition) -> Csp2Instance:
    """Complete constraint graph on the parts; labels agree on shared variables.

    Parts with fewer satisfying assignments are padded with sink labels that
    appear in no constraint.
    """
    k = partition.k
    alphabet_size = max(1, max(len(a) for a in partition.alphabets))
    constraints = {}
    for i in range(k):
        for j in range(i + 1, k):
            shared = sorted(set(partition.part_vars[i]) & set(partition.part_vars[j]))
            pos_i = [partition.part_vars[i].index(v) for v in shared]
            pos_j = [partition.part_vars[j].index(v) for v in shared]
            allowed = set()
            for a, left in enumerate(partition.alphabets[i]):
                key = tuple(left[p] for p in pos_i)
                for b, right in enumerate(partition.alphabets[j]):
                    if key == tuple(right[p] for p in pos_j):
                        allowed.add((a, b))
            constraints[(i, j)] = allowed
    return Csp2Instance.create(k, alphabet_size, constraints)


def threesat_to_2csp(phi: Cnf3Formula, k: int, seed=None) -> Csp2Instance:
    """Randomized 3SAT -> 2CSP on k vertices (one per clause part)."""
    gamma = csp_from_partition(build_partition(phi, k, seed))
    logger.info("3SAT(n=%d, m=%d, Δ=%d) -> 2CSP(|V|=%d, |Σ|=%d)", phi.num_vars,
                phi.num_clauses, phi.max_occurrence, gamma.num_vertices, gamma.alphabet_size)
    return gamma


def lift_satisfying_assignment(partition: CnfPartition, assignment: Sequence[bool]) -> Tuple[int, ...]:
    """Map a satisfying assignment of the original formula to a value-1 labelling.

    Raises:
        NotSatisfying: If the restriction to some part violates one of its clauses.
    """
    values = [bool(b) for b in assignment]
    # padding variable, if any, is free
    values += [False] * (partition.formula.num_vars - len(values))
    labels = []
    for i, variables in enumerate(partition.part_vars):
        restriction = tuple(values[v - 1] for v in variables)
        try:
            labels.append(partition.alphabets[i].index(restriction))
        except ValueError:
            raise NotSatisfying(("part", i)) from None
    return tuple(labels)


def partition_overlap_check(phi: Cnf3Formula, parts: Sequence[Sequence[int]], k: int,
                            bound: Optional[Fraction] = None) -> bool:
    """True iff every pair of parts shares fewer variables than the bound.

    The default bound is 1000 n Δ^3 / k^2.
    """
    if len(parts) != k:
        raise ValueError(f"expected {k} parts, got {len(parts)}")
    flat = sorted(c for part in parts for c in part)
    if flat != list(range(phi.num_clauses)) or len({len(p) for p in parts}) != 1:
        raise ValueError("parts must split the clauses into equal pieces")
    if bound is None:
        bound = Fraction(1000 * phi.num_vars * phi.max_occurrence ** 3, k * k)
    variables = [{v for c in part for v in phi.clause_variables(c)} for part in parts]
    for i in range(k):
        for j in range(i + 1, k):
            if len(variables[i] & variables[j]) >= bound:
                return False
    return True
