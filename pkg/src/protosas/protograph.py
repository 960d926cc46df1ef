"""Protograph base matrices, the constrained design search space, lifting to
finite parity-check matrices, and the text/alist file formats.

Base matrices are laid out checks x variables: ``entries[i, j]`` is the
number of parallel edges between check node i and variable node j.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse


class ProtographError(ValueError):
    pass


class ParseError(ProtographError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class BaseMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or arr.size == 0:
            raise ProtographError("base matrix must be a non-empty 2-D array")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n_checks(self) -> int:
        return self.entries.shape[0]

    @property
    def n_vars(self) -> int:
        return self.entries.shape[1]

    @property
    def var_degrees(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    @property
    def check_degrees(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    @property
    def n_edges(self) -> int:
        return int(self.entries.sum())

    def edge_classes(self) -> list[tuple[int, int]]:
        """(check, var) pairs with at least one edge, row-major."""
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.entries))]

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "BaseMatrix":
        return BaseMatrix(self.entries[np.ix_(list(row_perm), list(col_perm))])

    def __eq__(self, other):
        return isinstance(other, BaseMatrix) and self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"BaseMatrix([{rows}])"


@dataclass(frozen=True)
class PunctureMask:
    flags: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "flags", tuple(bool(f) for f in self.flags))

    @classmethod
    def none(cls, n_vars: int) -> "PunctureMask":
        return cls((False,) * n_vars)

    @classmethod
    def from_indices(cls, n_vars: int, indices: Iterable[int]) -> "PunctureMask":
        idx = set(int(i) for i in indices)
        if any(i < 0 or i >= n_vars for i in idx):
            raise ProtographError(f"puncture index out of range for {n_vars} variables")
        return cls(tuple(j in idx for j in range(n_vars)))

    @classmethod
    def highest_degree(cls, base: BaseMatrix) -> "PunctureMask":
        """Puncture the single highest-degree VN (lowest index on ties)."""
        return cls.from_indices(base.n_vars, [int(np.argmax(base.var_degrees))])

    @property
    def indices(self) -> list[int]:
        return [j for j, f in enumerate(self.flags) if f]

    @property
    def n_transmitted(self) -> int:
        return sum(1 for f in self.flags if not f)

    def as_array(self) -> np.ndarray:
        return np.array(self.flags, dtype=bool)

    def permuted(self, col_perm: Sequence[int]) -> "PunctureMask":
        return PunctureMask(tuple(self.flags[j] for j in col_perm))


AR4JA = BaseMatrix([[1, 2, 0, 0, 0], [0, 3, 1, 1, 1], [0, 1, 2, 2, 1]])
DESIGNED = BaseMatrix(
    [
        [1, 0, 2, 1, 0, 0, 0],
        [0, 1, 2, 2, 0, 1, 2],
        [0, 1, 1, 1, 1, 2, 1],
        [0, 0, 2, 0, 2, 0, 0],
    ]
)
REGULAR_36 = BaseMatrix([[3, 3]])
REGULAR_48 = BaseMatrix([[4, 4]])


def ar4ja() -> tuple[BaseMatrix, PunctureMask]:
    return AR4JA, PunctureMask.highest_degree(AR4JA)


def designed() -> tuple[BaseMatrix, PunctureMask]:
    return DESIGNED, PunctureMask.highest_degree(DESIGNED)


def validate_base(base: BaseMatrix | np.ndarray) -> list[str]:
    """Every violated invariant as a message; an empty list means valid."""
    arr = np.asarray(base.entries if isinstance(base, BaseMatrix) else base)
    problems = []
    if arr.ndim != 2 or arr.size == 0:
        return ["base matrix must be a non-empty 2-D array"]
    for i, j in zip(*np.nonzero(arr < 0)):
        problems.append(f"negative multiplicity at ({i}, {j})")
    for i, s in enumerate(arr.sum(axis=1)):
        if s < 2:
            problems.append(f"degenerate check {i}: degree {s} < 2")
    for j, s in enumerate(arr.sum(axis=0)):
        if s < 1:
            problems.append(f"disconnected variable {j}")
    return problems


def design_rate(base: BaseMatrix, punctures: PunctureMask | None = None) -> Fraction:
    """(n_vars - n_checks) / transmitted VNs."""
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    if len(punctures.flags) != base.n_vars:
        raise ProtographError("puncture mask length does not match the base matrix")
    num = base.n_vars - base.n_checks
    if num <= 0:
        raise ProtographError(f"no information bits: {base.n_vars} variables, {base.n_checks} checks")
    if punctures.n_transmitted == 0:
        raise ProtographError("every variable node is punctured")
    rate = Fraction(num, punctures.n_transmitted)
    if rate >= 1:
        raise ProtographError(f"design rate {rate} is not below 1")
    return rate


# --------------------------------------------------------------------------
# design search space


@dataclass(frozen=True)
class SearchConstraints:
    """Constraints on candidate base matrices.

    The defaults follow the rate-1/2, 4x7 design: entries in {0,1,2}, every
    column except column 0 has sum in [2, 7], and rows 1 and 2 each need an
    edge to column 1 or column 5 (all indices 0-based).
    """

    entry_domain: tuple[int, ...] = (0, 1, 2)
    column_sum_bounds: tuple[int, int] = (2, 7)
    exempt_column: int | None = 0
    coverage_pairs: tuple[tuple[int, tuple[int, int]], ...] = ((1, (1, 5)), (2, (1, 5)))

    def __post_init__(self):
        lo, hi = self.column_sum_bounds
        if lo > hi:
            raise ProtographError("empty column-sum range")
        if not self.entry_domain:
            raise ProtographError("empty entry domain")

    def check_dims(self, n_checks: int, n_vars: int):
        if self.exempt_column is not None and not 0 <= self.exempt_column < n_vars:
            raise ProtographError("exempt column out of range")
        for row, (a, b) in self.coverage_pairs:
            if not (0 <= row < n_checks and 0 <= a < n_vars and 0 <= b < n_vars):
                raise ProtographError(f"coverage requirement {(row, (a, b))} out of range")

    def admits(self, entries: np.ndarray) -> bool:
        entries = np.asarray(entries)
        if not np.all(np.isin(entries, self.entry_domain)):
            return False
        lo, hi = self.column_sum_bounds
        sums = entries.sum(axis=0)
        for j, s in enumerate(sums):
            if j != self.exempt_column and not lo <= s <= hi:
                return False
        return all(entries[row, a] + entries[row, b] >= 1 for row, (a, b) in self.coverage_pairs)


def enumerate_search_space(template, constraints: SearchConstraints) -> Iterator[BaseMatrix]:
    """Yield every base matrix matching ``template`` that satisfies ``constraints``.

    ``template`` is a shape ``(n_checks, n_vars)`` or an integer array in which
    negative entries are free and non-negative entries are fixed.  Output order
    is lexicographic in the column-major flattening.
    """
    if isinstance(template, BaseMatrix):
        tmpl = np.array(template.entries)
    elif isinstance(template, tuple) and len(template) == 2 and all(isinstance(d, int) for d in template):
        tmpl = -np.ones(template, dtype=np.int64)
    else:
        tmpl = np.asarray(template, dtype=np.int64)
    n_checks, n_vars = tmpl.shape
    constraints.check_dims(n_checks, n_vars)
    domain = sorted(set(constraints.entry_domain))
    lo, hi = constraints.column_sum_bounds

    columns = []
    for j in range(n_vars):
        choices = [domain if v < 0 else [int(v)] for v in tmpl[:, j]]
        cands = []
        for col in itertools.product(*choices):
            if any(c not in domain for c in col):
                continue
            if j != constraints.exempt_column and not lo <= sum(col) <= hi:
                continue
            cands.append(col)
        if not cands:
            return
        columns.append(cands)

    cover = constraints.coverage_pairs
    for combo in itertools.product(*columns):
        if all(combo[a][row] + combo[b][row] >= 1 for row, (a, b) in cover):
            yield BaseMatrix(np.array(combo, dtype=np.int64).T)


# --------------------------------------------------------------------------
# lifted codes


@dataclass(frozen=True, eq=False)
class LiftedCode:
    h: sparse.csr_matrix = field(repr=False)
    lift_factor: int = 1
    punctured_bits: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    base: BaseMatrix | None = None

    def __post_init__(self):
        h = sparse.csr_matrix(self.h, dtype=np.uint8)
        h.sum_duplicates()
        h.sort_indices()
        object.__setattr__(self, "h", h)
        pb = np.unique(np.asarray(self.punctured_bits, dtype=np.int64))
        if pb.size and (pb[0] < 0 or pb[-1] >= h.shape[1]):
            raise ProtographError("punctured bit index out of range")
        object.__setattr__(self, "punctured_bits", pb)

    @classmethod
    def from_dense(cls, h, punctured_bits=(), lift_factor: int = 1) -> "LiftedCode":
        return cls(sparse.csr_matrix(np.asarray(h, dtype=np.uint8)), lift_factor, np.asarray(punctured_bits, dtype=np.int64))

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def n_transmitted(self) -> int:
        return self.n - self.punctured_bits.size

    @property
    def transmitted_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.punctured_bits] = False
        return mask

    @property
    def design_rate(self) -> float:
        return (self.n - self.m) / self.n_transmitted

    def column_weights(self) -> np.ndarray:
        return np.asarray(self.h.sum(axis=0)).ravel()

    def row_weights(self) -> np.ndarray:
        return np.diff(self.h.indptr)

    def row_lists(self) -> list[np.ndarray]:
        return [self.h.indices[self.h.indptr[r] : self.h.indptr[r + 1]] for r in range(self.m)]

    def col_lists(self) -> list[np.ndarray]:
        hc = self.h.tocsc()
        hc.sort_indices()
        return [hc.indices[hc.indptr[c] : hc.indptr[c + 1]] for c in range(self.n)]

    def syndrome(self, bits) -> np.ndarray:
        return (self.h @ np.asarray(bits, dtype=np.int64)) % 2

    def __eq__(self, other):
        if not isinstance(other, LiftedCode) or self.h.shape != other.h.shape:
            return False
        return (
            (self.h != other.h).nnz == 0
            and self.lift_factor == other.lift_factor
            and np.array_equal(self.punctured_bits, other.punctured_bits)
        )

    __hash__ = None


def valid_lift_factors(base: BaseMatrix, near: int, count: int = 3) -> list[int]:
    f1 = _first_stage_factor(base)
    lo = max(f1, (near // f1) * f1)
    cands = sorted({lo, lo + f1, max(f1, lo - f1)}, key=lambda f: (abs(f - near), f))
    return cands[:count]


def lift_factor_for_length(base: BaseMatrix, punctures: PunctureMask, n_transmitted: int) -> int:
    """Lift factor giving ``n_transmitted`` transmitted bits; rejects lengths that
    are not reachable and names the nearest reachable ones."""
    t = punctures.n_transmitted
    f1 = _first_stage_factor(base)
    if n_transmitted % t == 0 and (n_transmitted // t) % f1 == 0:
        return n_transmitted // t
    near = valid_lift_factors(base, round(n_transmitted / t))
    raise ProtographError(
        f"transmitted length {n_transmitted} is not reachable; nearest valid lengths: {', '.join(str(f * t) for f in near)}"
    )


def _first_stage_factor(base: BaseMatrix) -> int:
    top = max(2, int(base.entries.max()))
    return max(4, 1 << (top - 1).bit_length())


def lift(base: BaseMatrix, factor: int, seed: int = 0, punctures: PunctureMask | None = None) -> LiftedCode:
    """Two-stage copy-and-permute lifting.

    Stage one is a PEG-placed permutation lift by a small factor f1 that splits
    parallel edges; stage two lifts the resulting binary matrix by circulants of
    size factor / f1 with shifts chosen greedily to avoid short cycles.
    """
    problems = validate_base(base)
    if problems:
        raise ProtographError("invalid base matrix: " + "; ".join(problems))
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    f1 = _first_stage_factor(base)
    if factor < 2 or factor % f1 != 0:
        raise ProtographError(
            f"lift factor {factor} must be a positive multiple of {f1}; nearest valid: "
            + ", ".join(str(f) for f in valid_lift_factors(base, factor))
        )
    f2 = factor // f1
    rng = np.random.default_rng(seed)
    h1 = _peg_stage(base, f1, rng)
    shifts = _circulant_shifts(h1, f2, rng)

    rows, cols = [], []
    t = np.arange(f2)
    for (r, c), s in shifts.items():
        rows.append(r * f2 + t)
        cols.append(c * f2 + (t + s) % f2)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    m, n = base.n_checks * factor, base.n_vars * factor
    h = sparse.csr_matrix((np.ones(rows.size, dtype=np.uint8), (rows, cols)), shape=(m, n))
    punctured = np.concatenate([np.arange(j * factor, (j + 1) * factor) for j in punctures.indices] or [np.zeros(0, np.int64)])
    return LiftedCode(h, factor, punctured, base)


def _peg_stage(base: BaseMatrix, f1: int, rng: np.random.Generator, attempts: int = 200) -> np.ndarray:
    """Binary (n_checks*f1) x (n_vars*f1) matrix whose (i, j) block is
    b_ij-regular, placed by progressive edge growth."""
    b = base.entries
    n_checks, n_vars = b.shape
    order = sorted(range(n_vars), key=lambda j: (b[:, j].sum(), j))
    for _ in range(attempts):
        h = _peg_attempt(b, f1, order, rng)
        if h is not None:
            return h
    # deterministic fallback: b_ij distinct cyclic shifts per block
    h = np.zeros((n_checks * f1, n_vars * f1), dtype=np.uint8)
    for i, j in zip(*np.nonzero(b)):
        for s in range(b[i, j]):
            for a in range(f1):
                h[i * f1 + (a + s) % f1, j * f1 + a] = 1
    return h


def _peg_attempt(b, f1, order, rng):
    n_checks, n_vars = b.shape
    n_cn = n_checks * f1
    cap = np.repeat(b[:, :, None], f1, axis=2)  # remaining edges per (check, var, check copy)
    adj_v = [set() for _ in range(n_vars * f1)]
    adj_c = [set() for _ in range(n_cn)]
    for a in range(f1):
        for j in order:
            v = j * f1 + a
            for i in np.nonzero(b[:, j])[0]:
                for _ in range(b[i, j]):
                    cands = [i * f1 + c for c in range(f1) if cap[i, j, c] > 0 and (i * f1 + c) not in adj_v[v]]
                    if not cands:
                        return None
                    dist = _cn_distances(v, adj_v, adj_c, n_cn)
                    far = max(dist[c] for c in cands)
                    cands = [c for c in cands if dist[c] == far]
                    low = min(len(adj_c[c]) for c in cands)
                    cands = [c for c in cands if len(adj_c[c]) == low]
                    c = cands[int(rng.integers(len(cands)))]
                    adj_v[v].add(c)
                    adj_c[c].add(v)
                    cap[i, j, c - i * f1] -= 1
    h = np.zeros((n_cn, n_vars * f1), dtype=np.uint8)
    for v, cs in enumerate(adj_v):
        for c in cs:
            h[c, v] = 1
    return h


def _cn_distances(v, adj_v, adj_c, n_cn):
    inf = math.inf
    dist = [inf] * n_cn
    seen_v = {v}
    frontier = [v]
    d = 1
    while frontier:
        nxt = []
        for u in frontier:
            for c in adj_v[u]:
                if dist[c] == inf:
                    dist[c] = d
                    for w in adj_c[c]:
                        if w not in seen_v:
                            seen_v.add(w)
                            nxt.append(w)
        frontier = nxt
        d += 2
    return dist


def _circulant_shifts(h1: np.ndarray, f2: int, rng: np.random.Generator) -> dict[tuple[int, int], int]:
    """Greedy shift per edge of the binary matrix ``h1``: maximise local girth
    (no 4-cycle, then no 6-cycle through the edge), uniform choice among ties.
    Always taking the smallest admissible shift gives girth 8 too, but the
    resulting codes decode markedly worse."""
    rows_of = {c: [int(r) for r in np.nonzero(h1[:, c])[0]] for c in range(h1.shape[1])}
    cols_of = {r: [int(c) for c in np.nonzero(h1[r, :])[0]] for r in range(h1.shape[0])}
    shifts: dict[tuple[int, int], int] = {}
    if f2 == 1:
        return {(r, c): 0 for c in rows_of for r in rows_of[c]}
    for c1 in range(h1.shape[1]):
        for r1 in rows_of[c1]:
            bad4, bad6 = set(), set()
            for r2 in rows_of[c1]:
                if r2 == r1 or (r2, c1) not in shifts:
                    continue
                s4 = shifts[(r2, c1)]
                for c2 in cols_of[r1]:
                    if c2 == c1 or (r1, c2) not in shifts:
                        continue
                    s2 = shifts[(r1, c2)]
                    if (r2, c2) in shifts:
                        bad4.add((s2 - shifts[(r2, c2)] + s4) % f2)
            # 6-walks r1-c2-r2-c3-r3-c1
            for c2 in cols_of[r1]:
                if c2 == c1 or (r1, c2) not in shifts:
                    continue
                s2 = shifts[(r1, c2)]
                for r2 in rows_of[c2]:
                    if r2 == r1 or (r2, c2) not in shifts:
                        continue
                    s3 = shifts[(r2, c2)]
                    for c3 in cols_of[r2]:
                        if c3 == c2 or c3 == c1 or (r2, c3) not in shifts:
                            continue
                        s4 = shifts[(r2, c3)]
                        for r3 in rows_of[c3]:
                            if r3 == r2 or r3 == r1 or (r3, c3) not in shifts or (r3, c1) not in shifts:
                                continue
                            bad6.add((s2 - s3 + s4 - shifts[(r3, c3)] + shifts[(r3, c1)]) % f2)
            cand = np.arange(f2)
            for bad in (bad4 | bad6, bad4):
                ok = cand[~np.isin(cand, list(bad))]
                if ok.size:
                    cand = ok
                    break
            shifts[(r1, c1)] = int(rng.choice(cand))
    return shifts


def girth(code: LiftedCode, sources: Iterable[int] | None = None, limit: int | None = None) -> float:
    """Length of the shortest cycle of the Tanner graph (``inf`` if acyclic).

    With ``sources`` only cycles through those variable nodes are searched; for
    a lifted code one variable per circulant orbit suffices.
    """
    cols = code.col_lists()
    rows = code.row_lists()
    n = code.n
    if sources is None:
        if code.base is not None and code.lift_factor > 1:
            f1 = _first_stage_factor(code.base)
            f2 = code.lift_factor // f1
            sources = range(0, n, f2)
        else:
            sources = range(n)
    best = math.inf
    for src in sources:
        # nodes: variables 0..n-1, checks n..n+m-1
        dist = {src: 0}
        parent = {src: -1}
        q = deque([src])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            nbrs = [n + r for r in cols[u]] if u < n else list(rows[u - n])
            for w in nbrs:
                if w == parent[u]:
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
        if limit is not None and best <= limit:
            break
    return best


def has_four_cycles(code: LiftedCode) -> bool:
    overlap = (code.h.T.astype(np.int32) @ code.h.astype(np.int32)).tocoo()
    off = overlap.row != overlap.col
    return bool(np.any(overlap.data[off] >= 2))


# --------------------------------------------------------------------------
# text formats


def format_base(base: BaseMatrix, punctures: PunctureMask | None = None) -> str:
    lines = [f"{base.n_checks} {base.n_vars}"]
    lines += [" ".join(str(int(v)) for v in row) for row in base.entries]
    if punctures is not None and punctures.indices:
        lines.append("puncture: " + " ".join(str(j) for j in punctures.indices))
    return "\n".join(lines) + "\n"


def parse_base(text: str) -> tuple[BaseMatrix, PunctureMask]:
    lines = [(k + 1, ln.strip()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty base matrix text", 1)
    k, head = lines[0]
    try:
        n_checks, n_vars = (int(t) for t in head.split())
    except ValueError:
        raise ParseError(f"expected 'n_checks n_vars', got {head!r}", k) from None
    if n_checks < 1 or n_vars < 1:
        raise ParseError("dimensions must be positive", k)
    if len(lines) < 1 + n_checks:
        raise ParseError(f"expected {n_checks} matrix rows", lines[-1][0])
    rows = []
    for k, ln in lines[1 : 1 + n_checks]:
        try:
            row = [int(t) for t in ln.split()]
        except ValueError:
            raise ParseError(f"non-integer entry in {ln!r}", k) from None
        if len(row) != n_vars:
            raise ParseError(f"expected {n_vars} entries, got {len(row)}", k)
        if any(v < 0 for v in row):
            raise ParseError("negative multiplicity", k)
        rows.append(row)
    punct: list[int] = []
    for k, ln in lines[1 + n_checks :]:
        if not ln.startswith("puncture:"):
            raise ParseError(f"unexpected line {ln!r}", k)
        try:
            punct = [int(t) for t in ln.split(":", 1)[1].split()]
        except ValueError:
            raise ParseError("non-integer puncture index", k) from None
        if any(not 0 <= j < n_vars for j in punct):
            raise ParseError("puncture index out of range", k)
    return BaseMatrix(rows), PunctureMask.from_indices(n_vars, punct)


def format_alist(code: LiftedCode) -> str:
    cols = code.col_lists()
    rows = code.row_lists()
    cw = [len(c) for c in cols]
    rw = [len(r) for r in rows]
    mc, mr = max(cw, default=0), max(rw, default=0)
    out = [f"{code.n} {code.m}", f"{mc} {mr}", " ".join(map(str, cw)), " ".join(map(str, rw))]
    out += [" ".join(str(v) for v in list(c + 1) + [0] * (mc - len(c))) for c in cols]
    out += [" ".join(str(v) for v in list(r + 1) + [0] * (mr - len(r))) for r in rows]
    # non-standard trailer lines are comments to alist readers
    out.append(f"# lift_factor {code.lift_factor}")
    if code.punctured_bits.size:
        out.append("# punctured " + " ".join(map(str, code.punctured_bits)))
    return "\n".join(out) + "\n"


def parse_alist(text: str) -> LiftedCode:
    raw = text.splitlines()
    body = [(k + 1, ln.split()) for k, ln in enumerate(raw) if ln.strip() and not ln.lstrip().startswith("#")]
    meta = [ln.lstrip()[1:].split() for ln in raw if ln.lstrip().startswith("#")]

    def ints(idx):
        k, toks = body[idx]
        try:
            return [int(t) for t in toks]
        except ValueError:
            raise ParseError("non-integer token", k) from None

    if len(body) < 4:
        raise ParseError("truncated alist header", len(raw))
    n, m = ints(0)
    cw = ints(2)
    if len(cw) != n:
        raise ParseError(f"expected {n} column weights", body[2][0])
    if len(body) < 4 + n + m:
        raise ParseError("truncated alist body", len(raw))
    rows, cols = [], []
    for c in range(n):
        nb = [v for v in ints(4 + c) if v != 0]
        if len(nb) != cw[c] or any(not 1 <= v <= m for v in nb):
            raise ParseError(f"bad neighbour list for column {c + 1}", body[4 + c][0])
        rows += [v - 1 for v in nb]
        cols += [c] * len(nb)
    h = sparse.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(m, n))
    lift_factor, punct = 1, []
    for toks in meta:
        if toks and toks[0] == "lift_factor":
            lift_factor = int(toks[1])
        elif toks and toks[0] == "punctured":
            punct = [int(t) for t in toks[1:]]
    return LiftedCode(h, lift_factor, np.array(punct, dtype=np.int64))
