"""Enumeration campaigns over cyclic quotient singularities.

Each record is the log quotient of the boundary-free orthant by
``1/r(a_1, ..., a_n)``: weights divisible by ``r`` in some coordinate give
quasi-reflections, and those records carry a standard-coefficient boundary.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cones import Cone
from .errors import CapExceeded, OutOfRange, VerificationFailure
from .lattice import identity, to_fraction
from .pairs import ToricPair, cartier_index, log_discrepancy, mld
from .quotients import TorusSubgroup, log_quotient, quotient_ld_check

DEFAULT_RMAX_CAP = 1000


def default_epsilon(n: int) -> Fraction:
    """Heuristic upper end of the small-mld window, ``1/n!``."""
    return Fraction(1, math.factorial(n))


# -- windows ------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """An interval of rationals; ``hi=None`` means unbounded above."""

    lo: Fraction
    hi: Fraction | None
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, x) -> bool:
        if x < self.lo or (x == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return x < self.hi or (x == self.hi and self.hi_closed)

    @classmethod
    def open(cls, lo, hi=None) -> "Window":
        return cls(to_fraction(lo), None if hi is None else to_fraction(hi))

    @classmethod
    def closed(cls, lo, hi) -> "Window":
        return cls(to_fraction(lo), to_fraction(hi), True, True)

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse ``"lo:hi"`` (open interval) or bracket form such as ``"[1/2,1)"``.

        Endpoints are exact: ``"0.1"`` means ``1/10``. ``"inf"`` leaves the top open.
        """
        text = text.strip()
        m = re.fullmatch(r"([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])", text)
        if m:
            lo, hi = m.group(2), m.group(3)
            lo_closed, hi_closed = m.group(1) == "[", m.group(4) == "]"
        elif text.count(":") == 1:
            lo, hi = (s.strip() for s in text.split(":"))
            lo_closed = hi_closed = False
        else:
            raise ValueError(f"cannot parse window {text!r}")
        hi_value = None if hi.lower() in ("inf", "+inf", "infinity") else _exact(hi)
        if hi_value is None:
            hi_closed = False
        return cls(_exact(lo), hi_value, lo_closed, hi_closed)

    def __str__(self):
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{self.lo},{hi}{']' if self.hi_closed else ')'}"


def _exact(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except ValueError:
        raise ValueError(f"not an exact rational: {text!r}") from None


# -- records ------------------------------------------------------------------

@dataclass(frozen=True)
class MldRecord:
    r: int
    weights: tuple[int, ...]
    mld: Fraction
    witness: tuple[Fraction, ...]
    cartier_index: int
    boundary: tuple[Fraction, ...]  # coefficient on the i-th coordinate axis
    reflection: bool

    @property
    def dim(self) -> int:
        return len(self.weights)

    def pair(self) -> ToricPair:
        return _quotient_pair(self.r, self.weights)


_ORTHANTS: dict[int, ToricPair] = {}


def _orthant(n: int) -> ToricPair:
    if n not in _ORTHANTS:
        _ORTHANTS[n] = ToricPair(Cone(identity(n)))
    return _ORTHANTS[n]


def _quotient_pair(r: int, weights: Sequence[int]) -> ToricPair:
    return log_quotient(_orthant(len(weights)), TorusSubgroup.from_weights(r, weights))


def make_record(r: int, weights: Sequence[int], verify: bool = True) -> MldRecord:
    """The record for ``1/r(weights)`` by direct integer computation.

    ``N' = Z^n + Z a/r`` is the union of the cosets ``j a/r + Z^n``; inside
    a coset the interior point with least coordinate sum has coordinate
    ``{j a_i / r}``, or 1 where that vanishes. The functional is
    ``(1, ..., 1)``, the ramification index of the ``i``-th axis is
    ``gcd(r, a_l : l != i)`` and the Cartier index is ``r / gcd(r, sum a)``.
    With ``verify`` the record is checked against the generic pair code.
    """
    weights = tuple(int(a) % r for a in weights)
    n = len(weights)
    # a common factor g only shrinks the group to 1/(r/g)(a/g)
    g = math.gcd(r, *weights)
    q, red = r // g, [x // g for x in weights]
    a = np.array(red, dtype=np.int64)
    M = (np.arange(q, dtype=np.int64)[:, None] * a[None, :]) % q
    M[M == 0] = q
    sums = M.sum(axis=1)
    best = int(sums.min())
    rows = M[sums == best]
    # lexicographically smallest minimizer
    order = np.lexsort(rows.T[::-1])
    witness = tuple(Fraction(int(x), q) for x in rows[order[0]])
    ram = [math.gcd(q, *(red[:i] + red[i + 1:])) for i in range(n)]
    boundary = tuple(1 - Fraction(1, k) for k in ram)
    rec = MldRecord(r, weights, Fraction(best, q), witness, q // math.gcd(q, sum(red)),
                    boundary, any(k > 1 for k in ram))
    if verify:
        verify_record(rec)
    return rec


def library_record(r: int, weights: Sequence[int]) -> MldRecord:
    """The same record computed entirely through the generic pair code."""
    weights = tuple(int(a) % r for a in weights)
    n = len(weights)
    Q = _quotient_pair(r, weights)
    value, witness = mld(Q)
    axes = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    boundary = tuple(Q.coefficient(e) for e in axes)
    return MldRecord(r, weights, value, tuple(witness), cartier_index(Q), boundary,
                     any(b > 0 for b in boundary))


def verify_record(rec: MldRecord) -> ToricPair:
    """Re-derive the record's pair and check it; returns that pair.

    The boundary and Cartier index must agree, the witness must reproduce
    the mld, and the quotient law must hold at the witness pulled back to
    ``Z^n``.
    """
    n = rec.dim
    F = TorusSubgroup.from_weights(rec.r, rec.weights)
    Q = log_quotient(_orthant(n), F)
    where = f"1/{rec.r}{rec.weights}"
    if rec.mld <= 0:
        raise VerificationFailure(f"non-positive mld for {where}")
    axes = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    if tuple(Q.coefficient(e) for e in axes) != rec.boundary:
        raise VerificationFailure(f"boundary disagrees for {where}")
    if cartier_index(Q) != rec.cartier_index:
        raise VerificationFailure(f"Cartier index disagrees for {where}")
    if log_discrepancy(Q, rec.witness) != rec.mld:
        raise VerificationFailure(f"witness does not reproduce the mld for {where}")
    k = math.lcm(*(x.denominator for x in rec.witness))
    up = tuple(k * x for x in rec.witness)
    _, down, _ = quotient_ld_check(_orthant(n), F, up, Q)
    if down != rec.mld:
        raise VerificationFailure(f"quotient law disagrees with the mld for {where}")
    return Q


def _units(r: int) -> np.ndarray:
    return np.array([u for u in range(1, r + 1) if math.gcd(u, r) == 1], dtype=np.int64)


def cyclic_weights(n: int, r: int, dedupe: bool = True) -> Iterator[tuple[int, ...]]:
    """Weight vectors mod ``r`` in lexicographic order.

    With ``dedupe`` each overlattice ``Z^n + Z a/r`` is produced once: vectors
    with a common factor with ``r`` belong to a smaller ``r``, and the
    multiples ``u a`` for units ``u`` give the same overlattice, so the
    whole unit orbit of a new vector is marked as seen.
    """
    if not dedupe:
        yield from _product(n, r)
        return
    if r == 1:
        yield (0,) * n
        return
    strides = np.array([r ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    seen = np.zeros(r ** n, dtype=bool)
    units = _units(r)
    for a in _product(n, r):
        if math.gcd(r, *a) != 1:
            continue
        idx = int(np.dot(a, strides))
        if seen[idx]:
            continue
        orbit = (units[:, None] * np.array(a, dtype=np.int64)[None, :]) % r
        seen[orbit @ strides] = True
        yield a


def _product(n: int, r: int):
    if n == 0:
        yield ()
        return
    for head in range(r):
        for tail in _product(n - 1, r):
            yield (head,) + tail


def enumerate_cyclic(n: int, R: int, window: Window | None = None, dedupe: bool = True,
                     cap: int = DEFAULT_RMAX_CAP, verify: bool = True) -> Iterator[MldRecord]:
    """Records for ``1/r(a)``, ``1 <= r <= R``, ordered by ``r`` then weights."""
    if n not in (2, 3):
        raise OutOfRange(f"cyclic sweeps cover dimensions 2 and 3, got {n}")
    if R > cap:
        raise CapExceeded(f"sweep bound {R} exceeds the cap {cap}", cap)
    for r in range(1, R + 1):
        for a in cyclic_weights(n, r, dedupe):
            rec = make_record(r, a, verify)
            if window is None or rec.mld in window:
                yield rec


# -- spectra ------------------------------------------------------------------

@dataclass
class SpectrumReport:
    window: Window
    r1: int
    r2: int
    values_r1: list[Fraction]
    values_r2: list[Fraction]
    multiplicity: dict[Fraction, int]
    witnesses: dict[Fraction, tuple[int, tuple[int, ...], tuple[Fraction, ...]]]
    ascending_runs: list[tuple[int, int, Fraction]] = field(default_factory=list)

    @property
    def stabilized(self) -> bool:
        return self.values_r1 == self.values_r2

    @property
    def new_values(self) -> list[Fraction]:
        old = set(self.values_r1)
        return [v for v in self.values_r2 if v not in old]

    def as_dict(self):
        return {
            "window": str(self.window),
            "r1": self.r1,
            "r2": self.r2,
            "stabilized": self.stabilized,
            "values_r1": [str(v) for v in self.values_r1],
            "values_r2": [str(v) for v in self.values_r2],
            "new_values": [str(v) for v in self.new_values],
            "values": [
                {"mld": str(v), "multiplicity": self.multiplicity[v],
                 "r": self.witnesses[v][0], "weights": list(self.witnesses[v][1]),
                 "witness": [str(x) for x in self.witnesses[v][2]]}
                for v in self.values_r2],
            "ascending_runs": [{"start": s, "length": k, "last": str(v)}
                               for s, k, v in self.ascending_runs],
        }

    @classmethod
    def from_dict(cls, d) -> "SpectrumReport":
        values = d["values"]
        return cls(
            window=Window.parse(d["window"]),
            r1=d["r1"], r2=d["r2"],
            values_r1=[Fraction(v) for v in d["values_r1"]],
            values_r2=[Fraction(v) for v in d["values_r2"]],
            multiplicity={Fraction(e["mld"]): e["multiplicity"] for e in values},
            witnesses={Fraction(e["mld"]): (e["r"], tuple(e["weights"]),
                                            tuple(Fraction(x) for x in e["witness"]))
                       for e in values},
            ascending_runs=[(e["start"], e["length"], Fraction(e["last"]))
                            for e in d["ascending_runs"]],
        )


def spectrum(records: Iterable[MldRecord], window: Window, R1: int, R2: int,
             run_threshold: int = 10) -> SpectrumReport:
    """Distinct mld values in ``window`` for the bounds ``R1 < R2``.

    The ascending-run audit looks at distinct values in order of discovery
    and reports strictly increasing runs longer than ``run_threshold``.
    """
    if not R1 < R2:
        raise ValueError("need R1 < R2")
    low, high = set(), set()
    mult: dict[Fraction, int] = {}
    wit = {}
    discovery = []
    for rec in records:
        if rec.r > R2 or rec.mld not in window:
            continue
        v = rec.mld
        if v not in high:
            discovery.append(v)
            wit[v] = (rec.r, rec.weights, rec.witness)
        high.add(v)
        mult[v] = mult.get(v, 0) + 1
        if rec.r <= R1:
            low.add(v)
    runs = []
    start = 0
    for i in range(1, len(discovery) + 1):
        if i == len(discovery) or discovery[i] <= discovery[i - 1]:
            if i - start > run_threshold:
                runs.append((start, i - start, discovery[i - 1]))
            start = i
    return SpectrumReport(window, R1, R2, sorted(low), sorted(high), mult, wit, runs)


# -- Cartier index tables -----------------------------------------------------

@dataclass
class IndexRow:
    window: Window
    indices: list[int]
    indices_r1: list[int] | None = None

    @property
    def maximum(self) -> int | None:
        return max(self.indices) if self.indices else None

    @property
    def grew(self) -> bool | None:
        return None if self.indices_r1 is None else self.indices_r1 != self.indices

    def as_dict(self):
        d = {"window": str(self.window), "indices": self.indices, "max": self.maximum}
        if self.indices_r1 is not None:
            d["indices_r1"] = self.indices_r1
            d["grew"] = self.grew
        return d


def index_table(records: Iterable[MldRecord], windows: Sequence[Window],
                R1: int | None = None) -> list[IndexRow]:
    """Observed Cartier indices per mld window; with ``R1`` also the sets for ``r <= R1``."""
    full = [set() for _ in windows]
    early = [set() for _ in windows]
    for rec in records:
        for i, w in enumerate(windows):
            if rec.mld in w:
                full[i].add(rec.cartier_index)
                if R1 is not None and rec.r <= R1:
                    early[i].add(rec.cartier_index)
    return [IndexRow(w, sorted(s), None if R1 is None else sorted(e))
            for w, s, e in zip(windows, full, early)]


# -- accumulation scan (exploratory) ------------------------------------------

def family_key(rec: MldRecord) -> tuple:
    """Weights read as a constant ``c`` or as ``r - c``; equal keys form a family."""
    return tuple(("c", a) if 2 * a <= rec.r else ("r-", rec.r - a) for a in rec.weights)


def _extrapolate(points: list[tuple[int, Fraction]]) -> Fraction:
    # fit v = L + c/r through the last two points
    (r1, v1), (r2, v2) = points[-2], points[-1]
    return (r2 * v2 - r1 * v1) / (r2 - r1)


def standard_coefficient_mlds(max_r: int = 12, max_m: int = 4) -> dict[Fraction, tuple]:
    """mld of 2-dimensional cyclic quotients with standard-coefficient boundaries.

    Pairs ``(1/s(b_1, b_2), (1 - 1/m_1) D_1 + (1 - 1/m_2) D_2)`` on the orthant
    of ``Z^2 + Z b/s``; the first pair found for each value is kept.
    """
    from .pairs import ToricPair as _Pair
    found: dict[Fraction, tuple] = {}
    for s in range(1, max_r + 1):
        for b in cyclic_weights(2, s):
            F = TorusSubgroup.from_weights(s, b)
            cone = Cone(identity(2), F.overlattice)
            for m1 in range(1, max_m + 1):
                for m2 in range(1, max_m + 1):
                    coeffs = {(0, 1): Fraction(m2 - 1, m2), (1, 0): Fraction(m1 - 1, m1)}
                    aligned = [coeffs[tuple(int(x != 0) for x in v)] for v in cone.rays]
                    value, _ = mld(_Pair(cone, aligned))
                    found.setdefault(value, (s, b, (m1, m2)))
    return found


@dataclass
class AccumulationCluster:
    key: tuple
    points: list[tuple[int, Fraction]]
    limit: Fraction
    match: tuple | None

    def as_dict(self):
        return {"family": [f"{k}{c}" for k, c in self.key], "limit": str(self.limit),
                "r_values": [r for r, _ in self.points],
                "mlds": [str(v) for _, v in self.points],
                "match": None if self.match is None else
                {"r": self.match[0], "weights": list(self.match[1]), "m": list(self.match[2])}}


def accumulation_scan(records: Iterable[MldRecord], n: int = 3, resolution=Fraction(1, 100),
                      max_r: int = 12, max_m: int = 4) -> tuple[list, list]:
    """Cluster mld values along r-families and match limits against surface pairs.

    Returns ``(matched, unmatched)`` clusters. A family clusters when its
    last gap is below ``resolution``; the limit is extrapolated from the
    last two members and then compared exactly with the mlds of
    2-dimensional pairs with standard coefficients. Nothing is asserted.
    """
    resolution = to_fraction(resolution)
    families: dict[tuple, list] = {}
    for rec in records:
        if rec.dim == n:
            families.setdefault(family_key(rec), []).append((rec.r, rec.mld))
    table = standard_coefficient_mlds(max_r, max_m)
    matched, unmatched = [], []
    for key in sorted(families):
        pts = sorted(families[key])
        if len(pts) < 3 or abs(pts[-1][1] - pts[-2][1]) >= resolution:
            continue
        limit = _extrapolate(pts).limit_denominator(max_r * max_m * 10)
        hit = table.get(limit)
        cluster = AccumulationCluster(key, pts, limit, hit)
        (matched if hit is not None else unmatched).append(cluster)
    return matched, unmatched


# -- emission -----------------------------------------------------------------

RECORD_FIELDS = ("r", "weights", "dim", "mld", "witness", "cartier_index", "boundary", "reflection")


def _join(xs) -> str:
    return ";".join(str(x) for x in xs)


def record_row(rec: MldRecord) -> dict:
    return {"r": rec.r, "weights": _join(rec.weights), "dim": rec.dim, "mld": str(rec.mld),
            "witness": _join(rec.witness), "cartier_index": rec.cartier_index,
            "boundary": _join(rec.boundary), "reflection": int(rec.reflection)}


def row_record(row: dict) -> MldRecord:
    split = lambda s: [x for x in str(s).split(";") if x != ""]
    return MldRecord(int(row["r"]), tuple(int(x) for x in split(row["weights"])),
                     Fraction(row["mld"]), tuple(Fraction(x) for x in split(row["witness"])),
                     int(row["cartier_index"]), tuple(Fraction(x) for x in split(row["boundary"])),
                     bool(int(row["reflection"])))


def dumps(obj, fmt: str) -> str:
    """Serialize records, a spectrum, an index table or a scan result."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, SpectrumReport):
        if fmt == "json":
            return json.dumps(obj.as_dict(), indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mld", "multiplicity", "r", "weights", "in_r1"])
        low = set(obj.values_r1)
        for v in obj.values_r2:
            r, a, _ = obj.witnesses[v]
            w.writerow([str(v), obj.multiplicity[v], r, _join(a), int(v in low)])
        return buf.getvalue()
    items = list(obj)
    if items and isinstance(items[0], IndexRow):
        if fmt == "json":
            return json.dumps([row.as_dict() for row in items], indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window", "indices", "max"])
        for row in items:
            w.writerow([str(row.window), _join(row.indices), row.maximum])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([record_row(rec) for rec in items], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RECORD_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in items:
        w.writerow(record_row(rec))
    return buf.getvalue()


def emit(obj, fmt: str, path) -> None:
    text = dumps(obj, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def loads_records(text: str, fmt: str) -> list[MldRecord]:
    if fmt == "json":
        return [row_record(row) for row in json.loads(text)]
    return [row_record(row) for row in csv.DictReader(io.StringIO(text))]


def read_records(path, fmt: str) -> list[MldRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads_records(fh.read(), fmt)


def read_spectrum(path) -> SpectrumReport:
    with open(path, encoding="utf-8") as fh:
        return SpectrumReport.from_dict(json.load(fh))
