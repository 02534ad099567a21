"""Routing-model primitives: circuits, queries, representation maps, and
post-trained models, with expected-utility evaluation and enumeration of the
deterministic model class.

A model is a pair (representation map, router): the map sends each query to an
internal representation id, and the router assigns each representation a
distribution over circuits. All types are immutable after construction;
`respond` is the only operation that consumes randomness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .preferences import Scalar, UtilityMatrix

PROB_TOL = 1e-12
ENUMERATION_CAP = 1_000_000


class DimensionMismatchError(ValueError):
    """Objects with inconsistent query/circuit/representation counts."""


class EnumerationLimitError(RuntimeError):
    """Deterministic model class too large to enumerate under the cap."""


@dataclass(frozen=True)
class CircuitSet:
    """Ordered circuit identifiers; index order breaks all ties."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("need at least two circuits")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("circuit labels must be distinct")
        if any((not lab) or any(c.isspace() for c in lab) for lab in self.labels):
            raise ValueError("circuit labels must be non-empty and whitespace-free")

    @classmethod
    def default(cls, m: int) -> "CircuitSet":
        return cls(tuple(f"s_{i + 1}" for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class QuerySet:
    """Query ids 0..n-1, drawn uniformly."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one query")


@dataclass(frozen=True)
class RepresentationFamily:
    """The learnable representation maps: each maps[a][q] is a rep id in 0..r-1."""

    r: int
    maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("need at least one representation")
        if not self.maps:
            raise ValueError("representation family must be non-empty")
        n = len(self.maps[0])
        for a, phi in enumerate(self.maps):
            if len(phi) != n:
                raise ValueError(f"map {a} has wrong length")
            if any(not (0 <= z < self.r) for z in phi):
                raise ValueError(f"map {a} outputs a rep id outside 0..{self.r - 1}")

    @classmethod
    def constant(cls, n: int) -> "RepresentationFamily":
        """Single-representation family: every query maps to rep 0."""
        return cls(1, ((0,) * n,))

    @property
    def phi_count(self) -> int:
        return len(self.maps)

    def preimages(self, phi_index: int) -> tuple[tuple[int, ...], ...]:
        """Query ids grouped by rep id under the chosen map."""
        groups = [[] for _ in range(self.r)]
        for q, z in enumerate(self.maps[phi_index]):
            groups[z].append(q)
        return tuple(tuple(g) for g in groups)


@dataclass(frozen=True)
class PostTrainedModel:
    """A representation map choice plus a per-representation circuit router.

    g[z] is a probability vector over circuits; deterministic models have a
    single unit entry per row.
    """

    reps: RepresentationFamily
    phi_index: int
    g: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if not (0 <= self.phi_index < self.reps.phi_count):
            raise ValueError("phi_index outside the representation family")
        if len(self.g) != self.reps.r:
            raise DimensionMismatchError("router must cover every representation id")
        for z, row in enumerate(self.g):
            if any(p < 0 for p in row):
                raise ValueError(f"negative routing probability at rep {z}")
            if abs(sum(row) - 1) > PROB_TOL:
                raise ValueError(f"routing row {z} sums to {sum(row)}, not 1")

    @classmethod
    def deterministic(cls, reps, phi_index, picks, m) -> "PostTrainedModel":
        """Point-mass router: picks[z] is the circuit chosen for rep z."""
        rows = []
        for z, s in enumerate(picks):
            if not (0 <= s < m):
                raise ValueError(f"pick for rep {z} outside 0..{m - 1}")
            rows.append(tuple(1 if j == s else 0 for j in range(m)))
        return cls(reps, phi_index, tuple(rows))

    @classmethod
    def uniform(cls, reps, phi_index, m) -> "PostTrainedModel":
        row = (Fraction(1, m),) * m
        return cls(reps, phi_index, (row,) * reps.r)

    @property
    def m(self) -> int:
        return len(self.g[0])

    def phi(self, q: int) -> int:
        return self.reps.maps[self.phi_index][q]

    def route_probs(self, q: int) -> tuple[Scalar, ...]:
        return self.g[self.phi(q)]

    def is_deterministic(self) -> bool:
        return all(sum(1 for p in row if p) == 1 and max(row) == 1 for row in self.g)

    def support(self, z: int) -> int:
        """The routed circuit for rep z; only defined for deterministic rows."""
        row = self.g[z]
        if sum(1 for p in row if p) != 1 or max(row) != 1:
            raise ValueError(f"router row {z} is not a point mass")
        return max(range(len(row)), key=lambda j: row[j])


@dataclass(frozen=True)
class Instance:
    """A world: queries, circuits, representation family, optional utilities."""

    queries: QuerySet
    circuits: CircuitSet
    reps: RepresentationFamily
    utilities: UtilityMatrix | None = None

    def __post_init__(self):
        if len(self.reps.maps[0]) != self.queries.n:
            raise DimensionMismatchError("representation maps must be total over the query set")
        if self.utilities is not None:
            if self.utilities.n != self.queries.n or self.utilities.m != self.circuits.m:
                raise DimensionMismatchError("utility matrix shape disagrees with the world")

    @property
    def n(self) -> int:
        return self.queries.n

    @property
    def m(self) -> int:
        return self.circuits.m

    @property
    def r(self) -> int:
        return self.reps.r


def expected_utility(instance: Instance, utilities: UtilityMatrix, model: PostTrainedModel):
    """Mean over queries of the router-weighted utility: (1/n) sum_q sum_j P(j|q) u(q, j).

    Exact (a Fraction) when utilities and router entries are rational.
    """
    if utilities.n != instance.n or utilities.m != instance.m:
        raise DimensionMismatchError("utility matrix shape disagrees with the instance")
    if model.reps is not instance.reps and model.reps != instance.reps:
        raise DimensionMismatchError("model belongs to a different representation family")
    if model.m != instance.m:
        raise DimensionMismatchError("model routes over the wrong number of circuits")
    total = 0
    for q in range(instance.n):
        row = model.route_probs(q)
        urow = utilities.values[q]
        for j, p in enumerate(row):
            if p:
                total += p * urow[j]
    return total / instance.n if not isinstance(total, (int, Fraction)) else Fraction(total) / instance.n


def respond(model: PostTrainedModel, q: int, rng) -> int:
    """Sample the circuit that answers query q from the model's router."""
    if not (0 <= q < len(model.reps.maps[0])):
        raise ValueError(f"query id {q} out of range")
    row = model.route_probs(q)
    x = rng.random()
    acc = 0
    for j, p in enumerate(row):
        acc += p
        if x < acc:
            return j
    return len(row) - 1  # guard against accumulated rounding at x ~ 1


def enumerate_deterministic_models(instance: Instance, cap: int = ENUMERATION_CAP):
    """Yield every (map choice, deterministic router) exactly once.

    Refuses with EnumerationLimitError when |maps| * m**r exceeds the cap; use
    the factored optimizer in the distortion pipeline for anything larger.
    """
    total = instance.reps.phi_count * instance.m ** instance.r
    if total > cap:
        raise EnumerationLimitError(
            f"{total} deterministic models exceed the enumeration cap of {cap}"
        )

    def _iterate():
        for phi_index in range(instance.reps.phi_count):
            for picks in itertools.product(range(instance.m), repeat=instance.r):
                yield PostTrainedModel.deterministic(instance.reps, phi_index, picks, instance.m)

    return _iterate()


# --- instance files -------------------------------------------------------
#
# Plain-text schema (one record per line, space-separated):
#   distortlab-instance v1
#   n <count>
#   m <count>
#   labels <label> ...
#   r <count>
#   maps <count>
#   map <index> <rep-id> ... (n ids)
#   utilities unit_sum=<0|1> bounded01=<0|1>     (section optional)
#   row <value> ... (m values)
#   end
# Values are written as integers, exact rationals "p/q", or floats via repr,
# so a parse-write cycle reproduces every value bit-for-bit.


def format_scalar(x: Scalar) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not utility values")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def parse_scalar(tok: str) -> Scalar:
    if "/" in tok:
        num, den = tok.split("/")
        return Fraction(int(num), int(den))
    if any(c in tok for c in ".eE") or tok in ("inf", "-inf", "nan"):
        return float(tok)
    return int(tok)


def instance_to_text(instance: Instance) -> str:
    lines = [
        "distortlab-instance v1",
        f"n {instance.n}",
        f"m {instance.m}",
        "labels " + " ".join(instance.circuits.labels),
        f"r {instance.r}",
        f"maps {instance.reps.phi_count}",
    ]
    for a, phi in enumerate(instance.reps.maps):
        lines.append(f"map {a} " + " ".join(str(z) for z in phi))
    if instance.utilities is not None:
        u = instance.utilities
        lines.append(f"utilities unit_sum={int(u.unit_sum)} bounded01={int(u.bounded01)}")
        for row in u.values:
            lines.append("row " + " ".join(format_scalar(x) for x in row))
    lines.append("end")
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> Instance:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines or lines[0] != "distortlab-instance v1":
        raise ValueError("not a distortlab-instance v1 document")

    fields = {}
    maps = {}
    flags = None
    rows = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if key in ("n", "m", "r", "maps"):
            fields[key] = int(rest)
        elif key == "labels":
            fields["labels"] = tuple(rest.split())
        elif key == "map":
            toks = rest.split()
            maps[int(toks[0])] = tuple(int(t) for t in toks[1:])
        elif key == "utilities":
            flags = dict(kv.split("=") for kv in rest.split())
        elif key == "row":
            rows.append(tuple(parse_scalar(t) for t in rest.split()))
        elif key == "end":
            break
        else:
            raise ValueError(f"unknown record {key!r} in instance file")

    for req in ("n", "m", "labels", "r", "maps"):
        if req not in fields:
            raise ValueError(f"instance file is missing the {req!r} record")
    if sorted(maps) != list(range(fields["maps"])):
        raise ValueError("instance file map indices must be 0..maps-1")

    utilities = None
    if flags is not None:
        utilities = UtilityMatrix(
            tuple(rows),
            unit_sum=bool(int(flags.get("unit_sum", "0"))),
            bounded01=bool(int(flags.get("bounded01", "0"))),
        )
    return Instance(
        queries=QuerySet(fields["n"]),
        circuits=CircuitSet(fields["labels"]),
        reps=RepresentationFamily(fields["r"], tuple(maps[a] for a in range(fields["maps"]))),
        utilities=utilities,
    )
