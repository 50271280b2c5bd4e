"""Graph families and local adjacency oracles.

Two families are supported:

* the d-regular tree (``RegularTree``), and
* free products of complete graphs K_{m_1+1} * ... * K_{m_r+1}
  (``FreeProductComplete``).

Vertices are canonical words over the factors' non-root letters.  A word is a
sequence of ``(factor, letter)`` pairs such that no two consecutive pairs use
the same factor.  Trees reuse the representation with a single pseudo-factor
0: the root has d children, every other vertex has d-1, and the word length
equals the graph distance to the root for both families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BallTooLarge, InvalidModel, InvalidVertex

DEFAULT_BALL_CAP = 10**6


@dataclass(frozen=True)
class RegularTree:
    """The d-regular infinite tree, d >= 2."""

    d: int

    @property
    def degree(self) -> int:
        return self.d

    def describe(self) -> str:
        return f"tree:d={self.d}"


@dataclass(frozen=True)
class FreeProductComplete:
    """Free product of complete graphs K_{m_i + 1}, listed by their m_i."""

    ms: tuple[int, ...]

    def __init__(self, ms):
        object.__setattr__(self, "ms", tuple(int(m) for m in ms))

    @property
    def r(self) -> int:
        return len(self.ms)

    @property
    def m(self) -> int:
        """Total degree: every vertex has degree sum(ms)."""
        return sum(self.ms)

    @property
    def degree(self) -> int:
        return self.m

    @property
    def degenerate_line(self) -> bool:
        """True for K_2 * K_2, the bi-infinite line.

        The two-factor speed and spectral-radius formulas require
        m_1 * m_2 >= 2; the line is accepted as a model but those
        operations reject it unless explicitly overridden.
        """
        return self.r == 2 and self.ms[0] * self.ms[1] < 2

    def describe(self) -> str:
        return "free:" + ",".join(str(m) for m in self.ms)


GraphModel = RegularTree | FreeProductComplete


def validate_model(model: GraphModel) -> GraphModel:
    """Return ``model`` if its structural invariants hold, else raise.

    Raises:
        InvalidModel: with the violated constraint named.
    """
    if isinstance(model, RegularTree):
        if model.d < 2:
            raise InvalidModel(f"regular tree requires d >= 2, got d={model.d}")
        return model
    if isinstance(model, FreeProductComplete):
        if model.r < 2:
            raise InvalidModel(f"free product requires >= 2 factors, got {model.r}")
        for i, m in enumerate(model.ms):
            if m < 1:
                raise InvalidModel(f"factor {i + 1} requires m >= 1, got m={m}")
        return model
    raise InvalidModel(f"unknown model type: {type(model).__name__}")


def parse_model(text: str) -> GraphModel:
    """Parse the CLI model syntax: ``tree:d=4`` or ``free:2,1``."""
    s = text.strip()
    if s.startswith("tree:"):
        body = s[len("tree:"):]
        if not body.startswith("d="):
            raise InvalidModel(f"expected tree:d=<int>, got {text!r}")
        try:
            d = int(body[2:])
        except ValueError:
            raise InvalidModel(f"non-integer degree in {text!r}") from None
        return validate_model(RegularTree(d))
    if s.startswith("free:"):
        body = s[len("free:"):]
        try:
            ms = [int(part) for part in body.split(",") if part != ""]
        except ValueError:
            raise InvalidModel(f"non-integer factor size in {text!r}") from None
        if not ms:
            raise InvalidModel(f"empty factor list in {text!r}")
        return validate_model(FreeProductComplete(ms))
    raise InvalidModel(f"unrecognized model syntax: {text!r}")


@dataclass(frozen=True)
class VertexAddr:
    """Word address of a vertex; the empty word is the root."""

    letters: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_root(self) -> bool:
        return not self.letters

    @property
    def factor(self) -> int:
        """Factor index of the last letter (0 at the root)."""
        return self.letters[-1][0] if self.letters else 0

    def child(self, factor: int, letter: int) -> "VertexAddr":
        return VertexAddr(self.letters + ((factor, letter),))

    def parent(self) -> "VertexAddr":
        return VertexAddr(self.letters[:-1])

    def with_last(self, factor: int, letter: int) -> "VertexAddr":
        return VertexAddr(self.letters[:-1] + ((factor, letter),))


ROOT = VertexAddr()


@dataclass(frozen=True)
class LevelDegrees:
    """Degree of a vertex split by the level of the opposite endpoint."""

    d_v: int
    d_minus: int
    d_zero: int
    d_plus: int


def validate_vertex(model: GraphModel, v: VertexAddr) -> VertexAddr:
    """Check that ``v`` is a valid word for ``model``; raise InvalidVertex."""
    if isinstance(model, RegularTree):
        for pos, (fac, letter) in enumerate(v.letters):
            if fac != 0:
                raise InvalidVertex(f"tree words use pseudo-factor 0, got {fac}")
            arity = model.d if pos == 0 else model.d - 1
            if not 1 <= letter <= arity:
                raise InvalidVertex(
                    f"tree child index {letter} out of range 1..{arity} at position {pos}"
                )
        return v
    prev = 0
    for pos, (fac, letter) in enumerate(v.letters):
        if not 1 <= fac <= model.r:
            raise InvalidVertex(f"factor {fac} out of range 1..{model.r}")
        if fac == prev:
            raise InvalidVertex(f"consecutive letters from factor {fac} at position {pos}")
        if not 1 <= letter <= model.ms[fac - 1]:
            raise InvalidVertex(
                f"letter {letter} out of range 1..{model.ms[fac - 1]} in factor {fac}"
            )
        prev = fac
    return v


def level_degrees(model: GraphModel, v: VertexAddr) -> LevelDegrees:
    """Split the degree of ``v`` into down/lateral/up edge counts."""
    validate_vertex(model, v)
    if isinstance(model, RegularTree):
        if v.is_root:
            return LevelDegrees(model.d, 0, 0, model.d)
        return LevelDegrees(model.d, 1, 0, model.d - 1)
    m = model.m
    if v.is_root:
        return LevelDegrees(m, 0, 0, m)
    mi = model.ms[v.factor - 1]
    return LevelDegrees(m, 1, mi - 1, m - mi)


def neighbors(model: GraphModel, v: VertexAddr) -> list[tuple[VertexAddr, int]]:
    """All neighbors of ``v`` with their level delta in {-1, 0, +1}.

    Exactly ``d_v`` entries, ordered down, lateral, up.
    """
    validate_vertex(model, v)
    out: list[tuple[VertexAddr, int]] = []
    if isinstance(model, RegularTree):
        if v.is_root:
            return [(v.child(0, c), +1) for c in range(1, model.d + 1)]
        out.append((v.parent(), -1))
        out.extend((v.child(0, c), +1) for c in range(1, model.d))
        return out
    if v.is_root:
        for fac, m in enumerate(model.ms, start=1):
            out.extend((v.child(fac, a), +1) for a in range(1, m + 1))
        return out
    fac, letter = v.letters[-1]
    out.append((v.parent(), -1))
    out.extend(
        (v.with_last(fac, b), 0)
        for b in range(1, model.ms[fac - 1] + 1)
        if b != letter
    )
    for other, m in enumerate(model.ms, start=1):
        if other == fac:
            continue
        out.extend((v.child(other, a), +1) for a in range(1, m + 1))
    return out


def sphere_sizes(model: GraphModel, n: int) -> list[int]:
    """Exact sphere cardinalities M_0 .. M_n."""
    if n < 0:
        raise InvalidModel(f"radius must be >= 0, got {n}")
    if isinstance(model, RegularTree):
        sizes = [1]
        if n >= 1:
            sizes.append(model.d)
        for _ in range(2, n + 1):
            sizes.append(sizes[-1] * (model.d - 1))
        return sizes
    # counts[i] = number of level-k vertices whose last letter is in factor i+1
    sizes = [1]
    counts = list(model.ms)
    for k in range(1, n + 1):
        sizes.append(sum(counts))
        total = sum(counts)
        counts = [model.ms[i] * (total - counts[i]) for i in range(model.r)]
    return sizes


@dataclass
class Ball:
    """Induced subgraph on all vertices within distance ``radius`` of the root.

    ``adjacency[i]`` lists ``(j, delta)`` pairs for every edge at vertex i,
    where delta is the level change seen from vertex i.
    """

    model: GraphModel
    radius: int
    vertices: list[VertexAddr]
    index: dict[VertexAddr, int] = field(repr=False)
    adjacency: list[list[tuple[int, int]]] = field(repr=False)
    sphere: list[int]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def level(self, i: int) -> int:
        return len(self.vertices[i])


def enumerate_ball(model: GraphModel, n: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
    """Materialize B(n) with its induced adjacency and sphere sizes.

    Raises:
        BallTooLarge: if the exact vertex count exceeds ``cap``; the oracle
            is either complete or absent, never truncated.
    """
    validate_model(model)
    spheres = sphere_sizes(model, n)
    total = sum(spheres)
    if total > cap:
        raise BallTooLarge(f"B({n}) has {total} vertices, cap is {cap}")

    vertices: list[VertexAddr] = [ROOT]
    index: dict[VertexAddr, int] = {ROOT: 0}
    frontier = [ROOT]
    for _ in range(n):
        nxt: list[VertexAddr] = []
        for v in frontier:
            for u, delta in neighbors(model, v):
                if delta == +1 and u not in index:
                    index[u] = len(vertices)
                    vertices.append(u)
                    nxt.append(u)
        frontier = nxt

    adjacency: list[list[tuple[int, int]]] = [[] for _ in vertices]
    for i, v in enumerate(vertices):
        for u, delta in neighbors(model, v):
            j = index.get(u)
            if j is not None:
                adjacency[i].append((j, delta))

    ball = Ball(model, n, vertices, index, adjacency, spheres)
    assert [sum(1 for v in vertices if len(v) == k) for k in range(n + 1)] == spheres
    return ball


def sphere_type_counts(model: FreeProductComplete, n: int) -> list[list[int]]:
    """Per-level counts of vertices by the factor of their last letter.

    Entry ``[k][i]`` counts level-k vertices of type i+1; level 0 is all
    zeros (the root has type 0).
    """
    counts = [[0] * model.r]
    cur = list(model.ms)
    for k in range(1, n + 1):
        counts.append(list(cur))
        total = sum(cur)
        cur = [model.ms[i] * (total - cur[i]) for i in range(model.r)]
    return counts


def ball_vertex_count(model: GraphModel, n: int) -> int:
    return sum(sphere_sizes(model, n))
