"""Group homology with module coefficients, Ext index bookkeeping and the
vanishing of H_{>0}(BF_2^d; D (x) D)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .chain import FreeComplex, coinvariants, dualize, fox_complex
from .lie import GradedGenerators, dimension as lie_dimension
from .truncation import PropagationComplex, TruncationReport, diagonal_coinvariants, truncated_homology

INF = float("inf")


@dataclass
class CoefficientResolution:
    """Resolution of a coefficient module, reindexed so that it starts in degree 0.

    Exactly one of ``free`` (finite rank, coinvariants by augmentation) and
    ``diagonal`` (already tensored down over the group, truncated) is set.
    """

    label: str
    free: FreeComplex | None = None
    diagonal: PropagationComplex | None = None

    def __post_init__(self):
        if (self.free is None) == (self.diagonal is None):
            raise ValueError("give exactly one of a free or a diagonal complex")

    @property
    def degrees(self) -> list[int]:
        if self.free is not None:
            return list(self.free.degrees())
        return self.diagonal.degrees()


def dual_fox_resolution(k: int = 2) -> CoefficientResolution:
    """D for F_k: the dual of the Fox complex, degrees 0..1."""
    return CoefficientResolution(f"D(F_{k})", free=dualize(fox_complex(k), 1))


def tensor_square(res: CoefficientResolution) -> CoefficientResolution:
    """D (x) D with the diagonal action, resolved by P (x) P."""
    if res.free is None:
        raise ValueError("tensor square needs a finite-rank resolution")
    P = res.free
    return CoefficientResolution(f"{res.label} (x) {res.label}",
                                 diagonal=diagonal_coinvariants(P, P))


@dataclass
class HomologyResult:
    n: int
    dimension: int
    certainty: str  # "exact", "stabilized" or "not stabilized"
    torsion: list[int] = field(default_factory=list)
    report: TruncationReport | None = None

    @property
    def stabilized(self) -> bool:
        return self.certainty != "not stabilized"


def group_homology(res: CoefficientResolution, n: int,
                   radii: Sequence[int] = (2, 3, 4, 5, 6)) -> HomologyResult:
    if n not in res.degrees:
        raise ValueError(f"degree {n} outside the resolution range {res.degrees}")
    if res.free is not None:
        S = coinvariants(res.free)
        h = S.homology()
        dim, tors = h.get(n, (0, []))
        return HomologyResult(n, dim, "exact", list(tors))
    rep = truncated_homology(res.diagonal, radii, degrees=[n])
    tag = "stabilized" if rep.stabilized(n) else "not stabilized"
    return HomologyResult(n, rep.estimate(n), tag, report=rep)


# ---------------------------------------------------------------------------
# Ext^1 index arithmetic

@dataclass(frozen=True)
class Ext1Index:
    r: int
    d: int
    k: int
    index: int
    verdict: str
    hypothesis_window: bool  # d - 1 > r > d / 2


def ext1_via_duality(r: int, d: int, k: int) -> Ext1Index:
    """Ext^1(H_k(V^k), K_k) is H_index(BG; K_k) with index = d + r - (k + 2)."""
    if r < 2 or d < 1:
        raise ValueError(f"need r >= 2 and d >= 1, got r={r}, d={d}")
    if not r < k <= r + d:
        raise ValueError(f"k={k} outside the attachment range ({r}, {r + d}]")
    index = d + r - (k + 2)
    if index < 0 or index > d:
        verdict = "vanishes for degree reasons"
    elif index == 0:
        verdict = "boundary case, consult vanishing theorem"
    else:
        verdict = "potentially nontrivial"
    return Ext1Index(r, d, k, index, verdict, d - 1 > r and 2 * r > d)


@dataclass(frozen=True)
class KernelProfile:
    r: int
    d: int
    degrees: tuple[int, ...]
    in_range: tuple[bool, ...]

    def attaching(self) -> list[int]:
        return [k for k, f in zip(self.degrees, self.in_range) if f]


def kernel_degrees(r: int, d: int, cap: int, check_lie: bool = True) -> KernelProfile:
    """Degrees r + n(r-1), n >= 1, up to ``cap`` where the Hurewicz kernel lives."""
    if r < 2:
        raise ValueError(f"need r >= 2, got r = {r}")
    degs = []
    n = 1
    while r + n * (r - 1) <= cap:
        degs.append(r + n * (r - 1))
        n += 1
    prof = KernelProfile(r, d, tuple(degs), tuple(r < k <= r + d for k in degs))
    if check_lie and not lie_agrees(r, cap):
        raise AssertionError(f"kernel degrees disagree with the free Lie algebra for r={r}")
    return prof


def lie_agrees(r: int, cap: int, generators: int = 2) -> bool:
    """Nonzero bracket components of the free Lie algebra on generators of
    degree r-1 sit exactly at homotopy degrees r + n(r-1)."""
    gens = GradedGenerators.of([r - 1] * generators)
    expected = {r + n * (r - 1) for n in range(1, cap)}
    for k in range(r + 1, cap + 1):
        lie_deg = k - 1
        nonzero = lie_dimension(gens, lie_deg) > 0
        if nonzero != (k in expected):
            return False
    return True


# ---------------------------------------------------------------------------
# vanishing theorem assembly

def _mul(a: float, b: float) -> float:
    if a == 0 or b == 0:
        return 0
    return a * b


def _fmt(x: float) -> str:
    return "inf" if x == INF else str(int(x))


def kunneth_dims(a: Mapping[int, float], b: Mapping[int, float]) -> dict[int, float]:
    out: dict[int, float] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + _mul(x, y)
    return out


@dataclass
class VanishingResult:
    d: int
    verdict: str
    dims: dict[int, float] | None
    tree: list[str]

    def text(self) -> str:
        return "\n".join(self.tree + [f"verdict: {self.verdict}"]) + "\n"


def base_case(radii: Sequence[int] = (2, 3, 4, 5, 6)) -> tuple[dict[int, float], bool, list[str]]:
    """Dimensions of H_*(BF_2; D (x) D) from the truncation windows.

    H_0 is the coinvariant module, infinite dimensional: its window estimates
    keep growing.  It only ever enters the product as a nonzero factor.
    """
    res = tensor_square(dual_fox_resolution(2))
    rep = truncated_homology(res.diagonal, radii)
    dims: dict[int, float] = {}
    ok = True
    lines = []
    for n in res.degrees:
        ests = [r.estimate for r in rep.for_degree(n)]
        if rep.stabilized(n):
            dims[n] = ests[-1]
            tag = "stabilized"
        elif n == 0 and all(b > a for a, b in zip(ests, ests[1:])):
            dims[n] = INF
            tag = "growing"
        else:
            dims[n] = ests[-1]
            tag = "not stabilized"
            ok = False
        lines.append(f"H_{n}(BF_2; D(x)D) = {_fmt(dims[n])}  [window {ests}, {tag}]")
    return dims, ok, lines


def vanishing_assembly(d: int, base_override: Mapping[int, float] | None = None,
                       radii: Sequence[int] = (2, 3, 4, 5, 6)) -> VanishingResult:
    """Decide H_{>0}(BF_2^d; D (x) D) = 0 by Kunneth over the d = 1 case."""
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    tree = [f"goal: H_(>0)(BF_2^{d}; D(x)D) = 0", "base case (d = 1, truncation oracle):"]
    if base_override is not None:
        base = dict(base_override)
        ok = True
        tree.append("  override: " + ", ".join(f"H_{n} = {_fmt(x)}" for n, x in sorted(base.items())))
    else:
        base, ok, lines = base_case(radii)
        tree += ["  " + ln for ln in lines]
    if not ok:
        tree.append("base case not stabilized")
        return VanishingResult(d, "withheld", None, tree)
    dims = dict(base)
    tree.append("induction (D(x)D of F_2^d splits as an exterior tensor product; Kunneth over Q):")
    for e in range(2, d + 1):
        dims = kunneth_dims(dims, base)
        shown = ", ".join(f"H_{n} = {_fmt(x)}" for n, x in sorted(dims.items()))
        tree.append(f"  d = {e}: {shown}")
    positive = {n: x for n, x in dims.items() if n > 0 and x}
    verdict = "vanishes" if not positive else "does not vanish"
    return VanishingResult(d, verdict, dims, tree)
