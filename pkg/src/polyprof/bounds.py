"""Closed-form counting bounds for ReLU networks, evaluated exactly.

All binomial sums use Python integers; ratios are ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from polyprof.errors import InvalidInput, UnknownSetting


def _binom_sum(m: int, upto: int) -> int:
    """sum_{i=0}^{upto} C(m, i)."""
    return sum(comb(m, i) for i in range(0, upto + 1))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidInput(msg)


def zaslavsky_regions(m: int, n: int) -> int:
    """Maximum number of regions of m hyperplanes in R^n (attained in general position)."""
    _require(m >= 0 and n >= 0, "m and n must be >= 0")
    return _binom_sum(m, n)


def central_regions(m: int, n: int) -> int:
    """Regions of m generic hyperplanes through the origin of R^n."""
    _require(m >= 1 and n >= 1, "m and n must be >= 1")
    return comb(m - 1, n - 1) + _binom_sum(m, n - 1)


def one_layer_faces_upper(d: int, n: int) -> int:
    """Total facets over all regions of a d-n-1 net in a box: every neuron
    hyperplane and box facet is cut into at most Zaslavsky-many pieces, each
    shared by two regions."""
    _require(d >= 1 and n >= 1, "d and n must be >= 1")
    return 2 * n * _binom_sum(n - 1, d - 1) + 2 * d * _binom_sum(n, d - 1)


def one_layer_simplices_upper(d: int, n: int) -> int:
    return one_layer_faces_upper(d, n)


def one_layer_simplices_lower(d: int, n: int) -> int:
    """floor(2n/(d+1) * sum_{i<d} C(n-1, i))."""
    _require(d >= 1 and n >= 1, "d and n must be >= 1")
    return (2 * n * _binom_sum(n - 1, d - 1)) // (d + 1)


def multilayer_regions_upper(d: int, widths: Sequence[int]) -> int:
    """prod_i sum_{j<=m_i} C(n_i, j) with m_i = min(d, n_1, ..., n_i)."""
    widths = list(widths)
    _require(d >= 1 and len(widths) >= 1 and all(w >= 1 for w in widths), "need d >= 1 and positive widths")
    total = 1
    m = d
    for n in widths:
        m = min(m, n)
        total *= _binom_sum(n, m)
    return total


def multilayer_faces_upper(d: int, widths: Sequence[int]) -> int:
    """Face recursion over layers.

    F_1 is the one-layer face bound; adding layer l with n_l neurons to a
    network with R regions and F faces gives
    F' = 2 n_l sum_{i<d} C(n_l - 1, i) * R + sum_{i<d} C(n_l, i) * F,
    with R from the product region bound.
    """
    widths = list(widths)
    _require(d >= 1 and len(widths) >= 1 and all(w >= 1 for w in widths), "need d >= 1 and positive widths")
    faces = one_layer_faces_upper(d, widths[0])
    for i in range(1, len(widths)):
        n = widths[i]
        regions = multilayer_regions_upper(d, widths[:i])
        faces = 2 * n * _binom_sum(n - 1, d - 1) * regions + _binom_sum(n, d - 1) * faces
    return faces


def regions_as_simplices_lower(d: int, widths: Sequence[int]) -> int:
    """prod_{l<L} floor(n_l/d)^d * sum_{j<=d} C(n_L, j): a region-count lower
    bound, used as a simplex lower bound since every region holds >= 1 simplex."""
    widths = list(widths)
    _require(d >= 1 and len(widths) >= 1 and all(w >= 1 for w in widths), "need d >= 1 and positive widths")
    prod = 1
    for n in widths[:-1]:
        prod *= (n // d) ** d
    return prod * _binom_sum(widths[-1], d)


def multilayer_asymptotic_upper(d: int, n: int, L: int) -> Fraction:
    """Leading term 2 n^{dL} / ((d-1)! (d!)^{L-1})."""
    return Fraction(2 * n ** (d * L), factorial(d - 1) * factorial(d) ** (L - 1))


def multilayer_simplices_bounds(d: int, n: int, L: int) -> tuple[int, int]:
    """(upper, lower) for L hidden layers of width n."""
    _require(d >= 1 and n >= 1 and L >= 1, "d, n and L must be >= 1")
    widths = [n] * L
    return multilayer_faces_upper(d, widths), regions_as_simplices_lower(d, widths)


AVG_FACE_SETTINGS = ("one_layer", "multilayer_d2", "zero_bias", "lowrank_multilayer", "lowrank_one_layer")


def avg_face_bound(setting: str, d: int | None = None, d0: int | None = None) -> Fraction:
    """Asymptotic bound on the mean number of facets per region."""
    if setting == "one_layer":
        _require(d is not None and d >= 1, "one_layer needs d >= 1")
        return Fraction(2 * d + 1)
    if setting == "multilayer_d2":
        return Fraction(4)
    if setting == "zero_bias":
        _require(d is not None and d >= 1, "zero_bias needs d >= 1")
        return Fraction(3 * d - 1)
    if setting == "lowrank_multilayer":
        _require(d is not None and d0 is not None and 1 <= d0 <= d, "lowrank_multilayer needs 1 <= d0 <= d")
        return Fraction(2 * d0 + d - 1)
    if setting == "lowrank_one_layer":
        _require(d0 is not None and d0 >= 1, "lowrank_one_layer needs d0 >= 1")
        return Fraction(2 * d0 + 1)
    raise UnknownSetting(f"unknown average-face setting {setting!r}")


def one_layer_face_ratio(d: int, n: int) -> Fraction:
    """Finite-n value of the one-layer argument: face bound over the general-position region count."""
    return Fraction(one_layer_faces_upper(d, n), zaslavsky_regions(n, d))


def param_count(widths: Sequence[int]) -> int:
    widths = list(widths)
    _require(len(widths) >= 2 and all(w >= 1 for w in widths), "need >= 2 positive widths")
    return sum(a * b + b for a, b in zip(widths[:-1], widths[1:]))


@dataclass(frozen=True)
class BoundsReport:
    arch: tuple[int, ...]
    rank: int | None = None
    zero_bias: bool = False
    values: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.arch[0]

    @property
    def hidden(self) -> tuple[int, ...]:
        return self.arch[1:-1]

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else v.numerator
            return v

        return {
            "arch": "-".join(map(str, self.arch)),
            "rank": self.rank,
            "zero_bias": self.zero_bias,
            "values": {k: enc(v) for k, v in self.values.items()},
        }


def bounds_report(arch: Sequence[int], rank: int | None = None, zero_bias: bool = False) -> BoundsReport:
    """Every bound that applies to ``arch`` (input width first, output last)."""
    arch = tuple(int(a) for a in arch)
    _require(len(arch) >= 3, "architecture needs input, hidden and output widths")
    d, hidden = arch[0], list(arch[1:-1])
    L = len(hidden)
    v: dict = {}
    v["simplices_upper"] = multilayer_faces_upper(d, hidden)
    if L == 1:
        v["simplices_lower"] = one_layer_simplices_lower(d, hidden[0])
        v["one_layer_face_ratio"] = one_layer_face_ratio(d, hidden[0])
    v["regions_as_simplices_lower"] = regions_as_simplices_lower(d, hidden)
    v["regions_upper"] = multilayer_regions_upper(d, hidden)
    v["zaslavsky_first_layer"] = zaslavsky_regions(hidden[0], d)
    if zero_bias:
        v["central_first_layer"] = central_regions(hidden[0], d)
    if len(set(hidden)) == 1:
        v["asymptotic_upper"] = multilayer_asymptotic_upper(d, hidden[0], L)
    v["params"] = param_count(arch)
    if L == 1:
        v["avg_faces_one_layer"] = avg_face_bound("one_layer", d)
    if d == 2:
        v["avg_faces_multilayer_d2"] = avg_face_bound("multilayer_d2")
    v["avg_faces_zero_bias"] = avg_face_bound("zero_bias", d)
    if rank is not None:
        _require(1 <= rank <= d, "rank must satisfy 1 <= rank <= d")
        v["avg_faces_lowrank_multilayer"] = avg_face_bound("lowrank_multilayer", d, rank)
        v["avg_faces_lowrank_one_layer"] = avg_face_bound("lowrank_one_layer", d0=rank)
    return BoundsReport(arch, rank, zero_bias, v)


def format_table(reports: Sequence[BoundsReport], enumerated: dict | None = None) -> str:
    """Aligned text table: one column per architecture, rows upper / enumerated / lower."""
    enumerated = enumerated or {}
    header = [""] + ["-".join(map(str, r.arch)) for r in reports]
    rows = [header, ["Upper bound"] + [str(r.values["simplices_upper"]) for r in reports]]
    if enumerated:
        rows.append(["Enumerated"] + [str(enumerated.get(r.arch, "-")) for r in reports])
    rows.append(
        ["Lower bound"]
        + [str(r.values.get("simplices_lower", r.values["regions_as_simplices_lower"])) for r in reports]
    )
    extra = sorted({k for r in reports for k in r.values} - {"simplices_upper", "simplices_lower"})
    for key in extra:
        cells = []
        for r in reports:
            val = r.values.get(key)
            cells.append("-" if val is None else str(val))
        rows.append([key] + cells)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for j, row in enumerate(rows):
        lines.append(" | ".join(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i]) for i, cell in enumerate(row)))
        if j == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines)
