"""Rank certification: exact Jacobians of focal values and the
tangent-space argument they feed.

At a point of F_p^14 where s_1..s_k vanish, s_{k+1} does not, and the
k x 14 Jacobian of (s_1..s_k) has rank k, the vanishing locus of
(s_1..s_k) has tangent-space codimension k at the point.  A smoothness
lifting argument then gives an irreducible component through the point
that is not contained in the characteristic-p fiber, and since s_{k+1}
is nonzero at the point it cannot vanish identically on the complex
locus.  Conclusion: s_{k+1} is outside the radical of (s_1,...,s_k).
This module checks the three arithmetic hypotheses and only then issues
a Certificate recording them together with the licensed conclusion.

Gradients come from one engine pass over dual numbers (eps^2 = 0, a
14-wide eps part seeded as the identity), which is exact over F_p.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import __version__
from .engine import PolySystem, focal_values
from .rings import DualRing, PrimeField

__all__ = [
    "CERTIFICATE_FORMAT",
    "Certificate",
    "CertificationError",
    "PrefixNotVanishing",
    "NextValueVanishes",
    "RankDeficient",
    "jacobian",
    "rank_mod_p",
    "certify_point",
    "certificate_to_text",
    "parse_certificate",
    "reverify",
]

CERTIFICATE_FORMAT = "focal-certificate/1"


class CertificationError(RuntimeError):
    """One of the three certificate hypotheses failed; str() names it."""


class PrefixNotVanishing(CertificationError):
    def __init__(self, j: int, value: int):
        super().__init__(f"prefix not vanishing at j = {j}: s_{j} = {value}")
        self.j = j
        self.value = value


class NextValueVanishes(CertificationError):
    def __init__(self, index: int):
        super().__init__(f"next value vanishes: s_{index} = 0")
        self.index = index


class RankDeficient(CertificationError):
    def __init__(self, rank: int, k: int):
        super().__init__(f"rank deficient: Jacobian rank {rank} < {k}")
        self.rank = rank
        self.k = k


@dataclass(frozen=True)
class Certificate:
    """Verified arithmetic facts plus the statement they license.

    Only certify_point and reverify construct these; all three facts
    are recomputed first.
    """

    p: int
    coefficients: tuple[int, ...]
    depth: int
    convention: str
    next_value: int
    jacobian_rank: int
    statement: str
    artifact_version: str


def jacobian(coeffs, p: int, k: int, convention: str = "N1") -> list[list[int]]:
    """k x 14 matrix of exact partial derivatives d s_j / d a_i at the
    point, from a single dual-number engine pass."""
    field = PrimeField(p)
    dual = DualRing(field, 14)
    lifted = [dual.variable(field.from_int(c), i) for i, c in enumerate(coeffs)]
    sys = PolySystem.from_coefficients(dual, lifted)
    seq, _ = focal_values(sys, k, convention)
    return [list(dual.gradient(v)) for v in seq.values]


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    """Rank over F_p by Gaussian elimination with exact pivoting."""
    m = [[v % p for v in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    col = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        row_r = [v * inv % p for v in m[rank]]
        m[rank] = row_r
        for r in range(len(m)):
            if r != rank and m[r][col]:
                factor = m[r][col]
                m[r] = [(a - factor * b) % p for a, b in zip(m[r], row_r)]
        rank += 1
        if rank == len(m):
            break
    return rank


def _statement(p: int, k: int, next_value: int) -> str:
    text = (
        f"At this point of F_{p}^14 the focal values s_1..s_{k} vanish, "
        f"s_{k + 1} = {next_value} is nonzero, and the Jacobian of (s_1..s_{k}) "
        f"has full rank {k}, so the vanishing locus of (s_1..s_{k}) has "
        f"tangent-space codimension {k} here. An irreducible component of that "
        f"locus therefore passes through the point without being confined to "
        f"characteristic {p}, and s_{k + 1}, nonzero at the point, cannot vanish "
        f"identically on the complex locus: s_{k + 1} lies outside the radical of "
        f"the ideal (s_1,...,s_{k})."
    )
    if k == 11:
        text += (
            " In particular m(3) >= 12: vanishing of eleven focal values does "
            "not force a cubic center."
        )
    return text


def certify_point(coeffs, p: int, k: int, convention: str = "N1") -> Certificate:
    """Recompute s_1..s_{k+1} and the Jacobian rank; issue a Certificate
    iff all three hypotheses hold, else raise the failed one."""
    coeffs = tuple(int(c) % p for c in coeffs)
    if len(coeffs) != 14:
        raise ValueError("certification handles the 14-coefficient cubic layout")
    field = PrimeField(p)
    sys = PolySystem.cubic(field, coeffs)
    # check the prefix before asking for s_{k+1}, whose computation
    # needs a slightly larger modulus bound
    seq, _ = focal_values(sys, k, convention)
    for j, value in enumerate(seq.values, start=1):
        if value != 0:
            raise PrefixNotVanishing(j, value)
    next_value = focal_values(sys, k + 1, convention)[0].values[k]
    if next_value == 0:
        raise NextValueVanishes(k + 1)
    rank = rank_mod_p(jacobian(coeffs, p, k, convention), p)
    if rank != k:
        raise RankDeficient(rank, k)
    return Certificate(
        p=p, coefficients=coeffs, depth=k, convention=convention,
        next_value=next_value, jacobian_rank=rank,
        statement=_statement(p, k, next_value),
        artifact_version=__version__,
    )


def certificate_to_text(cert: Certificate) -> str:
    """Fixed field order, decimal residues; bit-exact for equal inputs."""
    lines = [
        f"format: {CERTIFICATE_FORMAT}",
        f"artifact_version: {cert.artifact_version}",
        f"prime: {cert.p}",
        f"convention: {cert.convention}",
        "coefficients: " + " ".join(str(c) for c in cert.coefficients),
        f"depth: {cert.depth}",
        f"vanishing: s_1..s_{cert.depth} = 0 mod {cert.p}",
        f"next_index: {cert.depth + 1}",
        f"next_value: {cert.next_value}",
        f"jacobian_rank: {cert.jacobian_rank}",
        f"statement: {cert.statement}",
    ]
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    fields = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(": ")
        if not sep:
            raise ValueError(f"malformed certificate line: {line!r}")
        fields[key] = value
    if fields.get("format") != CERTIFICATE_FORMAT:
        raise ValueError(f"unsupported certificate format {fields.get('format')!r}")
    try:
        return Certificate(
            p=int(fields["prime"]),
            coefficients=tuple(int(c) for c in fields["coefficients"].split()),
            depth=int(fields["depth"]),
            convention=fields["convention"],
            next_value=int(fields["next_value"]),
            jacobian_rank=int(fields["jacobian_rank"]),
            statement=fields["statement"],
            artifact_version=fields["artifact_version"],
        )
    except KeyError as exc:
        raise ValueError(f"certificate is missing field {exc}") from exc


def reverify(cert: Certificate) -> Certificate:
    """Recompute everything from the certificate's own inputs.

    Returns the freshly issued certificate; raises CertificationError
    if any recorded fact no longer holds, or ValueError if the recorded
    values disagree with the recomputation.
    """
    fresh = certify_point(cert.coefficients, cert.p, cert.depth, cert.convention)
    if fresh.next_value != cert.next_value:
        raise ValueError(
            f"recorded next value {cert.next_value} but recomputed {fresh.next_value}"
        )
    if fresh.jacobian_rank != cert.jacobian_rank:
        raise ValueError(
            f"recorded rank {cert.jacobian_rank} but recomputed {fresh.jacobian_rank}"
        )
    return fresh
