"""Groups of Heisenberg type in logarithmic coordinates (z, sigma)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "HTypeGroup",
    "GroupPoint",
    "HTypeReport",
    "validate_h_type",
    "make_standard_group",
    "heisenberg",
    "quaternionic",
    "multiply",
    "inverse",
    "dilate",
    "gauge",
    "gauge_from_norms",
    "group_from_json",
    "group_to_json",
]

_TOL = 1e-12


@dataclass(frozen=True)
class GroupPoint:
    """Point (z, sigma) with z in R^m and sigma in R^k."""

    z: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z, dtype=float)).copy()
        s = np.atleast_1d(np.asarray(self.sigma, dtype=float)).copy()
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(s))):
            raise ValueError("group point entries must be finite")
        z.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "sigma", s)

    @property
    def z_norm(self) -> float:
        return float(np.linalg.norm(self.z))

    @property
    def sigma_norm(self) -> float:
        return float(np.linalg.norm(self.sigma))

    def is_identity(self) -> bool:
        return not (np.any(self.z) or np.any(self.sigma))


@dataclass
class HTypeReport:
    passed: bool
    messages: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def validate_h_type(J: Sequence, n_random: int = 20, seed: int = 0) -> HTypeReport:
    """Check the Kaplan structure: skew matrices with J(lam)^2 = -|lam|^2 I."""
    mats = [np.asarray(a, dtype=float) for a in J]
    if not mats:
        raise ValueError("need at least one structure matrix")
    m = mats[0].shape[0]
    for a in mats:
        if a.ndim != 2 or a.shape != (m, m):
            raise ValueError("structure matrices must be square and of equal size")
    msgs = []
    for idx, a in enumerate(mats):
        if not np.array_equal(a, -a.T):
            msgs.append(f"J_{idx + 1} is not skew-symmetric")
    k = len(mats)
    eye = np.eye(m)
    stack = np.stack(mats)
    rng = np.random.default_rng(seed)
    lams = list(np.eye(k))
    for _ in range(n_random):
        v = rng.normal(size=k)
        lams.append(v / np.linalg.norm(v))
    for lam in lams:
        jl = np.tensordot(lam, stack, axes=1)
        dev = np.max(np.abs(jl @ jl + np.dot(lam, lam) * eye))
        if dev > _TOL:
            msgs.append(f"H-type identity fails (deviation {dev:.2e}) for lambda={np.round(lam, 6).tolist()}")
            break
    return HTypeReport(passed=not msgs, messages=msgs)


@dataclass(frozen=True)
class HTypeGroup:
    """Group of Heisenberg type with first layer R^m and centre R^k."""

    J: tuple
    name: str = "custom"

    def __post_init__(self):
        mats = tuple(np.array(a, dtype=float) for a in self.J)
        for a in mats:
            a.setflags(write=False)
        object.__setattr__(self, "J", mats)
        rep = validate_h_type(mats)
        if not rep:
            raise ValueError("; ".join(rep.messages))

    @property
    def m(self) -> int:
        return self.J[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.J)

    @property
    def Q(self) -> int:
        return self.m + 2 * self.k

    def J_of(self, lam) -> np.ndarray:
        """Kaplan map J(lambda) = sum_l lambda_l J_l."""
        return np.tensordot(np.asarray(lam, dtype=float), np.stack(self.J), axes=1)

    def point(self, z, sigma) -> GroupPoint:
        g = GroupPoint(z, sigma)
        _check(self, g)
        return g

    def identity(self) -> GroupPoint:
        return GroupPoint(np.zeros(self.m), np.zeros(self.k))

    def descriptor(self) -> dict:
        return {"name": self.name, "m": self.m, "k": self.k}


def _check(G: HTypeGroup, g: GroupPoint) -> None:
    if g.z.shape != (G.m,) or g.sigma.shape != (G.k,):
        raise ValueError(
            f"point dimensions ({g.z.size}, {g.sigma.size}) do not match group ({G.m}, {G.k})"
        )


_SYMPLECTIC = np.array([[0.0, 1.0], [-1.0, 0.0]])


def heisenberg(n: int = 1) -> HTypeGroup:
    """Heisenberg group of dimension 2n + 1 with block symplectic J."""
    if n < 1:
        raise ValueError("n must be >= 1")
    J = np.kron(np.eye(n), _SYMPLECTIC)
    return HTypeGroup((J,), name=f"heisenberg({n})")


def _quaternion_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


def _quaternion_left(unit: int) -> np.ndarray:
    # matrix of q -> u q for u in {i, j, k}, basis (1, i, j, k)
    u = np.eye(4)[unit]
    return np.column_stack([_quaternion_product(u, e) for e in np.eye(4)])


def quaternionic() -> HTypeGroup:
    """Quaternionic H-type group, m = 4, k = 3."""
    return HTypeGroup(tuple(_quaternion_left(u) for u in (1, 2, 3)), name="quaternionic")


def make_standard_group(kind: str, n: int = 1) -> HTypeGroup:
    """Build ``"heisenberg"`` (with ``n``) or ``"quaternionic"``."""
    kind = kind.lower()
    if kind == "heisenberg":
        return heisenberg(n)
    if kind == "quaternionic":
        return quaternionic()
    raise ValueError(f"unknown group kind {kind!r}")


def _bracket(G: HTypeGroup, z: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    # components <J_l z, zeta>
    return np.array([float(np.dot(a @ z, zeta)) for a in G.J])


def multiply(G: HTypeGroup, g: GroupPoint, h: GroupPoint) -> GroupPoint:
    """Group law (z + zeta, sigma + tau + 1/2 sum_l <J_l z, zeta> e_l)."""
    _check(G, g)
    _check(G, h)
    return GroupPoint(g.z + h.z, g.sigma + h.sigma + 0.5 * _bracket(G, g.z, h.z))


def inverse(G: HTypeGroup, g: GroupPoint) -> GroupPoint:
    _check(G, g)
    return GroupPoint(-g.z, -g.sigma)


def dilate(G: HTypeGroup, lam: float, g: GroupPoint) -> GroupPoint:
    """Anisotropic dilation (lam z, lam^2 sigma)."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    _check(G, g)
    return GroupPoint(lam * g.z, lam * lam * g.sigma)


def gauge(G: HTypeGroup, g: GroupPoint) -> float:
    """Homogeneous gauge (|z|^4 + 16 |sigma|^2)^(1/4)."""
    _check(G, g)
    return gauge_from_norms(g.z_norm, g.sigma_norm)


def gauge_from_norms(z_norm: float, sigma_norm: float) -> float:
    return (z_norm**4 + 16.0 * sigma_norm**2) ** 0.25


def group_to_json(G: HTypeGroup) -> str:
    return json.dumps({"m": G.m, "k": G.k, "J": [a.tolist() for a in G.J]})


def group_from_json(text: str) -> HTypeGroup:
    data = json.loads(text)
    J = data["J"]
    G = HTypeGroup(tuple(np.asarray(a, dtype=float) for a in J), name=data.get("name", "custom"))
    if "m" in data and int(data["m"]) != G.m:
        raise ValueError("descriptor m does not match the matrices")
    if "k" in data and int(data["k"]) != G.k:
        raise ValueError("descriptor k does not match the number of matrices")
    return G
