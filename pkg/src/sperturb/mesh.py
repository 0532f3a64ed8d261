"""Layer-adapted partitions of [-1, 1].

All layer-adapted kinds are S-type meshes: N/4 elements in each layer
region, placed by a mesh-generating function phi, and N/2 uniform elements
on the coarse middle part.  Only the left half is computed; the right half
is its mirror image, which makes the symmetry x_i = -x_{N-i} exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadN, BadPartition, DomainError
from .problem import Problem

# tolerance for deciding the lambda = 1/4 branch
_TIE_TOL = 1e-15


class MeshKind(str, enum.Enum):
    SHISHKIN = "shishkin"
    EXP = "exp"
    BAKHVALOV_SHISHKIN = "bs"
    UNIFORM = "uniform"

    @property
    def alpha(self) -> Optional[float]:
        return {"shishkin": 1.0, "exp": 0.5, "bs": 1.0}.get(self.value)

    @classmethod
    def parse(cls, value) -> "MeshKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown mesh kind {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


def _phi(kind: MeshKind, N: int, t):
    t = np.asarray(t, dtype=float)
    if kind is MeshKind.SHISHKIN:
        return 2.0 * t * math.log(N)
    if kind is MeshKind.EXP:
        return -np.log1p(-2.0 * t * (1.0 - 2.0 / N))
    if kind is MeshKind.BAKHVALOV_SHISHKIN:
        return -np.log1p(-2.0 * t * (1.0 - 1.0 / N))
    raise DomainError("the uniform mesh has no mesh-generating function")


def mesh_char(kind, N: int, t: float) -> tuple[float, float]:
    """Return ``(phi(t), exp(-phi(t)))`` for ``t`` in [0, 1/2]."""
    kind = MeshKind.parse(kind)
    if not (0.0 <= t <= 0.5):
        raise DomainError(f"t must lie in [0, 1/2], got {t!r}")
    phi = float(_phi(kind, N, t))
    return phi, math.exp(-phi)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Nodes x_0 < ... < x_N and element lengths h_i = x_i - x_{i-1}.

    ``h`` is the difference of the stored nodes, so it describes the rounded
    partition that every FE function and network actually lives on.  Near
    the endpoints doubles are 2.2e-16 apart, which bounds the absolute
    accuracy of the smallest layer elements.
    """

    kind: Optional[MeshKind]
    N: int
    epsilon: float
    theta: float
    lam: Optional[float]
    nodes: np.ndarray
    h: np.ndarray
    # True when theta*eps*phi(1/2) >= 1/4 and three uniform patches were used
    fallback: bool = False

    @property
    def layer_adapted(self) -> bool:
        """Whether the lambda < 1/4 branch is active."""
        return self.kind not in (None, MeshKind.UNIFORM) and not self.fallback

    @property
    def transition_points(self) -> Optional[tuple[float, float]]:
        if self.lam is None:
            return None
        return -1.0 + self.lam, 1.0 - self.lam


def _check_N(N) -> int:
    if isinstance(N, bool) or int(N) != N:
        raise BadN(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 4 or N % 4:
        raise BadN(f"N must be >= 4 and divisible by 4, got {N}")
    return N


def build_mesh(kind, N: int, problem: Problem) -> Mesh:
    kind = MeshKind.parse(kind)
    N = _check_N(N)
    eps, theta = problem.epsilon, problem.theta
    half = N // 2
    quarter = N // 4
    left = np.empty(half + 1)

    if kind is MeshKind.UNIFORM:
        left[:] = -1.0 + 2.0 * np.arange(half + 1) / N
        lam, fallback = None, False
    else:
        # theta*eps*phi(1/2): theta*eps*ln N (Shishkin, B-S), theta*eps*ln(N/2) (eXp)
        lam = theta * eps * float(_phi(kind, N, 0.5))
        fallback = lam >= 0.25 - _TIE_TOL
        i = np.arange(quarter + 1)
        if fallback:
            lam = 0.25
            left[: quarter + 1] = -1.0 + lam * i / quarter
        else:
            left[: quarter + 1] = -1.0 + theta * eps * _phi(kind, N, 2.0 * i / N)
        j = np.arange(quarter + 1, half + 1)
        left[quarter + 1 :] = (4.0 * j / N) * (1.0 - lam) - 2.0 + 2.0 * lam
    left[half] = 0.0

    nodes = np.concatenate([left, -left[-2::-1]])
    nodes[0], nodes[-1] = -1.0, 1.0
    h = np.diff(nodes)
    if np.any(h <= 0.0):
        raise BadN(f"degenerate mesh for kind={kind.value}, N={N}, eps={eps}")
    return Mesh(kind, N, eps, theta, lam, nodes, h, fallback)


def uniform_mesh(N: int) -> Mesh:
    """Uniform partition that does not need a Problem."""
    N = _check_N(N)
    half = N // 2
    left = -1.0 + 2.0 * np.arange(half + 1) / N
    left[half] = 0.0
    nodes = np.concatenate([left, -left[-2::-1]])
    return Mesh(MeshKind.UNIFORM, N, float("nan"), float("nan"), None, nodes, np.diff(nodes))


def mesh_from_nodes(nodes) -> Mesh:
    """Wrap an arbitrary strictly increasing partition; ``kind`` is None."""
    nodes = np.asarray(nodes, dtype=float)
    h = np.diff(nodes)
    if nodes.ndim != 1 or nodes.size < 2 or np.any(h <= 0.0):
        raise BadPartition("nodes must be strictly increasing")
    return Mesh(None, nodes.size - 1, float("nan"), float("nan"), None, nodes, h)


def mesh_csv(mesh: Mesh) -> str:
    """CSV dump ``i,x_i,h_i`` with h_0 empty."""
    lines = ["i,x_i,h_i"]
    for i, x in enumerate(mesh.nodes):
        h = "" if i == 0 else f"{mesh.h[i - 1]:.17g}"
        lines.append(f"{i},{x:.17g},{h}")
    return "\n".join(lines) + "\n"
