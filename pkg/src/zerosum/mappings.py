"""Complete mappings of finite Abelian groups.

A complete mapping is a bijection phi such that g -> g + phi(g) is also a
bijection; then psi(g) = -(g + phi(g)) is a third bijection and
g + phi(g) + psi(g) = 0 for every g.

Construction, on digit vectors:

* a group of odd order uses the identity (g -> 2g is onto);
* equal-exponent blocks (Z_{2^e})^k with k >= 2 use a linear map whose matrix
  M and I + M are both invertible mod 2;
* Z_m x Z_2 uses an explicit map;
* anything else is lifted from a subgroup N and the quotient G/N, both of
  which already have complete mappings:
  phi(rep(q) + n) = rep(phi_Q(q)) + phi_N(n).

Every result is certified before it is returned.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec

__all__ = ["UniqueInvolution", "CompleteMapping", "complete_mapping", "is_complete_mapping"]


class UniqueInvolution(ValueError):
    """The group has exactly one involution, so no complete mapping exists."""


@dataclass(frozen=True)
class CompleteMapping:
    group: GroupSpec
    phi: np.ndarray  # phi[code] = code of the image
    method: str

    @property
    def theta(self) -> np.ndarray:
        return self.group.add_codes(self.group.all_codes(), self.phi)

    @property
    def psi(self) -> np.ndarray:
        return self.group.neg_codes(self.theta)

    def __call__(self, code: int) -> int:
        return int(self.phi[code])

    def certify(self) -> bool:
        return is_complete_mapping(self.group, self.phi)


def is_complete_mapping(group: GroupSpec, phi: np.ndarray) -> bool:
    n = group.order
    phi = np.asarray(phi, dtype=np.int64)
    if phi.shape != (n,) or phi.min() < 0 or phi.max() >= n:
        return False
    theta = group.add_codes(group.all_codes(), phi)
    return bool(np.all(np.bincount(phi, minlength=n) == 1) and np.all(np.bincount(theta, minlength=n) == 1))


def _is_pow2(m: int) -> bool:
    return m & (m - 1) == 0


def complete_mapping(group: GroupSpec) -> CompleteMapping:
    """A certified complete mapping of ``group``.

    Raises :class:`UniqueInvolution` for groups whose Sylow 2-subgroup is
    cyclic and non-trivial.
    """
    if any(m % 2 == 0 and not _is_pow2(m) for m in group.moduli):
        raise ValueError("write the group with prime-power cyclic factors (e.g. Z2xZ3, not Z6)")
    if group.involution_count() == 1:
        raise UniqueInvolution(f"{group} has a unique involution and admits no complete mapping")
    two = [i for i, m in enumerate(group.moduli) if m % 2 == 0]
    dig = group.digits(group.all_codes())
    out = dig.copy()  # odd coordinates: identity
    method = "identity"
    if two:
        mods = tuple(group.moduli[i] for i in two)
        out[:, two], method = _phi_digits(mods, dig[:, two])
    phi = group.from_digits(out)
    cm = CompleteMapping(group, phi, method)
    if not cm.certify():  # pragma: no cover - construction invariant
        raise AssertionError(f"complete mapping construction failed for {group}")
    return cm


# -- digit-level constructions ---------------------------------------------------


def _linear_matrix(k: int) -> np.ndarray:
    if k == 2:
        # (x, y) -> (y, x + y)
        return np.array([[0, 1], [1, 1]], dtype=np.int64)
    # companion matrix of x^k + x + 1: det M = +-1 and det(I + M) = +-1
    M = np.zeros((k, k), dtype=np.int64)
    M[np.arange(1, k), np.arange(k - 1)] = 1
    M[0, k - 1] = -1
    M[1, k - 1] = -1
    return M


def _linear(m: int, D: np.ndarray) -> np.ndarray:
    M = _linear_matrix(D.shape[1])
    return (D @ M.T) % m


def _z_times_z2(m: int, D: np.ndarray) -> np.ndarray:
    # phi(x, 0) = (x, h(x)), phi(x, 1) = (x + 1, 1 + h(x + 1)), h(x) = [x < m/2]
    x, y = D[:, 0], D[:, 1]
    nx = (x + y) % m
    h = (nx < m // 2).astype(np.int64)
    return np.stack([nx, (h + y) % 2], axis=1)


def _extend(moduli, divisors, D, label):
    """Lift from N = frame(divisors) and G/N, both handled recursively."""
    d = np.array(divisors, dtype=np.int64)
    q, n = D % d, D // d
    nk = [i for i, (m, di) in enumerate(zip(moduli, divisors)) if m // di > 1]
    qk = [i for i, di in enumerate(divisors) if di > 1]
    nq = np.zeros_like(n)
    nq[:, nk], a = _phi_digits(tuple(moduli[i] // divisors[i] for i in nk), n[:, nk])
    qq = np.zeros_like(q)
    qq[:, qk], b = _phi_digits(tuple(divisors[i] for i in qk), q[:, qk])
    return qq + d * nq, f"{label}[{a} | {b}]"


def _phi_digits(moduli: tuple[int, ...], D: np.ndarray):
    r = len(moduli)
    counts = Counter(moduli)
    if all(c >= 2 for c in counts.values()):
        out = np.empty_like(D)
        for m in counts:
            cols = [i for i in range(r) if moduli[i] == m]
            out[:, cols] = _linear(m, D[:, cols])
        return out, "linear"
    big = [i for i, m in enumerate(moduli) if m >= 4]
    if len(big) >= 2:
        # N = elements of order <= 2, G/N halves every coordinate
        return _extend(moduli, tuple(m // 2 for m in moduli), D, "ext")
    # exactly one factor Z_{2^a}, a >= 2, and k >= 1 factors Z2
    i0 = big[0]
    rest = [i for i in range(r) if i != i0]
    m = moduli[i0]
    out = np.empty_like(D)
    if len(rest) == 1:
        out[:, [i0, rest[0]]] = _z_times_z2(m, D[:, [i0, rest[0]]])
        return out, "cyclic-by-2"
    if len(rest) >= 3:
        out[:, [i0, rest[0]]] = _z_times_z2(m, D[:, [i0, rest[0]]])
        out[:, rest[1:]] = _linear(2, D[:, rest[1:]])
        return out, "cyclic-by-2 x linear"
    # Z_m x Z2 x Z2: N = <(m/2)e_0, e_1>, G/N = Z_{m/2} x Z2
    divisors = [1] * r
    divisors[i0] = m // 2
    divisors[rest[1]] = 2
    return _extend(moduli, tuple(divisors), D, "ext")
