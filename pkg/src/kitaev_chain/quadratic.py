"""Majorana coupling matrix of the Kitaev chain and its canonical decomposition.

The chain Hamiltonian

    H = sum_j [ -w (c+_j c_{j+1} + c+_{j+1} c_j) - mu (n_j - 1/2)
                + D c_j c_{j+1} + conj(D) c+_{j+1} c+_j ],    D = |D| e^{i phi},

is quadratic in the 2N Majorana operators attached to the sites,

    gamma_{2j-1} = e^{i phi/2} c_j + e^{-i phi/2} c+_j,
    gamma_{2j}   = -i e^{i phi/2} c_j + i e^{-i phi/2} c+_j,

and can be written as H = (i/4) sum_{kl} A_{kl} gamma_k gamma_l with a real
antisymmetric coupling matrix A that does not depend on phi.  This module
builds A, reduces it to canonical 2x2 blocks with an orthogonal transformation
(real Schur form), evaluates closed-form single-body energies of the periodic
chain, and combines single-body energies into many-body eigenenergies.

Indices in this module are 0-based: Majorana mode k (0 <= k < 2N) belongs to
site k // 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import schur as _real_schur

__all__ = [
    "KitaevParams",
    "CouplingMatrix",
    "MajoranaSchur",
    "as_occupation",
    "build_coupling_matrix",
    "schur_decompose",
    "block_diagonal_form",
    "analytic_periodic_energies",
    "eigenenergy",
]

#: Relative scale of the zero-mode threshold used for degeneracy *flags*.
ZERO_MODE_RTOL = 1e-12


@dataclass(frozen=True)
class KitaevParams:
    """Physical and boundary parameters of a Kitaev chain.

    Attributes
    ----------
    n_sites : int
        Number of sites N, at least 2.
    hopping : float
        Hopping amplitude w.
    chemical_potential : float
        Chemical potential mu.
    pairing_magnitude : float
        Pairing magnitude |D| >= 0.
    pairing_phase : float
        Pairing phase phi in [0, 2*pi); the complex pairing is |D| e^{i phi}.
    boundary : str
        Either ``"open"`` or ``"periodic"``.
    """

    n_sites: int
    hopping: float
    chemical_potential: float
    pairing_magnitude: float
    pairing_phase: float = 0.0
    boundary: str = "open"

    def __post_init__(self) -> None:
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        if self.pairing_magnitude < 0:
            raise ValueError("pairing_magnitude must be non-negative")
        if not 0.0 <= self.pairing_phase < 2.0 * np.pi:
            raise ValueError("pairing_phase must lie in [0, 2*pi)")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    @property
    def pairing(self) -> complex:
        """Complex pairing amplitude |D| e^{i phi}."""
        return self.pairing_magnitude * np.exp(1j * self.pairing_phase)


@dataclass(frozen=True)
class CouplingMatrix:
    """Real antisymmetric Majorana coupling matrix A of even dimension 2N."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("coupling matrix must be square")
        if entries.shape[0] % 2 != 0:
            raise ValueError("coupling matrix dimension must be even (two modes per site)")
        scale = max(1.0, np.abs(entries).max(initial=0.0))
        if np.abs(entries + entries.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("coupling matrix must be antisymmetric")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_sites(self) -> int:
        return self.dim // 2


@dataclass(frozen=True)
class MajoranaSchur:
    """Canonical block decomposition W A W^T = blockdiag([[0, eps], [-eps, 0]]).

    Attributes
    ----------
    w_matrix : np.ndarray
        Real orthogonal 2N x 2N matrix; row 2k (resp. 2k+1) holds the
        coefficients of the diagonal Majorana mode paired with energy
        ``epsilons[k]``.
    epsilons : np.ndarray
        N non-negative single-body energies in non-increasing order (zero
        modes last).
    zero_tol : float
        Absolute threshold below which an epsilon is *flagged* (never
        altered) as a zero mode.
    """

    w_matrix: np.ndarray
    epsilons: np.ndarray
    zero_tol: float

    def __post_init__(self) -> None:
        w = np.array(self.w_matrix, dtype=float)
        eps = np.array(self.epsilons, dtype=float)
        w.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "w_matrix", w)
        object.__setattr__(self, "epsilons", eps)

    @property
    def n_sites(self) -> int:
        return self.w_matrix.shape[0] // 2

    @property
    def n_zero_modes(self) -> int:
        return int(np.count_nonzero(self.epsilons < self.zero_tol))

    @property
    def is_degenerate(self) -> bool:
        return self.n_zero_modes > 0

    def block_diagonal(self) -> np.ndarray:
        """The canonical block-diagonal form this decomposition attains."""
        return block_diagonal_form(self.epsilons)


def as_occupation(bits: Sequence[int], n_sites: int) -> np.ndarray:
    """Validate and return an occupation pattern as an integer array.

    Parameters
    ----------
    bits : sequence of int
        One entry per diagonal fermionic mode, each 0 or 1.
    n_sites : int
        Expected length N.
    """
    occ = np.asarray(bits, dtype=int)
    if occ.ndim != 1 or occ.size != n_sites:
        raise ValueError(f"occupation pattern must have length {n_sites}, got shape {occ.shape}")
    if not np.isin(occ, (0, 1)).all():
        raise ValueError("occupation entries must be 0 or 1")
    return occ


def build_coupling_matrix(params: KitaevParams) -> CouplingMatrix:
    """Build the Majorana coupling matrix A of a Kitaev chain.

    For each site j (0-based) the on-site term contributes
    ``A[2j, 2j+1] += -mu``, and each bond (j, j+1) contributes
    ``A[2j, 2j+3] += |D| - w`` and ``A[2j+1, 2j+2] += |D| + w``, with the
    antisymmetric partner updated alongside.  Periodic boundaries wrap the
    mode indices modulo 2N (for N = 2 the two bonds accumulate on the same
    entries, doubling the hopping and cancelling the pairing, which matches
    the operator algebra).

    Raises
    ------
    ValueError
        If the parameters are invalid (delegated to ``KitaevParams``).
    """
    n = params.n_sites
    dim = 2 * n
    w = params.hopping
    mu = params.chemical_potential
    dabs = params.pairing_magnitude
    a = np.zeros((dim, dim))

    def add(k: int, l: int, coeff: float) -> None:
        a[k % dim, l % dim] += coeff
        a[l % dim, k % dim] -= coeff

    for j in range(n):
        add(2 * j, 2 * j + 1, -mu)
    bonds = range(n) if params.boundary == "periodic" else range(n - 1)
    for j in bonds:
        add(2 * j, 2 * j + 3, dabs - w)
        add(2 * j + 1, 2 * j + 2, dabs + w)
    return CouplingMatrix(a)


def block_diagonal_form(epsilons: Sequence[float]) -> np.ndarray:
    """Assemble blockdiag([[0, eps_k], [-eps_k, 0]]) from single-body energies."""
    eps = np.asarray(epsilons, dtype=float)
    dim = 2 * eps.size
    out = np.zeros((dim, dim))
    for k, e in enumerate(eps):
        out[2 * k, 2 * k + 1] = e
        out[2 * k + 1, 2 * k] = -e
    return out


def schur_decompose(a: CouplingMatrix | np.ndarray) -> MajoranaSchur:
    """Reduce a real antisymmetric matrix to canonical 2x2 blocks.

    Returns W orthogonal and non-negative single-body energies eps such that
    ``W @ A @ W.T`` is block diagonal with blocks [[0, eps_k], [-eps_k, 0]],
    eps sorted non-increasingly (zero modes last).  The output is
    deterministic for a fixed input: the superdiagonal entry of every block
    is normalized to +eps_k by flipping the second row of the pair when
    needed, and ties keep the backend's stable order.

    Raises
    ------
    ValueError
        If the input is not antisymmetric.
    RuntimeError
        If the backend fails or the reduction does not reach the canonical
        form within tolerance (numerical failure is never silently ignored).
    """
    m = a.entries if isinstance(a, CouplingMatrix) else np.asarray(a, dtype=float)
    dim = m.shape[0]
    scale = max(1.0, np.abs(m).max(initial=0.0))
    if m.ndim != 2 or m.shape[0] != m.shape[1] or dim % 2 != 0:
        raise ValueError("expected a square matrix of even dimension")
    if np.abs(m + m.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix must be antisymmetric")

    t, z = _real_schur(m, output="real")

    # Walk the quasi-triangular factor: LAPACK leaves an exact structural zero
    # on the subdiagonal of every 1x1 block, so nonzero T[i+1, i] marks a 2x2
    # block (a +-i*eps eigenvalue pair).  Lone rows carry zero modes.
    paired_rows = []
    single_rows = []
    i = 0
    while i < dim:
        if i + 1 < dim and t[i + 1, i] != 0.0:
            paired_rows.append((i, i + 1))
            i += 2
        else:
            single_rows.append(i)
            i += 1
    if len(single_rows) % 2 != 0:
        raise RuntimeError("odd number of 1x1 Schur blocks in an even-dimensional problem")
    paired_rows.extend(zip(single_rows[0::2], single_rows[1::2]))

    w = z.T.copy()
    blocks = []
    for i, j in paired_rows:
        eps_k = float(w[i] @ m @ w[j])
        if eps_k < 0.0:
            w[j] = -w[j]
            eps_k = -eps_k
        blocks.append((eps_k, i, j))
    blocks.sort(key=lambda b: -b[0])

    order = [idx for _, i, j in blocks for idx in (i, j)]
    w = w[order]
    eps = np.array([b[0] for b in blocks])

    norm2 = np.linalg.norm(m, 2) if dim > 0 else 0.0
    zero_tol = ZERO_MODE_RTOL * max(1.0, norm2)
    result = MajoranaSchur(w_matrix=w, epsilons=eps, zero_tol=zero_tol)

    ortho = np.abs(w @ w.T - np.eye(dim)).max(initial=0.0)
    block_res = np.abs(w @ m @ w.T - result.block_diagonal()).max(initial=0.0)
    if ortho > 1e-10 or block_res > 1e-9 * scale:
        raise RuntimeError(
            f"Schur reduction failed: orthogonality residual {ortho:.3e}, "
            f"block residual {block_res:.3e}"
        )
    return result


def analytic_periodic_energies(params: KitaevParams) -> np.ndarray:
    """Closed-form signed single-body energies of the periodic chain.

    For even N the paired momenta contribute

        E_k(+-) = +- sqrt((2 w cos(2 pi k / N) + mu)^2
                          + 4 |D|^2 sin^2(2 pi k / N)),   1 <= k < N/2,

    plus the two unpaired momenta E(+) = 2w - mu and E(-) = -2w - mu.  For
    odd N only the generic +- branch applies (k = 1 .. (N-1)/2) and the
    single unpaired k = 0 momentum contributes -2w - mu.  The returned array
    has exactly N entries; the non-negative single-body energies of
    ``schur_decompose`` are their absolute values.

    Raises
    ------
    ValueError
        For open-boundary parameters (this closed form is periodic-only).
    """
    if params.boundary != "periodic":
        raise ValueError("analytic periodic energies require boundary='periodic'")
    n = params.n_sites
    w = params.hopping
    mu = params.chemical_potential
    dabs = params.pairing_magnitude

    ks = np.arange(1, (n + 1) // 2 if n % 2 else n // 2)
    angles = 2.0 * np.pi * ks / n
    branch = np.sqrt((2.0 * w * np.cos(angles) + mu) ** 2 + 4.0 * dabs**2 * np.sin(angles) ** 2)
    energies = np.concatenate([branch, -branch, [-2.0 * w - mu]])
    if n % 2 == 0:
        energies = np.concatenate([energies, [2.0 * w - mu]])
    return energies


def eigenenergy(epsilons: Sequence[float], occupation: Sequence[int]) -> float:
    """Many-body eigenenergy E = sum_k eps_k (n_k - 1/2).

    With all n_k = 0 this is the ground energy -sum(eps)/2.

    Raises
    ------
    ValueError
        If the lengths differ or the occupation is not binary.
    """
    eps = np.asarray(epsilons, dtype=float)
    occ = as_occupation(occupation, eps.size)
    return float(np.sum(eps * (occ - 0.5)))
