"""Canonical tensor-chain states: gates, truncation, and reduced density matrices.

A state on N sites is stored as per-site tensors Gamma^k_{mu nu} (k the local
occupation, mu/nu the left/right bond indices) and per-internal-bond vectors
of positive Schmidt coefficients lambda with sum(lambda^2) = 1; boundary bonds
have dimension 1.  In this canonical form the Schmidt vectors accumulated from
either end are orthonormal, so single-site and two-site reduced density
matrices are local contractions, and the end-pair density matrix follows from
a transfer-matrix sweep through the bulk.

Two-site gates are absorbed by contracting the neighborhood into a single
matrix, applying a singular value decomposition, discarding singular values
below a relative threshold, renormalizing the kept ones, and dividing out the
outer Schmidt vectors.  Truncation is dynamic: nothing above the threshold is
ever dropped, and exceeding the bond-dimension safety cap raises instead of
silently degrading the state.

Sites and bonds are indexed 0-based: bond i sits between sites i and i+1.
The basis order of two-site objects is |00>, |01>, |10>, |11> with the first
slot belonging to the left site; Fock coefficients index site 0 as the most
significant bit.  Contractions treat sites as distinguishable tensor factors;
fermionic string bookkeeping for end-to-end operators lives entirely in the
parity factor of the edge-operator matrices (valid because every state handled
here is a parity eigenstate).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadratic import KitaevParams

__all__ = [
    "TRUNCATION_THRESHOLD",
    "MAX_BOND_DIMENSION",
    "FOCK_SITE_LIMIT",
    "TruncationError",
    "BondOverflowError",
    "DensityBlock",
    "TensorChain",
    "bond_hamiltonian",
    "energy_expectation",
]

#: Default relative truncation threshold for singular values.
TRUNCATION_THRESHOLD = 1e-12

#: Default safety cap on bond dimensions; overflow raises BondOverflowError.
MAX_BOND_DIMENSION = 256

#: Largest chain for which all 2^N Fock coefficients are materialized.
FOCK_SITE_LIMIT = 14

#: Residual above which a gate matrix is rejected as non-unitary.
_UNITARY_TOL = 1e-10

#: Singular values closer than this (relative to the largest) are treated as
#: tied and ordered deterministically by their phase-fixed left vectors.
_SVD_TIE_TOL = 1e-14


class TruncationError(RuntimeError):
    """Raised when a bond update leaves no singular value above threshold."""


class BondOverflowError(RuntimeError):
    """Raised when an operation would exceed the bond-dimension safety cap."""


@dataclass(frozen=True)
class DensityBlock:
    """A validated reduced density matrix of one site (2x2) or two (4x4).

    Construction checks Hermiticity, unit trace, and positive semidefiniteness
    to 1e-10; a violation means the producing contraction is broken and is
    reported instead of propagated.  Basis order is |0>, |1> for one site and
    |00>, |01>, |10>, |11> (first slot = left/first site) for two.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = np.array(self.entries, dtype=complex)
        if rho.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"density block must be 2x2 or 4x4, got {rho.shape}")
        herm = np.abs(rho - rho.conj().T).max(initial=0.0)
        trace = abs(rho.trace() - 1.0)
        lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0).min())
        if herm > 1e-10 or trace > 1e-10 or lowest < -1e-10:
            raise ValueError(
                "invalid density block: Hermiticity residual "
                f"{herm:.3e}, trace deviation {trace:.3e}, lowest eigenvalue {lowest:.3e}"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _ones_bond() -> np.ndarray:
    return np.ones(1)


def _deterministic_svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD with a reproducible convention for vector phases and tied values.

    Each left singular vector is rotated so its first significant entry is
    real positive (the right vector absorbs the opposite phase).  Groups of
    singular values tied within ``_SVD_TIE_TOL`` (relative) are then ordered
    lexicographically by the phase-fixed left vectors, making the output a
    pure function of the input matrix.
    """
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    mags = np.abs(u)
    anchors = np.argmax(mags > 1e-12 * mags.max(axis=0, keepdims=True), axis=0)
    pivots = u[anchors, np.arange(s.size)]
    safe = np.abs(pivots) > 0.0
    phases = np.where(safe, pivots / np.where(safe, np.abs(pivots), 1.0), 1.0)
    u = u * phases.conj()[None, :]
    vh = vh * phases[:, None]
    tie = _SVD_TIE_TOL * max(1.0, float(s[0]) if s.size else 1.0)
    if s.size > 1 and (s[:-1] - s[1:] <= tie).any():
        order: list[int] = []
        i = 0
        while i < s.size:
            j = i + 1
            while j < s.size and s[j - 1] - s[j] <= tie:
                j += 1
            group = list(range(i, j))
            if len(group) > 1:
                group.sort(
                    key=lambda c: tuple(
                        np.round(np.stack([u[:, c].real, u[:, c].imag], axis=-1).ravel(), 12)
                    )
                )
            order.extend(group)
            i = j
        u, s, vh = u[:, order], s[order], vh[order, :]
    return u, s, vh


class TensorChain:
    """Mutable canonical tensor-chain state.

    Gate methods mutate the state in place and keep the canonical invariants;
    use :meth:`copy` for snapshots.  The ``degenerate`` attribute is metadata
    attached by state builders when the underlying single-body problem has a
    zero mode (the state is still well defined, but quantities that assume a
    unique eigenstate should refuse to use it).
    """

    def __init__(
        self,
        gammas: Sequence[np.ndarray],
        lambdas: Sequence[np.ndarray],
        *,
        degenerate: bool = False,
    ) -> None:
        gammas = [np.array(g, dtype=complex) for g in gammas]
        lambdas = [np.array(l, dtype=float) for l in lambdas]
        n = len(gammas)
        if n < 1:
            raise ValueError("a tensor chain needs at least one site")
        if len(lambdas) != n - 1:
            raise ValueError(f"expected {n - 1} internal bonds, got {len(lambdas)}")
        for i, g in enumerate(gammas):
            if g.ndim != 3 or g.shape[0] != 2:
                raise ValueError(f"site tensor {i} must have shape (2, chi_L, chi_R)")
        if gammas[0].shape[1] != 1 or gammas[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for i, lam in enumerate(lambdas):
            if lam.ndim != 1 or lam.size == 0:
                raise ValueError(f"bond vector {i} must be a nonempty 1-D array")
            if (lam <= 0.0).any():
                raise ValueError(f"bond vector {i} must be strictly positive")
            if abs(np.sum(lam**2) - 1.0) > 1e-6:
                raise ValueError(f"bond vector {i} is not normalized")
            if gammas[i].shape[2] != lam.size or gammas[i + 1].shape[1] != lam.size:
                raise ValueError(f"bond {i} dimension mismatch")
        self.gammas = gammas
        self.lambdas = lambdas
        self.degenerate = bool(degenerate)

    # -- construction -----------------------------------------------------

    @classmethod
    def product_state(cls, bits: Sequence[int]) -> "TensorChain":
        """Bond-dimension-1 basis state |b_0 b_1 ... b_{N-1}>."""
        bits = list(bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be a nonempty sequence of 0/1")
        gammas = []
        for b in bits:
            g = np.zeros((2, 1, 1), dtype=complex)
            g[b, 0, 0] = 1.0
            gammas.append(g)
        return cls(gammas, [_ones_bond() for _ in bits[:-1]])

    def copy(self) -> "TensorChain":
        return TensorChain(self.gammas, self.lambdas, degenerate=self.degenerate)

    @property
    def n_sites(self) -> int:
        return len(self.gammas)

    @property
    def bond_dimensions(self) -> tuple[int, ...]:
        """Dimensions of the N-1 internal bonds."""
        return tuple(lam.size for lam in self.lambdas)

    def _left_lambda(self, site: int) -> np.ndarray:
        return self.lambdas[site - 1] if site > 0 else _ones_bond()

    def _right_lambda(self, site: int) -> np.ndarray:
        return self.lambdas[site] if site < self.n_sites - 1 else _ones_bond()

    # -- gates ------------------------------------------------------------

    def apply_single_site_gate(self, site: int, u: np.ndarray) -> None:
        """Contract a 2x2 unitary into the site tensor; bonds are untouched."""
        self._check_site(site)
        u = np.asarray(u, dtype=complex)
        _check_unitary(u, 2)
        self.gammas[site] = np.einsum("kl,lab->kab", u, self.gammas[site])

    def apply_two_site_gate(
        self,
        left_site: int,
        u: np.ndarray,
        *,
        threshold: float = TRUNCATION_THRESHOLD,
        max_bond: int = MAX_BOND_DIMENSION,
    ) -> None:
        """Contract a 4x4 unitary into sites (left_site, left_site + 1).

        The neighborhood lambda_L Gamma lambda_M Gamma lambda_R is contracted
        with the gate, split by SVD, truncated to singular values above
        ``threshold`` relative to the largest, renormalized, and the outer
        lambdas divided out again.

        Raises
        ------
        TruncationError
            If no singular value survives the threshold.
        BondOverflowError
            If more than ``max_bond`` singular values survive.
        """
        if not 0 <= left_site < self.n_sites - 1:
            raise ValueError(f"left_site must lie in [0, {self.n_sites - 1}), got {left_site}")
        u = np.asarray(u, dtype=complex)
        _check_unitary(u, 4)

        lam_l = self._left_lambda(left_site)
        lam_m = self.lambdas[left_site]
        lam_r = self._right_lambda(left_site + 1)
        chi_l, chi_r = lam_l.size, lam_r.size
        left = self.gammas[left_site] * (lam_l[:, None] * lam_m[None, :])[None, :, :]
        right = self.gammas[left_site + 1] * lam_r[None, None, :]
        theta = np.tensordot(left, right, axes=([2], [1]))  # (j, a, k, c)
        theta = u @ theta.transpose(0, 2, 1, 3).reshape(4, chi_l * chi_r)
        m = (
            theta.reshape(2, 2, chi_l, chi_r)
            .transpose(0, 2, 1, 3)
            .reshape(2 * chi_l, 2 * chi_r)
        )

        left_vecs, sigma, right_vecs = _deterministic_svd(m)
        kept = sigma > threshold * sigma.max(initial=0.0) if sigma.size else sigma > 0
        rank = int(np.count_nonzero(kept))
        if rank == 0:
            raise TruncationError(
                f"no singular value above threshold {threshold:g} on bond {left_site}"
            )
        if rank > max_bond:
            raise BondOverflowError(
                f"bond {left_site} would grow to {rank} (cap {max_bond})"
            )
        sigma = sigma[:rank]
        self.lambdas[left_site] = sigma / np.sqrt(np.sum(sigma**2))
        self.gammas[left_site] = (
            left_vecs[:, :rank].reshape(2, chi_l, rank) / lam_l[None, :, None]
        )
        self.gammas[left_site + 1] = (
            right_vecs[:rank, :].reshape(rank, 2, chi_r).transpose(1, 0, 2)
            / lam_r[None, None, :]
        )

    # -- diagnostics --------------------------------------------------------

    def _transfer(self, weights: np.ndarray) -> float:
        """Contract <psi| (x)_sites diag(weights) |psi> through the chain."""
        acc = np.ones((1, 1), dtype=complex)
        for site in range(self.n_sites):
            a = self.gammas[site] * self._right_lambda(site)[None, None, :]
            half = np.tensordot(weights[:, None, None] * a, acc, axes=([1], [0]))
            acc = np.tensordot(half, a.conj(), axes=([0, 2], [0, 1]))
        return float(acc[0, 0].real)

    def norm(self) -> float:
        """<psi|psi>^(1/2) by a full transfer contraction (no canonicity assumed)."""
        return float(np.sqrt(max(self._transfer(np.ones(2)), 0.0)))

    def parity_expectation(self) -> float:
        """<psi| (-1)^(total occupation) |psi>; +-1 for parity eigenstates."""
        return float(self._transfer(np.array([1.0, -1.0])))

    def canonical_residuals(self) -> dict[str, float]:
        """Max deviations of the canonical-form invariants.

        ``left``/``right``: orthonormality of the Schmidt vectors accumulated
        from either end, per site; ``bond``: |sum(lambda^2) - 1| per bond.
        """
        left = right = 0.0
        for site in range(self.n_sites):
            g = self.gammas[site]
            x = g * self._left_lambda(site)[None, :, None]
            gram = np.einsum("kac,kad->cd", x.conj(), x)
            left = max(left, np.abs(gram - np.eye(g.shape[2])).max(initial=0.0))
            y = g * self._right_lambda(site)[None, None, :]
            gram = np.einsum("kac,kbc->ab", y, y.conj())
            right = max(right, np.abs(gram - np.eye(g.shape[1])).max(initial=0.0))
        bond = max(
            (abs(float(np.sum(lam**2)) - 1.0) for lam in self.lambdas),
            default=0.0,
        )
        return {"left": float(left), "right": float(right), "bond": bond}

    # -- reduced density matrices -----------------------------------------

    def rdm_site(self, site: int) -> DensityBlock:
        """Reduced density matrix of one site."""
        self._check_site(site)
        g = self.gammas[site]
        rho = np.einsum(
            "a,b,kab,lab->kl",
            self._left_lambda(site) ** 2,
            self._right_lambda(site) ** 2,
            g,
            g.conj(),
            optimize=True,
        )
        return DensityBlock(rho)

    def rdm_pair(self, left_site: int) -> DensityBlock:
        """Reduced density matrix of sites (left_site, left_site + 1)."""
        if not 0 <= left_site < self.n_sites - 1:
            raise ValueError(f"left_site must lie in [0, {self.n_sites - 1}), got {left_site}")
        y = np.einsum(
            "a,jab,b,kbc,c->jkac",
            self._left_lambda(left_site),
            self.gammas[left_site],
            self.lambdas[left_site],
            self.gammas[left_site + 1],
            self._right_lambda(left_site + 1),
            optimize=True,
        )
        rho = np.einsum("jkac,lmac->jklm", y, y.conj()).reshape(4, 4)
        return DensityBlock(rho)

    def rdm_ends(self, *, max_bond: int = MAX_BOND_DIMENSION) -> DensityBlock:
        """Reduced density matrix of (site 0, site N-1) via bulk transfer matrices.

        Raises
        ------
        BondOverflowError
            If any internal bond exceeds ``max_bond`` (contraction budget).
        """
        n = self.n_sites
        if n < 3:
            raise ValueError("end-pair density matrix requires at least 3 sites")
        if max(self.bond_dimensions) > max_bond:
            raise BondOverflowError(
                f"bond dimension {max(self.bond_dimensions)} exceeds contraction budget {max_bond}"
            )
        first = self.gammas[0][:, 0, :] * self.lambdas[0][None, :]
        acc = np.einsum("ka,lb->klab", first, first.conj())
        for site in range(1, n - 1):
            a = self.gammas[site] * self._right_lambda(site)[None, None, :]
            # acc'[k,l] = sum_m a^m.T @ acc[k,l] @ a^m.conj(), batched over (k,l)
            half = np.tensordot(a, acc, axes=([1], [2]))  # (m, c, k, l, b)
            acc = np.tensordot(half, a.conj(), axes=([0, 4], [0, 1])).transpose(
                1, 2, 0, 3
            )
        last = self.gammas[-1][:, :, 0]
        rho = np.einsum(
            "klab,ma,nb->kmln", acc, last, last.conj(), optimize=True
        ).reshape(4, 4)
        return DensityBlock(rho)

    # -- coefficients -------------------------------------------------------

    def fock_coefficients(self) -> np.ndarray:
        """All Fock amplitudes as a (2,)*N array indexed by site occupations.

        Flattening (``reshape(-1)``) yields the state vector with site 0 as
        the most significant bit.  Guarded to N <= FOCK_SITE_LIMIT.
        """
        if self.n_sites > FOCK_SITE_LIMIT:
            raise ValueError(
                f"fock_coefficients materializes 2^N amplitudes; N limited to {FOCK_SITE_LIMIT}"
            )
        coeff = self.gammas[0][:, 0, :]
        for site in range(1, self.n_sites):
            coeff = np.einsum("...a,a,kab->...kb", coeff, self.lambdas[site - 1], self.gammas[site])
        return coeff[..., 0]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        """JSON dump: per-site Gamma as nested [re, im] arrays, per-bond lambda."""
        payload = {
            "n_sites": self.n_sites,
            "gammas": [np.stack([g.real, g.imag], axis=-1).tolist() for g in self.gammas],
            "lambdas": [lam.tolist() for lam in self.lambdas],
            "degenerate": self.degenerate,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TensorChain":
        payload = json.loads(text)
        gammas = []
        for raw in payload["gammas"]:
            arr = np.asarray(raw, dtype=float)
            gammas.append(arr[..., 0] + 1j * arr[..., 1])
        lambdas = [np.asarray(raw, dtype=float) for raw in payload["lambdas"]]
        return cls(gammas, lambdas, degenerate=bool(payload.get("degenerate", False)))

    # -- helpers ------------------------------------------------------------

    def _check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise ValueError(f"site must lie in [0, {self.n_sites}), got {site}")


def _check_unitary(u: np.ndarray, dim: int) -> None:
    if u.shape != (dim, dim):
        raise ValueError(f"gate must be {dim}x{dim}, got {u.shape}")
    residual = np.abs(u.conj().T @ u - np.eye(dim)).max(initial=0.0)
    if residual > _UNITARY_TOL:
        raise ValueError(f"gate is not unitary (residual {residual:.3e})")


def bond_hamiltonian(
    hopping: float, pairing: complex, mu_left: float, mu_right: float
) -> np.ndarray:
    """Two-site Hamiltonian block in basis |00>, |01>, |10>, |11>.

    Realizes -w (c+_L c_R + c+_R c_L) + D c_L c_R + conj(D) c+_R c+_L
    - mu_L (n_L - 1/2) - mu_R (n_R - 1/2) with the fermionic matrix elements
    of adjacent sites (hopping couples |01>,|10>; pairing couples |00>,|11>
    with a minus sign from operator ordering).
    """
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = (mu_left + mu_right) / 2.0
    h[1, 1] = (mu_left - mu_right) / 2.0
    h[2, 2] = (-mu_left + mu_right) / 2.0
    h[3, 3] = -(mu_left + mu_right) / 2.0
    h[1, 2] = h[2, 1] = -hopping
    h[0, 3] = -pairing
    h[3, 0] = -np.conj(pairing)
    return h


def energy_expectation(state: TensorChain, params: KitaevParams) -> float:
    """<H> of the chain Hamiltonian evaluated from pair density matrices.

    Open boundary: sum over the N-1 bonds of Tr(rho_pair h_bond), with each
    site's -mu (n - 1/2) term split half/half between its adjacent bonds and
    in full onto the single adjacent bond at the chain ends.

    Periodic boundary: the state of a translation-invariant Hamiltonian has
    identical pair density matrices on every bond, so <H> equals N times the
    energy of one bulk bond carrying a half mu share from each side.  This
    shortcut needs at least 3 sites and a unique eigenstate; it is refused
    when the state carries the degeneracy flag.
    """
    n = state.n_sites
    if n != params.n_sites:
        raise ValueError(f"state has {n} sites but params expect {params.n_sites}")
    w = params.hopping
    mu = params.chemical_potential
    pairing = params.pairing
    if params.boundary == "periodic":
        if state.degenerate:
            raise ValueError(
                "periodic energy shortcut refused: the state is flagged degenerate"
            )
        if n < 3:
            raise ValueError("periodic energy shortcut requires at least 3 sites")
        rho = state.rdm_pair(n // 2 - 1).entries
        h = bond_hamiltonian(w, pairing, mu / 2.0, mu / 2.0)
        return float(n * np.trace(rho @ h).real)
    total = 0.0
    for left in range(n - 1):
        mu_left = mu if left == 0 else mu / 2.0
        mu_right = mu if left == n - 2 else mu / 2.0
        h = bond_hamiltonian(w, pairing, mu_left, mu_right)
        total += float(np.trace(state.rdm_pair(left).entries @ h).real)
    return total
