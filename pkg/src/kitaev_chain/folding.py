"""Folding an orthogonal Majorana transformation into two-mode rotations.

The canonical decomposition yields an orthogonal matrix W whose rows express
the diagonal Majorana modes in the bare ones.  Folding eliminates the row
entries with plane rotations acting on adjacent column pairs: for row k (top
to bottom) and column j (last down to k+1), the angle

    theta = atan2(W[k, j], W[k, j-1])

rotates columns (j-1, j) so that W[k, j] vanishes while the surviving
coefficient stays non-negative.  After all rows are processed W is the
identity except possibly for the sign of the last diagonal entry; a negative
sign is recorded as the particle-hole flag (the last diagonal mode comes out
as minus a bare mode, exchanging the roles of filled and empty for the last
site's reference occupation).

Each rotation corresponds to a Fock-space gate on the Majorana pair
(column j-1, column j).  Columns of the same site (odd j, 0-based) give a
single-site phase gate; columns straddling a bond (even j, 0-based) give a
two-site gate.  Replaying the gates in reverse order with negated angles on
the reference occupation state builds the corresponding chain eigenstate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .quadratic import (
    KitaevParams,
    MajoranaSchur,
    as_occupation,
    build_coupling_matrix,
    schur_decompose,
)
from .tensor import MAX_BOND_DIMENSION, TRUNCATION_THRESHOLD, TensorChain

__all__ = [
    "Rotation",
    "FoldingPlan",
    "compute_folding_plan",
    "replay_plan",
    "gate_matrix_even",
    "gate_matrix_odd",
    "reference_state",
    "reconstruct_eigenstate",
    "prepare_eigenstate",
]

#: Residual above which the input matrix is rejected as non-orthogonal.
_ORTHOGONALITY_TOL = 1e-10

#: Residual above which the folded matrix is reported as a numerical failure.
_REPLAY_TOL = 1e-9


class Rotation(NamedTuple):
    """One plane rotation: row being folded, higher column index, angle."""

    row: int
    column: int
    angle: float


@dataclass(frozen=True)
class FoldingPlan:
    """Ordered rotations that reduce W to the identity (up to the flagged sign).

    Attributes
    ----------
    n_sites : int
        Number of chain sites N (the matrix is 2N x 2N).
    rotations : tuple of Rotation
        All (row, column) pairs for row = 0..2N-2, column = 2N-1 down to
        row+1, in execution order, zero angles included.  Angles lie in
        (-pi, pi].
    particle_hole : bool
        True when the last diagonal entry folds to -1, i.e. the last
        reference-site occupation must be read through a particle-hole
        exchange.
    replay_residual : float
        Max deviation of the fully folded matrix from its target.
    degenerate : bool
        Carried over from the decomposition: a numerically zero single-body
        energy makes the targeted eigenstate non-unique.
    """

    n_sites: int
    rotations: tuple[Rotation, ...]
    particle_hole: bool
    replay_residual: float
    degenerate: bool


def _rotation_angle(entry_high: float, entry_low: float) -> float:
    """Angle with sin signed like the high-column entry, cos like the low one."""
    if entry_high == 0.0 and entry_low == 0.0:
        return 0.0
    theta = float(np.arctan2(entry_high, entry_low))
    return np.pi if theta == -np.pi else theta


def _apply_rotation(matrix: np.ndarray, rotation: Rotation) -> None:
    """Rotate columns (column-1, column) of ``matrix`` in place."""
    c, s = np.cos(rotation.angle), np.sin(rotation.angle)
    lo, hi = rotation.column - 1, rotation.column
    low_col = matrix[:, lo].copy()
    high_col = matrix[:, hi].copy()
    matrix[:, lo] = c * low_col + s * high_col
    matrix[:, hi] = -s * low_col + c * high_col


def compute_folding_plan(schur: MajoranaSchur) -> FoldingPlan:
    """Fold the rows of the orthogonal factor into an ordered rotation plan.

    Raises
    ------
    ValueError
        If the input matrix is not orthogonal.
    RuntimeError
        If the folded matrix misses its target beyond tolerance (numerical
        failure is surfaced, never ignored).
    """
    w = np.array(schur.w_matrix, dtype=float)
    dim = w.shape[0]
    if np.abs(w @ w.T - np.eye(dim)).max(initial=0.0) > _ORTHOGONALITY_TOL:
        raise ValueError("folding requires an orthogonal matrix")

    rotations: list[Rotation] = []
    for row in range(dim - 1):
        for column in range(dim - 1, row, -1):
            angle = _rotation_angle(w[row, column], w[row, column - 1])
            rotation = Rotation(row, column, angle)
            rotations.append(rotation)
            if angle != 0.0:
                _apply_rotation(w, rotation)

    particle_hole = bool(w[-1, -1] < 0.0)
    target = np.eye(dim)
    if particle_hole:
        target[-1, -1] = -1.0
    residual = float(np.abs(w - target).max(initial=0.0))
    if residual > _REPLAY_TOL:
        raise RuntimeError(f"folding failed to reach the identity (residual {residual:.3e})")
    return FoldingPlan(
        n_sites=dim // 2,
        rotations=tuple(rotations),
        particle_hole=particle_hole,
        replay_residual=residual,
        degenerate=schur.is_degenerate,
    )


def replay_plan(w_matrix: np.ndarray, plan: FoldingPlan) -> np.ndarray:
    """Apply the plan's rotations to a copy of ``w_matrix`` and return it.

    On the matrix the plan was computed from, the result is the identity with
    the last diagonal entry -1 when the particle-hole flag is set.
    """
    w = np.array(w_matrix, dtype=float)
    if w.shape != (2 * plan.n_sites, 2 * plan.n_sites):
        raise ValueError(f"matrix shape {w.shape} does not match the plan")
    for rotation in plan.rotations:
        if rotation.angle != 0.0:
            _apply_rotation(w, rotation)
    return w


def gate_matrix_even(theta: float) -> np.ndarray:
    """Single-site gate diag(e^{i theta/2}, e^{-i theta/2}).

    Realizes the rotation generated by the two Majorana modes of one site;
    diagonal, hence parity preserving.
    """
    half = theta / 2.0
    return np.diag([np.exp(1j * half), np.exp(-1j * half)])


def gate_matrix_odd(theta: float) -> np.ndarray:
    """Two-site gate cos(theta/2) I + i sin(theta/2) * antidiag(1, 1, 1, 1).

    Realizes the rotation generated by the bond-straddling Majorana pair in
    the basis |00>, |01>, |10>, |11>; couples only equal-parity states.
    """
    half = theta / 2.0
    return np.cos(half) * np.eye(4, dtype=complex) + 1j * np.sin(half) * np.fliplr(
        np.eye(4)
    )


def reference_state(
    n_sites: int, occupation: Sequence[int], particle_hole: bool
) -> TensorChain:
    """Product state encoding the occupation of the diagonal modes.

    Without the particle-hole flag, site k holds n_k directly.  With it, the
    last site's occupancy is flipped: the base state is |0...01> and filling
    the last diagonal mode empties the last site.
    """
    bits = list(as_occupation(occupation, n_sites))
    if particle_hole:
        bits[-1] = 1 - bits[-1]
    return TensorChain.product_state(bits)


def reconstruct_eigenstate(
    plan: FoldingPlan,
    occupation: Sequence[int],
    *,
    threshold: float = TRUNCATION_THRESHOLD,
    max_bond: int = MAX_BOND_DIMENSION,
) -> TensorChain:
    """Build the chain eigenstate for an occupation of the diagonal modes.

    Undoes the folding on the reference state: rotations replay in reverse
    order with negated angles, each as a Fock-space gate.  Odd columns
    (0-based) act within site (column - 1) // 2; even columns straddle sites
    (column // 2 - 1, column // 2).  Zero-angle rotations are skipped.

    The returned state carries the plan's degeneracy flag; its energy equals
    the sum of the occupied single-body energies measured from the ground
    state.
    """
    state = reference_state(plan.n_sites, occupation, plan.particle_hole)
    state.degenerate = plan.degenerate
    for rotation in reversed(plan.rotations):
        if rotation.angle == 0.0:
            continue
        column = rotation.column
        if column % 2 == 1:
            state.apply_single_site_gate(
                (column - 1) // 2, gate_matrix_even(-rotation.angle)
            )
        else:
            state.apply_two_site_gate(
                column // 2 - 1,
                gate_matrix_odd(-rotation.angle),
                threshold=threshold,
                max_bond=max_bond,
            )
    return state


def prepare_eigenstate(
    params: KitaevParams,
    occupation: Sequence[int] | None = None,
    *,
    threshold: float = TRUNCATION_THRESHOLD,
    max_bond: int = MAX_BOND_DIMENSION,
) -> tuple[TensorChain, MajoranaSchur, FoldingPlan]:
    """Full pipeline: parameters -> coupling matrix -> plan -> tensor state.

    ``occupation`` defaults to the ground state (all diagonal modes empty).
    Only real positive pairing (phase 0) is supported on this path: the
    two-site gate matrix used for reconstruction is phase-free.

    Returns the state together with the decomposition (single-body energies)
    and the folding plan (particle-hole flag, degeneracy).
    """
    if params.pairing_phase != 0.0:
        raise ValueError(
            "eigenstate reconstruction is validated for pairing_phase = 0 only"
        )
    schur = schur_decompose(build_coupling_matrix(params))
    plan = compute_folding_plan(schur)
    if occupation is None:
        occupation = [0] * params.n_sites
    state = reconstruct_eigenstate(
        plan, occupation, threshold=threshold, max_bond=max_bond
    )
    return state, schur, plan
