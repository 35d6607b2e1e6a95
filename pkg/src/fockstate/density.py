"""Density matrices of states, the slice map, and the essential/singular split.

A state of the isometry algebra is determined by its values on monomials,
and those values assemble into a block matrix indexed by (row level, column
level): block (i, j) has shape (n^i, n^j) and its [a, b] entry is the state
applied to v_mu v_nu^*, where nu is word a of level i and mu is word b of
level j.  Equivalently it is the matrix of a positive operator Omega with
inner products taken linear in the first argument.

Because entries are plain state values, truncation at depth K is a
restriction rather than an approximation: every stored block is exact.
What does degrade is the *slice* map, which computes block (i, j) from
block (i+1, j+1) by a partial trace over the last tensor factor; each
application loses the top level, so a matrix carries a ``horizon`` marking
the highest level still trustworthy.

The slice of a state is again a state-like functional, dominated by the
original in the positive-decreasing cone.  Iterating it separates the part
that lives "at infinity" (slice-invariant, the essential part) from the
part supported on finitely many levels (slice-nilpotent, the singular
part); :func:`decompose` performs that split and :func:`classify` names
the outcome.

Blocks may be stored dense or as :class:`Rank1Block`; the rank-one form
keeps deep truncations affordable when a state's blocks are outer products,
as they are for the product-state extensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, HorizonError, SchemaError, UndeterminedError
from .fock import FockContext, _blocks_from_payload
from .word_algebra import AlgebraElement

EQUALITY_TOL = 1e-10
PSD_TOL_SCALE = 1e-9
HERMITIAN_TOL = 1e-12

__all__ = [
    "EQUALITY_TOL",
    "PSD_TOL_SCALE",
    "HERMITIAN_TOL",
    "Rank1Block",
    "BlockOperatorMatrix",
    "CheckResult",
    "ClassifyResult",
    "DecomposeResult",
    "StateHandle",
    "fock_vector_state",
    "state_eval",
    "classify",
    "decompose",
    "gram_matrix",
    "gram_positivity_check",
    "trace_profile_csv",
]


@dataclass(frozen=True)
class Rank1Block:
    """Block stored as coeff * |left><right| without materializing it."""

    coeff: complex
    left: np.ndarray
    right: np.ndarray

    def dense(self) -> np.ndarray:
        return self.coeff * np.outer(self.left, self.right.conj())

    def entry(self, a: int, b: int) -> complex:
        return self.coeff * self.left[a] * np.conj(self.right[b])

    def scaled(self, c: complex) -> "Rank1Block":
        return Rank1Block(self.coeff * c, self.left, self.right)

    def conj_transpose(self) -> "Rank1Block":
        return Rank1Block(np.conj(self.coeff), self.right, self.left)

    def trace(self) -> complex:
        return self.coeff * complex(np.vdot(self.right, self.left))

    def ptrace_last(self, n: int) -> np.ndarray:
        """Partial trace over the last tensor factor, returned dense."""
        f = self.left.reshape(-1, n)
        g = self.right.reshape(-1, n)
        return self.coeff * (f @ g.conj().T)


def _dense(block) -> np.ndarray:
    return block.dense() if isinstance(block, Rank1Block) else block


def _entry(block, a: int, b: int) -> complex:
    if isinstance(block, Rank1Block):
        return complex(block.entry(a, b))
    return complex(block[a, b])


def _scaled(block, c: complex):
    if isinstance(block, Rank1Block):
        return block.scaled(c)
    return c * block


def _conj_transpose(block):
    if isinstance(block, Rank1Block):
        return block.conj_transpose()
    return block.conj().T


def _block_trace(block) -> complex:
    if isinstance(block, Rank1Block):
        return complex(block.trace())
    return complex(np.trace(block))


def _ptrace_last(block, n: int, rows: int, cols: int) -> np.ndarray:
    if isinstance(block, Rank1Block):
        return block.ptrace_last(n)
    return np.trace(block.reshape(rows, n, cols, n), axis1=1, axis2=3)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a corner-wise eigenvalue check."""

    ok: bool
    min_eigenvalues: tuple[float, ...]
    tolerances: tuple[float, ...]


@dataclass(frozen=True)
class ClassifyResult:
    label: str
    trace_profile: tuple[float, ...]


@dataclass(frozen=True)
class DecomposeResult:
    essential: "BlockOperatorMatrix"
    singular: "BlockOperatorMatrix"
    stabilization_step: int


class BlockOperatorMatrix:
    """Hermitian block matrix of state values on the truncated levels.

    ``blocks`` maps (row level, column level) to a dense array or a
    :class:`Rank1Block`; absent blocks are zero.  ``horizon`` is the
    highest level whose blocks are meaningful (slicing lowers it).
    """

    __slots__ = ("ctx", "blocks", "horizon")

    def __init__(self, ctx: FockContext, blocks: dict, horizon: int | None = None):
        self.ctx = ctx
        self.blocks = {}
        for (i, j), block in blocks.items():
            if not (0 <= i <= ctx.depth and 0 <= j <= ctx.depth):
                raise ValueError(f"block ({i},{j}) outside levels 0..{ctx.depth}")
            shape = (ctx.dim(i), ctx.dim(j))
            if isinstance(block, Rank1Block):
                if block.left.shape != (shape[0],) or block.right.shape != (shape[1],):
                    raise ValueError(f"rank-one block ({i},{j}) has wrong factor sizes")
                if block.coeff == 0:
                    continue
                self.blocks[(i, j)] = block
            else:
                arr = np.asarray(block, dtype=complex)
                if arr.shape != shape:
                    raise ValueError(
                        f"block ({i},{j}) has shape {arr.shape}, expected {shape}"
                    )
                if np.any(arr):
                    self.blocks[(i, j)] = arr
        self.horizon = ctx.depth if horizon is None else max(-1, min(horizon, ctx.depth))

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_blocks(cls, ctx: FockContext, blocks: dict,
                    horizon: int | None = None,
                    hermitian_tol: float = HERMITIAN_TOL) -> "BlockOperatorMatrix":
        """Build from possibly one-sided data, completing and checking the
        Hermitian mirror blocks."""
        full = dict(blocks)
        for (i, j), block in blocks.items():
            mirror = (j, i)
            if mirror not in full:
                full[mirror] = _conj_transpose(block)
        mat = cls(ctx, full, horizon)
        if not mat.is_hermitian(hermitian_tol):
            raise ValueError("blocks are not Hermitian-consistent")
        return mat

    @classmethod
    def vacuum(cls, ctx: FockContext) -> "BlockOperatorMatrix":
        """The vacuum state: 1 at the empty word, 0 elsewhere."""
        return cls(ctx, {(0, 0): np.array([[1.0 + 0j]])})

    @classmethod
    def from_functional(cls, ctx: FockContext, fn,
                        horizon: int | None = None) -> "BlockOperatorMatrix":
        """Tabulate ``fn(mu, nu)`` (the state on v_mu v_nu^*) over all kept
        levels.  Row words run over nu, column words over mu."""
        blocks = {}
        for i in range(ctx.depth + 1):
            for j in range(ctx.depth + 1):
                arr = np.empty((ctx.dim(i), ctx.dim(j)), dtype=complex)
                for a in range(ctx.dim(i)):
                    nu = ctx.word_at(i, a)
                    for b in range(ctx.dim(j)):
                        arr[a, b] = fn(ctx.word_at(j, b), nu)
                blocks[(i, j)] = arr
        return cls(ctx, blocks, horizon)

    # -- element access ---------------------------------------------------

    def block(self, i: int, j: int) -> np.ndarray:
        blk = self.blocks.get((i, j))
        if blk is None:
            return np.zeros((self.ctx.dim(i), self.ctx.dim(j)), dtype=complex)
        return _dense(blk)

    def entry(self, i: int, j: int, a: int, b: int) -> complex:
        blk = self.blocks.get((i, j))
        return 0j if blk is None else _entry(blk, a, b)

    def monomial_value(self, mu, nu) -> complex:
        """Value on v_mu v_nu^* for explicit words."""
        mu, nu = tuple(mu), tuple(nu)
        i, j = len(nu), len(mu)
        limit = min(self.horizon, self.ctx.depth)
        if i > limit or j > limit:
            raise HorizonError(
                f"monomial needs level {max(i, j)}, horizon is {limit}"
            )
        return self.entry(i, j, self.ctx.word_index(nu), self.ctx.word_index(mu))

    def vector_pair_value(self, x: np.ndarray, k: int,
                          y: np.ndarray, l: int) -> complex:
        """Value on the rank-one element x y^* with x at level k, y at level l."""
        limit = self.horizon
        if k > limit or l > limit:
            raise HorizonError(f"levels ({k},{l}) beyond horizon {limit}")
        blk = self.blocks.get((l, k))
        if blk is None:
            return 0j
        if isinstance(blk, Rank1Block):
            return complex(blk.coeff * np.vdot(y, blk.left) * np.vdot(blk.right, x))
        return complex(np.vdot(y, blk @ x))

    # -- traces and corners ----------------------------------------------

    def trace(self) -> float:
        return float(self.entry(0, 0, 0, 0).real)

    def level_trace(self, k: int) -> float:
        blk = self.blocks.get((k, k))
        return 0.0 if blk is None else float(_block_trace(blk).real)

    def trace_profile(self, limit: int | None = None) -> tuple[float, ...]:
        if limit is None:
            limit = self.horizon
        return tuple(self.level_trace(k) for k in range(limit + 1))

    def corner(self, k: int) -> np.ndarray:
        """Dense matrix over levels 0..k."""
        if k > self.ctx.depth:
            raise ValueError(f"corner {k} outside depth {self.ctx.depth}")
        off = self.ctx.level_offsets
        size = off[k + 1]
        out = np.zeros((size, size), dtype=complex)
        for (i, j), blk in self.blocks.items():
            if i <= k and j <= k:
                out[off[i]:off[i + 1], off[j]:off[j + 1]] = _dense(blk)
        return out

    # -- slicing -----------------------------------------------------------

    def sliced(self) -> "BlockOperatorMatrix":
        """Partial trace over the last letter of each block one level up.

        The result's block (i, j) comes from block (i+1, j+1), so the top
        level is lost and the horizon drops by one.
        """
        ctx = self.ctx
        n = ctx.n
        blocks = {}
        for (i, j), blk in self.blocks.items():
            if i == 0 or j == 0:
                continue
            blocks[(i - 1, j - 1)] = _ptrace_last(blk, n, ctx.dim(i - 1), ctx.dim(j - 1))
        return BlockOperatorMatrix(ctx, blocks, self.horizon - 1)

    def restricted(self, level_limit: int) -> "BlockOperatorMatrix":
        """Keep only blocks with both levels <= level_limit."""
        blocks = {key: blk for key, blk in self.blocks.items()
                  if max(key) <= level_limit}
        return BlockOperatorMatrix(self.ctx, blocks, min(self.horizon, level_limit))

    # -- comparison ---------------------------------------------------------

    def max_abs(self, level_limit: int | None = None) -> float:
        worst = 0.0
        for (i, j), blk in self.blocks.items():
            if level_limit is not None and max(i, j) > level_limit:
                continue
            worst = max(worst, float(np.abs(_dense(blk)).max()))
        return worst

    def max_abs_diff(self, other: "BlockOperatorMatrix",
                     level_limit: int | None = None) -> float:
        """Largest entry difference over blocks with both levels <= limit.

        The limit defaults to the smaller horizon, which is the region
        where both matrices are meaningful.
        """
        if not self.ctx.compatible(other.ctx):
            raise AlphabetMismatchError("matrices live on different spaces")
        if level_limit is None:
            level_limit = min(self.horizon, other.horizon)
        worst = 0.0
        for key in set(self.blocks) | set(other.blocks):
            if max(key) > level_limit:
                continue
            d = np.abs(self.block(*key) - other.block(*key)).max()
            worst = max(worst, float(d))
        return worst

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        for (i, j), blk in self.blocks.items():
            mirror = self.block(j, i)
            if np.abs(_dense(blk) - mirror.conj().T).max() > tol:
                return False
        return True

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "BlockOperatorMatrix") -> "BlockOperatorMatrix":
        if not self.ctx.compatible(other.ctx):
            raise AlphabetMismatchError("matrices live on different spaces")
        acc = {key: _dense(blk).copy() for key, blk in self.blocks.items()}
        for key, blk in other.blocks.items():
            if key in acc:
                acc[key] = acc[key] + _dense(blk)
            else:
                acc[key] = _dense(blk)
        return BlockOperatorMatrix(self.ctx, acc, min(self.horizon, other.horizon))

    def __sub__(self, other: "BlockOperatorMatrix") -> "BlockOperatorMatrix":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "BlockOperatorMatrix":
        scalar = complex(scalar)
        return BlockOperatorMatrix(
            self.ctx,
            {key: _scaled(blk, scalar) for key, blk in self.blocks.items()},
            self.horizon,
        )

    # -- positivity ------------------------------------------------------------

    def is_positive(self, tol_scale: float = PSD_TOL_SCALE,
                    level_limit: int | None = None) -> CheckResult:
        """Check every corner up to the horizon for positive semidefiniteness.

        Each corner is allowed eigenvalues down to -tol_scale * max(1, trace).
        """
        if level_limit is None:
            level_limit = self.horizon
        mins, tols = [], []
        ok = True
        for k in range(max(level_limit, -1) + 1):
            corner = self.corner(k)
            corner = 0.5 * (corner + corner.conj().T)
            eigs = np.linalg.eigvalsh(corner)
            tol = tol_scale * max(1.0, abs(float(np.trace(corner).real)))
            mins.append(float(eigs[0]))
            tols.append(tol)
            if eigs[0] < -tol:
                ok = False
        return CheckResult(ok, tuple(mins), tuple(tols))

    def is_decreasing(self, tol_scale: float = PSD_TOL_SCALE) -> CheckResult:
        """Check that the slice is dominated by the matrix itself: all
        corners of (self - sliced) up to horizon - 1 stay positive."""
        diff = self.restricted(self.horizon - 1) - self.sliced()
        return diff.is_positive(tol_scale, level_limit=self.horizon - 1)

    # -- serialization -----------------------------------------------------------

    def to_payload(self) -> dict:
        blocks = []
        for (i, j) in sorted(self.blocks):
            arr = _dense(self.blocks[(i, j)])
            entries = [[float(z.real), float(z.imag)] for z in arr.ravel()]
            blocks.append({"i": i, "j": j, "entries": entries})
        return {"n": self.ctx.n, "K": self.ctx.depth, "blocks": blocks}


def fock_vector_state(ctx: FockContext, phi) -> BlockOperatorMatrix:
    """Density matrix of the vector state attached to a finitely supported
    Fock vector.

    ``phi`` is a list of per-level coefficient arrays.  The vector is
    normalized; all its blocks are sums of outer products of reshaped level
    slices, which makes the state positive and decreasing by construction,
    and singular because the vector is finitely supported.
    """
    levels = []
    for k, arr in enumerate(phi):
        arr = np.asarray(arr, dtype=complex).ravel()
        if k > ctx.depth:
            raise ValueError("vector extends beyond the truncation depth")
        if arr.shape != (ctx.dim(k),):
            raise ValueError(
                f"level {k} has {arr.size} coefficients, expected {ctx.dim(k)}"
            )
        levels.append(arr)
    norm2 = sum(float(np.vdot(a, a).real) for a in levels)
    if norm2 <= 0:
        raise ValueError("cannot normalize the zero vector")
    levels = [a / np.sqrt(norm2) for a in levels]
    top = len(levels) - 1
    n = ctx.n
    blocks = {}
    for i in range(top + 1):
        for j in range(top + 1):
            acc = np.zeros((ctx.dim(i), ctx.dim(j)), dtype=complex)
            for g in range(0, top + 1 - max(i, j)):
                a = levels[i + g].reshape(ctx.dim(i), n**g)
                b = levels[j + g].reshape(ctx.dim(j), n**g)
                acc += a @ b.conj().T
            blocks[(i, j)] = acc
    return BlockOperatorMatrix(ctx, blocks, ctx.depth)


def state_eval(matrix: BlockOperatorMatrix, element: AlgebraElement) -> complex:
    """Apply the stored functional to an algebra element.

    Each term c * v_mu v_nu^* reads one entry of block (|nu|, |mu|).
    Raises :class:`HorizonError` when a term needs levels beyond the
    matrix horizon.
    """
    if element.n != matrix.ctx.n:
        raise AlphabetMismatchError(
            f"element over alphabet of size {element.n}, state has {matrix.ctx.n}"
        )
    total = 0j
    for (mu, nu), coeff in element.terms.items():
        total += coeff * matrix.monomial_value(mu, nu)
    return total


def classify(matrix: BlockOperatorMatrix, tol: float = EQUALITY_TOL) -> ClassifyResult:
    """Name the state's behavior under slicing.

    essential: level traces constant and the slice reproduces the matrix.
    singular: level traces decay to zero within the horizon.
    mixed: level traces stabilize at a value strictly between.
    undetermined: the horizon is too short to tell.
    """
    h = matrix.horizon
    if h < 1:
        return ClassifyResult("undetermined", matrix.trace_profile(max(h, 0)))
    profile = matrix.trace_profile(h)
    total = profile[0]
    scale_tol = tol * max(1.0, abs(total))
    if max(abs(p - total) for p in profile) <= scale_tol:
        slice_diff = matrix.sliced().max_abs_diff(matrix, level_limit=h - 1)
        if slice_diff <= tol:
            return ClassifyResult("essential", profile)
    if profile[-1] <= scale_tol:
        return ClassifyResult("singular", profile)
    stabilized = abs(profile[-1] - profile[-2]) <= scale_tol
    if h >= 2:
        stabilized = stabilized and abs(profile[-2] - profile[-3]) <= scale_tol
    if stabilized and scale_tol < profile[-1] < total - scale_tol:
        return ClassifyResult("mixed", profile)
    return ClassifyResult("undetermined", profile)


def decompose(matrix: BlockOperatorMatrix,
              tol: float = EQUALITY_TOL) -> DecomposeResult:
    """Split into a slice-invariant part plus a finitely supported rest.

    Iterated slices must stabilize within the horizon; the essential part
    then takes each block from the deepest slice that still covers it,
    which makes it slice-invariant by construction.  Raises
    :class:`UndeterminedError` when no stabilization is visible.
    """
    h = matrix.horizon
    if h < 1:
        raise UndeterminedError(
            "horizon too short to decompose",
            trace_profile=list(matrix.trace_profile(max(h, 0))),
        )
    iterates = [matrix.restricted(h)]
    for _ in range(h):
        iterates.append(iterates[-1].sliced())
    stabilized_at = None
    for m in range(h):
        window = h - (m + 1)
        if iterates[m + 1].max_abs_diff(iterates[m], level_limit=window) <= tol:
            stabilized_at = m
            break
    if stabilized_at is None:
        raise UndeterminedError(
            "iterated slices do not stabilize within the horizon",
            trace_profile=list(matrix.trace_profile(h)),
        )
    blocks = {}
    for i in range(h + 1):
        for j in range(h + 1):
            deep = iterates[h - max(i, j)]
            blk = deep.blocks.get((i, j))
            if blk is not None:
                blocks[(i, j)] = blk
    essential = BlockOperatorMatrix(matrix.ctx, blocks, h)
    singular = matrix.restricted(h) - essential
    return DecomposeResult(essential, singular, stabilized_at)


def gram_matrix(matrix: BlockOperatorMatrix,
                elements: list[AlgebraElement]) -> np.ndarray:
    """Gram matrix G[a, b] = state(x_a^* x_b) for the given elements."""
    size = len(elements)
    out = np.empty((size, size), dtype=complex)
    adjoints = [x.adjoint() for x in elements]
    for a in range(size):
        for b in range(size):
            out[a, b] = state_eval(matrix, adjoints[a] * elements[b])
    return out


def gram_positivity_check(matrix: BlockOperatorMatrix,
                          element_sets: list[list[AlgebraElement]],
                          tol_scale: float = PSD_TOL_SCALE) -> CheckResult:
    """Positive semidefiniteness of the Gram matrix of each element set."""
    mins, tols = [], []
    ok = True
    for elements in element_sets:
        g = gram_matrix(matrix, elements)
        g = 0.5 * (g + g.conj().T)
        eigs = np.linalg.eigvalsh(g)
        tol = tol_scale * max(1.0, abs(float(np.trace(g).real)))
        mins.append(float(eigs[0]))
        tols.append(tol)
        if eigs[0] < -tol:
            ok = False
    return CheckResult(ok, tuple(mins), tuple(tols))


def trace_profile_csv(matrix: BlockOperatorMatrix) -> str:
    """Level traces as CSV with header ``k,omega_Ek``."""
    lines = ["k,omega_Ek"]
    for k, value in enumerate(matrix.trace_profile()):
        lines.append(f"{k},{value!r}")
    return "\n".join(lines)


@dataclass
class StateHandle:
    """A density matrix together with optional classification metadata.

    ``unique_extension`` marks a state returned as the only possible
    extension of its input data; it is advisory and not serialized.
    """

    matrix: BlockOperatorMatrix
    classification: str | None = None
    unique_extension: bool = False

    def to_payload(self) -> dict:
        payload = self.matrix.to_payload()
        payload["metadata"] = {
            "exact_horizon": self.matrix.horizon,
            "classification": self.classification,
            "trace_profile": [float(x) for x in self.matrix.trace_profile()],
        }
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "StateHandle":
        if not isinstance(payload, dict):
            raise SchemaError("state payload must be an object")
        metadata = payload.get("metadata")
        core = {k: v for k, v in payload.items() if k != "metadata"}
        blocks = _blocks_from_payload(core)
        ctx = FockContext(int(core["n"]), int(core["K"]))
        horizon = ctx.depth
        classification = None
        if metadata is not None:
            if not isinstance(metadata, dict):
                raise SchemaError("'metadata' must be an object")
            extra = set(metadata) - {"exact_horizon", "classification", "trace_profile"}
            if extra:
                raise SchemaError(f"unknown keys in metadata: {sorted(extra)}")
            if "exact_horizon" in metadata:
                if not isinstance(metadata["exact_horizon"], int):
                    raise SchemaError("'exact_horizon' must be an integer")
                horizon = metadata["exact_horizon"]
            if metadata.get("classification") is not None:
                if not isinstance(metadata["classification"], str):
                    raise SchemaError("'classification' must be a string")
                classification = metadata["classification"]
        try:
            matrix = BlockOperatorMatrix.from_blocks(ctx, blocks, horizon)
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
        return cls(matrix, classification)
