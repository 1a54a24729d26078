"""Achievable-rate bounds, capacities, and region searches.

Six bound families are supported, named by structure and side:

* ``SD-WT`` / ``SD-GP``: semi-deterministic broadcast bounds
      R1 <= H(Y1 | Z)
      R2 <= I(U; Y2) - I(U; Z)
      R1 + R2 <= H(Y1 | Z) + I(U; Y2) - I(U; Y1, Z)
* ``PD-IR-WT`` / ``PD-IR-GP``: physically-degraded, informed receiver 1
      R1 <= I(X; Y1 | U, Z)
      R2 <= I(U; Y2) - I(U; Z)
* ``PD-IR-WT-COOP`` / ``PD-IR-GP-COOP``: the same with a cooperation link
  of capacity c12, which adds c12 to the R2 bound and caps the sum rate at
  I(X; Y1 | Z).

The formulas are evaluated on a single-letter joint over axes
(u, x, y1, y2, z).  The two sides differ only in how that joint is
assembled: p(u, x) * law(y1, y2, z | x) on the wiretap side versus
q(z) * q(u, x | z) * law(y1, y2 | x, z) on the GP side.  Given the same
numeric joint, both sides run the identical code path, so their bounds
agree bitwise; that equality is the single-letter face of the analogy.

Searches maximize over the auxiliary distribution with multistart
projected block-coordinate ascent (Dirichlet(1, ..., 1) restarts,
step-halving line search, convergence when a full pass improves by less
than ``tol``).  ``brute_force_oracle`` enumerates a delta-grid over the
same domain and is the independent reference the searches are tested
against.  Negative bound values are clamped to zero for reporting; raw
values are preserved on every ``RateBounds``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import GpModel, WiretapModel, classify
from .divergence import (
    conditional_entropy,
    conditional_mutual_information,
    mutual_information,
)
from .errors import ClassificationError, ResourceError, ShapeError
from .pmf import Axis, FinitePmf, JointPmf, StochasticKernel

FAMILIES: dict[str, tuple[str, str]] = {
    "SD-WT": ("wiretap", "SD"),
    "SD-GP": ("gp", "SD"),
    "PD-IR-WT": ("wiretap", "PD-IR"),
    "PD-IR-GP": ("gp", "PD-IR"),
    "PD-IR-WT-COOP": ("wiretap", "PD-IR-COOP"),
    "PD-IR-GP-COOP": ("gp", "PD-IR-COOP"),
}

DEFAULT_GRID_BUDGET = 50_000_000
_GRID_CHUNK = 200_000


def family_side(family: str) -> str:
    return _family(family)[0]


def _family(family: str) -> tuple[str, str]:
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; expected one of {sorted(FAMILIES)}"
        ) from None


def default_u_size(model: WiretapModel | GpModel) -> int:
    """Default auxiliary cardinality: |X|+1 (wiretap), |X||Z|+1 (GP)."""
    if isinstance(model, WiretapModel):
        return model.x_size + 1
    return model.x_size * model.z_size + 1


# ---------------------------------------------------------------------------
# auxiliary distributions
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class AuxiliaryDist:
    """Search variable of a bound family.

    Wiretap side: a JointPmf over axes (u, x), or over (x,) alone for
    informed-receiver capacities.  GP side: a StochasticKernel from z to
    (u, x) (or to (x,) alone).  ``allow_large_u`` bypasses the default
    cardinality cap |X|+1 / |X||Z|+1 (the auxiliary-reduction output may
    legitimately exceed it).
    """

    side: str
    dist: JointPmf | StochasticKernel
    allow_large_u: bool = False

    def __post_init__(self) -> None:
        if self.side not in ("wiretap", "gp"):
            raise ValueError(f"side must be 'wiretap' or 'gp', got {self.side!r}")
        if self.side == "wiretap":
            if not isinstance(self.dist, JointPmf):
                raise ShapeError("wiretap auxiliary must be a JointPmf")
            names = self.dist.axis_names
            if names not in (("u", "x"), ("x",)):
                raise ShapeError(f"wiretap auxiliary axes must be (u, x) or (x,), got {names}")
        else:
            if not isinstance(self.dist, StochasticKernel):
                raise ShapeError("gp auxiliary must be a StochasticKernel")
            in_names = tuple(ax.name for ax in self.dist.input_axes)
            out_names = tuple(ax.name for ax in self.dist.output_axes)
            if in_names != ("z",) or out_names not in (("u", "x"), ("x",)):
                raise ShapeError(
                    f"gp auxiliary must map (z,) to (u, x) or (x,), got {in_names} -> {out_names}"
                )

    @property
    def has_u(self) -> bool:
        if self.side == "wiretap":
            return self.dist.axis_names == ("u", "x")
        return tuple(ax.name for ax in self.dist.output_axes) == ("u", "x")

    @property
    def u_size(self) -> int:
        if not self.has_u:
            return 1
        if self.side == "wiretap":
            return self.dist.axis_size("u")
        return self.dist.output_axes[0].size

    @property
    def x_size(self) -> int:
        if self.side == "wiretap":
            return self.dist.axis_size("x")
        return self.dist.output_axes[-1].size


def aux_from_array(
    side: str,
    arr: np.ndarray,
    u_size: int,
    x_size: int,
    z_size: int = 1,
    allow_large_u: bool = False,
) -> AuxiliaryDist:
    """Wrap a raw search vector as an AuxiliaryDist."""
    if side == "wiretap":
        dist = JointPmf([Axis("u", u_size), Axis("x", x_size)], arr)
        return AuxiliaryDist("wiretap", dist, allow_large_u)
    rows = np.asarray(arr, dtype=np.float64).reshape(z_size, u_size, x_size)
    kern = StochasticKernel(
        [Axis("z", z_size)], [Axis("u", u_size), Axis("x", x_size)], rows
    )
    return AuxiliaryDist("gp", kern, allow_large_u)


def aux_to_dict(aux: AuxiliaryDist) -> dict:
    if aux.side == "wiretap":
        return {
            "side": "wiretap",
            "axes": list(aux.dist.axis_names),
            "mass": aux.dist.mass.tolist(),
            "allow_large_u": aux.allow_large_u,
        }
    return {
        "side": "gp",
        "input_axes": [ax.name for ax in aux.dist.input_axes],
        "output_axes": [ax.name for ax in aux.dist.output_axes],
        "rows": aux.dist.rows.tolist(),
        "allow_large_u": aux.allow_large_u,
    }


def aux_from_dict(doc: dict) -> AuxiliaryDist:
    if doc["side"] == "wiretap":
        mass = np.asarray(doc["mass"], dtype=np.float64)
        axes = [Axis(n, s) for n, s in zip(doc["axes"], mass.shape)]
        return AuxiliaryDist(
            "wiretap", JointPmf(axes, mass), bool(doc.get("allow_large_u", False))
        )
    rows = np.asarray(doc["rows"], dtype=np.float64)
    n_in = len(doc["input_axes"])
    in_axes = [Axis(n, s) for n, s in zip(doc["input_axes"], rows.shape[:n_in])]
    out_axes = [Axis(n, s) for n, s in zip(doc["output_axes"], rows.shape[n_in:])]
    return AuxiliaryDist(
        "gp",
        StochasticKernel(in_axes, out_axes, rows),
        bool(doc.get("allow_large_u", False)),
    )


# ---------------------------------------------------------------------------
# single-letter joints and bound formulas
# ---------------------------------------------------------------------------


def single_letter_joint(model: WiretapModel | GpModel, aux: AuxiliaryDist) -> JointPmf:
    """Joint over (u, x, y1, y2, z) induced by the auxiliary and the law."""
    if isinstance(model, WiretapModel):
        if aux.side != "wiretap":
            raise ShapeError("wiretap model needs a wiretap-side auxiliary")
        if not aux.has_u:
            raise ShapeError("region evaluation needs a (u, x) auxiliary")
        if aux.x_size != model.x_size:
            raise ShapeError(
                f"auxiliary x-size {aux.x_size} != model x-size {model.x_size}"
            )
        mass = np.einsum("ux,xjkz->uxjkz", aux.dist.mass, model.law)
        axes = [
            Axis("u", aux.u_size),
            Axis("x", model.x_size),
            Axis("y1", model.y1_size),
            Axis("y2", model.y2_size),
            Axis("z", model.z_size),
        ]
        return JointPmf(axes, mass)
    if aux.side != "gp":
        raise ShapeError("gp model needs a gp-side auxiliary")
    if not aux.has_u:
        raise ShapeError("region evaluation needs a (u, x) auxiliary")
    if aux.x_size != model.x_size or aux.dist.input_axes[0].size != model.z_size:
        raise ShapeError("auxiliary alphabets do not match the model")
    mass = np.einsum(
        "z,zux,xzjk->uxjkz", model.state_dist.mass, aux.dist.rows, model.law
    )
    axes = [
        Axis("u", aux.u_size),
        Axis("x", model.x_size),
        Axis("y1", model.y1_size),
        Axis("y2", model.y2_size),
        Axis("z", model.z_size),
    ]
    return JointPmf(axes, mass)


@dataclasses.dataclass(frozen=True)
class RateBounds:
    """Clamped bound values with the raw (pre-clamp) values preserved.

    ``r_sum`` is None when the family places no sum-rate constraint.
    """

    family: str
    r1: float
    r2: float
    r_sum: float | None
    raw_r1: float
    raw_r2: float
    raw_sum: float | None


def rate_bounds_from_joint(
    family: str, joint: JointPmf, coop_capacity: float | None = None
) -> RateBounds:
    """Evaluate a family's bound formulas on a prebuilt (u,x,y1,y2,z) joint.

    Only the structural kind of ``family`` affects the arithmetic; the
    wiretap/GP side is a label.  Two families of the same kind therefore
    return bitwise-identical numbers on the same joint.
    """
    _, kind = _family(family)
    need = {"u", "x", "y1", "y2", "z"}
    if set(joint.axis_names) != need:
        raise ShapeError(f"joint axes {joint.axis_names} must be {sorted(need)}")
    if kind == "SD":
        r1 = conditional_entropy(joint, {"y1"}, {"z"})
        i_uy2 = mutual_information(joint, {"u"}, {"y2"})
        i_uz = mutual_information(joint, {"u"}, {"z"})
        i_uy1z = mutual_information(joint, {"u"}, {"y1", "z"})
        raw_r2 = i_uy2 - i_uz
        raw_sum = r1 + i_uy2 - i_uy1z
        return RateBounds(
            family=family,
            r1=max(r1, 0.0),
            r2=max(raw_r2, 0.0),
            r_sum=max(raw_sum, 0.0),
            raw_r1=r1,
            raw_r2=raw_r2,
            raw_sum=raw_sum,
        )
    # PD-IR and PD-IR-COOP share the individual-rate formulas
    raw_r1 = conditional_mutual_information(joint, {"x"}, {"y1"}, {"u", "z"})
    i_uy2 = mutual_information(joint, {"u"}, {"y2"})
    i_uz = mutual_information(joint, {"u"}, {"z"})
    raw_r2 = i_uy2 - i_uz
    if kind == "PD-IR":
        return RateBounds(
            family=family,
            r1=max(raw_r1, 0.0),
            r2=max(raw_r2, 0.0),
            r_sum=None,
            raw_r1=raw_r1,
            raw_r2=raw_r2,
            raw_sum=None,
        )
    if coop_capacity is None:
        raise ValueError("cooperative family needs coop_capacity")
    raw_r2 = raw_r2 + float(coop_capacity)
    raw_sum = conditional_mutual_information(joint, {"x"}, {"y1"}, {"z"})
    return RateBounds(
        family=family,
        r1=max(raw_r1, 0.0),
        r2=max(raw_r2, 0.0),
        r_sum=max(raw_sum, 0.0),
        raw_r1=raw_r1,
        raw_r2=raw_r2,
        raw_sum=raw_sum,
    )


def _check_family_model(family: str, model: WiretapModel | GpModel) -> None:
    side, kind = _family(family)
    if side == "wiretap" and not isinstance(model, WiretapModel):
        raise ClassificationError(f"family {family} needs a wiretap model")
    if side == "gp" and not isinstance(model, GpModel):
        raise ClassificationError(f"family {family} needs a gp model")
    flags = classify(model)
    if kind == "SD":
        if not flags.semi_deterministic:
            raise ClassificationError(
                f"family {family} needs a semi-deterministic model"
            )
        return
    if not flags.physically_degraded:
        raise ClassificationError(f"family {family} needs a physically-degraded model")
    if not model.informed_receiver:
        raise ClassificationError(f"family {family} needs informed_receiver set")
    if kind == "PD-IR-COOP" and model.coop_capacity is None:
        raise ClassificationError(f"family {family} needs coop_capacity on the model")


def eval_rate_bounds(
    family: str, aux: AuxiliaryDist, model: WiretapModel | GpModel
) -> RateBounds:
    """Bound values of ``family`` at auxiliary ``aux`` on ``model``."""
    _check_family_model(family, model)
    cap = default_u_size(model)
    if aux.has_u and aux.u_size > cap and not aux.allow_large_u:
        raise ValueError(
            f"auxiliary cardinality {aux.u_size} exceeds the default cap {cap}; "
            "set allow_large_u to override"
        )
    joint = single_letter_joint(model, aux)
    return rate_bounds_from_joint(family, joint, model.coop_capacity)


@dataclasses.dataclass(frozen=True)
class SupportPoint:
    value: float
    r1: float
    r2: float


def support_maximum(bounds: RateBounds, lam1: float, lam2: float) -> SupportPoint:
    """max lam . (R1, R2) over {0<=R1<=r1, 0<=R2<=r2, R1+R2<=r_sum}.

    Ties are broken toward the lexicographically larger (R1, R2).
    """
    lam1 = float(lam1)
    lam2 = float(lam2)
    if lam1 < 0.0 or lam2 < 0.0 or (lam1 == 0.0 and lam2 == 0.0):
        raise ValueError("direction must be nonnegative and nonzero")
    r1, r2 = bounds.r1, bounds.r2
    rs = math.inf if bounds.r_sum is None else bounds.r_sum
    cands = [(0.0, 0.0), (min(r1, rs), 0.0), (0.0, min(r2, rs))]
    if rs >= r1:
        cands.append((r1, min(r2, rs - r1)))
    if rs >= r2:
        cands.append((min(r1, rs - r2), r2))
    best = None
    for a, b in cands:
        val = lam1 * a + lam2 * b
        key = (val, a, b)
        if best is None or key > best:
            best = key
    return SupportPoint(value=best[0], r1=best[1], r2=best[2])


# ---------------------------------------------------------------------------
# vectorized evaluation (search and oracle fast path)
# ---------------------------------------------------------------------------


def _batch_entropy(arr: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    """Entropies (bits) of the ``keep``-axes marginal, per batch row."""
    drop = tuple(i for i in range(1, arr.ndim) if i not in keep)
    m = arr.sum(axis=drop) if drop else arr
    m = m.reshape(arr.shape[0], -1)
    out = np.zeros_like(m)
    nz = m > 0.0
    out[nz] = m[nz] * np.log2(m[nz])
    return -out.sum(axis=1)


def _normalize_blocks(theta: np.ndarray, blocks: Sequence[slice]) -> np.ndarray:
    out = theta.copy()
    for sl in blocks:
        out[:, sl] /= out[:, sl].sum(axis=1, keepdims=True)
    return out


def _wt_joint_batch(theta: np.ndarray, u_size: int, model: WiretapModel) -> np.ndarray:
    p = theta.reshape(theta.shape[0], u_size, model.x_size)
    return np.einsum("bux,xjkz->buxjkz", p, model.law)


def _gp_joint_batch(theta: np.ndarray, u_size: int, model: GpModel) -> np.ndarray:
    k = theta.reshape(theta.shape[0], model.z_size, u_size, model.x_size)
    return np.einsum("z,bzux,xzjk->buxjkz", model.state_dist.mass, k, model.law)


def _wt_input_batch(theta: np.ndarray, model: WiretapModel) -> np.ndarray:
    return np.einsum("bx,xjkz->bxjkz", theta, model.law)


def _gp_input_batch(theta: np.ndarray, model: GpModel) -> np.ndarray:
    k = theta.reshape(theta.shape[0], model.z_size, model.x_size)
    return np.einsum("z,bzx,xzjk->bxjkz", model.state_dist.mass, k, model.law)


def _batch_bounds(kind: str, j: np.ndarray, coop: float | None):
    """Raw (r1, r2, r_sum) per batch row; axes of j are (b,u,x,y1,y2,z)."""
    h = lambda *keep: _batch_entropy(j, tuple(keep))  # noqa: E731
    if kind == "SD":
        hz = h(5)
        hy1z = h(3, 5)
        hy2 = h(4)
        huy2 = h(1, 4)
        huz = h(1, 5)
        huy1z = h(1, 3, 5)
        r1 = hy1z - hz
        r2 = hy2 - huy2 - hz + huz
        rs = hy2 - huy2 - hz + huy1z
        return r1, r2, rs
    huz = h(1, 5)
    r1 = h(1, 2, 5) + h(1, 3, 5) - h(1, 2, 3, 5) - huz
    r2 = h(4) - h(1, 4) - h(5) + huz
    if kind == "PD-IR":
        return r1, r2, None
    rs = h(2, 5) + h(3, 5) - h(2, 3, 5) - h(5)
    return r1, r2 + float(coop), rs


def _batch_support(r1, r2, rs, lam1: float, lam2: float) -> np.ndarray:
    r1 = np.maximum(r1, 0.0)
    r2 = np.maximum(r2, 0.0)
    if rs is None:
        return np.maximum(lam1 * r1 + lam2 * r2, 0.0)
    rs = np.maximum(rs, 0.0)
    v = np.maximum(lam1 * np.minimum(r1, rs), lam2 * np.minimum(r2, rs))
    ok = rs >= r1
    v = np.where(
        ok, np.maximum(v, lam1 * r1 + lam2 * np.maximum(np.minimum(r2, rs - r1), 0.0)), v
    )
    ok = rs >= r2
    v = np.where(
        ok, np.maximum(v, lam1 * np.maximum(np.minimum(r1, rs - r2), 0.0) + lam2 * r2), v
    )
    return v


def _secrecy_objective_batch(j: np.ndarray) -> np.ndarray:
    """I(U;Y1) - I(U;Z) per row of a (b,u,x,y1,y2,z) batch."""
    return (
        _batch_entropy(j, (3,))
        - _batch_entropy(j, (1, 3))
        - _batch_entropy(j, (5,))
        + _batch_entropy(j, (1, 5))
    )


def _informed_objective_batch(j: np.ndarray) -> np.ndarray:
    """I(X;Y1|Z) per row of a (b,x,y1,y2,z) batch."""
    return (
        _batch_entropy(j, (1, 4))
        + _batch_entropy(j, (2, 4))
        - _batch_entropy(j, (1, 2, 4))
        - _batch_entropy(j, (4,))
    )


# ---------------------------------------------------------------------------
# projected block-coordinate ascent
# ---------------------------------------------------------------------------


def _project_simplex_rows(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    b, d = v.shape
    u = np.sort(v, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, d + 1)
    cond = u - css / idx > 0.0
    rho = d - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(b), rho] / (rho + 1.0)
    return np.maximum(v - tau[:, None], 0.0)


@dataclasses.dataclass(frozen=True)
class SearchParams:
    """Knobs of the multistart ascent (defaults per the search contract)."""

    restarts: int = 32
    capacity_restarts: int = 64
    directions: int = 64
    tol: float = 1e-9
    max_passes: int = 400
    step0: float = 1.0
    ladder: int = 30
    fd_eps: float = 1e-7
    seed: int = 0
    u_size: int | None = None


def _ascend(
    f: Callable[[np.ndarray], np.ndarray],
    blocks: Sequence[slice],
    starts: np.ndarray,
    params: SearchParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    """Maximize ``f`` over a product of simplices from each start row.

    Returns (values, thetas, converged mask, budget_exhausted).  ``f``
    must accept a (B, total) array (rows need not be normalized: it
    normalizes per block) and return (B,) objective values.
    """
    theta = starts.astype(np.float64).copy()
    n, total = theta.shape
    vals = f(theta)
    active = np.ones(n, dtype=bool)
    steps = params.step0 * 0.5 ** np.arange(params.ladder)
    passes = 0
    while active.any() and passes < params.max_passes:
        passes += 1
        gain = np.zeros(n)
        idx = np.flatnonzero(active)
        for sl in blocks:
            dim = sl.stop - sl.start
            base = theta[idx]
            # central finite differences along the block coordinates
            pert = np.zeros((2 * dim, total))
            for jj in range(dim):
                pert[2 * jj, sl.start + jj] = params.fd_eps
                pert[2 * jj + 1, sl.start + jj] = -params.fd_eps
            cand = (base[:, None, :] + pert[None, :, :]).reshape(-1, total)
            fv = f(cand).reshape(len(idx), 2 * dim)
            grad = (fv[:, 0::2] - fv[:, 1::2]) / (2.0 * params.fd_eps)
            # step-halving ladder, evaluated in one batch
            moved = base[:, None, sl] + steps[None, :, None] * grad[:, None, :]
            proj = _project_simplex_rows(moved.reshape(-1, dim)).reshape(
                len(idx), len(steps), dim
            )
            cand_full = np.broadcast_to(
                base[:, None, :], (len(idx), len(steps), total)
            ).copy()
            cand_full[:, :, sl] = proj
            fv2 = f(cand_full.reshape(-1, total)).reshape(len(idx), len(steps))
            best = fv2.argmax(axis=1)
            bestv = fv2[np.arange(len(idx)), best]
            better = bestv > vals[idx] + 1e-15
            upd = idx[better]
            theta[upd, sl] = proj[better, best[better]]
            gain[upd] += bestv[better] - vals[upd]
            vals[upd] = bestv[better]
        active = active & (gain > params.tol)
    exhausted = bool(active.any())
    # exact projection so the achievers are valid pmfs
    for sl in blocks:
        theta[:, sl] = _project_simplex_rows(theta[:, sl])
    vals = f(theta)
    return vals, theta, ~active, exhausted


def _dirichlet_starts(
    rng: np.random.Generator, restarts: int, blocks: Sequence[slice], total: int
) -> np.ndarray:
    out = np.empty((restarts, total))
    for sl in blocks:
        out[:, sl] = rng.dirichlet(np.ones(sl.stop - sl.start), size=restarts)
    return out


def _search_setup(model: WiretapModel | GpModel, u_size: int, with_u: bool):
    """(blocks, total dim, batch joint builder) for a model's search domain."""
    if isinstance(model, WiretapModel):
        cells = (u_size * model.x_size) if with_u else model.x_size
        blocks = [slice(0, cells)]
        if with_u:
            build = lambda th: _wt_joint_batch(th, u_size, model)  # noqa: E731
        else:
            build = lambda th: _wt_input_batch(th, model)  # noqa: E731
        return blocks, cells, build
    row = (u_size * model.x_size) if with_u else model.x_size
    blocks = [slice(z * row, (z + 1) * row) for z in range(model.z_size)]
    if with_u:
        build = lambda th: _gp_joint_batch(th, u_size, model)  # noqa: E731
    else:
        build = lambda th: _gp_input_batch(th, model)  # noqa: E731
    return blocks, row * model.z_size, build


# ---------------------------------------------------------------------------
# capacities
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class CapacityResult:
    value: float
    raw_value: float
    achiever: AuxiliaryDist
    converged: bool
    metadata: dict


def _capacity_search(
    model: WiretapModel | GpModel, params: SearchParams
) -> CapacityResult:
    informed = model.informed_receiver
    side = "wiretap" if isinstance(model, WiretapModel) else "gp"
    u_size = params.u_size or default_u_size(model)
    with_u = not informed
    blocks, total, build = _search_setup(model, u_size, with_u)

    def f(theta: np.ndarray) -> np.ndarray:
        th = _normalize_blocks(theta, blocks)
        j = build(th)
        if with_u:
            return _secrecy_objective_batch(j)
        return _informed_objective_batch(j)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=params.seed, spawn_key=(0,)))
    starts = _dirichlet_starts(rng, params.capacity_restarts, blocks, total)
    vals, thetas, converged, exhausted = _ascend(f, blocks, starts, params)
    best = int(np.argmax(vals))
    raw = float(vals[best])
    z_size = model.z_size if side == "gp" else 1
    if with_u:
        aux = aux_from_array(side, thetas[best], u_size, model.x_size, z_size=z_size)
    else:
        aux = _input_aux(side, thetas[best], model)
    return CapacityResult(
        value=max(raw, 0.0),
        raw_value=raw,
        achiever=aux,
        converged=bool(converged[best]),
        metadata={
            "side": side,
            "informed": informed,
            "u_size": u_size if with_u else None,
            "restarts": params.capacity_restarts,
            "tol": params.tol,
            "seed": params.seed,
            "budget_exhausted": exhausted,
        },
    )


def _input_aux(side: str, theta: np.ndarray, model) -> AuxiliaryDist:
    if side == "wiretap":
        return AuxiliaryDist("wiretap", JointPmf([Axis("x", model.x_size)], theta))
    rows = theta.reshape(model.z_size, model.x_size)
    return AuxiliaryDist(
        "gp",
        StochasticKernel([Axis("z", model.z_size)], [Axis("x", model.x_size)], rows),
    )


def wt_capacity(model: WiretapModel, params: SearchParams | None = None) -> CapacityResult:
    """Best found secrecy rate max I(U;Y1) - I(U;Z) (a certified lower estimate).

    With ``informed_receiver`` the informed formula max_{p_X} I(X;Y1|Z) is
    searched instead.  Point-to-point models only (singleton y2).
    """
    if not isinstance(model, WiretapModel):
        raise ShapeError("wt_capacity needs a WiretapModel")
    if not model.point_to_point:
        raise ValueError("wt_capacity is for point-to-point models (y2 size 1)")
    return _capacity_search(model, params or SearchParams())


def gp_capacity(model: GpModel, params: SearchParams | None = None) -> CapacityResult:
    """Best found rate max I(U;Y1) - I(U;Z) over q(u,x|z) (lower estimate).

    With ``informed_receiver`` the informed formula max_{q(x|z)} I(X;Y1|Z)
    is searched.  Point-to-point models only.
    """
    if not isinstance(model, GpModel):
        raise ShapeError("gp_capacity needs a GpModel")
    if not model.point_to_point:
        raise ValueError("gp_capacity is for point-to-point models (y2 size 1)")
    return _capacity_search(model, params or SearchParams())


def blahut_arimoto(
    channel: np.ndarray, tol: float = 1e-11, max_iter: int = 100_000
) -> float:
    """Capacity (bits) of a point-to-point channel matrix (x, y) rows.

    Independent oracle for the searches; standard alternating updates with
    the max_x D_x / sum_x r_x D_x bracket as the stopping rule.
    """
    w = np.asarray(channel, dtype=np.float64)
    if w.ndim != 2:
        raise ShapeError("channel matrix must be 2-d (x, y)")
    if (w < 0).any() or np.abs(w.sum(axis=1) - 1.0).max() > 1e-9:
        raise ValueError("channel rows must be pmfs")
    nx = w.shape[0]
    r = np.full(nx, 1.0 / nx)
    mask = w > 0.0
    logw = np.zeros_like(w)
    logw[mask] = np.log2(w[mask])
    for _ in range(max_iter):
        q = r @ w
        ratio = np.zeros_like(w)
        ratio[mask] = logw[mask] - np.log2(q[np.where(mask)[1]])
        d = (w * ratio).sum(axis=1)
        low = float(r @ d)
        high = float(d.max())
        if high - low < tol:
            return low
        r = r * np.exp2(d)
        r /= r.sum()
    raise ResourceError(f"blahut_arimoto did not bracket within {max_iter} iterations")


# ---------------------------------------------------------------------------
# region frontier
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SupportSample:
    lam1: float
    lam2: float
    value: float
    r1: float
    r2: float
    achiever: AuxiliaryDist
    converged: bool


@dataclasses.dataclass(frozen=True)
class BoundaryPoint:
    r1: float
    r2: float
    sample_index: int


@dataclasses.dataclass(frozen=True)
class RateRegion:
    family: str
    supports: tuple[SupportSample, ...]
    boundary: tuple[BoundaryPoint, ...]
    metadata: dict


def sweep_directions(count: int) -> list[tuple[float, float]]:
    """``count`` unit directions covering the closed first quadrant."""
    if count < 2:
        raise ValueError("need at least 2 directions")
    thetas = np.linspace(0.0, math.pi / 2.0, count)
    return [(float(math.cos(t)), float(math.sin(t))) for t in thetas]


def _pareto(points: list[tuple[float, float, int]]) -> list[tuple[float, float, int]]:
    """Non-dominated subset, sorted by r1 ascending / r2 descending."""
    pts = sorted(set(points), key=lambda p: (-p[0], -p[1], p[2]))
    kept: list[tuple[float, float, int]] = []
    best_r2 = -math.inf
    for r1, r2, i in pts:
        if r2 > best_r2 + 1e-15:
            kept.append((r1, r2, i))
            best_r2 = r2
    kept.reverse()
    return kept


def region_frontier(
    family: str,
    model: WiretapModel | GpModel,
    params: SearchParams | None = None,
    directions: Sequence[tuple[float, float]] | None = None,
) -> RateRegion:
    """Trace the family's frontier by maximizing the support function.

    Each direction runs ``params.restarts`` Dirichlet restarts of the
    projected ascent; restarts are merged deterministically by
    (direction index, restart index).  The reported value and vertex for
    each direction are recomputed through the normative scalar path from
    the winning auxiliary, so every support sample and boundary point is
    reproducible from its stored achiever.
    """
    params = params or SearchParams()
    _check_family_model(family, model)
    side, kind = _family(family)
    u_size = params.u_size or default_u_size(model)
    if directions is None:
        directions = sweep_directions(params.directions)
    blocks, total, build = _search_setup(model, u_size, True)
    coop = model.coop_capacity

    samples: list[SupportSample] = []
    exhausted_any = False
    z_size = model.z_size if side == "gp" else 1
    for d_idx, (lam1, lam2) in enumerate(directions):

        def f(theta: np.ndarray, lam1=lam1, lam2=lam2) -> np.ndarray:
            th = _normalize_blocks(theta, blocks)
            r1, r2, rs = _batch_bounds(kind, build(th), coop)
            return _batch_support(r1, r2, rs, lam1, lam2)

        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=params.seed, spawn_key=(d_idx,))
        )
        starts = _dirichlet_starts(rng, params.restarts, blocks, total)
        vals, thetas, converged, exhausted = _ascend(f, blocks, starts, params)
        exhausted_any = exhausted_any or exhausted
        best = int(np.argmax(vals))
        aux = aux_from_array(side, thetas[best], u_size, model.x_size, z_size=z_size)
        bounds = eval_rate_bounds(family, aux, model)
        sp = support_maximum(bounds, lam1, lam2)
        samples.append(
            SupportSample(
                lam1=lam1,
                lam2=lam2,
                value=sp.value,
                r1=sp.r1,
                r2=sp.r2,
                achiever=aux,
                converged=bool(converged[best]),
            )
        )
    boundary = tuple(
        BoundaryPoint(r1=p[0], r2=p[1], sample_index=p[2])
        for p in _pareto([(s.r1, s.r2, i) for i, s in enumerate(samples)])
    )
    meta = {
        "family": family,
        "directions": len(directions),
        "restarts": params.restarts,
        "tol": params.tol,
        "seed": params.seed,
        "u_size": u_size,
        "budget_exhausted": exhausted_any,
        "unconverged_directions": int(sum(1 for s in samples if not s.converged)),
    }
    return RateRegion(
        family=family, supports=tuple(samples), boundary=boundary, metadata=meta
    )


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int, cache: dict) -> np.ndarray:
    key = (total, parts)
    if key in cache:
        return cache[key]
    if parts == 1:
        out = np.array([[total]], dtype=np.int16)
    else:
        blocks = []
        for first in range(total + 1):
            rest = _compositions(total - first, parts - 1, cache)
            col = np.full((rest.shape[0], 1), first, dtype=np.int16)
            blocks.append(np.hstack([col, rest]))
        out = np.vstack(blocks)
    cache[key] = out
    return out


def _grid_points(cells: int, delta: float, budget: int) -> np.ndarray:
    steps = round(1.0 / delta)
    if abs(steps * delta - 1.0) > 1e-9:
        raise ValueError("grid delta must divide 1 evenly")
    count = math.comb(steps + cells - 1, cells - 1)
    if count > budget:
        raise ResourceError(
            f"grid oracle needs {count} points for delta={delta}, budget is {budget}"
        )
    comps = _compositions(steps, cells, {})
    return comps.astype(np.float64) / steps


@dataclasses.dataclass(frozen=True)
class OracleSupport:
    lam1: float
    lam2: float
    value: float
    r1: float
    r2: float
    achiever: AuxiliaryDist


@dataclasses.dataclass(frozen=True)
class OracleResult:
    kind: str
    value: float | None
    achiever: AuxiliaryDist | None
    supports: tuple[OracleSupport, ...]
    grid_points: int


def brute_force_oracle(
    model: WiretapModel | GpModel,
    family: str | None = None,
    *,
    u_size: int | None = None,
    delta: float = 0.02,
    directions: Sequence[tuple[float, float]] | None = None,
    budget: int = DEFAULT_GRID_BUDGET,
) -> OracleResult:
    """Exhaustive delta-grid over the auxiliary domain.

    With ``family`` None the capacity objective I(U;Y1)-I(U;Z) is
    maximized; otherwise the family's support values over ``directions``
    are maximized.  GP models enumerate the product grid over the |Z|
    kernel rows, so budgets bind quickly there.
    """
    side = "wiretap" if isinstance(model, WiretapModel) else "gp"
    u = u_size or default_u_size(model)
    cells = u * model.x_size
    coop = model.coop_capacity
    if family is not None:
        _check_family_model(family, model)
        _, kind = _family(family)
        if directions is None:
            directions = sweep_directions(64)
    else:
        kind = None

    if side == "wiretap":
        grid = _grid_points(cells, delta, budget)
        n_points = grid.shape[0]
        chunks = (
            grid[i : i + _GRID_CHUNK] for i in range(0, n_points, _GRID_CHUNK)
        )
        build = lambda th: _wt_joint_batch(th, u, model)  # noqa: E731
        z_size = 1
    else:
        row_grid = _grid_points(cells, delta, budget)
        n_rows = row_grid.shape[0]
        n_points = n_rows**model.z_size
        if n_points > budget:
            raise ResourceError(
                f"gp oracle needs {n_points} grid points, budget is {budget}"
            )
        z_size = model.z_size

        def _gp_chunks():
            flat = np.arange(n_points)
            for i in range(0, n_points, _GRID_CHUNK):
                part = flat[i : i + _GRID_CHUNK]
                cols = []
                rem = part
                for _ in range(model.z_size):
                    cols.append(rem % n_rows)
                    rem = rem // n_rows
                cols.reverse()
                yield np.concatenate(
                    [row_grid[c] for c in cols], axis=1
                )

        chunks = _gp_chunks()
        build = lambda th: _gp_joint_batch(th, u, model)  # noqa: E731

    if family is None:
        best_val = -math.inf
        best_theta = None
        for chunk in chunks:
            vals = _secrecy_objective_batch(build(chunk))
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val = float(vals[i])
                best_theta = chunk[i].copy()
        aux = aux_from_array(side, best_theta, u, model.x_size, z_size=z_size)
        return OracleResult(
            kind="capacity",
            value=max(best_val, 0.0),
            achiever=aux,
            supports=(),
            grid_points=n_points,
        )

    n_dir = len(directions)
    best_vals = np.full(n_dir, -math.inf)
    best_thetas: list[np.ndarray | None] = [None] * n_dir
    for chunk in chunks:
        r1, r2, rs = _batch_bounds(kind, build(chunk), coop)
        for d, (lam1, lam2) in enumerate(directions):
            vals = _batch_support(r1, r2, rs, lam1, lam2)
            i = int(np.argmax(vals))
            if vals[i] > best_vals[d]:
                best_vals[d] = float(vals[i])
                best_thetas[d] = chunk[i].copy()
    supports = []
    for d, (lam1, lam2) in enumerate(directions):
        aux = aux_from_array(side, best_thetas[d], u, model.x_size, z_size=z_size)
        bounds = eval_rate_bounds(family, aux, model)
        sp = support_maximum(bounds, lam1, lam2)
        supports.append(
            OracleSupport(
                lam1=lam1, lam2=lam2, value=sp.value, r1=sp.r1, r2=sp.r2, achiever=aux
            )
        )
    return OracleResult(
        kind=family,
        value=None,
        achiever=None,
        supports=tuple(supports),
        grid_points=n_points,
    )


def hausdorff_distance(
    points_a: Iterable[tuple[float, float]],
    points_b: Iterable[tuple[float, float]],
    directions: int = 512,
) -> float:
    """Hausdorff distance between down-closed convex hulls of two point sets.

    For convex down-closed regions in the nonnegative quadrant this equals
    the largest support-function gap over unit directions in the quadrant.
    """
    a = np.asarray(list(points_a), dtype=np.float64)
    b = np.asarray(list(points_b), dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != 2 or b.shape[1] != 2:
        raise ShapeError("point sets must be (n, 2)")
    thetas = np.linspace(0.0, math.pi / 2.0, directions)
    lam = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    ha = (lam @ a.T).max(axis=1)
    hb = (lam @ b.T).max(axis=1)
    return float(np.abs(ha - hb).max())


# ---------------------------------------------------------------------------
# auxiliary reduction (two auxiliaries -> one)
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ReducedAuxiliary:
    aux: AuxiliaryDist
    case: int
    case1_margin: float  # I(T;Y2|V) - I(T;Y1,Z|V)
    case2_margin: float  # I(T;Y2|V) - I(T;Z|V)


def _vtx_joint(p_vtx: JointPmf, model: WiretapModel) -> JointPmf:
    if tuple(p_vtx.axis_names) != ("v", "t", "x"):
        raise ShapeError(f"expected axes (v, t, x), got {p_vtx.axis_names}")
    if p_vtx.axis_size("x") != model.x_size:
        raise ShapeError("x alphabet mismatch")
    mass = np.einsum("vtx,xjkz->vtxjkz", p_vtx.mass, model.law)
    axes = [
        Axis("v", p_vtx.axis_size("v")),
        Axis("t", p_vtx.axis_size("t")),
        Axis("x", model.x_size),
        Axis("y1", model.y1_size),
        Axis("y2", model.y2_size),
        Axis("z", model.z_size),
    ]
    return JointPmf(axes, mass)


def two_auxiliary_bounds(p_vtx: JointPmf, model: WiretapModel) -> RateBounds:
    """Semi-deterministic bounds with the (V, T) pair playing the auxiliary.

    R2 is bounded through V alone, the sum rate through the pair; this is
    the starting point the single-auxiliary reduction must dominate.
    """
    joint = _vtx_joint(p_vtx, model)
    r1 = conditional_entropy(joint, {"y1"}, {"z"})
    raw_r2 = mutual_information(joint, {"v"}, {"y2"}) - mutual_information(
        joint, {"v"}, {"z"}
    )
    raw_sum = (
        r1
        + mutual_information(joint, {"v", "t"}, {"y2"})
        - mutual_information(joint, {"v", "t"}, {"y1", "z"})
    )
    return RateBounds(
        family="SD-WT",
        r1=max(r1, 0.0),
        r2=max(raw_r2, 0.0),
        r_sum=max(raw_sum, 0.0),
        raw_r1=r1,
        raw_r2=raw_r2,
        raw_sum=raw_sum,
    )


def reduce_auxiliary(p_vtx: JointPmf, model: WiretapModel) -> ReducedAuxiliary:
    """Collapse a (V, T) auxiliary pair to a single U without losing rates.

    Case 1 (I(T;Y2|V) <= I(T;Y1,Z|V)): U = V.  Case 2 (otherwise): U =
    (V, T); its R2 bound gains the nonnegative I(T;Y2|V) - I(T;Z|V).  In
    both cases the single-auxiliary bounds componentwise dominate
    ``two_auxiliary_bounds``.
    """
    flags = classify(model)
    if not flags.semi_deterministic:
        raise ClassificationError("auxiliary reduction applies to SD models")
    joint = _vtx_joint(p_vtx, model)
    i_ty2_v = conditional_mutual_information(joint, {"t"}, {"y2"}, {"v"})
    case1 = i_ty2_v - conditional_mutual_information(joint, {"t"}, {"y1", "z"}, {"v"})
    case2 = i_ty2_v - conditional_mutual_information(joint, {"t"}, {"z"}, {"v"})
    nv = p_vtx.axis_size("v")
    nt = p_vtx.axis_size("t")
    nx = p_vtx.axis_size("x")
    if case1 <= 1e-12:
        p_ux = p_vtx.mass.sum(axis=1)
        aux = AuxiliaryDist(
            "wiretap",
            JointPmf([Axis("u", nv), Axis("x", nx)], p_ux),
            allow_large_u=nv > model.x_size + 1,
        )
        return ReducedAuxiliary(aux=aux, case=1, case1_margin=case1, case2_margin=case2)
    p_ux = p_vtx.mass.reshape(nv * nt, nx)
    aux = AuxiliaryDist(
        "wiretap",
        JointPmf([Axis("u", nv * nt), Axis("x", nx)], p_ux),
        allow_large_u=nv * nt > model.x_size + 1,
    )
    return ReducedAuxiliary(aux=aux, case=2, case1_margin=case1, case2_margin=case2)


# ---------------------------------------------------------------------------
# artifact export
# ---------------------------------------------------------------------------


def region_to_dict(region: RateRegion) -> dict:
    return {
        "family": region.family,
        "metadata": region.metadata,
        "supports": [
            {
                "lambda1": s.lam1,
                "lambda2": s.lam2,
                "support_value": s.value,
                "r1": s.r1,
                "r2": s.r2,
                "converged": s.converged,
                "achiever": aux_to_dict(s.achiever),
            }
            for s in region.supports
        ],
        "boundary": [
            {"r1": b.r1, "r2": b.r2, "sample_index": b.sample_index}
            for b in region.boundary
        ],
    }


def export_region(
    region: RateRegion, csv_path: str | Path, json_path: str | Path | None = None
) -> None:
    """Write the frontier CSV (9 significant digits) and the JSON sidecar."""
    lines = ["lambda1,lambda2,support_value,R1,R2"]
    for s in region.supports:
        lines.append(
            ",".join(
                format(v, ".9g") for v in (s.lam1, s.lam2, s.value, s.r1, s.r2)
            )
        )
    Path(csv_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if json_path is not None:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(region_to_dict(region), fh, indent=2, sort_keys=True)
            fh.write("\n")
