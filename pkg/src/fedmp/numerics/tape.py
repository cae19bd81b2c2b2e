"""Reverse-mode differentiation over dense float64 arrays.

A :class:`Var` is one node of an implicit tape: it stores its value, links to
its parent nodes, and a vector-Jacobian callback.  Ops are plain functions
returning new ``Var`` nodes; :func:`grad_vars` replays the recorded graph once
in reverse topological order.

The reverse pass is itself symbolic: every VJP is written in tape ops over the
primal ``Var`` objects, so computed gradients are graph nodes too.  That is
what lets an unrolled optimizer trajectory (whose inner-loop gradients must be
differentiated again by an outer loss) share one code path with plain
first-order solves.

Scope is deliberately small: rank <= 2 arrays, float64 only, matrix-level
primitives (one node per matrix op, not per element).  Every op validates its
output is finite and raises :class:`NumericError` naming the op otherwise.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import NumericError, ShapeError

Array = np.ndarray


class Var:
    """One tape node: a value plus how to push gradients to its parents."""

    __slots__ = ("data", "grad", "parents", "vjp", "op")

    def __init__(
        self,
        data,
        parents: tuple["Var", ...] = (),
        vjp: Callable[["Var"], tuple] | None = None,
        op: str = "leaf",
    ):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"non-finite values produced by op '{op}'")
        self.data = arr
        self.grad: Array | None = None
        self.parents = parents
        self.vjp = vjp
        self.op = op

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Var(op={self.op!r}, shape={self.data.shape})"


def lift(x) -> Var:
    """Wrap a value as a constant leaf; passes Vars through unchanged."""
    return x if isinstance(x, Var) else Var(x)


def leaf(x) -> Var:
    """A differentiable leaf (a gradient target)."""
    return Var(np.array(x, dtype=np.float64))


def add(a, b) -> Var:
    a, b = lift(a), lift(b)
    return Var(
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a, b) -> Var:
    a, b = lift(a), lift(b)
    return Var(
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(neg(g), b.shape)),
        "sub",
    )


def mul(a, b) -> Var:
    a, b = lift(a), lift(b)
    return Var(
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(mul(g, b), a.shape), _unbroadcast(mul(g, a), b.shape)),
        "mul",
    )


def div(a, b) -> Var:
    a, b = lift(a), lift(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = Var(a.data / b.data, (a, b), None, "div")

    def back(g):
        return (
            _unbroadcast(div(g, b), a.shape),
            _unbroadcast(neg(mul(g, div(out, b))), b.shape),
        )

    out.vjp = back
    return out


def neg(a) -> Var:
    a = lift(a)
    return Var(-a.data, (a,), lambda g: (neg(g),), "neg")


def matmul(a, b) -> Var:
    """Matrix product of two rank-2 arrays, differentiable in both."""
    a, b = lift(a), lift(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(
            f"matmul expects rank-2 operands, got {a.data.shape} @ {b.data.shape}"
        )
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(
            f"matmul inner dimensions differ: {a.data.shape} @ {b.data.shape}"
        )
    return Var(
        a.data @ b.data,
        (a, b),
        lambda g: (matmul(g, transpose(b)), matmul(transpose(a), g)),
        "matmul",
    )


def transpose(a) -> Var:
    a = lift(a)
    return Var(a.data.T, (a,), lambda g: (transpose(g),), "transpose")


def reshape(a, shape) -> Var:
    a = lift(a)
    orig = a.data.shape
    return Var(a.data.reshape(shape), (a,), lambda g: (reshape(g, orig),), "reshape")


def broadcast_to(a, shape) -> Var:
    a = lift(a)
    return Var(
        np.broadcast_to(a.data, shape).copy(),
        (a,),
        lambda g: (_unbroadcast(g, a.shape),),
        "broadcast_to",
    )


def sum_all(a) -> Var:
    a = lift(a)
    shape = a.data.shape
    return Var(a.data.sum(), (a,), lambda g: (broadcast_to(g, shape),), "sum")


def mean_all(a) -> Var:
    a = lift(a)
    size = a.data.size
    return Var(
        a.data.mean(), (a,), lambda g: (broadcast_to(div(g, lift(float(size))), a.shape),), "mean"
    )


def sum_axis(a, axis: int, keepdims: bool = True) -> Var:
    a = lift(a)
    shape = a.data.shape
    kept = list(shape)
    kept[axis] = 1

    def back(g):
        gk = g if keepdims else reshape(g, kept)
        return (broadcast_to(gk, shape),)

    return Var(a.data.sum(axis=axis, keepdims=keepdims), (a,), back, "sum_axis")


def exp(a) -> Var:
    a = lift(a)
    out = Var(np.exp(a.data), (a,), None, "exp")
    out.vjp = lambda g: (mul(g, out),)
    return out


def log(a) -> Var:
    a = lift(a)
    return Var(np.log(a.data), (a,), lambda g: (div(g, a),), "log")


def tanh(a) -> Var:
    a = lift(a)
    out = Var(np.tanh(a.data), (a,), None, "tanh")
    out.vjp = lambda g: (mul(g, sub(lift(1.0), mul(out, out))),)
    return out


def square(a) -> Var:
    a = lift(a)
    return Var(a.data * a.data, (a,), lambda g: (mul(mul(lift(2.0), g), a),), "square")


def sqrt(a) -> Var:
    a = lift(a)
    out = Var(np.sqrt(a.data), (a,), None, "sqrt")
    # Subgradient 0 where the input is exactly 0 (e.g. second moments of
    # identically-zero gradient coordinates); elsewhere the exact g / (2 y).
    positive = out.data > 0.0
    mask = lift(positive.astype(np.float64))
    bump = lift((~positive).astype(np.float64))
    out.vjp = lambda g: (mul(div(g, mul(lift(2.0), add(out, bump))), mask),)
    return out


def abs_(a) -> Var:
    a = lift(a)
    sign = lift(np.sign(a.data))
    return Var(np.abs(a.data), (a,), lambda g: (mul(g, sign),), "abs")


def softmax_rows(a, temperature: float = 1.0) -> Var:
    """Row-wise softmax of ``a / temperature``, max-subtracted for stability."""
    a = lift(a)
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    x = a.data
    if x.ndim != 2:
        raise ShapeError(f"softmax_rows expects a rank-2 array, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite input to softmax_rows")
    z = (x - x.max(axis=1, keepdims=True)) / temperature
    e = np.exp(z)
    out = Var(e / e.sum(axis=1, keepdims=True), (a,), None, "softmax_rows")

    def back(g):
        inner = sum_axis(mul(g, out), axis=1)
        return (div(mul(out, sub(g, inner)), lift(float(temperature))),)

    out.vjp = back
    return out


def log_softmax_rows(a) -> Var:
    a = lift(a)
    x = a.data
    if x.ndim != 2:
        raise ShapeError(f"log_softmax_rows expects a rank-2 array, got {x.shape}")
    z = x - x.max(axis=1, keepdims=True)
    out = Var(z - np.log(np.exp(z).sum(axis=1, keepdims=True)), (a,), None, "log_softmax_rows")

    def back(g):
        return (sub(g, mul(exp(out), sum_axis(g, axis=1))),)

    out.vjp = back
    return out


def concat_rows(parts: Sequence) -> Var:
    """Stack rank-2 blocks vertically."""
    vs = [lift(p) for p in parts]
    widths = {v.data.shape[1] for v in vs}
    if len(widths) > 1:
        raise ShapeError(f"concat_rows width mismatch: {sorted(widths)}")
    offsets = np.cumsum([0] + [v.data.shape[0] for v in vs])

    def back(g):
        return tuple(
            slice_rows(g, int(offsets[i]), int(offsets[i + 1])) for i in range(len(vs))
        )

    return Var(np.concatenate([v.data for v in vs], axis=0), tuple(vs), back, "concat_rows")


def concat_cols(parts: Sequence) -> Var:
    """Stack rank-2 blocks horizontally."""
    vs = [lift(p) for p in parts]
    offsets = np.cumsum([0] + [v.data.shape[1] for v in vs])

    def back(g):
        return tuple(
            slice_cols(g, int(offsets[i]), int(offsets[i + 1])) for i in range(len(vs))
        )

    return Var(np.concatenate([v.data for v in vs], axis=1), tuple(vs), back, "concat_cols")


def slice_rows(a, start: int, stop: int) -> Var:
    a = lift(a)
    n = a.data.shape[0]

    def back(g):
        return (pad_rows(g, start, n),)

    return Var(a.data[start:stop].copy(), (a,), back, "slice_rows")


def slice_cols(a, start: int, stop: int) -> Var:
    a = lift(a)
    d = a.data.shape[1]

    def back(g):
        return (pad_cols(g, start, d),)

    return Var(a.data[:, start:stop].copy(), (a,), back, "slice_cols")


def slice_vec(a, start: int, stop: int) -> Var:
    a = lift(a)
    n = a.data.shape[0]

    def back(g):
        return (pad_vec(g, start, n),)

    return Var(a.data[start:stop].copy(), (a,), back, "slice_vec")


def pad_rows(a, start: int, total: int) -> Var:
    a = lift(a)
    k = a.data.shape[0]
    out = np.zeros((total, a.data.shape[1]))
    out[start : start + k] = a.data
    return Var(out, (a,), lambda g: (slice_rows(g, start, start + k),), "pad_rows")


def pad_cols(a, start: int, total: int) -> Var:
    a = lift(a)
    k = a.data.shape[1]
    out = np.zeros((a.data.shape[0], total))
    out[:, start : start + k] = a.data
    return Var(out, (a,), lambda g: (slice_cols(g, start, start + k),), "pad_cols")


def pad_vec(a, start: int, total: int) -> Var:
    a = lift(a)
    k = a.data.shape[0]
    out = np.zeros(total)
    out[start : start + k] = a.data
    return Var(out, (a,), lambda g: (slice_vec(g, start, start + k),), "pad_vec")


def stop_grad(a) -> Var:
    a = lift(a)
    return Var(a.data.copy())


def gelu(a) -> Var:
    """Smooth (tanh-form) gelu, composed from tape primitives."""
    a = lift(a)
    c = 0.7978845608028654  # sqrt(2/pi)
    inner = mul(lift(c), add(a, mul(lift(0.044715), mul(a, mul(a, a)))))
    return mul(mul(lift(0.5), a), add(lift(1.0), tanh(inner)))


def _unbroadcast(g: Var, shape: tuple) -> Var:
    """Sum a gradient down to ``shape`` to undo numpy broadcasting."""
    if g.data.shape == shape:
        return g
    if shape == ():
        return sum_all(g)
    while g.data.ndim > len(shape):
        g = sum_axis(g, axis=0, keepdims=False)
    for axis, n in enumerate(shape):
        if n == 1 and g.data.shape[axis] != 1:
            g = sum_axis(g, axis=axis, keepdims=True)
    if g.data.shape != tuple(shape):
        g = reshape(g, shape)
    return g


def _topo_order(root: Var) -> list[Var]:
    order: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def grad_vars(root: Var, wrt: Sequence[Var]) -> list[Var]:
    """Symbolic reverse pass: gradient nodes of a scalar root for each target.

    Visits every reachable node exactly once in reverse topological order.
    The returned gradients are themselves ``Var`` graphs, so they can be fed
    into further tape computation (unrolled optimization) or read off via
    ``.data``.  Targets the root does not depend on get zero gradients.
    """
    if root.data.size != 1:
        raise ShapeError(f"grad_vars expects a scalar root, got {root.data.shape}")
    order = _topo_order(root)
    grads: dict[int, Var] = {id(root): lift(np.ones(root.data.shape))}
    for node in reversed(order):
        g = grads.get(id(node))
        if g is None or node.vjp is None:
            continue
        for parent, pg in zip(node.parents, node.vjp(g)):
            prev = grads.get(id(parent))
            grads[id(parent)] = pg if prev is None else add(prev, pg)
    return [grads.get(id(w)) or lift(np.zeros(w.data.shape)) for w in wrt]


def backward(root: Var, wrt: Sequence[Var]) -> None:
    """Numeric reverse pass: accumulate gradients into ``.grad`` of targets."""
    for w, g in zip(wrt, grad_vars(root, wrt)):
        w.grad = g.data if w.grad is None else w.grad + g.data


def value_and_grad(f: Callable[[Var], Var], at: Array) -> tuple[float, Array]:
    """Evaluate a scalar function of a parameter vector and its gradient.

    ``f`` must be composed of tape primitives.  The gradient matches central
    finite differences to the tolerance asserted in the test suite.
    """
    x = leaf(np.asarray(at, dtype=np.float64))
    out = f(x)
    if out.data.size != 1:
        raise ShapeError(f"value_and_grad expects a scalar output, got {out.data.shape}")
    (g,) = grad_vars(out, [x])
    return float(out.data), g.data
