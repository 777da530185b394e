"""Dense float64 tensors with reverse-mode automatic differentiation.

Small by design: 1-D/2-D arrays, a closure-based tape, and exactly the
operator inventory the encoders and losses need. Gradients accumulate into
``requires_grad`` leaves; running ``backward`` twice without clearing them
doubles every gradient, which keeps accumulation semantics explicit.

Also houses the parameter checkpoint format: an ``.npz`` map of name ->
array plus a versioned JSON header under the ``__meta__`` key.
"""

from __future__ import annotations

import json

import numpy as np

CHECKPOINT_VERSION = 1


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    # Keep numpy from broadcasting Tensors into object arrays; arithmetic
    # with ndarrays must fall through to the reflected operators here.
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # Operator sugar; every overload routes through the module-level ops.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, scalar):
        return mul(self, 1.0 / float(scalar))

    def __matmul__(self, other):
        return matmul(self, other)


def _ensure(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _tracked(tensor: Tensor) -> bool:
    return tensor.requires_grad or tensor._backward is not None


def _node(data, parents, backward_fn) -> Tensor:
    out = Tensor(data)
    if any(_tracked(p) for p in parents):
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Reduce a broadcast gradient back to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _shape_error(op: str, *tensors: Tensor) -> ValueError:
    shapes = " @ ".join(str(t.shape) for t in tensors)
    return ValueError(f"{op}: incompatible shapes {shapes}")


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _ensure(a), _ensure(b)
    try:
        data = a.data + b.data
    except ValueError:
        raise _shape_error("add", a, b) from None

    def backward(g, accum):
        accum(a, _unbroadcast(g, a.data.shape))
        accum(b, _unbroadcast(g, b.data.shape))

    return _node(data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _ensure(a), _ensure(b)
    try:
        data = a.data - b.data
    except ValueError:
        raise _shape_error("sub", a, b) from None

    def backward(g, accum):
        accum(a, _unbroadcast(g, a.data.shape))
        accum(b, _unbroadcast(-g, b.data.shape))

    return _node(data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = _ensure(a), _ensure(b)
    try:
        data = a.data * b.data
    except ValueError:
        raise _shape_error("mul", a, b) from None

    def backward(g, accum):
        accum(a, _unbroadcast(g * b.data, a.data.shape))
        accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _node(data, (a, b), backward)


def matmul(a, b) -> Tensor:
    a, b = _ensure(a), _ensure(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise _shape_error("matmul", a, b)
    data = a.data @ b.data

    def backward(g, accum):
        accum(a, g @ b.data.T)
        accum(b, a.data.T @ g)

    return _node(data, (a, b), backward)


def transpose(a) -> Tensor:
    a = _ensure(a)
    if a.data.ndim != 2:
        raise _shape_error("transpose", a)

    def backward(g, accum):
        accum(a, g.T)

    return _node(a.data.T, (a,), backward)


def reshape(a, shape) -> Tensor:
    a = _ensure(a)
    data = a.data.reshape(shape)

    def backward(g, accum):
        accum(a, g.reshape(a.data.shape))

    return _node(data, (a,), backward)


def ravel(a) -> Tensor:
    return reshape(a, (-1,))


def relu(a) -> Tensor:
    a = _ensure(a)
    mask = a.data > 0

    def backward(g, accum):
        accum(a, g * mask)

    return _node(np.where(mask, a.data, 0.0), (a,), backward)


def sigmoid(a) -> Tensor:
    a = _ensure(a)
    x = a.data
    out = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                   np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g, accum):
        accum(a, g * out * (1.0 - out))

    return _node(out, (a,), backward)


def log(a) -> Tensor:
    a = _ensure(a)

    def backward(g, accum):
        accum(a, g / a.data)

    return _node(np.log(a.data), (a,), backward)


def clip(a, lo: float, hi: float) -> Tensor:
    """Clamp values; gradient passes only through the unclamped region."""
    a = _ensure(a)
    inside = (a.data > lo) & (a.data < hi)

    def backward(g, accum):
        accum(a, g * inside)

    return _node(np.clip(a.data, lo, hi), (a,), backward)


def softmax(a, axis: int = -1) -> Tensor:
    a = _ensure(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g, accum):
        inner = (g * out).sum(axis=axis, keepdims=True)
        accum(a, (g - inner) * out)

    return _node(out, (a,), backward)


def layer_norm(a, gain, bias, eps: float = 1e-6) -> Tensor:
    """Normalize over the last axis, then apply the affine (gain, bias)."""
    a, gain, bias = _ensure(a), _ensure(gain), _ensure(bias)
    x = a.data
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    y = (x - mu) * inv
    data = y * gain.data + bias.data

    def backward(g, accum):
        dy = g * gain.data
        dx = inv * (dy - dy.mean(axis=-1, keepdims=True)
                    - y * (dy * y).mean(axis=-1, keepdims=True))
        accum(a, dx)
        reduce_axes = tuple(range(g.ndim - 1))
        accum(gain, _unbroadcast((g * y).sum(axis=reduce_axes) if reduce_axes else g * y,
                                 gain.data.shape))
        accum(bias, _unbroadcast(g.sum(axis=reduce_axes) if reduce_axes else g,
                                 bias.data.shape))

    return _node(data, (a, gain, bias), backward)


def dropout(a, p: float, train: bool, rng=None) -> Tensor:
    """Inverted dropout: scales by 1/(1-p) at train time, identity in eval."""
    a = _ensure(a)
    if not train or p == 0.0:
        return a
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if rng is None:
        raise ValueError("dropout in train mode needs a random generator")
    mask = (rng.random(a.data.shape) >= p) / (1.0 - p)

    def backward(g, accum):
        accum(a, g * mask)

    return _node(a.data * mask, (a,), backward)


def concat(parts, axis: int = 0) -> Tensor:
    parts = [_ensure(p) for p in parts]
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def backward(g, accum):
        for part, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            index = [slice(None)] * g.ndim
            index[axis] = slice(lo, hi)
            accum(part, g[tuple(index)])

    return _node(data, tuple(parts), backward)


def gather_rows(a, indices) -> Tensor:
    """Select rows by index; duplicate indices accumulate gradient."""
    a = _ensure(a)
    idx = np.asarray(indices, dtype=np.intp)

    def backward(g, accum):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        accum(a, full)

    return _node(a.data[idx], (a,), backward)


def slice_cols(a, lo: int, hi: int) -> Tensor:
    a = _ensure(a)
    if a.data.ndim != 2:
        raise _shape_error("slice_cols", a)

    def backward(g, accum):
        full = np.zeros_like(a.data)
        full[:, lo:hi] = g
        accum(a, full)

    return _node(a.data[:, lo:hi].copy(), (a,), backward)


def sum_all(a) -> Tensor:
    a = _ensure(a)

    def backward(g, accum):
        accum(a, np.full(a.data.shape, float(g)))

    return _node(a.data.sum(), (a,), backward)


def mean(a) -> Tensor:
    a = _ensure(a)
    size = a.data.size

    def backward(g, accum):
        accum(a, np.full(a.data.shape, float(g) / size))

    return _node(a.data.mean(), (a,), backward)


def cosine(u, v) -> Tensor:
    """Cosine similarity of two 1-D vectors; rejects zero vectors."""
    u, v = _ensure(u), _ensure(v)
    if u.data.ndim != 1 or v.data.ndim != 1 or u.data.shape != v.data.shape:
        raise _shape_error("cosine", u, v)
    nu = np.linalg.norm(u.data)
    nv = np.linalg.norm(v.data)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine: zero vector")
    c = float(u.data @ v.data) / (nu * nv)

    def backward(g, accum):
        accum(u, g * (v.data / (nu * nv) - c * u.data / (nu * nu)))
        accum(v, g * (u.data / (nu * nv) - c * v.data / (nv * nv)))

    return _node(c, (u, v), backward)


# ---------------------------------------------------------------------------
# Backward pass and gradient checking
# ---------------------------------------------------------------------------

def _toposort(root: Tensor):
    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(loss: Tensor):
    """Accumulate d(loss)/d(leaf) into every requires_grad leaf.

    The per-call gradient flow lives in a scratch map, so repeating the
    call adds the same gradients again (exact doubling, no cross-talk).
    """
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    flows: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}

    def accum(node: Tensor, contribution: np.ndarray):
        if not _tracked(node):
            return
        key = id(node)
        if key in flows:
            flows[key] = flows[key] + contribution
        else:
            flows[key] = np.array(contribution, dtype=np.float64, copy=True)

    for node in reversed(_toposort(loss)):
        g = flows.pop(id(node), None)
        if g is None:
            continue
        if node.requires_grad:
            node.grad = g.copy() if node.grad is None else node.grad + g
        if node._backward is not None:
            node._backward(g, accum)


def grad_check(f, params, eps: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``f`` rebuilds and returns the scalar loss from the given parameter
    tensors; it must be deterministic. The relative error uses an absolute
    floor of 1e-4 so finite-difference noise on near-zero entries does not
    register as disagreement.
    """
    params = list(params)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    for p in params:
        p.zero_grad()
    out = f()
    if out.data.size != 1:
        raise ValueError("grad_check needs a scalar-valued function")
    backward(out)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy()
                for p in params]
    worst = 0.0
    for p, ana in zip(params, analytic):
        flat = p.data.reshape(-1)
        ana_flat = ana.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            f_plus = float(f().data)
            flat[i] = original - eps
            f_minus = float(f().data)
            flat[i] = original
            numeric = (f_plus - f_minus) / (2.0 * eps)
            denom = max(abs(ana_flat[i]), abs(numeric), 1e-4)
            worst = max(worst, abs(ana_flat[i] - numeric) / denom)
    return worst


# ---------------------------------------------------------------------------
# Checkpoint format
# ---------------------------------------------------------------------------

def save_checkpoint(path, params: dict[str, Tensor], meta: dict):
    """Write parameters and a JSON metadata header to an npz file."""
    header = {"format_version": CHECKPOINT_VERSION, **meta}
    arrays = {f"param/{name}": tensor.data for name, tensor in params.items()}
    arrays["__meta__"] = np.frombuffer(
        json.dumps(header, sort_keys=True).encode("utf-8"), dtype=np.uint8)
    with open(path, "wb") as handle:
        np.savez(handle, **arrays)


def load_checkpoint(path):
    """Read back (params, meta); rejects unknown format versions."""
    with np.load(path) as archive:
        meta = json.loads(bytes(archive["__meta__"].tobytes()).decode("utf-8"))
        if meta.get("format_version") != CHECKPOINT_VERSION:
            raise ValueError(
                f"unsupported checkpoint format_version {meta.get('format_version')!r}")
        params = {name[len("param/"):]: Tensor(archive[name], requires_grad=True)
                  for name in archive.files if name.startswith("param/")}
    meta.pop("format_version")
    return params, meta
