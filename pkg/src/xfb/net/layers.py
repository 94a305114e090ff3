"""Forward/backward primitives over a flat float64 parameter vector.

Each architecture compiles to a plan: an ordered list of layer records
holding parameter slices into the flat vector plus the shapes needed to
run im2col convolutions. Convolutions are stride 1 with zero "same"
padding, so spatial dimensions are preserved and only the channel count
changes; the head is always dense.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError
from .arch import ArchitectureSpec, Conv, Dense


@dataclass(frozen=True)
class _DenseLayer:
    w0: int  # offset of W (in_dim x out_dim)
    b0: int  # offset of b (out_dim)
    in_dim: int
    out_dim: int
    relu: bool

    @property
    def end(self) -> int:
        return self.b0 + self.out_dim


@dataclass(frozen=True)
class _ConvLayer:
    w0: int  # offset of K (k, k, cin, cout)
    b0: int  # offset of b (cout)
    height: int
    width: int
    cin: int
    cout: int
    kernel: int

    @property
    def end(self) -> int:
        return self.b0 + self.cout


@lru_cache(maxsize=None)
def build_plan(arch: ArchitectureSpec) -> tuple[tuple, int, int]:
    """Compile ``arch`` into (layers, total_params, penultimate_dim)."""
    h, w, c = arch.input_dims
    layers: list[_DenseLayer | _ConvLayer] = []
    offset = 0
    flat_dim = None  # set once we leave the conv stack
    for spec in arch.hidden:
        if isinstance(spec, Conv):
            k = spec.kernel
            n_w = k * k * c * spec.filters
            layers.append(_ConvLayer(offset, offset + n_w, h, w, c, spec.filters, k))
            offset += n_w + spec.filters
            c = spec.filters
        else:
            assert isinstance(spec, Dense)
            if flat_dim is None:
                flat_dim = h * w * c
            n_w = flat_dim * spec.width
            layers.append(_DenseLayer(offset, offset + n_w, flat_dim, spec.width, relu=True))
            offset += n_w + spec.width
            flat_dim = spec.width
    if flat_dim is None:
        flat_dim = h * w * c
    n_w = flat_dim * arch.output_classes
    layers.append(_DenseLayer(offset, offset + n_w, flat_dim, arch.output_classes, relu=False))
    offset += n_w + arch.output_classes
    return tuple(layers), offset, flat_dim


def param_count(arch: ArchitectureSpec) -> int:
    return build_plan(arch)[1]


def penultimate_dim(arch: ArchitectureSpec) -> int:
    return build_plan(arch)[2]


def init_params(arch: ArchitectureSpec, seed: int) -> np.ndarray:
    """He fan-in initialization from a seeded PCG64 generator; biases zero.

    Weights are drawn layer by layer as N(0, sqrt(2/fan_in)) in plan order,
    so the same (arch, seed) always yields the same parameter bytes.
    """
    layers, total, _ = build_plan(arch)
    rng = np.random.default_rng(seed)
    params = np.zeros(total, dtype=np.float64)
    for layer in layers:
        if isinstance(layer, _ConvLayer):
            fan_in = layer.kernel * layer.kernel * layer.cin
            n_w = fan_in * layer.cout
        else:
            fan_in = layer.in_dim
            n_w = layer.in_dim * layer.out_dim
        scale = np.sqrt(2.0 / fan_in)
        params[layer.w0 : layer.w0 + n_w] = rng.normal(0.0, scale, size=n_w)
    return params


def _conv_patches(x: np.ndarray, k: int) -> np.ndarray:
    """im2col: (B,H,W,C) -> (B*H*W, k*k*C) with zero same-padding."""
    b, h, w, c = x.shape
    p = k // 2
    xpad = np.zeros((b, h + 2 * p, w + 2 * p, c), dtype=np.float64)
    xpad[:, p : p + h, p : p + w, :] = x
    win = sliding_window_view(xpad, (k, k), axis=(1, 2))  # (B,H,W,C,k,k)
    patches = win.transpose(0, 1, 2, 4, 5, 3).reshape(b * h * w, k * k * c)
    return np.ascontiguousarray(patches)


def forward_pass(
    arch: ArchitectureSpec,
    params: np.ndarray,
    x: np.ndarray,
    need_cache: bool = False,
) -> tuple[np.ndarray, list | None]:
    """Run the network on flat input rows (B, n); returns (logits, cache).

    The cache holds, per layer, what backward_pass needs: the layer input
    (im2col patches for conv layers) and the ReLU mask.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != arch.input_size:
        raise DimensionError(
            f"expected input rows of length {arch.input_size}, got shape {tuple(x.shape)}"
        )
    layers, total, _ = build_plan(arch)
    if params.shape != (total,):
        raise DimensionError(f"expected {total} parameters, got {params.shape}")
    batch = x.shape[0]
    cache: list | None = [] if need_cache else None
    h, w, _ = arch.input_dims
    cur = x
    spatial = None  # (B,H,W,C) view while inside the conv stack
    for i, layer in enumerate(layers):
        last = i == len(layers) - 1
        if isinstance(layer, _ConvLayer):
            if spatial is None:
                spatial = cur.reshape(batch, h, w, layer.cin)
            patches = _conv_patches(spatial, layer.kernel)
            k2c = layer.kernel * layer.kernel * layer.cin
            kmat = params[layer.w0 : layer.w0 + k2c * layer.cout].reshape(k2c, layer.cout)
            bias = params[layer.b0 : layer.b0 + layer.cout]
            z = patches @ kmat + bias
            mask = z > 0.0
            out = z * mask
            if cache is not None:
                cache.append((patches, mask))
            spatial = out.reshape(batch, layer.height, layer.width, layer.cout)
            cur = spatial.reshape(batch, -1)
        else:
            if spatial is not None:
                cur = spatial.reshape(batch, -1)
                spatial = None
            wmat = params[layer.w0 : layer.w0 + layer.in_dim * layer.out_dim].reshape(
                layer.in_dim, layer.out_dim
            )
            bias = params[layer.b0 : layer.b0 + layer.out_dim]
            z = cur @ wmat + bias
            if layer.relu:
                mask = z > 0.0
                out = z * mask
            else:
                mask = None
                out = z
            if cache is not None:
                cache.append((cur, mask))
            cur = out
    return cur, cache


def backward_pass(
    arch: ArchitectureSpec,
    params: np.ndarray,
    cache: list,
    dlogits: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Backprop ``dlogits`` through the cached forward; returns (dparams, dx)."""
    layers, total, _ = build_plan(arch)
    dparams = np.zeros(total, dtype=np.float64)
    batch = dlogits.shape[0]
    grad = dlogits
    spatial_grad = None  # (B,H,W,C) while inside the conv stack
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        if isinstance(layer, _DenseLayer):
            if spatial_grad is not None:  # cannot happen: dense never precedes conv
                raise AssertionError("dense layer below a conv layer")
            x_in, mask = cache[i]
            if mask is not None:
                grad = grad * mask
            wmat = params[layer.w0 : layer.w0 + layer.in_dim * layer.out_dim].reshape(
                layer.in_dim, layer.out_dim
            )
            dparams[layer.w0 : layer.w0 + layer.in_dim * layer.out_dim] = (x_in.T @ grad).ravel()
            dparams[layer.b0 : layer.b0 + layer.out_dim] = grad.sum(axis=0)
            grad = grad @ wmat.T
        else:
            if spatial_grad is None:
                spatial_grad = grad.reshape(batch, layer.height, layer.width, layer.cout)
            patches, mask = cache[i]
            dz = (spatial_grad.reshape(batch * layer.height * layer.width, layer.cout)) * mask
            k2c = layer.kernel * layer.kernel * layer.cin
            kmat = params[layer.w0 : layer.w0 + k2c * layer.cout].reshape(k2c, layer.cout)
            dparams[layer.w0 : layer.w0 + k2c * layer.cout] = (patches.T @ dz).ravel()
            dparams[layer.b0 : layer.b0 + layer.cout] = dz.sum(axis=0)
            dpatches = (dz @ kmat.T).reshape(
                batch, layer.height, layer.width, layer.kernel, layer.kernel, layer.cin
            )
            k, p = layer.kernel, layer.kernel // 2
            dxpad = np.zeros(
                (batch, layer.height + 2 * p, layer.width + 2 * p, layer.cin), dtype=np.float64
            )
            for di in range(k):
                for dj in range(k):
                    dxpad[:, di : di + layer.height, dj : dj + layer.width, :] += dpatches[
                        :, :, :, di, dj, :
                    ]
            spatial_grad = dxpad[:, p : p + layer.height, p : p + layer.width, :]
            grad = spatial_grad.reshape(batch, -1)
    return dparams, grad.reshape(batch, -1)
