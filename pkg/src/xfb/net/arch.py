"""Architecture descriptions for the small classifiers in scope.

Two families: ``mlp`` (dense hidden layers on the flattened input) and
``cnn`` (stride-1 same-padded odd-kernel conv layers, then a flatten and
optional dense layers). Every hidden layer is followed by a ReLU; the
final layer is always a dense head emitting ``output_classes`` logits
with no activation.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError


@dataclass(frozen=True)
class Dense:
    width: int

    def to_json(self) -> dict:
        return {"kind": "dense", "width": self.width}


@dataclass(frozen=True)
class Conv:
    filters: int
    kernel: int

    def to_json(self) -> dict:
        return {"kind": "conv", "filters": self.filters, "kernel": self.kernel}


def _layer_from_json(obj: dict) -> Dense | Conv:
    if obj.get("kind") == "dense":
        return Dense(int(obj["width"]))
    if obj.get("kind") == "conv":
        return Conv(int(obj["filters"]), int(obj["kernel"]))
    raise ValidationError(f"unknown layer descriptor {obj!r}")


@dataclass(frozen=True)
class ArchitectureSpec:
    family: str  # "mlp" | "cnn"
    input_dims: tuple[int, int, int]  # (height, width, channels)
    hidden: tuple[Dense | Conv, ...]
    output_classes: int

    def __post_init__(self) -> None:
        h, w, c = self.input_dims
        if self.family not in ("mlp", "cnn"):
            raise ValidationError(f"unknown family {self.family!r}")
        if min(h, w, c) < 1:
            raise ValidationError(f"degenerate input dims {self.input_dims}")
        if self.output_classes < 2:
            raise ValidationError("need at least 2 output classes")
        if not self.hidden:
            raise ValidationError("need at least one hidden layer")
        seen_dense = False
        for layer in self.hidden:
            if isinstance(layer, Dense):
                if layer.width < 1:
                    raise ValidationError(f"dense width must be positive, got {layer.width}")
                seen_dense = True
            elif isinstance(layer, Conv):
                if self.family != "cnn":
                    raise ValidationError("conv layer in a non-cnn architecture")
                if seen_dense:
                    raise ValidationError("conv layer after a dense layer")
                if layer.filters < 1:
                    raise ValidationError(f"conv filters must be positive, got {layer.filters}")
                if layer.kernel < 1 or layer.kernel % 2 == 0:
                    raise ValidationError(f"conv kernel must be odd and positive, got {layer.kernel}")
            else:
                raise ValidationError(f"unknown layer {layer!r}")
        if self.family == "cnn" and not any(isinstance(l, Conv) for l in self.hidden):
            raise ValidationError("cnn architecture needs at least one conv layer")
        if self.family == "mlp" and any(isinstance(l, Conv) for l in self.hidden):
            raise ValidationError("mlp architecture cannot contain conv layers")

    @property
    def input_size(self) -> int:
        h, w, c = self.input_dims
        return h * w * c

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "input_dims": list(self.input_dims),
            "hidden": [layer.to_json() for layer in self.hidden],
            "output_classes": self.output_classes,
        }

    @staticmethod
    def from_json(obj: dict) -> "ArchitectureSpec":
        return ArchitectureSpec(
            family=obj["family"],
            input_dims=tuple(int(d) for d in obj["input_dims"]),
            hidden=tuple(_layer_from_json(l) for l in obj["hidden"]),
            output_classes=int(obj["output_classes"]),
        )


def parse_arch(
    text: str, input_dims: tuple[int, int, int], output_classes: int
) -> ArchitectureSpec:
    """Parse a compact architecture string.

    ``mlp:64,64`` is an MLP with two 64-wide dense hidden layers.
    ``cnn:8c3,16c3,64`` is two conv layers (8 and 16 filters, 3x3 kernels)
    followed by a 64-wide dense layer. The dense output head is implicit.
    """
    if ":" not in text:
        raise ValidationError(f"bad architecture string {text!r} (expected family:layers)")
    family, _, body = text.partition(":")
    family = family.strip()
    layers: list[Dense | Conv] = []
    for part in body.split(","):
        part = part.strip()
        if not part:
            continue
        if "c" in part:
            f_str, _, k_str = part.partition("c")
            try:
                layers.append(Conv(int(f_str), int(k_str)))
            except ValueError as exc:
                raise ValidationError(f"bad conv descriptor {part!r}") from exc
        else:
            try:
                layers.append(Dense(int(part)))
            except ValueError as exc:
                raise ValidationError(f"bad dense descriptor {part!r}") from exc
    return ArchitectureSpec(
        family=family,
        input_dims=tuple(input_dims),
        hidden=tuple(layers),
        output_classes=output_classes,
    )
