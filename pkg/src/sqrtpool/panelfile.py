"""Panel files: JSON documents listing labelled expert densities.

::

    {"experts": [{"label": "e1", "density": {"family": "normal", "mu": 0, "sigma": 1}}, ...],
     "conditions": {"1": [0, 4, 8], ...}}

``conditions`` is optional; without it the whole file is one panel named
``"all"``.  Extra keys on experts (e.g. covariates) are kept but ignored.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .densities import Density, Panel, density_from_dict
from .errors import InvalidDensity, PoolingError

__all__ = ["PanelFile", "PanelFileError", "load_panel_file", "parse_panel", "bundled_path", "BUNDLED"]

BUNDLED = ("two_normals", "three_betas", "duplicated_expert", "ecology_ticks")


class PanelFileError(PoolingError, ValueError):
    pass


@dataclass(frozen=True)
class PanelFile:
    experts: tuple
    labels: tuple
    conditions: dict

    def condition_names(self) -> list[str]:
        return list(self.conditions) if self.conditions else ["all"]

    def panel(self, condition: str | None = None) -> Panel:
        if not self.conditions:
            if condition not in (None, "all"):
                raise PanelFileError(f"file has no conditions; got --condition {condition!r}")
            return Panel(self.experts, self.labels)
        if condition is None:
            if len(self.conditions) == 1:
                condition = next(iter(self.conditions))
            else:
                raise PanelFileError(f"choose a condition: {', '.join(self.conditions)}")
        if condition not in self.conditions:
            raise PanelFileError(f"unknown condition {condition!r}; file has {', '.join(self.conditions)}")
        idx = self.conditions[condition]
        return Panel(tuple(self.experts[i] for i in idx), tuple(self.labels[i] for i in idx))

    def panels(self, condition: str | None = None) -> list[tuple[str, Panel]]:
        names = self.condition_names() if condition is None else [condition]
        return [(name, self.panel(name)) for name in names]


def bundled_path(name: str) -> Path:
    """Path of a data file shipped with the package, e.g. ``bundled_path("ecology_ticks")``."""
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise PanelFileError(f"no bundled panel named {name!r}; available: {', '.join(BUNDLED)}")
    return Path(str(resources.files("sqrtpool") / "data" / f"{stem}.json"))


def parse_panel(doc) -> PanelFile:
    if not isinstance(doc, dict):
        raise PanelFileError("panel file must hold a JSON object")
    experts = doc.get("experts")
    if not isinstance(experts, list) or not experts:
        raise PanelFileError("'experts' must be a non-empty list")
    dens: list[Density] = []
    labels: list[str] = []
    for k, item in enumerate(experts):
        if not isinstance(item, dict) or "density" not in item:
            raise PanelFileError(f"experts[{k}] must be an object with a 'density'")
        label = item.get("label", f"expert{k + 1}")
        if not isinstance(label, str):
            raise PanelFileError(f"experts[{k}].label must be a string")
        try:
            dens.append(density_from_dict(item["density"]))
        except InvalidDensity as exc:
            raise PanelFileError(f"experts[{k}] ({label}): {exc}") from exc
        labels.append(label)
    if len(set(labels)) != len(labels):
        dup = sorted({x for x in labels if labels.count(x) > 1})
        raise PanelFileError(f"duplicate labels: {dup}")
    conds = doc.get("conditions") or {}
    if not isinstance(conds, dict):
        raise PanelFileError("'conditions' must map names to lists of expert indices")
    conditions = {}
    for name, idx in conds.items():
        if not isinstance(idx, list) or not idx:
            raise PanelFileError(f"condition {name!r} must list at least one expert index")
        for i in idx:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < len(dens):
                raise PanelFileError(f"condition {name!r}: invalid expert index {i!r}")
        conditions[str(name)] = tuple(idx)
    return PanelFile(tuple(dens), tuple(labels), conditions)


def load_panel_file(path) -> PanelFile:
    """Read and validate a panel file; bundled names such as ``"two_normals"`` also work."""
    p = Path(path)
    if not p.exists():
        try:
            p = bundled_path(str(path))
        except PanelFileError:
            raise PanelFileError(f"{path}: no such file") from None
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PanelFileError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise PanelFileError(f"{p}: {exc}") from exc
    return parse_panel(doc)
