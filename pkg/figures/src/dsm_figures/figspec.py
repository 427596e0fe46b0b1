"""Figure request description shared by the CLI and the renderers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

FIGURE_KEYS = ("fig2", "fig3", "fig4", "fig5", "fig6")
FORMATS = ("png", "svg", "pdf")

DEFAULT_BIN_WIDTH = 0.01


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: which plot, which input CSVs, where to write it.

    bin_width only affects the histogram-style figures (fig2, fig5) and
    defaults to the lab's own histogram bin width. region_lower/region_upper
    are optional shading bounds for the coverage figure (fig5); the summary
    CSV does not carry the acceptance-interval endpoints, so they have to be
    supplied by the caller when the shaded band is wanted.
    """

    figure: str
    trials: str | Path
    summary: str | Path
    out: str | Path
    format: str | None = None
    bin_width: float = DEFAULT_BIN_WIDTH
    region_lower: float | None = None
    region_upper: float | None = None
    dump: str | Path | None = field(default=None)

    def __post_init__(self) -> None:
        errors = self.validate()
        if errors:
            raise ValueError("invalid figure spec: " + "; ".join(errors))

    def validate(self) -> list[str]:
        errors: list[str] = []
        if self.figure not in FIGURE_KEYS:
            errors.append(f"figure: must be one of {FIGURE_KEYS}, got {self.figure!r}")
        for name in ("trials", "summary", "out"):
            value = getattr(self, name)
            if not str(value):
                errors.append(f"{name}: path must be nonempty")
        fmt = self.resolved_format()
        if fmt not in FORMATS:
            errors.append(f"format: must be one of {FORMATS}, got {fmt!r}")
        if self.bin_width <= 0:
            errors.append(f"bin_width: must be positive, got {self.bin_width}")
        has_lo = self.region_lower is not None
        has_hi = self.region_upper is not None
        if has_lo != has_hi:
            errors.append("region_lower/region_upper: give both bounds or neither")
        elif has_lo and self.region_lower >= self.region_upper:
            errors.append(
                "region_lower/region_upper: lower bound must be below upper, "
                f"got [{self.region_lower}, {self.region_upper}]"
            )
        return errors

    def resolved_format(self) -> str:
        """Explicit format if given, else the output path suffix."""
        if self.format:
            return self.format.lower()
        return Path(self.out).suffix.lstrip(".").lower()

    @classmethod
    def from_json_file(cls, path: str | Path) -> "FigureSpec":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_json_dict(data)

    @classmethod
    def from_json_dict(cls, data: dict) -> "FigureSpec":
        known = {
            "figure", "trials", "summary", "out", "format",
            "bin_width", "region_lower", "region_upper", "dump",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"invalid figure spec: unknown fields {sorted(unknown)}")
        required = {"figure", "trials", "summary", "out"}
        missing = required - set(data)
        if missing:
            raise ValueError(f"invalid figure spec: missing fields {sorted(missing)}")
        return cls(**data)
