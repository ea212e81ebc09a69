"""Report records and flat-file writers: audit rows, CSV, SVG overlays, OFF meshes.

CSV output is canonical: fixed headers, stable row order decided by the
caller, floats rendered with repr so identical runs produce identical bytes.
"""

from dataclasses import dataclass, field


@dataclass
class AuditRow:
    name: str
    samples: int
    violations: int
    min_const: float
    max_const: float


@dataclass
class AuditReport:
    rows: list = field(default_factory=list)

    def add(self, name, samples, violations, min_const, max_const):
        self.rows.append(AuditRow(name, int(samples), int(violations), float(min_const), float(max_const)))

    def extend(self, other: "AuditReport"):
        self.rows.extend(other.rows)

    @property
    def total_violations(self) -> int:
        return sum(r.violations for r in self.rows)

    def row(self, name: str) -> AuditRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def csv_rows(self):
        return [
            [r.name, r.samples, r.violations, _fmt(r.min_const), _fmt(r.max_const)]
            for r in self.rows
        ]


AUDIT_HEADER = ["name", "samples", "violations", "minConst", "maxConst"]

EXPERIMENT_HEADER = [
    "family",
    "dim",
    "eps",
    "method",
    "seed",
    "facets",
    "vertices",
    "hausdorff",
    "netSize",
    "repairRounds",
    "delta",
    "deltaSurface",
    "deltaVolume",
    "ratioDelta",
    "ratioDeltaSurface",
    "ratioDeltaVolume",
    "seconds",
]

PROFILE_HEADER = ["eps", "bandSize", "netSize", "seconds"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def strip_columns(csv_text: str, drop: tuple) -> str:
    """Remove named columns; used to compare runs while ignoring timings."""
    lines = csv_text.strip().split("\n")
    header = lines[0].split(",")
    keep = [i for i, h in enumerate(header) if h not in drop]
    out = []
    for line in lines:
        cells = line.split(",")
        out.append(",".join(cells[i] for i in keep))
    return "\n".join(out) + "\n"


_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def svg_overlay(path, bodies, labels=None, size=640) -> None:
    """2D overlay of polygon outlines, outermost first."""
    labels = labels or [f"body{i}" for i in range(len(bodies))]
    lo = min(float(b.vertices[:, 0].min()) for b in bodies), min(
        float(b.vertices[:, 1].min()) for b in bodies
    )
    hi = max(float(b.vertices[:, 0].max()) for b in bodies), max(
        float(b.vertices[:, 1].max()) for b in bodies
    )
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-12)
    pad = 0.05 * span
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{lo[0] - pad} {lo[1] - pad} {span + 2 * pad} {span + 2 * pad}">',
        f'<g transform="translate(0,{2 * lo[1] + span}) scale(1,-1)">',
    ]
    for i, body in enumerate(bodies):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts = " ".join(f"{x},{y}" for x, y in body.vertices)
        parts.append(
            f'<polygon points="{pts}" fill="{color}" fill-opacity="0.08" '
            f'stroke="{color}" stroke-width="{span / 400}">'
            f"<title>{labels[i]}</title></polygon>"
        )
    parts.append("</g></svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def off_mesh(path, body) -> None:
    """OFF polygon mesh of a 3D body, one facet cycle per face row."""
    cycles = body.facet_cycles
    lines = ["OFF", f"{body.n_vertices} {len(cycles)} 0"]
    for v in body.vertices:
        lines.append(" ".join(repr(float(c)) for c in v))
    for cyc in cycles:
        lines.append(str(len(cyc)) + " " + " ".join(str(i) for i in cyc))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
