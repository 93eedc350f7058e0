"""2D pseudocolor map of one column of a 2D snapshot.

Snapshot rows are nodal samples with x and y columns; the scattered
values are rendered on their triangulation, which handles any nodal
layout without assuming a particular grid.
"""

from __future__ import annotations

import matplotlib.pyplot as plt
import matplotlib.tri as mtri

from .common import base_parser, run, save
from .io import SchemaError, column, load_table


def render(args):
    path = args.inputs[0]
    meta, header, data = load_table(path)
    if "y" not in header:
        raise SchemaError(f"{path}: not a 2D snapshot (no y column)")
    x = column(header, data, "x", path)
    y = column(header, data, "y", path)
    v = column(header, data, args.field, path)
    tri = mtri.Triangulation(x, y)
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    im = ax.tripcolor(tri, v, shading="gouraud", cmap=args.cmap)
    fig.colorbar(im, ax=ax, label=args.field)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    title = args.title or f"{meta.get('case', '')} {args.field}".strip()
    if "t" in meta:
        title += f" (t={float(meta['t']):g})"
    ax.set_title(title)
    fig.tight_layout()
    save(fig, args)
    return 0


def main(argv=None):
    parser = base_parser("plotkit-field2d", __doc__)
    parser.add_argument("--field", default="rho_i",
                        help="snapshot column to render (default rho_i)")
    parser.add_argument("--cmap", default="viridis")
    return run(lambda a: render(parser.parse_args(a)), argv)


if __name__ == "__main__":
    raise SystemExit(main())
