"""Shared argument vocabulary and figure plumbing for the plot scripts."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .io import SchemaError  # noqa: E402


def base_parser(prog, description):
    p = argparse.ArgumentParser(prog=prog, description=description)
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input text file(s) written by the solver CLI")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--title", default=None)
    p.add_argument("--dpi", type=int, default=120)
    return p


def save(fig, args):
    # strip volatile metadata so repeated renders are byte-identical
    fig.savefig(args.out, dpi=args.dpi, metadata={"Software": None})
    plt.close(fig)


def run(build, argv=None):
    """Parse, render, save; map contract violations to exit code 1."""
    try:
        return build(argv)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
