"""Command-line front end.

Commands:

    laguerre spheres contact  --a A.json --b B.json [--tol X]
    laguerre group compose    --transform S.json
    laguerre group decompose  --transform S.json
    laguerre surface analyze  --spec S.json [--out O] [--csv C] [...]
    laguerre surface minimality --spec S.json [...]
    laguerre surface volume   --spec S.json [...]
    laguerre surface compare  --spec A.json --spec2 B.json [--transform T]
    laguerre surface embed    --spec S.json [...]

All structured output is JSON (sorted keys, so identical runs produce
identical bytes); ``--csv`` dumps per-point fields for plotting.  Exit
codes: 0 success, 2 malformed input, 3 invalid group element,
4 degenerate surface, 5 tolerance breach under ``--strict``.

The environment variable LAGUERRE_LOG selects the logging level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import fd, group, hypersurface, minimality, patches, spaceforms, spheres
from .errors import (DegenerateSurfaceError, EmbeddingDomainError,
                     InsufficientInteriorError, InvalidElementError,
                     LaguerreError, ToleranceBreachError, UsageError)

log = logging.getLogger("laguerre")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GROUP = 3
EXIT_DEGENERATE = 4
EXIT_STRICT = 5


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _emit(obj: dict, out_path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=True)
    if out_path:
        tmp = out_path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text + "\n")
        os.replace(tmp, out_path)
    else:
        sys.stdout.write(text + "\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return None if not np.isfinite(v) else v
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _build_patch_from_args(args) -> patches.SurfacePatch:
    spec = _load_json(args.spec)
    if args.grid_refine != 1:
        if "samples" in spec:
            raise UsageError("sampled data has a fixed grid; cannot refine it")
        if "grid" not in spec:
            entry = patches.BUILTINS.get(spec.get("builtin", ""))
            if entry is None:
                raise UsageError(f"unknown builtin surface {spec.get('builtin')!r}")
            spec["grid"] = {
                name: list(val[:3]) for name, val in entry["default_grid"].items()
            }
            spec["grid"]["periodic"] = [
                name for name, val in entry["default_grid"].items() if val[3]
            ]
        for key, val in spec["grid"].items():
            if key != "periodic":
                lo, hi, count = val
                spec["grid"][key] = [lo, hi, int(count) * args.grid_refine]
    return patches.build_patch(spec, fd_order=args.fd_order)


def cmd_spheres_contact(args) -> int:
    a = spheres.element_from_json(_load_json(args.a))
    b = spheres.element_from_json(_load_json(args.b))
    tol = args.tol if args.tol is not None else 1e-9
    contact = spheres.oriented_contact(a, b, tol=tol)
    F = None
    if isinstance(a, spheres.Sphere) and isinstance(b, spheres.Sphere):
        F = spheres.tangential_invariant(a, b)
    ga, gb = spheres.sphere_coord(a), spheres.sphere_coord(b)
    from . import lorentz

    out = {
        "contact": bool(contact),
        "F": F,
        "coords": [_jsonable(ga.vec), _jsonable(gb.vec)],
        "inner": float(lorentz.inner(ga.vec, gb.vec)),
        "seed": args.seed,
    }
    _emit(out, args.out)
    return EXIT_OK


def cmd_group_compose(args) -> int:
    script = _load_json(args.transform)
    T = group.compose_script(script, n=args.n)
    blocks = group.to_blocks(T)
    out = {
        "matrix": _jsonable(T.matrix),
        "blocks": {
            "A": _jsonable(blocks.A), "u": _jsonable(blocks.u),
            "v": _jsonable(blocks.v), "w": blocks.w,
            "a": _jsonable(blocks.a), "rho": blocks.rho,
        },
        "seed": args.seed,
    }
    _emit(out, args.out)
    return EXIT_OK


def cmd_group_decompose(args) -> int:
    script = _load_json(args.transform)
    T = group.compose_script(script, n=args.n)
    fact = group.decompose(T)
    err = float(np.abs(fact.reconstruct() - T.matrix).max())
    out = {
        "epsilon": fact.epsilon,
        "t": fact.t,
        "s": fact.s,
        "sigma1": {"A": _jsonable(fact.A1), "a": _jsonable(fact.a1)},
        "sigma2": {"A": _jsonable(fact.A2), "a": _jsonable(fact.a2)},
        "reconstruction_error": err,
        "seed": args.seed,
    }
    _emit(out, args.out)
    return EXIT_OK


def _analysis_payload(patch, fld, residuals) -> dict:
    axes = patch.axes
    mask = fd.valid_mask(fld.g)
    margins = fd.interior_margins(mask)
    payload = {
        "space": patch.space,
        "n": patch.n,
        "grid": {
            "axes": [
                {"name": nm, "lo": lo, "hi": hi, "count": ct, "periodic": per}
                for nm, lo, hi, ct, per in zip(axes.names, axes.los, axes.his,
                                               axes.counts, axes.periodic)
            ],
        },
        "interior_margin": {nm: mg for nm, mg in zip(axes.names, margins)},
        "shape": {
            "k_min": float(np.nanmin(fld.shape.k)),
            "k_max": float(np.nanmax(fld.shape.k)),
            "rho_min": float(np.nanmin(fld.shape.rho)),
            "rho_max": float(np.nanmax(fld.shape.rho)),
        },
        "s_eigenvalues": {
            "min": _jsonable(np.nanmin(fld.S_eigs, axis=tuple(range(axes.ndim)))),
            "max": _jsonable(np.nanmax(fld.S_eigs, axis=tuple(range(axes.ndim)))),
        },
        "b_eigenvalues": {
            "min": _jsonable(np.nanmin(fld.B_eigs, axis=tuple(range(axes.ndim)))),
            "max": _jsonable(np.nanmax(fld.B_eigs, axis=tuple(range(axes.ndim)))),
        },
        "residuals": {k: _jsonable(v) for k, v in sorted(residuals.items())},
        "diagnostics": {k: _jsonable(v) for k, v in sorted(fld.diagnostics.items())},
    }
    try:
        payload["volume"] = hypersurface.laguerre_volume(patch, fld.shape)
        if patch.n == 3:
            payload["volume_curvature_form"] = hypersurface.volume_via_curvature_quotient(
                patch, fld.shape
            )
    except UsageError:
        # Finite-difference jets leave boundary margins without data, so a
        # full-region quadrature is undefined for sampled patches.
        payload["volume"] = None
    return payload


def _write_csv(path: str, patch, fld) -> None:
    axes = patch.axes
    coords = np.meshgrid(*axes.coords(), indexing="ij")
    m = axes.ndim
    cols = [(nm, coords[i]) for i, nm in enumerate(axes.names)]
    for i in range(patch.ambient_dim):
        cols.append((f"x{i + 1}", patch.x[..., i]))
    for i in range(m):
        cols.append((f"k{i + 1}", fld.shape.k[..., i]))
    cols.append(("r", fld.shape.r))
    cols.append(("rho", fld.shape.rho))
    for i in range(m):
        cols.append((f"s_eig{i + 1}", fld.S_eigs[..., i]))
    header = ",".join(name for name, _ in cols)
    data = np.column_stack([arr.reshape(-1) for _, arr in cols])
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def _strict_gate(residuals: dict, tol: float) -> None:
    worst = {k: v for k, v in residuals.items()
             if isinstance(v, float) and np.isfinite(v) and v > tol}
    if worst:
        names = ", ".join(f"{k}={v:.3e}" for k, v in sorted(worst.items()))
        raise ToleranceBreachError(f"strict mode: residuals above {tol:g}: {names}")


def cmd_surface_analyze(args) -> int:
    patch = _build_patch_from_args(args)
    if patch.space != "r3":
        patch = spaceforms.embed_patch(patch)
    fld = hypersurface.analyze(patch, order=args.fd_order)
    residuals = hypersurface.structural_residuals(fld)
    payload = _analysis_payload(patch, fld, residuals)
    payload["seed"] = args.seed
    if args.csv:
        _write_csv(args.csv, patch, fld)
    if args.strict:
        _strict_gate(residuals, args.tol if args.tol is not None else 1e-3)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_surface_minimality(args) -> int:
    patch = _build_patch_from_args(args)
    if patch.space != "r3":
        patch = spaceforms.embed_patch(patch)
    fld = hypersurface.analyze(patch, order=args.fd_order)
    rep = minimality.minimality_report(patch, fld=fld, threshold=args.threshold)
    payload = rep.to_json()
    payload["seed"] = args.seed
    if args.strict and not rep.consistent:
        raise ToleranceBreachError("strict mode: the two minimality criteria disagree")
    _emit(_jsonable(payload), args.out)
    return EXIT_OK


def cmd_surface_volume(args) -> int:
    patch = _build_patch_from_args(args)
    if patch.space != "r3":
        patch = spaceforms.embed_patch(patch)
    shape = patches.shape_data(patch)
    payload = {"volume": hypersurface.laguerre_volume(patch, shape), "seed": args.seed}
    if patch.n == 3:
        payload["volume_curvature_form"] = hypersurface.volume_via_curvature_quotient(patch, shape)
        rel = abs(payload["volume"] - payload["volume_curvature_form"]) / max(
            abs(payload["volume"]), 1e-300)
        payload["forms_relative_gap"] = rel
        if args.strict and rel > (args.tol if args.tol is not None else 1e-6):
            raise ToleranceBreachError("strict mode: volume forms disagree")
    _emit(payload, args.out)
    return EXIT_OK


def cmd_surface_compare(args) -> int:
    p1 = _build_patch_from_args(args)
    spec2 = _load_json(args.spec2)
    p2 = patches.build_patch(spec2, fd_order=args.fd_order)
    if p1.space != "r3":
        p1 = spaceforms.embed_patch(p1)
    if p2.space != "r3":
        p2 = spaceforms.embed_patch(p2)
    if args.transform:
        T = group.compose_script(_load_json(args.transform))
        p2 = hypersurface.transform_patch(T, p2)
    f1 = hypersurface.analyze(p1, order=args.fd_order)
    f2 = hypersurface.analyze(p2, order=args.fd_order)
    payload = hypersurface.compare_invariants(f1, f2)
    payload["seed"] = args.seed
    if args.strict:
        _strict_gate(payload, args.tol if args.tol is not None else 1e-6)
    _emit(_jsonable(payload), args.out)
    return EXIT_OK


def cmd_surface_embed(args) -> int:
    native = _build_patch_from_args(args)
    if native.space == "r3":
        raise UsageError("embed expects a space tag 'r31' or 'r30' in the spec")
    embedded = spaceforms.embed_patch(native)
    transfer = spaceforms.transfer_check(native, embedded)
    fld = hypersurface.analyze(embedded, order=args.fd_order)
    residuals = hypersurface.structural_residuals(fld)
    rep = minimality.minimality_report(embedded, fld=fld, threshold=args.threshold)
    payload = {
        "transfer": {k: _jsonable(v) for k, v in sorted(transfer.items())},
        "analysis": _analysis_payload(embedded, fld, residuals),
        "minimality": _jsonable(rep.to_json()),
        "seed": args.seed,
    }
    if args.strict:
        _strict_gate(transfer, args.tol if args.tol is not None else 1e-6)
    _emit(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laguerre",
        description="Oriented-sphere geometry: transformation group, "
                    "hypersurface invariants, space-form embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write JSON here instead of stdout")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
        p.add_argument("--strict", action="store_true",
                       help="exit 5 when a checked quantity exceeds the tolerance")
        p.add_argument("--fd-order", type=int, choices=(2, 4), default=4)
        p.add_argument("--grid-refine", type=int, default=1,
                       help="multiply every axis count by this factor")

    sp = sub.add_parser("spheres", help="oriented contact of two elements")
    spsub = sp.add_subparsers(dest="subcommand", required=True)
    pc = spsub.add_parser("contact")
    pc.add_argument("--a", required=True)
    pc.add_argument("--b", required=True)
    common(pc)
    pc.set_defaults(func=cmd_spheres_contact)

    gp = sub.add_parser("group", help="compose or factor transforms")
    gpsub = gp.add_subparsers(dest="subcommand", required=True)
    gc = gpsub.add_parser("compose")
    gc.add_argument("--transform", required=True)
    gc.add_argument("--n", type=int, default=None,
                    help="base dimension when the script cannot reveal it")
    common(gc)
    gc.set_defaults(func=cmd_group_compose)
    gd = gpsub.add_parser("decompose")
    gd.add_argument("--transform", required=True)
    gd.add_argument("--n", type=int, default=None,
                    help="base dimension when the script cannot reveal it")
    common(gd)
    gd.set_defaults(func=cmd_group_decompose)

    su = sub.add_parser("surface", help="invariant analysis of surface patches")
    susub = su.add_subparsers(dest="subcommand", required=True)
    for name, func, extra in [
        ("analyze", cmd_surface_analyze, ("csv",)),
        ("minimality", cmd_surface_minimality, ("threshold",)),
        ("volume", cmd_surface_volume, ()),
        ("compare", cmd_surface_compare, ("spec2", "transform")),
        ("embed", cmd_surface_embed, ("threshold",)),
    ]:
        p = susub.add_parser(name)
        p.add_argument("--spec", required=True)
        if "spec2" in extra:
            p.add_argument("--spec2", required=True)
        if "transform" in extra:
            p.add_argument("--transform", default=None)
        if "csv" in extra:
            p.add_argument("--csv", default=None, help="per-point field export")
        if "threshold" in extra:
            p.add_argument("--threshold", type=float, default=None,
                           help="minimality verdict threshold")
        common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("LAGUERRE_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToleranceBreachError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except (DegenerateSurfaceError, InsufficientInteriorError, EmbeddingDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InvalidElementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GROUP
    except (UsageError, LaguerreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
