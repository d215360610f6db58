"""Command-line pipeline.

    wirelay strain   --config cfg.json [--out DIR] [--ply]
    wirelay weights  --config cfg.json [--eta X]
    wirelay solve    --config cfg.json --terminals t.json [--baseline]
                     [--eta X] [--sweep-eta] [--stp out.stp]
    wirelay smooth   --config cfg.json --layout layout.json [--wd X]
    wirelay eval     --config cfg.json --layout layout.json
    wirelay compare  --config cfg.json --terminals t.json
    wirelay gen      --kind sleeve-bend --out DIR [--param k=v ...]
    wirelay crosseval --config a.json --config b.json --terminals t.json
    wirelay serve    --config cfg.json --port 8080

Exit codes: 0 ok, 2 validation error, 3 solver/layout failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import exports
from .config import load_config
from .errors import (
    CannotSatisfyCurvature,
    ConfigError,
    DisconnectedTerminals,
    TerminalCapExceeded,
    WirelayError,
)
from .graph import build_graph
from .mesh import make_terminal_set
from .mesh_io import write_frames, write_garment_obj
from .pipeline import (
    Scenario,
    cached_integrals,
    cross_eval_matrix,
    dump_json,
    eta_sweep_grid,
    field_for,
    run_solve,
    sweep_eta,
)
from .solver import SolvePolicy, solve
from .steinlib import write_stp
from .strain import write_strain, write_strain_json
from .synthetic import gen_synthetic

log = logging.getLogger("wirelay")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _load_terminals(path):
    with open(path) as fh:
        data = json.load(fh)
    entries = []
    for t in data:
        if isinstance(t, int):
            entries.append(t)
        elif isinstance(t, dict) and "vertex" in t:
            entries.append(int(t["vertex"]))
        elif isinstance(t, dict) and "face" in t:
            entries.append((int(t["face"]), tuple(t["bary"])))
        else:
            entries.append((int(t[0]), tuple(t[1])))
    return make_terminal_set(entries)


def _out_dir(args, cfg) -> Path:
    out = Path(args.out if getattr(args, "out", None) else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_strain(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    t0 = time.perf_counter()
    field = field_for(scenario)
    dt = time.perf_counter() - t0
    frames = sum(s.frame_count for s in scenario.motions.sequences)
    print(f"strain field: {field.num_faces} faces, {frames} frames, "
          f"{dt:.2f} s ({dt / max(frames, 1):.4f} s/frame)")
    write_strain(out / "field.strain", field)
    write_strain_json(out / "field.json", field)
    (out / "heatmap.svg").write_text(exports.heatmap_svg(scenario.mesh, field))
    written = "field.strain, field.json, heatmap.svg"
    if args.ply:
        exports.write_face_colors_ply(out / "field.ply", scenario.mesh, field)
        written += ", field.ply"
    print(f"wrote {out}/{{{written}}}")
    return EXIT_OK


def cmd_weights(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    field = field_for(scenario)
    t0 = time.perf_counter()
    ints = cached_integrals(scenario.mesh, field, cfg.wd, cache_dir=out / "cache")
    print(f"edge integrals: {scenario.mesh.num_edges} edges, {time.perf_counter()-t0:.2f} s")
    eta = args.eta if args.eta is not None else (cfg.eta if cfg.eta != "auto" else 0.0)
    weights = ints.strain_part + float(eta) * ints.area_part
    payload = {
        "wd": cfg.wd,
        "eta": float(eta),
        "edges": [
            {
                "u": int(u),
                "v": int(v),
                "len": float(ints.length[i]),
                "w": float(weights[i]),
            }
            for i, (u, v) in enumerate(np.asarray(scenario.mesh.edges))
        ],
    }
    dump_json(out / "weights.json", payload)
    print(f"wrote {out}/weights.json")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    field = field_for(scenario)
    terminals = _load_terminals(args.terminals)

    if args.sweep_eta:
        mesh, ids, motions = _resolved(scenario, terminals)
        from .strain import compute_strain_field

        f2 = field
        if mesh is not scenario.mesh:
            f2 = compute_strain_field(mesh, motions, scenario.material, cfg.energy_variant)
        ints = cached_integrals(mesh, f2, cfg.wd, cache_dir=out / "cache")
        etas = list(cfg.eta_sweep) if cfg.eta_sweep else eta_sweep_grid(ints)
        rows = sweep_eta(mesh, f2, ints, ids, cfg.wd,
                         etas, SolvePolicy(cfg.prefer_exact, cfg.solver_cap))
        with open(out / "eta_sweep.csv", "w") as fh:
            fh.write("minusLog10Eta,eta,totalLength,strainEnergy\n")
            for r in rows:
                fh.write(f"{r['minusLog10Eta']},{r['eta']},{r['length']},{r['strainEnergy']}\n")
        print(f"wrote {out}/eta_sweep.csv")
        return EXIT_OK

    result, mesh, motions, field2 = run_solve(
        scenario,
        field,
        terminals,
        baseline=args.baseline,
        eta=args.eta,
        cache_dir=out / "cache",
    )
    tag = "baseline" if args.baseline else "weighted"
    dump_json(out / f"layout_{tag}.json", result.to_json_dict())
    if args.stp:
        write_stp(args.stp, result.graph)
    print(
        f"{tag}: weight={result.tree.total_weight:.6g} length={result.tree.total_length:.6g} "
        f"edges={result.tree.num_edges} solver={result.tree.solver_kind} "
        f"solve={result.solve_seconds:.3f}s"
    )
    print(f"metrics: energy={result.metrics['deformationEnergy']:.6g} "
          f"maxElong={result.metrics['maxElongationRate']:.4g}% "
          f"avgElong={result.metrics['avgElongationRate']:.4g}%")
    print(f"wrote {out}/layout_{tag}.json")
    return EXIT_OK


def _resolved(scenario, terminals):
    from .mesh import resolve_terminals

    return resolve_terminals(scenario.mesh, terminals, scenario.motions)


def _layout_from_file(scenario, layout_path, wd_override=None, max_iter=10):
    """Rebuild a WireLayout from a stored layout JSON on this scenario."""
    from .layout import WireLayout, branch_points, branches_from_pairs, smooth_branch
    from .solver import SteinerTree

    with open(layout_path) as fh:
        data = json.load(fh)
    # accept either a bare WireLayout dict or a full solve-result dict
    params = data.get("layout", data)
    tree_data = data["tree"]
    if "edgeVertices" not in tree_data:
        raise WirelayError(f"{layout_path}: layout JSON lacks tree.edgeVertices")
    pairs = [tuple(p) for p in tree_data["edgeVertices"]]
    wd = float(wd_override if wd_override is not None else params["wd"])
    tree = SteinerTree(
        edges=tuple(tree_data["edges"]),
        total_weight=float(tree_data["weight"]),
        total_length=float(tree_data["length"]),
        terminals=tuple(tree_data["terminals"]),
        solver_kind=tree_data["solverKind"],
    )
    branches = branches_from_pairs(pairs, tree.terminals)
    smoothed = tuple(
        smooth_branch(branch_points(scenario.mesh, b), wd, max_iter=max_iter)
        for b in branches
    )
    return WireLayout(
        tree=tree,
        branches=tuple(tuple(b) for b in branches),
        smoothed=smoothed,
        wd=wd,
        eta=float(params["eta"]),
    )


def cmd_smooth(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    layout = _layout_from_file(scenario, args.layout, wd_override=args.wd)
    kappa = max((s.max_curvature() for s in layout.smoothed), default=0.0)
    payload = layout.to_json_dict()
    dump_json(out / "layout_smoothed.json", payload)
    print(
        f"smoothed {len(layout.smoothed)} branches at wd={layout.wd}: "
        f"max curvature {kappa:.2f} < bound {2.0/layout.wd:.2f}"
    )
    print(f"wrote {out}/layout_smoothed.json")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    field = field_for(scenario)
    from .layout import evaluate_layout

    layout = _layout_from_file(scenario, args.layout)
    metrics = evaluate_layout(layout, field, scenario.mesh, scenario.motions)
    dump_json(out / "metrics.json", metrics.to_json_dict())
    print(
        f"energy={metrics.deformation_energy:.6g} "
        f"maxElong={metrics.max_elongation_rate:.4g}% "
        f"avgElong={metrics.avg_elongation_rate:.4g}% len={metrics.total_length:.6g}"
    )
    print(f"wrote {out}/metrics.json")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    scenario = Scenario.load(cfg)
    field = field_for(scenario)
    terminals = _load_terminals(args.terminals)
    overlays = []
    res_w, mesh, motions, field2 = run_solve(
        scenario, field, terminals, baseline=False, eta=args.eta, cache_dir=out / "cache"
    )
    # evaluate the baseline under the weighted solve's eta so both rows
    # share one energy functional (relevant when the config uses "auto")
    res_b, _, _, _ = run_solve(
        scenario, field, terminals, baseline=True, eta=res_w.eta, cache_dir=out / "cache"
    )
    rows = []
    for name, res in (("weighted", res_w), ("baseline", res_b)):
        row = dict(res.metrics)
        row["name"] = name
        rows.append(row)
        overlays.append((name, res.layout, "#111111" if name == "weighted" else "#b2182b"))
    exports.write_metrics_csv(out / "compare.csv", rows)
    dump_json(out / "compare.json", {"rows": rows})
    (out / "compare.svg").write_text(
        exports.overlay_svg(mesh, field2, overlays, terminals=res_w.tree.terminals)
    )
    for row in rows:
        print(
            f"{row['name']}: energy={row['deformationEnergy']:.6g} "
            f"maxElong={row['maxElongationRate']:.4g}% len={row['totalLength']:.6g}"
        )
    print(f"wrote {out}/compare.csv, compare.json, compare.svg")
    return EXIT_OK


def cmd_gen(args) -> int:
    params = {}
    for kv in args.param or []:
        k, v = kv.split("=", 1)
        try:
            params[k] = int(v)
        except ValueError:
            params[k] = float(v)
    res = gen_synthetic(args.kind, **params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_garment_obj(out / "mesh.obj", res.mesh)
    for seq in res.motions.sequences:
        write_frames(out / f"{seq.name}.frames", seq.frames)
    cfg = {
        "meshPath": "mesh.obj",
        "frames": [
            {"name": s.name, "path": f"{s.name}.frames"} for s in res.motions.sequences
        ],
        "synthetic_params": res.params,
    }
    (out / "project.json").write_text(json.dumps(cfg, indent=2, sort_keys=True))
    print(f"generated {args.kind}: {res.mesh.num_vertices} vertices, "
          f"{res.mesh.num_faces} faces -> {out}")
    return EXIT_OK


def cmd_crosseval(args) -> int:
    if len(args.config) < 1:
        raise ConfigError("crosseval needs at least one --config")
    terminals = _load_terminals(args.terminals)
    scenarios = [Scenario.load(load_config(c)) for c in args.config]
    topologies = {
        (s.mesh.num_vertices, np.asarray(s.mesh.faces).tobytes()) for s in scenarios
    }
    if len(topologies) != 1:
        raise WirelayError("crosseval: meshes differ in topology")
    out = Path(args.out or scenarios[0].config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    integrals_list = []
    etas = []
    trees = []
    ids_ref = None
    for s in scenarios:
        field = field_for(s)
        mesh, ids, motions = _resolved(s, terminals)
        if mesh is not s.mesh:
            from .strain import compute_strain_field

            field = compute_strain_field(mesh, motions, s.material, s.config.energy_variant)
        if ids_ref is None:
            ids_ref = ids
        elif ids != ids_ref:
            raise WirelayError("crosseval: terminal resolution differs across configs")
        ints = cached_integrals(mesh, field, s.config.wd, cache_dir=out / "cache")
        if s.config.eta == "auto":
            from .pipeline import calibrate_eta

            eta = calibrate_eta(mesh, field, ints, ids, s.config.wd)
        else:
            eta = float(s.config.eta)
        g = build_graph(mesh, field, ids, eta, s.config.wd, integrals=ints)
        trees.append(solve(g, SolvePolicy(s.config.prefer_exact, s.config.solver_cap)))
        integrals_list.append(ints)
        etas.append(g.eta)
    mat = cross_eval_matrix(integrals_list, etas, trees)
    payload = {
        "configs": [str(c) for c in args.config],
        "matrix": [[float(x) for x in row] for row in mat],
    }
    dump_json(out / "crosseval.json", payload)
    for row in mat:
        print("  ".join(f"{x:7.4f}" for x in row))
    print(f"wrote {out}/crosseval.json")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve_http

    cfg = load_config(args.config)
    serve_http(cfg, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wirelay", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, terminals=False):
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None)
        if terminals:
            sp.add_argument("--terminals", required=True)

    sp = sub.add_parser("strain", help="compute the strain field and heatmap")
    common(sp)
    sp.add_argument("--ply", action="store_true", help="also write a colored PLY")
    sp.set_defaults(func=cmd_strain)

    sp = sub.add_parser("weights", help="compute and export edge weights")
    common(sp)
    sp.add_argument("--eta", type=float, default=None)
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("solve", help="solve, smooth and evaluate a layout")
    common(sp, terminals=True)
    sp.add_argument("--baseline", action="store_true", help="uniform weights w(e)=1")
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--sweep-eta", action="store_true", help="write the eta sweep CSV")
    sp.add_argument("--stp", default=None, help="also export the graph as SteinLib")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("smooth", help="re-smooth a stored layout")
    common(sp)
    sp.add_argument("--layout", required=True)
    sp.add_argument("--wd", type=float, default=None)
    sp.set_defaults(func=cmd_smooth)

    sp = sub.add_parser("eval", help="evaluate a stored layout's metrics")
    common(sp)
    sp.add_argument("--layout", required=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("compare", help="weighted vs baseline comparison")
    common(sp, terminals=True)
    sp.add_argument("--eta", type=float, default=None)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("gen", help="generate a synthetic scenario")
    sp.add_argument("--kind", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--param", action="append", help="k=v generator parameter")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("crosseval", help="cross-evaluate layouts across fields")
    sp.add_argument("--config", action="append", required=True)
    sp.add_argument("--terminals", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_crosseval)

    sp = sub.add_parser("serve", help="run the designer HTTP service")
    sp.add_argument("--config", required=True)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8080)
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DisconnectedTerminals, TerminalCapExceeded, CannotSatisfyCurvature) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except WirelayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
