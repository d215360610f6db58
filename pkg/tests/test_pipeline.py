import json

import numpy as np
import pytest

from wirelay.config import ProjectConfig, SyntheticSpec
from wirelay.graph import build_graph
from wirelay.mesh import make_terminal_set, nearest_vertex
from wirelay.pipeline import (
    Scenario,
    cached_integrals,
    calibrate_eta,
    cross_eval_matrix,
    eta_sweep_grid,
    field_for,
    integrals_cache_key,
    run_solve,
    sweep_eta,
)
from wirelay.solver import solve
from wirelay.synthetic import sleeve_outer_u


@pytest.fixture(scope="module")
def scenario():
    cfg = ProjectConfig(
        synthetic=SyntheticSpec(
            kind="sleeve-bend",
            params={"n_around": 16, "n_along": 8, "radius": 0.2, "length": 1.0, "frames": 8},
        ),
        eta=1e5,
    )
    return Scenario.load(cfg)


def test_cache_key_sensitivity(scenario):
    field = field_for(scenario)
    k1 = integrals_cache_key(scenario.mesh, field, 0.015)
    k2 = integrals_cache_key(scenario.mesh, field, 0.02)
    assert k1 != k2
    # a different field invalidates
    from wirelay.strain import StrainField

    other = StrainField(
        per_face_density=np.asarray(field.per_face_density) * 2.0,
        per_sequence_means=np.asarray(field.per_sequence_means) * 2.0,
        sequence_names=field.sequence_names,
        material=field.material,
        variant=field.variant,
    )
    assert integrals_cache_key(scenario.mesh, other, 0.015) != k1


def test_cached_integrals_round_trip(tmp_path, scenario):
    field = field_for(scenario)
    a = cached_integrals(scenario.mesh, field, 0.015, cache_dir=tmp_path)
    files = list(tmp_path.glob("weights_*.npz"))
    assert len(files) == 1
    b = cached_integrals(scenario.mesh, field, 0.015, cache_dir=tmp_path)
    assert np.allclose(a.strain_part, b.strain_part)
    assert np.allclose(a.area_part, b.area_part)
    assert len(list(tmp_path.glob("weights_*.npz"))) == 1
    cached_integrals(scenario.mesh, field, 0.02, cache_dir=tmp_path)
    assert len(list(tmp_path.glob("weights_*.npz"))) == 2


def test_run_solve_with_face_terminals(scenario):
    field = field_for(scenario)
    tset = make_terminal_set(
        [(3, (1 / 3, 1 / 3, 1 / 3)), (200, (0.2, 0.3, 0.5))]
    )
    result, mesh, motions, field2 = run_solve(scenario, field, tset, eta=1e5)
    # terminal insertion subdivided the mesh and refreshed the field
    assert mesh.num_faces > scenario.mesh.num_faces
    assert field2.num_faces == mesh.num_faces
    assert result.tree.num_edges >= 1
    assert result.metrics["deformationEnergy"] > 0


def test_calibrated_eta_lies_in_grid(scenario):
    field = field_for(scenario)
    ints = cached_integrals(scenario.mesh, field, 0.015)
    u = sleeve_outer_u(0.2, 16)
    terms = [
        nearest_vertex(scenario.mesh, (u, 0.1)),
        nearest_vertex(scenario.mesh, (u, 0.9)),
    ]
    etas = eta_sweep_grid(ints)
    assert len(etas) == 8
    assert all(b > a for a, b in zip(etas, etas[1:]))
    star = calibrate_eta(scenario.mesh, field, ints, terms, 0.015)
    assert etas[0] <= star <= etas[-1]


def test_sweep_rows_structure(scenario):
    field = field_for(scenario)
    ints = cached_integrals(scenario.mesh, field, 0.015)
    u = sleeve_outer_u(0.2, 16)
    terms = [
        nearest_vertex(scenario.mesh, (u, 0.1)),
        nearest_vertex(scenario.mesh, (u, 0.9)),
    ]
    rows = sweep_eta(scenario.mesh, field, ints, terms, 0.015, [1e3, 1e9])
    assert rows[0]["length"] >= rows[1]["length"]
    assert rows[0]["strainEnergy"] <= rows[1]["strainEnergy"]


def test_cross_eval_identity(scenario):
    field = field_for(scenario)
    ints = cached_integrals(scenario.mesh, field, 0.015)
    u = sleeve_outer_u(0.2, 16)
    terms = [
        nearest_vertex(scenario.mesh, (u, 0.1)),
        nearest_vertex(scenario.mesh, (u, 0.9)),
    ]
    g = build_graph(scenario.mesh, field, terms, 1e5, 0.015, integrals=ints)
    tree = solve(g)
    mat = cross_eval_matrix([ints], [g.eta], [tree])
    assert mat.shape == (1, 1)
    assert mat[0, 0] == 1.0


def test_crosseval_cli_rejects_mismatched_meshes(tmp_path):
    from wirelay.cli import main

    cfg_a = {
        "synthetic": {"kind": "sleeve-bend", "params": {"n_around": 8, "n_along": 4, "frames": 2}},
        "eta": 1e5,
    }
    cfg_b = {
        "synthetic": {"kind": "sleeve-bend", "params": {"n_around": 12, "n_along": 4, "frames": 2}},
        "eta": 1e5,
    }
    (tmp_path / "a.json").write_text(json.dumps(cfg_a))
    (tmp_path / "b.json").write_text(json.dumps(cfg_b))
    (tmp_path / "t.json").write_text(json.dumps([{"vertex": 0}, {"vertex": 10}]))
    rc = main(
        [
            "crosseval",
            "--config",
            str(tmp_path / "a.json"),
            "--config",
            str(tmp_path / "b.json"),
            "--terminals",
            str(tmp_path / "t.json"),
            "--out",
            str(tmp_path / "out"),
        ]
    )
    assert rc == 2
