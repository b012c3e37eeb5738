"""Scenario runner: parse JSON configs, execute tasks, emit reports.

Reports are deterministic for a fixed config, seed and version: every random
draw goes through one seeded generator and every numeric result is emitted
with the tolerance it was checked against.  Exit code 0 means every property
check in every task passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, framechange, frames, groups, perspective, reductions, reps
from .builtins_config import builtin_config, builtin_names
from .frames import ResolutionFails
from .linalg import Tolerance, dagger
from .perspective import Scenario, physical_space
from .reductions import ThetaState

__all__ = ["ScenarioConfig", "ConfigError", "parse_config", "load_config", "run", "emit", "main"]

_KNOWN_TASKS = (
    "phys_space",
    "rel_obs",
    "reduce",
    "probabilities",
    "frame_change",
    "reorient",
    "lr_classify",
    "subsystem_relativity",
    "full_report",
)


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    name: str
    group_spec: dict
    subsystems: list[dict]
    frames: list[dict]
    tasks: list[dict]
    seed: int = 0
    tolerance: float = 1e-9

    def tol(self) -> Tolerance:
        return Tolerance(self.tolerance, self.tolerance)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _complex_scalar(x, path: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{path}: expected a number or [re, im] pair, got {x!r}")


def _complex_vector(x, path: str) -> np.ndarray:
    if not isinstance(x, (list, tuple)):
        raise ConfigError(f"{path}: expected a list of amplitudes")
    return np.array([_complex_scalar(v, f"{path}[{i}]") for i, v in enumerate(x)], dtype=complex)


def _complex_matrix(x, path: str) -> np.ndarray:
    if not isinstance(x, (list, tuple)) or not x:
        raise ConfigError(f"{path}: expected a matrix as a list of rows")
    rows = [_complex_vector(r, f"{path}[{i}]") for i, r in enumerate(x)]
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ConfigError(f"{path}: rows have inconsistent lengths")
    return np.vstack(rows)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario config."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return _validate_raw(raw)


def _validate_raw(raw: dict) -> ScenarioConfig:
    for key in ("group", "subsystems", "frames", "tasks"):
        if key not in raw:
            raise ConfigError(f"config is missing the {key!r} field")
    sub_names = []
    for i, sub in enumerate(raw["subsystems"]):
        if "name" not in sub or "rep" not in sub:
            raise ConfigError(f"subsystems[{i}]: needs 'name' and 'rep'")
        sub_names.append(sub["name"])
    if len(set(sub_names)) != len(sub_names):
        raise ConfigError("subsystem names must be unique")
    for i, fr in enumerate(raw["frames"]):
        if "name" not in fr or "subsystem" not in fr or "seed" not in fr:
            raise ConfigError(f"frames[{i}]: needs 'name', 'subsystem' and 'seed'")
        if fr["subsystem"] not in sub_names:
            raise ConfigError(
                f"frames[{i}]: frame {fr['name']!r} references unknown subsystem "
                f"{fr['subsystem']!r} (have: {', '.join(sub_names)})"
            )
    for i, task in enumerate(raw["tasks"]):
        if "task" not in task or task["task"] not in _KNOWN_TASKS:
            raise ConfigError(
                f"tasks[{i}]: unknown task {task.get('task')!r} (known: {', '.join(_KNOWN_TASKS)})"
            )
    return ScenarioConfig(
        name=raw.get("name", "scenario"),
        group_spec=raw["group"],
        subsystems=list(raw["subsystems"]),
        frames=list(raw["frames"]),
        tasks=list(raw["tasks"]),
        seed=int(raw.get("seed", 0)),
        tolerance=float(raw.get("tolerance", 1e-9)),
    )


def load_config(source: str) -> ScenarioConfig:
    """Load a config from a builtin name or a JSON file path."""
    try:
        return _validate_raw(builtin_config(source))
    except KeyError:
        pass
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as handle:
            return parse_config(handle.read())
    raise ConfigError(
        f"{source!r} is neither a builtin scenario nor an existing config file; "
        f"builtins: {', '.join(builtin_names())}"
    )


def _build_group(spec: dict):
    if "builtin" in spec:
        name = spec["builtin"].lower()
        if name == "u1":
            return groups.u1()
        if name == "su2":
            return groups.su2()
        try:
            return groups.builtin_group(spec["builtin"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if "table" in spec:
        return groups.finite_group_from_table(spec["table"])
    if "table_file" in spec:
        return groups.load_group_table(spec["table_file"])
    raise ConfigError("group spec needs 'builtin', 'table' or 'table_file'")


def _build_rep(group, spec: dict, path: str):
    if "spin_j" in spec:
        if not isinstance(group, groups.LieDescriptor) or group.kind != "SU2":
            raise ConfigError(f"{path}: spin_j representations need the su2 group")
        return reps.spin_rep(spec["spin_j"])
    if "u1_charges" in spec:
        if not isinstance(group, groups.LieDescriptor) or group.kind != "U1":
            raise ConfigError(f"{path}: u1_charges representations need the u1 group")
        return reps.u1_rep(spec["u1_charges"])
    if spec.get("regular"):
        if not isinstance(group, groups.FiniteGroup):
            raise ConfigError(f"{path}: regular representations need a finite group")
        return reps.regular_rep(group)
    if "matrices" in spec:
        if not isinstance(group, groups.FiniteGroup):
            raise ConfigError(f"{path}: per-element matrices need a finite group")
        mats = [_complex_matrix(m, f"{path}.matrices[{k}]") for k, m in enumerate(spec["matrices"])]
        return reps.finite_rep(group, np.stack(mats))
    if "generators" in spec:
        if not isinstance(group, groups.LieDescriptor):
            raise ConfigError(f"{path}: generators need a Lie group")
        gens = [_complex_matrix(m, f"{path}.generators[{k}]") for k, m in enumerate(spec["generators"])]
        return reps.lie_rep(group, np.stack(gens))
    raise ConfigError(f"{path}: unknown representation spec {spec!r}")


def _build_seed(rep, spec, path: str) -> np.ndarray:
    if spec == "uniform":
        return np.ones(rep.dim, dtype=complex) / np.sqrt(rep.dim)
    if spec == "identity_ket":
        if not rep.is_finite or rep.dim != rep.group.order:
            raise ConfigError(f"{path}: 'identity_ket' seeds need a regular representation")
        seed = np.zeros(rep.dim, dtype=complex)
        seed[rep.group.identity_index] = 1.0
        return seed
    vec = _complex_vector(spec, path)
    if vec.size != rep.dim:
        raise ConfigError(f"{path}: seed has {vec.size} amplitudes, representation needs {rep.dim}")
    return vec


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    group = _build_group(cfg.group_spec)
    subsystems = [
        (sub["name"], _build_rep(group, sub["rep"], f"subsystems[{i}].rep"))
        for i, sub in enumerate(cfg.subsystems)
    ]
    by_name = dict(subsystems)
    frame_map = {}
    for i, fr in enumerate(cfg.frames):
        rep = by_name[fr["subsystem"]]
        seed = _build_seed(rep, fr["seed"], f"frames[{i}].seed")
        try:
            frame = frames.make_frame(rep, seed, name=fr["name"], tol=cfg.tol())
        except ResolutionFails as exc:
            raise ConfigError(f"frames[{i}] ({fr['name']!r}): {exc}") from exc
        frame_map[fr["name"]] = (fr["subsystem"], frame)
    return perspective.make_scenario(group, subsystems, frame_map, cfg.tol())


def _element(scenario: Scenario, frame_name: str, spec, path: str):
    frame = scenario.frame(frame_name)
    if spec in (None, "identity"):
        return frame.rep.identity_element()
    if isinstance(spec, dict):
        if "theta" in spec:
            return groups.lie_element(groups.u1(), [float(spec["theta"])])
        if "su2" in spec:
            return groups.lie_element(groups.su2(), [float(c) for c in spec["su2"]])
        if "index" in spec:
            k = int(spec["index"])
            if not (frame.rep.is_finite and 0 <= k < frame.rep.group.order):
                raise ConfigError(f"{path}: element index {k} outside the group")
            return groups.FiniteElement(frame.rep.group, k)
    raise ConfigError(f"{path}: orientation must be 'identity', {{'theta':x}}, {{'su2':[...]}} or {{'index':k}}")


def _observable(dim: int, spec, path: str) -> np.ndarray:
    if isinstance(spec, dict):
        if "matrix" in spec:
            m = _complex_matrix(spec["matrix"], f"{path}.matrix")
        elif "diag" in spec:
            m = np.diag(_complex_vector(spec["diag"], f"{path}.diag"))
        else:
            raise ConfigError(f"{path}: observable needs 'matrix' or 'diag'")
        if m.shape != (dim, dim):
            raise ConfigError(f"{path}: observable is {m.shape}, expected ({dim}, {dim})")
        return m
    raise ConfigError(f"{path}: observable must be an object")


def _state(ps, spec, path: str) -> np.ndarray:
    if isinstance(spec, dict):
        if "basis_index" in spec:
            k = int(spec["basis_index"])
            if not 0 <= k < ps.dim:
                raise ConfigError(f"{path}: basis_index {k} outside physical dimension {ps.dim}")
            return ps.basis.basis[:, k]
        if "coefficients" in spec:
            c = _complex_vector(spec["coefficients"], f"{path}.coefficients")
            if c.size != ps.dim:
                raise ConfigError(f"{path}: need {ps.dim} physical coefficients")
            v = ps.basis.basis @ c
            return v / np.linalg.norm(v)
        if "amplitudes" in spec:
            v = _complex_vector(spec["amplitudes"], f"{path}.amplitudes")
            if v.size != ps.scenario.kin_dim:
                raise ConfigError(f"{path}: need {ps.scenario.kin_dim} kinematical amplitudes")
            return v / np.linalg.norm(v)
    raise ConfigError(f"{path}: state needs 'basis_index', 'coefficients' or 'amplitudes'")


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [_jsonable(v) for v in x.tolist()]
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if isinstance(x, groups.FiniteElement):
        return {"index": x.index}
    if isinstance(x, groups.LieElement):
        if x.descriptor.kind == "U1":
            return {"theta": x.coords[0]}
        return {"su2": list(x.coords)}
    return str(x)


def _check(name: str, residual: float, tol: float) -> dict:
    return {"name": name, "residual": float(residual), "tol": tol, "pass": bool(residual <= tol)}


def _basis_table(ps, limit: int = 2048) -> object:
    if ps.dim * ps.scenario.kin_dim > limit:
        return f"omitted ({ps.dim} x {ps.scenario.kin_dim} amplitudes)"
    return _jsonable(ps.basis.basis.T)


def _resolution_residual(scenario: Scenario, frame) -> float:
    if frame.rep.is_finite:
        w = frame.element_weight()
        total = sum(
            w * np.outer(v := frame.rep.matrices[g] @ frame.seed, np.conj(v))
            for g in frame.rep.group.elements()
        )
        return float(np.linalg.norm(total - np.eye(frame.dim)))
    twirl = reps.group_average(frame.rep, np.outer(frame.seed, np.conj(frame.seed)), "twirl", 1.0)
    return float(np.linalg.norm(twirl - np.eye(frame.dim) / frame.dim))


def _task_phys_space(scenario, ps, cfg, task, rng):
    checks = []
    worst = 0.0
    for op in perspective.gauge_checks(scenario):
        if scenario.total_rep.is_finite:
            resid = np.linalg.norm(op @ ps.basis.basis - ps.basis.basis)
        else:
            resid = np.linalg.norm(op @ ps.basis.basis)
        worst = max(worst, float(resid))
    checks.append(_check("physical_basis_invariance", worst, 1e4 * cfg.tolerance * max(1, ps.dim)))
    return {"dim": ps.dim, "kin_dim": scenario.kin_dim, "basis": _basis_table(ps)}, checks


def _task_rel_obs(scenario, ps, cfg, task, rng):
    fname = task["frame"]
    g = _element(scenario, fname, task.get("orientation"), "task.orientation")
    f_s = _observable(scenario.complement_dim(fname), task["observable"], "task.observable")
    obs = perspective.relational_observable(scenario, fname, g, f_s, cfg.tol())
    defect = perspective.strong_dirac_defect(scenario, obs.matrix)
    checks = [_check("dirac_commutation", defect, 1e5 * cfg.tolerance * max(1.0, float(np.abs(obs.matrix).max())))]
    return {
        "frame": fname,
        "orientation": _jsonable(obs.orientation),
        "restricted_matrix": _jsonable(ps.restrict(obs.matrix)),
    }, checks


def _task_reduce(scenario, ps, cfg, task, rng):
    fname = task["frame"]
    g = _element(scenario, fname, task.get("orientation"), "task.orientation")
    state = _state(ps, task["state"], "task.state")
    reduced = reductions.schrodinger_reduce(ps, fname, g, state)
    checks = [
        _check("isometry", abs(np.linalg.norm(reduced) - np.linalg.norm(state)), 1e4 * cfg.tolerance)
    ]
    return {
        "frame": fname,
        "orientation": _jsonable(g),
        "reduced_amplitudes": _jsonable(reduced),
    }, checks


def _task_probabilities(scenario, ps, cfg, task, rng):
    fname = task["frame"]
    g = _element(scenario, fname, task.get("orientation"), "task.orientation")
    proj = _observable(scenario.complement_dim(fname), task["projector"], "task.projector")
    state = _state(ps, task["state"], "task.state")
    p = reductions.conditional_probability(ps, fname, g, proj, state, cfg.tol())
    checks = [_check("probability_in_unit_interval", max(0.0, -p, p - 1.0), 1e4 * cfg.tolerance)]
    return {"frame": fname, "orientation": _jsonable(g), "probability": p}, checks


def _task_frame_change(scenario, ps, cfg, task, rng):
    f_from, f_to = task["from"], task["to"]
    g_from = _element(scenario, f_from, task.get("g_from"), "task.g_from")
    g_to = _element(scenario, f_to, task.get("g_to"), "task.g_to")
    change = framechange.frame_change(ps, f_from, g_from, f_to, g_to, cfg.tol())
    defect = change.scale_notes.get("isometry_defect", 0.0)
    checks = [_check("frame_change_isometry", defect, 1e5 * cfg.tolerance * max(1, change.matrix.shape[0]))]
    return {
        "from": f_from,
        "to": f_to,
        "shape": list(change.matrix.shape),
        "scale_notes": _jsonable(change.scale_notes),
    }, checks


def _task_reorient(scenario, ps, cfg, task, rng):
    fname = task["frame"]
    g1 = _element(scenario, fname, task.get("orientation"), "task.orientation")
    g = _element(scenario, fname, task["g"], "task.g")
    f_s = _observable(scenario.complement_dim(fname), task["observable"], "task.observable")
    obs = perspective.relational_observable(scenario, fname, g1, f_s, cfg.tol())
    moved = framechange.reorient(scenario, fname, g, obs, cfg.tol())
    direct = perspective.relational_observable(scenario, fname, moved.orientation, f_s, cfg.tol())
    resid = float(np.linalg.norm(moved.matrix - direct.matrix))
    checks = [_check("reorientation_orbit", resid, 1e5 * cfg.tolerance * max(1.0, float(np.abs(f_s).max())))]
    return {"frame": fname, "new_orientation": _jsonable(moved.orientation)}, checks


def _task_lr_classify(scenario, ps, cfg, task, rng):
    frame = scenario.frame(task["frame"])
    v_rep, report = frames.lr_classify(frame, cfg.tol())
    return {"frame": task["frame"], "lr_exists": v_rep is not None, "report": _jsonable(report)}, []


def _task_subsystem_relativity(scenario, ps, cfg, task, rng):
    report = framechange.subsystem_relativity_report(scenario, task["frame1"], task["frame2"], cfg.tol())
    checks = []
    if not report.get("degenerate"):
        checks.append(
            _check("relativized_commutation", report["relativized_commutant_residual"], 1e5 * cfg.tolerance)
        )
    return _jsonable(report), checks


def _random_hermitian(rng, dim: int) -> np.ndarray:
    h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (h + dagger(h)) / 2.0


def _task_full_report(scenario, ps, cfg, task, rng):
    tol = cfg.tolerance
    checks: list[dict] = []
    out: dict = {"phys_dim": ps.dim, "kin_dim": scenario.kin_dim, "basis": _basis_table(ps)}
    frames_out = {}
    for fname in scenario.frames:
        frame = scenario.frame(fname)
        entry: dict = {"subsystem": scenario.subsystems[scenario.frame_slot(fname)][0]}
        entry["volume"] = frame.weight_scale
        resid = _resolution_residual(scenario, frame)
        checks.append(_check(f"{fname}:resolution_of_identity", resid, 1e-8 * max(1, frame.dim)))
        if frame.isotropy.element_indices is not None:
            entry["isotropy_elements"] = list(frame.isotropy.element_indices)
        else:
            entry["isotropy_algebra_dim"] = len(frame.isotropy.algebra_basis or ())
            entry["isotropy_discrete_part_unknown"] = frame.isotropy.discrete_part_unknown
        v_rep, lr_report = frames.lr_classify(frame, cfg.tol())
        entry["lr_exists"] = v_rep is not None
        if v_rep is None:
            entry["lr_obstruction"] = lr_report["reason"]
        entry["orientation_independent"] = perspective.orientation_independent(scenario, fname, cfg.tol())
        pi_e = perspective.system_projector(scenario, fname, frame.rep.identity_element(), cfg.tol())
        entry["reduced_space_dim"] = int(round(float(np.trace(pi_e).real)))
        entry["conditional_span_dim"] = perspective.physical_system_span(scenario, fname, cfg.tol()).dim
        if ps.dim:
            theta = reductions.solve_theta(frame, cfg.tol())
            if isinstance(theta, ThetaState):
                entry["theta"] = {
                    "found": True,
                    "fourier_k": theta.fourier_k,
                    "phases": _jsonable(theta.phases) if theta.phases is not None else None,
                    "residual": theta.residual,
                }
                resid = _trinity_residual(scenario, ps, fname, theta, rng)
                checks.append(_check(f"{fname}:trinity_heisenberg_vs_schrodinger", resid, 1e-8))
                resid = _disentangler_residual(scenario, ps, fname, theta)
                checks.append(_check(f"{fname}:disentangler_product_form", resid, 1e-8))
            else:
                entry["theta"] = {"found": False, "reason": theta.reason, "residual": theta.residual}
                entry["heisenberg_picture"] = "unavailable, Schroedinger picture used"
        frames_out[fname] = entry
    out["frames"] = frames_out
    if ps.dim:
        fname = next(iter(scenario.frames), None)
        if fname is not None:
            dim_c = scenario.complement_dim(fname)
            a = _random_hermitian(rng, dim_c)
            b = _random_hermitian(rng, dim_c)
            frame = scenario.frame(fname)
            hom = perspective.check_weak_homomorphism(
                scenario, fname, frame.rep.identity_element(), a, b, cfg.tol()
            )
            out["weak_homomorphism"] = _jsonable(
                {k: hom[k] for k in ("weak", "strong", "max_weak_residual", "max_strong_residual", "strong_pass")}
            )
            hom_scale = max(1.0, float(np.abs(a).max()) * float(np.abs(b).max()))
            checks.append(_check(f"{fname}:weak_homomorphism", hom["max_weak_residual"] / hom_scale, 1e-7))
            coeff = rng.standard_normal(ps.dim) + 1j * rng.standard_normal(ps.dim)
            psi = ps.basis.basis @ (coeff / np.linalg.norm(coeff))
            coeff2 = rng.standard_normal(ps.dim) + 1j * rng.standard_normal(ps.dim)
            chi = ps.basis.basis @ (coeff2 / np.linalg.norm(coeff2))
            cip = perspective.conditional_inner_product_check(scenario, fname, psi, chi, None, cfg.tol())
            out["conditional_inner_product"] = _jsonable(
                {k: cip[k] for k in ("max_deviation", "samples")}
            )
            checks.append(_check(f"{fname}:conditional_inner_product", cip["max_deviation"], 1e-8))
        pairs = [(a, b) for a in scenario.frames for b in scenario.frames if a != b]
        changes = {}
        for f_from, f_to in pairs:
            ch = framechange.frame_change(
                ps,
                f_from,
                scenario.frame(f_from).rep.identity_element(),
                f_to,
                scenario.frame(f_to).rep.identity_element(),
                cfg.tol(),
            )
            defect = ch.scale_notes["isometry_defect"]
            checks.append(_check(f"frame_change:{f_from}->{f_to}", defect, 1e5 * tol * max(1, ch.matrix.shape[0])))
            changes[f"{f_from}->{f_to}"] = {"shape": list(ch.matrix.shape), "isometry_defect": defect}
        out["frame_changes"] = changes
        ideal_finite = [
            f for f in scenario.frames
            if scenario.frame(f).rep.is_finite
            and scenario.frame(f).dim == scenario.frame(f).rep.group.order
        ]
        if len(ideal_finite) >= 2 and len(scenario.subsystems) >= 3:
            f1, f2 = ideal_finite[0], ideal_finite[1]
            out["symmetry_layer"] = _symmetry_layer(scenario, ps, cfg, f1, f2, rng, checks)
    return out, checks


def _trinity_residual(scenario, ps, fname, theta, rng) -> float:
    coeff = rng.standard_normal(ps.dim) + 1j * rng.standard_normal(ps.dim)
    psi = ps.basis.basis @ (coeff / np.linalg.norm(coeff))
    heis = reductions.heisenberg_reduce(ps, fname, theta, psi)
    comp = scenario.complement_rep(fname)
    worst = 0.0
    for g in perspective.sample_elements(scenario.frame(fname).group, 8):
        red = reductions.schrodinger_reduce(ps, fname, g, psi)
        worst = max(worst, float(np.linalg.norm(dagger(comp.evaluate(g)) @ red - heis)))
    return worst


def _disentangler_residual(scenario, ps, fname, theta) -> float:
    frame = scenario.frame(fname)
    t_r = reductions.disentangler(scenario, fname, theta)
    worst = 0.0
    for k in range(ps.dim):
        v = ps.basis.basis[:, k]
        cond = scenario.condition_vector(fname, frame.seed, v)
        expect = scenario.inject_vector(fname, theta.vector, cond)
        worst = max(worst, float(np.linalg.norm(t_r @ v - expect)))
    return worst


def _symmetry_layer(scenario, ps, cfg, f1, f2, rng, checks) -> dict:
    tol = cfg.tolerance
    group = scenario.frame(f1).rep.group
    out: dict = {}
    dim_c = scenario.complement_dim(f1)
    f_s = _random_hermitian(rng, dim_c)
    g1 = groups.FiniteElement(group, 1 % group.order)
    g = groups.FiniteElement(group, (group.order - 1) % group.order)
    obs = perspective.relational_observable(scenario, f1, g1, f_s, cfg.tol())
    moved = framechange.reorient(scenario, f1, g, obs, cfg.tol())
    direct = perspective.relational_observable(scenario, f1, moved.orientation, f_s, cfg.tol())
    resid = float(np.linalg.norm(moved.matrix - direct.matrix))
    checks.append(_check("reorient_orbit_relabeling", resid, 1e-10 * max(1.0, float(np.abs(f_s).max())) * scenario.kin_dim))
    out["reorient_residual"] = resid
    slot2 = scenario.frame_slot(f2)
    sys_dim = scenario.complement_dim(f1) // scenario.subsystems[slot2][1].dim
    small = _random_hermitian(rng, sys_dim)
    src1 = np.kron(np.eye(scenario.subsystems[slot2][1].dim), small)
    obs1 = perspective.relational_observable(scenario, f1, g1, src1, cfg.tol())
    g2 = groups.FiniteElement(group, 0)
    outm = framechange.relation_conditional_reorient(scenario, f1, g1, f2, g2, obs1, True, cfg.tol())
    slot1 = scenario.frame_slot(f1)
    direct2 = perspective.relational_observable(
        scenario, f2, g2, np.kron(np.eye(scenario.subsystems[slot1][1].dim), small), cfg.tol()
    )
    resid = float(np.linalg.norm(outm.matrix - direct2.matrix))
    checks.append(_check("relation_conditional_reorient", resid, 1e-9 * max(1.0, float(np.abs(small).max())) * scenario.kin_dim))
    out["relation_conditional_residual"] = resid
    rel = framechange.subsystem_relativity_report(scenario, f1, f2, cfg.tol())
    out["subsystem_relativity"] = _jsonable(rel)
    checks.append(_check("relativized_commutation", rel["relativized_commutant_residual"], 1e5 * tol))
    if rel["coincide"]:
        checks.append(_check("distinct_system_subalgebras", 1.0, 0.0))
    else:
        checks.append(_check("distinct_system_subalgebras", 0.0, 0.5))
    return out


_TASK_RUNNERS = {
    "phys_space": _task_phys_space,
    "rel_obs": _task_rel_obs,
    "reduce": _task_reduce,
    "probabilities": _task_probabilities,
    "frame_change": _task_frame_change,
    "reorient": _task_reorient,
    "lr_classify": _task_lr_classify,
    "subsystem_relativity": _task_subsystem_relativity,
    "full_report": _task_full_report,
}


def run(cfg: ScenarioConfig) -> dict:
    """Execute the config's tasks in order; task errors are reported per task."""
    scenario = build_scenario(cfg)
    ps = physical_space(scenario, cfg.tol())
    rng = np.random.default_rng(cfg.seed)
    tasks_out = []
    failed = 0
    total = 0
    for i, task in enumerate(cfg.tasks):
        record: dict = {"task": task["task"], "params": _jsonable({k: v for k, v in task.items() if k != "task"})}
        try:
            results, checks = _TASK_RUNNERS[task["task"]](scenario, ps, cfg, task, rng)
            record["results"] = results
            record["checks"] = checks
            total += len(checks)
            failed += sum(0 if c["pass"] else 1 for c in checks)
        except KeyError as exc:
            record["error"] = f"missing task parameter {exc}"
            failed += 1
            total += 1
        except (ConfigError, ValueError, np.linalg.LinAlgError) as exc:
            record["error"] = str(exc)
            failed += 1
            total += 1
        tasks_out.append(record)
    return {
        "tool": {"name": "qrf", "version": __version__},
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
        "scenario": {
            "name": cfg.name,
            "group": _jsonable(cfg.group_spec),
            "subsystems": _jsonable(cfg.subsystems),
            "frames": _jsonable([{k: v for k, v in fr.items()} for fr in cfg.frames]),
        },
        "tasks": tasks_out,
        "summary": {"checks_total": total, "checks_failed": failed},
    }


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _fmt_complex(pair) -> str:
    re, im = (pair if isinstance(pair, (list, tuple)) else (pair, 0.0))
    return f"{re:+.6f}{im:+.6f}i"


def _emit_table_value(value, indent: int, lines: list[str], key: str) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k, v in value.items():
            _emit_table_value(v, indent + 1, lines, k)
    elif isinstance(value, list) and value and isinstance(value[0], list) and value and all(
        isinstance(x, (int, float)) for x in value[0]
    ) and len(value[0]) == 2:
        lines.append(f"{pad}{key}: [{', '.join(_fmt_complex(v) for v in value)}]")
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        lines.append(f"{pad}{key}:")
        for i, v in enumerate(value):
            _emit_table_value(v, indent + 1, lines, f"[{i}]")
    elif isinstance(value, list) and value and isinstance(value[0], list):
        lines.append(f"{pad}{key}:")
        for i, v in enumerate(value):
            _emit_table_value(v, indent + 1, lines, f"row{i}")
    elif isinstance(value, float):
        lines.append(f"{pad}{key}: {value:.6g}")
    else:
        lines.append(f"{pad}{key}: {value}")


def emit(report: dict, format: str = "json") -> str:
    """Serialize a report: full-precision stable JSON or a rounded text table."""
    if format == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if format != "table":
        raise ValueError(f"unknown format {format!r}")
    lines: list[str] = []
    lines.append(f"qrf {report['tool']['version']} scenario report: {report['scenario']['name']}")
    lines.append(f"seed={report['seed']} tolerance={report['tolerance']}")
    for record in report["tasks"]:
        lines.append("")
        lines.append(f"== task: {record['task']}")
        if "error" in record:
            lines.append(f"  ERROR: {record['error']}")
            continue
        _emit_table_value(record.get("results", {}), 1, lines, "results")
        for c in record.get("checks", []):
            status = "PASS" if c["pass"] else "FAIL"
            lines.append(f"  [{status}] {c['name']}: residual {c['residual']:.3e} (tol {c['tol']:.1e})")
    s = report["summary"]
    lines.append("")
    lines.append(f"checks: {s['checks_total'] - s['checks_failed']}/{s['checks_total']} passed")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qrf", description="quantum reference frame scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a builtin or config-file scenario")
    run_p.add_argument("scenario", help="builtin name or path to a JSON config")
    run_p.add_argument("--format", choices=("json", "table"), default="json")
    run_p.add_argument("--tol", type=float, default=None, help="override tolerance")
    run_p.add_argument("--seed", type=int, default=None, help="override PRNG seed")
    run_p.add_argument("--out", default=None, help="write the report to a file")

    sub.add_parser("list-builtins", help="list builtin scenario names")

    check_p = sub.add_parser("check", help="parse and validate a config without running it")
    check_p.add_argument("scenario", help="builtin name or path to a JSON config")

    args = parser.parse_args(argv)
    if args.command == "list-builtins":
        for name in builtin_names():
            print(name)
        return 0
    try:
        cfg = load_config(args.scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "check":
        try:
            build_scenario(cfg)
        except (ConfigError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        print(f"config ok: {cfg.name}")
        return 0
    env_tol = os.environ.get("QRF_TOL")
    if args.tol is not None:
        cfg.tolerance = args.tol
    elif env_tol is not None:
        cfg.tolerance = float(env_tol)
    if args.seed is not None:
        cfg.seed = args.seed
    try:
        report = run(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = emit(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["checks_failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
