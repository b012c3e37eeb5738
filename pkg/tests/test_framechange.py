import numpy as np
import pytest

from conftest import random_hermitian, regular_three_party, u1_basis_index
from qrf import frames, framechange, groups, perspective, reps
from qrf.framechange import (
    frame_change,
    relation_conditional_reorient,
    reorient,
    subsystem_relativity_report,
    tautological_relobs,
)
from qrf.linalg import dagger
from qrf.perspective import physical_space, relational_observable, system_projector
from qrf.reductions import schrodinger_map


def test_frame_change_matches_explicit_kernel_z2():
    s = regular_three_party(groups.cyclic(2))
    ps = physical_space(s)
    ch = frame_change(ps, "R1", 0, "R2", 0)
    g = s.group
    reg = s.subsystems[0][1]
    seed = s.frame("R1").seed
    # rows live on (R1, S), columns on (R2, S)
    kernel = np.zeros((4, 4), dtype=complex)
    for k in g.elements():
        ket = reg.matrices[k] @ seed
        bra = reg.matrices[g.inverse(k)] @ seed
        kernel += np.kron(np.outer(ket, np.conj(bra)), reg.matrices[k])
    np.testing.assert_allclose(ch.matrix, kernel, atol=1e-10)


def test_frame_change_kernel_with_orientations_s3(s3_regular_scenario):
    s = s3_regular_scenario
    ps = physical_space(s)
    g = s.group
    g1, g2 = 2, 4
    ch = frame_change(ps, "R1", g1, "R2", g2)
    reg = s.subsystems[0][1]
    seed = s.frame("R1").seed
    kernel = np.zeros((36, 36), dtype=complex)
    for k in g.elements():
        ket = reg.matrices[g.mult(k, g1)] @ seed
        bra = reg.matrices[g.mult(g.inverse(k), g2)] @ seed
        kernel += np.kron(np.outer(ket, np.conj(bra)), reg.matrices[k])
    np.testing.assert_allclose(ch.matrix, kernel, atol=1e-9)


def test_frame_change_unitarity_u1(u1_scenario):
    ps = physical_space(u1_scenario)
    ch = frame_change(ps, "A", [0.3], "C", [1.1])
    assert ch.matrix.shape == (4, 6)
    np.testing.assert_allclose(
        dagger(ch.matrix) @ ch.matrix, system_projector(u1_scenario, "A", [0.3]), atol=1e-8
    )
    np.testing.assert_allclose(ch.matrix @ dagger(ch.matrix), np.eye(4), atol=1e-8)


def test_frame_change_round_trip(u1_scenario):
    ps = physical_space(u1_scenario)
    fwd = frame_change(ps, "A", [0.3], "C", [1.1])
    back = frame_change(ps, "C", [1.1], "A", [0.3])
    np.testing.assert_allclose(
        back.matrix @ fwd.matrix, system_projector(u1_scenario, "A", [0.3]), atol=1e-8
    )


def test_frame_change_state_transport(u1_scenario):
    # transporting a conditional description matches reducing relative to the new frame
    from qrf.reductions import schrodinger_reduce

    ps = physical_space(u1_scenario)
    kin = np.zeros(12, dtype=complex)
    for charges, amp in zip(((1, 1, -2), (1, -1, 0), (-1, 1, 0), (-1, -1, 2)), (0.5, 0.5, 0.5, 0.5)):
        kin[u1_basis_index(*charges)] = amp
    red_a = schrodinger_reduce(ps, "A", [0.3], kin)
    red_c = schrodinger_reduce(ps, "C", [1.1], kin)
    ch = frame_change(ps, "A", [0.3], "C", [1.1])
    np.testing.assert_allclose(ch.matrix @ red_a, red_c, atol=1e-9)


def test_same_frame_change_is_relabeling(u1_scenario):
    ps = physical_space(u1_scenario)
    ch = frame_change(ps, "A", [0.3], "A", [0.9])
    m1 = schrodinger_map(ps, "A", [0.3])
    m2 = schrodinger_map(ps, "A", [0.9])
    np.testing.assert_allclose(ch.matrix, m2.matrix @ m1.inverse_matrix, atol=1e-10)


def test_frame_change_rejects_empty_physical_space():
    rep_c = reps.u1_rep([5, 7])  # charge sums never vanish against the two qubits
    qubit = reps.u1_rep([1, -1])
    half = np.array([1, 1]) / np.sqrt(2)
    s = perspective.make_scenario(
        groups.u1(),
        [("A", qubit), ("B", qubit), ("C", rep_c)],
        {
            "A": ("A", frames.make_frame(qubit, half, name="A")),
            "B": ("B", frames.make_frame(qubit, half, name="B")),
        },
    )
    assert physical_space(s).dim == 0
    with pytest.raises(ValueError, match="empty"):
        frame_change(physical_space(s), "A", [0.0], "B", [0.0])


# ---------------------------------------------------------------------------
# reorientations
# ---------------------------------------------------------------------------


def test_reorient_identity_leaves_observable(s3_regular_scenario):
    rng = np.random.default_rng(22)
    f_s = random_hermitian(rng, 36)
    obs = relational_observable(s3_regular_scenario, "R1", 1, f_s)
    moved = reorient(s3_regular_scenario, "R1", 0, obs)
    np.testing.assert_allclose(moved.matrix, obs.matrix, atol=1e-12)
    assert moved.orientation.index == 1


def test_reorient_orbit_action_composition(s3_regular_scenario):
    s = s3_regular_scenario
    g = s.group
    rng = np.random.default_rng(23)
    f_s = random_hermitian(rng, 36)
    obs = relational_observable(s, "R1", 2, f_s)
    a, b = 1, 4
    seq = reorient(s, "R1", b, reorient(s, "R1", a, obs))
    combined = reorient(s, "R1", g.mult(b, a), obs)
    np.testing.assert_allclose(seq.matrix, combined.matrix, atol=1e-10)
    assert seq.orientation.index == combined.orientation.index
    direct = relational_observable(s, "R1", seq.orientation, f_s)
    np.testing.assert_allclose(seq.matrix, direct.matrix, atol=1e-10)


def test_reorient_commutes_with_gauge(s3_regular_scenario):
    s = s3_regular_scenario
    v_rep = framechange.ensure_lr(s.frame("R1"))
    for k in s.group.elements():
        v_full = s.embed_frame_operator("R1", v_rep.matrices[k], np.eye(36))
        for gp in s.group.elements():
            u = s.total_rep.matrices[gp]
            assert np.linalg.norm(v_full @ u - u @ v_full) < 1e-10


def test_reorient_requires_lr(three_spin_scenario):
    rng = np.random.default_rng(24)
    f_s = random_hermitian(rng, 9)
    obs = relational_observable(three_spin_scenario, "A", [0, 0, 0], f_s)
    with pytest.raises(ValueError, match="no right action"):
        reorient(three_spin_scenario, "A", [0.5, 0, 0], obs)


def test_reorient_u1_frame(u1_scenario):
    rng = np.random.default_rng(25)
    f_s = random_hermitian(rng, 6)
    obs = relational_observable(u1_scenario, "A", [1.0], f_s)
    moved = reorient(u1_scenario, "A", [0.4], obs)
    direct = relational_observable(u1_scenario, "A", [0.6], f_s)
    np.testing.assert_allclose(moved.matrix, direct.matrix, atol=1e-9)


# ---------------------------------------------------------------------------
# relation-conditional reorientations (regular representations only)
# ---------------------------------------------------------------------------


def test_relation_conditional_identity_is_unital(z3_regular_scenario):
    s = z3_regular_scenario
    obs = relational_observable(s, "R1", 1, np.eye(9))
    out = relation_conditional_reorient(s, "R1", 1, "R2", 2, obs, modified=False)
    np.testing.assert_allclose(out.matrix, np.eye(27), atol=1e-10)


@pytest.mark.parametrize("modified", [True, False])
def test_relation_conditional_maps_system_observables(z3_regular_scenario, modified):
    s = z3_regular_scenario
    rng = np.random.default_rng(26)
    small = random_hermitian(rng, 3)
    obs = relational_observable(s, "R1", 1, np.kron(np.eye(3), small))
    out = relation_conditional_reorient(s, "R1", 1, "R2", 2, obs, modified=modified)
    direct = relational_observable(s, "R2", 2, np.kron(np.eye(3), small))
    np.testing.assert_allclose(out.matrix, direct.matrix, atol=1e-9)
    assert out.frame_name == "R2"


def test_relation_conditional_tautological_target(z3_regular_scenario):
    s = z3_regular_scenario
    g = s.group
    vals = np.array([0.0, 1.0, 2.0])
    orbit2 = np.column_stack([s.frame("R2").rep.matrices[k] @ s.frame("R2").seed for k in g.elements()])
    q2 = orbit2 @ np.diag(vals) @ dagger(orbit2)
    obs = relational_observable(s, "R1", 1, np.kron(q2, np.eye(3)))
    for modified in (True, False):
        out = relation_conditional_reorient(s, "R1", 1, "R2", 2, obs, modified=modified)
        np.testing.assert_allclose(out.matrix, vals[2] * np.eye(27), atol=1e-9)


def test_relation_conditional_modified_maps_own_tautology(z3_regular_scenario):
    s = z3_regular_scenario
    g = s.group
    vals = np.array([0.5, -1.0, 2.5])
    obs = tautological_relobs(s, "R1", 1, vals)
    np.testing.assert_allclose(obs.matrix, vals[1] * np.eye(27), atol=1e-12)
    out = relation_conditional_reorient(s, "R1", 1, "R2", 2, obs, modified=True)
    orbit1 = np.column_stack([s.frame("R1").rep.matrices[k] @ s.frame("R1").seed for k in g.elements()])
    q1 = orbit1 @ np.diag(vals) @ dagger(orbit1)
    direct = relational_observable(s, "R2", 2, np.kron(q1, np.eye(3)))
    np.testing.assert_allclose(out.matrix, direct.matrix, atol=1e-9)
    # the unital form fixes tautological observables instead
    out_unital = relation_conditional_reorient(s, "R1", 1, "R2", 2, obs, modified=False)
    np.testing.assert_allclose(out_unital.matrix, vals[1] * np.eye(27), atol=1e-9)


def test_relation_conditional_image_is_reorientation_invariant(z3_regular_scenario):
    s = z3_regular_scenario
    rng = np.random.default_rng(27)
    small = random_hermitian(rng, 3)
    obs = relational_observable(s, "R1", 0, np.kron(np.eye(3), small))
    out = relation_conditional_reorient(s, "R1", 0, "R2", 1, obs)
    v_rep = framechange.ensure_lr(s.frame("R1"))
    for k in s.group.elements():
        v_full = s.embed_frame_operator("R1", v_rep.matrices[k], np.eye(9))
        assert np.linalg.norm(v_full @ out.matrix - out.matrix @ v_full) < 1e-9


def test_relation_conditional_rejects_non_regular(u1_scenario):
    rng = np.random.default_rng(28)
    obs = relational_observable(u1_scenario, "A", [0.0], random_hermitian(rng, 6))
    with pytest.raises(ValueError, match="regular"):
        relation_conditional_reorient(u1_scenario, "A", [0.0], "C", [0.0], obs)


def test_relation_conditional_rejects_non_regular_finite_frame():
    # a valid Z4 frame on a 2-dim representation is not a regular-representation frame
    g = groups.cyclic(4)
    mats = np.stack([np.diag([1.0, (-1.0) ** k]).astype(complex) for k in range(4)])
    rep = reps.finite_rep(g, mats)
    f1 = frames.make_frame(rep, np.array([1, 1]) / np.sqrt(2), name="R1")
    reg = reps.regular_rep(g)
    seed = np.zeros(4, dtype=complex)
    seed[0] = 1.0
    f2 = frames.make_frame(reg, seed, name="R2")
    s = perspective.make_scenario(
        g, [("R1", rep), ("R2", reg), ("S", rep)], {"R1": ("R1", f1), "R2": ("R2", f2)}
    )
    obs = relational_observable(s, "R1", 0, np.eye(8), check=False)
    with pytest.raises(ValueError, match="not a regular"):
        relation_conditional_reorient(s, "R1", 0, "R2", 0, obs)


# ---------------------------------------------------------------------------
# subsystem relativity
# ---------------------------------------------------------------------------


def test_subsystem_relativity_degenerate_call(z3_regular_scenario):
    out = subsystem_relativity_report(z3_regular_scenario, "R1", "R1")
    assert out["degenerate"] and out["coincide"]


def test_subsystem_relativity_regular_scenarios(z3_regular_scenario, s3_regular_scenario):
    for s in (z3_regular_scenario, s3_regular_scenario):
        out = subsystem_relativity_report(s, "R1", "R2")
        assert out["commuting_pass"]
        assert out["relativized_commutant_residual"] < 1e-10
        assert not out["coincide"]
        d1, d2 = out["algebra_dims"]
        assert out["overlap_dim"] < min(d1, d2)


def test_batched_restricted_family_matches_twirl_route(z3_regular_scenario, s3_regular_scenario):
    for s in (z3_regular_scenario, s3_regular_scenario):
        ps = physical_space(s)
        d = s.subsystems[2][1].dim
        fam = framechange.restricted_unit_family(s, ps, "R1", 2)
        for i, j in ((0, 0), (0, 1), (d - 1, 1)):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            direct = ps.restrict(
                relational_observable(s, "R1", 0, np.kron(np.eye(d), unit), check=False).matrix
            )
            np.testing.assert_allclose(fam[i * d + j], direct, atol=1e-10)
        # frame-2 units relative to frame 1 as well
        fam2 = framechange.restricted_unit_family(s, ps, "R1", 1)
        unit = np.zeros((d, d), dtype=complex)
        unit[1, 0] = 1.0
        direct2 = ps.restrict(
            relational_observable(s, "R1", 0, np.kron(unit, np.eye(d)), check=False).matrix
        )
        np.testing.assert_allclose(fam2[1 * d + 0], direct2, atol=1e-10)
