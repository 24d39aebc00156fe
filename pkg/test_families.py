import pytest

from agents.bundles import parse_bundle
from agents.twist_agent import TwistFamilyAgent
from agents.zeta_agent import TRANSLATES, ZetaFamilyAgent, check_zeta_structure, restricted
from conftest import FIXTURES
from core.errors import SemanticValidationError
from core.matrices import CarryingMatrix
from core.pa_engine import period_matrix, twist_period
from core.run_state import RunPhase, RunState


@pytest.fixture
def twist_bundle():
    return parse_bundle(FIXTURES / "twist_g1m2")


@pytest.fixture
def zeta_bundle():
    return parse_bundle(FIXTURES / "zeta_g3m1")


# --- твисты --------------------------------------------------------------------

def test_twist_family_rows(twist_bundle):
    state = RunState(command="family")
    agent = TwistFamilyAgent(twist_bundle, grid_steps=8, state=state)
    assert agent.fixed_bound >= 0
    assert len(agent.loop_for(2).boundaries) == 5

    rows = agent.run([0, 1])
    assert [row.param for row in rows] == [0, 1]
    assert rows[0].dilatation.overlaps(agent.base_certificate.dilatation ** 2)
    for row in rows:
        assert row.alpha_lo > 1
        assert row.positivity_power is not None
        assert 0 < row.supmin_lo <= row.supmin_hi
        assert row.period_log_lo > 0

    assert agent.stats["rows"] == 2
    assert agent.stats["splits"] == len(agent.loop_for(0).period) + len(agent.loop_for(1).period)
    assert len(state.get_phase_steps(RunPhase.CERTIFY)) == 2
    assert len(state.get_phase_steps(RunPhase.PROFILE)) == 2


def test_twist_needs_roles(twist_bundle):
    del twist_bundle.roles["twist"]
    with pytest.raises(SemanticValidationError):
        TwistFamilyAgent(twist_bundle)


# --- ζ(k) -----------------------------------------------------------------------

def test_zeta_structure(zeta_bundle):
    powers = check_zeta_structure(zeta_bundle)
    assert set(powers) == {"phi0", "phi1", "phi2"}
    assert all(power is not None and power >= 1 for power in powers.values())
    assert zeta_bundle.track.surface.complexity == 7


def test_zeta_overlap_is_checked(zeta_bundle):
    zeta_bundle.subtracks["sigma0"] = zeta_bundle.subtracks["sigma0"] - {2}
    with pytest.raises(SemanticValidationError) as info:
        check_zeta_structure(zeta_bundle)
    assert info.value.invariant == "zeta-overlap"


def test_zeta_cover_is_checked(zeta_bundle):
    zeta_bundle.subtracks["sigma2"] = zeta_bundle.subtracks["sigma2"] - {15}
    with pytest.raises(SemanticValidationError) as info:
        check_zeta_structure(zeta_bundle)
    assert info.value.invariant == "zeta-cover"


def test_zeta_needs_primitive_blocks(zeta_bundle):
    zeta_bundle.loops["phi0"] = twist_period(zeta_bundle.track, zeta_bundle.curves["a"])
    with pytest.raises(SemanticValidationError) as info:
        check_zeta_structure(zeta_bundle)
    assert info.value.invariant == "zeta-tight"


def test_restricted_block():
    matrix = CarryingMatrix(((1, 2, 3), (4, 5, 6), (7, 8, 9)))
    assert restricted(matrix, [3, 1]).rows == ((1, 3), (7, 9))


def test_zeta_loop_layout(zeta_bundle):
    agent = ZetaFamilyAgent(zeta_bundle, grid_steps=4)
    assembly = agent.loop_for(1)
    assert len(assembly.boundaries) == 7
    family = agent.curve_family(assembly)
    assert len(family) == len(assembly.boundaries) * 2 * len(TRANSLATES)
    assert family[0].name == "gamma1@0-1"
    with pytest.raises(ValueError):
        agent.loop_for(0)


@pytest.mark.slow
def test_zeta_first_row(zeta_bundle):
    agent = ZetaFamilyAgent(zeta_bundle, grid_steps=4)
    row = agent.row(1)
    assert row.square_positive
    assert row.alpha_lo > 1
    assert 0 < row.supmin_lo <= row.supmin_hi
    assert agent.stats["rows"] == 1


def test_zeta_square_is_positive(zeta_bundle):
    agent = ZetaFamilyAgent(zeta_bundle, grid_steps=4)
    for k in range(1, 5):
        assembly = agent.loop_for(k)
        assert len(assembly.period) == 30 + 80 * k
        matrix = period_matrix(assembly.period)
        assert (matrix @ matrix).is_positive, k


@pytest.mark.slow
def test_zeta_thin_part_shrinks(zeta_bundle):
    agent = ZetaFamilyAgent(zeta_bundle, grid_steps=4)
    rows = agent.run(range(1, 5))
    assert agent.stats["decreasing"]
    assert all(row.square_positive and row.alpha_lo > 1 for row in rows)
    assert rows[-1].supmin_hi < rows[0].supmin_lo / 2


@pytest.mark.slow
def test_twist_family_up_to_six(twist_bundle):
    agent = TwistFamilyAgent(twist_bundle, grid_steps=4)
    rows = agent.run(range(7))
    assert agent.stats["monotone"]
    assert agent.stats["bounded"]
    assert all(row.intersection_hi <= agent.fixed_bound for row in rows)
    assert rows[6].supmin_hi < rows[0].supmin_lo
