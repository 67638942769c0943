import math

import numpy as np
import pytest

from dubinsrl.errors import GeometryError
from dubinsrl.sim import (
    EVENT_GOAL_REACHED,
    EVENT_WALL_HIT,
    VehicleState,
    aa_ata,
    dogfight_reward,
    empty_arena,
    goal_reward,
)

SCN = empty_arena()


def test_distance_penalty_at_5000m():
    # hand evaluation: -1e-5 * hypot(3000, 4000) = -1e-5 * 5000 = -0.05
    reward = goal_reward((0.0, 0.0), (0.0, 0.0), (3000.0, 4000.0), frozenset(), SCN)
    assert reward == -0.05


def test_goal_bonus():
    reward = goal_reward((10.0, 0.0), (3000.0, 4000.0), (3000.0, 4000.0),
                         frozenset({EVENT_GOAL_REACHED}), SCN)
    assert reward == 10000.0


def test_wall_penalty_adds_to_distance_term():
    reward = goal_reward((0.0, 0.0), (0.0, 0.0), (600.0, 800.0),
                         frozenset({EVENT_WALL_HIT}), SCN)
    assert reward == pytest.approx(-100.0 - 1e-5 * 1000.0, abs=1e-12)


def test_zero_distance_zero_penalty():
    assert goal_reward((5.0, 5.0), (100.0, 100.0), (100.0, 100.0), frozenset(), SCN) == 0.0


def test_translation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(200):
        pos = rng.uniform(0, 4000, size=2)
        goal = rng.uniform(0, 4000, size=2)
        shift = rng.uniform(-10000, 10000, size=2)
        base = goal_reward(pos, pos, goal, frozenset(), SCN)
        shifted = goal_reward(pos + shift, pos + shift, goal + shift, frozenset(), SCN)
        assert shifted == pytest.approx(base, rel=1e-12, abs=1e-12)


# --- engagement geometry -------------------------------------------------

def vehicle(x, y, heading):
    return VehicleState(x=x, y=y, heading=heading)


def test_astern_aligned_geometry():
    aa, ata = aa_ata(vehicle(0, 0, 0.0), vehicle(1000, 0, 0.0))
    assert aa == pytest.approx(0.0, abs=1e-12)
    assert ata == pytest.approx(0.0, abs=1e-12)


def test_head_on_geometry():
    aa, ata = aa_ata(vehicle(0, 0, 0.0), vehicle(1000, 0, math.pi))
    assert aa == pytest.approx(math.pi, abs=1e-12)
    assert ata == pytest.approx(0.0, abs=1e-12)


def test_pursued_geometry():
    aa, ata = aa_ata(vehicle(0, 0, 0.0), vehicle(-1000, 0, 0.0))
    assert aa == pytest.approx(math.pi, abs=1e-12)
    assert ata == pytest.approx(math.pi, abs=1e-12)


def test_angles_bounded_and_invariant_under_rigid_motion():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a = vehicle(*rng.uniform(-500, 500, size=2), float(rng.uniform(-math.pi, math.pi)))
        t = vehicle(*rng.uniform(600, 1500, size=2), float(rng.uniform(-math.pi, math.pi)))
        aa, ata = aa_ata(a, t)
        assert 0.0 <= aa <= math.pi and 0.0 <= ata <= math.pi
        # rotate and translate both vehicles rigidly
        phi = float(rng.uniform(-math.pi, math.pi))
        dx, dy = rng.uniform(-2000, 2000, size=2)
        c, s = math.cos(phi), math.sin(phi)

        def rigid(v):
            return vehicle(c * v.x - s * v.y + dx, s * v.x + c * v.y + dy,
                           math.remainder(v.heading + phi, math.tau))

        aa2, ata2 = aa_ata(rigid(a), rigid(t))
        assert aa2 == pytest.approx(aa, abs=1e-9)
        assert ata2 == pytest.approx(ata, abs=1e-9)


def test_coincident_positions_rejected():
    with pytest.raises(GeometryError):
        aa_ata(vehicle(5, 5, 0.0), vehicle(5, 5, 1.0))


def test_firing_branch_scores_plus_one():
    attacker = vehicle(0, 0, 0.0)
    target = vehicle(1000, 0, 0.0)  # in (r_min, r_max) = (100, 2000)
    assert dogfight_reward(attacker, target, SCN) == 1.0


def test_head_on_in_band_scores_zero():
    assert dogfight_reward(vehicle(0, 0, 0.0), vehicle(1000, 0, math.pi), SCN) == 0.0


def test_inside_r_min_scores_minus_ten_both_orderings():
    a = vehicle(0, 0, 0.0)
    b = vehicle(50, 0, 1.0)
    assert dogfight_reward(a, b, SCN) == -10.0
    assert dogfight_reward(b, a, SCN) == -10.0


def test_pursued_branch_scores_minus_one():
    attacker = vehicle(0, 0, 0.0)
    target = vehicle(-1000, 0, 0.0)  # ATA = pi > 120deg, AA = pi > 150deg
    assert dogfight_reward(attacker, target, SCN) == -1.0


def test_beyond_r_max_scores_zero():
    assert dogfight_reward(vehicle(0, 0, 0.0), vehicle(3000, 0, 0.0), SCN) == 0.0


def test_firing_branch_antisymmetry():
    # whenever A scores +1 in the band, B scores -1 (ATA_B = pi - AA_A identity)
    rng = np.random.default_rng(17)
    observed = 0
    for _ in range(3000):
        a = vehicle(*rng.uniform(0, 2000, size=2), float(rng.uniform(-math.pi, math.pi)))
        b = vehicle(*rng.uniform(0, 2000, size=2), float(rng.uniform(-math.pi, math.pi)))
        r = math.hypot(a.x - b.x, a.y - b.y)
        if not (SCN.r_min < r < SCN.r_max):
            continue
        if dogfight_reward(a, b, SCN) == 1.0:
            observed += 1
            assert dogfight_reward(b, a, SCN) == -1.0
    assert observed > 20  # the sweep must actually visit the firing branch
