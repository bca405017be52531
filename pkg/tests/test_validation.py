from dataclasses import replace

import pytest

from xyz2sim.codes import build_rotated_surface, build_xyz2, build_xzzx
from xyz2sim.pauli import PauliOperator
from xyz2sim.validation import CapabilityError, min_weight_logical, syndrome_directions, validate_code


@pytest.mark.parametrize("builder", [build_xyz2, build_xzzx, build_rotated_surface])
@pytest.mark.parametrize("d", [3, 5])
def test_valid_codes(builder, d):
    code = builder(d)
    report = validate_code(code)
    assert report.ok
    assert report.rank == code.n - 1
    assert report.anticommuting_pairs == []
    assert report.undetected_errors == []


def test_xyz2_rank():
    assert validate_code(build_xyz2(3)).rank == 17
    assert validate_code(build_xyz2(5)).rank == 49


def test_corrupted_generator_is_flagged():
    code = build_xyz2(3)
    g0 = code.generators[0]
    q = g0.support()[0]
    # flip one letter of the first plaquette: X <-> Z on qubit q
    bad = PauliOperator(code.n, g0.x_bits ^ (1 << q), g0.z_bits ^ (1 << q))
    gens = (bad,) + code.generators[1:]
    report = validate_code(replace(code, generators=gens))
    assert not report.commutation_ok
    assert report.anticommuting_pairs
    assert all(0 in pair for pair in report.anticommuting_pairs)
    assert not report.ok


def test_rank_counts_independent_generators():
    code = build_rotated_surface(3)
    # drop a boundary pair
    g = code.generator_indices("boundary_pair")[0]
    gens = code.generators[:g] + code.generators[g + 1:]
    kinds = code.kinds[:g] + code.kinds[g + 1:]
    centers = code.centers[:g] + code.centers[g + 1:]
    report = validate_code(replace(code, generators=gens, kinds=kinds, centers=centers))
    assert report.rank == 7


def test_bad_logical_is_flagged():
    code = build_xyz2(3)
    report = validate_code(replace(code, logical_x=code.generators[0]))
    assert not report.logical_ok


def test_xyz2_syndrome_directions():
    ok, dirs = syndrome_directions(build_xyz2(5))
    assert ok
    assert set(dirs) == {"X", "Y", "Z"}
    # three distinct directions, 60 degrees apart
    vecs = list(dirs.values())
    for i in range(3):
        for j in range(i + 1, 3):
            dot = vecs[i][0] * vecs[j][0] + vecs[i][1] * vecs[j][1]
            assert abs(abs(dot) - 0.5) < 1e-9


def test_summary_mentions_each_check():
    text = validate_code(build_xyz2(3)).summary()
    for word in ("commutation", "rank", "logicals", "directionality"):
        assert word in text


def test_xzzx_distances_small():
    code = build_xzzx(3)
    assert min_weight_logical(code)[0] == 3
    assert min_weight_logical(code, "Z")[0] == 3
    assert min_weight_logical(code, "Y")[0] == 9


def test_rotated_pure_y_distance():
    assert min_weight_logical(build_rotated_surface(3), "Y")[0] == 9


def test_search_cap():
    with pytest.raises(CapabilityError):
        min_weight_logical(build_xyz2(7))
