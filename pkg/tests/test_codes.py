import pytest

from xyz2sim.codes import (
    _DOUBLING,
    _double_op,
    ParameterError,
    build_rotated_surface,
    build_xyz2,
    build_xzzx,
    code_from_text,
    code_to_text,
    double_qubits,
    hadamard_transform,
    in_stabilizer_group,
    relabel_letters,
    same_stabilizer_group,
)
from xyz2sim.pauli import PauliOperator, commutes, gf2_rank


def _letters(op):
    return "".join(op.letter(q) for q in op.support())


class TestXYZ2:
    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_counts(self, d):
        code = build_xyz2(d)
        assert code.n == 2 * d * d
        assert len(code.generator_indices("plaquette")) == (d - 1) ** 2
        assert len(code.generator_indices("link")) == d * d
        assert len(code.generator_indices("half_plaquette")) == 2 * d - 2
        assert code.num_generators == 2 * d * d - 1

    @pytest.mark.parametrize("d", [1, 2, 4, 0, -3])
    def test_bad_distance(self, d):
        with pytest.raises(ParameterError):
            build_xyz2(d)

    def test_plaquette_letters(self):
        code = build_xyz2(5)
        for g in code.generator_indices("plaquette"):
            assert sorted(_letters(code.generators[g])) == sorted("XXYYZZ")
        for g in code.generator_indices("link"):
            assert _letters(code.generators[g]) == "XX"
        for g in code.generator_indices("half_plaquette"):
            assert sorted(_letters(code.generators[g])) == sorted("XYZ")

    def test_logicals(self):
        code = build_xyz2(3)
        assert set(_letters(code.logical_x)) == {"X"} and code.logical_x.weight == 3
        assert set(_letters(code.logical_z)) == {"Y", "Z"} and code.logical_z.weight == 6
        assert not commutes(code.logical_x, code.logical_z)

    def test_coordinates(self):
        code = build_xyz2(3)
        assert len(code.qubit_coords) == code.n
        assert len(set(code.qubit_coords)) == code.n
        # the two qubits of each link are stacked vertically
        for q in range(0, code.n, 2):
            (x0, y0), (x1, y1) = code.qubit_coords[q], code.qubit_coords[q + 1]
            assert x0 == x1 and y1 - y0 == pytest.approx(1.0)
        assert len(code.centers) == code.num_generators


class TestSquareCodes:
    def test_rotated_counts(self):
        code = build_rotated_surface(3)
        assert code.n == 9 and code.num_generators == 8
        assert gf2_rank(code.check_matrix()) == 8

    def test_xzzx_counts(self):
        code = build_xzzx(5)
        assert code.n == 25 and code.num_generators == 24

    def test_xzzx_plaquettes_uniform(self):
        code = build_xzzx(5)
        for g in code.generator_indices("square_plaquette"):
            assert sorted(_letters(code.generators[g])) == sorted("XZZX")

    def test_xzzx_logicals_pure(self):
        code = build_xzzx(3)
        assert set(_letters(code.logical_x)) == {"X"}
        assert set(_letters(code.logical_z)) == {"Z"}


class TestHadamard:
    def test_empty_subset_is_identity(self):
        code = build_rotated_surface(3)
        assert hadamard_transform(code, []) == code

    def test_involution(self):
        code = build_rotated_surface(5)
        sub = [0, 3, 7, 11]
        assert hadamard_transform(hadamard_transform(code, sub), sub) == code

    def test_checkerboard_gives_xzzx(self):
        d = 3
        code = build_rotated_surface(d)
        even = [i * d + j for i in range(d) for j in range(d) if (i + j) % 2 == 0]
        out = hadamard_transform(code, even)
        for g in out.generator_indices("square_plaquette"):
            op = out.generators[g]
            # letters read around the cell: the two corners on one diagonal are X
            assert sorted(_letters(op)) == sorted("XZZX")
        assert same_stabilizer_group(out, build_xzzx(d))


class TestRelabel:
    def test_xy_swap(self):
        code = build_xzzx(3)
        yz = relabel_letters(code, "XY", family="yzzy")
        assert yz.family == "yzzy"
        for g in yz.generator_indices("square_plaquette"):
            assert sorted(_letters(yz.generators[g])) == sorted("YZZY")

    def test_relabel_involution(self):
        code = build_xyz2(3)
        for pair in ("XY", "YZ", "XZ"):
            assert relabel_letters(relabel_letters(code, pair), pair) == code

    def test_unknown_pair(self):
        with pytest.raises(ParameterError):
            relabel_letters(build_xzzx(3), "XQ")


class TestDoubling:
    def _yzzy(self, d):
        return relabel_letters(build_xzzx(d), "XY", family="yzzy")

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_same_group_as_xyz2(self, d):
        out = double_qubits(self._yzzy(d))
        assert out.family == "xyz2" and out.n == 2 * d * d
        assert same_stabilizer_group(out, build_xyz2(d))

    def test_zlink_variant(self):
        out = double_qubits(self._yzzy(3), link_basis="Z")
        assert out.family == "xyz2_zlink"
        for g in out.generator_indices("link"):
            assert _letters(out.generators[g]) == "ZZ"
        for a in out.generators:
            for b in out.generators:
                assert commutes(a, b)

    def test_single_plaquette_becomes_hexagon(self):
        # Y -> YZ and Z -> XI per pair, so YZZY lands on six qubits directly
        mapped = _double_op(PauliOperator.from_string("YZZY"), _DOUBLING["X"])
        assert str(mapped) == "YZXIXIYZ"
        assert mapped.weight == 6
        assert sorted(_letters(mapped)) == sorted("XXYYZZ")
        # it commutes with the XX link of every pair
        for q in range(4):
            assert commutes(mapped, PauliOperator.from_letters(8, {2 * q: "X", 2 * q + 1: "X"}))

    def test_pure_x_logical_maps_to_pure_z(self):
        d = 3
        yzzy = self._yzzy(d)
        all_x = PauliOperator.from_letters(yzzy.n, {q: "X" for q in range(yzzy.n)})
        for g in yzzy.generators:
            assert commutes(all_x, g)
        image = _double_op(all_x, _DOUBLING["X"])
        assert image == PauliOperator.from_letters(2 * d * d, {q: "Z" for q in range(2 * d * d)})
        xyz2 = build_xyz2(d)
        assert all(commutes(image, g) for g in xyz2.generators)
        assert not in_stabilizer_group(xyz2, image)

    def test_rejects_wrong_family(self):
        with pytest.raises(ParameterError):
            double_qubits(build_xzzx(3))


class TestGroupMembership:
    def test_generator_products_are_members(self):
        code = build_xyz2(3)
        op = code.generators[0] * code.generators[5] * code.generators[16]
        assert in_stabilizer_group(code, op)

    def test_logicals_are_not_members(self):
        code = build_xyz2(3)
        assert not in_stabilizer_group(code, code.logical_x)
        assert not in_stabilizer_group(code, code.logical_z)

    def test_different_codes_differ(self):
        assert not same_stabilizer_group(build_xzzx(3), build_rotated_surface(3))


class TestTextFormat:
    @pytest.mark.parametrize("builder", [build_xyz2, build_xzzx, build_rotated_surface])
    def test_roundtrip(self, builder):
        code = builder(3)
        assert code_from_text(code_to_text(code)) == code

    def test_generator_lines(self):
        text = code_to_text(build_xyz2(3))
        kinds = {"plaquette", "link", "half_plaquette"}
        assert sum(line.split()[0] in kinds for line in text.splitlines()) == 17

    def test_malformed(self):
        with pytest.raises(ValueError):
            code_from_text("xyz2 3 18\nplaquette 0 XYZ\n")
