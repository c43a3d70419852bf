import itertools

import pytest

from ree_unital.design_core import validate_configuration, verify_2design, DegreePattern
from ree_unital.finite_fields import F8Elt
from ree_unital.matrix_group import D, IDENTITY, S, T, Mat2, delta_conjugate, involutions, normalizes, point_of
from ree_unital.unital_s import (
    MEET_TRACES,
    build_unital_s,
    join_points,
    join_points_scan,
    meet_blocks,
    named_catalog,
    onan_and_super_onan,
    sl28_automorphism_generators,
    verify_explicit_catalog,
)


@pytest.fixture(scope="module")
def u():
    return build_unital_s()


@pytest.fixture(scope="module")
def cat():
    return named_catalog()


def test_counts_and_design(u):
    assert len(u.points) == 28 and len(u.blocks) == 63
    assert all(len(r) == 4 for r in u.block_points)
    assert all(len(c) == 9 for c in u.point_blocks)
    assert sum(len(r) for r in u.block_points) == 252
    assert verify_2design(u.structure).as_tuple() == (28, 63, 9, 4, 1)


def test_blocks_through_pd(u, cat):
    names = ["S", "T", "T^S", "Y", "Y^d", "Y^dd", "Y^S", "Y^Sd", "Y^Sdd"]
    assert u.blocks_through(D) == {cat[n] for n in names}


def test_join_examples(cat):
    assert join_points(cat["E"], cat["E^S"]) == cat["M"] == Mat2.from_powers(3, 1, 1, 3)
    assert join_points(cat["E"], cat["E^Sd"]) == cat["I"] == Mat2.from_powers(5, 0, 1, 5)
    assert join_points(D, cat["F"]) == Mat2.from_powers(2, 1, 4, 2)
    with pytest.raises(ValueError):
        join_points(D, D)


def test_join_matches_scan_on_all_pairs(u):
    for p, q in itertools.combinations(u.points, 2):
        blk = join_points(p, q)
        assert blk == join_points_scan(p, q)
        j = u.block_id(blk)
        assert {p.id, q.id} <= set(u.block_points[j])
        # and it is the only block through both
        assert len(set(u.point_blocks[p.id]) & set(u.point_blocks[q.id])) == 1


def test_meet_matches_row_intersection(u):
    for (i, bi), (l, bl) in itertools.combinations(enumerate(u.blocks), 2):
        common = set(u.block_points[i]) & set(u.block_points[l])
        got = meet_blocks(bi, bl)
        assert len(common) <= 1
        assert (got.id if got else None) == (common.pop() if common else None)
        assert ((bi * bl).trace() in MEET_TRACES) == (got is not None)


def test_meet_examples(cat):
    f = (cat["I^d"] * cat["I"]) ** 3
    assert f == Mat2.from_powers(6, 6, 4, 2) == cat["F"]
    assert meet_blocks(cat["I^d"], cat["I"]) == point_of(f)
    assert meet_blocks(cat["I^S"], cat["I"]) is None
    assert (cat["I^S"] * cat["I"]).trace() == F8Elt.from_power(6)
    for x, y in itertools.combinations(["M", "M^d", "M^dd"], 2):
        assert meet_blocks(cat[x], cat[y]) is None
    with pytest.raises(ValueError):
        meet_blocks(D, S)


def test_points_on_t(u, cat):
    assert u.points_on(T) == {u.point_id(cat[n]) for n in ("D", "E", "E^d", "E^dd")}


def test_points_on_i_follow_delta_symmetry(u, cat):
    # The block I contains p_F and p_F^dd (not p_F^d): I^d meets I in p_F,
    # so applying delta twice, I meets I^dd in p_F^dd.
    on_i = u.points_on(cat["I"])
    assert on_i == {u.point_id(cat[n]) for n in ("E", "E^Sd", "F", "F^dd")}
    assert u.point_id(cat["F^d"]) not in on_i
    assert meet_blocks(cat["I^dd"], cat["I"]) == point_of(cat["F^dd"])
    # direct conjugation check, independent of the incidence tables
    i = cat["I"]
    assert i * cat["F"] * i == cat["F"].inverse()
    assert i * cat["F^dd"] * i == cat["F^dd"].inverse()
    assert i * cat["F^d"] * i not in point_of(cat["F^d"])


def test_catalog_report_rows(cat):
    rep = verify_explicit_catalog()
    failing = {it.name for it in rep.items if not it.ok}
    # only the two rows repeating the F^d misprint fail; their corrected rows pass
    assert failing == {
        "points on I, as printed: E, E^Sd, F, F^d",
        "blocks joining p_D to the points of I, as printed: T, T^S, DvF, DvF^d",
    }
    assert all(it.ok for it in rep.items if it.kind == "corrected")


def test_printed_matrices_match_derivations(cat):
    assert cat["E"] == Mat2.from_powers(0, 1, 0, 3) ** 3
    assert cat["T^S"] == T.conj(S)
    for name in ("Y^S", "G^d", "E^Sdd", "I^Sd", "F^Sdd"):
        base, _, word = name.partition("^")
        m = cat[base]
        for ch in word:
            m = m.conj(S) if ch == "S" else delta_conjugate(m)
        assert cat[name] == m


def test_six_s_fixed_blocks_partition(u):
    on_s = set(u.points_on(S))
    off = [p.id for p in u.points if p.id not in on_s]
    assert len(off) == 24
    # block joining X and X^S, for X off S
    blocks = {join_points(u.points[x].generator, u.points[x].generator.conj(S)) for x in off}
    assert len(blocks) == 6
    covered = sorted(p for b in blocks for p in u.points_on(b))
    assert covered == sorted(off)
    for b in blocks:
        assert b.conj(S) == b


def test_configurations(u):
    onan, sup, k = onan_and_super_onan()
    assert len(onan.points) == 6 and len(onan.blocks) == 4
    assert validate_configuration(u.structure, onan, DegreePattern.dual_kn(4))
    assert len(sup.points) == 10 and len(sup.blocks) == 5
    assert len(k.points) == 13 and len(k.blocks) == 8
    pd = k.point_degrees()
    assert sorted(pd.values()).count(3) == 6


def test_automorphism_generators_preserve_incidence(u):
    blocks = set(map(frozenset, u.block_points))
    for name, perm in sl28_automorphism_generators().items():
        assert sorted(perm) == list(range(28)), name
        assert {frozenset(perm[p] for p in b) for b in blocks} == blocks, name


def test_block_map_agrees_with_point_map(u):
    for g in (S, T, Mat2.from_powers(2, 1, 1, 4)):
        pm, bm = u.point_map(g), u.block_map(g)
        for j, row in enumerate(u.block_points):
            assert {pm[p] for p in row} == set(u.block_points[bm[j]])


def test_involution_lookup_errors(u):
    with pytest.raises(ValueError):
        u.block_id(IDENTITY)
