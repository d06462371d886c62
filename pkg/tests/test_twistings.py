import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistkit.diagrams import PartialMap, Partition, multiply_floats
from twistkit.twistings import (canonical_twisting, diagram_base, eq_base, parse_base,
                                parse_twisting, phi_chain, rank_twisting, rigid_twisting,
                                shifted_twisting, table_twisting, tight_alternatives, tight_failures,
                                trivial_twisting, verify_cocycle, verify_consequences, verify_star_symmetry,
                                verify_tight, TwistingError, sylvester_witness)


def e_f_tl(n):
    """Two Temperley-Lieb projections: cups on {1,2} resp. {2,3}, straight lines elsewhere."""
    e = Partition(n, [[1, 2], [-1, -2]] + [[k, -k] for k in range(3, n + 1)])
    f = Partition(n, [[2, 3], [-2, -3], [1, -1]] + [[k, -k] for k in range(4, n + 1)])
    return e, f


def test_canonical_examples():
    tw = canonical_twisting("P:2")
    one = tw.S.identity
    assert (tw.phi[one] == 0).all() and (tw.phi[:, one] == 0).all()
    a = Partition(6, [[1, 4], [2, 3, -4, -5], [5, 6], [-1, -2, -6], [-3]])
    b = Partition(6, [[1, 2], [3, 4, -1], [5, -4, -5, -6], [6], [-2, -3]])
    assert multiply_floats(a, b)[1] == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_canonical_not_rigid_on_tl(n):
    tw = canonical_twisting(f"TL:{n}")
    e, f = e_f_tl(n)
    ef = e * f
    assert (tw.value(e, e), tw.value(f, f), tw.value(ef, ef), tw.value(e, f)) == (1, 1, 0, 0)
    # a rigid twisting would force 2 r(e) = m - 1 = 2 r(ef) while r(e) + r(f) = m + r(ef)


def test_rigid_examples():
    assert verify_cocycle(rank_twisting("P:3")).passed
    ra, rb = verify_tight(rank_twisting("Mat:2:2"))
    assert ra.passed and rb.passed
    base = diagram_base("P", 2)
    with pytest.raises(TwistingError, match="not a twisting"):
        rigid_twisting(base, base.rank, 0)


def test_rigid_rejection_witness_is_identity_pair():
    base = diagram_base("P", 2)
    one = base.S.identity
    with pytest.raises(TwistingError, match=rf"value -2 .*\(indices {one}, {one}\)"):
        rigid_twisting(base, base.rank, 0)


def test_trivial_and_shift():
    base = diagram_base("P", 2)
    ra, rb = verify_tight(trivial_twisting(base))
    assert ra.passed and rb.passed and verify_cocycle(trivial_twisting(base)).passed
    sh = shifted_twisting(canonical_twisting(base), 1)
    assert verify_cocycle(sh).passed
    ra, rb = verify_tight(sh)
    assert not ra.passed and not rb.passed
    assert np.array_equal(shifted_twisting(canonical_twisting(base), 0).phi, canonical_twisting(base).phi)
    with pytest.raises(TwistingError):
        shifted_twisting(sh, -1)


def test_parse_twisting():
    base = diagram_base("P", 2)
    assert parse_twisting("shift:2:canonical", base).phi.min() == 2
    assert parse_twisting("trivial", base).phi.max() == 0
    with pytest.raises(TwistingError):
        parse_twisting("wobbly", base)
    with pytest.raises(TwistingError):
        canonical_twisting("Mat:2:2")


def test_corrupted_cocycle_has_witness():
    tw = canonical_twisting("P:2")
    phi = tw.phi.copy()
    phi[3, 4] += 1
    bad = table_twisting(tw.base, phi)
    rep = verify_cocycle(bad)
    assert not rep.passed and rep.witness["lhs"] != rep.witness["rhs"]


def test_sampled_cocycle_is_labelled():
    rep = verify_cocycle(canonical_twisting("P:2"), budget=100)
    assert rep.sampled and rep.status == "SAMPLED-PASS"


def test_asymmetric_table_fails_star():
    base = diagram_base("P", 2)
    phi = np.zeros((15, 15), dtype=np.int64)
    phi[1, 2] = 1
    rep = verify_star_symmetry(table_twisting(base, phi))
    assert not rep.passed and rep.witness is not None


@pytest.mark.parametrize("label,kind", [("P:3", "canonical"), ("B:4", "rank"), ("I:4", "rank"),
                                        ("Mat:2:3", "rank"), ("Eq:4", "rank")])
def test_star_symmetric(label, kind):
    assert verify_star_symmetry(parse_twisting(kind, parse_base(label))).passed


@pytest.mark.parametrize("label", ["P:3", "PB:3", "B:4", "TL:5", "PP:3", "Mz:3", "B:5"])
def test_cocycle_canonical(label):
    assert verify_cocycle(canonical_twisting(label)).passed


@pytest.mark.parametrize("label", ["P:3", "PB:3", "B:4", "TL:4", "PT:3", "T:3", "I:4", "Mat:3:2", "Eq:5"])
def test_cocycle_rigid(label):
    base = parse_base(label)
    assert sylvester_witness(base) is None
    assert verify_cocycle(rank_twisting(base)).passed


@pytest.mark.parametrize("label,kind", [("P:2", "canonical"), ("PB:2", "canonical"), ("PB:3", "canonical"),
                                        ("P:2", "rank"), ("TL:3", "rank"), ("B:4", "rank"), ("Mz:3", "canonical"),
                                        ("Mat:2:2", "rank"), ("Eq:3", "rank")])
def test_star_symmetric_tight_sides_agree(label, kind):
    tw = parse_twisting(kind, parse_base(label))
    ra, rb = verify_tight(tw)
    assert ra.passed == rb.passed


def test_consequences_canonical_b3_p2():
    for label in ("B:3", "P:2"):
        reps = verify_consequences(canonical_twisting(label))
        assert [r.check for r in reps] == ["T3", "T4", "T5", "T6", "idempotent-lemma"]
        assert all(r.passed for r in reps)


def test_consequences_loose_skips():
    reps = {r.check: r for r in verify_consequences(canonical_twisting("PB:2"))}
    assert reps["T3"].status == reps["T4"].status == reps["T6"].status == "SKIPPED"
    assert reps["T5"].passed and reps["idempotent-lemma"].passed


def test_phi_chain():
    tw = canonical_twisting("TL:3")
    e, f = e_f_tl(3)
    ie, jf = tw.base.index(e), tw.base.index(f)
    assert phi_chain(tw, []) == 0 and phi_chain(tw, [ie]) == 0
    assert phi_chain(tw, [ie, jf]) == tw(ie, jf)
    assert phi_chain(tw, [ie, ie, jf]) == 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 202), min_size=3, max_size=3))
def test_chain_matches_triple(seq):
    tw = canonical_twisting("P:3")
    a, b, c = seq
    ab = tw.S.table[a, b]
    assert phi_chain(tw, seq) == tw(a, b) + tw(ab, c) == tw(a, tw.S.table[b, c]) + tw(b, c)


def test_rank_equals_canonical_on_in():
    for n in (2, 3, 4):
        base = diagram_base("I", n)
        assert np.array_equal(rank_twisting(base).phi, canonical_twisting(base).phi)


def test_set_instance_one_sided():
    for label in ("PT:3", "T:3"):
        ra, rb = verify_tight(rank_twisting(label))
        assert not ra.passed and rb.passed
    ra, rb = verify_tight(rank_twisting("I:3"))
    assert ra.passed and rb.passed


def test_pt3_one_sided_witness():
    tw = rank_twisting("PT:3")
    a, b = PartialMap([1, 1, 3]), PartialMap([1, 2, 2])
    ia, ib = tw.base.index(a), tw.base.index(b)
    assert a * b == PartialMap([1, 1, 2])
    alts = tight_alternatives(tw, ia, ib, "a")
    named = {tw.S.elements[k]: v for k, v in alts.items()}
    assert named == {a: 1, PartialMap([1, 1, 2]): 1}
    assert tight_failures(tw, "a")[ia, ib]


def test_eq_twisting_tight():
    ra, rb = verify_tight(rank_twisting(eq_base(4)))
    assert ra.passed and rb.passed
