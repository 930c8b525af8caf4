import random

import pytest

from cofinitary.evaluation import (
    Assignment,
    EMPTY_GROUND,
    GroundRep,
    PartialMap,
    eval_domain,
    eval_range,
    identity_perm,
    zshift,
)
from cofinitary.extension import (
    CertificateError,
    NOT_FOUND,
    Rejected,
    canonical_extension,
    cover_extend,
    domain_extend,
    hit_extend,
    hit_search,
    hit_threshold,
    mad_set_point,
    range_extend,
    strong_reduction,
)
from cofinitary.poset import Condition, PosetMode, leq, strong_restrict, validate
from cofinitary.sampling import sample_condition, sample_extension
from cofinitary.words import parse_word, single


def pmap(*pairs):
    return PartialMap(frozenset(pairs))


def cond(pairs_by_gen, words, mode=PosetMode.COFINITARY):
    return Condition(
        Assignment({g: pmap(*ps) for g, ps in pairs_by_gen.items()}),
        frozenset(parse_word(t) for t in words),
        mode,
    )


def scan_soundness(p, gen, n, limit, ground=EMPTY_GROUND):
    """Every admitted m below the limit must yield a valid extension."""
    ext = domain_extend(p, gen, n, ground)
    admitted = failing = 0
    for m in range(limit):
        candidate = Condition(p.s.with_pair(gen, n, m), p.words, p.mode)
        good = not validate(candidate, ground) and leq(candidate, p, ground)
        if ext.certificate.admits(m):
            admitted += 1
            assert good, f"admitted m={m} fails"
        elif good:
            failing += 0  # over-approximation is allowed
    assert admitted > 0
    return ext


class TestDomainExtend:
    def test_forbidden_superset_example(self):
        p = cond({0: [(5, 7)]}, ["g0"])
        ext = scan_soundness(p, 0, 0, 20)
        assert {0, 7} <= ext.certificate.forbidden

    def test_empty_condition_nothing_forbidden(self):
        ext = domain_extend(cond({}, []), 0, 0)
        assert ext.certificate.forbidden == frozenset()
        assert ext.choose() == 0

    def test_mixed_word_cofinite_scan(self):
        ground = GroundRep({7: zshift()})
        p = cond({0: [(2, 9)]}, ["g0 g7"])
        ext = domain_extend(p, 0, 0, ground)
        assert len(ext.certificate.forbidden) < 50
        for m in range(100):
            if ext.certificate.admits(m):
                c = Condition(p.s.with_pair(0, 0, m), p.words, p.mode)
                assert leq(c, p, ground), m

    def test_already_defined_rejected(self):
        p = cond({0: [(5, 7)]}, [])
        with pytest.raises(ValueError):
            domain_extend(p, 0, 5)

    def test_sampled_certificate_soundness(self):
        rng = random.Random(41)
        for _ in range(60):
            p = sample_condition(rng, PosetMode.COFINITARY, [0, 1, 2],
                                 max_pairs=3, max_words=3, value_range=12)
            gen = rng.choice([0, 1, 2])
            n = rng.randrange(30)
            if n in p.s.get(gen).domain():
                continue
            scan_soundness(p, gen, n, 60)

    def test_sampled_soundness_with_ambient_shift(self):
        ground = GroundRep({7: zshift()})
        rng = random.Random(59)
        for _ in range(40):
            p = sample_condition(rng, PosetMode.COFINITARY, [0, 1],
                                 max_pairs=3, max_words=3, value_range=12,
                                 word_len=3, ground=ground)
            gen = rng.choice([0, 1])
            n = rng.randrange(30)
            if n in p.s.get(gen).domain():
                continue
            ext = domain_extend(p, gen, n, ground)
            for m in range(200):
                if ext.certificate.admits(m):
                    c = Condition(p.s.with_pair(gen, n, m), p.words, p.mode)
                    assert not validate(c, ground) and leq(c, p, ground), m

    def test_chooser_floor(self):
        p = cond({0: [(5, 7)]}, ["g0"])
        ext = domain_extend(p, 0, 0)
        m = ext.choose(floor=10)
        assert m >= 10

    def test_chooser_ceiling(self):
        p = cond({}, ["g0"])
        ext = domain_extend(p, 0, 0)
        with pytest.raises(CertificateError):
            # everything below the ceiling is forbidden only if ceiling < least
            ext.choose(floor=5, ceiling=3)


class TestRangeExtend:
    def test_mirror_of_domain(self):
        p = cond({0: [(5, 7)]}, ["g0"])
        ext = range_extend(p, 0, 0)
        for n in range(40):
            if ext.certificate.admits(n):
                c = Condition(p.s.with_pair(0, n, 0), p.words, p.mode)
                assert not validate(c) and leq(c, p), n

    def test_empty_condition(self):
        ext = range_extend(cond({}, []), 0, 3)
        assert ext.certificate.forbidden == frozenset()

    def test_duality_with_inverted_condition(self):
        # range certificate for p equals the domain certificate of the mirror
        p = cond({0: [(5, 7), (1, 2)]}, ["g0^2"])
        mirror = cond({0: [(7, 5), (2, 1)]}, ["g0^-2"])
        a = range_extend(p, 0, 0).certificate
        b = domain_extend(mirror, 0, 0).certificate
        assert a.forbidden == b.forbidden

    def test_functional_modes_rejected(self):
        with pytest.raises(ValueError):
            range_extend(cond({}, [], PosetMode.EDF), 0, 0)
        with pytest.raises(ValueError):
            range_extend(cond({}, [], PosetMode.MAD), 0, 0)


class TestCoverExtend:
    def test_domain_cover(self):
        p = cond({}, [])
        t = cover_extend(p, single(0), {0, 1, 2}, set())
        assert t.get(0).domain() >= {0, 1, 2}
        values = [t.get(0).fwd[i] for i in (0, 1, 2)]
        assert len(set(values)) == 3

    def test_empty_targets(self):
        p = cond({0: [(0, 1)]}, ["g0"])
        assert cover_extend(p, single(0), set(), set()).triples() == frozenset()

    def test_mixed_word_cover(self):
        ground = GroundRep({7: zshift()})
        p = cond({}, [])
        w = parse_word("g0 g7")
        t = cover_extend(p, w, {0, 1, 2}, {4, 5}, ground)
        s2 = p.s.union(t)
        assert eval_domain(w, s2, ground, range(10)) >= {0, 1, 2}
        assert eval_range(w, s2, ground, range(10)) >= {4, 5}
        assert set(t.generators()) <= {0}

    def test_cover_keeps_order(self):
        p = cond({0: [(0, 9)]}, ["g0^2 g1"])
        t = cover_extend(p, parse_word("g0 g1"), {3, 4}, {6}, EMPTY_GROUND)
        merged = Condition(p.s.union(t), p.words, p.mode)
        assert leq(merged, p)


class TestStrongReduction:
    def test_pure_inside_is_fixed_point(self):
        p = cond({0: [(0, 1)]}, ["g0"])
        red = strong_reduction(p, {0})
        assert red == p

    def test_absorbs_outside_range(self):
        p = cond({0: [(0, 1)], 2: [(1, 2)]}, ["g0 g2"])
        red = strong_reduction(p, {0})
        assert red.s.get(0).domain() >= {2}  # range of the dropped part
        assert red.words == frozenset()
        assert leq(red, strong_restrict(p, {0}))

    def test_sampled_contract(self):
        rng = random.Random(43)
        for _ in range(60):
            p = sample_condition(rng, PosetMode.COFINITARY, [0, 1, 2],
                                 max_pairs=3, max_words=2, value_range=10,
                                 word_len=3)
            keep = frozenset(rng.sample([0, 1, 2], rng.randrange(4)))
            red = strong_reduction(p, keep)
            assert leq(red, strong_restrict(p, keep))
            t = sample_extension(rng, red, avoid=p.occurring() - keep)
            both = canonical_extension(p, t, keep)
            assert leq(both, p) and leq(both, t)

    def test_contract_with_ambient_shift(self):
        ground = GroundRep({7: zshift()})
        rng = random.Random(61)
        for _ in range(30):
            p = sample_condition(rng, PosetMode.COFINITARY, [0, 1, 2],
                                 max_pairs=3, max_words=2, value_range=10,
                                 word_len=3, ground=ground)
            keep = frozenset(rng.sample([0, 1, 2], rng.randrange(4)))
            red = strong_reduction(p, keep, ground)
            assert leq(red, strong_restrict(p, keep, ground), ground)
            t = sample_extension(rng, red, ground, avoid=p.occurring(ground) - keep)
            both = canonical_extension(p, t, keep, ground)
            assert leq(both, p, ground) and leq(both, t, ground)

    @pytest.mark.parametrize("mode", [PosetMode.ADP, PosetMode.EDF, PosetMode.MAD])
    def test_variant_contract(self, mode):
        rng = random.Random(47)
        for _ in range(40):
            p = sample_condition(rng, mode, [0, 1, 2], max_pairs=3, max_words=2)
            keep = frozenset(rng.sample([0, 1, 2], rng.randrange(4)))
            red = strong_reduction(p, keep)
            assert leq(red, strong_restrict(p, keep))
            t = sample_extension(rng, red, avoid=p.occurring() - keep)
            both = canonical_extension(p, t, keep)
            assert leq(both, p) and leq(both, t)


class TestCanonicalExtension:
    def test_reduction_itself(self):
        p = cond({0: [(0, 1)], 2: [(1, 2)]}, ["g0 g2"])
        red = strong_reduction(p, {0})
        both = canonical_extension(p, red, {0})
        assert leq(both, p) and leq(both, red)

    def test_occurrence_clash_rejected(self):
        p = cond({0: [(0, 1)], 2: [(1, 2)]}, ["g0 g2"])
        red = strong_reduction(p, {0})
        clashing = Condition(red.s.with_pair(2, 30, 31), red.words, red.mode)
        with pytest.raises(ValueError):
            canonical_extension(p, clashing, {0})

    def test_non_extension_rejected(self):
        p = cond({0: [(0, 1), (2, 3)]}, ["g0"])
        stranger = cond({0: [(9, 9)]}, ["g0"])
        with pytest.raises(ValueError):
            canonical_extension(p, stranger, {0})


class TestHit:
    def test_single_letter_every_point(self):
        sigma = zshift()
        p = cond({}, ["g0"])
        for n in range(50):
            assert isinstance(hit_extend(p, 0, sigma, n), Condition)
        assert hit_threshold(p, 0, sigma) == 0

    def test_square_every_point(self):
        sigma = zshift()
        p = cond({}, ["g0^2"])
        for n in range(50):
            assert isinstance(hit_extend(p, 0, sigma, n), Condition)

    def test_preconditions(self):
        sigma = zshift()
        p = cond({0: [(1, 5)]}, ["g0"])
        with pytest.raises(ValueError):
            hit_extend(p, 0, sigma, 1)  # already in the domain
        with pytest.raises(ValueError):
            hit_extend(p, 0, sigma, sigma.unapply(5))  # image already taken

    def test_forbidden_generator_in_side_words(self):
        sigma = zshift()
        p = cond({}, ["g0 g7"])
        with pytest.raises(ValueError):
            hit_extend(p, 0, sigma, 0, GroundRep({7: sigma}), sigma_gen=7)

    def test_search_within_window(self):
        rng = random.Random(53)
        sigma = zshift()
        for _ in range(60):
            p = sample_condition(rng, PosetMode.COFINITARY, [0, 1, 2],
                                 max_pairs=4, max_words=4, value_range=24,
                                 word_len=3)
            gen = rng.choice([0, 1, 2])
            for start in (0, 13, 50):
                n = hit_search(p, gen, sigma, start, 64)
                assert isinstance(n, int), (p.to_json(), gen, start)
                assert n >= start

    def test_threshold_accepts_everything_beyond(self):
        sigma = zshift()
        p = cond({0: [(3, 5), (8, 2)]}, ["g0^2", "g0^-3"])
        bound = hit_threshold(p, 0, sigma)
        assert bound is not None
        for n in range(bound, bound + 40):
            assert isinstance(hit_extend(p, 0, sigma, n), Condition), n

    def test_threshold_none_for_mixed_words(self):
        sigma = zshift()
        p = cond({}, ["g0 g1"])
        assert hit_threshold(p, 0, sigma) is None

    def test_rejection_reported(self):
        # identity target: hitting g0 at n gives the pair (n, n), a fixed point
        e = identity_perm()
        p = cond({}, ["g0"])
        r = hit_extend(p, 0, e, 4)
        assert isinstance(r, Rejected)
        assert hit_search(p, 0, e, 0, 16) is NOT_FOUND


class TestMadSetPoint:
    def test_prefers_one(self):
        p = cond({}, ["g0", "g1"], PosetMode.MAD)
        p = mad_set_point(p, 0, 3)
        assert p.s.get(0).fwd[3] == 1

    def test_avoids_frozen_intersection(self):
        p = cond({1: [(3, 1)]}, ["g0", "g1"], PosetMode.MAD)
        p = mad_set_point(p, 0, 3)
        assert p.s.get(0).fwd[3] == 0

    def test_unfrozen_letter_free(self):
        p = cond({1: [(3, 1)]}, ["g1"], PosetMode.MAD)
        p = mad_set_point(p, 0, 3)
        assert p.s.get(0).fwd[3] == 1


class TestDegenerateAmbient:
    def test_near_identity_run_cannot_be_certified(self):
        ground = GroundRep({7: identity_perm()})
        p = cond({}, ["g0^-1 g7 g0 g7"])  # hat word with an inverse step after a run
        with pytest.raises(CertificateError):
            ext = domain_extend(p, 0, 0, ground)
            ext.choose()
