import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenqtl.genetics import (
    ADDITIVE, DOMINANT, PLEIOTROPIC_ROWS, DiploidGenome, ExpressionRules, GeneEffectMap, GeneticMap,
    apply_noise, cross, crossover_count, express, pleiotropic_matrix, founders, gamete, gamete_parts,
    genotype_to_traits, genotype_to_values, make_ril, marker_codes, round_half_away,
)
from greenqtl.growth import TRAIT_NAMES, GeneticTraits

GMAP = GeneticMap.regular()


def test_regular_map_geometry():
    assert GMAP.n_markers == 57 and GMAP.n_loci == 15
    assert GMAP.length == 560.0
    assert list(GMAP.locus_positions[:3]) == [0.0, 40.0, 80.0]
    lines = GMAP.to_csv().splitlines()
    assert lines[0] == "marker,position_cM" and lines[1] == "M1,0.0" and len(lines) == 58


@pytest.mark.parametrize("positions,loci", [([0, 10, 10], [0]), ([0, 10], [0, 0]), ([0, 10], [5])])
def test_map_validation(positions, loci):
    with pytest.raises(ValueError):
        GeneticMap(positions, loci)


def test_genome_length_mismatch():
    with pytest.raises(ValueError):
        DiploidGenome([1.0, 1.0], [1.0])


# expression

def test_additive_expression_is_mean():
    g = DiploidGenome([0.9, 1.0], [1.1, 1.0])
    assert np.allclose(express(g, ExpressionRules.additive(2)), [1.0, 1.0])


def test_dominant_first_listed_allele_wins():
    g = DiploidGenome([0.9], [1.1])
    assert express(g, ExpressionRules([DOMINANT]))[0] == 0.9
    assert express(g, ExpressionRules([DOMINANT], {0: (1.1, 0.9)}))[0] == 1.1
    assert express(DiploidGenome([1.1], [1.1]), ExpressionRules([DOMINANT]))[0] == 1.1


def test_expression_rule_validation():
    with pytest.raises(ValueError):
        ExpressionRules(["codominant"])
    with pytest.raises(ValueError):
        express(DiploidGenome([1.0], [1.0]), ExpressionRules.additive(2))


# genotype to parameters

def test_reference_alleles_give_reference_traits():
    for eff in (GeneEffectMap.diagonal(), GeneEffectMap.from_matrix(pleiotropic_matrix())):
        assert genotype_to_traits(np.ones(15), eff) == GeneticTraits()


def test_scaling_factors_follow_row_sums():
    eff = GeneEffectMap.from_matrix(pleiotropic_matrix())
    assert np.allclose(eff.D * eff.A.sum(axis=1), eff.Yr)
    eff.A[1, 2] = 6.0  # scaling is derived, never stale
    assert np.allclose(eff.D * eff.A.sum(axis=1), eff.Yr)


def test_pleiotropic_rows_one_and_two():
    A = pleiotropic_matrix()
    assert np.flatnonzero(A[0]).tolist() == [2, 7]
    assert A[1, [2, 7, 13]].tolist() == [3.0, 2.0, 1.0]
    assert len(PLEIOTROPIC_ROWS) == len(TRAIT_NAMES)


def test_zero_row_rejected():
    A = np.eye(12, 15)
    A[4] = 0
    with pytest.raises(ValueError):
        GeneEffectMap.from_matrix(A)


def test_integer_parameters_round_half_away():
    assert round_half_away(2.5) == 3 and round_half_away(-2.5) == -3 and round_half_away(3.49) == 3
    eff = GeneEffectMap.diagonal()
    c3 = np.ones(15)
    c3[10] = 6.5 / 6  # short internodes 6.5 -> 7
    c3[11] = 1.1  # ear 16.5 -> 17
    y = genotype_to_values(c3, eff)
    assert y[10] == 7 and y[11] == 17
    with pytest.raises(ValueError):
        genotype_to_values(np.ones(14), eff)


def test_default_spread_uses_main_parameter():
    eff = GeneEffectMap.from_matrix(pleiotropic_matrix())
    assert eff.spread[2] == 0.05  # loci 3: blade resistance carries the largest weight
    assert eff.spread[1] == 0.0  # unused locus
    assert GeneEffectMap.diagonal().spread[4] == 0.30


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=15, max_size=15))
def test_homozygous_lines_stay_in_trait_ranges(pattern):
    from greenqtl.genetics import TRAIT_HALF_RANGE
    eff = GeneEffectMap.from_matrix(pleiotropic_matrix())
    low, high = eff.founder_alleles()
    c3 = np.where(np.array(pattern) == 1, high, low)
    y = genotype_to_values(c3, eff)
    for j, name in enumerate(TRAIT_NAMES):
        h = TRAIT_HALF_RANGE[name]
        assert abs(y[j] / eff.Yr[j] - 1) <= h + 0.5 / eff.Yr[j] + 1e-12


# meiosis

def test_crossover_count_is_poisson():
    rng = np.random.default_rng(3)
    counts = np.array([crossover_count(GMAP, rng) for _ in range(20000)])
    assert counts.mean() == pytest.approx(5.6, abs=0.08)
    assert counts.var() == pytest.approx(5.6, rel=0.06)


def test_recombination_fraction_follows_haldane():
    rng = np.random.default_rng(7)
    g = DiploidGenome(np.zeros(15), np.ones(15), np.ones(57), np.full(57, 2))
    origins = np.array([gamete_parts(g, GMAP, rng)[1] for _ in range(20000)])
    for d_markers in (1, 4):
        r = np.mean(origins[:, 0] != origins[:, d_markers])
        expected = 0.5 * (1 - math.exp(-2 * d_markers * 10 / 100))
        assert r == pytest.approx(expected, abs=0.012)


def test_gamete_of_homozygote_is_identical():
    g = DiploidGenome.founder(np.full(15, 0.9), 1, 57)
    rng = np.random.default_rng(0)
    assert np.array_equal(gamete(g, GMAP, rng), g.c1)


def test_f1_is_fully_heterozygous():
    eff = GeneEffectMap.diagonal()
    p1, p2 = founders(eff, GMAP)
    f1 = cross(p1, p2, GMAP, np.random.default_rng(0))
    assert set(marker_codes(f1, GMAP)) == {"H"}
    assert f1.heterozygous_loci(GMAP).all()


def test_marker_codes_need_origin():
    with pytest.raises(ValueError):
        marker_codes(DiploidGenome([1.0], [1.0]), GMAP)


# populations

def test_ril_population_shape_and_files(calibrated):
    eff = GeneEffectMap.from_matrix(pleiotropic_matrix())
    p1, p2 = founders(eff, GMAP)
    pop = make_ril(p1, p2, 6, 20, GMAP, np.random.default_rng(1), effects=eff, constants=calibrated)
    assert len(pop) == 20
    geno = pop.genotype_csv().splitlines()
    assert geno[0].split(",") == ["individual"] + [f"M{i}" for i in range(1, 58)]
    assert len(geno) == 21
    pheno = pop.phenotype_csv().splitlines()
    assert pheno[0].split(",") == ["individual", *TRAIT_NAMES, "cob_weight"]
    assert pop.code_matrix().shape == (20, 57)
    with pytest.raises(KeyError):
        pop.trait_values("height")


def test_empty_population_files():
    p1, p2 = founders(GeneEffectMap.diagonal(), GMAP)
    pop = make_ril(p1, p2, 6, 0, GMAP, np.random.default_rng(0))
    assert len(pop.genotype_csv().splitlines()) == 1
    assert len(pop.phenotype_csv().splitlines()) == 1
    assert pop.heterozygosity() == 0.0


def test_ril_is_reproducible():
    p1, p2 = founders(GeneEffectMap.diagonal(), GMAP)
    a = make_ril(p1, p2, 6, 30, GMAP, np.random.default_rng(5))
    b = make_ril(p1, p2, 6, 30, GMAP, np.random.default_rng(5))
    assert a.genotype_csv() == b.genotype_csv()


def test_ril_rejects_bad_input():
    p1, p2 = founders(GeneEffectMap.diagonal(), GMAP)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        make_ril(p1, p2, 1, 5, GMAP, rng)
    with pytest.raises(ValueError):
        make_ril(p1, p2, 6, -1, GMAP, rng)
    f1 = cross(p1, p2, GMAP, rng)
    with pytest.raises(ValueError):
        make_ril(f1, p2, 6, 5, GMAP, rng)


@pytest.mark.parametrize("generations,expected", [(2, 0.5), (3, 0.25), (4, 0.125)])
def test_heterozygosity_halves_each_selfing(generations, expected):
    p1, p2 = founders(GeneEffectMap.diagonal(), GMAP)
    pop = make_ril(p1, p2, generations, 2000, GMAP, np.random.default_rng(generations))
    se = math.sqrt(expected * (1 - expected) / 2000)  # loose: loci are linked
    assert pop.heterozygosity() == pytest.approx(expected, abs=6 * se)


# noise

def test_noise_cv():
    rng = np.random.default_rng(0)
    y = apply_noise(np.full(100000, 2.0), 0.15, rng)
    assert np.std(y / 2.0 - 1) == pytest.approx(0.15, rel=0.02)
    assert np.array_equal(apply_noise([1.0, 2.0], 0.0, rng), [1.0, 2.0])
    with pytest.raises(ValueError):
        apply_noise([1.0], -0.1, rng)
