import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import (
    functional_graph_component_oracle,
    gf2_factor_counts,
    gf2_irreducibles,
    omega_trial_division,
)

from modphi.lattice_measure import LaurentResidue, LevyExponent, SignedLatticeMeasure
from modphi.models import (
    MODEL_NAMES,
    BernoulliModel,
    ColouredPermutationModel,
    EwensModel,
    get_model,
    parse_params,
)
from modphi.models.bernoulli import bernoulli_alphabet, bernoulli_exact_law, finite_alphabet
from modphi.models.coloured import coloured_perm_law, coloured_perm_params
from modphi.models.fq_polynomials import (
    fq_factor_law,
    fq_factor_table,
    fq_scheme_params,
    fq_series_I,
    fq_series_R,
    fq_series_S,
    irreducible_counts,
)
from modphi.models.functional_graphs import (
    EULER_GAMMA,
    component_counts,
    connected_counts,
    functional_graph_law,
    functional_graph_params,
)
from modphi.models.permutations import (
    ewens_cycle_law,
    ewens_scheme_params,
    harmonic_number,
    stirling_first_kind,
)
from modphi.models.primes import prime_omega_law, prime_omega_params, prime_residue_law
from modphi.numtheory import mobius, totient
from modphi.symfun import elementary_from_powers, hurwitz_zeta, prime_zeta_value, zeta_value


def weights_dict(m: SignedLatticeMeasure):
    if m.dimension == 1:
        return {m.offset[0] + i: float(w) for i, w in enumerate(m.weights) if w != 0}
    out = {}
    for idx in zip(*np.nonzero(m.weights)):
        out[tuple(int(o + i) for o, i in zip(m.offset, idx))] = float(m.weights[idx])
    return out


# ----------------------------------------------------------------------
# Bernoulli sums
# ----------------------------------------------------------------------


def test_bernoulli_small_laws():
    assert weights_dict(bernoulli_exact_law([0.3])) == pytest.approx({0: 0.7, 1: 0.3})
    assert weights_dict(bernoulli_exact_law([0.5, 0.5])) == pytest.approx({0: 0.25, 1: 0.5, 2: 0.25})
    law = bernoulli_exact_law([1.0, 0.5, 1 / 3])
    assert law.weight(3) == pytest.approx(1 / 6, abs=1e-15)
    # this is the law of the number of cycles of a uniform permutation of 3 points
    assert law.weight(1) == pytest.approx(2 / 6) and law.weight(2) == pytest.approx(3 / 6)


def test_bernoulli_validation():
    with pytest.raises(ValueError):
        bernoulli_exact_law([1.5])


def test_bernoulli_limit_alphabets():
    a = bernoulli_alphabet("power", 6, a=1.0)
    assert a.p[1] == 0.0
    for k in range(2, 7):
        assert a.p[k] == pytest.approx(zeta_value(k), rel=1e-13)
    b = bernoulli_alphabet("power", 4, a=0.6)
    direct = math.fsum(j**-1.2 for j in range(1, 200001))
    tail = 200000**-0.2 / 0.2  # crude tail, a few parts in 1e6 of the total
    assert b.p[2] == pytest.approx(direct + tail, rel=1e-4)
    assert b.p[2] == pytest.approx(hurwitz_zeta(1.2), rel=1e-13)
    c = bernoulli_alphabet("finite", 3, values=[0.5, 0.25])
    assert c.p[2] == 0.3125
    with pytest.raises(ValueError):
        bernoulli_alphabet("power", 4, a=0.4)


def test_finite_alphabet_of_the_model():
    m = BernoulliModel(a=0.6)
    alph = m.alphabet(50, 4)
    p = np.arange(1, 51) ** -0.6
    assert alph.p[1] == 0.0
    assert alph.p[3] == pytest.approx(math.fsum(p**3), rel=1e-14)
    assert m.lam(50) == pytest.approx(math.fsum(p), rel=1e-14)


def test_bernoulli_model_needs_one_rule():
    with pytest.raises(ValueError):
        BernoulliModel()
    with pytest.raises(ValueError):
        BernoulliModel(a=0.6, lam=2.0)


def test_bernoulli_residue_is_the_fourier_ratio():
    m = BernoulliModel(lam=3.0)
    n, lam = 20, 3.0
    psi = m.psi(n, lam)
    xi = np.linspace(-math.pi, math.pi, 33)
    p = m.probabilities(n)
    exact = np.prod(1 + p[:, None] * (np.exp(1j * xi) - 1), axis=0) * np.exp(-lam * (np.exp(1j * xi) - 1))
    assert np.allclose(psi(xi), exact, atol=1e-13)


def test_vanishing_order_of_bernoulli_residues():
    m = BernoulliModel(a=0.6)
    n = 1000
    lam = m.lam(n)
    assert m.psi_vanishing_order(n, lam, LaurentResidue.one()) == 1
    assert m.psi_vanishing_order(n, lam, m.residue(n, 2)) == 2
    assert m.psi_vanishing_order(n, lam, m.residue(n, 3)) == 3


# ----------------------------------------------------------------------
# permutations
# ----------------------------------------------------------------------


def test_stirling_values():
    assert [stirling_first_kind(3, k) for k in (1, 2, 3)] == [2, 3, 1]
    assert all(stirling_first_kind(n, n) == 1 for n in range(0, 30))
    for n in range(1, 21):
        assert sum(stirling_first_kind(n, k) for k in range(n + 1)) == math.factorial(n)


def test_ewens_small_laws():
    assert weights_dict(ewens_cycle_law(1)) == {1: 1.0}
    assert weights_dict(ewens_cycle_law(3)) == pytest.approx({1: 1 / 3, 2: 1 / 2, 3: 1 / 6})
    assert weights_dict(ewens_cycle_law(2, 2.0)) == pytest.approx({1: 1 / 3, 2: 2 / 3})


@pytest.mark.parametrize("n", range(1, 21))
def test_ewens_uniform_equals_stirling(n):
    law = ewens_cycle_law(n, 1.0)
    for k in range(1, n + 1):
        exact = Fraction(stirling_first_kind(n, k), math.factorial(n))
        assert law.weight(k) == pytest.approx(float(exact), abs=1e-12)


def test_ewens_enumeration_with_weights():
    # sum over S_4 of theta^{cycles}, grouped by the number of cycles
    theta, n = 2.5, 4
    counts = [stirling_first_kind(n, k) * theta**k for k in range(n + 1)]
    total = sum(counts)
    law = ewens_cycle_law(n, theta)
    for k in range(1, n + 1):
        assert law.weight(k) == pytest.approx(counts[k] / total, rel=1e-13)


def test_ewens_parameters():
    lam, alph = ewens_scheme_params(10, 1.0, 0.0, 5)
    assert lam == pytest.approx(harmonic_number(10))
    for k in range(2, 6):
        assert alph.p[k] == pytest.approx(zeta_value(k), rel=1e-13)
    assert elementary_from_powers(alph, 2) == pytest.approx(-math.pi**2 / 12, rel=1e-13)
    _, alph2 = ewens_scheme_params(10, 2.0, 0.0, 3)
    assert alph2.p[2] == pytest.approx(4 * (zeta_value(2) - 1), rel=1e-13)
    assert ewens_scheme_params(10, 1.0, 0.5, 3)[0] == pytest.approx(harmonic_number(10) + 0.5)


def test_ewens_mean_matches_harmonic_number():
    m = EwensModel()
    for n in (10, 100, 1000):
        assert m.exact_law(n).mean() == pytest.approx(harmonic_number(n), rel=1e-12)


def test_ewens_scheme_residues_and_leading_terms():
    m = EwensModel()
    res = m.residue(100, 2)
    assert res.b == pytest.approx([1.0, 0.0, -math.pi**2 / 12])
    # orders 0 and 1 share the leading term because e_1 = 0
    assert m.leading_term(100, 0) == pytest.approx((1, -math.pi**2 / 12))
    assert m.leading_term(100, 1) == pytest.approx((1, -math.pi**2 / 12))
    r, beta = m.leading_term(100, 2)
    assert r == 2 and beta == pytest.approx(zeta_value(3) / 3, rel=1e-13)


# ----------------------------------------------------------------------
# polynomials over finite fields
# ----------------------------------------------------------------------


def test_irreducible_counts_small():
    assert irreducible_counts(2, 4)[1:] == (2, 1, 2, 3)
    assert irreducible_counts(3, 1)[1] == 3


def test_irreducible_counts_by_brute_force():
    irr = gf2_irreducibles(8)
    by_degree = [0] * 9
    for f in irr:
        by_degree[f.bit_length() - 1] += 1
    assert tuple(by_degree[1:]) == irreducible_counts(2, 8)[1:]


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_necklace_identity(q):
    I = irreducible_counts(q, 12)
    for n in range(1, 13):
        assert sum(d * I[d] for d in range(1, n + 1) if n % d == 0) == q**n


@pytest.mark.parametrize("n", range(1, 7))
def test_factor_tables_by_brute_force(n):
    irr = gf2_irreducibles(n)
    distinct = [0] * (n + 1)
    total = [0] * (n + 1)
    for poly in range(1 << n, 1 << (n + 1)):
        d, t = gf2_factor_counts(poly, irr)
        distinct[d] += 1
        total[t] += 1
    assert list(fq_factor_table(2, n, "distinct")) == distinct
    assert list(fq_factor_table(2, n, "with_multiplicity")) == total


def test_factor_laws_small():
    assert weights_dict(fq_factor_law(2, 2, "distinct")) == {1: 0.75, 2: 0.25}
    assert weights_dict(fq_factor_law(2, 2, "with_multiplicity")) == {1: 0.25, 2: 0.75}
    for counted in ("distinct", "with_multiplicity"):
        assert weights_dict(fq_factor_law(3, 1, counted)) == {1: 1.0}
    with pytest.raises(ValueError):
        fq_factor_law(7, 3)
    with pytest.raises(ValueError):
        fq_factor_law(2, 3, "other")


def test_factor_law_total_is_exact():
    for counted in ("distinct", "with_multiplicity"):
        assert sum(fq_factor_table(3, 12, counted)) == 3**12


def test_fq_series():
    I = irreducible_counts(2, 64)
    direct = math.fsum(I[n] * 4.0**-n for n in range(1, 65))
    assert fq_series_I(2, 0.25) == pytest.approx(direct, abs=1e-12)
    assert fq_series_I(2, 0.25) > 2 / 4 + 1 / 16 + 2 / 64

    def log_series(weight):
        return math.fsum(weight(k) / k * -math.log1p(-(2.0 ** (1 - k))) for k in range(2, 80))

    assert fq_series_R(2) == pytest.approx(log_series(mobius), abs=1e-13)
    assert fq_series_S(2) == pytest.approx(log_series(totient), abs=1e-13)
    # the first term of R at q = 2
    assert -0.5 * math.log(2) == pytest.approx(mobius(2) / 2 * -math.log1p(-0.5))


def test_fq_scheme_parameters():
    lam, alph = fq_scheme_params(2, 100, "distinct", 4)
    assert lam == pytest.approx(math.log(100) + fq_series_R(2) + EULER_GAMMA)
    assert alph.p[2] == pytest.approx(zeta_value(2) + fq_series_I(2, 0.25))
    lam, alph = fq_scheme_params(2, 100, "with_multiplicity", 4)
    I = irreducible_counts(2, 64)
    for k in (2, 3, 4):
        expected = zeta_value(k) + (-1) ** (k - 1) * math.fsum(I[n] / (2.0**n - 1) ** k for n in range(1, 65))
        assert alph.p[k] == pytest.approx(expected, rel=1e-13)


# ----------------------------------------------------------------------
# functional graphs
# ----------------------------------------------------------------------


def test_functional_graph_small_laws():
    assert weights_dict(functional_graph_law(1)) == {1: 1.0}
    assert weights_dict(functional_graph_law(2)) == {1: 0.75, 2: 0.25}


@pytest.mark.parametrize("n", range(1, 8))
def test_functional_graph_counts_by_brute_force(n):
    oracle = functional_graph_component_oracle(n)
    assert list(component_counts(n)) == oracle.tolist()
    assert sum(component_counts(n)) == n**n


def test_connected_counts_known_values():
    # connected functional graphs on n labelled points
    assert list(connected_counts(5))[1:] == [1, 3, 17, 142, 1569]


def test_functional_graph_parameters():
    lam, alph = functional_graph_params(1, 4)
    assert lam == pytest.approx((math.log(2) + EULER_GAMMA) / 2)
    assert alph.p[2] == pytest.approx(math.pi**2 / 8, rel=1e-13)
    assert alph.p[3] == pytest.approx(7 / 8 * zeta_value(3), rel=1e-13)
    direct = math.fsum((2 * j - 1.0) ** -3 for j in range(1, 100001))
    assert alph.p[3] == pytest.approx(direct, abs=1e-10)


def test_functional_graph_range():
    with pytest.raises(ValueError):
        functional_graph_law(41)


# ----------------------------------------------------------------------
# prime divisors
# ----------------------------------------------------------------------


def test_omega_small_laws():
    assert weights_dict(prime_omega_law(10)) == pytest.approx({0: 0.1, 1: 0.7, 2: 0.2})
    assert weights_dict(prime_omega_law(2)) == pytest.approx({0: 0.5, 1: 0.5})
    assert prime_omega_law(30).weight(3) == pytest.approx(1 / 30)


def test_omega_law_by_trial_division():
    n = 3000
    counts = np.bincount([omega_trial_division(k) for k in range(1, n + 1)])
    law = prime_omega_law(n)
    assert np.allclose([law.weight(k) for k in range(len(counts))], counts / n, atol=1e-15)


def test_omega_parameters():
    n = int(math.exp(math.e)) + 1
    lam, alph = prime_omega_params(n, 4)
    assert lam == pytest.approx(math.log(math.log(n)) + EULER_GAMMA)
    assert prime_omega_params(10**6)[0] == pytest.approx(math.log(math.log(1e6)) + EULER_GAMMA)
    assert alph.p[2] == pytest.approx(1.6449340668 + 0.4522474200, abs=1e-9)
    assert alph.p[3] == pytest.approx(zeta_value(3) + prime_zeta_value(3), rel=1e-14)
    assert elementary_from_powers(alph, 2) == pytest.approx(-alph.p[2] / 2)
    with pytest.raises(ValueError):
        prime_omega_params(2)


def test_omega_law_at_e_to_the_e():
    # lambda = 1 + gamma exactly at n = e^e (not an integer, so check the rule itself)
    assert math.log(math.log(math.exp(math.e))) + EULER_GAMMA == pytest.approx(1 + EULER_GAMMA)


def test_omega_mean_stays_near_lambda():
    m = get_model("omega")
    gaps = [abs(m.exact_law(n).mean() - m.lam(n)) for n in (10**3, 10**4, 10**5)]
    assert max(gaps) < 1.0


def test_prime_residue_laws():
    assert weights_dict(prime_residue_law(5, 4)) == pytest.approx({(0, 0): 0.6, (1, 0): 0.2, (0, 1): 0.2})
    assert weights_dict(prime_residue_law(1, 4)) == {(0, 0): 1.0}
    law = prime_residue_law(10, 3)
    # classes 1 and 2 mod 3: 7 is in class 1; 2 and 5 are in class 2; 3 is excluded
    expected = {(0, 0): 3 / 10, (0, 1): 5 / 10, (1, 0): 1 / 10, (0, 2): 1 / 10}
    assert weights_dict(law) == pytest.approx(expected)
    with pytest.raises(ValueError):
        prime_residue_law(10, 5)


def test_prime_residue_law_by_trial_division():
    n, a = 2000, 6
    counts = {}
    for k in range(1, n + 1):
        ps = [p for p in range(2, k + 1) if k % p == 0 and omega_trial_division(p) == 1 and all(p % d for d in range(2, p))]
        key = (sum(1 for p in ps if p % a == 1), sum(1 for p in ps if p % a == a - 1))
        counts[key] = counts.get(key, 0) + 1
    law = prime_residue_law(n, a)
    assert weights_dict(law) == pytest.approx({k: v / n for k, v in counts.items()})


def test_omega_residue_model_is_order_zero_only():
    m = get_model("omega-residue", a=4)
    assert m.exact_law(16).weight(0, 0) == pytest.approx(5 / 16)
    assert m.leading_term(100, 0) is None
    with pytest.raises(ValueError):
        m.residue(100, 1)
    with pytest.raises(ValueError):
        get_model("omega-residue", a=5)


# ----------------------------------------------------------------------
# coloured permutations
# ----------------------------------------------------------------------


def test_coloured_small_laws():
    assert weights_dict(coloured_perm_law(1)) == pytest.approx({(1, 0): 0.5, (0, 1): 0.5})
    law = coloured_perm_law(2)
    assert law.weight(1, 1) == pytest.approx(0.25)
    assert law.total_mass() == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 10, 60])
def test_coloured_marginals_are_bernoulli_products(n):
    law = coloured_perm_law(n)
    ref = bernoulli_exact_law([1 / (2 * j) for j in range(1, n + 1)])
    for axis in (0, 1):
        marg = law.marginal(axis)
        ks = range(0, n + 1)
        assert max(abs(marg.weight(k) - ref.weight(k)) for k in ks) < 1e-12


def test_coloured_parameters():
    lam, exp, alph, beta = coloured_perm_params(50, finite=False)
    assert lam == pytest.approx(harmonic_number(50))
    p2 = math.pi**2 / 6
    assert beta == pytest.approx({(2, 0): -p2 / 8, (1, 1): -p2 / 4, (0, 2): -p2 / 8})
    assert exp.sigma2 == pytest.approx((0.5, 0.5))
    assert exp.m == pytest.approx((0.5, 0.5))
    with pytest.raises(ValueError):
        coloured_perm_params(10, d=3)


def test_coloured_model_leading_term_is_two_dimensional():
    m = ColouredPermutationModel()
    r, beta = m.leading_term(100, 1)
    assert r == 1 and set(beta) == {(2, 0), (1, 1), (0, 2)}


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------


def test_registry_names():
    assert set(MODEL_NAMES) == {
        "bernoulli", "ewens", "fgraph", "fqpoly-distinct", "fqpoly-mult",
        "omega", "coloured-perm", "omega-residue",
    }


@pytest.mark.parametrize(
    "name,params",
    [("bernoulli", {"a": 0.6}), ("ewens", {}), ("fgraph", {}), ("fqpoly-distinct", {"q": 3}),
     ("fqpoly-mult", {}), ("omega", {}), ("coloured-perm", {}), ("omega-residue", {"a": 3})],
)
def test_every_model_builds_a_probability_law(name, params):
    m = get_model(name, **params)
    n = max(m.n_range[0], 20)
    law = m.exact_law(n)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert np.all(law.weights >= 0)
    assert m.lam(n) > 0
    assert m.descriptor.name == m.name and m.descriptor.dimension == law.dimension


def test_lambda_rules_increase():
    for name in ("ewens", "fgraph", "fqpoly-distinct", "fqpoly-mult", "omega"):
        m = get_model(name)
        lo = max(m.n_range[0], 3)
        values = [m.lam(n) for n in (lo, lo + 5, lo + 20)]
        assert values[0] < values[1] < values[2]


def test_exact_sum_convention_is_the_mean():
    m = get_model("ewens", theta=2)
    assert m.lam(50, "exact-sum") == pytest.approx(m.exact_law(50).mean())
    assert m.lam(50, "theorem") == pytest.approx(2 * harmonic_number(50))
    with pytest.raises(ValueError):
        m.lam(50, "other")


def test_registry_errors_and_param_parsing():
    with pytest.raises(ValueError):
        get_model("nope")
    with pytest.raises(ValueError):
        get_model("ewens").exact_law(0)
    assert parse_params(["a=0.6", "q=3", "counted=distinct"]) == {"a": 0.6, "q": 3, "counted": "distinct"}
    with pytest.raises(ValueError):
        parse_params(["a"])


def test_default_exponent_is_poisson():
    assert get_model("ewens").exponent == LevyExponent.poisson()
