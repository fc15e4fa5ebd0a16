import math

import numpy as np
import pytest

from tailsum import (
    CovarianceModel,
    DomainError,
    DomainKind,
    covariance,
    covariance_closed,
    covariance_factor,
    lil_envelope,
    reduced_covariance,
    reduced_variance,
    shift_factor,
    variance,
    variance_factor,
)

FRECHET = DomainKind.frechet()
GUMBEL = DomainKind.gumbel()
WEIBULL1 = DomainKind.weibull(1.0)
WEIBULL2 = DomainKind.weibull(2.0)


def exp_moment_cov(r, rho):
    """Independent oracle: Cov(E^r/r!, E^rho/rho!) for E standard exponential."""
    return (math.factorial(r + rho) - math.factorial(r) * math.factorial(rho)) / (
        math.factorial(r) * math.factorial(rho)
    )


class TestDomainKind:
    def test_weibull_needs_gamma(self):
        with pytest.raises(DomainError):
            DomainKind.weibull(None)
        with pytest.raises(DomainError):
            DomainKind.weibull(-1.0)
        with pytest.raises(DomainError):
            DomainKind.weibull(math.inf)

    def test_frechet_gamma_optional(self):
        assert DomainKind.frechet().gamma is None
        assert DomainKind.frechet(2.0).gamma == 2.0
        with pytest.raises(DomainError):
            DomainKind.frechet(-2.0)


class TestFactors:
    def test_variance_factor_values(self):
        assert variance_factor(1, WEIBULL1) == pytest.approx(2 / 3)
        assert variance_factor(2, WEIBULL2) == pytest.approx(2 / 5)
        assert variance_factor(3, FRECHET) == 1.0
        assert variance_factor(3, GUMBEL) == 1.0

    def test_variance_factor_domain(self):
        with pytest.raises(DomainError):
            variance_factor(0, FRECHET)

    def test_covariance_factor_values(self):
        assert covariance_factor(1, 2, WEIBULL1) == pytest.approx(0.5)
        assert covariance_factor(2, 3, WEIBULL1) == pytest.approx(0.2)
        assert covariance_factor(2, 5, GUMBEL) == 1.0

    def test_covariance_factor_requires_r_below_rho(self):
        with pytest.raises(DomainError):
            covariance_factor(3, 3, WEIBULL1)
        with pytest.raises(DomainError):
            covariance_factor(4, 2, FRECHET)

    def test_shift_factor(self):
        assert shift_factor(2, WEIBULL2) == pytest.approx(2.0)
        assert shift_factor(1, WEIBULL1) == pytest.approx(2.0)
        assert shift_factor(7, FRECHET) == 1.0

    def test_infinite_shape_convention(self):
        # a huge weibull shape approaches the frechet/gumbel constants
        big = DomainKind.weibull(1e6)
        assert variance_factor(3, big) == pytest.approx(1.0, abs=1e-4)
        assert shift_factor(3, big) == pytest.approx(1.0, abs=1e-4)
        assert covariance_factor(2, 4, big) == pytest.approx(1.0, abs=1e-4)


class TestCovarianceValues:
    def test_diagonal(self):
        assert variance(2, FRECHET) == 6.0
        assert variance(4, GUMBEL) == 70.0
        assert variance(1, WEIBULL1) == pytest.approx(4 / 3)

    def test_off_diagonal(self):
        assert covariance(1, 2, FRECHET) == 3.0
        assert covariance(1, 4, FRECHET) == 5.0
        assert covariance(2, 3, FRECHET) == 10.0

    def test_closed_form_matches_recursion(self):
        for r in range(1, 9):
            for rho in range(1, 9):
                assert covariance(r, rho, FRECHET) == covariance_closed(r, rho)
                assert covariance(r, rho, GUMBEL) == covariance_closed(r, rho)

    def test_diagonal_is_central_binomial(self):
        for r in range(1, 11):
            assert variance(r, FRECHET) == math.comb(2 * r, r)

    def test_symmetry(self):
        for dom in (FRECHET, WEIBULL1):
            assert covariance(2, 5, dom) == covariance(5, 2, dom)

    def test_closed_form_examples(self):
        assert covariance_closed(1, 1) == 2
        assert covariance_closed(3, 3) == 20
        assert covariance_closed(2, 4) == 15


class TestReducedModel:
    def test_reduced_variances(self):
        assert reduced_variance(1, FRECHET) == 1.0
        assert reduced_variance(2, FRECHET) == 5.0
        assert reduced_variance(1, WEIBULL1) == pytest.approx(4 / 3)

    def test_reduced_covariances(self):
        assert reduced_covariance(1, 2, FRECHET) == 2.0
        assert reduced_covariance(1, 3, FRECHET) == 3.0
        assert reduced_covariance(2, 3, FRECHET) == 9.0

    def test_against_exponential_moments(self):
        # with unit domain factors the reduced model is the covariance of
        # the vector (E^p/p!), computable from factorials alone
        for r in range(1, 7):
            assert reduced_variance(r, FRECHET) == pytest.approx(exp_moment_cov(r, r))
            for rho in range(r + 1, 7):
                assert reduced_covariance(r, rho, FRECHET) == pytest.approx(
                    exp_moment_cov(r, rho)
                )

    @pytest.mark.parametrize("dom", [FRECHET, GUMBEL, WEIBULL1, WEIBULL2])
    def test_reduced_matrix_positive_semidefinite(self, dom):
        model = CovarianceModel.build(dom, 6)
        eigvals = np.linalg.eigvalsh(model.reduced_matrix())
        assert eigvals.min() >= -1e-9

    def test_reduced_variance_nonnegative(self):
        for dom in (FRECHET, WEIBULL1, WEIBULL2, DomainKind.weibull(0.5)):
            for r in range(1, 9):
                assert reduced_variance(r, dom) >= 0.0


class TestModel:
    def test_build_shapes(self):
        model = CovarianceModel.build(FRECHET, 4)
        assert model.sigma.shape == (4, 4)
        assert model.sigma2 == (2.0, 6.0, 20.0, 70.0)
        assert model.e == (1.0, 1.0, 1.0, 1.0)
        assert np.allclose(model.sigma, model.sigma.T)

    def test_predictions(self):
        model = CovarianceModel.build(FRECHET, 3)
        assert model.predicted_variance(2, reduced=False) == 6.0
        assert model.predicted_variance(2, reduced=True) == 5.0
        assert model.predicted_covariance(1, 2, reduced=True) == 2.0

    def test_invalid_pmax(self):
        with pytest.raises(DomainError):
            CovarianceModel.build(FRECHET, 0)


class TestLilEnvelope:
    def test_reference_value(self):
        value = lil_envelope(1, FRECHET, 1000, 10**6)
        assert value == pytest.approx(0.072468, abs=5e-6)

    def test_scaling_in_k(self):
        a = lil_envelope(2, FRECHET, 400, 10**6)
        b = lil_envelope(2, FRECHET, 1600, 10**6)
        assert a / b == pytest.approx(2.0, rel=1e-12)

    def test_envelope_formula(self):
        dom = WEIBULL1
        k, n = 500, 10**5
        expect = math.sqrt(reduced_variance(3, dom)) * math.sqrt(
            2 * math.log(math.log(n)) / k
        )
        assert lil_envelope(3, dom, k, n) == pytest.approx(expect, rel=1e-14)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            lil_envelope(0, FRECHET, 100, 1000)
        with pytest.raises(DomainError):
            lil_envelope(1, FRECHET, 2, 1000)
        with pytest.raises(DomainError):
            lil_envelope(1, FRECHET, 100, 100)
