#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qbm/bath_kernels.hpp"
#include "qbm/errors.hpp"

using namespace qbm;
using cplx = std::complex<double>;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
BathSpec dl(double gamma = 0.5, double lambda = 1.0, double beta = 10.0)
{
    return {gamma, lambda, beta, CutoffForm::DoubleLorentzian};
}
} // namespace

TEST_CASE("gamma_tilde closed forms")
{
    CHECK(gamma_tilde(dl(), 0.0).real() == Approx(1.0 / (4.0 * pi)).epsilon(1e-15));
    CHECK(gamma_tilde(dl(0.5, 2.0), 2.0).real() == Approx(3.0 / (32.0 * pi)).epsilon(1e-15));
    BathSpec l{0.5, 3.0, 10.0, CutoffForm::Lorentzian};
    CHECK(gamma_tilde(l, 1.0).real() == Approx(3.0 / (4.0 * pi * 4.0)).epsilon(1e-15));
    BathSpec m{0.5, 3.0, 10.0, CutoffForm::MarkovianLimit};
    CHECK(gamma_tilde(m, cplx(2.0, 5.0)) == cplx(1.0 / (4.0 * pi), 0.0));
    CHECK_THROWS_AS(gamma_tilde(dl(0.5, 2.0), -2.0), DomainError);
    CHECK_THROWS_AS(gamma_tilde(l, -3.0), DomainError);
}

TEST_CASE("large cutoff approaches the Markovian kernel")
{
    const cplx z(0.7, -1.3);
    for (double L : {1e2, 1e3, 1e4, 1e5}) {
        for (auto form : {CutoffForm::Lorentzian, CutoffForm::DoubleLorentzian}) {
            const BathSpec b{0.5, L, 10.0, form};
            const double rel = std::abs(gamma_tilde(b, z) * 4.0 * pi - 1.0);
            CHECK(rel < 2.0 * std::abs(z) / L);
        }
    }
}

TEST_CASE("memory kernel against Talbot inversion of the Laplace kernel")
{
    for (auto form : {CutoffForm::Lorentzian, CutoffForm::DoubleLorentzian}) {
        for (double L : {0.5, 1.0, 20.0}) {
            const BathSpec b{0.5, L, 10.0, form};
            const auto F = [&](std::complex<long double> s) -> std::complex<long double> {
                const long double Ll = L;
                const long double p = 1.0L / (4.0L * std::numbers::pi_v<long double>);
                if (form == CutoffForm::Lorentzian) return p * Ll / (Ll + s);
                return 0.5L * p * Ll * (2.0L * Ll + s) / ((Ll + s) * (Ll + s));
            };
            for (int i = 1; i <= 20; ++i) {
                const double tau = 10.0 / L * i / 20.0;
                CHECK(memory_kernel(b, tau) == Approx(oracle::talbot(F, tau)).epsilon(1e-8).scale(L * 1e-2));
            }
            // tau = 0: lim z Gamma~(z)
            const double z = 1e13;
            CHECK(memory_kernel(b, 0.0) == Approx(z * gamma_tilde(b, z).real()).epsilon(1e-8));
            CHECK(memory_kernel(b, 60.0 / L) < 1e-20);
        }
    }
    CHECK(memory_kernel(dl(0.5, 3.0), 0.0) == Approx(3.0 / (8.0 * pi)));
    CHECK_THROWS_AS(memory_kernel(dl(), -1e-3), DomainError);
}

TEST_CASE("noise weight equals minus the imaginary part of the continued self-energy")
{
    // nu(k) = -Im[8 pi gamma z Gamma~(z)] at z = -i k + eps
    for (auto form : {CutoffForm::Lorentzian, CutoffForm::DoubleLorentzian, CutoffForm::MarkovianLimit}) {
        const BathSpec b{0.5, 1.0, 10.0, form};
        for (double k : {0.1, 0.7, 3.0}) {
            const cplx z(1e-12, -k);
            const cplx se = 8.0 * pi * b.gamma * z * gamma_tilde(b, z);
            CHECK(noise_spectral_weight(b, k) == Approx(-se.imag()).epsilon(1e-10));
        }
    }
    CHECK(noise_spectral_weight(dl(0.5, 1.0), 1.0) == Approx(0.25).epsilon(1e-15));
    CHECK(noise_spectral_weight(dl(0.5, 1.0), -0.4) == -noise_spectral_weight(dl(0.5, 1.0), 0.4));
    CHECK(noise_spectral_weight(dl(0.5, 1e8), 0.3) == Approx(2.0 * 0.5 * 0.3).epsilon(1e-12));
}

TEST_CASE("hadamard weight: limits, evenness, direct values")
{
    const BathSpec b = dl(0.5, 1.0, 10.0);
    CHECK(hadamard_weight(b, 0.0) == Approx(4.0 * 0.5 / 10.0).epsilon(1e-15));
    CHECK(hadamard_weight(b, 1e-8) == Approx(4.0 * 0.5 / 10.0).epsilon(1e-12));
    CHECK(hadamard_weight(b, 1.0) == Approx(0.25 / std::tanh(5.0)).epsilon(1e-14));
    CHECK(hadamard_weight(b, 1.0) == Approx(0.25002).epsilon(1e-5));
    for (double k : {1e-9, 1e-6, 0.3, 2.0, 50.0}) CHECK(hadamard_weight(b, k) == hadamard_weight(b, -k));
    BathSpec cold = b;
    cold.beta = 1e6;
    CHECK(hadamard_weight(cold, 0.8) == Approx(noise_spectral_weight(cold, 0.8)).epsilon(1e-15));
    // continuity across the small-argument branch
    for (double beta : {0.1, 1.0, 10.0}) {
        BathSpec h = b;
        h.beta = beta;
        const double k0 = 2.0 * 5e-7 / beta;
        CHECK(hadamard_weight(h, k0 * (1 - 1e-9)) == Approx(hadamard_weight(h, k0 * (1 + 1e-9))).epsilon(1e-12));
    }
}

TEST_CASE("coth branches")
{
    for (double x : {1e-9, 1e-7, 4.9e-7, 5.1e-7, 1e-3, 0.5, 3.0, 19.9, 20.1, 100.0}) {
        const double exact = std::cosh(x) / std::sinh(x);
        CHECK(coth_half(2.0, x) == Approx(exact).epsilon(1e-15));
        CHECK(coth_half(2.0, -x) == Approx(-exact).epsilon(1e-15));
    }
    CHECK(coth_half(1.0, 1e4) == 1.0);
}

TEST_CASE("nu(k)/k is integrable for the double-Lorentzian cutoff")
{
    const BathSpec b = dl(0.5, 2.0);
    boost::math::quadrature::exp_sinh<double> integrator;
    const double v = integrator.integrate([&](double k) { return noise_spectral_weight(b, k) / k; });
    CHECK(std::isfinite(v));
    CHECK(v == Approx(2.0 * 0.5 * pi * 2.0 / 4.0).epsilon(1e-10));  // 2 gamma int P = gamma pi L / 2
}

TEST_CASE("form names and validation")
{
    for (auto f : {CutoffForm::Lorentzian, CutoffForm::DoubleLorentzian, CutoffForm::MarkovianLimit})
        CHECK(cutoff_form_from_string(to_string(f)) == f);
    CHECK_THROWS_AS(cutoff_form_from_string("ohmic"), DomainError);
    CHECK_THROWS_WITH_AS(dl(0.5, 0.0).validate(), doctest::Contains("lambda > 0"), DomainError);
    CHECK_THROWS_AS(dl(-0.1).validate(), DomainError);
    CHECK_THROWS_AS(dl(0.5, 1.0, 0.0).validate(), DomainError);
    CHECK(frequency_shift(dl(0.5, 3.0)) == Approx(0.5 * 3.0));
}
