#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbm/errors.hpp"
#include "qbm/spectral_quadrature.hpp"

using namespace qbm;
using cplx = std::complex<double>;
using doctest::Approx;

namespace {

BathSpec dl(double gamma = 0.5, double lambda = 1.0, double beta = 10.0)
{
    return {gamma, lambda, beta, CutoffForm::DoubleLorentzian};
}

ModeSpec plus_mode(double lambda = 1.0, double beta = 10.0) { return {1.2, 1.0, dl(0.5, lambda, beta)}; }

Eigen::Matrix2d mode_block(const ModeSpec& m, double t, const QuadratureOptions& o = {}, QuadratureReport* r = nullptr)
{
    static thread_local ModeSolutions s;
    s = mode_solutions(m);
    const std::array<Response, 2> resp{Response{&s.d2, 0}, Response{&s.d2, 1}};
    return induced_block(m.bath, resp, t, m.mass, o, r);
}

} // namespace

TEST_CASE("window: boundary values and stationary limit")
{
    const auto s = mode_solutions(plus_mode());
    for (double k : {0.0, 0.5, 1.1, 7.0}) {
        CHECK(window(s.d2, 0.0, k, 0) == cplx(0.0, 0.0));
        CHECK(window(s.d2, 0.0, k, 1) == cplx(0.0, 0.0));
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (double t : {0.5, 3.0, 11.0}) {
        const double direct = GK::integrate([&](double u) { return s.d2.value(u); }, 0.0, t, 15, 1e-13);
        CHECK(window(s.d2, t, 0.0, 0).real() == Approx(direct).epsilon(1e-8).scale(1e-8));
        CHECK(std::abs(window(s.d2, t, 0.0, 0).imag()) < 1e-12);
    }
    // Markovian d2, t -> infinity
    const ModeSpec mk{1.0, 1.0, {0.5, 1.0, 10.0, CutoffForm::MarkovianLimit}};
    const auto sm = mode_solutions(mk);
    for (double k : {0.0, 0.3, 0.9, 4.0}) {
        const cplx exact = 1.0 / cplx(1.0 - k * k, -2.0 * 0.5 * k);
        CHECK(std::abs(stationary_window(sm.d2, k, 0) - exact) < 1e-13);
        CHECK(std::abs(window(sm.d2, 200.0, k, 0) - exact) < 1e-12);
    }
}

TEST_CASE("window: time derivative and continuity at resonances")
{
    const auto s = mode_solutions(plus_mode());
    const double h = 1e-5;
    for (double t : {0.7, 4.0, 9.5})
        for (double k : {0.0, 0.9, 1.33, 5.0}) {
            const cplx fd = (window(s.d2, t + h, k, 0) - window(s.d2, t - h, k, 0)) / (2.0 * h);
            CHECK(std::abs(fd - s.d2.value(t) * std::polar(1.0, k * t)) < 1e-8);
            const cplx fd1 = (window(s.d2, t + h, k, 1) - window(s.d2, t - h, k, 1)) / (2.0 * h);
            CHECK(std::abs(fd1 - s.d2.value(t, 1) * std::polar(1.0, k * t)) < 1e-8);
        }
    for (auto z : s.d2.poles()) {
        const double k = std::abs(z.imag());
        const cplx a = window(s.d2, 6.0, k * (1 - 1e-9), 0), b = window(s.d2, 6.0, k * (1 + 1e-9), 0);
        CHECK(std::abs(a - b) < 1e-7);
    }
}

TEST_CASE("window: exact resonance uses the series branch")
{
    // f(t) = sin t with poles +-i; at kappa = 1 the pole -i hits z + i kappa = 0
    const PoleResidueForm f({cplx(0.0, 1.0), cplx(0.0, -1.0)}, {1.0 / cplx(0.0, 2.0), -1.0 / cplx(0.0, 2.0)});
    for (double t : {0.5, 2.0, 7.0}) {
        // int_0^t sin u e^{iu} du = (t i)/2 ... in closed form: (e^{2it} - 1)/(4) - i t/2 * (-1) ...
        const cplx exact = (std::exp(cplx(0.0, 2.0 * t)) - 1.0) / cplx(0.0, 2.0) / cplx(0.0, 2.0) - t / cplx(0.0, 2.0);
        CHECK(std::abs(window(f, t, 1.0, 0) - exact) < 1e-12);
    }
}

TEST_CASE("induced moments vanish at t = 0 and reject bad tolerances")
{
    for (auto form : {CutoffForm::Lorentzian, CutoffForm::DoubleLorentzian, CutoffForm::MarkovianLimit}) {
        ModeSpec m = plus_mode();
        m.bath.form = form;
        CHECK(mode_block(m, 0.0).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(mode_block(plus_mode(), 1.0, QuadratureOptions{0.0, 4000}), DomainError);
    CHECK_THROWS_AS(mode_block(plus_mode(), 1.0, QuadratureOptions{0.05, 4000}), DomainError);
    QuadratureReport r;
    mode_block(plus_mode(), 5.0, {}, &r);
    CHECK(r.converged);
    CHECK(r.tail_bounded);
    CHECK(r.abs_error <= 1e-7 * r.value);
    CHECK(r.kappa_max >= 10.0);
}

TEST_CASE("tolerance failures carry the report")
{
    try {
        mode_block(plus_mode(), 5.0, QuadratureOptions{1e-12, 3});
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK_FALSE(e.report().converged);
        CHECK(e.report().panels >= 3);
        CHECK(e.report().evaluations > 0);
    }
}

TEST_CASE("frequency-domain moments against the time-domain double integral")
{
    const ModeSpec m = plus_mode();
    const auto s = mode_solutions(m);
    const oracle::NoiseCorrelation corr(0.5, 1.0, 10.0, 1.0, 5.0);
    const auto d2 = [&](double u) { return s.d2.value(u); };
    const auto d2dot = [&](double u) { return s.d2.value(u, 1); };
    for (double t : {1.0, 5.0}) {
        const Eigen::Matrix2d b = mode_block(m, t, QuadratureOptions{1e-9, 4000});
        CHECK(b(0, 0) == Approx(oracle::double_integral(d2, d2, corr, t)).epsilon(1e-3));
        CHECK(b(0, 1) == Approx(oracle::double_integral(d2, d2dot, corr, t)).epsilon(1e-3));
        CHECK(b(1, 1) == Approx(oracle::double_integral(d2dot, d2dot, corr, t)).epsilon(1e-3));
    }
}

TEST_CASE("full-line integral is twice the half-line one")
{
    for (double lambda : {1.0, 20.0}) {
        const ModeSpec m = plus_mode(lambda);
        const auto s = mode_solutions(m);
        const double t = 3.0;
        const VectorIntegrand full = [&](double k, Eigen::Ref<Eigen::VectorXd> out) {
            const cplx a = window(s.d2, t, k, 0), b = window(s.d2, t, k, 1);
            const double w = m.mass * hadamard_weight(m.bath, k) / (2.0 * std::numbers::pi);
            out[0] = w * std::norm(a);
            out[1] = w * (a * std::conj(b)).real();
            out[2] = w * std::norm(b);
        };
        const double K = 2000.0 * lambda;
        const auto v = integrate_panels(full, 3, {-K, -lambda, -1.5, -1.0, 0.0, 1.0, 1.5, lambda, K}, 1e-10, 0.0, 20000);
        const Eigen::Matrix2d half = mode_block(m, t, QuadratureOptions{1e-9, 4000});
        CHECK(v.value[0] == Approx(half(0, 0)).epsilon(1e-6));
        CHECK(v.value[1] == Approx(half(0, 1)).epsilon(1e-6));
        CHECK(v.value[2] == Approx(half(1, 1)).epsilon(1e-4));  // truncated log tail at K
    }
}

TEST_CASE("halving the tolerance moves the result by less than the error estimate")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ul(0.0, std::log(30.0)), ub(std::log(0.5), std::log(20.0)),
        ut(0.1, 30.0);
    for (int i = 0; i < 20; ++i) {
        const ModeSpec m = plus_mode(std::exp(ul(rng)), std::exp(ub(rng)));
        const double t = ut(rng);
        QuadratureReport r1;
        const Eigen::Matrix2d a = mode_block(m, t, QuadratureOptions{1e-6, 4000}, &r1);
        const Eigen::Matrix2d b = mode_block(m, t, QuadratureOptions{5e-7, 4000});
        CHECK((a - b).cwiseAbs().maxCoeff() <= r1.abs_error);
    }
}

TEST_CASE("deterministic results")
{
    const Eigen::Matrix2d a = mode_block(plus_mode(5.0), 7.3);
    const Eigen::Matrix2d b = mode_block(plus_mode(5.0), 7.3);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("steady integrals: closed form against stationary windows")
{
    for (double lambda : {1.0, 5.0, 20.0})
        for (double beta : {0.5, 10.0}) {
            const ModeSpec m = plus_mode(lambda, beta);
            const Eigen::Matrix2d w = mode_block(m, std::numeric_limits<double>::infinity(), QuadratureOptions{1e-9, 4000});
            const double xx = steady_fdr_integral(m, SteadyElement::PositionPosition, {1e-9, 4000});
            const double pp = steady_fdr_integral(m, SteadyElement::MomentumMomentum, {1e-9, 4000});
            CHECK(xx == Approx(w(0, 0)).epsilon(1e-7));
            CHECK(pp == Approx(w(1, 1)).epsilon(1e-6));
            CHECK(std::abs(w(0, 1)) < 1e-8);
            CHECK(steady_fdr_integral(m, SteadyElement::PositionMomentum) == 0.0);
        }
}

TEST_CASE("steady integrand is finite at kappa = 0")
{
    const ModeSpec m = plus_mode();
    const cplx d0 = 1.0 / (m.omega_sq + self_energy(m.bath, 0.0));
    const double limit = hadamard_weight(m.bath, 0.0) * std::norm(d0) / std::numbers::pi;
    CHECK(std::isfinite(limit));
    CHECK(limit == Approx(4.0 * 0.5 / (std::numbers::pi * 10.0) / (1.2 * 1.2)).epsilon(1e-12));
    // the integrand just above zero matches the limit
    const double k = 1e-6;
    const cplx dk = 1.0 / (m.omega_sq - k * k + self_energy(m.bath, cplx(0.0, -k)));
    CHECK(coth_half(m.bath.beta, k) * dk.imag() / std::numbers::pi == Approx(limit).epsilon(1e-6));
}

TEST_CASE("classical equipartition at high temperature")
{
    const ModeSpec m{1.0, 1.0, {0.01, 1e4, 0.05, CutoffForm::DoubleLorentzian}};
    const double xx = steady_fdr_integral(m, SteadyElement::PositionPosition);
    CHECK(xx == Approx(1.0 / (0.05 * 1.0 * 1.0)).epsilon(0.02));
}

TEST_CASE("zero-temperature ground-state dispersion")
{
    for (double g : {1e-2, 1e-3}) {
        const ModeSpec m{1.0, 1.0, {g, 5.0, 1e6, CutoffForm::DoubleLorentzian}};
        const double xx = steady_fdr_integral(m, SteadyElement::PositionPosition);
        CHECK(std::abs(xx - 0.5) < 5.0 * g);
        const Eigen::Matrix2d w = mode_block(m, std::numeric_limits<double>::infinity());
        CHECK(std::abs(w(0, 0) - 0.5) < 5.0 * g);
    }
}

TEST_CASE("steady dispersion is larger for longer memory at fixed temperature")
{
    const double a = steady_fdr_integral(plus_mode(1.0, 1.0), SteadyElement::PositionPosition);
    const double b = steady_fdr_integral(plus_mode(20.0, 1.0), SteadyElement::PositionPosition);
    CHECK(a > b);
}

TEST_CASE("Markovian momentum tails are capped and flagged")
{
    const ModeSpec m{1.2, 1.0, {0.1, 1.0, 10.0, CutoffForm::MarkovianLimit}};
    QuadratureReport r;
    const double pp = steady_fdr_integral(m, SteadyElement::MomentumMomentum, {}, &r);
    CHECK(std::isfinite(pp));
    CHECK_FALSE(r.tail_bounded);
    CHECK(r.kappa_max == default_kappa_cap(m.bath, std::sqrt(1.2)));
    CHECK(default_kappa_cap(m.bath, 2.0) == 100.0);
}
