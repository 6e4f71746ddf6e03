#pragma once

// Reference computations that share no code path with the library: a direct
// Volterra time-stepper, a Talbot-contour inverse Laplace transform and a
// time-domain double integral for the noise-induced moments.

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Fixed Talbot inversion in long double: f(t) from F(s), t > 0.
inline double talbot(const std::function<std::complex<long double>(std::complex<long double>)>& F, double t, int M = 24)
{
    using C = std::complex<long double>;
    const long double pi = std::numbers::pi_v<long double>;
    const long double r = 2.0L * M / (5.0L * t);
    long double sum = 0.5L * (F(C(r, 0.0L)) * std::exp(r * t)).real();
    for (int k = 1; k < M; ++k) {
        const long double th = k * pi / M;
        const long double cot = std::cos(th) / std::sin(th);
        const C s = r * th * C(cot, 1.0L);
        const long double sig = th + (th * cot - 1.0L) * cot;
        sum += (std::exp(s * static_cast<long double>(t)) * F(s) * C(1.0L, sig)).real();
    }
    return static_cast<double>(r / M * sum);
}

/// x'' + wb2 x + int_0^t K(t-s) x(s) ds = 0 with x(0) = 0, x'(0) = 1, stepped by
/// Stoermer-Verlet with a trapezoidal memory integral and one Richardson step.
/// Returns x on the grid t_n = n * dt_out, n = 0..n_out.
inline std::vector<double> volterra_d2(double wb2, const std::function<double(double)>& K, double t_end, double dt_out,
                                       int substeps = 40)
{
    const auto run = [&](int sub) {
        const double dt = dt_out / sub;
        const int n = static_cast<int>(std::lround(t_end / dt));
        std::vector<double> kern(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) kern[static_cast<std::size_t>(i)] = K(i * dt);
        std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
        const auto accel = [&](int i) {
            double mem = 0.0;
            for (int j = 0; j <= i; ++j) {
                const double w = (j == 0 || j == i) ? 0.5 : 1.0;
                mem += w * kern[static_cast<std::size_t>(i - j)] * x[static_cast<std::size_t>(j)];
            }
            return -wb2 * x[static_cast<std::size_t>(i)] - dt * mem;
        };
        // x(dt) from the Taylor series: x'' (0) = 0, x'''(0) = -wb2
        x[1] = dt - wb2 * dt * dt * dt / 6.0;
        for (int i = 1; i < n; ++i)
            x[static_cast<std::size_t>(i + 1)] = 2.0 * x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - 1)] +
                                                 dt * dt * accel(i);
        std::vector<double> out;
        for (int i = 0; i <= n; i += sub) out.push_back(x[static_cast<std::size_t>(i)]);
        return out;
    };
    const auto coarse = run(substeps);
    const auto fine = run(2 * substeps);
    std::vector<double> out(coarse.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

/// m e^2 G_H(tau) / m^2 -> the symmetric noise correlation seen by a unit-mass
/// response: (m/pi) int_0^inf coth(beta k/2) 2 gamma k P(k) cos(k tau) dk,
/// double-Lorentzian cutoff.  Tabulated on [0, tau_max] and spline-interpolated.
class NoiseCorrelation {
public:
    NoiseCorrelation(double gamma, double lambda, double beta, double mass, double tau_max, int n = 4001)
        : step_(tau_max / (n - 1))
    {
        const auto w = [=](double k) {
            const double x = 0.5 * beta * k;
            const double kcoth = x < 1e-8 ? 2.0 / beta : k / std::tanh(x);
            const double p = lambda * lambda / (lambda * lambda + k * k);
            return 2.0 * gamma * kcoth * p * p;
        };
        boost::math::quadrature::exp_sinh<double> half_line;
        boost::math::quadrature::ooura_fourier_cos<double> fourier;
        std::vector<double> v(static_cast<std::size_t>(n));
        v[0] = mass / std::numbers::pi * half_line.integrate(w, 1e-13);
        for (int i = 1; i < n; ++i)
            v[static_cast<std::size_t>(i)] = mass / std::numbers::pi * fourier.integrate(w, i * step_).first;
        spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(v.begin(), v.end(), 0.0, step_);
    }

    double operator()(double tau) const { return spline_(std::abs(tau)); }

private:
    double step_;
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

/// int_0^t int_0^t f(u) g(u') C(u - u') du du' by nested adaptive Gauss-Kronrod,
/// splitting the inner integral at the diagonal.
inline double double_integral(const std::function<double(double)>& f, const std::function<double(double)>& g,
                              const NoiseCorrelation& corr, double t)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto inner = [&](double u) {
        const auto h = [&](double v) { return g(v) * corr(u - v); };
        double a = 0.0, b = 0.0;
        if (u > 0.0) a = GK::integrate(h, 0.0, u, 12, 1e-10);
        if (u < t) b = GK::integrate(h, u, t, 12, 1e-10);
        return f(u) * (a + b);
    };
    return GK::integrate(inner, 0.0, t, 12, 1e-9);
}

} // namespace oracle
