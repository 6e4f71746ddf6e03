#pragma once

// Frequency-domain evaluation of bath-induced (noise) covariances.
//
// The double time integral
//     int_0^t ds int_0^t ds' f(t-s) g(t-s') G_H(s-s')
// collapses, with the closed-form window W_f(kappa) = int_0^t f(u) e^{i kappa u} du,
// to a single non-negative-frequency integral
//     (1/pi) int_0^inf dkappa coth(beta kappa/2) nu(kappa) Re[W_f W_g^*].

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qbm/bath_kernels.hpp"
#include "qbm/errors.hpp"
#include "qbm/propagator.hpp"

namespace qbm {

struct QuadratureReport {
    double value{0.0};        // for vector integrals: largest |component|
    double abs_error{0.0};    // largest per-component error estimate
    long evaluations{0};
    double kappa_max{0.0};    // +inf when the tail was mapped onto a finite interval
    int panels{0};
    bool converged{false};
    bool tail_bounded{true};  // false when kappa_max was a hard cap (Markovian momentum tails)
};

class QuadratureError : public NumericError {
public:
    QuadratureError(const std::string& what, QuadratureReport report)
        : NumericError(what), report_(report) {}
    [[nodiscard]] const QuadratureReport& report() const { return report_; }

private:
    QuadratureReport report_;
};

/// sum_k R_k z_k^order (e^{(z_k + i kappa) t} - 1)/(z_k + i kappa)
///     = int_0^t f^{(order)}(u) e^{i kappa u} du
std::complex<double> window(const PoleResidueForm& f, double t, double kappa, int order);
/// t -> infinity limit: -sum_k R_k z_k^order/(z_k + i kappa)
std::complex<double> stationary_window(const PoleResidueForm& f, double kappa, int order);

struct QuadratureOptions {
    double rel_tol{1e-7};
    int max_panels{4000};
};

/// Result of a vector-valued adaptive integration.
struct VectorIntegral {
    Eigen::VectorXd value;
    Eigen::VectorXd error;
    long evaluations{0};
    int panels{0};
    bool converged{false};
};

using VectorIntegrand = std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>;

/// Globally adaptive 7/15-point Gauss-Kronrod over [breakpoints.front(), breakpoints.back()]
/// with the given interior panel boundaries.  Converges when every component's error
/// estimate is below rel_tol * max(|I_c|, max_c |I_c|) + abs_floor.  The refinement
/// order and the final summation order depend only on the panel geometry.
VectorIntegral integrate_panels(const VectorIntegrand& f, int dim, std::vector<double> breakpoints,
                                double rel_tol, double abs_floor = 0.0, int max_panels = 4000);

/// One noise-driven linear response: order 0 is a position (d2/m), order 1 a
/// momentum (d2').
struct Response {
    const PoleResidueForm* source{nullptr};
    int order{0};
};

/// Symmetric matrix of induced moments of the given responses driven by one bath,
/// element (a,b) = (1/pi) int_0^inf coth(beta k/2) m nu(k) s_a s_b Re[W_a W_b^*]
/// with s = 1/m for positions and 1 for momenta.  t = +inf gives the steady state.
/// Throws QuadratureError when the tolerance is not met.
Eigen::MatrixXd induced_block(const BathSpec& bath, std::span<const Response> responses, double t, double mass,
                              const QuadratureOptions& opts, QuadratureReport* report = nullptr);

/// Scalar convenience wrapper around induced_block for a single pair.
double induced_moment(const BathSpec& bath, Response a, Response b, double t, double mass,
                      const QuadratureOptions& opts, QuadratureReport* report = nullptr);

enum class SteadyElement { PositionPosition, PositionMomentum, MomentumMomentum };

/// Late-time moments of a single mode from the closed-form dbar2(kappa) = d2~(-i kappa):
///   <x^2>  = (1/m) int dk/2pi coth(beta k/2) Im dbar2(k)
///   <p^2>  = m int dk/2pi k^2 coth(beta k/2) Im dbar2(k)
///   <{x,p}>/2 = 0
double steady_fdr_integral(const ModeSpec& mode, SteadyElement element, const QuadratureOptions& opts = {},
                           QuadratureReport* report = nullptr);

/// Hard kappa cap used where no analytic tail bound exists: 50 max(lambda, omega).
double default_kappa_cap(const BathSpec& bath, double omega_ref);

} // namespace qbm
