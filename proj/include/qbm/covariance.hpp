#pragma once

// Second moments of (chi1, p1, chi2, p2): initial two-mode squeezed thermal
// states, exact time evolution (intrinsic + noise-induced parts) and the late-time
// state.

#include <Eigen/Core>
#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qbm/propagator.hpp"
#include "qbm/spectral_quadrature.hpp"

namespace qbm {

enum class Basis { Canonical, NormalMode };

/// 4x4 symmetric moment matrix.  Canonical ordering is (chi1, p1, chi2, p2),
/// normal-mode ordering is (chi+, p+, chi-, p-).
struct CovarianceMatrix {
    Eigen::Matrix4d m{Eigen::Matrix4d::Zero()};
    Basis basis{Basis::Canonical};
};

struct TwoModeSqueezedThermal {
    double eta{1.0};
    double theta{0.0};
    double nbar1{0.0};
    double nbar2{0.0};
    double mass{1.0};
    double omega{1.0};

    void validate() const;
};

/// U2 = (1/sqrt 2)[[I, I], [I, -I]] in 2x2 blocks; symplectic, symmetric and its own inverse.
const Eigen::Matrix4d& normal_mode_rotation();
CovarianceMatrix to_normal_modes(const CovarianceMatrix& c);
CovarianceMatrix to_canonical(const CovarianceMatrix& c);

CovarianceMatrix initial_covariance(const TwoModeSqueezedThermal& state);

/// Squeezed vacuum written directly in normal-mode form:
/// diag(e^{-2eta}/(2 m w), m w e^{2eta}/2, e^{2eta}/(2 m w), m w e^{-2eta}/2).
/// Under U2 this is initial_covariance with theta = 0 and nbar = 0.
CovarianceMatrix normal_mode_initial(double eta, double mass, double omega);

struct EvolutionConfig {
    double t_max{30.0};
    int n_t{600};
    QuadratureOptions quadrature{};
    int workers{0};  // 0: QBM_WORKERS or the hardware concurrency

    void validate() const;
    [[nodiscard]] std::vector<double> grid() const;
};

struct CovarianceSeries {
    std::vector<double> times;
    std::vector<CovarianceMatrix> values;
};

/// Number of worker threads for time sweeps: QBM_WORKERS when set and positive,
/// otherwise the hardware concurrency (at least 1).
int default_workers();

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads.  Results are
/// written by index, so the outcome does not depend on scheduling.  The first
/// exception thrown by any task is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

/// Linear map of a Gaussian state over [0, t]: sigma(t) = T sigma(0) T^T + N(t).
/// Both T and N are reported in the canonical basis.
struct Propagation {
    Eigen::Matrix4d transfer{Eigen::Matrix4d::Identity()};
    Eigen::Matrix4d induced{Eigen::Matrix4d::Zero()};

    [[nodiscard]] CovarianceMatrix apply(const CovarianceMatrix& initial) const;
};

/// Exact evolution of the coupled pair.  The route decides how the dynamics is
/// decomposed:
///   NormalMode  - symmetric systems, per-mode scalar propagators and per-mode noise
///   General     - any stable system, full 2x2 propagator matrices, noise per bath
///   EffectiveMarkovian - symmetric systems, each normal mode replaced by an Ohmic
///                 Markovian oscillator damped at its effective rate gamma_eff
class CovarianceEvolver {
public:
    enum class Route { NormalMode, General, EffectiveMarkovian };

    CovarianceEvolver(const SystemSpec& sys, Route route, QuadratureOptions quad = {});

    [[nodiscard]] Propagation propagation(double t) const;
    [[nodiscard]] std::vector<Propagation> propagation(const std::vector<double>& times, int workers = 0) const;
    /// Late-time state (independent of the initial state), canonical basis.
    [[nodiscard]] CovarianceMatrix steady_state() const;

    [[nodiscard]] Route route() const { return route_; }
    [[nodiscard]] const SystemSpec& system() const { return sys_; }
    /// Normal-mode problems (NormalMode / EffectiveMarkovian routes only).
    [[nodiscard]] const ModeSpec& mode(NormalMode which) const;

private:
    [[nodiscard]] Eigen::Matrix4d transfer_normal_modes(double t) const;
    [[nodiscard]] Eigen::Matrix4d induced_normal_modes(double t) const;

    SystemSpec sys_;
    Route route_;
    QuadratureOptions quad_;
    std::array<ModeSpec, 2> modes_{};
    std::array<ModeSolutions, 2> solutions_{};
    std::optional<FundamentalSolutionSet> full_;
};

CovarianceSeries evolve(const CovarianceEvolver& evolver, const CovarianceMatrix& initial, const EvolutionConfig& cfg);

CovarianceSeries evolve_symmetric(const SystemSpec& sys, const CovarianceMatrix& initial, const EvolutionConfig& cfg);
CovarianceSeries evolve_general(const SystemSpec& sys, const CovarianceMatrix& initial, const EvolutionConfig& cfg);
CovarianceSeries evolve_effective_markovian(const SystemSpec& sys, const CovarianceMatrix& initial,
                                            const EvolutionConfig& cfg);

/// Late-time covariance.  Symmetric systems use the closed-form per-mode
/// integrals; asymmetric systems use the stationary propagator entries per bath.
CovarianceMatrix steady_state(const SystemSpec& sys, const QuadratureOptions& quad = {});

/// Robertson-Schroedinger combinations of the normal modes:
/// I_pm = s_xx s_pp - s_xp^2 - 1/4 for the + and - modes.
std::pair<double, double> uncertainty_functions(const CovarianceMatrix& c);

/// The Markovian stand-in for one normal mode: same frequency and mass, Ohmic
/// bath damped at gamma_eff of that mode (same temperature and cutoff scale,
/// the latter only bounding the momentum noise integral).
ModeSpec effective_markovian_mode(const ModeSpec& mode);

} // namespace qbm
