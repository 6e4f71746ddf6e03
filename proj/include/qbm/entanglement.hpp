#pragma once

// Two-mode Gaussian entanglement: Sp(2,R) x Sp(2,R) invariants, symplectic
// spectra of sigma and of its partial transpose, logarithmic negativity and
// detection of entanglement death / revival along a time series.

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qbm/covariance.hpp"

namespace qbm {

struct SymplecticInvariants {
    double I1{0.0};  // det A
    double I2{0.0};  // det B
    double I3{0.0};  // det C
    double I4{0.0};  // Tr(A J C J B J C^T J)
    double delta{0.0};
    double delta_pt{0.0};
    double det{0.0};
};

/// Invariants of the bipartition given by the matrix's own ordering: rows 0-1
/// against rows 2-3, whatever the basis tag says.
SymplecticInvariants partition_invariants(const Eigen::Matrix4d& m);

/// Invariants of the oscillator 1 | oscillator 2 bipartition (normal-mode input
/// is rotated back first).
SymplecticInvariants invariants(const CovarianceMatrix& cov);

/// (lambda_-, lambda_+).  Computed from the singular values of L^T Omega L with
/// sigma = L L^T; the Delta/det root formula is the fallback when sigma is not
/// positive definite.
std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& cov);
/// |eigenvalues| of i Omega sigma, sorted; an independent route to the same spectrum.
std::pair<double, double> symplectic_eigenvalues_direct(const Eigen::Matrix4d& m);

/// Symplectic eigenvalues of sigma^pt = P sigma P, P = diag(1, 1, 1, -1), for the
/// oscillator bipartition.  Normal-mode input that is block diagonal is handled
/// without rotating back, using
///   Delta^pt = s_{x+x+} s_{p-p-} + s_{x-x-} s_{p+p+} - 2 s_{x+p+} s_{x-p-}
///   det      = det(sigma_+) det(sigma_-).
std::pair<double, double> pt_symplectic_eigenvalues(const CovarianceMatrix& cov);
/// Same, for the bipartition implied by the matrix ordering.
std::pair<double, double> partition_pt_symplectic_eigenvalues(const Eigen::Matrix4d& m);

/// max(0, -ln(2 lambda_-^pt))
double log_negativity(const CovarianceMatrix& cov);

/// I1 I2 + (1/4 + I3)^2 - I4 - (I1 + I2)/4: non-negative exactly for separable
/// two-mode Gaussian states.
double separability_margin(const SymplecticInvariants& inv);

/// Minimal two-mode squeezing that entangles a thermal pair: (1/2) ln coth(beta w/2).
double squeeze_threshold(double beta, double omega);

enum class EventKind { Death, Revival };

struct EntanglementEvent {
    EventKind kind{EventKind::Death};
    double time{0.0};
};

struct EntanglementTimeline {
    std::vector<double> times;
    std::vector<double> lambda_minus_pt;
    std::vector<double> log_negativity;
    std::vector<EntanglementEvent> events;
    std::optional<double> tau_ent;  // first death, when the series starts entangled
};

/// Optional re-evaluation of lambda_-^pt at an arbitrary time, used to refine
/// crossings on a 10x denser local grid.
using LambdaProbe = std::function<double(double)>;

EntanglementTimeline extract_events(const std::vector<double>& times, const std::vector<double>& lambda_minus_pt,
                                    const LambdaProbe& probe = {});
EntanglementTimeline extract_events(const CovarianceSeries& series, const LambdaProbe& probe = {});

} // namespace qbm
