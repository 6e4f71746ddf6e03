#pragma once

// Exact Laplace-domain propagators of the coupled oscillators and their
// inverse transforms as finite exponential sums.
//
// With rational bath kernels, D2~(z)^{-1} = z^2 + Omega_p^2 + 8 pi gamma z Gamma~(z)
// clears to a polynomial matrix; every propagator entry is N(z)/P(z) with a
// common characteristic polynomial P, so the time-domain solution is
// sum_k R_k exp(z_k t) with R_k = N(z_k)/P'(z_k).

#include <Eigen/Core>
#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "qbm/bath_kernels.hpp"
#include "qbm/polynomial.hpp"

namespace qbm {

struct SystemSpec {
    double mass{1.0};
    double omega1{1.0};  // physical frequency of oscillator 1
    double omega2{1.0};  // physical frequency of oscillator 2
    double sigma{0.2};   // inter-oscillator coupling
    BathSpec bath1{};
    BathSpec bath2{};

    /// Throws DomainError when a parameter violates its invariant; the message
    /// names the violated condition.
    void validate() const;
    /// Equal frequencies and identical baths on both sides.
    [[nodiscard]] bool is_symmetric() const;
};

/// One normal mode (or a single oscillator): frequency^2, mass and its bath.
struct ModeSpec {
    double omega_sq{1.0};
    double mass{1.0};
    BathSpec bath{};
};

enum class NormalMode { Plus, Minus };

struct RationalTransfer {
    Polynomial numerator;
    Polynomial denominator;

    [[nodiscard]] std::complex<double> operator()(std::complex<double> z) const
    {
        return numerator(z) / denominator(z);
    }
};

/// f(t) = sum_k R_k exp(z_k t): exact inverse Laplace transform of a strictly
/// proper rational function.  Immutable after construction.
class PoleResidueForm {
public:
    PoleResidueForm() = default;
    PoleResidueForm(std::vector<std::complex<double>> poles, std::vector<std::complex<double>> residues,
                    bool perturbed = false);

    [[nodiscard]] const std::vector<std::complex<double>>& poles() const { return poles_; }
    [[nodiscard]] const std::vector<std::complex<double>>& residues() const { return residues_; }
    /// True when the denominator was nudged to split a multiple pole.
    [[nodiscard]] bool perturbed() const { return perturbed_; }
    [[nodiscard]] bool empty() const { return poles_.empty(); }

    /// sum_k R_k z_k^order e^{z_k t}; order 0 or 1.  Throws NumericError when the
    /// imaginary part is not negligible.
    [[nodiscard]] double value(double t, int order = 0) const;
    /// sum_k R_k z_k^order / (z - z_k), the Laplace transform of the order-th derivative
    /// minus its boundary terms.
    [[nodiscard]] std::complex<double> laplace(std::complex<double> z) const;
    /// sum_k |R_k z_k^order|
    [[nodiscard]] double residue_mass(int order) const;

private:
    std::vector<std::complex<double>> poles_;
    std::vector<std::complex<double>> residues_;
    bool perturbed_{false};
};

Polynomial characteristic_polynomial(const SystemSpec& sys);
Polynomial characteristic_polynomial(const ModeSpec& mode);

/// Numerator P and denominator Q of z^2 + omega^2 + 8 pi gamma z Gamma~(z) = P/Q.
std::pair<Polynomial, Polynomial> oscillator_rational(double omega_sq, const BathSpec& bath);

/// Residues at the given poles of rt.  Poles that are not simple are handled by
/// perturbing the constant coefficient of the denominator by 1e-10 relative and
/// recomputing the poles (with a warning on stderr); with allow_perturbation = false
/// a multiple pole throws DomainError instead.
PoleResidueForm pole_residue(const RationalTransfer& rt, const std::vector<std::complex<double>>& poles,
                             bool allow_perturbation = true);
PoleResidueForm pole_residue(const RationalTransfer& rt, bool allow_perturbation = true);

double eval_solution(const PoleResidueForm& f, double t, int derivative_order = 0);

/// d1, d2 of a single mode: d1(0)=1, d1'(0)=0, d2(0)=0, d2'(0)=1.
struct ModeSolutions {
    PoleResidueForm d1;
    PoleResidueForm d2;
};

ModeSolutions mode_solutions(const ModeSpec& mode);

/// Entries of D1(t) and D2(t) for the coupled pair, row-major (11, 12, 21, 22).
class FundamentalSolutionSet {
public:
    explicit FundamentalSolutionSet(const SystemSpec& sys);

    [[nodiscard]] const PoleResidueForm& d1(int i, int j) const { return d1_[index(i, j)]; }
    [[nodiscard]] const PoleResidueForm& d2(int i, int j) const { return d2_[index(i, j)]; }

    [[nodiscard]] Eigen::Matrix2d D1(double t, int order = 0) const;
    [[nodiscard]] Eigen::Matrix2d D2(double t, int order = 0) const;
    [[nodiscard]] const Polynomial& characteristic() const { return characteristic_; }

private:
    static std::size_t index(int i, int j) { return static_cast<std::size_t>(2 * i + j); }
    Polynomial characteristic_;
    std::array<PoleResidueForm, 4> d1_;
    std::array<PoleResidueForm, 4> d2_;
};

/// omega_+^2 = omega^2 + sigma, omega_-^2 = omega^2 - sigma for a symmetric system.
std::pair<ModeSpec, ModeSpec> normal_mode_split(const SystemSpec& sys);

struct EffectiveDamping {
    double gamma_eff{0.0};
    bool underdamped{true};            // false: no complex pair, gamma_eff is the slowest real rate
    std::complex<double> dominant_pole{};
    double series{0.0};                // two-term small-gamma expansion, for cross-checks
};

/// gamma_eff = -Re z of the complex pole pair with the largest real part.
EffectiveDamping effective_damping(const ModeSpec& mode);
EffectiveDamping effective_damping(const SystemSpec& sys, NormalMode which);

/// gamma [ L^4/(L^2+w^2)^2 + gamma L^5 (3L^4 - 7L^2 w^2 - 2 w^4)/(L^2+w^2)^5 ]
double effective_damping_series(double gamma, double lambda, double omega);

} // namespace qbm
