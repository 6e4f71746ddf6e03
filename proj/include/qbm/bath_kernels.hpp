#pragma once

// Spectral data of one private Ohmic bath.
//
// Units: hbar = k_B = 1, all quantities measured in the physical oscillator
// frequency.  Fourier convention: f(tau) = int dkappa/2pi fbar(kappa) e^{-i kappa tau}.
// The microscopic coupling e is eliminated via gamma = e^2 / (8 pi m).

#include <complex>
#include <string_view>

namespace qbm {

enum class CutoffForm { Lorentzian, DoubleLorentzian, MarkovianLimit };

std::string_view to_string(CutoffForm form);
CutoffForm cutoff_form_from_string(std::string_view name);

struct BathSpec {
    double gamma{0.5};   // damping constant
    double lambda{1.0};  // cutoff scale; inverse memory time
    double beta{10.0};   // inverse temperature
    CutoffForm form{CutoffForm::DoubleLorentzian};

    /// Throws DomainError unless gamma, lambda, beta are all positive.
    void validate() const;

    friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

/// Laplace-domain kernel Gamma~(z).
std::complex<double> gamma_tilde(const BathSpec& bath, std::complex<double> z);

/// 8 pi gamma z Gamma~(z): the self-energy added to z^2 + omega^2.
std::complex<double> self_energy(const BathSpec& bath, std::complex<double> z);

/// Time-domain kernel Gamma(tau), tau >= 0.  For MarkovianLimit the kernel is
/// a delta function; the value returned is zero for tau > 0 and the delta
/// weight is carried separately by the dynamics.
double memory_kernel(const BathSpec& bath, double tau);

/// Gamma(0+) including the 8 pi gamma prefactor, i.e. the static frequency
/// shift omega_b^2 - omega_p^2.  Zero-width (infinite) for MarkovianLimit is
/// reported as +inf.
double frequency_shift(const BathSpec& bath);

/// Spectral cutoff function P(kappa); tends to 1 as lambda -> infinity.
double cutoff_factor(const BathSpec& bath, double kappa);

/// nu(kappa) = (e^2/m) Im Gbar_R(kappa) = 8 pi gamma kappa Re Gamma~(-i kappa).
/// Odd in kappa.
double noise_spectral_weight(const BathSpec& bath, double kappa);

/// coth(beta kappa / 2) with overflow-safe branches.
double coth_half(double beta, double kappa);

/// coth(beta kappa / 2) nu(kappa); even in kappa, finite at kappa = 0.
double hadamard_weight(const BathSpec& bath, double kappa);

} // namespace qbm
