#include "qbm/bath_kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view to_string(CutoffForm form)
{
    switch (form) {
    case CutoffForm::Lorentzian: return "lorentzian";
    case CutoffForm::DoubleLorentzian: return "double_lorentzian";
    case CutoffForm::MarkovianLimit: return "markovian";
    }
    return "unknown";
}

CutoffForm cutoff_form_from_string(std::string_view name)
{
    if (name == "lorentzian") return CutoffForm::Lorentzian;
    if (name == "double_lorentzian") return CutoffForm::DoubleLorentzian;
    if (name == "markovian") return CutoffForm::MarkovianLimit;
    throw DomainError("unknown cutoff form '" + std::string(name) +
                      "' (expected lorentzian, double_lorentzian or markovian)");
}

void BathSpec::validate() const
{
    if (!(gamma > 0.0)) throw DomainError("gamma > 0 violated");
    if (!(lambda > 0.0)) throw DomainError("lambda > 0 violated");
    if (!(beta > 0.0)) throw DomainError("beta > 0 violated");
}

std::complex<double> gamma_tilde(const BathSpec& bath, std::complex<double> z)
{
    const double L = bath.lambda;
    switch (bath.form) {
    case CutoffForm::MarkovianLimit:
        return 1.0 / (4.0 * kPi);
    case CutoffForm::Lorentzian:
        if (z == std::complex<double>(-L, 0.0)) throw DomainError("gamma_tilde: z is the pole -lambda");
        return L / (4.0 * kPi * (L + z));
    case CutoffForm::DoubleLorentzian:
        if (z == std::complex<double>(-L, 0.0)) throw DomainError("gamma_tilde: z is the pole -lambda");
        return L * (2.0 * L + z) / (8.0 * kPi * (L + z) * (L + z));
    }
    return 0.0;
}

std::complex<double> self_energy(const BathSpec& bath, std::complex<double> z)
{
    return 8.0 * kPi * bath.gamma * z * gamma_tilde(bath, z);
}

double memory_kernel(const BathSpec& bath, double tau)
{
    if (tau < 0.0) throw DomainError("memory_kernel: tau must be non-negative");
    const double L = bath.lambda;
    switch (bath.form) {
    case CutoffForm::MarkovianLimit:
        return 0.0;
    case CutoffForm::Lorentzian:
        return L / (4.0 * kPi) * std::exp(-L * tau);
    case CutoffForm::DoubleLorentzian:
        return L / (8.0 * kPi) * (1.0 + L * tau) * std::exp(-L * tau);
    }
    return 0.0;
}

double frequency_shift(const BathSpec& bath)
{
    if (bath.form == CutoffForm::MarkovianLimit) return std::numeric_limits<double>::infinity();
    return 8.0 * kPi * bath.gamma * memory_kernel(bath, 0.0);
}

double cutoff_factor(const BathSpec& bath, double kappa)
{
    const double L2 = bath.lambda * bath.lambda;
    switch (bath.form) {
    case CutoffForm::MarkovianLimit: return 1.0;
    case CutoffForm::Lorentzian: return L2 / (L2 + kappa * kappa);
    case CutoffForm::DoubleLorentzian: {
        const double r = L2 / (L2 + kappa * kappa);
        return r * r;
    }
    }
    return 0.0;
}

double noise_spectral_weight(const BathSpec& bath, double kappa)
{
    return 2.0 * bath.gamma * kappa * cutoff_factor(bath, kappa);
}

double coth_half(double beta, double kappa)
{
    const double x = 0.5 * beta * kappa;
    const double ax = std::abs(x);
    if (ax > 20.0) return x > 0 ? 1.0 : -1.0;
    if (ax < 5e-7) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

double hadamard_weight(const BathSpec& bath, double kappa)
{
    const double k = std::abs(kappa);
    const double x = 0.5 * bath.beta * k;
    // kappa * coth(beta kappa/2), removable singularity at zero
    const double k_coth = x < 5e-7 ? 2.0 / bath.beta + bath.beta * k * k / 6.0 : k * coth_half(bath.beta, k);
    return 2.0 * bath.gamma * k_coth * cutoff_factor(bath, k);
}

} // namespace qbm
