#include "qbm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm {

using cplx = std::complex<double>;

void SystemSpec::validate() const
{
    if (!(mass > 0.0)) throw DomainError("mass > 0 violated");
    if (!(omega1 > 0.0)) throw DomainError("omega1 > 0 violated");
    if (!(omega2 > 0.0)) throw DomainError("omega2 > 0 violated");
    if (!(std::abs(sigma) < omega1 * omega2))
        throw DomainError("static instability: |sigma| >= omega1*omega2 (ω₋²≤0)");
    bath1.validate();
    bath2.validate();
}

bool SystemSpec::is_symmetric() const { return omega1 == omega2 && bath1 == bath2; }

PoleResidueForm::PoleResidueForm(std::vector<cplx> poles, std::vector<cplx> residues, bool perturbed)
    : poles_(std::move(poles)), residues_(std::move(residues)), perturbed_(perturbed)
{
    if (poles_.size() != residues_.size()) throw DomainError("PoleResidueForm: poles/residues size mismatch");
}

double PoleResidueForm::value(double t, int order) const
{
    cplx sum = 0.0;
    double mag = 0.0;
    for (std::size_t k = 0; k < poles_.size(); ++k) {
        cplx term = residues_[k] * std::exp(poles_[k] * t);
        if (order == 1) term *= poles_[k];
        else if (order == 2) term *= poles_[k] * poles_[k];
        sum += term;
        mag += std::abs(term);
    }
    if (std::abs(sum.imag()) > 1e-10 * std::abs(sum.real()) + 1e-12 * std::max(1.0, mag)) {
        std::ostringstream os;
        os << "PoleResidueForm::value: non-negligible imaginary part " << sum.imag() << " at t=" << t;
        throw NumericError(os.str());
    }
    return sum.real();
}

cplx PoleResidueForm::laplace(cplx z) const
{
    cplx sum = 0.0;
    for (std::size_t k = 0; k < poles_.size(); ++k) sum += residues_[k] / (z - poles_[k]);
    return sum;
}

double PoleResidueForm::residue_mass(int order) const
{
    double m = 0.0;
    for (std::size_t k = 0; k < poles_.size(); ++k) m += std::abs(residues_[k] * std::pow(poles_[k], order));
    return m;
}

double eval_solution(const PoleResidueForm& f, double t, int derivative_order)
{
    if (t < 0.0) throw DomainError("eval_solution: t must be non-negative");
    return f.value(t, derivative_order);
}

std::pair<Polynomial, Polynomial> oscillator_rational(double omega_sq, const BathSpec& bath)
{
    const double L = bath.lambda;
    const double g = bath.gamma;
    const Polynomial free_part{omega_sq, 0.0, 1.0};
    switch (bath.form) {
    case CutoffForm::MarkovianLimit:
        return {Polynomial{omega_sq, 2.0 * g, 1.0}, Polynomial{1.0}};
    case CutoffForm::Lorentzian: {
        const Polynomial q{L, 1.0};
        return {free_part * q + Polynomial{0.0, 2.0 * g * L}, q};
    }
    case CutoffForm::DoubleLorentzian: {
        const Polynomial q{L * L, 2.0 * L, 1.0};
        return {free_part * q + Polynomial{0.0, 2.0 * g * L * L, g * L}, q};
    }
    }
    throw DomainError("oscillator_rational: unknown cutoff form");
}

Polynomial characteristic_polynomial(const ModeSpec& mode)
{
    return oscillator_rational(mode.omega_sq, mode.bath).first;
}

Polynomial characteristic_polynomial(const SystemSpec& sys)
{
    const auto [p1, q1] = oscillator_rational(sys.omega1 * sys.omega1, sys.bath1);
    const auto [p2, q2] = oscillator_rational(sys.omega2 * sys.omega2, sys.bath2);
    return p1 * p2 - (sys.sigma * sys.sigma) * (q1 * q2);
}

namespace {

bool has_multiple_pole(const Polynomial& den, const std::vector<cplx>& poles)
{
    const Polynomial dd = den.derivative();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t j = i + 1; j < poles.size(); ++j)
            if (std::abs(poles[i] - poles[j]) <= 1e-9 * std::max(1.0, std::abs(poles[i]))) return true;
        if (std::abs(dd(poles[i])) <= 1e-9 * dd.magnitude_at(poles[i])) return true;
    }
    return false;
}

PoleResidueForm residues_at(const RationalTransfer& rt, const Polynomial& den, const std::vector<cplx>& poles,
                            bool perturbed)
{
    const Polynomial dd = den.derivative();
    std::vector<cplx> res(poles.size());
    for (std::size_t k = 0; k < poles.size(); ++k) {
        res[k] = rt.numerator(poles[k]) / dd(poles[k]);
        if (poles[k].imag() == 0.0) res[k] = res[k].real();
    }
    // conjugate poles carry conjugate residues
    for (std::size_t k = 0; k < poles.size(); ++k) {
        if (poles[k].imag() <= 0.0) continue;
        for (std::size_t j = 0; j < poles.size(); ++j) {
            if (poles[j] == std::conj(poles[k])) {
                const cplx avg = 0.5 * (res[k] + std::conj(res[j]));
                res[k] = avg;
                res[j] = std::conj(avg);
                break;
            }
        }
    }
    return PoleResidueForm(poles, std::move(res), perturbed);
}

} // namespace

PoleResidueForm pole_residue(const RationalTransfer& rt, const std::vector<cplx>& poles, bool allow_perturbation)
{
    if (rt.numerator.degree() >= rt.denominator.degree() && !rt.numerator.coefficients().empty())
        throw DomainError("pole_residue: transfer function is not strictly proper");
    if (rt.numerator.coefficients().empty()) return PoleResidueForm{};
    if (!has_multiple_pole(rt.denominator, poles)) return residues_at(rt, rt.denominator, poles, false);

    if (!allow_perturbation) throw DomainError("pole_residue: multiple pole and perturbation disabled");
    std::vector<double> c = rt.denominator.coefficients();
    double cmax = 0.0;
    for (double x : c) cmax = std::max(cmax, std::abs(x));
    if (c[0] != 0.0) c[0] *= 1.0 + 1e-10;
    else c[0] = 1e-10 * cmax;
    const Polynomial nudged(std::move(c));
    const auto new_poles = find_poles(nudged);
    if (has_multiple_pole(nudged, new_poles)) throw NumericError("pole_residue: perturbation did not split a multiple pole");
    std::cerr << "warning: multiple pole detected; denominator perturbed by 1e-10 relative\n";
    return residues_at(RationalTransfer{rt.numerator, nudged}, nudged, new_poles, true);
}

PoleResidueForm pole_residue(const RationalTransfer& rt, bool allow_perturbation)
{
    return pole_residue(rt, find_poles(rt.denominator), allow_perturbation);
}

ModeSolutions mode_solutions(const ModeSpec& mode)
{
    const auto [p, q] = oscillator_rational(mode.omega_sq, mode.bath);
    const auto poles = find_poles(p);
    for (auto z : poles)
        if (!(z.real() < 0.0)) throw DomainError("mode_solutions: unstable mode (pole with Re z >= 0)");
    const Polynomial z1{0.0, 1.0};
    return {pole_residue(RationalTransfer{z1 * q, p}, poles), pole_residue(RationalTransfer{q, p}, poles)};
}

FundamentalSolutionSet::FundamentalSolutionSet(const SystemSpec& sys)
{
    sys.validate();
    const auto [p1, q1] = oscillator_rational(sys.omega1 * sys.omega1, sys.bath1);
    const auto [p2, q2] = oscillator_rational(sys.omega2 * sys.omega2, sys.bath2);
    characteristic_ = p1 * p2 - (sys.sigma * sys.sigma) * (q1 * q2);
    const Polynomial z1{0.0, 1.0};

    if (sys.sigma == 0.0) {
        // decoupled: avoid the artificial double poles of P1 P2 when P1 == P2
        const ModeSolutions s1 = mode_solutions({sys.omega1 * sys.omega1, sys.mass, sys.bath1});
        const ModeSolutions s2 = mode_solutions({sys.omega2 * sys.omega2, sys.mass, sys.bath2});
        d1_ = {s1.d1, PoleResidueForm{}, PoleResidueForm{}, s2.d1};
        d2_ = {s1.d2, PoleResidueForm{}, PoleResidueForm{}, s2.d2};
        return;
    }

    const auto poles = find_poles(characteristic_);
    for (auto z : poles)
        if (!(z.real() < 0.0)) throw DomainError("FundamentalSolutionSet: unstable system (pole with Re z >= 0)");

    const Polynomial n11 = p2 * q1;
    const Polynomial n22 = p1 * q2;
    const Polynomial n12 = (-sys.sigma) * (q1 * q2);
    const auto make = [&](const Polynomial& num) { return pole_residue(RationalTransfer{num, characteristic_}, poles); };
    const PoleResidueForm e12 = make(n12);
    d2_ = {make(n11), e12, e12, make(n22)};
    const PoleResidueForm f12 = make(z1 * n12);
    d1_ = {make(z1 * n11), f12, f12, make(z1 * n22)};
}

Eigen::Matrix2d FundamentalSolutionSet::D1(double t, int order) const
{
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = d1(i, j).value(t, order);
    return m;
}

Eigen::Matrix2d FundamentalSolutionSet::D2(double t, int order) const
{
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = d2(i, j).value(t, order);
    return m;
}

std::pair<ModeSpec, ModeSpec> normal_mode_split(const SystemSpec& sys)
{
    if (!sys.is_symmetric())
        throw DomainError("normal_mode_split: asymmetric configuration; the normal-mode transformation is "
                          "non-local in time");
    const double w2 = sys.omega1 * sys.omega1;
    if (!(w2 - std::abs(sys.sigma) > 0.0)) throw DomainError("static instability: ω₋²≤0");
    sys.validate();
    return {ModeSpec{w2 + sys.sigma, sys.mass, sys.bath1}, ModeSpec{w2 - sys.sigma, sys.mass, sys.bath1}};
}

double effective_damping_series(double gamma, double lambda, double omega)
{
    const double L2 = lambda * lambda;
    const double w2 = omega * omega;
    const double s = L2 + w2;
    const double lead = L2 * L2 / (s * s);
    const double next = gamma * std::pow(lambda, 5) * (3.0 * L2 * L2 - 7.0 * L2 * w2 - 2.0 * w2 * w2) / std::pow(s, 5);
    return gamma * (lead + next);
}

EffectiveDamping effective_damping(const ModeSpec& mode)
{
    const auto poles = find_poles(characteristic_polynomial(mode));
    EffectiveDamping out;
    const auto complex_pole = std::find_if(poles.begin(), poles.end(), [](cplx z) { return z.imag() != 0.0; });
    if (complex_pole != poles.end()) {
        out.dominant_pole = *complex_pole;
        out.underdamped = true;
    } else {
        out.dominant_pole = poles.front();
        out.underdamped = false;
    }
    out.gamma_eff = -out.dominant_pole.real();
    switch (mode.bath.form) {
    case CutoffForm::DoubleLorentzian:
        out.series = effective_damping_series(mode.bath.gamma, mode.bath.lambda, std::sqrt(mode.omega_sq));
        break;
    case CutoffForm::MarkovianLimit:
        out.series = mode.bath.gamma;
        break;
    case CutoffForm::Lorentzian:
        out.series = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    return out;
}

EffectiveDamping effective_damping(const SystemSpec& sys, NormalMode which)
{
    const auto [plus, minus] = normal_mode_split(sys);
    return effective_damping(which == NormalMode::Plus ? plus : minus);
}

} // namespace qbm
