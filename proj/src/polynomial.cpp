#include "qbm/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

Polynomial::Polynomial(std::initializer_list<double> coefficients) : coeffs_(coefficients) { trim(); }

void Polynomial::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

int Polynomial::degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }

double Polynomial::operator[](int i) const
{
    return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<std::size_t>(i)] : 0.0;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const
{
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double Polynomial::operator()(double z) const
{
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double Polynomial::magnitude_at(std::complex<double> z) const
{
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const
{
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
    return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.coeffs_.empty() || b.coeffs_.empty()) return Polynomial{};
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p)
{
    std::vector<double> c = p.coeffs_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
}

namespace {

using cplx = std::complex<double>;

double relative_residual(const Polynomial& p, cplx z)
{
    const double scale = p.magnitude_at(z);
    return scale == 0.0 ? 0.0 : std::abs(p(z)) / scale;
}

cplx newton_polish(const Polynomial& p, const Polynomial& dp, cplx z)
{
    double best = relative_residual(p, z);
    for (int it = 0; it < 50 && best > 0.0; ++it) {
        const cplx d = dp(z);
        if (d == 0.0) break;
        const cplx next = z - p(z) / d;
        const double r = relative_residual(p, next);
        if (!(r < best)) break;
        z = next;
        best = r;
    }
    return z;
}

bool less_pole(cplx a, cplx b)
{
    if (a.real() != b.real()) return a.real() > b.real();
    if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) > std::abs(b.imag());
    return a.imag() > b.imag();
}

// A cluster of k approximate roots is a genuine k-fold root when the first k-1
// derivatives all vanish (relative to their own rounding scale) at the centroid.
bool is_multiple_root(const Polynomial& p, cplx c, std::size_t k)
{
    Polynomial d = p;
    for (std::size_t j = 0; j < k; ++j) {
        if (relative_residual(d, c) > 1e-10) return false;
        d = d.derivative();
    }
    return true;
}

} // namespace

std::vector<std::complex<double>> find_poles(const Polynomial& poly)
{
    const int n = poly.degree();
    if (n < 1) throw DomainError("find_poles: polynomial of degree 0 has no roots");

    // Scale z = s w so the monic polynomial in w has balanced coefficients.
    const double lead = poly.leading();
    const double c0 = poly[0];
    double s = 1.0;
    if (c0 != 0.0) s = std::pow(std::abs(c0 / lead), 1.0 / n);
    if (!std::isfinite(s) || s == 0.0) s = 1.0;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -poly[i] * std::pow(s, i - n) / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericError("find_poles: companion eigen-solver failed");

    std::vector<cplx> raw(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = solver.eigenvalues()[i] * s;

    // single-linkage clustering of nearly coincident eigenvalues
    std::vector<int> label(raw.size(), -1);
    int nlabels = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (label[i] < 0) label[i] = nlabels++;
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            const double tol = 1e-3 * std::max(1.0, std::abs(raw[i]));
            if (std::abs(raw[i] - raw[j]) < tol) {
                if (label[j] < 0) {
                    label[j] = label[i];
                } else if (label[j] != label[i]) {
                    const int old = label[j];
                    for (auto& l : label)
                        if (l == old) l = label[i];
                }
            }
        }
    }

    const Polynomial dp = poly.derivative();
    std::vector<cplx> roots;
    roots.reserve(raw.size());
    for (int l = 0; l < nlabels; ++l) {
        std::vector<cplx> members;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (label[i] == l) members.push_back(raw[i]);
        if (members.empty()) continue;
        cplx centroid = 0.0;
        for (auto m : members) centroid += m;
        centroid /= static_cast<double>(members.size());
        std::vector<cplx> polished;
        for (auto m : members) polished.push_back(newton_polish(poly, dp, m));
        if (members.size() > 1 && is_multiple_root(poly, centroid, members.size())) {
            for (std::size_t k = 0; k < members.size(); ++k) roots.push_back(centroid);
        } else {
            for (auto z : polished) roots.push_back(z);
        }
    }

    // Exact conjugate symmetry: snap near-real roots, pair the rest.
    std::vector<cplx> real_roots, upper, lower;
    for (auto z : roots) {
        if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)))
            real_roots.emplace_back(z.real(), 0.0);
        else if (z.imag() > 0)
            upper.push_back(z);
        else
            lower.push_back(z);
    }
    std::vector<cplx> out = real_roots;
    if (upper.size() == lower.size()) {
        std::vector<bool> used(lower.size(), false);
        for (auto u : upper) {
            std::size_t best = 0;
            double dist = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < lower.size(); ++j) {
                if (used[j]) continue;
                const double d = std::abs(u - std::conj(lower[j]));
                if (d < dist) {
                    dist = d;
                    best = j;
                }
            }
            used[best] = true;
            const cplx z = 0.5 * (u + std::conj(lower[best]));
            out.push_back(z);
            out.push_back(std::conj(z));
        }
    } else {
        // odd bookkeeping only happens when a real root was classified as complex
        for (auto z : upper) out.push_back(z);
        for (auto z : lower) out.push_back(z);
    }

    for (auto z : out) {
        const double r = relative_residual(poly, z);
        if (r > 1e-12 && !(r < 1e-8 && is_multiple_root(poly, z, 2))) {
            std::ostringstream os;
            os << "find_poles: root " << z << " has relative residual " << r << " (degree " << n << ")";
            throw NumericError(os.str());
        }
    }

    std::sort(out.begin(), out.end(), less_pole);
    return out;
}

} // namespace qbm
