#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace qbm {

/// Real polynomial stored with ascending coefficients: c[0] + c[1] z + ...
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients);

    /// Degree after trimming trailing zeros; the zero polynomial has degree 0.
    [[nodiscard]] int degree() const;
    [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
    [[nodiscard]] double operator[](int i) const;
    [[nodiscard]] double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

    [[nodiscard]] std::complex<double> operator()(std::complex<double> z) const;
    [[nodiscard]] double operator()(double z) const;
    /// sum_i |c_i| |z|^i: the natural scale of rounding error when evaluating at z.
    [[nodiscard]] double magnitude_at(std::complex<double> z) const;

    [[nodiscard]] Polynomial derivative() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double s, const Polynomial& p);

private:
    void trim();
    std::vector<double> coeffs_;
};

/// All complex roots with multiplicity.
///
/// Roots come from the eigenvalues of the (scaled) companion matrix, isolated
/// roots are then Newton-polished against the original coefficients, clusters
/// that test as a genuine multiple root collapse to their centroid, and
/// conjugate pairs are made exactly conjugate.  Sorted by decreasing real part,
/// ties by decreasing |Im|, upper half-plane first.
///
/// Throws DomainError for degree-0 input and NumericError when a root cannot
/// be refined to |P(z)| / magnitude_at(z) < 1e-12.
std::vector<std::complex<double>> find_poles(const Polynomial& poly);

} // namespace qbm
