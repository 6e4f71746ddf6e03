#include "qbm/entanglement.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <optional>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

const Eigen::Matrix2d& symplectic_j()
{
    static const Eigen::Matrix2d j = (Eigen::Matrix2d() << 0.0, 1.0, -1.0, 0.0).finished();
    return j;
}

std::pair<double, double> spectrum(double delta, double det)
{
    double disc = delta * delta - 4.0 * det;
    if (disc < 0.0) {
        if (disc < -1e-10 * std::max(1.0, delta * delta)) {
            std::ostringstream os;
            os << "symplectic spectrum: Delta^2 - 4 det = " << disc << " < 0";
            throw NumericError(os.str());
        }
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    const double lo = 0.5 * (delta - root);
    const double hi = 0.5 * (delta + root);
    if (lo < 0.0 && lo < -1e-12 * std::max(1.0, hi)) throw NumericError("symplectic spectrum: covariance not positive");
    // det / hi is the cancellation-free form of the small root
    const double lo_stable = hi > 0.0 ? det / hi : 0.0;
    return {std::sqrt(std::max(0.0, lo_stable)), std::sqrt(hi)};
}

const Eigen::Matrix4d& symplectic_form()
{
    static const Eigen::Matrix4d omega = [] {
        Eigen::Matrix4d o = Eigen::Matrix4d::Zero();
        o.block<2, 2>(0, 0) = symplectic_j();
        o.block<2, 2>(2, 2) = symplectic_j();
        return o;
    }();
    return omega;
}

// With sigma = L L^T the antisymmetric L^T Omega L has singular values
// (nu+, nu+, nu-, nu-).  Singular values move at most by the size of the
// perturbation, so degenerate or strongly squeezed spectra keep full accuracy
// where the Delta/det root formula loses half the digits.
std::optional<std::pair<double, double>> williamson(const Eigen::Matrix4d& m)
{
    const Eigen::LLT<Eigen::Matrix4d> llt(m);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::Matrix4d l = llt.matrixL();
    const Eigen::Matrix4d a = l.transpose() * symplectic_form() * l;
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(a);
    const auto& sv = svd.singularValues();
    return std::pair{0.5 * (sv[2] + sv[3]), 0.5 * (sv[0] + sv[1])};
}

bool block_diagonal(const Eigen::Matrix4d& m)
{
    return m.block<2, 2>(0, 2).cwiseAbs().maxCoeff() <= 1e-14 * m.cwiseAbs().maxCoeff();
}

} // namespace

SymplecticInvariants partition_invariants(const Eigen::Matrix4d& m)
{
    const Eigen::Matrix2d a = m.block<2, 2>(0, 0);
    const Eigen::Matrix2d b = m.block<2, 2>(2, 2);
    const Eigen::Matrix2d c = m.block<2, 2>(0, 2);
    const Eigen::Matrix2d& j = symplectic_j();
    SymplecticInvariants inv;
    inv.I1 = a.determinant();
    inv.I2 = b.determinant();
    inv.I3 = c.determinant();
    inv.I4 = (a * j * c * j * b * j * c.transpose() * j).trace();
    inv.delta = inv.I1 + inv.I2 + 2.0 * inv.I3;
    inv.delta_pt = inv.I1 + inv.I2 - 2.0 * inv.I3;
    inv.det = m.determinant();
    return inv;
}

SymplecticInvariants invariants(const CovarianceMatrix& cov) { return partition_invariants(to_canonical(cov).m); }

std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& cov)
{
    // the full spectrum is basis independent (U2 is symplectic)
    if (auto w = williamson(cov.m)) return *w;
    const SymplecticInvariants inv = partition_invariants(cov.m);
    return spectrum(inv.delta, inv.det);
}

std::pair<double, double> symplectic_eigenvalues_direct(const Eigen::Matrix4d& m)
{
    const Eigen::Matrix4cd op = std::complex<double>(0.0, 1.0) * (symplectic_form() * m).cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(op);
    std::array<double, 4> ev{};
    for (int i = 0; i < 4; ++i) ev[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()[i]);
    std::sort(ev.begin(), ev.end());
    return {0.5 * (ev[0] + ev[1]), 0.5 * (ev[2] + ev[3])};
}

std::pair<double, double> partition_pt_symplectic_eigenvalues(const Eigen::Matrix4d& m)
{
    Eigen::Matrix4d pt = m;
    pt.row(3) *= -1.0;
    pt.col(3) *= -1.0;
    if (auto w = williamson(pt)) return *w;
    const SymplecticInvariants inv = partition_invariants(m);
    return spectrum(inv.delta_pt, inv.det);
}

std::pair<double, double> pt_symplectic_eigenvalues(const CovarianceMatrix& cov)
{
    if (cov.basis == Basis::NormalMode && block_diagonal(cov.m)) {
        const Eigen::Matrix4d& s = cov.m;
        const double delta_pt = s(0, 0) * s(3, 3) + s(2, 2) * s(1, 1) - 2.0 * s(0, 1) * s(2, 3);
        const double det = s.block<2, 2>(0, 0).determinant() * s.block<2, 2>(2, 2).determinant();
        return spectrum(delta_pt, det);
    }
    return partition_pt_symplectic_eigenvalues(to_canonical(cov).m);
}

double log_negativity(const CovarianceMatrix& cov)
{
    return std::max(0.0, -std::log(2.0 * pt_symplectic_eigenvalues(cov).first));
}

double separability_margin(const SymplecticInvariants& inv)
{
    const double q = 0.25 + inv.I3;
    return inv.I1 * inv.I2 + q * q - inv.I4 - 0.25 * (inv.I1 + inv.I2);
}

double squeeze_threshold(double beta, double omega)
{
    if (!(beta > 0.0) || !(omega > 0.0)) throw DomainError("squeeze_threshold: beta > 0 and omega > 0 required");
    const double x = 0.5 * beta * omega;
    // ln coth x = -ln tanh x, with log1p for large x
    if (x > 20.0) return 0.5 * std::log1p(2.0 / std::expm1(2.0 * x));
    return -0.5 * std::log(std::tanh(x));
}

namespace {

bool entangled(double lambda) { return lambda < 0.5; }

double crossing(double t0, double t1, double l0, double l1)
{
    if (l1 == l0) return t0;
    return t0 + (0.5 - l0) * (t1 - t0) / (l1 - l0);
}

double refine(double t0, double t1, double l0, double l1, const LambdaProbe& probe)
{
    if (!probe) return crossing(t0, t1, l0, l1);
    constexpr int kSub = 10;
    const bool start = entangled(l0);
    double prev_t = t0;
    double prev_l = l0;
    for (int k = 1; k <= kSub; ++k) {
        const double t = k == kSub ? t1 : t0 + (t1 - t0) * k / kSub;
        const double l = k == kSub ? l1 : probe(t);
        if (entangled(l) != start) return crossing(prev_t, t, prev_l, l);
        prev_t = t;
        prev_l = l;
    }
    return crossing(t0, t1, l0, l1);
}

} // namespace

EntanglementTimeline extract_events(const std::vector<double>& times, const std::vector<double>& lambda,
                                    const LambdaProbe& probe)
{
    if (times.empty() || times.size() != lambda.size()) throw DomainError("extract_events: empty or mismatched series");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("extract_events: time grid must be increasing");

    EntanglementTimeline out;
    out.times = times;
    out.lambda_minus_pt = lambda;
    out.log_negativity.reserve(lambda.size());
    for (double l : lambda) out.log_negativity.push_back(std::max(0.0, -std::log(2.0 * l)));

    for (std::size_t i = 1; i < times.size(); ++i) {
        const bool was = entangled(lambda[i - 1]);
        const bool is = entangled(lambda[i]);
        if (was == is) continue;
        const double t = refine(times[i - 1], times[i], lambda[i - 1], lambda[i], probe);
        out.events.push_back({was ? EventKind::Death : EventKind::Revival, t});
    }
    if (entangled(lambda.front()) && !out.events.empty()) out.tau_ent = out.events.front().time;
    return out;
}

EntanglementTimeline extract_events(const CovarianceSeries& series, const LambdaProbe& probe)
{
    std::vector<double> lambda;
    lambda.reserve(series.values.size());
    for (const auto& c : series.values) lambda.push_back(pt_symplectic_eigenvalues(c).first);
    return extract_events(series.times, lambda, probe);
}

} // namespace qbm
