#include "qbm/covariance.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "qbm/errors.hpp"

namespace qbm {

void TwoModeSqueezedThermal::validate() const
{
    if (!(eta >= 0.0)) throw DomainError("eta >= 0 violated");
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (!(nbar1 >= 0.0)) throw DomainError("nbar1 >= 0 violated");
    if (!(nbar2 >= 0.0)) throw DomainError("nbar2 >= 0 violated");
    if (!(mass > 0.0)) throw DomainError("mass > 0 violated");
    if (!(omega > 0.0)) throw DomainError("omega > 0 violated");
}

const Eigen::Matrix4d& normal_mode_rotation()
{
    static const Eigen::Matrix4d u = [] {
        const double r = 1.0 / std::numbers::sqrt2;
        Eigen::Matrix4d m;
        m << r, 0, r, 0,
             0, r, 0, r,
             r, 0, -r, 0,
             0, r, 0, -r;
        return m;
    }();
    return u;
}

CovarianceMatrix to_normal_modes(const CovarianceMatrix& c)
{
    if (c.basis == Basis::NormalMode) return c;
    const auto& u = normal_mode_rotation();
    return {u * c.m * u, Basis::NormalMode};
}

CovarianceMatrix to_canonical(const CovarianceMatrix& c)
{
    if (c.basis == Basis::Canonical) return c;
    const auto& u = normal_mode_rotation();
    return {u * c.m * u, Basis::Canonical};
}

CovarianceMatrix initial_covariance(const TwoModeSqueezedThermal& s)
{
    s.validate();
    const double mw = s.mass * s.omega;
    const double c2 = std::cosh(s.eta) * std::cosh(s.eta);
    const double s2 = std::sinh(s.eta) * std::sinh(s.eta);
    const double a1 = (s.nbar1 + 0.5) * c2 + (s.nbar2 + 0.5) * s2;
    const double a2 = (s.nbar2 + 0.5) * c2 + (s.nbar1 + 0.5) * s2;
    const double k = (s.nbar1 + s.nbar2 + 1.0) * std::sinh(2.0 * s.eta);

    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = a1 / mw;
    m(1, 1) = a1 * mw;
    m(2, 2) = a2 / mw;
    m(3, 3) = a2 * mw;
    m(0, 2) = m(2, 0) = -k * std::cos(s.theta) / (2.0 * mw);
    m(1, 3) = m(3, 1) = k * std::cos(s.theta) * mw / 2.0;
    m(0, 3) = m(3, 0) = -k * std::sin(s.theta) / 2.0;
    m(2, 1) = m(1, 2) = -k * std::sin(s.theta) / 2.0;
    return {m, Basis::Canonical};
}

CovarianceMatrix normal_mode_initial(double eta, double mass, double omega)
{
    const double mw = mass * omega;
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = std::exp(-2.0 * eta) / (2.0 * mw);
    m(1, 1) = mw * std::exp(2.0 * eta) / 2.0;
    m(2, 2) = std::exp(2.0 * eta) / (2.0 * mw);
    m(3, 3) = mw * std::exp(-2.0 * eta) / 2.0;
    return {m, Basis::NormalMode};
}

void EvolutionConfig::validate() const
{
    if (!(t_max > 0.0)) throw DomainError("t_max > 0 violated");
    if (n_t < 2) throw DomainError("n_t >= 2 violated");
    if (!(quadrature.rel_tol > 0.0 && quadrature.rel_tol <= 1e-2)) throw DomainError("tolerance in (0, 1e-2] violated");
    if (workers < 0) throw DomainError("workers >= 0 violated");
}

std::vector<double> EvolutionConfig::grid() const
{
    std::vector<double> t(static_cast<std::size_t>(n_t));
    for (int i = 0; i < n_t; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n_t - 1);
    return t;
}

int default_workers()
{
    if (const char* env = std::getenv("QBM_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn)
{
    if (workers <= 0) workers = default_workers();
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    const auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

CovarianceMatrix Propagation::apply(const CovarianceMatrix& initial) const
{
    const CovarianceMatrix c = to_canonical(initial);
    Eigen::Matrix4d m = transfer * c.m * transfer.transpose() + induced;
    m = 0.5 * (m + m.transpose()).eval();
    return {m, Basis::Canonical};
}

ModeSpec effective_markovian_mode(const ModeSpec& mode)
{
    const EffectiveDamping damping = effective_damping(mode);
    ModeSpec out = mode;
    out.bath.gamma = damping.gamma_eff;
    out.bath.form = CutoffForm::MarkovianLimit;
    return out;
}

CovarianceEvolver::CovarianceEvolver(const SystemSpec& sys, Route route, QuadratureOptions quad)
    : sys_(sys), route_(route), quad_(quad)
{
    sys_.validate();
    if (route_ == Route::General) {
        full_.emplace(sys_);
        return;
    }
    auto [plus, minus] = normal_mode_split(sys_);
    modes_ = {plus, minus};
    if (route_ == Route::EffectiveMarkovian) {
        for (auto& m : modes_) m = effective_markovian_mode(m);
    }
    for (std::size_t k = 0; k < 2; ++k) solutions_[k] = mode_solutions(modes_[k]);
}

const ModeSpec& CovarianceEvolver::mode(NormalMode which) const
{
    if (route_ == Route::General) throw DomainError("normal modes are not defined on the general route");
    return modes_[which == NormalMode::Plus ? 0 : 1];
}

Eigen::Matrix4d CovarianceEvolver::transfer_normal_modes(double t) const
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    const double mass = sys_.mass;
    for (int k = 0; k < 2; ++k) {
        const auto& s = solutions_[static_cast<std::size_t>(k)];
        const int o = 2 * k;
        m(o, o) = s.d1.value(t, 0);
        m(o, o + 1) = s.d2.value(t, 0) / mass;
        m(o + 1, o) = mass * s.d1.value(t, 1);
        m(o + 1, o + 1) = s.d2.value(t, 1);
    }
    return m;
}

Eigen::Matrix4d CovarianceEvolver::induced_normal_modes(double t) const
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 2; ++k) {
        const auto& s = solutions_[static_cast<std::size_t>(k)];
        const std::array<Response, 2> r{Response{&s.d2, 0}, Response{&s.d2, 1}};
        m.block<2, 2>(2 * k, 2 * k) = induced_block(modes_[static_cast<std::size_t>(k)].bath, r, t, sys_.mass, quad_);
    }
    return m;
}

Propagation CovarianceEvolver::propagation(double t) const
{
    if (t < 0.0) throw DomainError("propagation: t must be non-negative");
    Propagation p;
    // the Markovian d1 carries an initial-slip kick at 0+, not at 0
    if (t == 0.0) return p;
    const bool late = std::isinf(t);
    if (route_ != Route::General) {
        const auto& u = normal_mode_rotation();
        p.transfer = late ? Eigen::Matrix4d::Zero() : Eigen::Matrix4d(u * transfer_normal_modes(t) * u);
        p.induced = u * induced_normal_modes(t) * u;
        return p;
    }

    const FundamentalSolutionSet& f = *full_;
    const double mass = sys_.mass;
    p.transfer.setZero();
    if (!late) {
        const Eigen::Matrix2d d1 = f.D1(t, 0), d1dot = f.D1(t, 1);
        const Eigen::Matrix2d d2 = f.D2(t, 0), d2dot = f.D2(t, 1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                p.transfer(2 * i, 2 * j) = d1(i, j);
                p.transfer(2 * i, 2 * j + 1) = d2(i, j) / mass;
                p.transfer(2 * i + 1, 2 * j) = mass * d1dot(i, j);
                p.transfer(2 * i + 1, 2 * j + 1) = d2dot(i, j);
            }
    }
    p.induced.setZero();
    for (int j = 0; j < 2; ++j) {
        const BathSpec& bath = j == 0 ? sys_.bath1 : sys_.bath2;
        const std::array<Response, 4> r{Response{&f.d2(0, j), 0}, Response{&f.d2(0, j), 1}, Response{&f.d2(1, j), 0},
                                        Response{&f.d2(1, j), 1}};
        p.induced += induced_block(bath, r, t, mass, quad_);
    }
    return p;
}

std::vector<Propagation> CovarianceEvolver::propagation(const std::vector<double>& times, int workers) const
{
    std::vector<Propagation> out(times.size());
    parallel_for(static_cast<int>(times.size()), workers,
                 [&](int i) { out[static_cast<std::size_t>(i)] = propagation(times[static_cast<std::size_t>(i)]); });
    return out;
}

CovarianceMatrix CovarianceEvolver::steady_state() const
{
    if (route_ == Route::General) return {propagation(std::numeric_limits<double>::infinity()).induced, Basis::Canonical};
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 2; ++k) {
        const auto& mode = modes_[static_cast<std::size_t>(k)];
        m(2 * k, 2 * k) = steady_fdr_integral(mode, SteadyElement::PositionPosition, quad_);
        m(2 * k + 1, 2 * k + 1) = steady_fdr_integral(mode, SteadyElement::MomentumMomentum, quad_);
    }
    return to_canonical({m, Basis::NormalMode});
}

CovarianceSeries evolve(const CovarianceEvolver& evolver, const CovarianceMatrix& initial, const EvolutionConfig& cfg)
{
    cfg.validate();
    CovarianceSeries out;
    out.times = cfg.grid();
    const auto props = evolver.propagation(out.times, cfg.workers);
    out.values.reserve(props.size());
    for (const auto& p : props) out.values.push_back(p.apply(initial));
    return out;
}

CovarianceSeries evolve_symmetric(const SystemSpec& sys, const CovarianceMatrix& initial, const EvolutionConfig& cfg)
{
    return evolve(CovarianceEvolver(sys, CovarianceEvolver::Route::NormalMode, cfg.quadrature), initial, cfg);
}

CovarianceSeries evolve_general(const SystemSpec& sys, const CovarianceMatrix& initial, const EvolutionConfig& cfg)
{
    return evolve(CovarianceEvolver(sys, CovarianceEvolver::Route::General, cfg.quadrature), initial, cfg);
}

CovarianceSeries evolve_effective_markovian(const SystemSpec& sys, const CovarianceMatrix& initial,
                                            const EvolutionConfig& cfg)
{
    return evolve(CovarianceEvolver(sys, CovarianceEvolver::Route::EffectiveMarkovian, cfg.quadrature), initial, cfg);
}

CovarianceMatrix steady_state(const SystemSpec& sys, const QuadratureOptions& quad)
{
    sys.validate();
    const auto route = sys.is_symmetric() ? CovarianceEvolver::Route::NormalMode : CovarianceEvolver::Route::General;
    return CovarianceEvolver(sys, route, quad).steady_state();
}

std::pair<double, double> uncertainty_functions(const CovarianceMatrix& c)
{
    const Eigen::Matrix4d m = to_normal_modes(c).m;
    const auto block = [&](int o) { return m(o, o) * m(o + 1, o + 1) - m(o, o + 1) * m(o, o + 1) - 0.25; };
    return {block(0), block(2)};
}

} // namespace qbm
