#include "qbm/spectral_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qbm {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// 15-point Kronrod nodes (non-negative half) and weights; the embedded 7-point
// Gauss rule uses the odd-indexed nodes.
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a{0.0};
    double b{0.0};
    Eigen::VectorXd value;
    Eigen::VectorXd error;
    double worst{0.0};
};

Panel gauss_kronrod(const VectorIntegrand& f, int dim, double a, double b, Eigen::VectorXd& scratch)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Eigen::VectorXd kronrod = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd gauss = Eigen::VectorXd::Zero(dim);
    f(c, scratch);
    kronrod += kWgk[7] * scratch;
    gauss += kWg[3] * scratch;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        f(c - dx, scratch);
        Eigen::VectorXd sum = scratch;
        f(c + dx, scratch);
        sum += scratch;
        kronrod += kWgk[static_cast<std::size_t>(j)] * sum;
        if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * sum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = h * kronrod;
    p.error = (h * (kronrod - gauss)).cwiseAbs();
    p.worst = p.error.maxCoeff();
    return p;
}

cplx window_term(cplx z, cplx growth, double t, double kappa)
{
    // (e^{(z+ik)t} - 1)/(z+ik), growth = e^{z t} e^{i k t}
    const cplx a = z + cplx(0.0, kappa);
    if (std::abs(a) < 1e-8) {
        const cplx at = a * t;
        return t * (1.0 + at / 2.0 + at * at / 6.0);
    }
    return (growth - 1.0) / a;
}

} // namespace

cplx window(const PoleResidueForm& f, double t, double kappa, int order)
{
    if (t < 0.0) throw DomainError("window: t must be non-negative");
    const cplx phase = std::polar(1.0, kappa * t);
    cplx sum = 0.0;
    for (std::size_t k = 0; k < f.poles().size(); ++k) {
        const cplx z = f.poles()[k];
        const cplx c = order == 1 ? f.residues()[k] * z : f.residues()[k];
        sum += c * window_term(z, std::exp(z * t) * phase, t, kappa);
    }
    return sum;
}

cplx stationary_window(const PoleResidueForm& f, double kappa, int order)
{
    cplx sum = 0.0;
    for (std::size_t k = 0; k < f.poles().size(); ++k) {
        const cplx z = f.poles()[k];
        const cplx c = order == 1 ? f.residues()[k] * z : f.residues()[k];
        sum -= c / (z + cplx(0.0, kappa));
    }
    return sum;
}

VectorIntegral integrate_panels(const VectorIntegrand& f, int dim, std::vector<double> breakpoints, double rel_tol,
                                double abs_floor, int max_panels)
{
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    VectorIntegral out;
    out.value = Eigen::VectorXd::Zero(dim);
    out.error = Eigen::VectorXd::Zero(dim);
    if (breakpoints.size() < 2) {
        out.converged = true;
        return out;
    }

    Eigen::VectorXd scratch(dim);
    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        panels.push_back(gauss_kronrod(f, dim, breakpoints[i], breakpoints[i + 1], scratch));
    out.evaluations = 15 * static_cast<long>(panels.size());

    const auto totals = [&](Eigen::VectorXd& value, Eigen::VectorXd& error) {
        std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        value.setZero();
        error.setZero();
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
        }
    };

    while (true) {
        totals(out.value, out.error);
        const double scale = out.value.cwiseAbs().maxCoeff();
        if (out.error.maxCoeff() <= rel_tol * scale + abs_floor) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= max_panels) break;
        // bisect the worst panel; ties go to the leftmost one (panels are sorted by a)
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].worst > panels[worst].worst) worst = i;
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) break;
        panels[worst] = gauss_kronrod(f, dim, p.a, mid, scratch);
        panels.push_back(gauss_kronrod(f, dim, mid, p.b, scratch));
        out.evaluations += 30;
    }
    out.panels = static_cast<int>(panels.size());
    return out;
}

double default_kappa_cap(const BathSpec& bath, double omega_ref) { return 50.0 * std::max(bath.lambda, omega_ref); }

namespace {

struct PreparedResponse {
    std::vector<cplx> poles;
    std::vector<cplx> coeffs;   // R_k z_k^order
    std::vector<cplx> decay;    // e^{z_k t}
    double scale{1.0};          // 1/m for positions
    // for kappa >= 2 max|z|:  |W| <= (lead + next/kappa)/kappa, from
    // 1/(z + i kappa) = 1/(i kappa) - z/(i kappa (z + i kappa))
    double lead{0.0};           // |sum c| + |sum c e^{zt}|
    double next{0.0};           // 2 (sum |c z| + sum |c z e^{zt}|)
};

// integral of the large-kappa envelope of nu(kappa)/kappa^2 from K to infinity
double nu_tail(const BathSpec& bath, double K)
{
    const double L = bath.lambda;
    switch (bath.form) {
    case CutoffForm::DoubleLorentzian: return 2.0 * bath.gamma * std::pow(L, 4) / (4.0 * std::pow(K, 4));
    case CutoffForm::Lorentzian: return bath.gamma * L * L / (K * K);
    case CutoffForm::MarkovianLimit: return std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
}

// Splits every gap wider than h so that no initial panel spans more than a couple
// of oscillations of e^{i kappa t}; a 15-point rule cannot see aliased structure.
std::vector<double> limit_width(const std::vector<double>& points, double h)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i], b = points[i + 1];
        const int n = std::isfinite(h) ? std::max(1, static_cast<int>(std::ceil((b - a) / h))) : 1;
        for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / n);
    }
    if (!points.empty()) out.push_back(points.back());
    return out;
}

} // namespace

Eigen::MatrixXd induced_block(const BathSpec& bath, std::span<const Response> responses, double t, double mass,
                              const QuadratureOptions& opts, QuadratureReport* report)
{
    const int n = static_cast<int>(responses.size());
    Eigen::MatrixXd result = Eigen::MatrixXd::Zero(n, n);
    QuadratureReport rep;
    if (t < 0.0) throw DomainError("induced_block: t must be non-negative");
    if (!(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-2)) throw DomainError("induced_block: tolerance must lie in (0, 1e-2]");
    if (t == 0.0 || n == 0) {
        rep.converged = true;
        if (report) *report = rep;
        return result;
    }
    const bool stationary = std::isinf(t);

    std::vector<PreparedResponse> prep(static_cast<std::size_t>(n));
    double max_pole = 0.0;
    double omega_ref = 0.0;
    std::vector<double> breakpoints{0.0};
    for (int a = 0; a < n; ++a) {
        const auto& r = responses[static_cast<std::size_t>(a)];
        auto& p = prep[static_cast<std::size_t>(a)];
        p.scale = r.order == 0 ? 1.0 / mass : 1.0;
        if (r.source == nullptr) continue;
        for (std::size_t k = 0; k < r.source->poles().size(); ++k) {
            const cplx z = r.source->poles()[k];
            const cplx c = r.order == 1 ? r.source->residues()[k] * z : r.source->residues()[k];
            p.poles.push_back(z);
            p.coeffs.push_back(c);
            p.decay.push_back(stationary ? cplx(0.0) : std::exp(z * t));
            max_pole = std::max(max_pole, std::abs(z));
            omega_ref = std::max(omega_ref, std::abs(z.imag()));
            if (std::abs(z.imag()) > 0.0) breakpoints.push_back(std::abs(z.imag()));
        }
    }
    if (omega_ref == 0.0) omega_ref = 1.0;
    for (auto& p : prep) {
        cplx at0 = 0.0, att = 0.0;
        for (std::size_t k = 0; k < p.poles.size(); ++k) {
            at0 += p.coeffs[k];
            att += p.coeffs[k] * p.decay[k];
            p.next += 2.0 * std::abs(p.coeffs[k] * p.poles[k]) * (1.0 + std::abs(p.decay[k]));
        }
        p.lead = std::abs(at0) + std::abs(att);
    }

    const int dim = n * (n + 1) / 2;
    const VectorIntegrand integrand = [&](double kappa, Eigen::Ref<Eigen::VectorXd> out) {
        const double weight = mass * hadamard_weight(bath, kappa) / kPi;
        const cplx phase = stationary ? cplx(0.0) : std::polar(1.0, kappa * t);
        std::vector<cplx> w(static_cast<std::size_t>(n));
        for (std::size_t a = 0; a < prep.size(); ++a) {
            const auto& p = prep[a];
            cplx sum = 0.0;
            for (std::size_t k = 0; k < p.poles.size(); ++k) {
                if (stationary) sum -= p.coeffs[k] / (p.poles[k] + cplx(0.0, kappa));
                else sum += p.coeffs[k] * window_term(p.poles[k], p.decay[k] * phase, t, kappa);
            }
            w[a] = p.scale * sum;
        }
        int idx = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                out[idx++] = weight * (w[static_cast<std::size_t>(a)] * std::conj(w[static_cast<std::size_t>(b)])).real();
    };

    const bool markovian = bath.form == CutoffForm::MarkovianLimit;
    if (!markovian) breakpoints.push_back(bath.lambda);
    double k0 = std::max(2.0 * max_pole, 10.0 * std::max(bath.lambda, omega_ref));
    if (markovian) {
        k0 = default_kappa_cap(bath, omega_ref);
        rep.tail_bounded = false;
    }
    std::erase_if(breakpoints, [&](double x) { return x >= k0; });
    breakpoints.push_back(k0);
    std::sort(breakpoints.begin(), breakpoints.end());
    const double max_width = stationary ? std::numeric_limits<double>::infinity() : 8.0 * kPi / t;

    VectorIntegral main = integrate_panels(integrand, dim, limit_width(breakpoints, max_width), opts.rel_tol, 1e-300,
                                           opts.max_panels);
    Eigen::VectorXd value = main.value;
    Eigen::VectorXd error = main.error;
    rep.evaluations = main.evaluations;
    rep.panels = main.panels;
    rep.converged = main.converged;
    rep.kappa_max = k0;

    if (!markovian && main.converged) {
        const double scale = value.cwiseAbs().maxCoeff();
        const double target = opts.rel_tol * scale / 10.0;
        const auto bound = [&](double K) {
            double cmax = 0.0;
            for (const auto& p : prep) cmax = std::max(cmax, p.scale * (p.lead + p.next / K));
            return mass * coth_half(bath.beta, K) * cmax * cmax * nu_tail(bath, K) / kPi;
        };
        double K = k0;
        if (target > 0.0) {
            while (bound(K) > target && K < 1e7 * std::max(bath.lambda, omega_ref)) K *= 1.5;
        }
        if (bound(K) > target && target > 0.0) rep.tail_bounded = false;
        // what lies beyond K is not integrated, so it belongs in the error
        error.array() += bound(K);
        if (K > k0) {
            VectorIntegral tail = integrate_panels(integrand, dim, limit_width({k0, K}, max_width), opts.rel_tol, target,
                                                  opts.max_panels);
            value += tail.value;
            error += tail.error;
            rep.evaluations += tail.evaluations;
            rep.panels += tail.panels;
            rep.converged = rep.converged && tail.converged;
            rep.kappa_max = K;
        }
    }

    rep.value = value.cwiseAbs().maxCoeff();
    rep.abs_error = error.maxCoeff();
    if (report) *report = rep;
    if (!rep.converged) {
        std::ostringstream os;
        os << "induced_block: tolerance " << opts.rel_tol << " not met (error " << rep.abs_error << ", value "
           << rep.value << ", panels " << rep.panels << ", t=" << t << ")";
        throw QuadratureError(os.str(), rep);
    }

    int idx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            result(a, b) = value[idx];
            result(b, a) = value[idx];
            ++idx;
        }
    return result;
}

double induced_moment(const BathSpec& bath, Response a, Response b, double t, double mass,
                      const QuadratureOptions& opts, QuadratureReport* report)
{
    const std::array<Response, 2> pair{a, b};
    return induced_block(bath, pair, t, mass, opts, report)(0, 1);
}

double steady_fdr_integral(const ModeSpec& mode, SteadyElement element, const QuadratureOptions& opts,
                           QuadratureReport* report)
{
    QuadratureReport rep;
    if (element == SteadyElement::PositionMomentum) {
        rep.converged = true;
        if (report) *report = rep;
        return 0.0;
    }
    const BathSpec& bath = mode.bath;
    const double m = mode.mass;
    const bool momentum = element == SteadyElement::MomentumMomentum;
    const double prefactor = (momentum ? m : 1.0 / m) / kPi;

    const auto dbar2 = [&](double kappa) {
        const cplx z(0.0, -kappa);
        return 1.0 / (z * z + mode.omega_sq + self_energy(bath, z));
    };
    const auto density = [&](double kappa) {
        if (kappa < 1e-9) {
            // coth(beta k/2) Im dbar2 -> (2/beta) (nu/k) |dbar2(0)|^2
            const cplx d0 = dbar2(0.0);
            const double lim = hadamard_weight(bath, 0.0) * std::norm(d0);
            return prefactor * (momentum ? kappa * kappa : 1.0) * lim;
        }
        const double w = coth_half(bath.beta, kappa) * dbar2(kappa).imag();
        return prefactor * (momentum ? kappa * kappa : 1.0) * w;
    };

    const double omega = std::sqrt(std::abs(mode.omega_sq));
    std::vector<double> breakpoints{0.0, omega};
    const bool capped = momentum && bath.form == CutoffForm::MarkovianLimit;
    double k0 = 10.0 * std::max(bath.lambda, omega);
    if (bath.form != CutoffForm::MarkovianLimit) breakpoints.push_back(bath.lambda);
    if (capped) {
        k0 = default_kappa_cap(bath, omega);
        rep.tail_bounded = false;
    }
    std::erase_if(breakpoints, [&](double x) { return x >= k0; });
    breakpoints.push_back(k0);

    const VectorIntegrand head = [&](double kappa, Eigen::Ref<Eigen::VectorXd> out) { out[0] = density(kappa); };
    VectorIntegral main = integrate_panels(head, 1, breakpoints, opts.rel_tol, 1e-300, opts.max_panels);
    double value = main.value[0];
    double error = main.error[0];
    rep.evaluations = main.evaluations;
    rep.panels = main.panels;
    rep.converged = main.converged;
    rep.kappa_max = k0;

    if (!capped) {
        // [k0, inf) mapped onto (0, 1] via kappa = k0/u
        const VectorIntegrand tail = [&](double u, Eigen::Ref<Eigen::VectorXd> out) {
            out[0] = u <= 0.0 ? 0.0 : density(k0 / u) * k0 / (u * u);
        };
        VectorIntegral t = integrate_panels(tail, 1, {0.0, 1.0}, opts.rel_tol, opts.rel_tol * std::abs(value) / 10.0,
                                            opts.max_panels);
        value += t.value[0];
        error += t.error[0];
        rep.evaluations += t.evaluations;
        rep.panels += t.panels;
        rep.converged = rep.converged && t.converged;
        rep.kappa_max = std::numeric_limits<double>::infinity();
    }
    rep.value = value;
    rep.abs_error = error;
    if (report) *report = rep;
    if (!rep.converged) throw QuadratureError("steady_fdr_integral: tolerance not met", rep);
    return value;
}

} // namespace qbm
