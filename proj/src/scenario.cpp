#include "qbm/scenario.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qbm/entanglement.hpp"
#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_issues(const std::vector<ConfigIssue>& issues)
{
    std::ostringstream os;
    os << "invalid configuration";
    for (const auto& i : issues) os << "\n  " << i.path << ": " << i.message;
    return os.str();
}

std::vector<double> geometric(double lo, double hi, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

std::string label(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Scenarios whose physics is defined for identical oscillators and baths.
bool symmetric_only(const std::string& name) { return name != "asym_xx" && name != "asym_symp"; }

struct Entry {
    ScenarioInfo info;
    void (*defaults)(ScenarioConfig&);
    void (*run)(const ScenarioConfig&, ScenarioResult&);
};

const std::vector<Entry>& entries();

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

void ScenarioConfig::validate() const
{
    std::vector<ConfigIssue> issues;
    const auto check = [&](const std::string& path, auto&& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            issues.push_back({path, e.what()});
        }
    };
    if (!is_scenario(scenario)) issues.push_back({"scenario.name", "unknown scenario '" + scenario + "'"});
    if (!(system.mass > 0.0)) issues.push_back({"system.mass", "mass > 0"});
    if (!(system.omega1 > 0.0)) issues.push_back({"system.omega1", "omega1 > 0"});
    if (!(system.omega2 > 0.0)) issues.push_back({"system.omega2", "omega2 > 0"});
    if (system.omega1 > 0.0 && system.omega2 > 0.0 && !(std::abs(system.sigma) < system.omega1 * system.omega2))
        issues.push_back({"system.sigma", "static instability: |sigma| >= omega1*omega2 (ω₋²≤0)"});
    for (int k = 1; k <= 2; ++k) {
        const BathSpec& b = k == 1 ? system.bath1 : system.bath2;
        const std::string p = "bath" + std::to_string(k) + ".";
        if (!(b.gamma > 0.0)) issues.push_back({p + "gamma", "gamma > 0"});
        if (!(b.lambda > 0.0)) issues.push_back({p + "lambda", "lambda > 0"});
        if (!(b.beta > 0.0)) issues.push_back({p + "beta", "beta > 0"});
    }
    if (symmetric_only(scenario) && !system.is_symmetric())
        issues.push_back({"bath2", "this scenario needs identical oscillators and baths (bath2 = bath1, omega2 = omega1)"});
    check("state", [&] { state.validate(); });
    if (!(evolution.t_max > 0.0)) issues.push_back({"evolution.t_max", "t_max > 0"});
    if (evolution.n_t < 2) issues.push_back({"evolution.n_t", "n_t >= 2"});
    if (!(evolution.quadrature.rel_tol > 0.0 && evolution.quadrature.rel_tol <= 1e-2))
        issues.push_back({"evolution.tol", "tol in (0, 1e-2]"});
    if (evolution.quadrature.max_panels < 1) issues.push_back({"evolution.max_panels", "max_panels >= 1"});
    for (double l : lambdas)
        if (!(l > 0.0)) issues.push_back({"sweep.lambdas", "every lambda > 0"});
    for (double b : betas)
        if (!(b > 0.0)) issues.push_back({"sweep.betas", "every beta > 0"});
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

// ---------------------------------------------------------------- config parsing

namespace {

double parse_double(const std::string& path, const std::string& text, std::vector<ConfigIssue>& issues)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    issues.push_back({path, "expected a finite number, got '" + text + "'"});
    return kNaN;
}

std::vector<double> parse_list(const std::string& path, const std::string& text, std::vector<ConfigIssue>& issues)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(path, item, issues));
    if (out.empty()) issues.push_back({path, "expected a non-empty comma-separated list"});
    return out;
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"scenario", {"name"}},
        {"system", {"mass", "omega1", "omega2", "sigma"}},
        {"bath1", {"gamma", "lambda", "beta", "form"}},
        {"bath2", {"gamma", "lambda", "beta", "form"}},
        {"state", {"eta", "theta", "nbar1", "nbar2"}},
        {"evolution", {"t_max", "n_t", "tol", "max_panels"}},
        {"sweep", {"lambdas", "betas"}},
        {"output", {"dir"}},
    };
    return s;
}

} // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& fallback_scenario, const std::string& origin)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::vector<ConfigIssue>{{origin + ":" + std::to_string(e.line()), e.message()}});
    }

    std::vector<ConfigIssue> issues;
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            issues.push_back({section, body.empty() ? "keys must live inside a section" : "unknown section"});
            continue;
        }
        for (const auto& [key, value] : body)
            if (!it->second.contains(key)) issues.push_back({section + "." + key, "unknown key"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    std::string name = tree.get<std::string>("scenario.name", fallback_scenario);
    if (name.empty()) throw ConfigError(std::vector<ConfigIssue>{{"scenario.name", "no scenario given"}});
    if (!is_scenario(name)) throw ConfigError(std::vector<ConfigIssue>{{"scenario.name", "unknown scenario '" + name + "'"}});
    ScenarioConfig cfg = default_config(name);

    const auto number = [&](const std::string& path, double& target) {
        if (auto v = tree.get_optional<std::string>(path)) target = parse_double(path, *v, issues);
    };
    number("system.mass", cfg.system.mass);
    number("system.omega1", cfg.system.omega1);
    const bool has_omega2 = tree.get_optional<std::string>("system.omega2").has_value();
    number("system.omega2", cfg.system.omega2);
    if (!has_omega2 && symmetric_only(name)) cfg.system.omega2 = cfg.system.omega1;
    number("system.sigma", cfg.system.sigma);

    for (int k = 1; k <= 2; ++k) {
        const std::string p = "bath" + std::to_string(k);
        BathSpec& b = k == 1 ? cfg.system.bath1 : cfg.system.bath2;
        number(p + ".gamma", b.gamma);
        number(p + ".lambda", b.lambda);
        number(p + ".beta", b.beta);
        if (auto v = tree.get_optional<std::string>(p + ".form")) {
            try {
                b.form = cutoff_form_from_string(*v);
            } catch (const DomainError& e) {
                issues.push_back({p + ".form", e.what()});
            }
        }
    }
    if (symmetric_only(name) && !tree.get_child_optional("bath2")) cfg.system.bath2 = cfg.system.bath1;

    number("state.eta", cfg.state.eta);
    number("state.theta", cfg.state.theta);
    number("state.nbar1", cfg.state.nbar1);
    number("state.nbar2", cfg.state.nbar2);
    cfg.state.mass = cfg.system.mass;
    cfg.state.omega = cfg.system.omega1;

    number("evolution.t_max", cfg.evolution.t_max);
    number("evolution.tol", cfg.evolution.quadrature.rel_tol);
    for (const char* key : {"evolution.n_t", "evolution.max_panels"}) {
        if (auto v = tree.get_optional<std::string>(key)) {
            const double d = parse_double(key, *v, issues);
            if (std::isfinite(d) && (d != std::floor(d) || std::abs(d) > 1e8)) issues.push_back({key, "expected an integer"});
            else if (std::isfinite(d)) (std::string(key) == "evolution.n_t" ? cfg.evolution.n_t : cfg.evolution.quadrature.max_panels) = static_cast<int>(d);
        }
    }
    if (auto v = tree.get_optional<std::string>("sweep.lambdas")) cfg.lambdas = parse_list("sweep.lambdas", *v, issues);
    if (auto v = tree.get_optional<std::string>("sweep.betas")) cfg.betas = parse_list("sweep.betas", *v, issues);
    if (auto v = tree.get_optional<std::string>("output.dir")) cfg.out_dir = *v;

    if (!issues.empty()) throw ConfigError(std::move(issues));
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::string& fallback_scenario)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(std::vector<ConfigIssue>{{path.string(), "cannot open file"}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fallback_scenario, path.string());
}

void print_config(std::ostream& os, const ScenarioConfig& c)
{
    const auto bath = [&](const char* name, const BathSpec& b) {
        os << "[" << name << "]\ngamma = " << format_number(b.gamma) << "\nlambda = " << format_number(b.lambda)
           << "\nbeta = " << format_number(b.beta) << "\nform = " << to_string(b.form) << "\n\n";
    };
    const auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
        return s;
    };
    os << "[scenario]\nname = " << c.scenario << "\n\n";
    os << "[system]\nmass = " << format_number(c.system.mass) << "\nomega1 = " << format_number(c.system.omega1)
       << "\nomega2 = " << format_number(c.system.omega2) << "\nsigma = " << format_number(c.system.sigma) << "\n\n";
    bath("bath1", c.system.bath1);
    bath("bath2", c.system.bath2);
    os << "[state]\neta = " << format_number(c.state.eta) << "\ntheta = " << format_number(c.state.theta)
       << "\nnbar1 = " << format_number(c.state.nbar1) << "\nnbar2 = " << format_number(c.state.nbar2) << "\n\n";
    os << "[evolution]\nt_max = " << format_number(c.evolution.t_max) << "\nn_t = " << c.evolution.n_t
       << "\ntol = " << format_number(c.evolution.quadrature.rel_tol)
       << "\nmax_panels = " << c.evolution.quadrature.max_panels << "\n\n";
    os << "[sweep]\n";
    if (!c.lambdas.empty()) os << "lambdas = " << list(c.lambdas) << "\n";
    if (!c.betas.empty()) os << "betas = " << list(c.betas) << "\n";
    os << "\n[output]\ndir = " << c.out_dir.string() << "\n";
}

// ---------------------------------------------------------------- output

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const Table& table)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << "\n";
    }
}

std::vector<std::filesystem::path> write_result(const ScenarioResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& t : result.tables) {
        const auto path = dir / (t.name + ".csv");
        std::ofstream out(path);
        write_csv(out, t);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        written.push_back(path);
    }
    const auto path = dir / (result.scenario + "_summary.csv");
    std::ofstream out(path);
    out << "metric,value\n";
    for (const auto& [k, v] : result.metrics) out << k << "," << format_number(v) << "\n";
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
    return written;
}

// ---------------------------------------------------------------- scenarios

namespace {

SystemSpec symmetric_system(const ScenarioConfig& c, double lambda, double beta)
{
    SystemSpec s = c.system;
    s.bath1.lambda = lambda;
    s.bath1.beta = beta;
    s.bath2 = s.bath1;
    s.omega2 = s.omega1;
    return s;
}

ModeSpec single_oscillator(const ScenarioConfig& c, double lambda)
{
    ModeSpec m{c.system.omega1 * c.system.omega1, c.system.mass, c.system.bath1};
    m.bath.lambda = lambda;
    return m;
}

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

struct Timeline {
    CovarianceSeries series;
    EntanglementTimeline ent;
};

Timeline entanglement_run(const CovarianceEvolver& ev, const ScenarioConfig& c)
{
    const CovarianceMatrix init = initial_covariance(c.state);
    Timeline out;
    out.series = evolve(ev, init, c.evolution);
    const LambdaProbe probe = [&](double t) { return pt_symplectic_eigenvalues(ev.propagation(t).apply(init)).first; };
    out.ent = extract_events(out.series, probe);
    return out;
}

CovarianceEvolver::Route route_for(const SystemSpec& s)
{
    return s.is_symmetric() ? CovarianceEvolver::Route::NormalMode : CovarianceEvolver::Route::General;
}

// Crossing of g(lambda) = target bracketed by the first sign change on the grid.
double crossing(const std::vector<double>& grid, const std::function<double(double)>& g, double target)
{
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = g(grid[i - 1]) - target;
        const double b = g(grid[i]) - target;
        if (a == 0.0) return grid[i - 1];
        if ((a < 0.0) != (b < 0.0)) {
            boost::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve([&](double x) { return g(x) - target; }, grid[i - 1], grid[i], a,
                                                            b, boost::math::tools::eps_tolerance<double>(50), iters);
            return 0.5 * (r.first + r.second);
        }
    }
    return kNaN;
}

void run_eff_damp(const ScenarioConfig& c, ScenarioResult& r)
{
    auto [plus, minus] = normal_mode_split(c.system);
    const ModeSolutions sp = mode_solutions(plus), sm = mode_solutions(minus);
    Table t{"eff_damp", {"t", "d1_plus", "d1_minus", "neglog_abs_d1_plus", "neglog_abs_d1_minus"}, {}};
    for (double time : c.evolution.grid()) {
        const double a = sp.d1.value(time), b = sm.d1.value(time);
        t.rows.push_back({time, a, b, -std::log(std::abs(a)), -std::log(std::abs(b))});
    }
    r.tables.push_back(std::move(t));
    r.metrics.emplace_back("omega_plus_sq", plus.omega_sq);
    r.metrics.emplace_back("omega_minus_sq", minus.omega_sq);
    r.metrics.emplace_back("gamma_eff_plus", effective_damping(plus).gamma_eff);
    r.metrics.emplace_back("gamma_eff_minus", effective_damping(minus).gamma_eff);
}

void run_eff_damp_const(const ScenarioConfig& c, ScenarioResult& r)
{
    const double gamma = c.system.bath1.gamma;
    const double w = c.system.omega1;
    Table t{"eff_damp_const", {"lambda", "gamma_eff", "gamma_eff_series", "underdamped"}, {}};
    std::vector<EffectiveDamping> d(c.lambdas.size());
    parallel_for(static_cast<int>(c.lambdas.size()), c.evolution.workers, [&](int i) {
        d[static_cast<std::size_t>(i)] = effective_damping(single_oscillator(c, c.lambdas[static_cast<std::size_t>(i)]));
    });
    for (std::size_t i = 0; i < c.lambdas.size(); ++i)
        t.rows.push_back({c.lambdas[i], d[i].gamma_eff, effective_damping_series(gamma, c.lambdas[i], w),
                          d[i].underdamped ? 1.0 : 0.0});
    r.tables.push_back(std::move(t));
    const auto pole = [&](double l) { return effective_damping(single_oscillator(c, l)).gamma_eff; };
    const auto series = [&](double l) { return effective_damping_series(gamma, l, w); };
    r.metrics.emplace_back("lambda_cross_pole", crossing(c.lambdas, pole, gamma));
    r.metrics.emplace_back("lambda_cross_series", crossing(c.lambdas, series, gamma));
}

struct Cell {
    double lambda;
    double beta;
};

std::vector<Cell> cells(const ScenarioConfig& c)
{
    std::vector<Cell> out;
    for (double l : c.lambdas)
        for (double b : c.betas) out.push_back({l, b});
    return out;
}

std::string cell_name(const std::string& scenario, const Cell& cell)
{
    return scenario + "_lambda" + label(cell.lambda) + "_beta" + label(cell.beta);
}

void run_cov_memory_temp(const ScenarioConfig& c, ScenarioResult& r)
{
    const auto grid = cells(c);
    std::vector<Table> tables(grid.size());
    std::vector<double> steady(grid.size());
    const CovarianceMatrix init = initial_covariance(c.state);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const SystemSpec s = symmetric_system(c, grid[k].lambda, grid[k].beta);
        const CovarianceEvolver ev(s, CovarianceEvolver::Route::NormalMode, c.evolution.quadrature);
        const CovarianceSeries series = evolve(ev, init, c.evolution);
        Table t{cell_name(c.scenario, grid[k]), {"t", "sigma_xpxp"}, {}};
        for (std::size_t i = 0; i < series.times.size(); ++i)
            t.rows.push_back({series.times[i], to_normal_modes(series.values[i]).m(0, 0)});
        tables[k] = std::move(t);
        steady[k] = to_normal_modes(ev.steady_state()).m(0, 0);
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        r.tables.push_back(std::move(tables[k]));
        r.metrics.emplace_back("sigma_xpxp_inf_lambda" + label(grid[k].lambda) + "_beta" + label(grid[k].beta), steady[k]);
    }
}

void run_ent_memory_temp(const ScenarioConfig& c, ScenarioResult& r)
{
    for (const Cell& cell : cells(c)) {
        const SystemSpec s = symmetric_system(c, cell.lambda, cell.beta);
        const CovarianceEvolver ev(s, CovarianceEvolver::Route::NormalMode, c.evolution.quadrature);
        const Timeline tl = entanglement_run(ev, c);
        Table t{cell_name(c.scenario, cell), {"t", "lambda_minus_pt", "log_negativity"}, {}};
        for (std::size_t i = 0; i < tl.ent.times.size(); ++i)
            t.rows.push_back({tl.ent.times[i], tl.ent.lambda_minus_pt[i], tl.ent.log_negativity[i]});
        r.tables.push_back(std::move(t));
        const std::string suffix = "_lambda" + label(cell.lambda) + "_beta" + label(cell.beta);
        r.metrics.emplace_back("tau_ent" + suffix, or_nan(tl.ent.tau_ent));
        r.metrics.emplace_back("events" + suffix, static_cast<double>(tl.ent.events.size()));
    }
}

double steady_xpxp(const ScenarioConfig& c, double lambda, double beta)
{
    const SystemSpec s = symmetric_system(c, lambda, beta);
    return steady_fdr_integral(normal_mode_split(s).first, SteadyElement::PositionPosition, c.evolution.quadrature);
}

void run_ent_lt_vs_lambda(const ScenarioConfig& c, ScenarioResult& r)
{
    const auto grid = cells(c);
    std::vector<double> v(grid.size());
    parallel_for(static_cast<int>(grid.size()), c.evolution.workers, [&](int k) {
        const auto& g = grid[static_cast<std::size_t>(k)];
        v[static_cast<std::size_t>(k)] = steady_xpxp(c, g.lambda, g.beta);
    });
    Table t{"ent_lt_vs_lambda", {"lambda", "beta", "sigma_xpxp_inf"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) t.rows.push_back({grid[k].lambda, grid[k].beta, v[k]});
    r.tables.push_back(std::move(t));
}

void run_ent_lt_vs_temp(const ScenarioConfig& c, ScenarioResult& r)
{
    const auto grid = cells(c);
    std::vector<double> v(grid.size());
    parallel_for(static_cast<int>(grid.size()), c.evolution.workers, [&](int k) {
        const auto& g = grid[static_cast<std::size_t>(k)];
        v[static_cast<std::size_t>(k)] = steady_xpxp(c, g.lambda, g.beta);
    });
    Table t{"ent_lt_vs_temp", {"lambda", "temperature", "sigma_xpxp_inf"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) t.rows.push_back({grid[k].lambda, 1.0 / grid[k].beta, v[k]});
    r.tables.push_back(std::move(t));
}

const std::vector<double>& late_time_lambda_grid()
{
    static const std::vector<double> g = geometric(0.5, 100.0, 41);
    return g;
}

void run_ent_late_time(const ScenarioConfig& c, ScenarioResult& r)
{
    const auto lambda_pt = [&](double lambda, double beta) {
        return pt_symplectic_eigenvalues(steady_state(symmetric_system(c, lambda, beta), c.evolution.quadrature)).first;
    };
    const auto grid = cells(c);
    std::vector<double> left(grid.size());
    parallel_for(static_cast<int>(grid.size()), c.evolution.workers, [&](int k) {
        const auto& g = grid[static_cast<std::size_t>(k)];
        left[static_cast<std::size_t>(k)] = lambda_pt(g.lambda, g.beta);
    });
    Table t1{"ent_late_time_vs_temp", {"lambda", "temperature", "lambda_minus_pt_inf"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) t1.rows.push_back({grid[k].lambda, 1.0 / grid[k].beta, left[k]});

    const auto& lg = late_time_lambda_grid();
    std::vector<double> right(lg.size());
    parallel_for(static_cast<int>(lg.size()), c.evolution.workers, [&](int k) {
        right[static_cast<std::size_t>(k)] = lambda_pt(lg[static_cast<std::size_t>(k)], c.system.bath1.beta);
    });
    Table t2{"ent_late_time_vs_lambda", {"lambda", "beta", "lambda_minus_pt_inf"}, {}};
    for (std::size_t k = 0; k < lg.size(); ++k) t2.rows.push_back({lg[k], c.system.bath1.beta, right[k]});
    r.tables.push_back(std::move(t1));
    r.tables.push_back(std::move(t2));
}

void run_wm_vs_snm(const ScenarioConfig& c, ScenarioResult& r)
{
    const CovarianceEvolver nm(c.system, CovarianceEvolver::Route::NormalMode, c.evolution.quadrature);
    const CovarianceEvolver em(c.system, CovarianceEvolver::Route::EffectiveMarkovian, c.evolution.quadrature);
    const Timeline a = entanglement_run(nm, c);
    const Timeline b = entanglement_run(em, c);
    const ModeSolutions sn = mode_solutions(nm.mode(NormalMode::Plus));
    const ModeSolutions se = mode_solutions(em.mode(NormalMode::Plus));
    const double geff = em.mode(NormalMode::Plus).bath.gamma;

    Table t{"wm_vs_snm",
            {"t", "d1_plus_nm", "d1_plus_em", "envelope", "sigma_xpxp_nm", "sigma_xpxp_em", "I_plus_nm", "I_plus_em",
             "lambda_minus_pt_nm", "lambda_minus_pt_em"},
            {}};
    for (std::size_t i = 0; i < a.series.times.size(); ++i) {
        const double time = a.series.times[i];
        t.rows.push_back({time, sn.d1.value(time), se.d1.value(time), std::exp(-geff * time),
                          to_normal_modes(a.series.values[i]).m(0, 0), to_normal_modes(b.series.values[i]).m(0, 0),
                          uncertainty_functions(a.series.values[i]).first,
                          uncertainty_functions(b.series.values[i]).first, a.ent.lambda_minus_pt[i],
                          b.ent.lambda_minus_pt[i]});
    }
    r.tables.push_back(std::move(t));
    r.metrics.emplace_back("gamma_eff_plus", geff);
    r.metrics.emplace_back("gamma_eff_minus", em.mode(NormalMode::Minus).bath.gamma);
    r.metrics.emplace_back("tau_ent_nm", or_nan(a.ent.tau_ent));
    r.metrics.emplace_back("tau_ent_em", or_nan(b.ent.tau_ent));
    r.metrics.emplace_back("tau_ratio", or_nan(b.ent.tau_ent) / or_nan(a.ent.tau_ent));
    r.metrics.emplace_back("lambda_late_nm", a.ent.lambda_minus_pt.back());
    r.metrics.emplace_back("lambda_late_em", b.ent.lambda_minus_pt.back());
    r.metrics.emplace_back("lambda_steady_nm", pt_symplectic_eigenvalues(nm.steady_state()).first);
    r.metrics.emplace_back("lambda_steady_em", pt_symplectic_eigenvalues(em.steady_state()).first);
}

std::array<SystemSpec, 3> asym_triple(const ScenarioConfig& c)
{
    SystemSpec l1 = c.system, l2 = c.system;
    l1.bath2 = l1.bath1;
    l1.omega2 = l1.omega1;
    l2.bath1 = l2.bath2;
    l2.omega1 = l2.omega2;
    return {l1, c.system, l2};
}

void run_asym_xx(const ScenarioConfig& c, ScenarioResult& r)
{
    const CovarianceMatrix init = initial_covariance(c.state);
    const auto sys = asym_triple(c);
    std::array<CovarianceSeries, 3> runs;
    for (std::size_t k = 0; k < 3; ++k) runs[k] = evolve(CovarianceEvolver(sys[k], route_for(sys[k]), c.evolution.quadrature), init, c.evolution);

    Table left{"asym_xx_hybrid", {"t", "sigma_x1x1", "sigma_x2x2", "sigma_x1x2"}, {}};
    Table right{"asym_xx_symmetric", {"t", "sigma_x1x1_L1L1", "sigma_x1x1_L2L2"}, {}};
    for (std::size_t i = 0; i < runs[1].times.size(); ++i) {
        const auto& m = runs[1].values[i].m;
        left.rows.push_back({runs[1].times[i], m(0, 0), m(2, 2), m(0, 2)});
        right.rows.push_back({runs[1].times[i], runs[0].values[i].m(0, 0), runs[2].values[i].m(0, 0)});
    }
    r.tables.push_back(std::move(left));
    r.tables.push_back(std::move(right));
    const auto steady = steady_state(sys[1], c.evolution.quadrature);
    r.metrics.emplace_back("sigma_x1x1_inf", steady.m(0, 0));
    r.metrics.emplace_back("sigma_x2x2_inf", steady.m(2, 2));
    r.metrics.emplace_back("sigma_x1x2_inf", steady.m(0, 2));
}

void run_asym_symp(const ScenarioConfig& c, ScenarioResult& r)
{
    const auto sys = asym_triple(c);
    const std::array<std::string, 3> tag{"L1L1", "L1L2", "L2L2"};
    std::array<Timeline, 3> runs;
    Table t{"asym_symp", {"t", "lambda_minus_pt_L1L1", "lambda_minus_pt_L1L2", "lambda_minus_pt_L2L2"}, {}};
    for (std::size_t k = 0; k < 3; ++k) {
        const CovarianceEvolver ev(sys[k], route_for(sys[k]), c.evolution.quadrature);
        runs[k] = entanglement_run(ev, c);
        const auto& e = runs[k].ent;
        std::size_t revivals = 0;
        for (const auto& ev_ : e.events) revivals += ev_.kind == EventKind::Revival ? 1 : 0;
        r.metrics.emplace_back("tau_ent_" + tag[k], or_nan(e.tau_ent));
        r.metrics.emplace_back("lambda_late_" + tag[k], e.lambda_minus_pt.back());
        r.metrics.emplace_back("lambda_steady_" + tag[k], pt_symplectic_eigenvalues(ev.steady_state()).first);
        r.metrics.emplace_back("revivals_" + tag[k], static_cast<double>(revivals));
    }
    for (std::size_t i = 0; i < runs[0].ent.times.size(); ++i)
        t.rows.push_back({runs[0].ent.times[i], runs[0].ent.lambda_minus_pt[i], runs[1].ent.lambda_minus_pt[i],
                          runs[2].ent.lambda_minus_pt[i]});
    r.tables.push_back(std::move(t));
}

void base_defaults(ScenarioConfig& c)
{
    c.system = SystemSpec{};
    c.system.bath1 = BathSpec{0.5, 1.0, 10.0, CutoffForm::DoubleLorentzian};
    c.system.bath2 = c.system.bath1;
    c.state = TwoModeSqueezedThermal{};
    c.evolution = EvolutionConfig{};
}

const std::vector<double> kCellLambdas{1.0, 2.0, 5.0, 20.0};
const std::vector<double> kCellBetas{10.0, 2.0, 1.0, 0.5};

std::vector<double> temperature_betas()
{
    std::vector<double> b;
    for (double temp : geometric(0.05, 2.0, 33)) b.push_back(1.0 / temp);
    return b;
}

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> e{
        {{"eff_damp",
          "d1(t) of the two normal modes (omega^2 +- sigma) of a gamma=0.3 oscillator pair; effective decay",
          {"eff_damp: t,d1_plus,d1_minus,neglog_abs_d1_plus,neglog_abs_d1_minus"}},
         [](ScenarioConfig& c) {
             c.system.bath1.gamma = 0.3;
             c.system.bath2 = c.system.bath1;
             c.evolution.t_max = 60.0;
             c.evolution.n_t = 1201;
         },
         run_eff_damp},
        {{"eff_damp_const", "effective damping gamma_eff against cutoff scale lambda for one oscillator, gamma=0.3",
          {"eff_damp_const: lambda,gamma_eff,gamma_eff_series,underdamped"}},
         [](ScenarioConfig& c) {
             c.system.sigma = 0.0;
             c.system.bath1.gamma = 0.3;
             c.system.bath2 = c.system.bath1;
             c.lambdas = geometric(0.2, 100.0, 121);
         },
         run_eff_damp_const},
        {{"cov_memory_temp", "sigma_{x+x+}(t) on a (lambda, beta) grid of symmetric baths",
          {"cov_memory_temp_lambda<L>_beta<B>: t,sigma_xpxp"}},
         [](ScenarioConfig& c) {
             c.lambdas = kCellLambdas;
             c.betas = kCellBetas;
         },
         run_cov_memory_temp},
        {{"ent_memory_temp", "lambda_-^pt(t) and log-negativity on a (lambda, beta) grid of symmetric baths",
          {"ent_memory_temp_lambda<L>_beta<B>: t,lambda_minus_pt,log_negativity"}},
         [](ScenarioConfig& c) {
             c.lambdas = kCellLambdas;
             c.betas = kCellBetas;
         },
         run_ent_memory_temp},
        {{"ent_lt_vs_lambda", "late-time sigma_{x+x+} against lambda for several temperatures",
          {"ent_lt_vs_lambda: lambda,beta,sigma_xpxp_inf"}},
         [](ScenarioConfig& c) {
             c.lambdas = geometric(0.5, 100.0, 41);
             c.betas = {10.0, 1.0, 0.5};
         },
         run_ent_lt_vs_lambda},
        {{"ent_lt_vs_temp", "late-time sigma_{x+x+} against temperature for several cutoff scales",
          {"ent_lt_vs_temp: lambda,temperature,sigma_xpxp_inf"}},
         [](ScenarioConfig& c) {
             c.lambdas = kCellLambdas;
             c.betas = temperature_betas();
         },
         run_ent_lt_vs_temp},
        {{"ent_late_time",
          "late-time lambda_-^pt against temperature (lambdas) and against lambda in [0.5, 100] at bath1.beta",
          {"ent_late_time_vs_temp: lambda,temperature,lambda_minus_pt_inf",
           "ent_late_time_vs_lambda: lambda,beta,lambda_minus_pt_inf"}},
         [](ScenarioConfig& c) {
             c.lambdas = {1.0, 20.0};
             c.betas = temperature_betas();
         },
         run_ent_late_time},
        {{"wm_vs_snm", "exact non-Markovian dynamics against the effective weakly damped Markovian modes",
          {"wm_vs_snm: t,d1_plus_nm,d1_plus_em,envelope,sigma_xpxp_nm,sigma_xpxp_em,I_plus_nm,I_plus_em,"
           "lambda_minus_pt_nm,lambda_minus_pt_em"}},
         [](ScenarioConfig&) {}, run_wm_vs_snm},
        {{"asym_xx", "sigma_{x_i x_j}(t) for private baths with cutoffs (1, 20) and the two symmetric references",
          {"asym_xx_hybrid: t,sigma_x1x1,sigma_x2x2,sigma_x1x2",
           "asym_xx_symmetric: t,sigma_x1x1_L1L1,sigma_x1x1_L2L2"}},
         [](ScenarioConfig& c) { c.system.bath2.lambda = 20.0; },
         run_asym_xx},
        {{"asym_symp", "lambda_-^pt(t) for bath cutoffs (L1,L1), (L1,L2), (L2,L2) with L1=1, L2=20",
          {"asym_symp: t,lambda_minus_pt_L1L1,lambda_minus_pt_L1L2,lambda_minus_pt_L2L2"}},
         [](ScenarioConfig& c) {
             c.system.bath2.lambda = 20.0;
             c.evolution.t_max = 60.0;
             c.evolution.n_t = 1201;
         },
         run_asym_symp},
    };
    return e;
}

const Entry& find_entry(const std::string& name)
{
    for (const auto& e : entries())
        if (e.info.name == name) return e;
    throw ConfigError(std::vector<ConfigIssue>{{"scenario.name", "unknown scenario '" + name + "'"}});
}

} // namespace

const std::vector<ScenarioInfo>& scenario_registry()
{
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

bool is_scenario(const std::string& name)
{
    for (const auto& e : entries())
        if (e.info.name == name) return true;
    return false;
}

ScenarioConfig default_config(const std::string& name)
{
    const Entry& e = find_entry(name);
    ScenarioConfig c;
    c.scenario = name;
    base_defaults(c);
    e.defaults(c);
    c.state.mass = c.system.mass;
    c.state.omega = c.system.omega1;
    return c;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    ScenarioResult r;
    r.scenario = cfg.scenario;
    find_entry(cfg.scenario).run(cfg, r);
    return r;
}

} // namespace qbm
