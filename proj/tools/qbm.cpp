// Command-line front end: list | validate <file> | run <scenario> [--config f] [--out d] [--tol x]
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "qbm/errors.hpp"
#include "qbm/scenario.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

void print_list()
{
    for (const auto& info : qbm::scenario_registry()) {
        std::cout << info.name << "\n  " << info.description << "\n";
        const qbm::ScenarioConfig c = qbm::default_config(info.name);
        const auto& s = c.system;
        std::cout << "  defaults: m=" << s.mass << " omega1=" << s.omega1 << " omega2=" << s.omega2
                  << " sigma=" << s.sigma << " gamma=" << s.bath1.gamma << " beta=" << s.bath1.beta
                  << " lambda1=" << s.bath1.lambda << " lambda2=" << s.bath2.lambda
                  << " form=" << qbm::to_string(s.bath1.form) << " eta=" << c.state.eta
                  << " t_max=" << c.evolution.t_max << " n_t=" << c.evolution.n_t << "\n";
        for (const auto& t : info.tables) std::cout << "  csv " << t << "\n";
    }
}

void report_quadrature(const qbm::QuadratureReport& r)
{
    std::cerr << "  value=" << r.value << " abs_error=" << r.abs_error << " evaluations=" << r.evaluations
              << " panels=" << r.panels << " kappa_max=" << r.kappa_max << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coupled quantum Brownian oscillators in private non-Markovian baths"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List scenarios with defaults and CSV schemas");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file and print the resolved configuration");
    validate->add_option("file", validate_path, "INI config file")->required();

    std::string scenario;
    std::string config_path;
    std::string out_dir;
    std::optional<double> tol;
    auto* run = app.add_subcommand("run", "Run a scenario and write its CSV tables");
    run->add_option("scenario", scenario, "Scenario name (see list)")->required();
    run->add_option("--config", config_path, "INI config file overriding the scenario defaults");
    run->add_option("--out", out_dir, "Output directory (default: output.dir or .)");
    run->add_option("--tol", tol, "Relative quadrature tolerance in (0, 1e-2]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigExit;
    }

    try {
        if (*list) {
            print_list();
            return 0;
        }
        if (*validate) {
            const qbm::ScenarioConfig cfg = qbm::load_config(validate_path);
            qbm::print_config(std::cout, cfg);
            return 0;
        }
        qbm::ScenarioConfig cfg =
            config_path.empty() ? qbm::default_config(scenario) : qbm::load_config(config_path, scenario);
        if (cfg.scenario != scenario)
            throw qbm::ConfigError(std::vector<qbm::ConfigIssue>{
                {"scenario.name", "config names '" + cfg.scenario + "' but '" + scenario + "' was requested"}});
        if (tol) cfg.evolution.quadrature.rel_tol = *tol;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();
        const qbm::ScenarioResult result = qbm::run_scenario(cfg);
        for (const auto& path : qbm::write_result(result, cfg.out_dir)) std::cout << "wrote " << path.string() << "\n";
        for (const auto& [k, v] : result.metrics) std::cout << k << " = " << qbm::format_number(v) << "\n";
        return 0;
    } catch (const qbm::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfigExit;
    } catch (const qbm::DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kConfigExit;
    } catch (const qbm::QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        report_quadrature(e.report());
        return kNumericExit;
    } catch (const qbm::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericExit;
    }
}
