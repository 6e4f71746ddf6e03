#pragma once

// Scenario registry, configuration files and CSV output for the command-line tool.
//
// Config files are INI-style with the sections
//   [scenario]  name
//   [system]    mass, omega1, omega2, sigma
//   [bath1]     gamma, lambda, beta, form        (same keys for [bath2])
//   [state]     eta, theta, nbar1, nbar2
//   [evolution] t_max, n_t, tol, max_panels
//   [sweep]     lambdas, betas                  (comma-separated lists)
//   [output]    dir
// Missing keys keep the scenario defaults; unknown sections or keys are errors.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbm/covariance.hpp"

namespace qbm {

struct ConfigIssue {
    std::string path;     // e.g. "bath1.lambda"
    std::string message;  // violated invariant
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    [[nodiscard]] const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct ScenarioConfig {
    std::string scenario;
    SystemSpec system{};
    TwoModeSqueezedThermal state{};  // mass and omega follow the system
    EvolutionConfig evolution{};
    std::vector<double> lambdas;     // cutoff sweep
    std::vector<double> betas;       // temperature sweep
    std::filesystem::path out_dir{"."};

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
    std::string scenario;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, double>> metrics;
};

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::vector<std::string> tables;  // "stem: col1,col2,..."
};

const std::vector<ScenarioInfo>& scenario_registry();
bool is_scenario(const std::string& name);

/// Registry defaults for a scenario.  Throws ConfigError for an unknown name.
ScenarioConfig default_config(const std::string& name);

/// Reads an INI file on top of the defaults of its [scenario] name (or of
/// `fallback_scenario` when given and the file names none).  Throws ConfigError.
ScenarioConfig load_config(const std::filesystem::path& path, const std::string& fallback_scenario = {});

/// Parses INI text; `origin` is used in messages.
ScenarioConfig parse_config(const std::string& text, const std::string& fallback_scenario = {},
                            const std::string& origin = "<string>");

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Writes every table as <dir>/<name>.csv and the metrics as <dir>/<scenario>_summary.csv.
/// Returns the files written.
std::vector<std::filesystem::path> write_result(const ScenarioResult& result, const std::filesystem::path& dir);

void write_csv(std::ostream& os, const Table& table);
/// %.17g formatting used for all numeric output.
std::string format_number(double x);

void print_config(std::ostream& os, const ScenarioConfig& cfg);

} // namespace qbm
