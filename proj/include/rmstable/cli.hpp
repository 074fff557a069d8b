#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmstable/ensembles.hpp"

namespace rms {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kCapabilityError = 3 };

struct CliOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::filesystem::path out = "out";
    int threads = 1;
    bool verbose = false;
};

// Ensemble block of a config ("ensemble" or "source").
struct EnsembleConfig {
    std::string kind;  // gue, gaussian, elliptical, dirac, doa_pareto, direction, dyadic
    std::size_t dim = 2;
    double alpha = 2.0;
    double gamma = 1.0;
    double y0 = 0.0;
    double sigma = 1.0;
    double kappa = 0.0;
    double p = 0.5;
    SpectralMeasure measure = Isotropic{};
};

SpectralMeasure parse_measure(const nlohmann::json& j, const std::string& ptr, std::size_t dim);
EnsembleConfig parse_ensemble(const nlohmann::json& j, const std::string& ptr);
EnsembleSpec parse_spec(const nlohmann::json& j, const std::string& ptr);
SampleBatch draw_ensemble(const EnsembleConfig& e, std::size_t n, const Stream& stream);

// Throws ConfigError naming the offending field by JSON pointer.
void validate_config(const nlohmann::json& cfg, const std::string& command);

// Runs one of sample, cf, dp-check, clt, tail. Writes artifacts under opt.out.
int run_command(const std::string& command, const CliOptions& opt, std::ostream& log);
int run_report(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out, std::ostream& log);

}  // namespace rms
