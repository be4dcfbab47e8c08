#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfkl/constants.hpp"
#include "rfkl/distributions.hpp"
#include "rfkl/optimizer.hpp"

namespace rfkl::harness {

inline constexpr const char* kToolVersion = "0.1.0";

enum class RadiusConvention { box, circumradius };

struct SweepSpec {
  std::string param = "T";  // m | T
  std::vector<double> values;
};

struct MiSpec {
  double correlation = 0.5;
  std::size_t pairs = 20000;
  std::size_t a_dim = 1;
};

struct ConstantsSpec {
  std::vector<int> n_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> rho_values{0.1, 1.0, 10.0};
  double radius = 2.0;
};

struct VerifySpec {
  std::string function = "gaussian";  // gaussian | mixture
  std::vector<std::size_t> m_values{64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t trials = 30;
  double radius = 1.0;
  /// L-infinity grid spacings, coarsest first.
  std::vector<double> spacings{0.02, 0.01, 0.005, 0.0025, 0.00125, 0.000625};
};

struct BaselineSpec {
  std::size_t k = 1;
  std::size_t samples = 10000;
};

/// Everything a subcommand needs, after the config file and flags are merged.
struct RunConfig {
  std::size_t dim = 2;
  double half_width = 2.0;
  std::size_t m = 50;
  std::uint64_t T = 500000;
  std::size_t trials = 10;
  std::size_t eval_samples = 5000;
  ScheduleKind schedule = ScheduleKind::experiment;
  double rho = 1.0;
  bool rho_supplied = false;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  RadiusConvention radius_convention = RadiusConvention::box;
  /// Zero starts at theta = 0; s > 0 draws theta0 uniform on
  /// [-s/sqrt(m), s/sqrt(m)]^m and projects it onto the box.
  double theta0_scale = 0.0;
  /// Multiplies the schedule's r.
  double r_scale = 1.0;
  DomainPolicy domain_policy = DomainPolicy::reject;
  bool timing = true;
  DistributionSpec p{"trunc_gauss", 2.0, 0.0};
  DistributionSpec q{"uniform", 2.0, 0.0};
  SweepSpec sweep;
  MiSpec mi;
  ConstantsSpec constants;
  VerifySpec verify;
  BaselineSpec baseline;
};

std::string_view to_string(RadiusConvention c);
RadiusConvention parse_radius_convention(std::string_view s);

/// Loads a YAML config over `base`. Unknown keys and ill-typed values raise
/// ConfigError naming the file, line and column.
RunConfig load_config(const std::string& path, RunConfig base = {});
RunConfig load_config_text(const std::string& text, const std::string& origin,
                           RunConfig base = {});

/// Single-line JSON of the resolved config, without jobs and out (they do
/// not affect results).
std::string config_json(const RunConfig& config, const std::string& command);

struct RunRecord {
  std::size_t trial = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t T = 0;
  std::uint64_t seed = 0;
  double kl_hat = 0.0;
  double kl_true = 0.0;
  double abs_err = 0.0;
  double runtime_ms = 0.0;
  std::string schedule_kind;  // theorem | experiment | knn
};

struct SweepRow {
  std::string param;
  double value = 0.0;
  double median_err = 0.0;
  double mean_err = 0.0;
  double std_err_of_mean = 0.0;
  std::size_t trials = 0;
};

/// Radius of the feature map and of the coefficient box.
double feature_radius(const RunConfig& config);
DistributionPair make_pair(const RunConfig& config);

/// One train-and-evaluate trial. `group` separates sweep points so that
/// every (group, trial) has its own seed.
RunRecord run_trial(const RunConfig& config, const DistributionPair& pair,
                    double kl_true, std::uint64_t group, std::size_t trial);

/// All trials of one configuration, on `config.jobs` threads; the result
/// order and content do not depend on the thread count.
std::vector<RunRecord> run_trials(const RunConfig& config, std::uint64_t group);

SweepRow summarize(const std::string& param, double value,
                   const std::vector<RunRecord>& records);

/// Runs `job(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& job);

/// RFC 4180 CSV with 17 significant digits.
std::string format_double(double v);
std::string csv_escape(const std::string& s);

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Subcommands; each writes its CSV to `os` and, with an output path, to
/// that file (plus side files). Return the process exit code.
int cmd_estimate(const RunConfig& config, std::ostream& os);
int cmd_sweep(const RunConfig& config, std::ostream& os);
int cmd_mi(const RunConfig& config, std::ostream& os);
int cmd_constants(const RunConfig& config, std::ostream& os);
int cmd_verify_approx(const RunConfig& config, std::ostream& os);
int cmd_baseline(const RunConfig& config, std::ostream& os);

}  // namespace rfkl::harness
