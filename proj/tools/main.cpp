#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness.hpp"
#include "rfkl/error.hpp"

namespace {

using rfkl::harness::RunConfig;

// Flag values; an option only overrides the config when it was given.
struct Flags {
  std::string config;
  std::size_t dim = 0, m = 0, trials = 0, eval_samples = 0, jobs = 0;
  std::uint64_t T = 0, seed = 0;
  double half_width = 0, rho = 0, delta = 0, theta0_scale = 0, r_scale = 0;
  std::string schedule, out, radius_convention, domain_policy;
  bool no_timing = false;
  // subcommand specific
  std::string param, function;
  std::vector<double> values, rho_values;
  std::vector<int> n_values;
  std::vector<std::size_t> m_values;
  double correlation = 0, radius = 0;
  std::size_t pairs = 0, k = 0, samples = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "YAML config file (flags override it)");
  sub->add_option("--dim", f.dim, "dimension n");
  sub->add_option("--half-width", f.half_width, "half-width a of the support box [-a, a]^n");
  sub->add_option("--m", f.m, "number of neurons");
  sub->add_option("--T", f.T, "number of iterations");
  sub->add_option("--trials", f.trials, "independent trials");
  sub->add_option("--eval-samples", f.eval_samples, "evaluation samples from each of P and Q");
  sub->add_option("--schedule", f.schedule, "step-size schedule")->check(CLI::IsMember({"theorem", "experiment"}));
  sub->add_option("--rho", f.rho, "smoothness bound rho");
  sub->add_option("--delta", f.delta, "failure probability delta");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--jobs", f.jobs, "worker threads for trials");
  sub->add_option("--out", f.out, "output CSV path");
  sub->add_option("--radius-convention", f.radius_convention, "feature radius R: box (a) or circumradius (a sqrt(n))")
      ->check(CLI::IsMember({"box", "circumradius"}));
  sub->add_option("--theta0-scale", f.theta0_scale, "draw theta0 uniform on [-s/sqrt(m), s/sqrt(m)]^m");
  sub->add_option("--r-scale", f.r_scale, "multiplier on the schedule's gradient scale r");
  sub->add_option("--domain-policy", f.domain_policy, "samples outside the ball: reject or clip")
      ->check(CLI::IsMember({"reject", "clip"}));
  sub->add_flag("--no-timing", f.no_timing, "write runtime_ms = 0 so outputs are byte-comparable");
}

RunConfig resolve(CLI::App* sub, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = rfkl::harness::load_config(f.config);
  auto given = [sub](const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--dim")) c.dim = f.dim;
  if (given("--half-width")) {
    c.half_width = f.half_width;
    c.p.a = c.q.a = f.half_width;
  }
  if (given("--m")) c.m = f.m;
  if (given("--T")) c.T = f.T;
  if (given("--trials")) c.trials = c.verify.trials = f.trials;
  if (given("--eval-samples")) c.eval_samples = f.eval_samples;
  if (given("--schedule")) c.schedule = rfkl::parse_schedule_kind(f.schedule);
  if (given("--rho")) {
    c.rho = f.rho;
    c.rho_supplied = true;
  }
  if (given("--delta")) c.delta = f.delta;
  if (given("--seed")) c.seed = f.seed;
  if (given("--jobs")) c.jobs = f.jobs;
  if (given("--out")) c.out = f.out;
  if (given("--radius-convention")) c.radius_convention = rfkl::harness::parse_radius_convention(f.radius_convention);
  if (given("--theta0-scale")) c.theta0_scale = f.theta0_scale;
  if (given("--r-scale")) c.r_scale = f.r_scale;
  if (given("--domain-policy")) {
    c.domain_policy = f.domain_policy == "clip" ? rfkl::DomainPolicy::clip : rfkl::DomainPolicy::reject;
  }
  if (f.no_timing) c.timing = false;
  if (given("--param")) c.sweep.param = f.param;
  if (given("--values")) c.sweep.values = f.values;
  if (given("--correlation")) c.mi.correlation = f.correlation;
  if (given("--pairs")) c.mi.pairs = f.pairs;
  if (given("--n-values")) c.constants.n_values = f.n_values;
  if (given("--rho-values")) c.constants.rho_values = f.rho_values;
  if (given("--radius")) c.constants.radius = c.verify.radius = f.radius;
  if (given("--function")) c.verify.function = f.function;
  if (given("--m-values")) c.verify.m_values = f.m_values;
  if (given("--k")) c.baseline.k = f.k;
  if (given("--samples")) c.baseline.samples = f.samples;

  if (c.dim == 0 || c.m == 0 || c.T == 0 || c.trials == 0 || c.eval_samples == 0 || c.jobs == 0) {
    throw rfkl::ConfigError("dim, m, T, trials, eval-samples and jobs must be positive");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw rfkl::ConfigError("delta must lie in (0, 1)");
  if (!(c.rho > 0.0) || !(c.half_width > 0.0) || !(c.r_scale > 0.0) || c.theta0_scale < 0.0) {
    throw rfkl::ConfigError("rho, half-width and r-scale must be positive; theta0-scale nonnegative");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-feature KL divergence estimation and verification"};
  app.set_version_flag("--version", rfkl::harness::kToolVersion);
  app.require_subcommand(1);
  Flags f;

  auto* estimate = app.add_subcommand("estimate", "train and evaluate the KL estimator over trials");
  auto* sweep = app.add_subcommand("sweep", "vary m or T and summarize the error");
  auto* mi = app.add_subcommand("mi", "mutual information of a correlated box Gaussian");
  auto* constants = app.add_subcommand("constants", "constant factors over a grid of n and rho");
  auto* verify = app.add_subcommand("verify-approx", "approximation error of sampled random-feature networks");
  auto* baseline = app.add_subcommand("baseline", "k-nearest-neighbour KL estimate");
  for (auto* sub : {estimate, sweep, mi, constants, verify, baseline}) add_common(sub, f);

  sweep->add_option("--param", f.param, "swept parameter")->check(CLI::IsMember({"m", "T"}));
  sweep->add_option("--values", f.values, "values of the swept parameter")->delimiter(',');
  mi->add_option("--correlation", f.correlation, "correlation of the pair");
  mi->add_option("--pairs", f.pairs, "number of (a, b) pairs");
  constants->add_option("--n-values", f.n_values, "dimensions")->delimiter(',');
  constants->add_option("--rho-values", f.rho_values, "smoothness bounds")->delimiter(',');
  constants->add_option("--radius", f.radius, "domain radius R");
  verify->add_option("--function", f.function, "test function")->check(CLI::IsMember({"gaussian", "mixture"}));
  verify->add_option("--m-values", f.m_values, "neuron counts")->delimiter(',');
  verify->add_option("--radius", f.radius, "ball radius R");
  baseline->add_option("--k", f.k, "neighbour index");
  baseline->add_option("--samples", f.samples, "samples from each of P and Q");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const RunConfig c = resolve(sub, f);
      const std::string name = sub->get_name();
      if (name == "estimate") return rfkl::harness::cmd_estimate(c, std::cout);
      if (name == "sweep") return rfkl::harness::cmd_sweep(c, std::cout);
      if (name == "mi") return rfkl::harness::cmd_mi(c, std::cout);
      if (name == "constants") return rfkl::harness::cmd_constants(c, std::cout);
      if (name == "verify-approx") return rfkl::harness::cmd_verify_approx(c, std::cout);
      if (name == "baseline") return rfkl::harness::cmd_baseline(c, std::cout);
    }
  } catch (const rfkl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rfkl::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rfkl::DimensionMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
