#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "harness.hpp"
#include "rfkl/error.hpp"

using namespace rfkl;
using namespace rfkl::harness;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.m = 10;
  c.T = 2000;
  c.trials = 3;
  c.eval_samples = 500;
  c.timing = false;
  return c;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("rfkl_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(RFKL_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("YAML config sets every documented key") {
  const std::string text =
      "dim: 3\n"
      "half_width: 1.5\n"
      "m: 64\n"
      "T: 1000\n"
      "trials: 4\n"
      "eval_samples: 100\n"
      "schedule: theorem\n"
      "rho: 0.5\n"
      "delta: 0.05\n"
      "seed: 99\n"
      "jobs: 2\n"
      "radius_convention: circumradius\n"
      "theta0_scale: 0.1\n"
      "r_scale: 2\n"
      "domain_policy: clip\n"
      "timing: false\n"
      "p: {kind: uniform}\n"
      "q: {kind: trunc_gauss, a: 1.5}\n"
      "sweep: {param: m, values: [10, 20]}\n"
      "mi: {correlation: 0.3, pairs: 500}\n"
      "constants: {n: [1, 2], rho: [1.0], radius: 3}\n"
      "verify: {function: mixture, m: [8, 16], trials: 2, radius: 0.5, spacings: [0.1]}\n"
      "baseline: {k: 2, samples: 50}\n";
  const RunConfig c = load_config_text(text, "cfg.yaml");
  CHECK(c.dim == 3);
  CHECK(c.p.a == 1.5);
  CHECK(c.p.kind == "uniform");
  CHECK(c.q.kind == "trunc_gauss");
  CHECK(c.m == 64);
  CHECK(c.T == 1000);
  CHECK(c.schedule == ScheduleKind::theorem);
  CHECK(c.rho_supplied);
  CHECK(c.delta == 0.05);
  CHECK(c.seed == 99);
  CHECK(c.jobs == 2);
  CHECK(c.radius_convention == RadiusConvention::circumradius);
  CHECK(c.domain_policy == DomainPolicy::clip);
  CHECK(!c.timing);
  CHECK(c.sweep.param == "m");
  CHECK(c.sweep.values == std::vector<double>{10, 20});
  CHECK(c.mi.pairs == 500);
  CHECK(c.constants.n_values == std::vector<int>{1, 2});
  CHECK(c.verify.function == "mixture");
  CHECK(c.verify.spacings == std::vector<double>{0.1});
  CHECK(c.baseline.k == 2);
  CHECK(feature_radius(c) == doctest::Approx(1.5 * std::sqrt(3.0)));
  RunConfig b = c;
  b.radius_convention = RadiusConvention::box;
  CHECK(feature_radius(b) == 1.5);
}

TEST_CASE("config errors name the file and line") {
  auto message = [](const std::string& text) -> std::string {
    try {
      load_config_text(text, "bad.yaml");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  const std::string unknown = message("m: 10\nT: 100\nneurons: 5\n");
  CHECK(unknown.find("bad.yaml:3:") != std::string::npos);
  CHECK(unknown.find("neurons") != std::string::npos);
  CHECK(message("m: ten\n").find("bad.yaml:1:") != std::string::npos);
  CHECK(message("m: -3\n").find("bad.yaml:1:") != std::string::npos);
  CHECK(message("sweep:\n  param: m\n  step: 2\n").find("bad.yaml:3:") != std::string::npos);
  CHECK(message("schedule: fast\n").find("bad.yaml:1:") != std::string::npos);
  CHECK(message("p: {kind: cauchy}\n") != "");
  CHECK(message("delta: 1.5\n") != "");
  CHECK(message("m: [1, 2\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("resolved-config JSON omits jobs and out") {
  RunConfig a = small_config(), b = small_config();
  b.jobs = 8;
  b.out = "/tmp/x.csv";
  CHECK(config_json(a, "estimate") == config_json(b, "estimate"));
  b.seed = 1;
  CHECK(config_json(a, "estimate") != config_json(b, "estimate"));
  CHECK(config_json(a, "estimate").find('\n') == std::string::npos);
}

TEST_CASE("CSV formatting round-trips doubles and escapes fields") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  gen::for_all(1000, 91, [](Rng& rng, std::size_t) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::stod(format_double(v)) == v);
  });
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("sweep summaries: median, mean, standard error, 3-SE bars") {
  std::vector<RunRecord> recs(4);
  const double errs[] = {0.1, 0.4, 0.2, 0.3};
  for (int i = 0; i < 4; ++i) recs[i].abs_err = errs[i];
  const SweepRow r = summarize("T", 100, recs);
  CHECK(r.median_err == doctest::Approx(0.25));
  CHECK(r.mean_err == doctest::Approx(0.25));
  CHECK(r.std_err_of_mean == doctest::Approx(std::sqrt(0.05 / 3.0) / 2.0));
  CHECK(r.trials == 4);
  std::ostringstream os;
  write_sweep_csv(os, {r});
  CHECK(os.str().find("param,value,median_err,mean_err,std_err_of_mean,trials,err_lo,err_hi\r\n") == 0);
  CHECK(os.str().find(format_double(r.mean_err + 3 * r.std_err_of_mean)) != std::string::npos);
}

TEST_CASE("T = 1 with zero theta0 gives kl_hat = 0") {
  RunConfig c = small_config();
  c.T = 1;
  c.trials = 1;
  const auto recs = run_trials(c, 0);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].kl_hat == 0.0);
  CHECK(recs[0].abs_err == recs[0].kl_true);
  CHECK(recs[0].runtime_ms == 0.0);
}

TEST_CASE("records do not depend on the thread count") {
  RunConfig c = small_config();
  c.trials = 5;
  const auto a = run_trials(c, 0);
  c.jobs = 3;
  const auto b = run_trials(c, 0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].trial == i);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].kl_hat == b[i].kl_hat);
    CHECK(a[i].abs_err == doctest::Approx(std::abs(a[i].kl_hat - a[i].kl_true)).epsilon(1e-15));
  }
  CHECK(a[0].seed != a[1].seed);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hit[i]++; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw NumericalFailure("x"); }), NumericalFailure);
}

TEST_CASE("estimate output carries the header and is reproducible") {
  const RunConfig c = small_config();
  std::ostringstream a, b;
  cmd_estimate(c, a);
  cmd_estimate(c, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("# rfkl 0.1.0 estimate {", 0) == 0);
  CHECK(count_lines(a.str()) == 2 + c.trials);
}

TEST_CASE("constants report has 30 rows") {
  std::ostringstream os;
  cmd_constants(RunConfig{}, os);
  CHECK(count_lines(os.str()) == 32);
  CHECK(os.str().find("n,rho,kappa,beta1,beta2,status\r\n") != std::string::npos);
}

TEST_CASE("m-sweep summary rows come out sorted by m") {
  RunConfig c = small_config();
  c.trials = 2;
  c.sweep.param = "m";
  c.sweep.values = {20, 5, 10};
  std::ostringstream os;
  cmd_sweep(c, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<double> seen;
  while (std::getline(in, line)) seen.push_back(std::stod(line.substr(line.find(',') + 1)));
  CHECK(seen == std::vector<double>{5, 10, 20});
  c.sweep.values = {10};
  CHECK_THROWS_AS(cmd_sweep(c, os), ConfigError);
  c.sweep.values = {10, 2.5};
  CHECK_THROWS_AS(cmd_sweep(c, os), ConfigError);
}

TEST_CASE("baseline and verify-approx emit their schemas") {
  RunConfig c = small_config();
  c.trials = 2;
  c.baseline.samples = 300;
  std::ostringstream b;
  cmd_baseline(c, b);
  CHECK(b.str().find(",knn\r\n") != std::string::npos);
  CHECK(count_lines(b.str()) == 4);

  c.verify.m_values = {16, 32};
  c.verify.trials = 2;
  c.verify.spacings = {0.1, 0.05};
  std::ostringstream v;
  cmd_verify_approx(c, v);
  CHECK(v.str().find("m,trial,linf_error,prop1_bound\r\n") != std::string::npos);
  CHECK(count_lines(v.str()) == 2 + 4);
}

TEST_CASE("mi emits one record per trial") {
  RunConfig c = small_config();
  c.mi.pairs = 400;
  std::ostringstream os;
  cmd_mi(c, os);
  CHECK(count_lines(os.str()) == 2 + c.trials);
}

TEST_CASE("the binary: exit codes, files and flag overrides") {
  const fs::path dir = scratch_dir();
  const fs::path log = dir / "log.txt";
  CHECK(run_cli("--help", log) == 0);
  CHECK(run_cli("estimate --m 0", log) == 2);
  CHECK(run_cli("estimate --bogus", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(run_cli("estimate --config " + (dir / "missing.yaml").string(), log) == 2);

  {
    std::ofstream cfg(dir / "bad.yaml");
    cfg << "m: 10\nwidth: 3\n";
  }
  CHECK(run_cli("estimate --config " + (dir / "bad.yaml").string(), log) == 2);
  CHECK(slurp(log).find("bad.yaml:2:") != std::string::npos);

  // The theorem schedule needs finite rate constants; rho = 10 overflows them.
  CHECK(run_cli("estimate --schedule theorem --rho 10 --T 10 --trials 1", log) == 3);

  {
    std::ofstream cfg(dir / "ok.yaml");
    cfg << "m: 40\nT: 300\ntrials: 2\neval_samples: 100\nrho: 0.5\n";
  }
  const fs::path out = dir / "est.csv";
  REQUIRE(run_cli("estimate --config " + (dir / "ok.yaml").string() + " --m 12 --no-timing --out " + out.string(),
                  log) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("\"m\":12") != std::string::npos);
  CHECK(csv.find("\"T\":300") != std::string::npos);
  CHECK(count_lines(csv) == 4);
  const std::string json = slurp(dir / "est.json");
  CHECK(json.find("\"bound\"") != std::string::npos);

  const fs::path sweep = dir / "sweep.csv";
  REQUIRE(run_cli("sweep --param T --values 100,200 --m 5 --trials 2 --eval-samples 50 --no-timing --out " +
                      sweep.string(),
                  log) == 0);
  CHECK(count_lines(slurp(sweep)) == 2 + 4);
  CHECK(count_lines(slurp(dir / "sweep_summary.csv")) == 2 + 2);

  REQUIRE(run_cli("constants --n-values 1,2 --rho-values 1", log) == 0);
  CHECK(count_lines(slurp(log)) == 4);
  fs::remove_all(dir);
}

TEST_CASE("shipped configs load") {
  std::size_t loaded = 0;
  for (const auto& entry : fs::directory_iterator(RFKL_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++loaded;
  }
  CHECK(loaded >= 6);
  const RunConfig five = load_config(std::string(RFKL_CONFIG_DIR) + "/experiment_5d.yaml");
  CHECK(five.dim == 5);
  CHECK(five.m == 100);
  CHECK(five.T == 1000000);
  CHECK(five.rho == 1000.0);
}
