#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "rfkl/approx_verify.hpp"
#include "rfkl/baseline.hpp"
#include "rfkl/error.hpp"
#include "rfkl/estimator.hpp"
#include "rfkl/features.hpp"
#include "rfkl/rng.hpp"

namespace rfkl::harness {

using nlohmann::json;

std::string_view to_string(RadiusConvention c) {
  return c == RadiusConvention::box ? "box" : "circumradius";
}

RadiusConvention parse_radius_convention(std::string_view s) {
  if (s == "box") return RadiusConvention::box;
  if (s == "circumradius") return RadiusConvention::circumradius;
  throw ConfigError("radius convention must be 'box' or 'circumradius', got '" + std::string(s) + "'");
}

namespace {

std::string_view to_string(DomainPolicy p) { return p == DomainPolicy::reject ? "reject" : "clip"; }

DomainPolicy parse_policy(std::string_view s) {
  if (s == "reject") return DomainPolicy::reject;
  if (s == "clip") return DomainPolicy::clip;
  throw ConfigError("domain policy must be 'reject' or 'clip', got '" + std::string(s) + "'");
}

// ---- YAML loading -------------------------------------------------------

class YamlReader {
 public:
  explicit YamlReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    const YAML::Mark mk = node.Mark();
    std::ostringstream os;
    os << origin_;
    if (mk.line >= 0) os << ":" << mk.line + 1 << ":" << mk.column + 1;
    os << ": " << what;
    throw ConfigError(os.str());
  }

  template <class T>
  T as(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
    }
  }

  template <class T>
  T positive(const YAML::Node& node, const std::string& key) const {
    const T v = as<T>(node, key);
    if (!(v > T{0})) fail(node, "'" + key + "' must be positive");
    return v;
  }

  template <class T>
  std::vector<T> list(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(node, "'" + key + "' must be a list");
    std::vector<T> out;
    for (const auto& item : node) out.push_back(as<T>(item, key));
    return out;
  }

  void require_map(const YAML::Node& node, const std::string& key) const {
    if (!node.IsMap()) fail(node, "'" + key + "' must be a mapping");
  }

  DistributionSpec distribution(const YAML::Node& node, const std::string& key,
                                DistributionSpec spec) const {
    require_map(node, key);
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      if (k == "kind") {
        spec.kind = as<std::string>(kv.second, key + ".kind");
        if (spec.kind != "trunc_gauss" && spec.kind != "uniform" && spec.kind != "corr_gauss") {
          fail(kv.second, "unknown distribution kind '" + spec.kind + "'");
        }
      } else if (k == "a") {
        spec.a = positive<double>(kv.second, key + ".a");
      } else if (k == "correlation") {
        spec.correlation = as<double>(kv.second, key + ".correlation");
        if (!(std::abs(spec.correlation) < 1.0)) fail(kv.second, "correlation must lie in (-1, 1)");
      } else {
        fail(kv.first, "unknown key '" + key + "." + k + "'");
      }
    }
    return spec;
  }

 private:
  std::string origin_;
};

void apply_yaml(const YAML::Node& root, const std::string& origin, RunConfig& c) {
  YamlReader rd(origin);
  if (root.IsNull()) return;
  rd.require_map(root, "config");
  // Scalars first so that p and q can refine the half-width.
  for (const auto& kv : root) {
    const std::string k = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (k == "dim") {
      c.dim = rd.positive<std::size_t>(v, k);
    } else if (k == "half_width") {
      c.half_width = rd.positive<double>(v, k);
      c.p.a = c.q.a = c.half_width;
    } else if (k == "m") {
      c.m = rd.positive<std::size_t>(v, k);
    } else if (k == "T") {
      c.T = rd.positive<std::uint64_t>(v, k);
    } else if (k == "trials") {
      c.trials = rd.positive<std::size_t>(v, k);
    } else if (k == "eval_samples") {
      c.eval_samples = rd.positive<std::size_t>(v, k);
    } else if (k == "schedule") {
      try {
        c.schedule = parse_schedule_kind(rd.as<std::string>(v, k));
      } catch (const InvalidArgument& e) {
        rd.fail(v, e.what());
      }
    } else if (k == "rho") {
      c.rho = rd.positive<double>(v, k);
      c.rho_supplied = true;
    } else if (k == "delta") {
      c.delta = rd.as<double>(v, k);
      if (!(c.delta > 0.0 && c.delta < 1.0)) rd.fail(v, "'delta' must lie in (0, 1)");
    } else if (k == "seed") {
      c.seed = rd.as<std::uint64_t>(v, k);
    } else if (k == "jobs") {
      c.jobs = rd.positive<std::size_t>(v, k);
    } else if (k == "out") {
      c.out = rd.as<std::string>(v, k);
    } else if (k == "radius_convention") {
      try {
        c.radius_convention = parse_radius_convention(rd.as<std::string>(v, k));
      } catch (const ConfigError& e) {
        rd.fail(v, e.what());
      }
    } else if (k == "theta0_scale") {
      c.theta0_scale = rd.as<double>(v, k);
      if (!(c.theta0_scale >= 0.0)) rd.fail(v, "'theta0_scale' must be nonnegative");
    } else if (k == "r_scale") {
      c.r_scale = rd.positive<double>(v, k);
    } else if (k == "domain_policy") {
      try {
        c.domain_policy = parse_policy(rd.as<std::string>(v, k));
      } catch (const ConfigError& e) {
        rd.fail(v, e.what());
      }
    } else if (k == "timing") {
      c.timing = rd.as<bool>(v, k);
    } else if (k == "p" || k == "q") {
      // second pass
    } else if (k == "sweep") {
      rd.require_map(v, k);
      for (const auto& s : v) {
        const std::string sk = s.first.as<std::string>();
        if (sk == "param") {
          c.sweep.param = rd.as<std::string>(s.second, "sweep.param");
          if (c.sweep.param != "m" && c.sweep.param != "T") rd.fail(s.second, "sweep.param must be 'm' or 'T'");
        } else if (sk == "values") {
          c.sweep.values = rd.list<double>(s.second, "sweep.values");
        } else {
          rd.fail(s.first, "unknown key 'sweep." + sk + "'");
        }
      }
    } else if (k == "mi") {
      rd.require_map(v, k);
      for (const auto& s : v) {
        const std::string sk = s.first.as<std::string>();
        if (sk == "correlation") {
          c.mi.correlation = rd.as<double>(s.second, "mi.correlation");
          if (!(std::abs(c.mi.correlation) < 1.0)) rd.fail(s.second, "mi.correlation must lie in (-1, 1)");
        } else if (sk == "pairs") {
          c.mi.pairs = rd.positive<std::size_t>(s.second, "mi.pairs");
        } else if (sk == "a_dim") {
          c.mi.a_dim = rd.positive<std::size_t>(s.second, "mi.a_dim");
        } else {
          rd.fail(s.first, "unknown key 'mi." + sk + "'");
        }
      }
    } else if (k == "constants") {
      rd.require_map(v, k);
      for (const auto& s : v) {
        const std::string sk = s.first.as<std::string>();
        if (sk == "n") {
          c.constants.n_values = rd.list<int>(s.second, "constants.n");
        } else if (sk == "rho") {
          c.constants.rho_values = rd.list<double>(s.second, "constants.rho");
        } else if (sk == "radius") {
          c.constants.radius = rd.positive<double>(s.second, "constants.radius");
        } else {
          rd.fail(s.first, "unknown key 'constants." + sk + "'");
        }
      }
    } else if (k == "verify") {
      rd.require_map(v, k);
      for (const auto& s : v) {
        const std::string sk = s.first.as<std::string>();
        if (sk == "function") {
          c.verify.function = rd.as<std::string>(s.second, "verify.function");
          if (c.verify.function != "gaussian" && c.verify.function != "mixture") {
            rd.fail(s.second, "verify.function must be 'gaussian' or 'mixture'");
          }
        } else if (sk == "m") {
          c.verify.m_values = rd.list<std::size_t>(s.second, "verify.m");
        } else if (sk == "trials") {
          c.verify.trials = rd.positive<std::size_t>(s.second, "verify.trials");
        } else if (sk == "radius") {
          c.verify.radius = rd.positive<double>(s.second, "verify.radius");
        } else if (sk == "spacings") {
          c.verify.spacings = rd.list<double>(s.second, "verify.spacings");
        } else {
          rd.fail(s.first, "unknown key 'verify." + sk + "'");
        }
      }
    } else if (k == "baseline") {
      rd.require_map(v, k);
      for (const auto& s : v) {
        const std::string sk = s.first.as<std::string>();
        if (sk == "k") {
          c.baseline.k = rd.positive<std::size_t>(s.second, "baseline.k");
        } else if (sk == "samples") {
          c.baseline.samples = rd.positive<std::size_t>(s.second, "baseline.samples");
        } else {
          rd.fail(s.first, "unknown key 'baseline." + sk + "'");
        }
      }
    } else {
      rd.fail(kv.first, "unknown key '" + k + "'");
    }
  }
  if (root["p"]) c.p = rd.distribution(root["p"], "p", c.p);
  if (root["q"]) c.q = rd.distribution(root["q"], "q", c.q);
}

// ---- small utilities ----------------------------------------------------

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string side_path(const std::string& out, const std::string& suffix, const std::string& ext) {
  std::filesystem::path p(out);
  std::filesystem::path stem = p;
  stem.replace_extension();
  return stem.string() + suffix + ext;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw ConfigError("failed to write output file '" + path + "'");
}

std::string header_line(const RunConfig& c, const std::string& command) {
  return "# rfkl " + std::string(kToolVersion) + " " + command + " " + config_json(c, command) + "\r\n";
}

// CSV to the stream, and to the output file when one is configured.
void emit(std::ostream& os, const RunConfig& c, const std::string& content) {
  os << content;
  if (!c.out.empty()) write_file(c.out, content);
}

KlResult truth_for(const DistributionPair& pair, std::uint64_t seed) {
  return exact_kl(pair, 1000000, derive_seed(seed, {0xC0FFEEull}));
}

}  // namespace

RunConfig load_config_text(const std::string& text, const std::string& origin, RunConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  apply_yaml(root, origin, base);
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str(), path, std::move(base));
}

std::string config_json(const RunConfig& c, const std::string& command) {
  auto dist = [](const DistributionSpec& d) {
    json j{{"kind", d.kind}, {"a", d.a}};
    if (d.kind == "corr_gauss") j["correlation"] = d.correlation;
    return j;
  };
  json j{{"command", command},
         {"dim", c.dim},
         {"half_width", c.half_width},
         {"m", c.m},
         {"T", c.T},
         {"trials", c.trials},
         {"eval_samples", c.eval_samples},
         {"schedule", std::string(to_string(c.schedule))},
         {"rho", c.rho},
         {"delta", c.delta},
         {"seed", c.seed},
         {"radius_convention", std::string(to_string(c.radius_convention))},
         {"theta0_scale", c.theta0_scale},
         {"r_scale", c.r_scale},
         {"domain_policy", std::string(to_string(c.domain_policy))},
         {"timing", c.timing},
         {"p", dist(c.p)},
         {"q", dist(c.q)}};
  if (command == "sweep") j["sweep"] = {{"param", c.sweep.param}, {"values", c.sweep.values}};
  if (command == "mi") {
    j["mi"] = {{"correlation", c.mi.correlation}, {"pairs", c.mi.pairs}, {"a_dim", c.mi.a_dim}};
  }
  if (command == "constants") {
    j["constants"] = {{"n", c.constants.n_values}, {"rho", c.constants.rho_values}, {"radius", c.constants.radius}};
  }
  if (command == "verify-approx") {
    j["verify"] = {{"function", c.verify.function},
                   {"m", c.verify.m_values},
                   {"trials", c.verify.trials},
                   {"radius", c.verify.radius},
                   {"spacings", c.verify.spacings}};
  }
  if (command == "baseline") j["baseline"] = {{"k", c.baseline.k}, {"samples", c.baseline.samples}};
  return j.dump();
}

double feature_radius(const RunConfig& c) {
  const double a = std::max(c.p.a, c.q.a);
  return c.radius_convention == RadiusConvention::box ? a : a * std::sqrt(static_cast<double>(c.dim));
}

DistributionPair make_pair(const RunConfig& c) {
  return {make_distribution(c.p, c.dim), make_distribution(c.q, c.dim)};
}

RunRecord run_trial(const RunConfig& c, const DistributionPair& pair, double kl_true,
                    std::uint64_t group, std::size_t trial) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t trial_seed = derive_seed(c.seed, {group, trial});
  const double radius = feature_radius(c);
  const FeatureMap map = FeatureMap::sample(c.dim, c.m, radius, derive_seed(trial_seed, {0}));
  const ProblemConstants pc = ProblemConstants::make(static_cast<int>(c.dim), radius, c.rho);
  const Schedule sched = schedule(c.schedule, c.T, c.m, pc);

  TrainConfig tc;
  tc.alpha = sched.alpha;
  tc.r = sched.r * c.r_scale;
  tc.T = c.T;
  tc.box_bound = pc.box_bound(c.m);
  tc.sample_radius = pair.enclosing_radius();
  tc.policy = c.domain_policy;
  if (c.theta0_scale > 0.0) {
    Rng rng(derive_seed(trial_seed, {5}));
    const double s = c.theta0_scale / std::sqrt(static_cast<double>(c.m));
    tc.theta0.resize(c.m);
    for (double& v : tc.theta0) v = rng.uniform(-s, s);
    project_box_inplace(tc.theta0, tc.box_bound);
  }
  IndependentPairSampler sampler(pair, derive_seed(trial_seed, {1}), derive_seed(trial_seed, {2}));
  const TrainResult trained = run(tc, map, sampler);

  Rng p_eval(derive_seed(trial_seed, {3}));
  Rng q_eval(derive_seed(trial_seed, {4}));
  const PointSet xs = pair.p->sample_n(p_eval, c.eval_samples);
  const PointSet ys = pair.q->sample_n(q_eval, c.eval_samples);
  const DvEstimate est = dv_estimate(map, trained.theta_bar, xs, ys);

  RunRecord r;
  r.trial = trial;
  r.n = c.dim;
  r.m = c.m;
  r.T = c.T;
  r.seed = trial_seed;
  r.kl_hat = est.kl_hat;
  r.kl_true = kl_true;
  r.abs_err = std::abs(est.kl_hat - kl_true);
  r.schedule_kind = std::string(to_string(c.schedule));
  r.runtime_ms = c.timing ? elapsed_ms(t0) : 0.0;
  return r;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& job) {
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<RunRecord> run_trials(const RunConfig& c, std::uint64_t group) {
  const DistributionPair pair = make_pair(c);
  const double truth = truth_for(pair, c.seed).value;
  std::vector<RunRecord> out(c.trials);
  parallel_for(c.trials, c.jobs, [&](std::size_t t) { out[t] = run_trial(c, pair, truth, group, t); });
  return out;
}

SweepRow summarize(const std::string& param, double value, const std::vector<RunRecord>& records) {
  SweepRow row;
  row.param = param;
  row.value = value;
  row.trials = records.size();
  std::vector<double> errs;
  for (const auto& r : records) errs.push_back(r.abs_err);
  row.median_err = median(errs);
  const double n = static_cast<double>(errs.size());
  row.mean_err = std::accumulate(errs.begin(), errs.end(), 0.0) / n;
  if (errs.size() > 1) {
    double ss = 0.0;
    for (double e : errs) ss += (e - row.mean_err) * (e - row.mean_err);
    row.std_err_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << "trial,n,m,T,seed,kl_hat,kl_true,abs_err,runtime_ms,schedule_kind\r\n";
  for (const auto& r : rows) {
    os << r.trial << ',' << r.n << ',' << r.m << ',' << r.T << ',' << r.seed << ','
       << format_double(r.kl_hat) << ',' << format_double(r.kl_true) << ',' << format_double(r.abs_err)
       << ',' << format_double(r.runtime_ms) << ',' << csv_escape(r.schedule_kind) << "\r\n";
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "param,value,median_err,mean_err,std_err_of_mean,trials,err_lo,err_hi\r\n";
  for (const auto& r : rows) {
    os << csv_escape(r.param) << ',' << format_double(r.value) << ',' << format_double(r.median_err) << ','
       << format_double(r.mean_err) << ',' << format_double(r.std_err_of_mean) << ',' << r.trials << ','
       << format_double(r.mean_err - 3.0 * r.std_err_of_mean) << ','
       << format_double(r.mean_err + 3.0 * r.std_err_of_mean) << "\r\n";
  }
}

namespace {

json bound_json(const BoundReport& b) {
  return {{"b1", b.b1},       {"b2", b.b2},         {"b3", b.b3},
          {"b4", b.b4},       {"beta1", b.beta1},   {"beta2", b.beta2},
          {"alpha", b.alpha}, {"r", b.r},           {"approx_term", b.approx_term},
          {"opt_term", b.opt_term}, {"total", b.total}, {"status", std::string(to_string(b.status))}};
}

}  // namespace

int cmd_estimate(const RunConfig& c, std::ostream& os) {
  const std::vector<RunRecord> records = run_trials(c, 0);
  std::ostringstream csv;
  csv << header_line(c, "estimate");
  write_records_csv(csv, records);
  emit(os, c, csv.str());

  if (!c.out.empty()) {
    const double radius = feature_radius(c);
    const ProblemConstants pc = ProblemConstants::make(static_cast<int>(c.dim), radius, c.rho);
    const SweepRow s = summarize("m", static_cast<double>(c.m), records);
    json report{{"tool", "rfkl"},
                {"version", kToolVersion},
                {"config", json::parse(config_json(c, "estimate"))},
                {"kl_true", records.empty() ? 0.0 : records.front().kl_true},
                {"median_abs_err", s.median_err},
                {"mean_abs_err", s.mean_err},
                {"std_err_of_mean", s.std_err_of_mean},
                {"feature_radius", radius},
                {"c_theta", pc.c_theta},
                {"box_bound", pc.box_bound(c.m)}};
    if (c.rho_supplied && c.T >= 2) {
      report["bound"] = bound_json(
          theorem_bound(static_cast<int>(c.dim), c.m, c.T, radius, c.rho, c.delta));
    }
    write_file(side_path(c.out, "", ".json"), report.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& os) {
  if (c.sweep.values.size() < 2) throw ConfigError("sweep needs at least 2 values");
  const bool by_m = c.sweep.param == "m";
  if (!by_m && c.sweep.param != "T") throw ConfigError("sweep param must be 'm' or 'T'");
  for (double v : c.sweep.values) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep values must be positive integers");
  }
  const DistributionPair pair = make_pair(c);
  const double truth = truth_for(pair, c.seed).value;
  const std::size_t groups = c.sweep.values.size();
  std::vector<RunRecord> records(groups * c.trials);
  parallel_for(records.size(), c.jobs, [&](std::size_t i) {
    const std::size_t g = i / c.trials;
    RunConfig local = c;
    if (by_m) {
      local.m = static_cast<std::size_t>(c.sweep.values[g]);
    } else {
      local.T = static_cast<std::uint64_t>(c.sweep.values[g]);
    }
    records[i] = run_trial(local, pair, truth, g + 1, i % c.trials);
  });

  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<RunRecord> part(records.begin() + g * c.trials, records.begin() + (g + 1) * c.trials);
    rows.push_back(summarize(c.sweep.param, c.sweep.values[g], part));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });

  std::ostringstream summary;
  summary << header_line(c, "sweep");
  write_sweep_csv(summary, rows);
  os << summary.str();
  if (!c.out.empty()) {
    std::ostringstream longform;
    longform << header_line(c, "sweep");
    write_records_csv(longform, records);
    write_file(c.out, longform.str());
    write_file(side_path(c.out, "_summary", ".csv"), summary.str());
  }
  return 0;
}

int cmd_mi(const RunConfig& c, std::ostream& os) {
  if (c.mi.a_dim != 1) throw ConfigError("mi supports the 2D correlated pair only (a_dim = 1)");
  const double a = c.p.a;
  const CorrelatedGaussianBox2D joint(a, c.mi.correlation);
  const double truth = exact_mi(joint).value;
  RunConfig local = c;
  local.dim = 2;
  const double radius = feature_radius(local);
  const ProblemConstants pc = ProblemConstants::make(2, radius, c.rho);
  const Schedule sched = schedule(c.schedule, c.T, c.m, pc);

  std::vector<RunRecord> records(c.trials);
  parallel_for(c.trials, c.jobs, [&](std::size_t t) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t trial_seed = derive_seed(c.seed, {0, t});
    Rng rng(derive_seed(trial_seed, {1}));
    const PointSet pairs = joint.sample_n(rng, c.mi.pairs);
    const FeatureMap map = FeatureMap::sample(2, c.m, radius, derive_seed(trial_seed, {0}));
    MiConfig mc;
    mc.a_dim = c.mi.a_dim;
    mc.T = c.T;
    mc.alpha = sched.alpha;
    mc.r = sched.r * c.r_scale;
    mc.box_bound = pc.box_bound(c.m);
    mc.sample_radius = joint.circumradius();
    mc.policy = c.domain_policy;
    mc.seed = derive_seed(trial_seed, {2});
    const DvEstimate est = mi_estimate(map, pairs, mc);
    RunRecord& r = records[t];
    r.trial = t;
    r.n = 2;
    r.m = c.m;
    r.T = c.T;
    r.seed = trial_seed;
    r.kl_hat = est.kl_hat;
    r.kl_true = truth;
    r.abs_err = std::abs(est.kl_hat - truth);
    r.schedule_kind = std::string(to_string(c.schedule));
    r.runtime_ms = c.timing ? elapsed_ms(t0) : 0.0;
  });
  std::ostringstream csv;
  csv << header_line(c, "mi");
  write_records_csv(csv, records);
  emit(os, c, csv.str());
  return 0;
}

int cmd_constants(const RunConfig& c, std::ostream& os) {
  const auto rows = constants_grid(c.constants.n_values, c.constants.rho_values, c.constants.radius);
  std::ostringstream csv;
  csv << header_line(c, "constants");
  csv << "n,rho,kappa,beta1,beta2,status\r\n";
  for (const auto& r : rows) {
    csv << r.n << ',' << format_double(r.rho) << ',' << format_double(r.kappa) << ',' << format_double(r.beta1)
        << ',' << format_double(r.beta2) << ',' << to_string(r.status) << "\r\n";
  }
  emit(os, c, csv.str());
  return 0;
}

int cmd_verify_approx(const RunConfig& c, std::ostream& os) {
  const SpectralFunction f = c.verify.function == "gaussian" ? gaussian_bump(c.dim) : default_mixture(c.dim);
  const double radius = c.verify.radius;
  const RepresentationDensity rep = build_representation(f, radius);
  const double g_lip = spectral_lipschitz(f);

  // Ball volume / h^n estimates the grid size; finer grids beyond the cap
  // are skipped.
  constexpr double kMaxGridPoints = 2e7;
  const double nd = static_cast<double>(c.dim);
  const double ball = std::pow(std::numbers::pi, nd / 2.0) / std::tgamma(nd / 2.0 + 1.0);
  std::vector<double> spacings = c.verify.spacings;
  std::sort(spacings.begin(), spacings.end(), std::greater<>());
  std::vector<LinfGrid> grids;
  for (double h : spacings) {
    if (!(h > 0.0)) throw ConfigError("grid spacings must be positive");
    const double reach = radius + h * std::sqrt(nd) / 2.0;
    if (ball * std::pow(reach / h, nd) > kMaxGridPoints) break;
    grids.push_back(make_linf_grid(f.g, c.dim, radius, h));
  }
  if (grids.empty()) throw ConfigError("every grid spacing exceeds the point budget for this dimension");

  const std::size_t per_m = c.verify.trials;
  const std::size_t total = c.verify.m_values.size() * per_m;
  std::vector<double> errors(total), bounds(total);
  parallel_for(total, c.jobs, [&](std::size_t i) {
    const std::size_t mi = i / per_m;
    const std::size_t m = c.verify.m_values[mi];
    const FeatureMap map = FeatureMap::sample(c.dim, m, radius, derive_seed(c.seed, {mi, i % per_m}));
    const std::vector<double> coeffs = sample_coefficients(rep, map);
    errors[i] = measure_linf_error_refined(grids, map, coeffs, network_lipschitz(coeffs, g_lip)).value;
    bounds[i] = approximation_bound(static_cast<int>(c.dim), radius, rep.f_norm(), m, c.delta);
  });

  std::ostringstream csv;
  csv << header_line(c, "verify-approx");
  csv << "m,trial,linf_error,prop1_bound\r\n";
  for (std::size_t i = 0; i < total; ++i) {
    csv << c.verify.m_values[i / per_m] << ',' << i % per_m << ',' << format_double(errors[i]) << ','
        << format_double(bounds[i]) << "\r\n";
  }
  emit(os, c, csv.str());
  return 0;
}

int cmd_baseline(const RunConfig& c, std::ostream& os) {
  const DistributionPair pair = make_pair(c);
  const double truth = truth_for(pair, c.seed).value;
  std::vector<RunRecord> records(c.trials);
  parallel_for(c.trials, c.jobs, [&](std::size_t t) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t trial_seed = derive_seed(c.seed, {0, t});
    Rng p_rng(derive_seed(trial_seed, {3}));
    Rng q_rng(derive_seed(trial_seed, {4}));
    KnnConfig kc;
    kc.k = c.baseline.k;
    kc.samples_p = pair.p->sample_n(p_rng, c.baseline.samples);
    kc.samples_q = pair.q->sample_n(q_rng, c.baseline.samples);
    const KnnResult res = knn_kl(kc);
    RunRecord& r = records[t];
    r.trial = t;
    r.n = c.dim;
    r.m = 0;
    r.T = c.baseline.samples;
    r.seed = trial_seed;
    r.kl_hat = res.estimate;
    r.kl_true = truth;
    r.abs_err = std::abs(res.estimate - truth);
    r.schedule_kind = "knn";
    r.runtime_ms = c.timing ? elapsed_ms(t0) : 0.0;
  });
  std::ostringstream csv;
  csv << header_line(c, "baseline");
  write_records_csv(csv, records);
  emit(os, c, csv.str());
  return 0;
}

}  // namespace rfkl::harness
