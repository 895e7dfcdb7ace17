#include "memetic/cli_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "memetic/fd_oracle.hpp"

namespace memetic::io {

using nlohmann::json;

std::string_view mode_name(RunMode m) noexcept {
  switch (m) {
    case RunMode::Hybrid:
      return "hybrid";
    case RunMode::EC:
      return "ec";
    case RunMode::SQP:
      return "sqp";
  }
  return "unknown";
}

RunMode parse_mode(std::string_view s) {
  if (s == "hybrid") return RunMode::Hybrid;
  if (s == "ec") return RunMode::EC;
  if (s == "sqp") return RunMode::SQP;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected hybrid, ec or sqp)");
}

void RunConfig::validate() const {
  if (dimension == 0) throw ConfigError("dimension must be >= 1");
  if (!(precision > 0.0)) throw ConfigError("precision must be > 0");
  if (runs == 0) throw ConfigError("runs must be >= 1");
  if (checkpoint_interval == 0) throw ConfigError("checkpoint_interval must be >= 1");
  if (start && start->size() != dimension) throw ConfigError("start must have `dimension` entries");
  try {
    const auto p = make_problem(problem, dimension);
    if (start && !p.bounds().contains(*start)) throw ConfigError("start lies outside the bounds");
    ga.validate();
    sqp.validate();
    switching.validate();
    if (validation_switching) validation_switching->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError("unknown key '" + k + "' in " + std::string(where));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

void read_size(const json& obj, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

void read_double(const json& obj, const char* key, double& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  out = obj.at(key).get<double>();
}

GAConfig parse_ga(const json& j) {
  check_keys(j, "ga",
             {"population_size", "crossover_rate", "mutation_rate", "selection", "tournament_size",
              "overlap_fraction", "elite_shrink", "max_generations"});
  GAConfig g;
  read_size(j, "population_size", g.population_size);
  read_double(j, "crossover_rate", g.crossover_rate);
  if (j.contains("mutation_rate") && !j.at("mutation_rate").is_null()) {
    double pm = 0.0;
    read_double(j, "mutation_rate", pm);
    g.mutation_rate = pm;
  }
  if (j.contains("selection")) {
    std::string s;
    read(j, "selection", s);
    if (s == "bts" || s == "tournament") {
      g.selection = SelectionScheme::BinaryTournament;
    } else if (s == "rws" || s == "roulette") {
      g.selection = SelectionScheme::RouletteWheel;
    } else {
      throw ConfigError("unknown selection '" + s + "' (expected bts or rws)");
    }
  }
  read_size(j, "tournament_size", g.tournament_size);
  read_double(j, "overlap_fraction", g.overlap_fraction);
  if (j.contains("elite_shrink")) {
    std::string s;
    read(j, "elite_shrink", s);
    if (s == "halve") {
      g.elite_shrink = EliteShrinkRule::Halve;
    } else if (s == "fraction") {
      g.elite_shrink = EliteShrinkRule::FractionOfElite;
    } else {
      throw ConfigError("unknown elite_shrink '" + s + "' (expected halve or fraction)");
    }
  }
  read_size(j, "max_generations", g.max_generations);
  return g;
}

SQPConfig parse_sqp(const json& j) {
  check_keys(j, "sqp",
             {"grad_tol", "step_tol", "max_iter", "c1", "c2", "lambda_min", "stop_rule",
              "delta_grad_tol", "delta_step_tol", "max_line_search_evals", "steepest_descent"});
  SQPConfig s;
  read_double(j, "grad_tol", s.grad_tol);
  read_double(j, "step_tol", s.step_tol);
  read_size(j, "max_iter", s.max_iter);
  read_double(j, "c1", s.c1);
  read_double(j, "c2", s.c2);
  read_double(j, "lambda_min", s.lambda_min);
  if (j.contains("stop_rule")) {
    std::string r;
    read(j, "stop_rule", r);
    if (r == "absolute") {
      s.stop_rule = StopRule::Absolute;
    } else if (r == "delta") {
      s.stop_rule = StopRule::Delta;
    } else {
      throw ConfigError("unknown stop_rule '" + r + "' (expected absolute or delta)");
    }
  }
  read_double(j, "delta_grad_tol", s.delta_grad_tol);
  read_double(j, "delta_step_tol", s.delta_step_tol);
  read_size(j, "max_line_search_evals", s.max_line_search_evals);
  read(j, "steepest_descent", s.force_steepest_descent);
  return s;
}

SwitchCriteria parse_switch(const json& j, const char* where, std::size_t default_cap) {
  check_keys(j, where,
             {"sigma_threshold", "smoothing_window", "stall_window", "stall_epsilon",
              "max_generations"});
  SwitchCriteria c;
  c.max_generations = default_cap;
  read_double(j, "sigma_threshold", c.sigma_threshold);
  read_size(j, "smoothing_window", c.smoothing_window);
  read_size(j, "stall_window", c.stall_window);
  read_double(j, "stall_epsilon", c.stall_epsilon);
  read_size(j, "max_generations", c.max_generations);
  return c;
}

RunConfig parse_single(const json& j) {
  check_keys(j, "configuration",
             {"label", "problem", "dimension", "precision", "mode", "repetitions", "runs",
              "base_seed", "seed", "output_dir", "start", "checkpoint_interval", "ga", "sqp",
              "switch", "validation_switch", "seed_variant", "sweep"});
  RunConfig c;
  read(j, "label", c.label);
  read(j, "problem", c.problem);
  read_size(j, "dimension", c.dimension);
  read_double(j, "precision", c.precision);
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m);
    c.mode = parse_mode(m);
  }
  if (j.contains("runs") && j.contains("repetitions")) {
    throw ConfigError("give either 'repetitions' or its alias 'runs', not both");
  }
  read_size(j, "repetitions", c.runs);
  read_size(j, "runs", c.runs);
  if (j.contains("seed") && j.contains("base_seed")) {
    throw ConfigError("give either 'base_seed' or its alias 'seed', not both");
  }
  for (const char* key : {"base_seed", "seed"}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_number_unsigned()) {
      throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
    c.seed = j.at(key).get<std::uint64_t>();
  }
  read(j, "output_dir", c.output_dir);
  if (j.contains("start")) {
    std::vector<double> s;
    read(j, "start", s);
    c.start = std::move(s);
  }
  read_size(j, "checkpoint_interval", c.checkpoint_interval);
  if (j.contains("ga")) c.ga = parse_ga(j.at("ga"));
  if (j.contains("sqp")) c.sqp = parse_sqp(j.at("sqp"));
  c.switching = parse_switch(j.value("switch", json::object()), "switch", c.ga.max_generations);
  if (j.contains("validation_switch")) {
    c.validation_switching =
        parse_switch(j.at("validation_switch"), "validation_switch", c.switching.max_generations);
  }
  if (j.contains("seed_variant")) {
    std::string v;
    read(j, "seed_variant", v);
    if (v == "complement") {
      c.seed_variant = SeedVariant::Complement;
    } else if (v == "heavy-mutation") {
      c.seed_variant = SeedVariant::HeavyMutation;
    } else {
      throw ConfigError("unknown seed_variant '" + v + "' (expected complement or heavy-mutation)");
    }
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<RunConfig> parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!doc.contains("sweep")) return {parse_single(doc)};
  const json& sweep = doc.at("sweep");
  if (!sweep.is_array() || sweep.empty()) throw ConfigError("'sweep' must be a non-empty array");
  json base = doc;
  base.erase("sweep");
  std::vector<RunConfig> out;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!sweep[i].is_object()) throw ConfigError("sweep entries must be objects");
    if (sweep[i].contains("sweep")) throw ConfigError("nested sweeps are not supported");
    json merged = base;
    merged.merge_patch(sweep[i]);
    RunConfig c = parse_single(merged);
    if (!sweep[i].contains("label")) c.label = "sweep" + std::to_string(i);
    if (!labels.insert(c.label).second) throw ConfigError("duplicate sweep label '" + c.label + "'");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RunConfig> load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

// --- tables ------------------------------------------------------------

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  bool first = true;
  auto sep = [&] {
    if (!first) os << ',';
    first = false;
  };
  if (!t.text_column.empty()) {
    sep();
    os << t.text_column;
  }
  for (const auto& c : t.columns) {
    sep();
    os << c;
  }
  os << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    first = true;
    if (!t.text_column.empty()) {
      sep();
      os << t.text[r];
    }
    for (double v : t.rows[r]) {
      sep();
      os << format_number(v);
    }
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& file, const Table& t) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  write_csv(os, t);
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe r;
  r.count = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  // An infinite entry (steepest-descent lambda) leaves no meaningful spread.
  if (values.size() < 2 || !std::isfinite(r.mean)) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double n = static_cast<double>(values.size());
  r.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return r;
}

std::optional<double> best_at_budget(std::span<const TraceRow> trace, std::size_t evaluations) {
  std::optional<double> best;
  for (const auto& row : trace) {
    if (row.evaluations > evaluations) break;
    best = row.best;
  }
  return best;
}

// --- runs --------------------------------------------------------------

namespace {

Table ec_table(const EcRunResult& ec, std::size_t initial_evals) {
  Table t;
  t.columns = {"generation",     "selection_term",        "crossover_term",
               "mutation_term",  "crossover_sigma_width", "mutation_sigma_width",
               "best",           "mean",                  "worst",
               "best_so_far",    "delta_mean",            "elite_count",
               "evaluations"};
  for (const auto& g : ec.generations) {
    t.rows.push_back({static_cast<double>(g.generation), g.price.selection_term,
                      g.price.crossover_term, g.price.mutation_term, g.price.crossover_width(),
                      g.price.mutation_width(), g.stats.best, g.stats.mean, g.stats.worst,
                      g.best_so_far, g.price.total_delta_Q, static_cast<double>(g.elite_count),
                      static_cast<double>(initial_evals + g.evaluations)});
  }
  return t;
}

Table sqp_table(const SqpResult& r, double sign) {
  Table t;
  t.columns = {"iteration", "f",      "f_next", "grad_norm_inf", "d_norm",
               "alpha",     "lambda", "wolfe",  "ipm",           "evaluations"};
  for (const auto& it : r.trace) {
    t.rows.push_back({static_cast<double>(it.iteration), sign * it.f, sign * it.f_next,
                      it.grad.lpNorm<Eigen::Infinity>(), it.direction.norm(),
                      it.alpha, it.lambda, it.wolfe ? 1.0 : 0.0, it.used_ipm ? 1.0 : 0.0,
                      static_cast<double>(it.evaluations)});
  }
  return t;
}

Table hybrid_table(std::span<const TraceRow> trace) {
  Table t;
  t.text_column = "phase";
  t.columns = {"step", "best", "mean", "evaluations"};
  for (const auto& r : trace) {
    t.text.emplace_back(phase_name(r.phase));
    t.rows.push_back({static_cast<double>(r.step), r.best, r.mean,
                      static_cast<double>(r.evaluations)});
  }
  return t;
}

void run_hybrid_mode(const RunConfig& cfg, const BenchmarkProblem& problem, RunOutcome& out) {
  GAConfig ga = cfg.ga;
  ga.rng_seed = out.seed;
  HybridOptions opt;
  opt.precision = cfg.precision;
  opt.seed_variant = cfg.seed_variant;
  opt.validation_criteria = cfg.validation_switching;
  const HybridResult r = run_hybrid(problem, ga, cfg.sqp, cfg.switching, opt);
  out.final_value = r.f_star;
  out.evaluations = r.evaluations.total();
  out.switch_generation = r.ec.switch_generation;
  out.switch_reason = std::string(switch_reason_name(r.switch_reason));
  out.converged_at = r.ec.converged_at;
  out.warnings = r.warnings;
  out.hybrid_trace = r.trace;
  out.trace = hybrid_table(r.trace);
}

void run_ec_mode(const RunConfig& cfg, const BenchmarkProblem& problem, RunOutcome& out) {
  GAConfig ga = cfg.ga;
  ga.rng_seed = out.seed;
  const BoundBox& box = problem.bounds();
  const EncodingSpec spec = EncodingSpec::from_bounds(box.lower, box.upper, cfg.precision);
  EvolutionEngine engine(ga, spec.total_length(), make_fitness(problem, spec));
  Population initial = engine.random_population(ga.population_size);
  const std::size_t initial_evals = engine.evaluations();
  SwitchCriteria crit = cfg.switching;
  crit.max_generations = ga.max_generations;
  EcRunOptions opt;
  opt.stop_on_switch = false;
  const EcRunResult r = run_ec(engine, std::move(initial), crit, opt);
  out.final_value = problem.native(r.best.fitness);
  out.evaluations = initial_evals + r.evaluations;
  out.switch_generation = r.switch_generation;
  out.switch_reason = std::string(switch_reason_name(r.switch_reason));
  out.converged_at = r.converged_at;
  out.trace = ec_table(r, initial_evals);
}

void run_sqp_mode(const RunConfig& cfg, const BenchmarkProblem& problem, RunOutcome& out) {
  const BoundBox& box = problem.bounds();
  std::vector<double> x0;
  if (cfg.start) {
    x0 = *cfg.start;
  } else {
    Rng rng(out.seed);
    for (std::size_t i = 0; i < box.size(); ++i) {
      x0.push_back(std::uniform_real_distribution<double>(box.lower[i], box.upper[i])(rng));
    }
  }
  const bool maximize = problem.orientation() == Orientation::Maximize;
  ad::ADFunction local = problem.ad_function();
  if (maximize) {
    local = [f = problem.ad_function()](std::span<const ad::ADScalar> x) { return -f(x); };
  }
  const SqpResult r = sqp_run(local, x0, box, cfg.sqp);
  out.final_value = problem.value(r.x);
  out.evaluations = r.evaluations;
  out.switch_reason = std::string(stop_reason_name(r.stop_reason));
  out.trace = sqp_table(r, maximize ? -1.0 : 1.0);
}

}  // namespace

RunOutcome execute_run(const RunConfig& cfg, std::size_t index) {
  RunOutcome out;
  out.index = index;
  out.seed = cfg.seed + index;
  try {
    const BenchmarkProblem problem = make_problem(cfg.problem, cfg.dimension);
    switch (cfg.mode) {
      case RunMode::Hybrid:
        run_hybrid_mode(cfg, problem, out);
        break;
      case RunMode::EC:
        run_ec_mode(cfg, problem, out);
        break;
      case RunMode::SQP:
        run_sqp_mode(cfg, problem, out);
        break;
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

std::vector<RunOutcome> execute_batch(const RunConfig& cfg, std::size_t jobs) {
  std::vector<RunOutcome> out(cfg.runs);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, cfg.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.runs; i = next++) out[i] = execute_run(cfg, i);
  };
  if (jobs <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();
  return out;
}

Table aggregate(const RunConfig& cfg, std::span<const RunOutcome> runs) {
  std::vector<const RunOutcome*> ok;
  for (const auto& r : runs) {
    if (r.ok) ok.push_back(&r);
  }
  Table t;
  if (cfg.mode == RunMode::Hybrid) {
    t.columns = {"evaluations", "runs", "best_mean", "best_se"};
    std::size_t last = 0;
    for (const auto* r : ok) last = std::max(last, r->evaluations);
    for (std::size_t e = 0;; e += cfg.checkpoint_interval) {
      std::vector<double> v;
      for (const auto* r : ok) {
        if (auto b = best_at_budget(r->hybrid_trace, e)) v.push_back(*b);
      }
      if (!v.empty()) {
        const MeanSe m = mean_se(v);
        t.rows.push_back({static_cast<double>(e), static_cast<double>(m.count), m.mean, m.se});
      }
      if (e >= last) break;
    }
    return t;
  }
  if (ok.empty()) return t;
  const auto& cols = ok.front()->trace.columns;
  t.columns = {cols.front(), "runs"};
  for (std::size_t c = 1; c < cols.size(); ++c) {
    t.columns.push_back(cols[c] + "_mean");
    t.columns.push_back(cols[c] + "_se");
  }
  std::size_t rows = 0;
  for (const auto* r : ok) rows = std::max(rows, r->trace.rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row;
    std::size_t count = 0;
    for (const auto* r : ok) count += i < r->trace.rows.size();
    row.push_back(static_cast<double>(i + 1));
    row.push_back(static_cast<double>(count));
    for (std::size_t c = 1; c < cols.size(); ++c) {
      std::vector<double> v;
      for (const auto* r : ok) {
        if (i < r->trace.rows.size()) v.push_back(r->trace.rows[i][c]);
      }
      const MeanSe m = mean_se(v);
      row.push_back(m.mean);
      row.push_back(m.se);
    }
    // First column is the generation or iteration number; keep the run's own.
    for (const auto* r : ok) {
      if (i < r->trace.rows.size()) {
        row[0] = r->trace.rows[i][0];
        break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t BatchReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.ok; }));
}

void write_summary(std::ostream& os, std::span<const BatchReport> reports) {
  char line[512];
  std::snprintf(line, sizeof line, "%-14s %-6s %-12s %4s %4s %5s %5s %8s %5s %6s %14s %12s %14s %14s %10s\n",
                "label", "mode", "problem", "n", "sel", "N", "Pc", "Pm", "runs", "failed",
                "final_mean", "final_se", "final_min", "final_max", "evals_mean");
  os << line;
  for (const auto& rep : reports) {
    const RunConfig& c = rep.config;
    std::vector<double> finals;
    std::vector<double> evals;
    for (const auto& r : rep.runs) {
      if (!r.ok) continue;
      finals.push_back(r.final_value);
      evals.push_back(static_cast<double>(r.evaluations));
    }
    const MeanSe f = mean_se(finals);
    const MeanSe e = mean_se(evals);
    const double lo = finals.empty() ? NAN : *std::min_element(finals.begin(), finals.end());
    const double hi = finals.empty() ? NAN : *std::max_element(finals.begin(), finals.end());
    const std::string pm = c.ga.mutation_rate ? format_number(*c.ga.mutation_rate) : "1/L";
    std::snprintf(line, sizeof line,
                  "%-14s %-6s %-12s %4zu %4s %5zu %5.2f %8s %5zu %6zu %14.6f %12.6f %14.6f %14.6f %10.1f\n",
                  c.label.empty() ? "-" : c.label.c_str(), std::string(mode_name(c.mode)).c_str(),
                  c.problem.c_str(), c.dimension,
                  c.ga.selection == SelectionScheme::BinaryTournament ? "bts" : "rws",
                  c.ga.population_size, c.ga.crossover_rate, pm.c_str(), rep.runs.size(),
                  rep.failures(), f.mean, f.se, lo, hi, e.mean);
    os << line;
  }
  // Side-by-side selection comparison for configurations that differ only in
  // the selection scheme.
  struct Pair {
    std::optional<double> rws, bts;
  };
  std::map<std::tuple<std::string, std::size_t, std::size_t, double, std::string>, Pair> pairs;
  for (const auto& rep : reports) {
    const RunConfig& c = rep.config;
    std::vector<double> finals;
    for (const auto& r : rep.runs) {
      if (r.ok) finals.push_back(r.final_value);
    }
    if (finals.empty()) continue;
    const std::string pm = c.ga.mutation_rate ? format_number(*c.ga.mutation_rate) : "1/L";
    auto& slot = pairs[{c.problem + "/" + std::string(mode_name(c.mode)), c.dimension,
                        c.ga.population_size, c.ga.crossover_rate, pm}];
    const double m = mean_se(finals).mean;
    (c.ga.selection == SelectionScheme::RouletteWheel ? slot.rws : slot.bts) = m;
  }
  bool header = false;
  for (const auto& [key, p] : pairs) {
    if (!p.rws || !p.bts) continue;
    if (!header) {
      std::snprintf(line, sizeof line, "\n%-20s %4s %5s %5s %8s %14s %14s\n", "problem/mode", "n",
                    "N", "Pc", "Pm", "RWS", "BTS");
      os << line;
      header = true;
    }
    std::snprintf(line, sizeof line, "%-20s %4zu %5zu %5.2f %8s %14.6f %14.6f\n",
                  std::get<0>(key).c_str(), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                  std::get<4>(key).c_str(), *p.rws, *p.bts);
    os << line;
  }
  for (const auto& rep : reports) {
    std::map<std::string, std::size_t> reasons;
    std::size_t warned = 0;
    for (const auto& r : rep.runs) {
      if (!r.ok) continue;
      ++reasons[r.switch_reason];
      warned += !r.warnings.empty();
    }
    os << "\n[" << (rep.config.label.empty() ? "-" : rep.config.label) << "] "
       << (rep.config.mode == RunMode::SQP ? "stop reasons:" : "switch reasons:");
    for (const auto& [k, v] : reasons) os << ' ' << k << '=' << v;
    if (warned) os << "; runs with warnings: " << warned;
    os << '\n';
    for (const auto& r : rep.runs) {
      if (!r.ok) os << "  run " << r.index << " (seed " << r.seed << ") failed: " << r.error << '\n';
    }
  }
}

void write_outputs(const std::filesystem::path& out, std::span<const BatchReport> reports) {
  std::filesystem::create_directories(out);
  for (const auto& rep : reports) {
    std::filesystem::path dir = out;
    if (reports.size() > 1) dir /= rep.config.label;
    std::filesystem::create_directories(dir);
    for (const auto& r : rep.runs) {
      if (r.ok) write_csv(dir / ("trace_" + std::to_string(r.index) + ".csv"), r.trace);
    }
    write_csv(dir / "aggregate.csv", aggregate(rep.config, rep.runs));
  }
  std::ofstream os(out / "summary.txt");
  if (!os) throw std::runtime_error("cannot write " + (out / "summary.txt").string());
  write_summary(os, reports);
}

// --- derivative check --------------------------------------------------

AdCheckReport ad_check(const BenchmarkProblem& problem, std::size_t samples, std::uint64_t seed,
                       bool inject_fault) {
  AdCheckReport rep;
  rep.problem = problem.name();
  rep.dimension = problem.dimension();
  ad::ADFunction f = problem.ad_function();
  if (inject_fault) {
    f = [g = problem.ad_function()](std::span<const ad::ADScalar> x) {
      return g(x) + 1e-3 * x[0] * x[0];
    };
  }
  const fd::ScalarFn value = [&problem](std::span<const double> x) { return problem.value(x); };
  const BoundBox& box = problem.bounds();
  Rng rng(seed);
  const std::size_t n = problem.dimension();
  for (std::size_t s = 0; s < samples; ++s) {
    AdCheckPoint p;
    for (std::size_t i = 0; i < n; ++i) {
      p.x.push_back(std::uniform_real_distribution<double>(box.lower[i], box.upper[i])(rng));
    }
    const ad::Derivatives d = ad::evaluate(f, p.x);
    const double v = value(p.x);
    p.value_error = std::abs(d.value - v) / std::max(1.0, std::abs(v));
    const auto g = fd::gradient(value, p.x);
    const auto H = fd::hessian(value, p.x);
    p.gradient_error = fd::max_relative_error(d.grad, g);
    p.hessian_error = fd::max_relative_error(d.hess, H);
    rep.max_gradient_error = std::max(rep.max_gradient_error, p.gradient_error);
    rep.max_hessian_error = std::max(rep.max_hessian_error, p.hessian_error);
    rep.points.push_back(std::move(p));
  }
  return rep;
}

void write_ad_report(std::ostream& os, const AdCheckReport& r) {
  char line[256];
  std::snprintf(line, sizeof line, "%s n=%zu points=%zu\n", r.problem.c_str(), r.dimension,
                r.points.size());
  os << line;
  std::snprintf(line, sizeof line, "  max gradient rel. error %.3e (tol %.0e)\n",
                r.max_gradient_error, r.gradient_tolerance);
  os << line;
  std::snprintf(line, sizeof line, "  max Hessian rel. error  %.3e (tol %.0e)\n",
                r.max_hessian_error, r.hessian_tolerance);
  os << line;
  os << (r.passed() ? "  PASS\n" : "  FAIL\n");
}

void write_benchmark_list(std::ostream& os) {
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-9s %-22s %s\n", "name", "goal", "bounds (per var)",
                "optimum (n=1)");
  os << line;
  for (auto name : problem_names()) {
    const auto p = make_problem(name, 1);
    char bounds[64];
    std::snprintf(bounds, sizeof bounds, "[%g, %g]", p.bounds().lower[0], p.bounds().upper[0]);
    std::snprintf(line, sizeof line, "%-14s %-9s %-22s %.9g\n",
                  std::string(name).c_str(),
                  p.orientation() == Orientation::Maximize ? "maximize" : "minimize", bounds,
                  p.known_optimum_value());
    os << line;
  }
}

}  // namespace memetic::io
