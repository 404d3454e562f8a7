#pragma once

#include <holcus/errors.hpp>
#include <holcus/estimators.hpp>
#include <holcus/optimize.hpp>
#include <holcus/parallel.hpp>
#include <holcus/qaoa.hpp>
#include <holcus/qubo.hpp>
#include <holcus/random.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace holcus {

enum class Experiment { exp1_compare, exp2_scaling, single };

struct ExperimentConfig {
  Experiment experiment = Experiment::single;
  int n_min = 3;
  int n_max = 3;
  std::vector<int> p_values{1};
  int instances_per_n = 1;
  std::optional<std::uint64_t> shots = 10000; // nullopt: exact mode
  int restarts = 3;
  std::vector<Method> methods{Method::hadamard, Method::holcus};
  std::uint64_t master_seed = 2024;
  int max_evals = 0; // 0: 200·p
  int threads = 1;

  // Desk-scale grids; the full grids (exp1: n ≤ 9, exp2: n ≤ 11) are one
  // flag away.
  static ExperimentConfig exp1() {
    ExperimentConfig c;
    c.experiment = Experiment::exp1_compare;
    c.n_min = 3;
    c.n_max = 7;
    c.p_values = {1, 2, 3};
    c.instances_per_n = 5;
    return c;
  }
  static ExperimentConfig exp2() {
    ExperimentConfig c;
    c.experiment = Experiment::exp2_scaling;
    c.n_min = 3;
    c.n_max = 9;
    c.p_values = {3};
    c.instances_per_n = 10;
    c.methods = {Method::holcus};
    return c;
  }

  void validate() const {
    if (n_min < 1 || n_max < n_min)
      throw DomainError("ExperimentConfig: invalid n range");
    if (instances_per_n < 1)
      throw DomainError("ExperimentConfig: instances_per_n must be >= 1");
    if (p_values.empty() || methods.empty())
      throw DomainError("ExperimentConfig: need at least one p and one method");
    for (int p : p_values)
      if (p < 1)
        throw DomainError("ExperimentConfig: p must be >= 1");
    if (restarts < 1)
      throw DomainError("ExperimentConfig: restarts must be >= 1");
    if (shots && *shots == 0)
      throw DomainError("ExperimentConfig: shots must be >= 1");
  }
};

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline long long parse_int(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw DomainError("config: " + key + " expects an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_uint(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  std::uint64_t x = 0;
  if (!v.empty() && v[0] != '-') {
    try {
      x = std::stoull(v, &used);
    } catch (const std::exception &) {
      used = 0;
    }
  }
  if (used == 0 || used != v.size())
    throw DomainError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  return x;
}

} // namespace detail

/// One `key = value` setting. Keys: n_min, n_max, p (comma list),
/// instances, shots (count or "exact"), restarts, methods (comma list),
/// seed, max_evals, threads.
inline void apply_config_entry(ExperimentConfig &cfg, const std::string &key,
                               const std::string &value) {
  const auto as_int = [&] { return static_cast<int>(detail::parse_int(key, value)); };
  if (key == "n_min") {
    cfg.n_min = as_int();
  } else if (key == "n_max") {
    cfg.n_max = as_int();
  } else if (key == "p") {
    cfg.p_values.clear();
    for (const auto &s : detail::split(value, ','))
      cfg.p_values.push_back(static_cast<int>(detail::parse_int(key, detail::trim(s))));
  } else if (key == "instances") {
    cfg.instances_per_n = as_int();
  } else if (key == "shots") {
    if (value == "exact")
      cfg.shots.reset();
    else
      cfg.shots = detail::parse_uint(key, value);
  } else if (key == "restarts") {
    cfg.restarts = as_int();
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const auto &s : detail::split(value, ',')) {
      const auto m = method_from_string(detail::trim(s));
      if (!m)
        throw DomainError("config: unknown method '" + detail::trim(s) + "'");
      cfg.methods.push_back(*m);
    }
  } else if (key == "seed") {
    cfg.master_seed = detail::parse_uint(key, value);
  } else if (key == "max_evals") {
    cfg.max_evals = as_int();
  } else if (key == "threads") {
    cfg.threads = as_int();
  } else {
    throw DomainError("config: unknown key '" + key + "'");
  }
}

/// Key-value text: one `key = value` per line, `#` starts a comment.
inline void load_config(std::istream &is, ExperimentConfig &cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

struct BenchmarkRecord {
  int n = 0;
  int p = 0;
  int instance = 0;
  std::uint64_t instance_seed = 0;
  std::string method;
  std::string shots; // count or "exact"
  double wall_time_seconds = 0.0;
  double best_value = 0.0;
  double exact_value_of_best_params = 0.0;
  double brute_force_optimum = 0.0;
  std::uint64_t circuits_total = 0;
  std::uint64_t shots_total = 0;
  int max_qubits = 0;
  int evaluations = 0;
  std::string optimizer = "nelder_mead";
  std::string error; // empty on success

  bool ok() const noexcept { return error.empty(); }
};

inline constexpr const char *kRecordHeader =
    "n,p,instance,instance_seed,method,shots,wall_time_seconds,best_value,"
    "exact_value_of_best_params,brute_force_optimum,circuits_total,shots_total,"
    "max_qubits,evaluations,optimizer,error";

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_safe(std::string s) {
  for (auto &c : s)
    if (c == ',' || c == '\n' || c == '\r')
      c = ';';
  return s;
}

} // namespace detail

inline void write_record(std::ostream &os, const BenchmarkRecord &r) {
  using detail::csv_double;
  os << r.n << ',' << r.p << ',' << r.instance << ',' << r.instance_seed << ','
     << r.method << ',' << r.shots << ',' << csv_double(r.wall_time_seconds) << ','
     << csv_double(r.best_value) << ',' << csv_double(r.exact_value_of_best_params)
     << ',' << csv_double(r.brute_force_optimum) << ',' << r.circuits_total << ','
     << r.shots_total << ',' << r.max_qubits << ',' << r.evaluations << ','
     << r.optimizer << ',' << detail::csv_safe(r.error) << '\n';
}

inline void write_records_csv(std::ostream &os, const std::vector<BenchmarkRecord> &rs) {
  os << kRecordHeader << '\n';
  for (const auto &r : rs)
    write_record(os, r);
}

inline std::vector<BenchmarkRecord> read_records_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line))
    throw DomainError("read_records_csv: empty input");
  std::map<std::string, std::size_t> col;
  {
    std::istringstream hs(line);
    std::string name;
    for (std::size_t i = 0; std::getline(hs, name, ','); ++i)
      col[name] = i;
  }
  for (const char *required : {"n", "p", "instance_seed", "method", "wall_time_seconds"})
    if (!col.count(required))
      throw DomainError(std::string("read_records_csv: missing column ") + required);

  std::vector<BenchmarkRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      f.push_back(cell);
    if (!line.empty() && line.back() == ',')
      f.emplace_back();
    auto get = [&](const char *name) -> std::string {
      auto it = col.find(name);
      return it == col.end() || it->second >= f.size() ? std::string{} : f[it->second];
    };
    auto num = [&](const char *name) {
      const auto s = get(name);
      return s.empty() ? 0.0 : std::stod(s);
    };
    auto u64 = [&](const char *name) -> std::uint64_t {
      const auto s = get(name);
      return s.empty() ? 0 : std::stoull(s);
    };
    try {
      BenchmarkRecord r;
      r.n = static_cast<int>(num("n"));
      r.p = static_cast<int>(num("p"));
      r.instance = static_cast<int>(num("instance"));
      r.instance_seed = u64("instance_seed");
      r.method = get("method");
      r.shots = get("shots");
      r.wall_time_seconds = num("wall_time_seconds");
      r.best_value = num("best_value");
      r.exact_value_of_best_params = num("exact_value_of_best_params");
      r.brute_force_optimum = num("brute_force_optimum");
      r.circuits_total = u64("circuits_total");
      r.shots_total = u64("shots_total");
      r.max_qubits = static_cast<int>(num("max_qubits"));
      r.evaluations = static_cast<int>(num("evaluations"));
      r.optimizer = get("optimizer");
      r.error = get("error");
      out.push_back(std::move(r));
    } catch (const std::logic_error &e) {
      throw DomainError("read_records_csv: line " + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return out;
}

struct InstanceKey {
  int n, p;
  std::uint64_t seed;
  auto operator<=>(const InstanceKey &) const = default;
};

/// Every (n, p, instance, method) combination, generated in that nesting.
/// Instance seeds depend only on (master_seed, n, instance), so both methods
/// see the same QUBO, the same start angles and the same estimator streams.
inline std::vector<BenchmarkRecord>
run_experiment(const ExperimentConfig &cfg,
               const std::function<void(const BenchmarkRecord &)> &sink = {}) {
  cfg.validate();
  struct Task {
    int n, p, instance;
    Method method;
  };
  std::vector<Task> tasks;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n)
    for (int p : cfg.p_values)
      for (int i = 0; i < cfg.instances_per_n; ++i)
        for (auto m : cfg.methods)
          tasks.push_back({n, p, i, m});

  std::vector<std::optional<BenchmarkRecord>> done(tasks.size());
  std::size_t next_to_emit = 0;
  std::mutex mu;

  parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
    const Task &task = tasks[t];
    BenchmarkRecord rec;
    rec.n = task.n;
    rec.p = task.p;
    rec.instance = task.instance;
    rec.instance_seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(task.n),
                                                      static_cast<std::uint64_t>(task.instance)});
    rec.method = to_string(task.method);
    rec.shots = cfg.shots ? std::to_string(*cfg.shots) : "exact";
    try {
      const auto qubo = random_qubo(task.n, rec.instance_seed);
      rec.brute_force_optimum = brute_force_min(qubo).cost;
      const auto model = qubo_to_ising(qubo);

      EstimatorConfig est;
      est.method = task.method;
      est.shots = cfg.shots;
      est.seed = derive_seed(rec.instance_seed, {static_cast<std::uint64_t>(task.p), 1});
      OptimizerConfig opt = OptimizerConfig::for_layers(static_cast<std::size_t>(task.p));
      if (cfg.max_evals > 0)
        opt.max_evals = cfg.max_evals;
      opt.restarts = cfg.restarts;
      opt.seed = derive_seed(rec.instance_seed, {static_cast<std::uint64_t>(task.p), 2});

      // Timed region starts after the QUBO -> Ising mapping.
      const auto start = std::chrono::steady_clock::now();
      const auto trace = train_qaoa(model, static_cast<std::size_t>(task.p), est, opt);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;

      rec.wall_time_seconds = dt.count();
      rec.best_value = trace.best_value;
      rec.exact_value_of_best_params = exact_expectation(model, trace.best_params);
      rec.circuits_total = trace.total_circuits;
      rec.shots_total = trace.total_shots;
      rec.max_qubits = trace.max_qubits;
      rec.evaluations = static_cast<int>(trace.evaluations.size());
    } catch (const std::exception &e) {
      rec.error = e.what();
    }
    std::lock_guard lock(mu);
    done[t] = std::move(rec);
    while (next_to_emit < done.size() && done[next_to_emit]) {
      if (sink)
        sink(*done[next_to_emit]);
      ++next_to_emit;
    }
  });

  std::vector<BenchmarkRecord> out;
  out.reserve(done.size());
  for (auto &r : done)
    out.push_back(std::move(*r));
  return out;
}

struct SpeedupRow {
  int n = 0;
  int p = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int pairs = 0;
};

struct SpeedupTable {
  std::vector<SpeedupRow> rows; // ascending (n, p)
  int skipped = 0;              // successful records without a partner
};

/// Pairs hadamard and holcus records of the same (n, p, instance) and
/// aggregates t_hadamard / t_holcus per (n, p).
inline SpeedupTable aggregate_speedup(const std::vector<BenchmarkRecord> &records) {
  std::map<InstanceKey, std::pair<std::optional<double>, std::optional<double>>> pairs;
  for (const auto &r : records) {
    if (!r.ok())
      continue;
    auto &slot = pairs[{r.n, r.p, r.instance_seed}];
    if (r.method == "hadamard")
      slot.first = r.wall_time_seconds;
    else if (r.method == "holcus")
      slot.second = r.wall_time_seconds;
  }
  SpeedupTable table;
  std::map<std::pair<int, int>, std::vector<double>> ratios;
  for (const auto &[key, pr] : pairs) {
    if (pr.first && pr.second && *pr.second > 0.0)
      ratios[{key.n, key.p}].push_back(*pr.first / *pr.second);
    else
      table.skipped += (pr.first ? 1 : 0) + (pr.second ? 1 : 0);
  }
  for (const auto &[np, v] : ratios) {
    SpeedupRow row{np.first, np.second, 0.0, v.front(), v.front(), static_cast<int>(v.size())};
    for (double x : v) {
      row.mean += x / static_cast<double>(v.size());
      row.min = std::min(row.min, x);
      row.max = std::max(row.max, x);
    }
    table.rows.push_back(row);
  }
  return table;
}

inline void write_speedup_table(std::ostream &os, const SpeedupTable &t) {
  os << "n,p,mean_speedup,min_speedup,max_speedup,pairs\n";
  for (const auto &r : t.rows)
    os << r.n << ',' << r.p << ',' << detail::csv_double(r.mean) << ','
       << detail::csv_double(r.min) << ',' << detail::csv_double(r.max) << ','
       << r.pairs << '\n';
}

enum class PlotKind { time_vs_n, speedup_vs_n, holcus_scaling };

inline std::optional<PlotKind> plot_kind_from_string(const std::string &s) {
  if (s == "time_vs_n") return PlotKind::time_vs_n;
  if (s == "speedup_vs_n") return PlotKind::speedup_vs_n;
  if (s == "holcus_scaling") return PlotKind::holcus_scaling;
  return std::nullopt;
}

/// Whitespace-separated `series x y` lines, sorted by series then n. Series
/// are `<method>_p<p>` for timing plots and `speedup_p<p>` for speedups; y is
/// the mean over instances.
inline void emit_plot_data(std::ostream &os, const std::vector<BenchmarkRecord> &records,
                           PlotKind kind) {
  if (records.empty())
    throw DomainError("emit_plot_data: no records");
  std::map<std::string, std::map<int, std::pair<double, int>>> series;
  auto add = [&](const std::string &s, int n, double y) {
    auto &cell = series[s][n];
    cell.first += y;
    cell.second += 1;
  };
  const char *title = "";
  switch (kind) {
  case PlotKind::time_vs_n:
  case PlotKind::holcus_scaling:
    title = kind == PlotKind::time_vs_n ? "time_vs_n" : "holcus_scaling";
    for (const auto &r : records) {
      if (!r.ok() || (kind == PlotKind::holcus_scaling && r.method != "holcus"))
        continue;
      add(r.method + "_p" + std::to_string(r.p), r.n, r.wall_time_seconds);
    }
    break;
  case PlotKind::speedup_vs_n: {
    title = "speedup_vs_n";
    const auto table = aggregate_speedup(records);
    for (const auto &row : table.rows)
      add("speedup_p" + std::to_string(row.p), row.n, row.mean);
    break;
  }
  }
  if (series.empty())
    throw DomainError(std::string("emit_plot_data: no usable records for ") + title);
  os << "# " << title << ": series n value\n";
  for (const auto &[name, points] : series)
    for (const auto &[n, acc] : points)
      os << name << ' ' << n << ' '
         << detail::csv_double(acc.first / static_cast<double>(acc.second)) << '\n';
}

} // namespace holcus
