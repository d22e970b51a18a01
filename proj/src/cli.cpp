#include "burden/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

#include "CLI11.hpp"

#include "burden/bounds.hpp"
#include "burden/datagen.hpp"
#include "burden/io.hpp"
#include "burden/metrics.hpp"
#include "burden/rng.hpp"
#include "burden/svg.hpp"
#include "burden/train.hpp"

namespace burden {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string flag_cell(const std::optional<bool>& v) {
  return v ? (*v ? "1" : "0") : std::string();
}

struct Accumulator {
  std::vector<double> values;
  void add(double v) { values.push_back(v); }
  double mean() const {
    double total = 0.0;
    for (double v : values) total += v;
    return values.empty() ? 0.0 : total / static_cast<double>(values.size());
  }
  double stderr_of_mean() const {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) /
           std::sqrt(static_cast<double>(n));
  }
};

std::vector<SubPopCondition> psi_list_from_config(const json& config) {
  const std::string psi = config.at("psi").get<std::string>();
  if (psi == "sr") return {SubPopCondition{SubPop::All}};
  if (psi == "tpr") return {SubPopCondition{SubPop::PositiveLabel}};
  if (psi == "both")
    return {SubPopCondition{SubPop::All}, SubPopCondition{SubPop::PositiveLabel}};
  throw ValidationError("psi must be one of sr, tpr, both; got '" + psi + "'");
}

fs::path ensure_out_dir(const json& config) {
  const fs::path out(config.at("out").get<std::string>());
  fs::create_directories(out);
  return out;
}

// The output directory is not part of the run's semantics; outputs written
// to different directories from the same config must byte-match.
std::string semantic_hash(const json& config) {
  json semantic = config;
  semantic.erase("out");
  return config_hash_hex(semantic);
}

std::string stamp(const json& config) {
  return "tool=burden version=" + tool_version() +
         " config_hash=" + semantic_hash(config);
}

double json_number_or_inf(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Infinity"))
    return kInfCost;
  throw ValidationError(what + " must be a number or \"inf\"");
}

std::vector<double> grid_from_config(const json& g, const std::string& what) {
  std::vector<double> grid;
  if (g.is_array()) {
    for (const auto& v : g) grid.push_back(v.get<double>());
  } else if (g.is_object()) {
    for (const auto& [key, value] : g.items())
      if (key != "from" && key != "to" && key != "step")
        throw ValidationError("unknown key '" + key + "' in " + what);
    const double from = g.at("from").get<double>();
    const double to = g.at("to").get<double>();
    const double step = g.at("step").get<double>();
    if (!(step > 0.0) || to < from)
      throw ValidationError(what + " needs from <= to and step > 0");
    for (double v = from; v <= to + 1e-12 * std::max(1.0, std::abs(to)); v += step)
      grid.push_back(v);
  } else {
    throw ValidationError(what + " must be an array or {from, to, step}");
  }
  if (grid.empty()) throw ValidationError(what + " is empty");
  return grid;
}

}  // namespace

void validate_config_keys(const json& config, const json& defaults,
                          const std::string& command) {
  for (const auto& [key, value] : config.items()) {
    if (!defaults.contains(key))
      throw ValidationError("unknown config key '" + key + "' for " + command);
    (void)value;
  }
}

CostModel parse_cost_config(const json& spec, const std::vector<std::string>& names) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ValidationError("cost config needs a 'kind' field");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "linear_1d" || kind == "quadratic_separable_1d") {
    const double a0 = spec.value("a0", 1.0);
    const double a1 = spec.value("a1", 1.0);
    return kind == "linear_1d" ? CostModel1D::scaled_linear(a0, a1)
                               : CostModel1D::quadratic_separable(a0, a1);
  }
  if (kind == "linear_multi") {
    const Eigen::Index n = static_cast<Eigen::Index>(names.size());
    Eigen::VectorXd base;
    if (spec.contains("d0") && spec.contains("d1")) {
      const auto& j0 = spec.at("d0");
      const auto& j1 = spec.at("d1");
      Eigen::VectorXd d0(static_cast<Eigen::Index>(j0.size()));
      Eigen::VectorXd d1(static_cast<Eigen::Index>(j1.size()));
      for (std::size_t i = 0; i < j0.size(); ++i)
        d0[static_cast<Eigen::Index>(i)] = json_number_or_inf(j0[i], "d0 entry");
      for (std::size_t i = 0; i < j1.size(); ++i)
        d1[static_cast<Eigen::Index>(i)] = json_number_or_inf(j1[i], "d1 entry");
      return LinearCostMultiD(std::move(d0), std::move(d1));
    }
    if (spec.contains("d")) {
      const auto& jd = spec.at("d");
      base.resize(static_cast<Eigen::Index>(jd.size()));
      for (std::size_t i = 0; i < jd.size(); ++i)
        base[static_cast<Eigen::Index>(i)] = json_number_or_inf(jd[i], "d entry");
    } else if (spec.contains("costs")) {
      if (names.empty())
        throw ValidationError("named cost entries need a dataset schema");
      const double default_cost =
          spec.contains("default_cost")
              ? json_number_or_inf(spec.at("default_cost"), "default_cost")
              : kInfCost;
      base = Eigen::VectorXd::Constant(n, default_cost);
      for (const auto& [name, value] : spec.at("costs").items()) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
          throw ValidationError("cost entry '" + name + "' is not a dataset feature");
        base[static_cast<Eigen::Index>(it - names.begin())] =
            json_number_or_inf(value, "cost entry '" + name + "'");
      }
    } else {
      throw ValidationError("linear_multi cost needs 'd', 'costs', or 'd0'/'d1'");
    }
    const double multiplier = spec.value("group0_multiplier", 1.0);
    if (!(multiplier > 0.0))
      throw ValidationError("group0_multiplier must be positive");
    return LinearCostMultiD(multiplier * base, base);
  }
  if (kind == "quadratic_multi") {
    const auto& rows = spec.at("matrix");
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd B(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n)
        throw ValidationError("quadratic cost matrix must be square");
      for (Eigen::Index j = 0; j < n; ++j)
        B(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return QuadraticCostMultiD(std::move(B));
  }
  throw ValidationError("unknown cost kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

json default_synth_config() {
  return json{{"out", "."},
              {"seed", 1},
              {"mu0", 20.0},
              {"mu1", 28.0},
              {"sigma0_grid", json::array({5.0, 6.0, 7.0, 8.0, 9.0})},
              {"n_per_group", 500},
              {"repetitions", 50},
              {"h_limit", 0.4},
              {"g_limit", 4.0},
              {"grid_points", 100},
              {"psi", "sr"}};
}

int run_synth(const json& config, std::ostream& log) {
  validate_config_keys(config, default_synth_config(), "synth");
  if (config.at("psi").get<std::string>() != "sr")
    throw ValidationError("the synthetic experiment uses psi=sr");
  const auto out = ensure_out_dir(config);
  const std::uint64_t master = config.at("seed").get<std::uint64_t>();
  const double mu0 = config.at("mu0").get<double>();
  const double mu1 = config.at("mu1").get<double>();
  const int n_per_group = config.at("n_per_group").get<int>();
  const int reps = config.at("repetitions").get<int>();
  const double h_limit = config.at("h_limit").get<double>();
  const double g_limit = config.at("g_limit").get<double>();
  const int grid_points = config.at("grid_points").get<int>();
  const std::vector<double> sigma_grid = config.at("sigma0_grid").get<std::vector<double>>();
  if (reps < 1 || grid_points < 2 || sigma_grid.empty())
    throw ValidationError("synth needs repetitions >= 1, grid_points >= 2, sigma values");
  const CostModel1D cost = CostModel1D::scaled_linear(1.0, 1.0);
  const SubPopCondition psi{SubPop::All};

  CsvWriter csv((out / "synth_summary.csv").string(), stamp(config));
  csv.header({"sigma0", "reps_used_h", "infeasible_h", "g_mean_hcons",
              "g_stderr_hcons", "h_mean_hcons", "acc_mean_hcons", "reps_used_g",
              "infeasible_g", "g_mean_gcons", "g_absmean_gcons", "g_stderr_gcons",
              "h_mean_gcons", "acc_mean_gcons"});

  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    const double sigma0 = sigma_grid[si];
    Accumulator g_h, h_h, a_h, g_g, absg_g, h_g, a_g;
    int infeasible_h = 0, infeasible_g = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t seed =
          rep_seed(master, static_cast<std::uint64_t>(si) * reps + rep);
      const Dataset data = generate_synthetic_1d(mu0, mu1, sigma0, n_per_group, seed);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Sample& s : data.samples) {
        lo = std::min(lo, s.features[0]);
        hi = std::max(hi, s.features[0]);
      }
      std::vector<double> grid(static_cast<std::size_t>(grid_points));
      for (int i = 0; i < grid_points; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
      const auto records = sweep_thresholds(data, grid, grid, {psi}, cost, 0.0);
      try {
        const SweepRecord& pick = select_optimal(records, [&](const SweepRecord& r) {
          return r.h_sr && std::abs(*r.h_sr) <= h_limit;
        });
        g_h.add(*pick.g_sr);
        h_h.add(*pick.h_sr);
        a_h.add(pick.accuracy);
      } catch (const InfeasibleError&) {
        ++infeasible_h;
      }
      try {
        const SweepRecord& pick = select_optimal(records, [&](const SweepRecord& r) {
          return r.g_sr && std::abs(*r.g_sr) <= g_limit;
        });
        g_g.add(*pick.g_sr);
        absg_g.add(std::abs(*pick.g_sr));
        h_g.add(*pick.h_sr);
        a_g.add(pick.accuracy);
      } catch (const InfeasibleError&) {
        ++infeasible_g;
      }
    }
    csv.row({format_double(sigma0), std::to_string(g_h.values.size()),
             std::to_string(infeasible_h), format_double(g_h.mean()),
             format_double(g_h.stderr_of_mean()), format_double(h_h.mean()),
             format_double(a_h.mean()), std::to_string(g_g.values.size()),
             std::to_string(infeasible_g), format_double(g_g.mean()),
             format_double(absg_g.mean()), format_double(g_g.stderr_of_mean()),
             format_double(h_g.mean()), format_double(a_g.mean())});
  }
  csv.close();

  // Plot strictly from the CSV just written.
  const CsvContent table = read_csv((out / "synth_summary.csv").string());
  const std::size_t c_sigma = table.column("sigma0");
  const std::size_t c_gh = table.column("g_mean_hcons");
  const std::size_t c_gg = table.column("g_mean_gcons");
  SvgSeries h_series{"stat-rate constrained", {}, true, "#d62728"};
  SvgSeries g_series{"burden-gap constrained", {}, true, "#1f77b4"};
  for (const auto& row : table.rows) {
    h_series.points.emplace_back(parse_double(row[c_sigma]), parse_double(row[c_gh]));
    g_series.points.emplace_back(parse_double(row[c_sigma]), parse_double(row[c_gg]));
  }
  write_svg_chart((out / "synth_gap.svg").string(), "Burden gap vs sigma0", "sigma0",
                  "mean burden gap", {h_series, g_series});

  log << "synth: wrote " << (out / "synth_summary.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

json default_sweep_config() {
  return json{{"out", "."},
              {"seed", 2},
              {"dataset", ""},
              {"tables", ""},
              {"surrogate", false},
              {"count_group0", 16000},
              {"count_group1", 116000},
              {"grid0", json{{"from", 1.0}, {"to", 100.0}, {"step", 1.0}}},
              {"grid1", json{{"from", 1.0}, {"to", 100.0}, {"step", 1.0}}},
              {"psi", "both"},
              {"costs", json::array({"linear", "quadratic_separable"})},
              {"a0", 1.0},
              {"a1", 1.0},
              {"g_target", 0.0}};
}

namespace {

void write_sweep_csv(const std::string& path, const std::string& comment,
                     const std::vector<SweepRecord>& records) {
  CsvWriter csv(path, comment);
  csv.header({"tau0", "tau1", "accuracy", "h_sr", "g_sr", "h_tpr", "g_tpr",
              "constraint_lhs_sr", "constraint_lhs_tpr", "feasible_sr",
              "feasible_tpr"});
  for (const SweepRecord& r : records)
    csv.row({format_double(r.tau0), format_double(r.tau1), format_double(r.accuracy),
             opt_cell(r.h_sr), opt_cell(r.g_sr), opt_cell(r.h_tpr), opt_cell(r.g_tpr),
             opt_cell(r.lhs_sr), opt_cell(r.lhs_tpr), flag_cell(r.feasible_sr),
             flag_cell(r.feasible_tpr)});
}

void sweep_plots_from_csv(const fs::path& csv_path, const fs::path& out,
                          const std::string& cost_name, const std::string& psi) {
  const CsvContent table = read_csv(csv_path.string());
  const std::size_t c_h = table.column("h_" + psi);
  const std::size_t c_g = table.column("g_" + psi);
  const std::size_t c_acc = table.column("accuracy");
  SvgSeries hg{"", {}, false, "#1f77b4"};
  SvgSeries ag{"", {}, false, "#2ca02c"};
  for (const auto& row : table.rows) {
    if (row[c_h].empty() || row[c_g].empty()) continue;
    const double h = parse_double(row[c_h]);
    const double g = parse_double(row[c_g]);
    hg.points.emplace_back(h, g);
    ag.points.emplace_back(parse_double(row[c_acc]), g);
  }
  write_svg_chart((out / ("h_vs_g_" + cost_name + "_" + psi + ".svg")).string(),
                  "Burden gap vs selection-rate gap (" + cost_name + ", " + psi + ")",
                  "H", "G", {hg});
  write_svg_chart((out / ("acc_vs_g_" + cost_name + "_" + psi + ".svg")).string(),
                  "Burden gap vs accuracy (" + cost_name + ", " + psi + ")",
                  "accuracy", "G", {ag});
}

}  // namespace

int run_sweep(const json& config, std::ostream& log) {
  validate_config_keys(config, default_sweep_config(), "sweep");
  const auto out = ensure_out_dir(config);
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const std::string dataset_path = config.at("dataset").get<std::string>();
  const std::string tables_path = config.at("tables").get<std::string>();
  const bool surrogate = config.at("surrogate").get<bool>();

  Dataset data;
  if (!dataset_path.empty()) {
    data = load_csv_dataset(dataset_path);
    if (data.dimension() != 1)
      throw ValidationError("sweep datasets must have a single feature column");
  } else {
    CdfTables tables;
    if (!tables_path.empty())
      tables = load_cdf_tables(tables_path);
    else if (surrogate)
      tables = fico_surrogate_tables();
    else
      throw ValidationError("sweep needs one of: dataset, tables, surrogate=true");
    const auto count0 = config.at("count_group0").get<std::int64_t>();
    const auto count1 = config.at("count_group1").get<std::int64_t>();
    if (count0 <= 0 || count1 <= 0)
      throw ValidationError("sweep needs positive per-group sample counts");
    data = sample_from_cdf_tables(tables, count0, count1, seed);
  }
  if (data.samples.empty()) throw ValidationError("sweep dataset is empty");

  const std::vector<double> grid0 = grid_from_config(config.at("grid0"), "grid0");
  const std::vector<double> grid1 = grid_from_config(config.at("grid1"), "grid1");
  const auto psis = psi_list_from_config(config);
  const double g_target = config.at("g_target").get<double>();
  const double a0 = config.at("a0").get<double>();
  const double a1 = config.at("a1").get<double>();

  for (const auto& cost_name : config.at("costs")) {
    const std::string name = cost_name.get<std::string>();
    CostModel1D cost = name == "linear"
                           ? CostModel1D::scaled_linear(a0, a1)
                           : CostModel1D::quadratic_separable(a0, a1);
    if (name != "linear" && name != "quadratic_separable")
      throw ValidationError("sweep cost must be linear or quadratic_separable");
    const auto records = sweep_thresholds(data, grid0, grid1, psis, cost, g_target);
    const fs::path sweep_csv = out / ("sweep_" + name + ".csv");
    write_sweep_csv(sweep_csv.string(), stamp(config), records);

    for (const auto& psi : psis) {
      const std::string pn = psi_name(psi);
      const bool sr = psi.kind == SubPop::All;
      std::vector<SweepRecord> feasible;
      for (const SweepRecord& r : records) {
        const auto flag = sr ? r.feasible_sr : r.feasible_tpr;
        if (flag && *flag) feasible.push_back(r);
      }
      write_sweep_csv((out / ("feasible_" + name + "_" + pn + ".csv")).string(),
                      stamp(config), feasible);
      try {
        const SweepRecord& pick = select_optimal(
            records,
            [&](const SweepRecord& r) {
              const auto flag = sr ? r.feasible_sr : r.feasible_tpr;
              return flag && *flag;
            },
            psi.kind,
            [&](const SweepRecord& r) -> std::optional<double> {
              return sr ? r.lhs_sr : r.lhs_tpr;
            });
        write_sweep_csv((out / ("optimum_" + name + "_" + pn + ".csv")).string(),
                        stamp(config), {pick});
        const Classifier clf = ThresholdClassifier{pick.tau0, pick.tau1};
        write_classifier_json(clf,
                              (out / ("optimum_" + name + "_" + pn + ".json")).string());
        log << "sweep " << name << " " << pn << ": optimum tau0=" << pick.tau0
            << " tau1=" << pick.tau1 << " accuracy=" << pick.accuracy << "\n";
      } catch (const InfeasibleError& e) {
        log << "sweep " << name << " " << pn << ": " << e.what() << "\n";
      }
      sweep_plots_from_csv(sweep_csv, out, name, pn);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

json default_train_config() {
  return json{{"out", "."},
              {"seed", 3},
              {"dataset", ""},
              {"cost", json{{"kind", "linear_multi"},
                            {"costs", json{{"worker_class", 100.0},
                                           {"occupation", 10.0},
                                           {"hours_per_week", 1.0}}},
                            {"default_cost", "inf"},
                            {"group0_multiplier", 2.0}}},
              {"cost_file", ""},
              {"repetitions", 100},
              {"test_fraction", 0.2},
              {"epsilon", 0.0},
              {"g", 0.0},
              {"epsilon_grid", json::array()},
              {"g_grid", json::array()},
              {"psi", "sr"},
              {"solver", json{{"max_iterations", 100}, {"ftol", 1e-3}, {"fd_eps", 1e-3}}},
              {"save_classifiers", true}};
}

namespace {

struct SplitOutcome {
  bool feasible = false;
  double accuracy = 0.0, h = 0.0, g = 0.0;
  double train_constraint = 0.0;
};

struct RowStats {
  Accumulator acc, h, g;
  int infeasible = 0;

  void add(const SplitOutcome& o) {
    if (!o.feasible) {
      ++infeasible;
      return;
    }
    acc.add(o.accuracy);
    h.add(o.h);
    g.add(o.g);
  }

  std::vector<std::string> cells() const {
    return {std::to_string(acc.values.size()), std::to_string(infeasible),
            format_double(acc.mean()), format_double(acc.stderr_of_mean()),
            format_double(h.mean()), format_double(h.stderr_of_mean()),
            format_double(g.mean()), format_double(g.stderr_of_mean())};
  }
};

SolverParams solver_from_config(const json& config) {
  const json& s = config.at("solver");
  for (const auto& [key, value] : s.items()) {
    if (key != "max_iterations" && key != "ftol" && key != "fd_eps")
      throw ValidationError("unknown solver key '" + key + "'");
    (void)value;
  }
  SolverParams params;
  params.max_iterations = s.value("max_iterations", 100);
  params.ftol = s.value("ftol", 1e-3);
  params.fd_eps = s.value("fd_eps", 1e-3);
  return params;
}

}  // namespace

int run_train(const json& config, std::ostream& log) {
  validate_config_keys(config, default_train_config(), "train");
  const int reps = config.at("repetitions").get<int>();
  if (reps < 1) throw ValidationError("train needs repetitions >= 1");
  const double test_fraction = config.at("test_fraction").get<double>();
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
    throw ValidationError("test_fraction must lie strictly between 0 and 1");
  const auto out = ensure_out_dir(config);
  const std::string dataset_path = config.at("dataset").get<std::string>();
  if (dataset_path.empty()) throw ValidationError("train needs a dataset CSV path");
  Dataset full = load_csv_dataset(dataset_path);
  full.validate();

  json cost_spec = config.at("cost");
  const std::string cost_file = config.at("cost_file").get<std::string>();
  if (!cost_file.empty()) {
    std::ifstream in(cost_file);
    if (!in) throw ParseError("cannot open cost file '" + cost_file + "'");
    in >> cost_spec;
  }
  const CostModel cost_any = parse_cost_config(cost_spec, full.schema.names);
  if (!std::holds_alternative<LinearCostMultiD>(cost_any))
    throw ValidationError("train expects a linear_multi cost model");
  const LinearCostMultiD cost = std::get<LinearCostMultiD>(cost_any);
  // Align the schema mask with the cost vector, then insist they agree.
  for (std::size_t j = 0; j < full.dimension(); ++j)
    full.schema.manipulable[j] = std::isfinite(cost.d(1)[static_cast<Eigen::Index>(j)]);
  check_cost_schema_agreement(cost, full.schema);

  const std::uint64_t master = config.at("seed").get<std::uint64_t>();
  const double epsilon = config.at("epsilon").get<double>();
  const double g_bound = config.at("g").get<double>();
  const SolverParams solver = solver_from_config(config);
  const auto psis = psi_list_from_config(config);
  if (psis.size() != 1)
    throw ValidationError("train uses a single psi (sr or tpr)");
  const SubPopCondition psi = psis.front();
  const bool save_classifiers = config.at("save_classifiers").get<bool>();

  const fs::path clf_dir = out / "classifiers";
  if (save_classifiers) fs::create_directories(clf_dir);

  auto run_one = [&](const Dataset& train, const Dataset& test, ConstraintKind kind,
                     double bound, std::uint64_t seed, const std::string& name,
                     int rep, const std::vector<NormPair>& norm) -> SplitOutcome {
    TrainConfig tc;
    tc.constraint = kind;
    tc.bound = bound;
    tc.psi = psi;
    tc.solver = solver;
    tc.seed = seed;
    tc.cost = cost;
    const TrainResult result = train_linear(train, tc);
    SplitOutcome o;
    o.feasible = result.feasible;
    o.train_constraint = result.constraint_value;
    const MetricsReport m = compute_metrics(test, result.classifier, cost, psi);
    o.accuracy = m.accuracy;
    o.h = m.h_gap;
    o.g = m.g_gap;
    if (save_classifiers) {
      json means = json::array(), stds = json::array();
      for (const NormPair& p : norm) {
        means.push_back(p.mean);
        stds.push_back(p.stddev);
      }
      json meta{{"config_hash", semantic_hash(config)},
                {"seed", seed},
                {"constraint", name},
                {"feasible", result.feasible},
                {"iterations", result.iterations},
                {"train_objective", result.objective},
                {"train_constraint_value", result.constraint_value},
                {"test_accuracy", o.accuracy},
                {"test_h", o.h},
                {"test_g", o.g},
                {"normalization", json{{"mean", means}, {"std", stds}}}};
      write_classifier_json(result.classifier,
                            (clf_dir / (name + "_rep" + std::to_string(rep) + ".json"))
                                .string(),
                            &meta);
    }
    return o;
  };

  RowStats uncons, sr_stats, strat;
  std::vector<std::pair<double, RowStats>> eps_rows, g_rows;
  for (const auto& v : config.at("epsilon_grid")) eps_rows.emplace_back(v.get<double>(), RowStats{});
  for (const auto& v : config.at("g_grid")) g_rows.emplace_back(v.get<double>(), RowStats{});

  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t seed = rep_seed(master, static_cast<std::uint64_t>(rep));
    auto [train, test] = train_test_split(full, test_fraction, seed);
    const std::vector<NormPair> norm = normalize_fit_apply(train, {&test});
    uncons.add(
        run_one(train, test, ConstraintKind::None, 0.0, seed, "f_uncons", rep, norm));
    sr_stats.add(run_one(train, test, ConstraintKind::StatRateAtLeast, epsilon, seed,
                         "f_sr", rep, norm));
    strat.add(run_one(train, test, ConstraintKind::BurdenGapAtMost, g_bound, seed,
                      "f_strat", rep, norm));
    for (auto& [eps, stats] : eps_rows)
      stats.add(run_one(train, test, ConstraintKind::StatRateAtLeast, eps, seed,
                        "f_sr_eps" + format_double(eps), rep, norm));
    for (auto& [g, stats] : g_rows)
      stats.add(run_one(train, test, ConstraintKind::BurdenGapAtMost, g, seed,
                        "f_strat_g" + format_double(g), rep, norm));
  }

  const std::vector<std::string> stat_columns = {
      "reps_used", "infeasible", "accuracy_mean", "accuracy_stderr",
      "h_mean",    "h_stderr",   "g_mean",        "g_stderr"};
  {
    CsvWriter csv((out / "summary.csv").string(), stamp(config));
    std::vector<std::string> header = {"classifier"};
    header.insert(header.end(), stat_columns.begin(), stat_columns.end());
    csv.header(header);
    for (const auto& [name, stats] :
         std::vector<std::pair<std::string, const RowStats*>>{
             {"f_uncons", &uncons}, {"f_sr", &sr_stats}, {"f_strat", &strat}}) {
      std::vector<std::string> row = {name};
      const auto cells = stats->cells();
      row.insert(row.end(), cells.begin(), cells.end());
      csv.row(row);
    }
  }

  auto write_tradeoff = [&](const std::string& label,
                            const std::vector<std::pair<double, RowStats>>& rows,
                            const std::string& file) {
    if (rows.empty()) return;
    CsvWriter csv((out / file).string(), stamp(config));
    std::vector<std::string> header = {label};
    header.insert(header.end(), stat_columns.begin(), stat_columns.end());
    csv.header(header);
    for (const auto& [value, stats] : rows) {
      std::vector<std::string> row = {format_double(value)};
      const auto cells = stats.cells();
      row.insert(row.end(), cells.begin(), cells.end());
      csv.row(row);
    }
    csv.close();
    const CsvContent table = read_csv((out / file).string());
    const std::size_t c_x = table.column(label);
    const std::size_t c_acc = table.column("accuracy_mean");
    const std::size_t c_g = table.column("g_mean");
    const std::size_t c_h = table.column("h_mean");
    SvgSeries acc{"accuracy", {}, true, "#2ca02c"};
    SvgSeries gap{"burden gap", {}, true, "#1f77b4"};
    SvgSeries rate{"stat rate", {}, true, "#d62728"};
    for (const auto& row : table.rows) {
      const double x = parse_double(row[c_x]);
      acc.points.emplace_back(x, parse_double(row[c_acc]));
      gap.points.emplace_back(x, parse_double(row[c_g]));
      rate.points.emplace_back(x, parse_double(row[c_h]));
    }
    const std::string base = file.substr(0, file.size() - 4);
    write_svg_chart((out / (base + "_accuracy.svg")).string(),
                    "Accuracy vs " + label, label, "accuracy", {acc});
    write_svg_chart((out / (base + "_gap.svg")).string(), "Burden gap vs " + label,
                    label, "G", {gap});
    write_svg_chart((out / (base + "_statrate.svg")).string(),
                    "Selection-rate gap vs " + label, label, "H", {rate});
  };
  write_tradeoff("epsilon", eps_rows, "tradeoff_eps.csv");
  write_tradeoff("g", g_rows, "tradeoff_g.csv");

  log << "train: f_uncons acc=" << uncons.acc.mean() << " H=" << uncons.h.mean()
      << " G=" << uncons.g.mean() << "\n";
  log << "train: f_sr     acc=" << sr_stats.acc.mean() << " H=" << sr_stats.h.mean()
      << " G=" << sr_stats.g.mean() << "\n";
  log << "train: f_strat  acc=" << strat.acc.mean() << " H=" << strat.h.mean()
      << " G=" << strat.g.mean() << "\n";
  const int total_infeasible = uncons.infeasible + sr_stats.infeasible + strat.infeasible;
  if (total_infeasible > 0)
    log << "train: " << total_infeasible << " infeasible solver runs excluded\n";
  return 0;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

json default_audit_config() {
  return json{{"out", "."},
              {"dataset", ""},
              {"classifier", ""},
              {"cost", json{{"kind", "linear_1d"}, {"a0", 1.0}, {"a1", 1.0}}},
              {"cost_file", ""},
              {"psi", "both"}};
}

int run_audit(const json& config, std::ostream& log) {
  validate_config_keys(config, default_audit_config(), "audit");
  const auto out = ensure_out_dir(config);
  const std::string dataset_path = config.at("dataset").get<std::string>();
  const std::string classifier_path = config.at("classifier").get<std::string>();
  if (dataset_path.empty() || classifier_path.empty())
    throw ValidationError("audit needs dataset and classifier paths");

  Dataset data = load_csv_dataset(dataset_path);
  const Classifier clf = read_classifier_json(classifier_path);
  if (classifier_dimension(clf) != data.dimension())
    throw SchemaError("classifier dimension does not match dataset");

  // Classifiers trained by the train command carry the normalization of
  // their training partition; evaluate them in that space.
  const json metadata = read_classifier_metadata(classifier_path);
  if (metadata.is_object() && metadata.contains("normalization")) {
    const json& norm = metadata["normalization"];
    const auto& means = norm.at("mean");
    const auto& stds = norm.at("std");
    if (means.size() != data.dimension() || stds.size() != data.dimension())
      throw SchemaError("stored normalization does not match dataset dimension");
    std::vector<NormPair> stats(data.dimension());
    for (std::size_t j = 0; j < stats.size(); ++j)
      stats[j] = NormPair{means[j].get<double>(), stds[j].get<double>()};
    normalize_apply(data, stats);
    log << "audit: applied the classifier's stored normalization\n";
  }

  json cost_spec = config.at("cost");
  const std::string cost_file = config.at("cost_file").get<std::string>();
  if (!cost_file.empty()) {
    std::ifstream in(cost_file);
    if (!in) throw ParseError("cannot open cost file '" + cost_file + "'");
    in >> cost_spec;
  }
  const CostModel cost = parse_cost_config(cost_spec, data.schema.names);

  CsvWriter metrics_csv((out / "metrics.csv").string(), stamp(config));
  {
    std::vector<std::string> header;
    std::string head = metrics_csv_header_line();
    std::size_t pos = 0;
    while (pos <= head.size()) {
      const std::size_t comma = head.find(',', pos);
      header.push_back(head.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    metrics_csv.header(header);
  }
  CsvWriter bounds_csv((out / "bounds.csv").string(), stamp(config));
  bounds_csv.header({"psi", "lower", "upper", "exact", "delta", "w0_star", "w1_star",
                     "constraint_lhs", "quadratic_upper", "quadratic_degenerate"});

  for (const auto& psi : psi_list_from_config(config)) {
    const MetricsReport m = compute_metrics(data, clf, cost, psi);
    metrics_csv.row({psi_name(psi), format_double(m.accuracy), format_double(m.h0),
                     format_double(m.h1), format_double(m.h_gap), format_double(m.g0),
                     format_double(m.g1), format_double(m.g_gap), format_double(m.p0),
                     format_double(m.p1), format_double(m.e0), format_double(m.e1),
                     std::to_string(m.n0), std::to_string(m.n1)});
    log << "audit " << psi_name(psi) << ": accuracy=" << m.accuracy
        << " H=" << m.h_gap << " G=" << m.g_gap << "\n";

    BoundsReport b;
    if (std::holds_alternative<ThresholdClassifier>(clf) &&
        std::holds_alternative<CostModel1D>(cost)) {
      const auto& t = std::get<ThresholdClassifier>(clf);
      const auto [lower, upper] =
          burden_gap_bounds_1d(data, t, psi, std::get<CostModel1D>(cost));
      b.lower = lower;
      b.upper = upper;
      b.constraint_lhs = constraint_lhs_1d(data, t.tau0, t.tau1, psi);
      bounds_csv.row({psi_name(psi), format_double(b.lower), format_double(b.upper),
                      "", "", "", "", opt_cell(b.constraint_lhs), "", ""});
      log << "audit " << psi_name(psi) << ": bounds [" << b.lower << ", " << b.upper
          << "] constraint_lhs=" << *b.constraint_lhs << "\n";
    } else if (std::holds_alternative<LinearClassifier>(clf) &&
               std::holds_alternative<LinearCostMultiD>(cost)) {
      const auto& lin = std::get<LinearClassifier>(clf);
      const ExactLinearGap exact =
          burden_gap_exact_linear(data, lin, psi, std::get<LinearCostMultiD>(cost));
      bounds_csv.row({psi_name(psi), format_double(exact.exact),
                      format_double(exact.exact), format_double(exact.exact),
                      format_double(exact.delta), format_double(exact.w0_star),
                      format_double(exact.w1_star), "", "", ""});
      log << "audit " << psi_name(psi) << ": exact gap=" << exact.exact
          << " delta=" << exact.delta << "\n";
    } else if (std::holds_alternative<LinearClassifier>(clf) &&
               std::holds_alternative<QuadraticCostMultiD>(cost)) {
      const auto& lin = std::get<LinearClassifier>(clf);
      const QuadraticUpperBound qb = burden_gap_upper_quadratic(
          data, lin, psi, std::get<QuadraticCostMultiD>(cost));
      bounds_csv.row({psi_name(psi), "", format_double(qb.upper), "", "", "", "", "",
                      format_double(qb.upper), qb.degenerate ? "1" : "0"});
      log << "audit " << psi_name(psi) << ": quadratic upper bound=" << qb.upper
          << (qb.degenerate ? " (degenerate)" : "") << "\n";
    } else {
      throw ValidationError("cost model kind does not match classifier kind");
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cli entry
// ---------------------------------------------------------------------------

namespace {

json load_and_merge_config(const json& defaults, const std::string& config_path) {
  json merged = defaults;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ParseError("cannot open config '" + config_path + "'");
    json file_config;
    try {
      in >> file_config;
    } catch (const json::exception& e) {
      throw ParseError("invalid JSON in '" + config_path + "': " + e.what());
    }
    for (const auto& [key, value] : file_config.items()) merged[key] = value;
  }
  return merged;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Strategic-manipulation burden auditing and training"};
  app.require_subcommand(1);

  struct CommonFlags {
    std::string config, out, psi;
    std::optional<std::uint64_t> seed;
    std::string dataset, classifier, tables, cost_file;
    bool surrogate = false;
  };

  std::map<std::string, CommonFlags> flags;
  auto add_common = [&](CLI::App* sub, const std::string& name) {
    auto& f = flags[name];
    sub->add_option("--config", f.config, "JSON configuration file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--psi", f.psi, "sub-population condition: sr, tpr, both");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthetic two-Gaussian experiment");
  add_common(synth, "synth");
  CLI::App* sweep = app.add_subcommand("sweep", "threshold sweep over score tables");
  add_common(sweep, "sweep");
  sweep->add_option("--dataset", flags["sweep"].dataset, "1-D dataset CSV");
  sweep->add_option("--tables", flags["sweep"].tables, "CDF tables CSV");
  sweep->add_flag("--surrogate", flags["sweep"].surrogate,
                  "use the built-in synthetic surrogate tables");
  CLI::App* train = app.add_subcommand("train", "constrained linear-classifier training");
  add_common(train, "train");
  train->add_option("--dataset", flags["train"].dataset, "dataset CSV");
  train->add_option("--cost", flags["train"].cost_file, "cost-model JSON file");
  CLI::App* audit = app.add_subcommand("audit", "metrics and bounds for a classifier");
  add_common(audit, "audit");
  audit->add_option("--dataset", flags["audit"].dataset, "dataset CSV");
  audit->add_option("--classifier", flags["audit"].classifier, "classifier JSON");
  audit->add_option("--cost", flags["audit"].cost_file, "cost-model JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const CommonFlags& f = flags[name];
    json defaults;
    if (name == "synth") defaults = default_synth_config();
    if (name == "sweep") defaults = default_sweep_config();
    if (name == "train") defaults = default_train_config();
    if (name == "audit") defaults = default_audit_config();
    json config = load_and_merge_config(defaults, f.config);
    if (!f.out.empty()) config["out"] = f.out;
    if (f.seed) config["seed"] = *f.seed;
    if (!f.psi.empty()) config["psi"] = f.psi;
    if (!f.dataset.empty()) config["dataset"] = f.dataset;
    if (!f.classifier.empty()) config["classifier"] = f.classifier;
    if (!f.tables.empty()) config["tables"] = f.tables;
    if (!f.cost_file.empty()) config["cost_file"] = f.cost_file;
    if (f.surrogate) config["surrogate"] = true;

    if (name == "synth") return run_synth(config, std::cout);
    if (name == "sweep") return run_sweep(config, std::cout);
    if (name == "train") return run_train(config, std::cout);
    return run_audit(config, std::cout);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace burden
