#include "dppbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dppbo/errors.hpp"
#include "dppbo/posterior.hpp"

namespace dppbo {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& path, const std::string& why) {
    throw InputError("config." + path + ": " + why);
  };
  try {
    objective_from_string(objective);
  } catch (const InputError&) {
    fail("objective", "unknown objective id '" + objective + "'");
  }
  if (resolution.empty()) fail("resolution", "at least one entry required");
  for (int r : resolution) {
    if (r < 2) fail("resolution", "entries must be >= 2");
  }
  if (extra_points < 0) fail("extra_points", "must be >= 0");
  if (strategies.empty()) fail("strategies", "at least one strategy required");
  for (const auto& s : strategies) {
    try {
      algorithm_from_string(s);
    } catch (const InputError&) {
      fail("strategies", "unknown strategy id '" + s + "'");
    }
  }
  if (batch_sizes.empty()) fail("batch_sizes", "at least one batch size required");
  for (int b : batch_sizes) {
    if (b < 1) fail("batch_sizes", "entries must be >= 1");
  }
  if (iterations < 1) fail("iterations", "must be >= 1");
  if (seeds < 1) fail("seeds", "must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta", "must be in (0,1)");
  if (!(noise_var > 0.0)) fail("noise_var", "must be positive");
  if (!(signal_variance > 0.0)) fail("signal_variance", "must be positive");
  if (lengthscales.empty()) fail("lengthscales", "at least one entry required");
  for (double l : lengthscales) {
    if (!(l > 0.0)) fail("lengthscales", "entries must be positive");
  }
  if (!(cprime >= 1.0)) fail("cprime", "must be >= 1");
  if (t_init < 0) fail("t_init", "must be >= 0");
  if (exact_sampler_cap < 1) fail("exact_sampler_cap", "must be >= 1");
  if (kernel_build_cap < 1) fail("kernel_build_cap", "must be >= 1");
  if (mcmc_steps < 0) fail("mcmc_steps", "must be >= 0");
  if (workers < 0) fail("workers", "must be >= 0");
  if (recommendation != "posterior_mean" && recommendation != "best_observed") {
    fail("recommendation", "must be 'posterior_mean' or 'best_observed'");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  read_field(j, "objective", cfg.objective);
  read_field(j, "resolution", cfg.resolution);
  read_field(j, "extra_points", cfg.extra_points);
  read_field(j, "grid_seed", cfg.grid_seed);
  read_field(j, "noise_sigma", cfg.noise_sigma);
  read_field(j, "strategies", cfg.strategies);
  read_field(j, "batch_sizes", cfg.batch_sizes);
  read_field(j, "iterations", cfg.iterations);
  read_field(j, "seeds", cfg.seeds);
  read_field(j, "base_seed", cfg.base_seed);
  read_field(j, "delta", cfg.delta);
  read_field(j, "noise_var", cfg.noise_var);
  read_field(j, "signal_variance", cfg.signal_variance);
  read_field(j, "lengthscales", cfg.lengthscales);
  read_field(j, "cprime", cfg.cprime);
  read_field(j, "t_init", cfg.t_init);
  read_field(j, "exact_sampler_cap", cfg.exact_sampler_cap);
  read_field(j, "kernel_build_cap", cfg.kernel_build_cap);
  read_field(j, "mcmc_steps", cfg.mcmc_steps);
  read_field(j, "out_dir", cfg.out_dir);
  read_field(j, "workers", cfg.workers);
  read_field(j, "emit_plots", cfg.emit_plots);
  read_field(j, "log_scale", cfg.log_scale);
  read_field(j, "recommendation", cfg.recommendation);
  read_field(j, "collect_bounds", cfg.collect_bounds);

  if (const char* env = std::getenv("DPPBO_SEED")) {
    cfg.base_seed = std::strtoull(env, nullptr, 10);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

struct Cell {
  std::string strategy;
  int batch_size;
  std::uint64_t seed_index;
};

struct CellOutput {
  std::vector<ResultRow> rows;
  std::optional<std::pair<std::string, BoundReport>> bounds;
  std::optional<CellError> error;
};

KernelParams kernel_from_config(const ExperimentConfig& cfg, int dim) {
  std::vector<double> ls = cfg.lengthscales;
  if (static_cast<int>(ls.size()) == 1 && dim > 1) ls.assign(static_cast<std::size_t>(dim), ls[0]);
  if (static_cast<int>(ls.size()) != dim) {
    throw InputError("config.lengthscales: expected 1 or " + std::to_string(dim) + " entries");
  }
  return KernelParams(cfg.signal_variance, Eigen::Map<Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size())));
}

CellOutput run_cell(const ExperimentConfig& cfg, const ObjectiveSpec& spec, const KernelParams& params,
                    const Cell& cell, const std::vector<double>& gamma_curve) {
  CellOutput out;
  const DomainGrid& grid = spec.grid();
  const Algorithm algo = algorithm_from_string(cell.strategy);

  StrategyConfig scfg;
  scfg.algorithm = algo;
  scfg.batch_size = cell.batch_size;
  scfg.delta = cfg.delta;
  scfg.noise_var = cfg.noise_var;
  scfg.cprime = cfg.cprime;
  scfg.t_init = algorithm_is_dpp(algo) ? 0 : cfg.t_init;
  scfg.exact_sampler_cap = cfg.exact_sampler_cap;
  scfg.kernel_build_cap = cfg.kernel_build_cap;
  scfg.mcmc_steps = cfg.mcmc_steps;

  const std::uint64_t strat_h = label_hash(cell.strategy);
  Rng rng_alg(derive_seed(cfg.base_seed, {label_hash("alg"), strat_h, static_cast<std::uint64_t>(cell.batch_size),
                                          cell.seed_index}));
  Rng rng_noise(derive_seed(cfg.base_seed, {label_hash("noise"), strat_h,
                                            static_cast<std::uint64_t>(cell.batch_size), cell.seed_index}));
  // shared across strategies and batch sizes: all methods start at the same
  // random point for a given seed
  Rng rng_first(derive_seed(cfg.base_seed, {label_hash("first"), label_hash(cfg.objective), cell.seed_index}));
  const int first_idx = static_cast<int>(rng_first.uniform_index(static_cast<std::size_t>(grid.size())));

  const RecommendationRule rec_rule = cfg.recommendation == "best_observed" ? RecommendationRule::BestObserved
                                                                            : RecommendationRule::PosteriorMean;

  try {
    PosteriorState state(params, cfg.noise_var);
    std::map<int, double> best_observed;
    auto observe = [&](int idx) {
      const double y = spec.evaluate_noisy(idx, rng_noise);
      auto [it, inserted] = best_observed.emplace(idx, y);
      if (!inserted) it->second = std::max(it->second, y);
      return y;
    };

    RegretTrace trace;
    trace.algorithm = cell.strategy;
    trace.batch_size = cell.batch_size;
    trace.seed = cell.seed_index;

    state = state.updated(grid.point(first_idx), observe(first_idx));
    trace.queried.push_back(first_idx);

    if (scfg.t_init > 0) {
      auto [refreshed, queried] = two_stage_init(state, grid, scfg, observe);
      state = std::move(refreshed);
      for (const auto& [idx, y] : queried) trace.queried.push_back(idx);
    }

    std::vector<double> entropies;
    for (int t = 1; t <= cfg.iterations; ++t) {
      const auto t0 = std::chrono::steady_clock::now();
      BatchDecision decision = select_batch(state, grid, scfg, t, rng_alg);
      for (int idx : decision.indices) state = state.updated(grid.point(idx), observe(idx));

      auto mean_at = [&](int idx) { return state.mean_var(grid.point(idx)).first; };
      auto observed_at = [&](int idx) { return best_observed.at(idx); };
      record_iteration(trace, decision, spec, mean_at, rec_rule, observed_at);
      const auto t1 = std::chrono::steady_clock::now();

      if (cfg.collect_bounds) {
        double h = -1.0;
        if (decision.kernel && decision.kernel->size() <= 25 && cell.batch_size >= 2) {
          try {
            h = kdpp_entropy(*decision.kernel, cell.batch_size - 1);
          } catch (const std::exception&) {
            h = -1.0;
          }
        }
        entropies.push_back(h);
      }

      ResultRow row;
      row.objective = cfg.objective;
      row.strategy = cell.strategy;
      row.batch_size = cell.batch_size;
      row.seed = cell.seed_index;
      row.iteration = t;
      row.immediate_regret = trace.iterations.back().immediate_regret;
      row.cumulative_regret = trace.iterations.back().cumulative_regret;
      row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      out.rows.push_back(std::move(row));
    }

    if (cfg.collect_bounds) {
      std::vector<double> gammas;
      for (int t = 1; t <= cfg.iterations; ++t) {
        const std::size_t k = std::min(gamma_curve.size(), static_cast<std::size_t>(t) * cell.batch_size);
        gammas.push_back(k > 0 ? gamma_curve[k - 1] : 0.0);
      }
      const std::string key = cell.strategy + "/" + std::to_string(cell.batch_size) + "/" +
                              std::to_string(cell.seed_index);
      out.bounds = {key, bound_report(trace, entropies, gammas, scfg, grid.size())};
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.error = CellError{cell.strategy, cell.batch_size, cell.seed_index, e.what()};
  }
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ObjectiveSpec spec(objective_from_string(cfg.objective), cfg.resolution, cfg.noise_sigma, cfg.extra_points,
                           cfg.grid_seed);
  const KernelParams params = kernel_from_config(cfg, spec.grid().dim());

  std::vector<double> gamma_curve;
  if (cfg.collect_bounds) {
    int max_b = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
    const int budget = std::min(spec.grid().size(), cfg.iterations * max_b);
    gamma_curve = greedy_gamma_curve(spec.grid(), params, cfg.noise_var, budget);
  }

  std::vector<Cell> cells;
  for (const auto& s : cfg.strategies) {
    for (int b : cfg.batch_sizes) {
      for (int i = 0; i < cfg.seeds; ++i) cells.push_back({s, b, static_cast<std::uint64_t>(i)});
    }
  }

  std::vector<CellOutput> outputs(cells.size());
  const unsigned n_workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                             : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      outputs[i] = run_cell(cfg, spec, params, cells[i], gamma_curve);
    }
  };
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ResultTable table;
  for (auto& o : outputs) {
    table.rows.insert(table.rows.end(), o.rows.begin(), o.rows.end());
    if (o.error) table.errors.push_back(*o.error);
    if (o.bounds) table.bounds.push_back(std::move(*o.bounds));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.objective, a.strategy, a.batch_size, a.seed, a.iteration) <
           std::tie(b.objective, b.strategy, b.batch_size, b.seed, b.iteration);
  });

  // per-iteration medians over seeds
  std::map<std::tuple<std::string, std::string, int, int>, std::pair<std::vector<double>, std::vector<double>>> agg;
  for (const auto& r : table.rows) {
    auto& slot = agg[{r.objective, r.strategy, r.batch_size, r.iteration}];
    slot.first.push_back(r.immediate_regret);
    slot.second.push_back(r.cumulative_regret);
  }
  for (auto& [key, vals] : agg) {
    MedianRow m;
    m.objective = std::get<0>(key);
    m.strategy = std::get<1>(key);
    m.batch_size = std::get<2>(key);
    m.iteration = std::get<3>(key);
    m.median_immediate_regret = median(vals.first);
    m.median_cumulative_regret = median(vals.second);
    table.medians.push_back(std::move(m));
  }
  return table;
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("emit_csv: cannot open '" + path + "' for writing");
  out << "objective,strategy,batch_size,seed,iteration,immediate_regret,cumulative_regret,wall_time_ms\n";
  for (const auto& r : table.rows) {
    out << r.objective << ',' << r.strategy << ',' << r.batch_size << ',' << r.seed << ',' << r.iteration << ','
        << fmt17(r.immediate_regret) << ',' << fmt17(r.cumulative_regret) << ',' << fmt17(r.wall_time_ms) << '\n';
  }
  if (!out) throw InputError("emit_csv: write failed for '" + path + "'");

  std::filesystem::path p(path);
  p.replace_extension(".median.csv");
  std::ofstream med(p);
  if (!med) throw InputError("emit_csv: cannot open '" + p.string() + "' for writing");
  med << "objective,strategy,batch_size,iteration,median_immediate_regret,median_cumulative_regret\n";
  for (const auto& m : table.medians) {
    med << m.objective << ',' << m.strategy << ',' << m.batch_size << ',' << m.iteration << ','
        << fmt17(m.median_immediate_regret) << ',' << fmt17(m.median_cumulative_regret) << '\n';
  }
  if (!med) throw InputError("emit_csv: write failed for '" + p.string() + "'");
}

std::vector<ResultRow> parse_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("parse_results_csv: cannot open '" + path + "'");
  std::vector<ResultRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    ResultRow r;
    std::getline(ss, r.objective, ',');
    std::getline(ss, r.strategy, ',');
    std::getline(ss, tok, ',');
    r.batch_size = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.seed = std::stoull(tok);
    std::getline(ss, tok, ',');
    r.iteration = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.immediate_regret = std::stod(tok);
    std::getline(ss, tok, ',');
    r.cumulative_regret = std::stod(tok);
    std::getline(ss, tok, ',');
    r.wall_time_ms = std::stod(tok);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void emit_charts(const ResultTable& table, const std::string& dir, bool log_scale, double log_floor) {
  std::map<std::pair<std::string, int>, std::map<std::string, std::vector<std::pair<int, double>>>> charts;
  for (const auto& m : table.medians) {
    charts[{m.objective, m.batch_size}][m.strategy].emplace_back(m.iteration, m.median_immediate_regret);
  }
  std::filesystem::create_directories(dir);
  const double width = 720, height = 480, ml = 70, mr = 180, mt = 30, mb = 50;
  for (const auto& [key, series] : charts) {
    double ymin = 1e300, ymax = -1e300;
    int tmax = 1;
    for (const auto& [name, pts] : series) {
      for (const auto& [t, y] : pts) {
        const double v = log_scale ? std::log10(std::max(y, log_floor)) : y;
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
        tmax = std::max(tmax, t);
      }
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    auto xpix = [&](double t) { return ml + (width - ml - mr) * (t - 1) / std::max(1, tmax - 1); };
    auto ypix = [&](double y) {
      const double v = log_scale ? std::log10(std::max(y, log_floor)) : y;
      return mt + (height - mt - mb) * (1.0 - (v - ymin) / (ymax - ymin));
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">iteration</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2 << "\" font-size=\"14\" transform=\"rotate(-90 16 " << height / 2
        << ")\" text-anchor=\"middle\">median immediate regret" << (log_scale ? " (log10)" : "") << "</text>\n";
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << key.first << ", B=" << key.second << "</text>\n";

    int ci = 0;
    for (const auto& [name, pts] : series) {
      const char* color = kPalette[ci % 8];
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [t, y] : pts) svg << xpix(t) << ',' << ypix(y) << ' ';
      svg << "\"/>\n";
      const double ly = mt + 18.0 * ci;
      svg << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - mr + 34 << "\" y2=\""
          << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << name
          << "</text>\n";
      ++ci;
    }
    svg << "</svg>\n";

    const std::string path = dir + "/regret_" + key.first + "_B" + std::to_string(key.second) + ".svg";
    std::ofstream out(path);
    if (!out) throw InputError("emit_charts: cannot open '" + path + "' for writing");
    out << svg.str();
  }
}

void emit_bounds_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("emit_bounds_csv: cannot open '" + path + "' for writing");
  out << "cell,iteration,realized_cumulative,rhs_dpp_max,rhs_est_dpp_max,rhs_sample_sq,sample_rhs_negative,"
         "entropy,within_max_bound,lemma_sigma_violations\n";
  for (const auto& [key, report] : table.bounds) {
    for (const auto& row : report.rows) {
      out << key << ',' << row.iteration << ',' << fmt17(row.realized_cumulative) << ',' << fmt17(row.rhs_dpp_max)
          << ',' << fmt17(row.rhs_est_dpp_max) << ',' << fmt17(row.rhs_sample_sq) << ','
          << (row.sample_rhs_negative ? 1 : 0) << ',' << fmt17(row.entropy) << ',' << (row.within_max_bound ? 1 : 0)
          << ',' << report.lemma_sigma_violations << '\n';
    }
  }
  if (!out) throw InputError("emit_bounds_csv: write failed for '" + path + "'");
}

}  // namespace dppbo
