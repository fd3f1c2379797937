// Command line front end: estimate, simulate, correlate, term, compare and
// events. Every artifact embeds the effective configuration (CSV files as a
// leading "# config:" comment, JSON files as a "config" object) and contains
// nothing run-dependent beyond the inputs, so identical invocations produce
// byte-identical files.
//
// Exit codes: 0 success, 2 command line parse error, 3 invalid
// configuration value, 4 input/output or data error, 1 anything else.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <rvol/benchmarks.hpp>
#include <rvol/errors.hpp>
#include <rvol/event_study.hpp>
#include <rvol/reactive.hpp>
#include <rvol/simulation.hpp>
#include <rvol/stats.hpp>
#include <rvol/term_structure.hpp>
#include <rvol/timeseries.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

// Atomic publish: write next to the target, then rename over it.
void write_file(const fs::path& path, const std::string& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw rvol::io_error("cannot write " + tmp.string());
    out << body;
    if (!out) throw rvol::io_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw rvol::io_error("cannot create output directory " + out);
  return dir;
}

std::string csv_header(const json& config, const std::string& columns) {
  return "# config: " + config.dump() + "\n" + columns + "\n";
}

void print_summary(const json& j) { std::cout << j.dump() << "\n"; }

// Estimator options shared by most subcommands.
struct EstimatorOpts {
  rvol::EstimatorParams params;
  int warmup = rvol::kDefaultWarmup;

  void attach(CLI::App* cmd, bool with_warmup = true) {
    cmd->add_option("--lambda-slow", params.lambda_slow,
                    "slow level EMA weight")->capture_default_str();
    cmd->add_option("--lambda-fast", params.lambda_fast,
                    "fast level EMA weight")->capture_default_str();
    cmd->add_option("--lambda-sigma", params.lambda_sigma,
                    "variance EMA weight")->capture_default_str();
    cmd->add_option("--phi", params.filter_steepness,
                    "filter steepness, 0 disables saturation")
        ->capture_default_str();
    cmd->add_option("--ell", params.leverage, "panic exponent")
        ->capture_default_str();
    if (with_warmup)
      cmd->add_option("--warmup", warmup, "warm-up steps for the variance seed")
          ->capture_default_str();
  }

  void validate() const {
    params.validate();
    if (warmup < 0) throw std::invalid_argument("warmup must be >= 0");
  }

  json to_json(bool with_warmup = true) const {
    json j{{"lambda_slow", params.lambda_slow},
           {"lambda_fast", params.lambda_fast},
           {"lambda_sigma", params.lambda_sigma},
           {"phi", params.filter_steepness},
           {"ell", params.leverage}};
    if (with_warmup) j["warmup"] = warmup;
    return j;
  }
};

int thread_budget(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("REACTIVE_VOL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("REACTIVE_VOL_THREADS must be a positive integer");
    n = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Ordered parallel map: results land by index regardless of scheduling.
template <typename Fn>
void for_each_indexed(std::size_t jobs, int threads, Fn&& fn) {
  if (threads <= 1 || jobs <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        fn(i);
      }
    }));
  }
  for (auto& f : workers) f.get();  // rethrows the first failure
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  rvol::SimConfig config;
  EstimatorOpts est;
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("simulate",
        "generate a synthetic index path with the reactive feedback loop");
    cmd->add_option("--steps", config.n_steps, "total updates")
        ->capture_default_str();
    cmd->add_option("--burn-in", config.burn_in, "leading updates dropped")
        ->capture_default_str();
    cmd->add_option("--sigma-tilde", config.sigma_tilde_const,
                    "renormalized vol held constant")->capture_default_str();
    cmd->add_option("--initial-price", config.initial_price, "starting price")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "random seed")->capture_default_str();
    est.attach(cmd, /*with_warmup=*/false);
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    config.estimator = est.params;
    config.validate();
    const fs::path dir = prepare_out_dir(out);

    rvol::SimResult res = rvol::simulate_index_path(config);

    json cfg{{"command", "simulate"},
             {"steps", config.n_steps},
             {"burn_in", config.burn_in},
             {"sigma_tilde", config.sigma_tilde_const},
             {"initial_price", config.initial_price},
             {"seed", config.seed},
             {"estimator", est.to_json(/*with_warmup=*/false)}};

    std::string body = csv_header(cfg, "date,close");
    for (std::size_t i = 0; i < res.series.size(); ++i)
      body += res.series.dates[i].to_string() + "," + fmt(res.series.prices[i]) + "\n";
    write_file(dir / "sim.csv", body);

    print_summary(json{{"command", "simulate"},
                       {"rows", res.series.size()},
                       {"resamples", res.resamples},
                       {"out", (dir / "sim.csv").string()}});
  }
};

// ---------------------------------------------------------------- estimate

struct EstimateCmd {
  std::string input;
  std::string index;
  EstimatorOpts est;
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("estimate",
        "reactive vol for one series, with EMA and GARCH benchmark tracks");
    cmd->add_option("--input", input, "price CSV (date,close)")->required();
    cmd->add_option("--index", index,
                    "index price CSV; treat --input as a single stock");
    est.attach(cmd);
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    est.validate();
    const fs::path dir = prepare_out_dir(out);

    const rvol::PriceSeries series = rvol::load_price_series(input);
    rvol::EstimateResult res;
    if (index.empty()) {
      res = rvol::estimate_index_vol(series, est.params, est.warmup);
    } else {
      const rvol::PriceSeries idx = rvol::load_price_series(index);
      res = rvol::estimate_stock_vol(series, idx, est.params, est.warmup);
    }
    const rvol::ReturnSeries rets = rvol::arithmetic_returns(series);

    // Benchmark tracks, same end-of-day forecast convention as the
    // reactive column: row t is the estimate after seeing return t.
    const std::size_t n = rets.size();
    std::vector<double> ema(n);
    {
      const std::size_t w = std::min<std::size_t>(
          static_cast<std::size_t>(est.warmup), n);
      std::vector<double> head(rets.returns.begin(),
                               rets.returns.begin() + static_cast<long>(w));
      double v = rvol::sample_variance(head);
      for (std::size_t t = 0; t < n; ++t) {
        v = rvol::std_ema_vol_update(v, rets.returns[t], est.params.lambda_sigma);
        ema[t] = std::sqrt(v);
      }
    }

    std::optional<rvol::GarchFit> garch;
    std::vector<double> garch_sigma;
    if (n >= 250) {
      garch = rvol::garch_fit(rets.returns);
      double h = rvol::sample_variance(rets.returns);
      garch_sigma.resize(n);
      for (std::size_t t = 0; t < n; ++t) {
        h = rvol::garch_update(h, rets.returns[t], garch->params);
        garch_sigma[t] = std::sqrt(h);
      }
    }

    json cfg{{"command", "estimate"},
             {"input", fs::path(input).filename().string()},
             {"estimator", est.to_json()}};
    if (!index.empty()) cfg["index"] = fs::path(index).filename().string();

    std::string body =
        csv_header(cfg, "date,sigma_reactive,provisional,sigma_ema,sigma_garch");
    for (std::size_t t = 0; t < n; ++t) {
      body += res.vols.dates[t].to_string();
      body += "," + fmt(res.vols.sigmas[t]);
      body += res.vols.provisional[t] ? ",1" : ",0";
      body += "," + fmt(ema[t]);
      body += garch ? "," + fmt(garch_sigma[t]) : ",";
      body += "\n";
    }
    write_file(dir / "estimate.csv", body);

    const rvol::LongTermVols lt = rvol::long_term_vols(res.final_state);
    json state{{"config", cfg},
               {"instrument", series.instrument_id},
               {"n_returns", n},
               {"state", res.final_state},
               {"long_term", {{"slow", lt.slow}, {"fast", lt.fast}}}};
    if (garch) {
      state["garch"] = {{"omega", garch->params.omega},
                        {"alpha", garch->params.alpha},
                        {"beta", garch->params.beta},
                        {"log_likelihood", garch->log_likelihood},
                        {"converged", garch->converged},
                        {"iterations", garch->iterations}};
    } else {
      state["garch"] = nullptr;
    }
    write_file(dir / "state.json", state.dump(2) + "\n");

    json summary{{"command", "estimate"},
                 {"instrument", series.instrument_id},
                 {"rows", n},
                 {"final_sigma", res.vols.sigmas.empty() ? 0.0 : res.vols.sigmas.back()},
                 {"garch_fitted", garch.has_value()},
                 {"out", (dir / "estimate.csv").string()}};
    print_summary(summary);
  }
};

// --------------------------------------------------------------- correlate

struct CorrelateCmd {
  std::string input;
  int tau_max = 40;
  int fit_min_lag = 1;
  int fit_max_lag = 40;
  long min_samples = 100;
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("correlate",
        "leverage correlation of a price series and its exponential fit");
    cmd->add_option("--input", input, "price CSV (date,close)")->required();
    cmd->add_option("--tau-max", tau_max, "largest lag")->capture_default_str();
    cmd->add_option("--fit-min-lag", fit_min_lag, "first lag used by the fit")
        ->capture_default_str();
    cmd->add_option("--fit-max-lag", fit_max_lag, "last lag used by the fit")
        ->capture_default_str();
    cmd->add_option("--min-samples", min_samples,
                    "smallest per-lag sample count used by the fit")
        ->capture_default_str();
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const fs::path dir = prepare_out_dir(out);
    const rvol::PriceSeries series = rvol::load_price_series(input);
    const rvol::CorrFunction corr = rvol::leverage_correlation(series, tau_max);

    json cfg{{"command", "correlate"},
             {"input", fs::path(input).filename().string()},
             {"tau_max", tau_max},
             {"fit_min_lag", fit_min_lag},
             {"fit_max_lag", fit_max_lag},
             {"min_samples", min_samples}};

    std::string body = csv_header(cfg, "tau,value,n_samples");
    for (std::size_t i = 0; i < corr.values.size(); ++i)
      body += std::to_string(corr.taus[i]) + "," + fmt(corr.values[i]) + "," +
              std::to_string(corr.n_samples[i]) + "\n";
    write_file(dir / "correlation.csv", body);

    json report{{"config", cfg}, {"n_lags", corr.values.size()}};
    json summary{{"command", "correlate"}, {"out", (dir / "correlation.csv").string()}};
    try {
      const rvol::ExpFit fit =
          rvol::fit_exponential(corr, fit_min_lag, fit_max_lag, min_samples);
      report["fit"] = {{"amplitude", fit.amplitude},
                       {"time_constant", fit.time_constant},
                       {"residual_norm", fit.residual_norm},
                       {"n_lags_used", fit.n_lags_used}};
      summary["amplitude"] = fit.amplitude;
      summary["time_constant"] = fit.time_constant;
    } catch (const std::invalid_argument& e) {
      report["fit"] = nullptr;
      report["fit_error"] = e.what();
      summary["fit_error"] = e.what();
    }
    write_file(dir / "correlation.json", report.dump(2) + "\n");
    print_summary(summary);
  }
};

// -------------------------------------------------------------------- term

struct TermCmd {
  std::string input;
  EstimatorOpts est;
  std::vector<double> maturities = {1.0, 5.0, 21.0, 63.0, 126.0, 252.0};
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("term",
        "vol term structure implied by the final estimator state");
    cmd->add_option("--input", input, "price CSV (date,close)")->required();
    est.attach(cmd);
    cmd->add_option("--maturities", maturities,
                    "maturities in trading steps")
        ->delimiter(',')->capture_default_str();
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    est.validate();
    if (maturities.empty())
      throw std::invalid_argument("term: need at least one maturity");
    const fs::path dir = prepare_out_dir(out);

    const rvol::PriceSeries series = rvol::load_price_series(input);
    const rvol::EstimateResult res =
        rvol::estimate_index_vol(series, est.params, est.warmup);
    if (res.vols.sigmas.empty() || res.vols.provisional.back())
      throw rvol::data_error(series.instrument_id +
                             ": series too short, final state still provisional");

    const double sigma_inst = res.vols.sigmas.back();
    const rvol::LongTermVols lt = rvol::long_term_vols(res.final_state);

    json cfg{{"command", "term"},
             {"input", fs::path(input).filename().string()},
             {"estimator", est.to_json()},
             {"maturities", maturities}};

    rvol::TermVolInputs in;
    in.sigma_inst = sigma_inst;
    in.sigma_fast_lt = lt.fast;
    in.sigma_slow_lt = lt.slow;
    in.lambda_slow = est.params.lambda_slow;
    in.lambda_fast = est.params.lambda_fast;

    std::string body = csv_header(cfg, "maturity,sigma,sigma_annualized,clamped");
    for (double m : maturities) {
      in.maturity = m;
      const rvol::TermVol tv = rvol::sigma_at_maturity(in);
      body += fmt(m) + "," + fmt(tv.sigma) + "," + fmt(rvol::annualize(tv.sigma)) +
              (tv.clamped ? ",1" : ",0") + "\n";
    }
    write_file(dir / "term.csv", body);

    print_summary(json{{"command", "term"},
                       {"sigma_inst", sigma_inst},
                       {"sigma_fast_lt", lt.fast},
                       {"sigma_slow_lt", lt.slow},
                       {"out", (dir / "term.csv").string()}});
  }
};

// ----------------------------------------------------------------- compare

struct CompareCmd {
  std::string input;
  EstimatorOpts est;
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("compare",
        "how well each estimator homoscedastizes the return series");
    cmd->add_option("--input", input, "price CSV (date,close)")->required();
    est.attach(cmd);
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  static json stats_block(std::span<const double> x) {
    return json{{"excess_kurtosis", rvol::excess_kurtosis(x)},
                {"sq_autocorr_lag1", [&] {
                   std::vector<double> sq(x.size());
                   for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
                   return rvol::autocorrelation(sq, 1);
                 }()}};
  }

  void run() {
    est.validate();
    const fs::path dir = prepare_out_dir(out);

    const rvol::PriceSeries series = rvol::load_price_series(input);
    const rvol::EstimateResult res =
        rvol::estimate_index_vol(series, est.params, est.warmup);
    const rvol::ReturnSeries rets = rvol::arithmetic_returns(series);
    const std::size_t n = rets.size();

    // Rows usable by every track: return t normalized by the estimate at
    // t-1, so we start after the warm-up and one extra row.
    const std::size_t start = static_cast<std::size_t>(est.warmup) + 1;
    if (n < start + 30)
      throw rvol::data_error(series.instrument_id +
                             ": too few returns after warm-up for a comparison");

    std::vector<double> ema_sigma(n);
    {
      std::vector<double> head(rets.returns.begin(),
                               rets.returns.begin() + static_cast<long>(
                                   std::min<std::size_t>(est.warmup, n)));
      double v = rvol::sample_variance(head);
      for (std::size_t t = 0; t < n; ++t) {
        v = rvol::std_ema_vol_update(v, rets.returns[t], est.params.lambda_sigma);
        ema_sigma[t] = std::sqrt(v);
      }
    }

    std::optional<rvol::GarchFit> garch;
    std::vector<double> garch_sigma(n);
    if (n >= 250) {
      garch = rvol::garch_fit(rets.returns);
      double h = rvol::sample_variance(rets.returns);
      for (std::size_t t = 0; t < n; ++t) {
        garch_sigma[t] = std::sqrt(h);  // forecast made before return t
        h = rvol::garch_update(h, rets.returns[t], garch->params);
      }
    }

    std::vector<double> raw, reactive, ema_norm, garch_norm;
    for (std::size_t t = start; t < n; ++t) {
      raw.push_back(rets.returns[t]);
      reactive.push_back(rets.returns[t] / res.vols.sigmas[t - 1]);
      ema_norm.push_back(rets.returns[t] / ema_sigma[t - 1]);
      if (garch) garch_norm.push_back(rets.returns[t] / garch_sigma[t]);
    }

    json cfg{{"command", "compare"},
             {"input", fs::path(input).filename().string()},
             {"estimator", est.to_json()}};
    json report{{"config", cfg},
                {"instrument", series.instrument_id},
                {"n_rows", raw.size()},
                {"raw", stats_block(raw)},
                {"reactive", stats_block(reactive)},
                {"ema", stats_block(ema_norm)},
                {"garch", garch ? stats_block(garch_norm) : json(nullptr)}};
    write_file(dir / "report.json", report.dump(2) + "\n");

    print_summary(json{{"command", "compare"},
                       {"raw_kurtosis", report["raw"]["excess_kurtosis"]},
                       {"reactive_kurtosis", report["reactive"]["excess_kurtosis"]},
                       {"out", (dir / "report.json").string()}});
  }
};

// ------------------------------------------------------------------ events

struct EventsCmd {
  std::string index;
  std::vector<std::string> stocks;
  EstimatorOpts est;
  int delta = 9;
  double threshold_mult = 3.0;
  double index_threshold = 0.03;
  std::size_t n_baseline = 0;  // 0: one baseline row per detected event
  std::uint64_t baseline_seed = 1;
  double warning_multiplier = 2.0;
  int warning_lookback = 9;
  std::string out;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("events",
        "cross-sectional study of vol-normalized extreme returns");
    cmd->add_option("--index", index, "index price CSV")->required();
    cmd->add_option("--stocks", stocks, "stock price CSVs")
        ->required()->expected(-1);
    est.attach(cmd);
    cmd->add_option("--delta", delta, "event window half-width")
        ->capture_default_str();
    cmd->add_option("--threshold-mult", threshold_mult,
                    "event threshold in units of sigma")->capture_default_str();
    cmd->add_option("--index-threshold", index_threshold,
                    "index move separating systematic from specific")
        ->capture_default_str();
    cmd->add_option("--n-baseline", n_baseline,
                    "random baseline windows (0: match the event count)")
        ->capture_default_str();
    cmd->add_option("--baseline-seed", baseline_seed, "baseline random seed")
        ->capture_default_str();
    cmd->add_option("--warning-multiplier", warning_multiplier,
                    "realized-vol warning threshold multiplier")
        ->capture_default_str();
    cmd->add_option("--warning-lookback", warning_lookback,
                    "warning window length")->capture_default_str();
    cmd->add_option("--out", out, "output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    est.validate();
    if (delta < 1) throw std::invalid_argument("events: delta must be >= 1");
    const fs::path dir = prepare_out_dir(out);

    const rvol::PriceSeries index_series = rvol::load_price_series(index);
    const rvol::ReturnSeries index_returns = rvol::arithmetic_returns(index_series);

    std::vector<std::string> stock_paths(stocks);
    std::sort(stock_paths.begin(), stock_paths.end());

    struct PerStock {
      std::string instrument;
      rvol::ReturnSeries returns;
      rvol::VolSeries vols;
      std::vector<rvol::ExtremeEvent> events;
      rvol::WarningStats warnings;
      std::vector<double> normalized;  // every usable normalized return
    };
    std::vector<PerStock> per(stock_paths.size());

    const int threads = thread_budget(stock_paths.size());
    for_each_indexed(stock_paths.size(), threads, [&](std::size_t i) {
      PerStock& ps = per[i];
      const rvol::PriceSeries s = rvol::load_price_series(stock_paths[i]);
      ps.instrument = s.instrument_id;
      const rvol::EstimateResult est_res =
          rvol::estimate_stock_vol(s, index_series, est.params, est.warmup);
      ps.returns = rvol::arithmetic_returns(s);
      ps.vols = est_res.vols;
      ps.events = rvol::detect_events(ps.returns, ps.vols, delta, threshold_mult);
      for (auto& e : ps.events)
        e.group = rvol::classify_event(e, index_returns, index_threshold);
      ps.warnings = rvol::warning_signal_stats(ps.returns, ps.vols, ps.events,
                                               warning_multiplier,
                                               warning_lookback);
      for (std::size_t t = 1; t < ps.returns.size(); ++t)
        if (!ps.vols.provisional[t - 1] && ps.vols.sigmas[t - 1] > 0.0)
          ps.normalized.push_back(ps.returns.returns[t] / ps.vols.sigmas[t - 1]);
    });

    std::vector<rvol::ExtremeEvent> all_events;
    std::vector<double> all_normalized;
    for (const auto& ps : per) {
      all_events.insert(all_events.end(), ps.events.begin(), ps.events.end());
      all_normalized.insert(all_normalized.end(), ps.normalized.begin(),
                            ps.normalized.end());
    }

    json cfg{{"command", "events"},
             {"index", fs::path(index).filename().string()},
             {"n_stocks", stock_paths.size()},
             {"estimator", est.to_json()},
             {"delta", delta},
             {"threshold_mult", threshold_mult},
             {"index_threshold", index_threshold},
             {"n_baseline", n_baseline},
             {"baseline_seed", baseline_seed},
             {"warning_multiplier", warning_multiplier},
             {"warning_lookback", warning_lookback}};

    // ---- events.json
    const rvol::EventGroup kGroups[4] = {rvol::EventGroup::kSystematicPositive,
                                         rvol::EventGroup::kSystematicNegative,
                                         rvol::EventGroup::kSpecificPositive,
                                         rvol::EventGroup::kSpecificNegative};
    json group_counts = json::object();
    for (rvol::EventGroup g : kGroups) {
      long c = 0;
      for (const auto& e : all_events) c += e.group == g;
      group_counts[std::string(rvol::to_string(g))] = c;
    }
    json ev_list = json::array();
    for (const auto& e : all_events)
      ev_list.push_back(json{{"instrument", e.instrument_id},
                             {"date", e.date.to_string()},
                             {"row", e.row},
                             {"normalized_return", e.normalized_return},
                             {"group", std::string(rvol::to_string(*e.group))}});

    // ---- profiles: per group, pooled, baseline
    std::vector<rvol::QProfile> profiles;
    for (rvol::EventGroup g : kGroups) {
      const bool any = std::any_of(all_events.begin(), all_events.end(),
                                   [&](const auto& e) { return e.group == g; });
      if (any) profiles.push_back(rvol::q_profile(all_events, g));
    }
    if (!all_events.empty())
      profiles.push_back(rvol::q_profile_pooled(all_events, "all"));

    if (!all_events.empty()) {
      std::vector<rvol::QProfile> base_parts;
      for (std::size_t i = 0; i < per.size(); ++i) {
        const std::size_t want =
            n_baseline > 0
                ? std::max<std::size_t>(1, n_baseline / per.size())
                : per[i].events.size();
        if (want == 0) continue;
        base_parts.push_back(rvol::random_baseline(per[i].returns, per[i].vols,
                                                   want, baseline_seed + i,
                                                   delta));
      }
      if (!base_parts.empty()) {
        rvol::QProfile base = rvol::merge_q_profiles(base_parts, "baseline");
        base.with_replacement =
            std::any_of(base_parts.begin(), base_parts.end(),
                        [](const auto& b) { return b.with_replacement; });
        profiles.push_back(std::move(base));
      }
    }

    std::string prof_body = csv_header(cfg, "label,k,q,count");
    for (const auto& p : profiles)
      for (int k = -p.delta; k <= p.delta; ++k) {
        const auto idx_k = static_cast<std::size_t>(k + p.delta);
        prof_body += p.label + "," + std::to_string(k) + "," + fmt(p.q[idx_k]) +
                     "," + std::to_string(p.counts[idx_k]) + "\n";
      }
    write_file(dir / "qprofiles.csv", prof_body);

    json recovery = json::object();
    for (const auto& p : profiles) {
      if (p.label == "baseline") continue;
      try {
        recovery[p.label] = rvol::recovery_time(p);
      } catch (const std::invalid_argument&) {
        recovery[p.label] = nullptr;
      }
    }

    json events_doc{{"config", cfg},
                    {"n_events", all_events.size()},
                    {"groups", group_counts},
                    {"recovery", recovery},
                    {"events", ev_list}};
    write_file(dir / "events.json", events_doc.dump(2) + "\n");

    // ---- tails.json
    auto tail_block = [&](std::span<const double> xs,
                          std::string_view label) -> json {
      try {
        const rvol::TailFit fit =
            rvol::tail_exponent(xs, label, threshold_mult);
        return json{{"alpha", fit.alpha},
                    {"threshold", fit.threshold},
                    {"n_tail", fit.n_tail},
                    {"diverging", fit.diverging}};
      } catch (const std::invalid_argument& e) {
        return json{{"error", e.what()}};
      }
    };
    json tails{{"config", cfg},
               {"all_returns", tail_block(all_normalized, "all_returns")}};
    json tail_groups = json::object();
    for (rvol::EventGroup g : kGroups) {
      std::vector<double> r0;
      for (const auto& e : all_events)
        if (e.group == g) r0.push_back(e.normalized_return);
      tail_groups[std::string(rvol::to_string(g))] =
          tail_block(r0, rvol::to_string(g));
    }
    tails["groups"] = tail_groups;
    write_file(dir / "tails.json", tails.dump(2) + "\n");

    // ---- warnings.json, with the conditional vol comparison
    json per_instr = json::array();
    std::size_t n_events = 0, n_warnings = 0, n_missed = 0, n_false = 0;
    for (const auto& ps : per) {
      const auto& w = ps.warnings;
      per_instr.push_back(json{{"instrument", ps.instrument},
                               {"n_events", w.n_events},
                               {"n_warnings", w.n_warnings},
                               {"n_missed", w.n_missed},
                               {"n_false", w.n_false},
                               {"missed_fraction", w.missed_fraction},
                               {"false_fraction", w.false_fraction}});
      n_events += w.n_events;
      n_warnings += w.n_warnings;
      n_missed += w.n_missed;
      n_false += w.n_false;
    }
    json aggregate{{"n_events", n_events},
                   {"n_warnings", n_warnings},
                   {"n_missed", n_missed},
                   {"n_false", n_false},
                   {"missed_fraction",
                    n_events ? static_cast<double>(n_missed) / n_events : 0.0},
                   {"false_fraction",
                    n_warnings ? static_cast<double>(n_false) / n_warnings : 0.0}};

    json cond = nullptr;
    {
      double c_sum = 0.0, u_sum = 0.0;
      std::size_t c_n = 0, u_n = 0;
      for (const auto& ps : per) {
        if (ps.events.empty()) continue;
        const rvol::VolComparison vc = rvol::conditional_vol_comparison(
            ps.events, ps.vols, warning_lookback);
        c_sum += vc.conditional_mean * static_cast<double>(vc.conditional_n);
        u_sum += vc.unconditional_mean * static_cast<double>(vc.unconditional_n);
        c_n += vc.conditional_n;
        u_n += vc.unconditional_n;
      }
      if (c_n > 0 && u_n > 0)
        cond = json{{"conditional_mean", c_sum / static_cast<double>(c_n)},
                    {"unconditional_mean", u_sum / static_cast<double>(u_n)},
                    {"conditional_n", c_n},
                    {"unconditional_n", u_n}};
    }
    json warn_doc{{"config", cfg},
                  {"per_instrument", per_instr},
                  {"aggregate", aggregate},
                  {"conditional_vol", cond}};
    write_file(dir / "warnings.json", warn_doc.dump(2) + "\n");

    print_summary(json{{"command", "events"},
                       {"n_stocks", stock_paths.size()},
                       {"n_events", all_events.size()},
                       {"groups", group_counts},
                       {"out", dir.string()}});
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reactive volatility toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a TOML/INI file");

  SimulateCmd simulate;
  EstimateCmd estimate;
  CorrelateCmd correlate;
  TermCmd term;
  CompareCmd compare;
  EventsCmd events;
  simulate.attach(app);
  estimate.attach(app);
  correlate.attach(app);
  term.attach(app);
  compare.attach(app);
  events.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const rvol::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const rvol::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
