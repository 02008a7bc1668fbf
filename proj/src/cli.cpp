// Copyright 2026 The attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attrib/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "attrib/bench.hpp"
#include "attrib/error.hpp"
#include "attrib/synth.hpp"

namespace attrib {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ValueKind parse_kpi(const std::string& kpi) {
  if (kpi == "revenue") return ValueKind::kRevenue;
  if (kpi == "conversions") return ValueKind::kConversions;
  throw Error(ErrorKind::kUsage, "unknown kpi '" + kpi + "' (expected revenue or conversions)");
}

void check_config(const RunConfig& cfg) {
  if (cfg.method != "naive" && cfg.method != "simplified" && cfg.method != "ordered") {
    throw Error(ErrorKind::kUsage, "unknown method '" + cfg.method +
                                       "' (expected naive, simplified or ordered)");
  }
  parse_input_format(cfg.format);
  parse_filter_mode(cfg.filter_mode);
  parse_emit_format(cfg.emit);
  parse_kpi(cfg.kpi);
  if (cfg.min_distinct < 1) throw Error(ErrorKind::kUsage, "--min-distinct must be >= 1");
  if (cfg.threads < 1) throw Error(ErrorKind::kUsage, "--threads must be >= 1");
  if (cfg.precision < 0 || cfg.precision > 17 || cfg.summary_precision < 0 ||
      cfg.summary_precision > 17) {
    throw Error(ErrorKind::kUsage, "precision must be in 0..17");
  }
  if (!(cfg.tolerance >= 0.0)) throw Error(ErrorKind::kUsage, "--tolerance must be >= 0");
}

AggregateOptions aggregate_options(const RunConfig& cfg) {
  return {.threads = cfg.threads, .value = parse_kpi(cfg.kpi)};
}

// Writes to --output when given, else to `fallback`.
void write_output(const RunConfig& cfg, std::ostream& fallback, const std::string& text) {
  if (cfg.output.empty() || cfg.output == "-") {
    fallback << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw Error(ErrorKind::kData, "cannot write '" + cfg.output + "'");
  file << text;
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double relative(double value, double reference) {
  const double d = std::fabs(value - reference);
  return reference != 0.0 ? d / std::fabs(reference) : d;
}

int cmd_attribute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const JourneyStore store = load_store(cfg);
  AttributionRun run = run_attribution(cfg, store);
  const EmitOptions emit{cfg.precision, cfg.summary_precision, cfg.display_cap};
  write_output(cfg, out, emit_table(run.report, parse_emit_format(cfg.emit), emit));
  err << "attribute: method=" << cfg.method << " journeys=" << run.journeys
      << " channels=" << run.catalog.size() << " total=" << fmt(run.total_value, "%.2f")
      << " rejected=" << store.rejected_conversions << " wall=" << fmt(since(start), "%.3f")
      << "s\n";
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const JourneyStore store = load_store(cfg);
  const CoalitionRevenue rev = aggregate(store, aggregate_options(cfg));
  if (rev.channels() > kMaxDenseChannels) {
    throw Error(ErrorKind::kCapacity, "compare needs at most 24 channels (have " +
                                          std::to_string(rev.channels()) + ")");
  }
  auto start = Clock::now();
  const Attribution naive = shapley_naive(rev);
  const double naive_s = since(start);
  start = Clock::now();
  const Attribution simplified = shapley_simplified(rev);
  const double simplified_s = since(start);

  const Comparison cmp =
      compare(naive, simplified, store.catalog, store.catalog, naive_s, simplified_s);
  write_output(cfg, out, emit_comparison(cmp, parse_emit_format(cfg.emit)));
  err << "compare: channels=" << rev.channels() << " coalitions=" << rev.size()
      << " max_rel_delta=" << fmt(cmp.max_rel_delta, "%.3e") << " naive="
      << fmt(naive_s, "%.6f") << "s simplified=" << fmt(simplified_s, "%.6f") << "s\n";
  if (!cmp.within(cfg.tolerance)) {
    throw Error(ErrorKind::kInvariant, "naive and simplified engines differ by " +
                                           fmt(cmp.max_rel_delta, "%.3e"));
  }
  return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const JourneyStore store = load_store(cfg);
  std::optional<OrderedRevenue> loaded;
  if (!cfg.ordered_input.empty()) {
    std::ifstream in(cfg.ordered_input, std::ios::binary);
    if (!in) throw Error(ErrorKind::kData, "cannot open '" + cfg.ordered_input + "'");
    loaded = read_ordered_csv(in, store.catalog);
  }
  const auto checks =
      audit(store, cfg.tolerance, cfg.threads, loaded ? &*loaded : nullptr);
  std::ostringstream report;
  std::size_t failed = 0;
  for (const auto& c : checks) {
    report << (c.passed ? "PASS " : "FAIL ") << c.name
           << " residual=" << fmt(c.residual, "%.3e");
    if (!c.detail.empty()) report << " (" << c.detail << ")";
    report << '\n';
    failed += c.passed ? 0 : 1;
  }
  write_output(cfg, out, report.str());
  err << "validate: " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  if (failed) {
    throw Error(ErrorKind::kInvariant, std::to_string(failed) + " invariant check(s) failed");
  }
  return 0;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.spec.empty()) throw Error(ErrorKind::kUsage, "synth needs --spec");
  CampaignSpec spec = load_campaign_spec(cfg.spec);
  if (cfg.seed) spec.seed = *cfg.seed;
  const JourneyStore store = generate(spec);
  std::ostringstream text;
  write_journeys_jsonl(store, text);
  write_output(cfg, out, text.str());
  err << "synth: journeys=" << store.journeys.size() << " channels=" << store.catalog.size()
      << " seed=" << spec.seed << '\n';
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  BenchOptions options;
  options.channels = cfg.bench_channels;
  options.journeys = cfg.bench_journeys;
  options.threads = cfg.threads;
  options.direct_channels = cfg.direct_channels;
  options.zeta = cfg.zeta;
  if (cfg.seed) options.seed = *cfg.seed;
  if (options.channels < 1 || options.channels > kMaxChannels) {
    throw Error(ErrorKind::kUsage, "--channels must be in 1..64");
  }
  const BenchResult result = run_benchmark(options);
  const auto doc = to_json(result);
  if (parse_emit_format(cfg.emit) == EmitFormat::kJson) {
    write_output(cfg, out, doc.dump(2) + "\n");
  } else {
    std::ostringstream text;
    for (const auto& [key, value] : doc.items()) text << key << ": " << value.dump() << '\n';
    write_output(cfg, out, text.str());
  }
  err << "bench: simplified=" << fmt(result.simplified_seconds, "%.6f") << "s";
  if (auto ratio = result.direct_speedup_lower_bound()) {
    err << " direct/simplified>=" << fmt(*ratio, "%.1f") << "x";
  }
  err << '\n';
  return 0;
}

// Option registry: flags are parsed into `flags`, and only those actually
// given on the command line are copied over the config-file values.
struct Binder {
  RunConfig flags;
  bool no_zeta = false;
  std::uint64_t seed = 0;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers;

  template <typename T>
  void option(CLI::App* app, const std::string& name, T RunConfig::*field,
              const std::string& help) {
    CLI::Option* opt = app->add_option(name, flags.*field, help);
    appliers.emplace_back(opt, [this, field](RunConfig& cfg) { cfg.*field = flags.*field; });
  }
  void flag(CLI::App* app, const std::string& name, bool RunConfig::*field,
            const std::string& help) {
    CLI::Option* opt = app->add_flag(name, flags.*field, help);
    appliers.emplace_back(opt, [this, field](RunConfig& cfg) { cfg.*field = flags.*field; });
  }
  void seed_option(CLI::App* app) {
    CLI::Option* opt = app->add_option("--seed", seed, "Random seed override");
    appliers.emplace_back(opt, [this](RunConfig& cfg) { cfg.seed = seed; });
  }

  void common(CLI::App* app) {
    option(app, "--input,-i", &RunConfig::inputs, "Journey log(s); repeatable");
    option(app, "--format", &RunConfig::format, "journey-jsonl | event-csv");
    option(app, "--group-map", &RunConfig::group_map, "channel,group CSV");
    option(app, "--min-distinct", &RunConfig::min_distinct,
           "Keep journeys with at least this many channels");
    option(app, "--filter-mode", &RunConfig::filter_mode, "distinct-channels | touchpoints");
    option(app, "--kpi", &RunConfig::kpi, "revenue | conversions");
    option(app, "--output,-o", &RunConfig::output, "Output path (default stdout)");
    option(app, "--emit", &RunConfig::emit, "csv | json | text");
    option(app, "--threads", &RunConfig::threads, "Aggregation threads");
  }
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kUsage, "cannot open config '" + path + "'");
  try {
    cfg = run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kUsage, "config " + path + ": " + e.what());
  }
  // Paths in a config file are relative to the file itself.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](std::string& p) {
    if (!p.empty() && p != "-" && std::filesystem::path(p).is_relative()) {
      p = (base / p).lexically_normal().string();
    }
  };
  for (auto& input : cfg.inputs) resolve(input);
  resolve(cfg.group_map);
  resolve(cfg.ordered_input);
  resolve(cfg.spec);
  resolve(cfg.output);
}

void report_error(std::ostream& err, ErrorKind kind, const std::string& message) {
  nlohmann::ordered_json doc;
  doc["error"]["kind"] = std::string(to_string(kind));
  doc["error"]["message"] = message;
  doc["error"]["exit_code"] = exit_code(kind);
  err << doc.dump() << '\n';
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kUsage, "run config must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "input") {
        cfg.inputs = value.is_string() ? std::vector<std::string>{value.get<std::string>()}
                                       : value.get<std::vector<std::string>>();
      } else if (key == "format") {
        cfg.format = value.get<std::string>();
      } else if (key == "group_map") {
        cfg.group_map = value.get<std::string>();
      } else if (key == "min_distinct") {
        cfg.min_distinct = value.get<std::size_t>();
      } else if (key == "filter_mode") {
        cfg.filter_mode = value.get<std::string>();
      } else if (key == "method") {
        cfg.method = value.get<std::string>();
      } else if (key == "kpi") {
        cfg.kpi = value.get<std::string>();
      } else if (key == "output") {
        cfg.output = value.get<std::string>();
      } else if (key == "emit") {
        cfg.emit = value.get<std::string>();
      } else if (key == "percent") {
        cfg.percent = value.get<bool>();
      } else if (key == "precision") {
        cfg.precision = value.get<int>();
      } else if (key == "summary_precision") {
        cfg.summary_precision = value.get<int>();
      } else if (key == "display_cap") {
        cfg.display_cap = value.get<std::size_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<unsigned>();
      } else if (key == "tolerance") {
        cfg.tolerance = value.get<double>();
      } else if (key == "ordered_input") {
        cfg.ordered_input = value.get<std::string>();
      } else if (key == "spec") {
        cfg.spec = value.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "channels") {
        cfg.bench_channels = value.get<std::size_t>();
      } else if (key == "journeys") {
        cfg.bench_journeys = value.get<std::size_t>();
      } else if (key == "direct_channels") {
        cfg.direct_channels = value.get<std::size_t>();
      } else if (key == "zeta") {
        cfg.zeta = value.get<bool>();
      } else {
        throw Error(ErrorKind::kUsage, "unknown run config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kUsage, std::string("run config: ") + e.what());
  }
  return cfg;
}

JourneyStore load_store(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(ErrorKind::kUsage, "no --input given");
  const InputFormat format = parse_input_format(cfg.format);
  std::vector<std::future<JourneyStore>> parts;
  const auto policy = cfg.threads > 1 ? std::launch::async : std::launch::deferred;
  for (const auto& path : cfg.inputs) {
    parts.push_back(std::async(policy, [path, format] { return load_journeys(path, format); }));
  }
  std::vector<JourneyStore> stores;
  for (auto& f : parts) stores.push_back(f.get());
  JourneyStore store =
      stores.size() == 1 ? std::move(stores.front()) : merge_stores(std::move(stores));
  if (!cfg.group_map.empty()) store = apply_grouping(store, GroupMap::load(cfg.group_map));
  if (cfg.min_distinct > 1) {
    store = filter_min_channels(store, cfg.min_distinct, parse_filter_mode(cfg.filter_mode));
  }
  return store;
}

AttributionRun run_attribution(const RunConfig& cfg, const JourneyStore& store) {
  check_config(cfg);
  const auto start = Clock::now();
  AttributionRun run;
  run.catalog = store.catalog;
  run.journeys = store.journeys.size();
  const AggregateOptions options = aggregate_options(cfg);
  if (cfg.method == "ordered") {
    const OrderedRevenue orev = aggregate_ordered(store, options);
    run.ordered = shapley_ordered(orev);
    run.channels = channel_totals(*run.ordered);
    run.total_value = run.channels.total;
    run.report = cfg.percent ? to_percent(*run.ordered, run.catalog)
                             : to_values(*run.ordered, run.catalog);
  } else {
    const CoalitionRevenue rev = aggregate(store, options);
    if (cfg.method == "naive" && rev.channels() > kMaxDenseChannels) {
      throw Error(ErrorKind::kCapacity,
                  "method naive needs at most 24 channels after grouping (have " +
                      std::to_string(rev.channels()) + "); use simplified");
    }
    run.channels = cfg.method == "naive" ? shapley_naive(rev) : shapley_simplified(rev);
    run.total_value = rev.total();
    run.report = cfg.percent ? to_percent(run.channels, run.catalog)
                             : to_values(run.channels, run.catalog);
  }
  run.seconds = since(start);
  return run;
}

std::vector<AuditCheck> audit(const JourneyStore& store, double tolerance, unsigned threads,
                              const OrderedRevenue* orev_in) {
  if (store.journeys.empty()) {
    throw Error(ErrorKind::kNoData,
                "no journeys to audit (empty input or everything filtered out)");
  }
  const AggregateOptions options{.threads = threads};
  const CoalitionRevenue rev = aggregate(store, options);
  const OrderedRevenue orev = orev_in ? *orev_in : aggregate_ordered(store, options);
  const double ingested = store.total_revenue().to_double();
  const std::size_t p = store.catalog.size();

  std::vector<AuditCheck> checks;
  auto add = [&](std::string name, double residual, std::string detail = {}) {
    checks.push_back({std::move(name), residual <= tolerance, residual, std::move(detail)});
  };

  const Attribution simplified = shapley_simplified(rev);
  const OrderedAttribution ordered = shapley_ordered(orev);
  const Attribution collapsed = channel_totals(ordered);
  std::optional<Attribution> naive;
  if (p <= kMaxDenseChannels) naive = shapley_naive(rev);

  add("coalition-total", relative(rev.total(), ingested));
  add("efficiency/simplified", relative(simplified.total, ingested));
  add("efficiency/ordered", relative(collapsed.total, ingested));
  if (naive) add("efficiency/naive", relative(naive->total, ingested));

  std::uint64_t visited = 0;
  for (const auto& [key, value] : rev.entries()) visited |= key.bits();
  double dummy = 0.0;
  std::size_t dummies = 0;
  for (ChannelId j = 0; j < p; ++j) {
    if ((visited >> j) & 1u) continue;
    ++dummies;
    dummy = std::max({dummy, std::fabs(simplified.values[j]), std::fabs(collapsed.values[j])});
    if (naive) dummy = std::max(dummy, std::fabs(naive->values[j]));
  }
  checks.push_back({"dummy", dummy == 0.0, dummy,
                    std::to_string(dummies) + " unvisited channel(s)"});

  double negative = 0.0;
  for (double v : simplified.values) negative = std::max(negative, -v);
  for (double v : ordered.cells()) negative = std::max(negative, -v);
  if (naive) {
    for (double v : naive->values) negative = std::max(negative, -v);
  }
  checks.push_back({"nonnegativity", negative == 0.0, negative, {}});

  add("reconstruction", reconstruction_residual(rev, orev));

  const double scale = std::max(rev.total(), 1e-300);
  double consistency = 0.0;
  for (ChannelId j = 0; j < p; ++j) {
    consistency =
        std::max(consistency, std::fabs(collapsed.values[j] - simplified.values[j]) / scale);
  }
  add("ordered-consistency", consistency);

  if (naive) {
    double gap = 0.0;
    for (ChannelId j = 0; j < p; ++j) {
      gap = std::max(gap, std::fabs(naive->values[j] - simplified.values[j]) / scale);
    }
    add("naive-equivalence", gap);
  }
  return checks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shapley-value multi-touch attribution", "attrib"};
  app.require_subcommand(1);
  Binder bind;
  std::string config_path;

  auto* attribute = app.add_subcommand("attribute", "Attribute credit to channels");
  auto* compare_cmd = app.add_subcommand("compare", "Naive vs simplified engine on one dataset");
  auto* validate = app.add_subcommand("validate", "Audit attribution invariants on a dataset");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic campaign as journey-jsonl");
  auto* bench = app.add_subcommand("bench", "Time the engines on a synthetic campaign");

  for (auto* sub : {attribute, compare_cmd, validate, synth, bench}) {
    sub->add_option("--config", config_path, "JSON run config; flags override it");
  }
  for (auto* sub : {attribute, compare_cmd, validate}) bind.common(sub);
  for (auto* sub : {compare_cmd, validate}) {
    bind.option(sub, "--tolerance", &RunConfig::tolerance, "Relative tolerance");
  }
  bind.option(attribute, "--method", &RunConfig::method, "naive | simplified | ordered");
  bind.flag(attribute, "--percent", &RunConfig::percent, "Report percentages of the total");
  bind.option(attribute, "--precision", &RunConfig::precision, "Decimals for channel rows");
  bind.option(attribute, "--summary-precision", &RunConfig::summary_precision,
              "Decimals for the TOTAL row");
  bind.option(attribute, "--display-cap", &RunConfig::display_cap,
              "Touchpoint columns shown in text output");
  bind.option(validate, "--ordered-input", &RunConfig::ordered_input,
              "Audit this ordered revenue CSV instead of recomputing it");

  bind.option(synth, "--spec", &RunConfig::spec, "Campaign spec JSON");
  bind.option(synth, "--output,-o", &RunConfig::output, "Output path (default stdout)");
  bind.seed_option(synth);

  bind.option(bench, "--channels", &RunConfig::bench_channels, "Channel count");
  bind.option(bench, "--journeys", &RunConfig::bench_journeys, "Journey count");
  bind.option(bench, "--direct-channels", &RunConfig::direct_channels,
              "Channels timed with the table-free naive engine");
  bind.option(bench, "--threads", &RunConfig::threads, "Aggregation threads");
  bind.option(bench, "--output,-o", &RunConfig::output, "Output path (default stdout)");
  bind.option(bench, "--emit", &RunConfig::emit, "json | text");
  bind.seed_option(bench);
  CLI::Option* no_zeta = bench->add_flag("--no-zeta", bind.no_zeta, "Skip the zeta-table engine");
  bind.appliers.emplace_back(no_zeta, [&bind](RunConfig& cfg) { cfg.zeta = !bind.no_zeta; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, ErrorKind::kUsage, e.what());
    return exit_code(ErrorKind::kUsage);
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (auto& [opt, apply] : bind.appliers) {
      if (opt->count() > 0) apply(cfg);
    }
    if (bench->parsed() && cfg.emit == "csv" && !bench->get_option("--emit")->count()) {
      cfg.emit = "json";
    }
    check_config(cfg);
    if (attribute->parsed()) return cmd_attribute(cfg, out, err);
    if (compare_cmd->parsed()) return cmd_compare(cfg, out, err);
    if (validate->parsed()) return cmd_validate(cfg, out, err);
    if (synth->parsed()) return cmd_synth(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    report_error(err, ErrorKind::kUsage, "no command given");
    return exit_code(ErrorKind::kUsage);
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, ErrorKind::kData, e.what());
    return exit_code(ErrorKind::kData);
  }
}

}  // namespace attrib
