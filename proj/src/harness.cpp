#include "rrcstorm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rrcstorm/analytic.hpp"
#include "rrcstorm/telemetry.hpp"

namespace rrcstorm::harness {

using detector::GnbState;
using simnet::ScenarioKind;

void validate(const ExperimentConfig& config) {
  try {
    simnet::validate(config.scenario, config.gnb);
    detector::validate(config.detector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.seeds.empty()) throw ConfigError("at least one seed (repetition) is required");
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), base);
  return seeds;
}

std::vector<std::string> preset_names() {
  return {"paper-attack-0", "paper-attack-25", "paper-attack-50", "paper-attack-75",
          "paper-highload", "paper-normal"};
}

void set_occupancy_pct(ExperimentConfig& config, double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) throw ConfigError("occupancy must be in [0, 100] percent");
  config.scenario.preconnected_bue =
      analytic::round_count(pct / 100.0 * static_cast<double>(config.gnb.capacity));
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  c.gnb = simnet::GnbConfig{};  // 16 contexts, 2.7 s, 7 ms frames, 1 Msg1/frame
  c.detector = detector::DetectorConfig{};
  auto& s = c.scenario;

  if (name.starts_with("paper-attack-")) {
    double pct = 0.0;
    const std::string_view digits = name.substr(13);
    if (std::from_chars(digits.data(), digits.data() + digits.size(), pct).ptr !=
            digits.data() + digits.size() ||
        (pct != 0.0 && pct != 25.0 && pct != 50.0 && pct != 75.0)) {
      throw ConfigError("unknown preset: " + std::string(name));
    }
    s.kind = ScenarioKind::Attack;
    s.attacker_rate_per_s = analytic::presets::kAttackRatePerS;
    s.onset_ms = 1000;
    s.onset_jitter_ms = 100;
    s.duration_ms = 5000;
    set_occupancy_pct(c, pct);
    return c;
  }
  if (name == "paper-highload") {
    s.kind = ScenarioKind::HighLoad;
    s.benign_fleet_rate_per_s = 80.0;
    s.preconnected_bue = 12;
    s.onset_ms = 1000;
    s.onset_jitter_ms = 100;
    s.duration_ms = 3000;
    return c;
  }
  if (name == "paper-normal") {
    s.kind = ScenarioKind::Normal;
    s.background = TruncatedPoissonSpec{};
    s.duration_ms = 60'000;
    return c;
  }
  throw ConfigError("unknown preset: " + std::string(name));
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("bad value for " + std::string(key) + ": \"" + std::string(text) + "\"");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw ConfigError("bad boolean for " + std::string(key) + ": \"" + std::string(text) + "\"");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

TruncatedPoissonSpec& background_of(ExperimentConfig& c) {
  if (!c.scenario.background) c.scenario.background = TruncatedPoissonSpec{};
  return *c.scenario.background;
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  auto& s = c.scenario;
  auto& g = c.gnb;
  auto& d = c.detector;
  auto i64 = [&] { return parse_number<std::int64_t>(key, value); };
  auto u64 = [&] { return parse_number<std::uint64_t>(key, value); };
  auto dbl = [&] { return parse_number<double>(key, value); };

  if (key == "preset") {
    const auto seeds = c.seeds;
    const auto out = c.out_dir;
    c = preset(value);
    c.seeds = seeds;
    c.out_dir = out;
  } else if (key == "name") c.name = std::string(value);
  else if (key == "kind") {
    const auto k = simnet::parse_scenario_kind(value);
    if (!k) throw ConfigError("unknown scenario kind: " + std::string(value));
    s.kind = *k;
  }
  else if (key == "duration_ms") s.duration_ms = i64();
  else if (key == "seed") c.seeds = {u64()};
  else if (key == "reps") c.seeds = seed_range(c.seeds.empty() ? 1 : c.seeds.front(), u64());
  else if (key == "preconnected_bue") s.preconnected_bue = i64();
  else if (key == "occupancy_pct") set_occupancy_pct(c, dbl());
  else if (key == "attacker_rate_per_s") s.attacker_rate_per_s = dbl();
  else if (key == "benign_fleet_rate_per_s") s.benign_fleet_rate_per_s = dbl();
  else if (key == "fleet_session_ms") {
    const auto v = i64();
    s.fleet_session_ms = v < 0 ? std::nullopt : std::optional<TimeMs>(v);
  }
  else if (key == "background") {
    if (parse_bool(key, value)) background_of(c);
    else s.background.reset();
  }
  else if (key == "background_lambda") background_of(c).lambda = dbl();
  else if (key == "background_lower") background_of(c).lower = i64();
  else if (key == "background_upper") background_of(c).upper = i64();
  else if (key == "background_tick_ms") background_of(c).tick_ms = i64();
  else if (key == "background_session_ms") s.background_session_ms = i64();
  else if (key == "onset_ms") s.onset_ms = i64();
  else if (key == "onset_jitter_ms") s.onset_jitter_ms = i64();
  else if (key == "msg4_to_msg5_delay_ms") s.msg4_to_msg5_delay_ms = i64();
  else if (key == "t300_ms") s.t300_ms = i64();
  else if (key == "benign_max_retries") s.benign_max_retries = i64();
  else if (key == "attacker_cause" || key == "benign_cause") {
    const auto cause = parse_cause(value);
    if (!cause) throw ConfigError("unknown establishment cause: " + std::string(value));
    (key == "attacker_cause" ? s.attacker_cause : s.benign_cause) = *cause;
  }
  else if (key == "capacity") g.capacity = i64();
  else if (key == "waiting_time_ms") g.waiting_time_ms = i64();
  else if (key == "frame_ms") g.frame_ms = i64();
  else if (key == "max_msg1_per_frame") g.max_msg1_per_frame = i64();
  else if (key == "msg3_to_msg4_delay_ms") g.msg3_to_msg4_delay_ms = i64();
  else if (key == "rach_delay_ms") g.rach_delay_ms = i64();
  else if (key == "window_ms") d.window_ms = i64();
  else if (key == "hop_ms") d.hop_ms = i64();
  else if (key == "r1_threshold") d.r1_threshold = dbl();
  else if (key == "r2_threshold") d.r2_threshold = dbl();
  else if (key == "msg3_watermark") d.msg3_watermark = i64();
  else if (key == "min_msg3_for_ratios") d.min_msg3_for_ratios = i64();
  else if (key == "out") c.out_dir = std::string(value);
  else throw ConfigError("unknown config key: " + std::string(key));
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::pair<std::string, std::string>> settings;
  const std::string_view body = trim(text);
  if (body.starts_with("{")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) settings.emplace_back(key, value.get<std::string>());
      else if (value.is_boolean()) settings.emplace_back(key, value.get<bool>() ? "true" : "false");
      else if (value.is_number()) settings.emplace_back(key, value.dump());
      else throw ConfigError(path.string() + ": value of \"" + key + "\" must be a scalar");
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      std::string_view l = trim(line);
      if (l.empty() || l.front() == '#') continue;
      const auto eq = l.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
      }
      settings.emplace_back(std::string(trim(l.substr(0, eq))), std::string(trim(l.substr(eq + 1))));
    }
  }

  ExperimentConfig c;
  c.name = path.stem().string();
  auto is_preset = [](const auto& kv) { return kv.first == "preset"; };
  if (auto it = std::find_if(settings.begin(), settings.end(), is_preset); it != settings.end()) {
    apply_setting(c, it->first, it->second);
    c.name = path.stem().string();
  }
  // Seed before reps so "reps" counts up from the configured seed.
  for (const auto& [k, v] : settings) {
    if (k == "seed") apply_setting(c, k, v);
  }
  // occupancy_pct depends on capacity and reps on seed, so they go last.
  auto deferred = [](const std::string& k) { return k == "occupancy_pct" || k == "reps"; };
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [k, v] : settings) {
      if (k == "preset" || k == "seed" || deferred(k) != (pass == 1)) continue;
      try {
        apply_setting(c, k, v);
      } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
    }
  }
  return c;
}

ExperimentConfig resolve_scenario(std::string_view preset_or_file) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_file) != names.end()) {
    return preset(preset_or_file);
  }
  const std::filesystem::path path{std::string(preset_or_file)};
  if (std::filesystem::exists(path)) return load_config_file(path);
  throw ConfigError("\"" + std::string(preset_or_file) + "\" is neither a preset nor a readable file");
}

LiveRun run_live(const simnet::ScenarioSpec& scenario, const simnet::GnbConfig& gnb,
                 const detector::DetectorConfig& det) {
  LiveRun out;
  detector::StreamingDetector live(det);
  const simnet::EventSink sink = [&](const RrcEvent& ev) {
    auto batch = live.push(ev);
    out.verdicts.insert(out.verdicts.end(), batch.begin(), batch.end());
  };
  out.sim = simnet::run(scenario, gnb, sink);
  auto tail = live.finish();
  out.verdicts.insert(out.verdicts.end(), tail.begin(), tail.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string pct_label(double pct) {
  std::ostringstream os;
  os << pct << '%';
  return os.str();
}

std::vector<std::uint64_t> sorted_seeds(const ExperimentConfig& c) {
  auto seeds = c.seeds;
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

void write_optional(std::ostream& out, const std::optional<double>& v, int decimals) {
  if (!v) return;
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::fixed << std::setprecision(decimals) << *v;
  out.flags(flags);
  out.precision(prec);
}

template <typename T>
void write_optional_int(std::ostream& out, const std::optional<T>& v) {
  if (v) out << *v;
}

}  // namespace

std::vector<TableOneRow> table1(const ExperimentConfig& base, double effective_waiting_ms) {
  validate(base);
  std::vector<TableOneRow> rows;
  for (double pct : kTableOccupancies) {
    ExperimentConfig cfg = base;
    cfg.scenario.kind = ScenarioKind::Attack;
    set_occupancy_pct(cfg, pct);

    analytic::AnalyticInputs in;
    in.waiting_time_ms = effective_waiting_ms;
    in.capacity = cfg.gnb.capacity;
    in.attacker_rate_per_s = cfg.scenario.attacker_rate_per_s;
    in.benign_rate_per_s = 0.0;
    in.connected_benign = cfg.scenario.preconnected_bue;
    const analytic::AnalyticOutputs theo = analytic::full_model(in);

    TableOneRow t;
    t.occupancy = pct_label(pct);
    t.source = TableOneRow::Source::Theoretical;
    t.n_accepted = theo.accepted;
    t.n_rejected = theo.rejected;
    t.drop_time_s = theo.drop_time_ms / 1000.0;
    t.dur_accept_s = theo.accept_ms / 1000.0;
    t.dur_reject_s = theo.reject_ms / 1000.0;
    t.avail_rate_pct = theo.availability_pct;
    rows.push_back(t);

    const auto seeds = sorted_seeds(cfg);
    const auto results = for_each_seed(seeds, [&cfg](std::uint64_t seed) {
      simnet::ScenarioSpec s = cfg.scenario;
      s.seed = seed;
      simnet::SimResult r = simnet::run(s, cfg.gnb);
      r.trace.clear();
      return r;
    });

    TableOneRow sim;
    sim.occupancy = t.occupancy;
    sim.source = TableOneRow::Source::Simulated;
    std::vector<std::int64_t> acc, rej;
    double drop_sum = 0.0, reject_sum = 0.0;
    std::size_t drops = 0, rejects = 0;
    for (const auto& r : results) {
      acc.push_back(r.period_accepted);
      rej.push_back(r.period_rejected);
      if (r.drop_time_ms) {
        drop_sum += static_cast<double>(*r.drop_time_ms);
        ++drops;
      }
      if (r.duration_reject_ms) {
        reject_sum += static_cast<double>(*r.duration_reject_ms);
        ++rejects;
      }
    }
    const auto n = static_cast<double>(results.size());
    sim.n_accepted = analytic::round_count(std::accumulate(acc.begin(), acc.end(), 0.0) / n);
    sim.n_rejected = analytic::round_count(std::accumulate(rej.begin(), rej.end(), 0.0) / n);
    if (drops > 0) {
      sim.drop_time_s = drop_sum / static_cast<double>(drops) / 1000.0;
      sim.dur_accept_s = sim.drop_time_s;
    }
    if (rejects > 0) sim.dur_reject_s = reject_sum / static_cast<double>(rejects) / 1000.0;
    if (std::accumulate(acc.begin(), acc.end(), std::int64_t{0}) +
            std::accumulate(rej.begin(), rej.end(), std::int64_t{0}) > 0) {
      sim.avail_rate_pct = analytic::availability_rate(acc, rej).available_pct;
    }
    rows.push_back(sim);
  }
  return rows;
}

void write_table1_csv(std::span<const TableOneRow> rows, std::ostream& out) {
  out << "occupancy,source,n_accepted,n_rejected,drop_time_s,dur_accept_s,dur_reject_s,avail_rate_pct\n";
  for (const TableOneRow& r : rows) {
    out << r.occupancy << ','
        << (r.source == TableOneRow::Source::Theoretical ? "theoretical" : "simulated") << ','
        << r.n_accepted << ',' << r.n_rejected << ',';
    write_optional(out, r.drop_time_s, 3);
    out << ',';
    write_optional(out, r.dur_accept_s, 3);
    out << ',';
    write_optional(out, r.dur_reject_s, 3);
    out << ',';
    write_optional(out, r.avail_rate_pct, 2);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

LatencySummary latency_campaign(const ExperimentConfig& config) {
  validate(config);
  LatencySummary summary;
  switch (config.scenario.kind) {
    case ScenarioKind::Attack: summary.target = GnbState::Attack; break;
    case ScenarioKind::HighLoad: summary.target = GnbState::HighLoad; break;
    case ScenarioKind::Normal: summary.target = GnbState::Normal; break;
  }
  const GnbState target = summary.target;
  const auto seeds = sorted_seeds(config);
  summary.runs = for_each_seed(seeds, [&config, target](std::uint64_t seed) {
    simnet::ScenarioSpec s = config.scenario;
    s.seed = seed;
    const LiveRun live = run_live(s, config.gnb, config.detector);

    LatencyRun run;
    run.seed = seed;
    run.onset_ms = live.sim.onset_ms;
    run.drop_time_ms = live.sim.drop_time_ms;
    if (run.onset_ms) {
      run.latency_ms = detector::detection_latency(live.verdicts, *run.onset_ms, target);
    }
    if (run.latency_ms && run.drop_time_ms) run.margin_ms = *run.drop_time_ms - *run.latency_ms;

    int stage = 0;  // 0 = nothing yet, 1 = Normal seen, 2 = then Attack, 3 = then Overload
    for (const auto& v : live.verdicts) {
      switch (v.state) {
        case GnbState::Normal:
          ++run.normal_verdicts;
          if (stage == 0) stage = 1;
          break;
        case GnbState::Attack:
          ++run.attack_verdicts;
          if (stage == 1) stage = 2;
          break;
        case GnbState::HighLoad: ++run.high_load_verdicts; break;
        case GnbState::Overload:
          ++run.overload_verdicts;
          if (stage == 2) stage = 3;
          break;
      }
    }
    run.attack_progression = stage == 3;
    return run;
  });

  double latency_sum = 0.0, margin_sum = 0.0;
  std::size_t margins = 0;
  for (const LatencyRun& r : summary.runs) {
    if (r.latency_ms) {
      ++summary.detected;
      latency_sum += static_cast<double>(*r.latency_ms);
      summary.min_latency_ms = std::min(summary.min_latency_ms.value_or(*r.latency_ms), *r.latency_ms);
      summary.max_latency_ms = std::max(summary.max_latency_ms.value_or(*r.latency_ms), *r.latency_ms);
    }
    if (r.margin_ms) {
      margin_sum += static_cast<double>(*r.margin_ms);
      ++margins;
    }
  }
  if (summary.detected > 0) summary.mean_latency_ms = latency_sum / static_cast<double>(summary.detected);
  if (margins > 0) summary.mean_margin_ms = margin_sum / static_cast<double>(margins);
  return summary;
}

void write_latency_csv(const LatencySummary& summary, std::ostream& out) {
  out << "seed,status,target,onset_ms,latency_ms,drop_time_ms,margin_ms,"
         "normal_verdicts,attack_verdicts,high_load_verdicts,overload_verdicts\n";
  for (const LatencyRun& r : summary.runs) {
    const char* status = !r.onset_ms ? "no_onset" : r.latency_ms ? "detected" : "no_detection";
    out << r.seed << ',' << status << ','
        << detector::to_string(summary.target) << ',';
    write_optional_int(out, r.onset_ms);
    out << ',';
    write_optional_int(out, r.latency_ms);
    out << ',';
    write_optional_int(out, r.drop_time_ms);
    out << ',';
    write_optional_int(out, r.margin_ms);
    out << ',' << r.normal_verdicts << ',' << r.attack_verdicts << ',' << r.high_load_verdicts
        << ',' << r.overload_verdicts << '\n';
  }
}

void write_latency_summary(const LatencySummary& s, std::ostream& out) {
  out << "target,runs,detected,mean_latency_ms,min_latency_ms,max_latency_ms,mean_margin_ms\n"
      << detector::to_string(s.target) << ',' << s.runs.size() << ',' << s.detected << ',';
  write_optional(out, s.mean_latency_ms, 1);
  out << ',';
  write_optional_int(out, s.min_latency_ms);
  out << ',';
  write_optional_int(out, s.max_latency_ms);
  out << ',';
  write_optional(out, s.mean_margin_ms, 1);
  out << '\n';
}

// ---------------------------------------------------------------------------

RunOutput run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw telemetry::IoError("cannot create " + config.out_dir.string() + ": " + ec.message());

  const auto seeds = sorted_seeds(config);
  auto lives = for_each_seed(seeds, [&config](std::uint64_t seed) {
    simnet::ScenarioSpec s = config.scenario;
    s.seed = seed;
    return run_live(s, config.gnb, config.detector);
  });

  RunOutput out;
  std::vector<std::int64_t> acc, rej;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string stem = config.name + "-seed" + std::to_string(seeds[i]);
    const auto trace_path = config.out_dir / (stem + telemetry::kTraceExtension);
    const auto verdict_path = config.out_dir / (stem + telemetry::kVerdictExtension);
    telemetry::write_trace_file(trace_path, lives[i].sim.trace);
    telemetry::write_verdict_file(verdict_path, lives[i].verdicts);
    out.trace_files.push_back(trace_path);
    out.verdict_files.push_back(verdict_path);

    lives[i].sim.trace.clear();
    acc.push_back(lives[i].sim.period_accepted);
    rej.push_back(lives[i].sim.period_rejected);
    out.results.push_back(std::move(lives[i].sim));
  }
  if (std::accumulate(acc.begin(), acc.end(), std::int64_t{0}) +
          std::accumulate(rej.begin(), rej.end(), std::int64_t{0}) > 0) {
    out.pooled_availability_pct = analytic::availability_rate(acc, rej).available_pct;
  }

  out.metrics_file = config.out_dir / (config.name + ".metrics.csv");
  std::ofstream csv(out.metrics_file);
  if (!csv) throw telemetry::IoError("cannot open " + out.metrics_file.string() + " for writing");
  csv << "seed,onset_ms,drop_time_ms,duration_reject_ms,accepted_msg3,rejected_msg3,"
         "period_accepted,period_rejected,availability_pct\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const simnet::SimResult& r = out.results[i];
    csv << seeds[i] << ',';
    write_optional_int(csv, r.onset_ms);
    csv << ',';
    write_optional_int(csv, r.drop_time_ms);
    csv << ',';
    write_optional_int(csv, r.duration_reject_ms);
    csv << ',' << r.accepted_msg3 << ',' << r.rejected_msg3 << ',' << r.period_accepted << ','
        << r.period_rejected << ',';
    write_optional(csv, r.period_availability_pct, 4);
    csv << '\n';
  }
  csv << "pooled,,,,"
      << std::accumulate(out.results.begin(), out.results.end(), std::int64_t{0},
                         [](std::int64_t a, const auto& r) { return a + r.accepted_msg3; })
      << ','
      << std::accumulate(out.results.begin(), out.results.end(), std::int64_t{0},
                         [](std::int64_t a, const auto& r) { return a + r.rejected_msg3; })
      << ',' << std::accumulate(acc.begin(), acc.end(), std::int64_t{0}) << ','
      << std::accumulate(rej.begin(), rej.end(), std::int64_t{0}) << ',';
  write_optional(csv, out.pooled_availability_pct, 4);
  csv << '\n';
  if (!csv) throw telemetry::IoError("write failed: " + out.metrics_file.string());
  return out;
}

std::vector<detector::DetectionVerdict> replay(const std::filesystem::path& trace,
                                               const detector::DetectorConfig& det,
                                               const std::optional<std::filesystem::path>& out) {
  try {
    detector::validate(det);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto events = telemetry::read_trace_file(trace);
  auto verdicts = detector::run_stream(events, det);
  if (out) telemetry::write_verdict_file(*out, verdicts);
  return verdicts;
}

}  // namespace rrcstorm::harness
