#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>


#include "rrcstorm/analytic.hpp"
#include "rrcstorm/detector.hpp"
#include "rrcstorm/harness.hpp"
#include "rrcstorm/random.hpp"
#include "rrcstorm/simnet.hpp"
#include "rrcstorm/telemetry.hpp"

namespace py = pybind11;
using namespace rrcstorm;

namespace {

// Events and verdicts cross the boundary as plain dicts.
py::dict to_dict(const RrcEvent& e) {
  py::dict d;
  d["t"] = e.t;
  d["kind"] = std::string(to_string(e.kind));
  d["ue"] = e.ue_ref;
  if (e.cause) d["cause"] = std::string(to_string(*e.cause));
  return d;
}

RrcEvent event_from(const py::handle& h) {
  const auto d = h.cast<py::dict>();
  RrcEvent e;
  e.t = d["t"].cast<TimeMs>();
  const auto kind = d["kind"].cast<std::string>();
  const auto k = parse_msg_kind(kind);
  if (!k) throw py::value_error("unknown kind: " + kind);
  e.kind = *k;
  e.ue_ref = d.contains("ue") ? d["ue"].cast<std::string>() : std::string{};
  if (d.contains("cause")) {
    const auto cause = d["cause"].cast<std::string>();
    const auto c = parse_cause(cause);
    if (!c) throw py::value_error("unknown cause: " + cause);
    e.cause = *c;
  }
  return e;
}

std::vector<RrcEvent> events_from(const py::iterable& items) {
  std::vector<RrcEvent> out;
  for (const auto& h : items) out.push_back(event_from(h));
  return out;
}

py::dict to_dict(const detector::DetectionVerdict& v) {
  py::dict d;
  d["t"] = v.t_ms;
  d["state"] = std::string(detector::to_string(v.state));
  d["n_msg3"] = v.features.n_msg3;
  d["n_msg4"] = v.features.n_msg4;
  d["n_msg5"] = v.features.n_msg5;
  d["r1"] = v.features.r1;
  d["r2"] = v.features.r2;
  return d;
}

template <typename T>
py::object opt(const std::optional<T>& v) {
  return v ? py::cast(*v) : py::none();
}

// A preset (or config file) plus key=value overrides, as in config files.
harness::ExperimentConfig config_from(const std::string& scenario, const py::dict& overrides) {
  auto c = harness::resolve_scenario(scenario);
  for (const auto& [k, v] : overrides) {
    const auto key = k.cast<std::string>();
    std::string value = py::str(v).cast<std::string>();
    if (py::isinstance<py::bool_>(v)) value = v.cast<bool>() ? "true" : "false";
    harness::apply_setting(c, key, value);
  }
  harness::validate(c);
  return c;
}

analytic::AnalyticInputs inputs(double waiting_time_ms, std::int64_t capacity, double attacker_rate_per_s,
                                std::int64_t connected_benign, double benign_rate_per_s) {
  return analytic::AnalyticInputs{waiting_time_ms, capacity, attacker_rate_per_s, benign_rate_per_s,
                                  connected_benign};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulator and detector for RRC signaling storms";

  py::register_exception<harness::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<telemetry::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<detector::OrderingError>(m, "OrderingError", PyExc_ValueError);

  m.def(
      "drop_time_ms",
      [](double waiting_time_ms, std::int64_t capacity, double attacker_rate_per_s,
         std::int64_t connected_benign) {
        return analytic::drop_time_ms(inputs(waiting_time_ms, capacity, attacker_rate_per_s, connected_benign, 0.0));
      },
      py::arg("waiting_time_ms"), py::arg("capacity"), py::arg("attacker_rate_per_s"),
      py::arg("connected_benign") = 0);

  m.def(
      "full_model",
      [](double waiting_time_ms, std::int64_t capacity, double attacker_rate_per_s,
         std::int64_t connected_benign, double benign_rate_per_s) {
        const auto o = analytic::full_model(
            inputs(waiting_time_ms, capacity, attacker_rate_per_s, connected_benign, benign_rate_per_s));
        py::dict d;
        d["accepted"] = o.accepted;
        d["rejected"] = o.rejected;
        d["drop_time_ms"] = o.drop_time_ms;
        d["accept_ms"] = o.accept_ms;
        d["reject_ms"] = o.reject_ms;
        d["availability_pct"] = o.availability_pct;
        d["overload"] = o.overload;
        return d;
      },
      py::arg("waiting_time_ms"), py::arg("capacity"), py::arg("attacker_rate_per_s"),
      py::arg("connected_benign") = 0, py::arg("benign_rate_per_s") = 0.0);

  m.def(
      "availability_rate",
      [](const std::vector<std::int64_t>& accepted, const std::vector<std::int64_t>& rejected) {
        return analytic::availability_rate(accepted, rejected).available_pct;
      },
      py::arg("accepted"), py::arg("rejected"));

  m.def(
      "truncated_poisson_samples",
      [](std::size_t n, std::uint64_t seed, double lam, std::int64_t lower, std::int64_t upper) {
        TruncatedPoissonSpec spec{lam, lower, upper, 100};
        validate(spec);
        Rng rng(seed);
        std::vector<std::int64_t> out(n);
        for (auto& k : out) k = truncated_poisson_sample(spec, rng);
        return out;
      },
      py::arg("n"), py::arg("seed") = 1, py::arg("lam") = 2.0, py::arg("lower") = 0, py::arg("upper") = 3);

  m.def("preset_names", &harness::preset_names);

  m.def(
      "simulate",
      [](const std::string& scenario, const py::kwargs& overrides) {
        const auto c = config_from(scenario, overrides);
        auto s = c.scenario;
        s.seed = c.seeds.front();
        simnet::SimResult r;
        std::vector<detector::DetectionVerdict> verdicts;
        {
          py::gil_scoped_release release;
          auto live = harness::run_live(s, c.gnb, c.detector);
          r = std::move(live.sim);
          verdicts = std::move(live.verdicts);
        }
        py::dict d;
        py::list trace, vs;
        for (const auto& e : r.trace) trace.append(to_dict(e));
        for (const auto& v : verdicts) vs.append(to_dict(v));
        d["trace"] = trace;
        d["verdicts"] = vs;
        d["onset_ms"] = opt(r.onset_ms);
        d["drop_time_ms"] = opt(r.drop_time_ms);
        d["duration_reject_ms"] = opt(r.duration_reject_ms);
        d["accepted_msg3"] = r.accepted_msg3;
        d["rejected_msg3"] = r.rejected_msg3;
        d["period_accepted"] = r.period_accepted;
        d["period_rejected"] = r.period_rejected;
        d["period_availability_pct"] = opt(r.period_availability_pct);
        return d;
      },
      py::arg("scenario") = "paper-attack-0",
      "Runs one seeded scenario with the detector attached. Keyword arguments are config keys.");

  m.def(
      "classify",
      [](std::int64_t n_msg3, std::int64_t n_msg4, std::int64_t n_msg5) {
        const detector::DetectorConfig c;
        return std::string(detector::to_string(
            detector::classify_state(detector::make_features(0, n_msg3, n_msg4, n_msg5, c), c)));
      },
      py::arg("n_msg3"), py::arg("n_msg4"), py::arg("n_msg5"));

  m.def(
      "run_stream",
      [](const py::iterable& events, const py::kwargs& overrides) {
        auto c = config_from("paper-attack-0", overrides).detector;
        py::list out;
        for (const auto& v : detector::run_stream(events_from(events), c)) out.append(to_dict(v));
        return out;
      },
      py::arg("events"), "Detector verdicts over an event list. Keyword arguments are detector config keys.");

  m.def(
      "write_trace",
      [](const std::filesystem::path& path, const py::iterable& events) {
        telemetry::write_trace_file(path, events_from(events));
      },
      py::arg("path"), py::arg("events"));

  m.def(
      "read_trace",
      [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& e : telemetry::read_trace_file(path)) out.append(to_dict(e));
        return out;
      },
      py::arg("path"));

  m.def(
      "table1",
      [](double effective_waiting_ms, std::size_t reps) {
        auto c = harness::preset("paper-attack-0");
        c.seeds = harness::seed_range(1, reps);
        std::vector<harness::TableOneRow> rows;
        {
          py::gil_scoped_release release;
          rows = harness::table1(c, effective_waiting_ms);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["occupancy"] = r.occupancy;
          d["source"] = r.source == harness::TableOneRow::Source::Theoretical ? "theoretical" : "simulated";
          d["n_accepted"] = r.n_accepted;
          d["n_rejected"] = r.n_rejected;
          d["drop_time_s"] = opt(r.drop_time_s);
          d["dur_accept_s"] = opt(r.dur_accept_s);
          d["dur_reject_s"] = opt(r.dur_reject_s);
          d["avail_rate_pct"] = opt(r.avail_rate_pct);
          out.append(d);
        }
        return out;
      },
      py::arg("effective_waiting_ms") = analytic::presets::kEffectiveWaitingTimeMs, py::arg("reps") = 1);

  m.def(
      "latency_campaign",
      [](const std::string& scenario, const py::kwargs& overrides) {
        const auto c = config_from(scenario, overrides);
        harness::LatencySummary s;
        {
          py::gil_scoped_release release;
          s = harness::latency_campaign(c);
        }
        py::dict d;
        d["target"] = std::string(detector::to_string(s.target));
        d["runs"] = s.runs.size();
        d["detected"] = s.detected;
        d["mean_latency_ms"] = opt(s.mean_latency_ms);
        d["mean_margin_ms"] = opt(s.mean_margin_ms);
        py::list runs;
        for (const auto& r : s.runs) {
          py::dict rd;
          rd["seed"] = r.seed;
          rd["onset_ms"] = opt(r.onset_ms);
          rd["latency_ms"] = opt(r.latency_ms);
          rd["drop_time_ms"] = opt(r.drop_time_ms);
          rd["attack_verdicts"] = r.attack_verdicts;
          rd["high_load_verdicts"] = r.high_load_verdicts;
          rd["overload_verdicts"] = r.overload_verdicts;
          rd["attack_progression"] = r.attack_progression;
          runs.append(rd);
        }
        d["per_run"] = runs;
        return d;
      },
      py::arg("scenario") = "paper-attack-0");
}
