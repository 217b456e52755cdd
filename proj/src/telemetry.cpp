#include "rrcstorm/telemetry.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace rrcstorm::telemetry {

using nlohmann::json;
using nlohmann::ordered_json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_trace_record(const RrcEvent& event) {
  ordered_json j;
  j["t"] = event.t;
  j["kind"] = to_string(event.kind);
  j["ue"] = event.ue_ref;
  if (event.cause) j["cause"] = to_string(*event.cause);
  return j.dump();
}

std::string format_verdict_record(const detector::DetectionVerdict& v) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"t\":%" PRId64 ",\"state\":\"%s\",\"n_msg3\":%" PRId64 ",\"n_msg4\":%" PRId64
                ",\"n_msg5\":%" PRId64 ",\"r1\":%.4f,\"r2\":%.4f}",
                v.t_ms, std::string(detector::to_string(v.state)).c_str(), v.features.n_msg3,
                v.features.n_msg4, v.features.n_msg5, v.features.r1, v.features.r2);
  return buf;
}

namespace {

template <typename Range, typename Format>
std::size_t write_lines(const Range& items, std::ostream& sink, Format format) {
  std::size_t n = 0;
  for (const auto& item : items) {
    sink << format(item) << '\n';
    if (!sink) throw IoError("write failed after " + std::to_string(n) + " records");
    ++n;
  }
  sink.flush();
  if (!sink) throw IoError("flush failed");
  return n;
}

json parse_object(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
  return j;
}

const json& require(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line_no, std::string("missing key \"") + key + "\"");
  return *it;
}

std::int64_t require_int(const json& j, const char* key, std::size_t line_no) {
  const json& v = require(j, key, line_no);
  if (!v.is_number_integer()) throw ParseError(line_no, std::string("\"") + key + "\" is not an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ParseError(line_no, std::string("\"") + key + "\" out of range");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const json& j, const char* key, std::size_t line_no) {
  const json& v = require(j, key, line_no);
  if (!v.is_string()) throw ParseError(line_no, std::string("\"") + key + "\" is not a string");
  return v.get<std::string>();
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::size_t line_no) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ParseError(line_no, "unknown key \"" + key + "\"");
  }
}

}  // namespace

std::size_t write_trace(std::span<const RrcEvent> events, std::ostream& sink) {
  return write_lines(events, sink, format_trace_record);
}

std::size_t write_verdicts(std::span<const detector::DetectionVerdict> verdicts, std::ostream& sink) {
  return write_lines(verdicts, sink, format_verdict_record);
}

std::vector<RrcEvent> read_trace(std::istream& source) {
  std::vector<RrcEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const json j = parse_object(line, line_no);
    reject_unknown_keys(j, {"t", "kind", "ue", "cause"}, line_no);

    RrcEvent ev;
    ev.t = require_int(j, "t", line_no);
    if (ev.t < 0) throw ParseError(line_no, "negative timestamp");
    const std::string kind = require_string(j, "kind", line_no);
    const auto parsed_kind = parse_msg_kind(kind);
    if (!parsed_kind) throw ParseError(line_no, "unknown kind \"" + kind + "\"");
    ev.kind = *parsed_kind;
    ev.ue_ref = require_string(j, "ue", line_no);

    if (j.contains("cause")) {
      if (ev.kind != MsgKind::Msg3) throw ParseError(line_no, "cause on a non-msg3 record");
      const std::string cause = require_string(j, "cause", line_no);
      const auto parsed_cause = parse_cause(cause);
      if (!parsed_cause) throw ParseError(line_no, "unknown cause \"" + cause + "\"");
      ev.cause = *parsed_cause;
    } else if (ev.kind == MsgKind::Msg3) {
      throw ParseError(line_no, "msg3 record without cause");
    }

    if (!events.empty() && ev.t < events.back().t) {
      throw ParseError(line_no, "timestamp regression (" + std::to_string(ev.t) + " after " +
                                    std::to_string(events.back().t) + ")");
    }
    if (format_trace_record(ev) != line) throw ParseError(line_no, "non-canonical record");
    events.push_back(std::move(ev));
  }
  if (source.bad()) throw IoError("read failed at line " + std::to_string(line_no + 1));
  return events;
}

std::vector<detector::DetectionVerdict> read_verdicts(std::istream& source, TimeMs window_ms) {
  std::vector<detector::DetectionVerdict> verdicts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const json j = parse_object(line, line_no);
    reject_unknown_keys(j, {"t", "state", "n_msg3", "n_msg4", "n_msg5", "r1", "r2"}, line_no);

    detector::DetectionVerdict v;
    v.t_ms = require_int(j, "t", line_no);
    const std::string state = require_string(j, "state", line_no);
    const auto parsed_state = detector::parse_state(state);
    if (!parsed_state) throw ParseError(line_no, "unknown state \"" + state + "\"");
    v.state = *parsed_state;
    v.features.window_end_ms = v.t_ms;
    v.features.window_start_ms = v.t_ms - window_ms;
    v.features.n_msg3 = require_int(j, "n_msg3", line_no);
    v.features.n_msg4 = require_int(j, "n_msg4", line_no);
    v.features.n_msg5 = require_int(j, "n_msg5", line_no);
    for (const char* key : {"r1", "r2"}) {
      const json& r = require(j, key, line_no);
      if (!r.is_number()) throw ParseError(line_no, std::string("\"") + key + "\" is not a number");
    }
    v.features.r1 = j["r1"].get<double>();
    v.features.r2 = j["r2"].get<double>();

    if (!verdicts.empty() && v.t_ms < verdicts.back().t_ms) {
      throw ParseError(line_no, "timestamp regression");
    }
    if (format_verdict_record(v) != line) throw ParseError(line_no, "non-canonical record");
    verdicts.push_back(v);
  }
  if (source.bad()) throw IoError("read failed at line " + std::to_string(line_no + 1));
  return verdicts;
}

void write_trace_file(const std::filesystem::path& path, std::span<const RrcEvent> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace(events, out);
}

std::vector<RrcEvent> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_trace(in);
}

void write_verdict_file(const std::filesystem::path& path,
                        std::span<const detector::DetectionVerdict> verdicts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_verdicts(verdicts, out);
}

}  // namespace rrcstorm::telemetry
