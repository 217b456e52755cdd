#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrcstorm/detector.hpp"
#include "rrcstorm/events.hpp"

// One JSON record per LF-terminated line. Field order is
// fixed so files are byte-stable and diffable:
//   trace:    {"t":0,"kind":"msg3","ue":"a1","cause":"mo_data"}
//   verdicts: {"t":650,"state":"attack","n_msg3":9,"n_msg4":8,"n_msg5":0,"r1":0.0000,"r2":0.0000}

namespace rrcstorm::telemetry {

inline constexpr const char* kTraceExtension = ".rrctrace.jsonl";
inline constexpr const char* kVerdictExtension = ".verdicts.jsonl";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_trace_record(const RrcEvent& event);
std::string format_verdict_record(const detector::DetectionVerdict& verdict);

/// Writes one record per event; returns the record count. Throws IoError if
/// the stream goes bad.
std::size_t write_trace(std::span<const RrcEvent> events, std::ostream& sink);
std::size_t write_verdicts(std::span<const detector::DetectionVerdict> verdicts, std::ostream& sink);

/// Strict parse: a line is accepted only if the writer would have produced
/// exactly those bytes. Throws ParseError carrying the 1-based line number.
std::vector<RrcEvent> read_trace(std::istream& source);

/// Verdict records carry counts and rounded ratios only; the window bounds
/// are rebuilt from `window_ms`.
std::vector<detector::DetectionVerdict> read_verdicts(std::istream& source, TimeMs window_ms);

void write_trace_file(const std::filesystem::path& path, std::span<const RrcEvent> events);
std::vector<RrcEvent> read_trace_file(const std::filesystem::path& path);
void write_verdict_file(const std::filesystem::path& path,
                        std::span<const detector::DetectionVerdict> verdicts);

}  // namespace rrcstorm::telemetry
