#pragma once

// Run reports and their JSON / CSV encodings.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "expalg/solver.hpp"

namespace expalg {

struct MonodromyEntry {
  int branch_id = 0;
  int index = 0;                 ///< 0 when the loop could not be followed
  std::vector<int> per_unknown;

  bool operator==(const MonodromyEntry&) const = default;
};

struct DomainEcho {
  CVec direction;
  std::size_t chart = 0;  // 0-based
  double epsilon = 0.0;
  double theta = 0.0;
  double eta = 0.0;

  bool operator==(const DomainEcho&) const = default;
};

struct RunReport {
  std::string spec_digest;
  int degree = 0;
  std::vector<std::string> unknowns;
  DomainEcho domain;
  RadiusRange radius;
  double contraction = 0.0;
  std::vector<MonodromyEntry> monodromy;
  std::size_t enumerated = 0;
  std::vector<SolutionRecord> records;
  AsymptoticReport asymptotics;
  std::vector<SkippedPoint> skipped;

  bool operator==(const RunReport& other) const;
};

/// Pretty-printed JSON; doubles use the shortest representation that reads
/// back to the same value.
std::string to_json(const RunReport& report);
/// Throws ParseError on malformed input.
RunReport from_json(std::string_view text);

/// One row per record; every double printed with 17 significant digits.
std::string to_csv(const RunReport& report);
std::vector<SolutionRecord> records_from_csv(std::string_view text);

}  // namespace expalg
