#pragma once

// Text format for problem specifications.
//
//   # comment
//   [group]
//   z1 = elliptic 1 i          # periods omega1 omega2
//   z2 = torus
//   [equations]
//   z2 = x1^2                  # read as lhs - rhs = 0
//   w2^2 = z1 + 3i
//   [solver]
//   direction = 1, 0.5+2i      # c_1..c_n
//   chart = 1                  # 1-based index l of the chart coordinate
//   epsilon = 0.2
//   theta = -3.14159
//   eta = 2.94159
//   radius = 20:40
//   tol = 1e-14
//   max_iter = 100
//   residual_tol = 1e-10

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expalg/problem_spec.hpp"
#include "expalg/solver.hpp"

namespace expalg {

struct SolverSettings {
  CVec direction;
  std::size_t chart = 0;  // 0-based
  double epsilon = 0.2;
  std::optional<double> theta;
  std::optional<double> eta;
  std::optional<RadiusRange> radius;
  double tol = 1e-14;
  int max_iter = 100;
  double residual_tol = 1e-10;
};

struct SpecFile {
  ProblemSpec problem;
  SolverSettings solver;
  std::string digest;
};

/// Parse and validate a spec document. Throws ParseError (with line and
/// column) on malformed text and ValidationError on semantic problems.
SpecFile parse_spec(std::string_view text);
SpecFile load_spec(const std::filesystem::path& path);

/// Complex literal such as "1.5-2i", "i", "-3e-2"; throws ParseError.
Complex parse_complex(std::string_view text);

/// FNV-1a 64-bit hash of the document, as 16 hex digits.
std::string spec_digest(std::string_view text);

}  // namespace expalg
