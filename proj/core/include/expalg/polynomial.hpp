#pragma once

// Sparse multivariate polynomials over C, used for the defining equations of
// the variety.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "expalg/complex_core.hpp"

namespace expalg {

class MPoly {
 public:
  using Monomial = std::vector<int>;  // exponent per variable

  explicit MPoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static MPoly constant(std::size_t nvars, Complex value);
  static MPoly variable(std::size_t nvars, std::size_t index);

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Monomial, Complex>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  MPoly& operator+=(const MPoly& other);
  MPoly& operator-=(const MPoly& other);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  MPoly operator-() const;
  MPoly pow(unsigned exponent) const;

  bool operator==(const MPoly&) const = default;

  Complex evaluate(std::span<const Complex> values) const;
  int degree_in(std::size_t var) const noexcept;
  bool depends_on(std::size_t var) const noexcept { return degree_in(var) > 0; }

  /// Univariate polynomial in `var` with every other variable replaced by
  /// its entry in `values` (the entry for `var` itself is ignored).
  Poly univariate(std::size_t var, std::span<const Complex> values) const;

 private:
  void add_term(const Monomial& m, Complex c);

  std::size_t nvars_;
  std::map<Monomial, Complex> terms_;
};

}  // namespace expalg
