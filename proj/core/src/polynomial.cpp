#include "expalg/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace expalg {

namespace {

Complex ipow(Complex base, int e) {
  Complex acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace

MPoly MPoly::constant(std::size_t nvars, Complex value) {
  MPoly p(nvars);
  p.add_term(Monomial(nvars, 0), value);
  return p;
}

MPoly MPoly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw std::out_of_range("MPoly::variable: index out of range");
  MPoly p(nvars);
  Monomial m(nvars, 0);
  m[index] = 1;
  p.add_term(m, 1.0);
  return p;
}

void MPoly::add_term(const Monomial& m, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

MPoly& MPoly::operator+=(const MPoly& other) {
  if (other.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& other) {
  if (other.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  MPoly out(a.nvars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      MPoly::Monomial m(a.nvars_);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

MPoly MPoly::operator-() const {
  MPoly out(nvars_);
  for (const auto& [m, c] : terms_) out.add_term(m, -c);
  return out;
}

MPoly MPoly::pow(unsigned exponent) const {
  MPoly acc = constant(nvars_, 1.0);
  MPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1u) acc = acc * base;
    exponent >>= 1u;
    if (exponent > 0) base = base * base;
  }
  return acc;
}

Complex MPoly::evaluate(std::span<const Complex> values) const {
  if (values.size() != nvars_) throw std::invalid_argument("MPoly::evaluate: wrong number of values");
  Complex sum{};
  for (const auto& [m, c] : terms_) {
    Complex t = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (m[i] != 0) t *= ipow(values[i], m[i]);
    }
    sum += t;
  }
  return sum;
}

int MPoly::degree_in(std::size_t var) const noexcept {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

Poly MPoly::univariate(std::size_t var, std::span<const Complex> values) const {
  if (values.size() != nvars_) throw std::invalid_argument("MPoly::univariate: wrong number of values");
  std::vector<Complex> coeffs(static_cast<std::size_t>(degree_in(var)) + 1);
  for (const auto& [m, c] : terms_) {
    Complex t = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (i != var && m[i] != 0) t *= ipow(values[i], m[i]);
    }
    coeffs[static_cast<std::size_t>(m[var])] += t;
  }
  return Poly(std::move(coeffs));
}

}  // namespace expalg
