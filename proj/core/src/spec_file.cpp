#include "expalg/spec_file.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "expalg/errors.hpp"

namespace expalg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Recursive-descent parser for polynomial expressions over named variables.
class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t line, std::size_t column0, const std::vector<std::string>& names)
      : text_(text), line_(line), col0_(column0), names_(names) {}

  MPoly parse() {
    MPoly e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col0_ + pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  MPoly expr() {
    MPoly acc = term();
    while (true) {
      if (eat('+')) {
        acc += term();
      } else if (eat('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  MPoly term() {
    MPoly acc = unary();
    while (eat('*')) acc = acc * unary();
    return acc;
  }

  MPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  MPoly power() {
    MPoly base = primary();
    if (eat('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer exponent");
      unsigned e = 0;
      const auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
      if (ec != std::errc{} || e > 64) {
        pos_ = start;
        fail("exponent out of range");
      }
      (void)p;
      return base.pow(e);
    }
    return base;
  }

  MPoly primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    const std::size_t nv = names_.size();
    if (c == '(') {
      ++pos_;
      MPoly e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t q = pos_ + 1;
        if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
        if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
          pos_ = q;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
      }
      double v = 0.0;
      const auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
      if (ec != std::errc{} || p != text_.data() + pos_) {
        pos_ = start;
        fail("malformed number");
      }
      if (pos_ < text_.size() && text_[pos_] == 'i' &&
          (pos_ + 1 == text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
        ++pos_;
        return MPoly::constant(nv, Complex(0.0, v));
      }
      return MPoly::constant(nv, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (name == "i") return MPoly::constant(nv, Complex(0.0, 1.0));
      for (std::size_t v = 0; v < nv; ++v) {
        if (names_[v] == name) return MPoly::variable(nv, v);
      }
      throw ValidationError("line " + std::to_string(line_) + ", column " + std::to_string(col0_ + start) +
                            ": undeclared variable '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col0_;
  const std::vector<std::string>& names_;
};

Complex constant_of(const MPoly& p) {
  if (p.is_zero()) return {};
  return p.terms().begin()->second;
}

Complex parse_complex_at(std::string_view text, std::size_t line, std::size_t column) {
  static const std::vector<std::string> none;
  if (trim(text).empty()) throw ParseError("expected a complex number", line, column);
  return constant_of(ExprParser(text, line, column, none).parse());
}

double parse_real_at(std::string_view text, std::size_t line, std::size_t column) {
  const Complex v = parse_complex_at(text, line, column);
  if (v.imag() != 0.0) throw ParseError("expected a real number", line, column);
  return v.real();
}

struct Line {
  std::size_t number;
  std::string_view text;  // comment stripped, not trimmed
};

// Column (1-based) of `part` inside `line`.
std::size_t column_of(const Line& line, std::string_view part) {
  return static_cast<std::size_t>(part.data() - line.text.data()) + 1;
}

}  // namespace

Complex parse_complex(std::string_view text) { return parse_complex_at(text, 1, 1); }

std::string spec_digest(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SpecFile parse_spec(std::string_view text) {
  std::vector<Line> lines;
  {
    std::size_t start = 0;
    std::size_t number = 1;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find('\n', start), text.size());
      std::string_view l = text.substr(start, end - start);
      if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      lines.push_back({number++, l});
      if (end == text.size()) break;
      start = end + 1;
    }
  }

  enum class Section { None, Group, Equations, Solver };
  Section section = Section::None;
  bool seen_group = false, seen_equations = false, seen_solver = false;

  std::vector<GroupFactor> factors;
  struct EquationText {
    Line line;
    std::string_view lhs, rhs;
  };
  std::vector<EquationText> equation_text;
  struct Setting {
    Line line;
    std::string key;
    std::string_view value;
  };
  std::vector<Setting> settings;

  for (const auto& line : lines) {
    const std::string_view body = trim(line.text);
    if (body.empty()) continue;
    const std::size_t col = column_of(line, body);
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("unterminated section header", line.number, col);
      const std::string name(trim(body.substr(1, body.size() - 2)));
      bool* seen = nullptr;
      if (name == "group") {
        section = Section::Group;
        seen = &seen_group;
      } else if (name == "equations") {
        section = Section::Equations;
        seen = &seen_equations;
      } else if (name == "solver") {
        section = Section::Solver;
        seen = &seen_solver;
      } else {
        throw ParseError("unknown section [" + name + "]", line.number, col);
      }
      if (*seen) throw ParseError("duplicate section [" + name + "]", line.number, col);
      *seen = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected '='", line.number, col);
    const std::string_view lhs = trim(body.substr(0, eq));
    const std::string_view rhs = trim(body.substr(eq + 1));
    if (lhs.empty()) throw ParseError("missing left-hand side", line.number, col);
    if (rhs.empty()) throw ParseError("missing right-hand side", line.number, col + eq + 1);

    switch (section) {
      case Section::None:
        throw ParseError("content outside of a section", line.number, col);
      case Section::Group: {
        const std::string expected = "z" + std::to_string(factors.size() + 1);
        if (lhs != expected) {
          throw ParseError("expected declaration of " + expected + ", found '" + std::string(lhs) + "'", line.number,
                           col);
        }
        std::vector<std::string_view> words;
        std::string_view rest = rhs;
        while (!rest.empty()) {
          std::size_t n = 0;
          while (n < rest.size() && !std::isspace(static_cast<unsigned char>(rest[n]))) ++n;
          words.push_back(rest.substr(0, n));
          rest = trim(rest.substr(n));
        }
        const std::size_t kind_col = column_of(line, words[0]);
        if (words[0] == "torus") {
          if (words.size() != 1) throw ParseError("torus takes no parameters", line.number, column_of(line, words[1]));
          factors.emplace_back(TorusFactor{});
        } else if (words[0] == "elliptic") {
          if (words.size() != 3) throw ParseError("elliptic needs two periods: omega1 omega2", line.number, kind_col);
          const Complex w1 = parse_complex_at(words[1], line.number, column_of(line, words[1]));
          const Complex w2 = parse_complex_at(words[2], line.number, column_of(line, words[2]));
          try {
            factors.emplace_back(EllipticFactor{EllipticCurve(Lattice(w1, w2))});
          } catch (const std::invalid_argument& e) {
            throw ValidationError("line " + std::to_string(line.number) + ": " + e.what());
          }
        } else {
          throw ParseError("unknown factor type '" + std::string(words[0]) + "'", line.number, kind_col);
        }
        break;
      }
      case Section::Equations:
        equation_text.push_back({line, lhs, rhs});
        break;
      case Section::Solver:
        settings.push_back({line, std::string(lhs), rhs});
        break;
    }
  }

  if (factors.empty()) throw ValidationError("spec declares no group factors");
  GroupSignature sig(std::move(factors));
  const auto names = ProblemSpec::variable_names(sig);

  std::vector<MPoly> equations;
  for (const auto& e : equation_text) {
    MPoly l = ExprParser(e.lhs, e.line.number, column_of(e.line, e.lhs), names).parse();
    MPoly r = ExprParser(e.rhs, e.line.number, column_of(e.line, e.rhs), names).parse();
    equations.push_back(l - r);
  }
  ProblemSpec problem(sig, std::move(equations));

  SolverSettings s;
  s.direction = CVec(sig.dimension(), 1.0);
  for (const auto& st : settings) {
    const std::size_t vcol = column_of(st.line, st.value);
    const std::size_t ln = st.line.number;
    if (st.key == "direction") {
      std::vector<Complex> c;
      std::string_view rest = st.value;
      while (true) {
        const auto comma = rest.find(',');
        const std::string_view part = trim(rest.substr(0, comma));
        c.push_back(parse_complex_at(part, ln, part.empty() ? vcol : column_of(st.line, part)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (c.size() != sig.dimension()) {
        throw ValidationError("line " + std::to_string(ln) + ": direction needs " + std::to_string(sig.dimension()) +
                              " coordinates");
      }
      s.direction = CVec(std::move(c));
    } else if (st.key == "chart") {
      const double v = parse_real_at(st.value, ln, vcol);
      if (v != std::floor(v) || v < 1 || v > static_cast<double>(sig.dimension())) {
        throw ValidationError("line " + std::to_string(ln) + ": chart must be an index between 1 and " +
                              std::to_string(sig.dimension()));
      }
      s.chart = static_cast<std::size_t>(v) - 1;
    } else if (st.key == "epsilon") {
      s.epsilon = parse_real_at(st.value, ln, vcol);
    } else if (st.key == "theta") {
      s.theta = parse_real_at(st.value, ln, vcol);
    } else if (st.key == "eta") {
      s.eta = parse_real_at(st.value, ln, vcol);
    } else if (st.key == "radius") {
      const auto colon = st.value.find(':');
      if (colon == std::string_view::npos) throw ParseError("radius must be MIN:MAX", ln, vcol);
      s.radius = RadiusRange{parse_real_at(st.value.substr(0, colon), ln, vcol),
                             parse_real_at(st.value.substr(colon + 1), ln, vcol + colon + 1)};
    } else if (st.key == "tol") {
      s.tol = parse_real_at(st.value, ln, vcol);
    } else if (st.key == "max_iter") {
      const double v = parse_real_at(st.value, ln, vcol);
      if (v != std::floor(v) || v < 1) throw ValidationError("line " + std::to_string(ln) + ": max_iter must be a positive integer");
      s.max_iter = static_cast<int>(v);
    } else if (st.key == "residual_tol") {
      s.residual_tol = parse_real_at(st.value, ln, vcol);
    } else {
      throw ParseError("unknown key '" + st.key + "'", ln, column_of(st.line, trim(st.line.text)));
    }
  }
  if (!(s.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(s.tol > 0.0) || !(s.residual_tol > 0.0)) throw ValidationError("tolerances must be positive");

  return SpecFile{std::move(problem), std::move(s), spec_digest(text)};
}

SpecFile load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open spec file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace expalg
