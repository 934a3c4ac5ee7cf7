#include "expalg/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "expalg/errors.hpp"

namespace expalg {

using json = nlohmann::ordered_json;

bool RunReport::operator==(const RunReport& o) const {
  return spec_digest == o.spec_digest && degree == o.degree && unknowns == o.unknowns && domain == o.domain &&
         radius.min == o.radius.min && radius.max == o.radius.max && contraction == o.contraction &&
         monodromy == o.monodromy && enumerated == o.enumerated && records == o.records &&
         asymptotics == o.asymptotics && skipped == o.skipped;
}

namespace {

json flat(const CVec& v) {
  json a = json::array();
  for (const auto& c : v) {
    a.push_back(c.real());
    a.push_back(c.imag());
  }
  return a;
}

CVec unflat(const json& a) {
  if (!a.is_array() || a.size() % 2 != 0) throw std::invalid_argument("complex vector must be [re, im, ...]");
  CVec v(a.size() / 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(a.at(2 * i).get<double>(), a.at(2 * i + 1).get<double>());
  return v;
}

json record_json(const SolutionRecord& r) {
  json j;
  j["lambda"] = flat(r.lambda);
  j["s"] = flat(r.s);
  j["branch_id"] = r.branch_id;
  j["residual"] = r.residual;
  j["f_residual"] = r.f_residual;
  j["iterations"] = r.iterations;
  j["contraction_ratio"] = r.contraction_ratio;
  j["gamma_estimate"] = r.gamma_estimate ? flat(*r.gamma_estimate) : json(nullptr);
  return j;
}

SolutionRecord record_from(const json& j) {
  SolutionRecord r;
  r.lambda = unflat(j.at("lambda"));
  r.s = unflat(j.at("s"));
  r.branch_id = j.at("branch_id").get<int>();
  r.residual = j.at("residual").get<double>();
  r.f_residual = j.at("f_residual").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.contraction_ratio = j.at("contraction_ratio").get<double>();
  if (!j.at("gamma_estimate").is_null()) r.gamma_estimate = unflat(j.at("gamma_estimate"));
  return r;
}

}  // namespace

std::string to_json(const RunReport& rep) {
  json j;
  j["spec_digest"] = rep.spec_digest;
  j["degree"] = rep.degree;
  j["unknowns"] = rep.unknowns;
  j["domain"] = {{"direction", flat(rep.domain.direction)},
                 {"chart", rep.domain.chart + 1},
                 {"epsilon", rep.domain.epsilon},
                 {"theta", rep.domain.theta},
                 {"eta", rep.domain.eta}};
  j["radius"] = {rep.radius.min, rep.radius.max};
  j["contraction"] = rep.contraction;
  j["monodromy"] = json::array();
  for (const auto& m : rep.monodromy) {
    j["monodromy"].push_back({{"branch_id", m.branch_id}, {"index", m.index}, {"per_unknown", m.per_unknown}});
  }
  j["enumerated"] = rep.enumerated;
  j["records"] = json::array();
  for (const auto& r : rep.records) j["records"].push_back(record_json(r));

  json asym;
  asym["branches"] = json::array();
  for (const auto& b : rep.asymptotics.branches) {
    json decay = json::array();
    for (const auto& d : b.decay) decay.push_back({d.lambda_norm, d.deviation});
    asym["branches"].push_back(
        {{"branch_id", b.branch_id}, {"gamma", flat(b.gamma)}, {"decay", decay}, {"trend_ok", b.trend_ok}});
  }
  asym["log_growth_constant"] =
      rep.asymptotics.log_growth_constant ? json(*rep.asymptotics.log_growth_constant) : json(nullptr);
  j["asymptotics"] = asym;

  j["skipped"] = json::array();
  for (const auto& s : rep.skipped) {
    j["skipped"].push_back({{"lambda", flat(s.lambda)}, {"branch_id", s.branch_id}, {"reason", s.reason}});
  }
  return j.dump(2) + "\n";
}

RunReport from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON report: ") + e.what(), 1, e.byte);
  }
  try {
    RunReport rep;
    rep.spec_digest = j.at("spec_digest").get<std::string>();
    rep.degree = j.at("degree").get<int>();
    rep.unknowns = j.at("unknowns").get<std::vector<std::string>>();
    const auto& d = j.at("domain");
    rep.domain.direction = unflat(d.at("direction"));
    rep.domain.chart = d.at("chart").get<std::size_t>() - 1;
    rep.domain.epsilon = d.at("epsilon").get<double>();
    rep.domain.theta = d.at("theta").get<double>();
    rep.domain.eta = d.at("eta").get<double>();
    rep.radius = {j.at("radius").at(0).get<double>(), j.at("radius").at(1).get<double>()};
    rep.contraction = j.at("contraction").get<double>();
    for (const auto& m : j.at("monodromy")) {
      rep.monodromy.push_back(
          {m.at("branch_id").get<int>(), m.at("index").get<int>(), m.at("per_unknown").get<std::vector<int>>()});
    }
    rep.enumerated = j.at("enumerated").get<std::size_t>();
    for (const auto& r : j.at("records")) rep.records.push_back(record_from(r));
    const auto& a = j.at("asymptotics");
    for (const auto& b : a.at("branches")) {
      BranchAsymptotics ba;
      ba.branch_id = b.at("branch_id").get<int>();
      ba.gamma = unflat(b.at("gamma"));
      for (const auto& e : b.at("decay")) ba.decay.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
      ba.trend_ok = b.at("trend_ok").get<bool>();
      rep.asymptotics.branches.push_back(std::move(ba));
    }
    if (!a.at("log_growth_constant").is_null()) {
      rep.asymptotics.log_growth_constant = a.at("log_growth_constant").get<double>();
    }
    for (const auto& s : j.at("skipped")) {
      rep.skipped.push_back({unflat(s.at("lambda")), s.at("branch_id").get<int>(), s.at("reason").get<std::string>()});
    }
    return rep;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid report structure: ") + e.what(), 1, 1);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid report structure: ") + e.what(), 1, 1);
  }
}

std::string to_csv(const RunReport& rep) {
  const std::size_t n = rep.domain.direction.size();
  std::ostringstream out;
  for (std::size_t k = 1; k <= n; ++k) out << "lambda" << k << "_re,lambda" << k << "_im,";
  for (std::size_t k = 1; k <= n; ++k) out << "s" << k << "_re,s" << k << "_im,";
  out << "branch_id,residual,f_residual,iterations\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << ',';
  };
  for (const auto& r : rep.records) {
    for (const auto& c : r.lambda) {
      num(c.real());
      num(c.imag());
    }
    for (const auto& c : r.s) {
      num(c.real());
      num(c.imag());
    }
    out << r.branch_id << ',';
    num(r.residual);
    num(r.f_residual);
    out << r.iterations << '\n';
  }
  return out.str();
}

std::vector<SolutionRecord> records_from_csv(std::string_view text) {
  std::vector<SolutionRecord> out;
  std::size_t start = text.find('\n');
  if (start == std::string_view::npos) return out;
  const std::string_view header = text.substr(0, start);
  std::size_t cols = 1;
  for (char c : header) cols += c == ',';
  if (cols < 8 || (cols - 4) % 4 != 0) throw ParseError("unexpected CSV header", 1, 1);
  const std::size_t n = (cols - 4) / 4;
  std::size_t line = 2;
  ++start;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string row(text.substr(start, end - start));
    start = end + 1;
    if (row.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != cols) throw ParseError("wrong number of CSV fields", line, 1);
    try {
      SolutionRecord r;
      r.lambda = CVec(n);
      r.s = CVec(n);
      for (std::size_t k = 0; k < n; ++k) {
        r.lambda[k] = Complex(std::stod(cells[2 * k]), std::stod(cells[2 * k + 1]));
        r.s[k] = Complex(std::stod(cells[2 * n + 2 * k]), std::stod(cells[2 * n + 2 * k + 1]));
      }
      r.branch_id = std::stoi(cells[4 * n]);
      r.residual = std::stod(cells[4 * n + 1]);
      r.f_residual = std::stod(cells[4 * n + 2]);
      r.iterations = std::stoi(cells[4 * n + 3]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("malformed CSV number", line, 1);
    }
    ++line;
  }
  return out;
}

}  // namespace expalg
