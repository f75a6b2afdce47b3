#include "hecke/sym_table.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#ifndef HECKE_DEFAULT_KTABLE
#define HECKE_DEFAULT_KTABLE "ktable-genus4.json"
#endif

namespace hecke {

Partition4::Partition4(std::array<int, 4> p) : parts(p) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (parts[i] < 0) throw PolyError("partition parts must be non-negative");
    if (i > 0 && parts[i] > parts[i - 1]) throw PolyError("partition parts must be non-increasing");
  }
}

Partition4 Partition4::from_label(std::string_view label) {
  if (label.size() != 4) throw PolyError("partition label must have four digits");
  std::array<int, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (label[i] < '0' || label[i] > '9') throw PolyError("partition label must be digits");
    p[i] = label[i] - '0';
  }
  return Partition4(p);
}

std::string Partition4::label() const {
  std::string s;
  for (int v : parts) {
    if (v > 9) return std::to_string(parts[0]) + "," + std::to_string(parts[1]) + "," +
                      std::to_string(parts[2]) + "," + std::to_string(parts[3]);
    s += static_cast<char>('0' + v);
  }
  return s;
}

MultiPoly sym_expand(const Partition4& part, SymConvention convention) {
  std::array<int, 4> e = part.parts;
  std::sort(e.begin(), e.end());
  MultiPoly out;
  do {
    Exponents ex{};
    for (int i = 0; i < 4; ++i) ex[static_cast<std::size_t>(Var::x1) + i] = e[i];
    if (convention == SymConvention::orbit_sum) {
      out += MultiPoly::monomial(1, ex);
    } else {
      // every one of the 24 permutations hits this monomial |stabilizer| times
      int stab = 1;
      for (int v = 0; v <= e[3]; ++v) {
        int mult = static_cast<int>(std::count(e.begin(), e.end(), v));
        for (int f = 2; f <= mult; ++f) stab *= f;
      }
      out += MultiPoly::monomial(stab, ex);
    }
  } while (std::next_permutation(e.begin(), e.end()));
  return out;
}

MultiPoly SymPoly::expand(SymConvention convention) const {
  MultiPoly body;
  for (const auto& t : terms)
    body += t.partition ? t.pcoeff * sym_expand(*t.partition, convention) : t.pcoeff;
  Exponents pre{};
  pre[static_cast<std::size_t>(Var::x0)] = x0pow;
  pre[static_cast<std::size_t>(Var::p)] = ppow;
  return MultiPoly::monomial(sign, pre) * body;
}

KTable::KTable(std::vector<SymPoly> entries) : entries_(std::move(entries)) {
  if (entries_.size() != kNumK)
    throw PolyError("K-table must have " + std::to_string(kNumK) + " entries");
  for (const auto& e : entries_) {
    if (e.sign != 1 && e.sign != -1) throw PolyError("K-table sign must be +1 or -1");
    for (const auto& t : e.terms)
      for (std::size_t v = 1; v < kNumVars; ++v)
        if (t.pcoeff.uses(static_cast<Var>(v)))
          throw PolyError("pcoeff must be a polynomial in p only");
  }
}

KTable KTable::from_json(const nlohmann::json& j) {
  const auto& list = j.is_object() ? j.at("entries") : j;
  std::vector<SymPoly> entries(kNumK);
  std::vector<bool> seen(kNumK, false);
  for (const auto& item : list) {
    const int k = item.at("k").get<int>();
    if (k < 0 || k >= kNumK) throw PolyError("K index out of range: " + std::to_string(k));
    if (seen[static_cast<std::size_t>(k)]) throw PolyError("duplicate K entry " + std::to_string(k));
    seen[static_cast<std::size_t>(k)] = true;
    SymPoly& s = entries[static_cast<std::size_t>(k)];
    s.sign = item.value("sign", 1);
    s.x0pow = item.at("x0pow").get<int>();
    s.ppow = item.at("ppow").get<int>();
    for (const auto& t : item.at("terms")) {
      SymTerm term{poly_from_json(t.at("pcoeff")), std::nullopt};
      if (!t.at("partition").is_null()) {
        auto parts = t.at("partition").get<std::vector<int>>();
        if (parts.size() != 4) throw PolyError("partition must have four parts");
        term.partition = Partition4({parts[0], parts[1], parts[2], parts[3]});
      }
      s.terms.push_back(std::move(term));
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw PolyError("K-table is missing entries");
  return KTable(std::move(entries));
}

KTable KTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PolyError("cannot open K-table " + path.string());
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json KTable::to_json() const {
  auto list = nlohmann::json::array();
  for (int k = 0; k < size(); ++k) {
    const auto& s = (*this)[k];
    auto terms = nlohmann::json::array();
    for (const auto& t : s.terms)
      terms.push_back({{"pcoeff", hecke::to_json(t.pcoeff)},
                       {"partition", t.partition ? nlohmann::json(t.partition->parts)
                                                 : nlohmann::json(nullptr)}});
    list.push_back(
        {{"k", k}, {"sign", s.sign}, {"x0pow", s.x0pow}, {"ppow", s.ppow}, {"terms", terms}});
  }
  return {{"name", "ktable-genus4"}, {"version", 1}, {"entries", list}};
}

std::filesystem::path default_ktable_path() {
  if (const char* env = std::getenv("HECKE_KTABLE")) return env;
  std::filesystem::path source_tree(HECKE_DEFAULT_KTABLE);
#ifdef HECKE_INSTALLED_KTABLE
  if (!std::filesystem::exists(source_tree)) return HECKE_INSTALLED_KTABLE;
#endif
  return source_tree;
}

std::vector<MultiPoly> build_Q(int genus) {
  if (genus < 1 || genus > 4) throw PolyError("genus must be in 1..4");
  std::vector<std::vector<int>> subsets;
  for (unsigned mask = 0; mask < (1u << genus); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < genus; ++i)
      if (mask & (1u << i)) s.push_back(i + 1);
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<MultiPoly> factors;
  for (const auto& s : subsets) {
    Exponents e{};
    e[static_cast<std::size_t>(Var::x0)] = 1;
    e[static_cast<std::size_t>(Var::X)] = 1;
    for (int i : s) e[static_cast<std::size_t>(x_var(i))] = 1;
    factors.push_back(MultiPoly(1) - MultiPoly::monomial(1, e));
  }
  return factors;
}

MultiPoly build_P4(const KTable& table, SymConvention convention) {
  MultiPoly P;
  for (int k = 0; k < table.size(); ++k)
    P += table[k].expand(convention) * MultiPoly::variable(Var::X, k);
  return P;
}

RationalFunction genus4_rational_function(const KTable& table, SymConvention convention) {
  return RationalFunction(build_P4(table, convention), build_Q(4));
}

FunctionalEquationResult check_functional_equation(const KTable& table,
                                                   SymConvention convention) {
  std::vector<MultiPoly> K;
  for (int k = 0; k < table.size(); ++k) K.push_back(table[k].expand(convention));

  const MultiPoly all_x = MultiPoly::variable(Var::x1) * MultiPoly::variable(Var::x2) *
                          MultiPoly::variable(Var::x3) * MultiPoly::variable(Var::x4);
  const std::map<Var, MultiPoly> dual = {
      {Var::p, MultiPoly::variable(Var::p, -1)},
      {Var::x0, MultiPoly::variable(Var::x0) * all_x},
      {Var::x1, MultiPoly::variable(Var::x1, -1)},
      {Var::x2, MultiPoly::variable(Var::x2, -1)},
      {Var::x3, MultiPoly::variable(Var::x3, -1)},
      {Var::x4, MultiPoly::variable(Var::x4, -1)},
  };
  FunctionalEquationResult result;
  for (int k = 0; k < kNumK; ++k) {
    // -p^-6 (x0^2 x1x2x3x4)^(7-k); the exponent goes negative for k > 7
    const int shift = 7 - k;
    Exponents e{};
    e[static_cast<std::size_t>(Var::p)] = -6;
    e[static_cast<std::size_t>(Var::x0)] = 2 * shift;
    for (int i = 1; i <= 4; ++i) e[static_cast<std::size_t>(x_var(i))] = shift;
    const MultiPoly scale = MultiPoly::monomial(-1, e);
    MultiPoly rhs = scale * K[static_cast<std::size_t>(k)].substitute(dual);
    MultiPoly residual = K[static_cast<std::size_t>(14 - k)] - rhs;
    if (!residual.is_zero() && !result.first_failure) result.first_failure = k;
    result.residuals.push_back(std::move(residual));
  }
  result.passed = !result.first_failure.has_value();
  return result;
}

RemarkResult check_remark_relation(const MultiPoly& numerator, int genus, RemarkForm form) {
  if (genus < 1 || genus > 4) throw PolyError("genus must be in 1..4");
  const int max_degree = (1 << genus) - 2;
  if (numerator.degree(Var::X) > max_degree)
    throw PolyError("numerator degree " + std::to_string(numerator.degree(Var::X)) +
                    " exceeds 2^genus - 2 = " + std::to_string(max_degree));
  for (int i = genus + 1; i <= 4; ++i)
    if (numerator.uses(x_var(i)))
      throw PolyError("numerator uses x" + std::to_string(i) + " beyond genus");

  std::map<Var, MultiPoly> dual;
  for (int i = 0; i <= genus; ++i) dual.emplace(x_var(i), MultiPoly::variable(x_var(i), -1));
  if (form == RemarkForm::invert_p) {
    dual.emplace(Var::p, MultiPoly::variable(Var::p, -1));
    dual.emplace(Var::X, MultiPoly::variable(Var::X, -1));
  } else {
    dual.emplace(Var::X, MultiPoly::variable(Var::p) * MultiPoly::variable(Var::X, -1));
  }

  const int power = (1 << (genus - 1)) - 1;
  Exponents pre{};
  pre[static_cast<std::size_t>(Var::p)] = -genus * (genus - 1) / 2;
  pre[static_cast<std::size_t>(Var::x0)] = 2 * power;
  for (int i = 1; i <= genus; ++i) pre[static_cast<std::size_t>(x_var(i))] = power;
  pre[static_cast<std::size_t>(Var::X)] = 2 * power;
  const int sign = (genus - 1) % 2 == 0 ? 1 : -1;

  RemarkResult r;
  r.residual = numerator - MultiPoly::monomial(sign, pre) * numerator.substitute(dual);
  r.passed = r.residual.is_zero();
  return r;
}

RationalFunction siegel_project(const RationalFunction& rf) {
  const std::map<Var, MultiPoly> kill = {{Var::x4, MultiPoly()}};
  RationalFunction out;
  out.numerator = rf.numerator.substitute(kill);
  for (const auto& f : rf.denominator_factors) {
    MultiPoly g = f.substitute(kill);
    if (g.is_zero()) throw PolyError("denominator factor vanishes under x4 = 0");
    if (g == MultiPoly(1)) continue;
    out.denominator_factors.push_back(std::move(g));
  }
  return out;
}

namespace {

std::string latex_power(std::string_view base, int e) {
  std::string s(base);
  if (e == 1) return s;
  s += "^";
  const std::string digits = std::to_string(e);
  return s + (digits.size() == 1 ? digits : "{" + digits + "}");
}

// Polynomial in p, highest power first: "2p^2+4p+1".
std::string latex_pcoeff(const MultiPoly& c) {
  std::string out;
  const auto& terms = c.terms();
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const int e = it->first[static_cast<std::size_t>(Var::p)];
    const Coefficient& v = it->second;
    std::string mag = Coefficient(abs(v)).get_str();
    if (v < 0)
      out += "-";
    else if (!out.empty())
      out += "+";
    if (e == 0) {
      out += mag;
      continue;
    }
    if (mag != "1") out += mag;
    out += e > 0 ? latex_power("p", e) : "p^{" + std::to_string(e) + "}";
  }
  return out.empty() ? "0" : out;
}

std::string latex_sym(const std::optional<Partition4>& part) {
  return part ? "sym_{" + part->label() + "}" : "1";
}

}  // namespace

std::string to_latex(const KTable& table) {
  std::ostringstream os;
  os << "\\begin{tabular}{|p{12cm}|}\n\\hline\n";
  for (int k = 0; k < table.size(); ++k) {
    const SymPoly& s = table[k];
    os << "\\\\\n\\begin{math}\nK_{" << k << "} = ";
    const bool bare = s.x0pow == 0 && s.ppow == 0 && s.terms.size() == 1 &&
                      !s.terms[0].partition;
    if (s.is_zero()) {
      os << "0";
    } else if (bare) {
      os << (s.sign < 0 ? "-" : "") << latex_pcoeff(s.terms[0].pcoeff);
    } else {
      if (s.sign < 0) os << "-";
      const std::string x0 = s.x0pow ? latex_power("x_0", s.x0pow) : "1";
      if (s.ppow < 0)
        os << "{\\displaystyle\\frac{" << x0 << "}{" << latex_power("p", -s.ppow) << "}}";
      else if (s.ppow > 0)
        os << latex_power("p", s.ppow) << x0;
      else
        os << x0;
      os << " \\times\n\\left(\n\\begin{array}{l}\n";
      // consecutive terms sharing a coefficient print as one group
      std::size_t i = 0;
      bool first = true;
      while (i < s.terms.size()) {
        std::size_t j = i;
        while (j < s.terms.size() && s.terms[j].pcoeff == s.terms[i].pcoeff) ++j;
        std::string coeff = latex_pcoeff(s.terms[i].pcoeff);
        if (!first) os << (coeff.front() == '-' ? " \\\\\n" : " + \\\\\n");
        first = false;
        const bool single_term = s.terms[i].pcoeff.size() == 1;
        if (coeff == "1")
          coeff.clear();
        else if (coeff == "-1")
          coeff = "-";
        else if (!single_term)
          coeff = "(" + coeff + ")";
        os << coeff;
        if (j - i == 1) {
          os << (coeff.empty() || coeff == "-" ? "" : "\\,") << latex_sym(s.terms[i].partition);
        } else {
          os << "(";
          for (std::size_t t = i; t < j; ++t)
            os << (t > i ? "+" : "") << latex_sym(s.terms[t].partition);
          os << ")";
        }
        i = j;
      }
      os << "\n\\end{array}\n\\right)";
    }
    os << "\n\\end{math}\\\\\n\\\\\n\\hline\n";
  }
  os << "\\end{tabular}\n";
  return os.str();
}

}  // namespace hecke
