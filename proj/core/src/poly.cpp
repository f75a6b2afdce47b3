#include "hecke/poly.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace hecke {

namespace {

constexpr std::array<std::string_view, kNumVars> kVarNames = {"p",  "x0", "x1", "x2",
                                                              "x3", "x4", "X"};

int checked_add(int a, int b) {
  int r;
  if (__builtin_add_overflow(a, b, &r)) throw PolyError("exponent overflow");
  return r;
}

int checked_mul(int a, int b) {
  int r;
  if (__builtin_mul_overflow(a, b, &r)) throw PolyError("exponent overflow");
  return r;
}

Exponents add_exponents(const Exponents& a, const Exponents& b) {
  Exponents r;
  for (std::size_t i = 0; i < kNumVars; ++i) r[i] = checked_add(a[i], b[i]);
  return r;
}

Coefficient rational_pow(const Coefficient& base, int e) {
  if (e == 0) return 1;
  if (e < 0) {
    if (base == 0) throw PolyError("pole at evaluation");
    return rational_pow(Coefficient(1) / base, -e);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
  Coefficient r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

std::string_view var_name(Var v) { return kVarNames[static_cast<std::size_t>(v)]; }

std::optional<Var> parse_var(std::string_view name) {
  for (std::size_t i = 0; i < kNumVars; ++i)
    if (kVarNames[i] == name) return static_cast<Var>(i);
  return std::nullopt;
}

Var x_var(int i) {
  if (i < 0 || i > 4) throw PolyError("no variable x" + std::to_string(i));
  return static_cast<Var>(static_cast<std::size_t>(Var::x0) + static_cast<std::size_t>(i));
}

MultiPoly::MultiPoly(const Coefficient& c) {
  add_term(Exponents{}, c);
}

MultiPoly MultiPoly::monomial(const Coefficient& c, const Exponents& e) {
  MultiPoly r;
  r.add_term(e, c);
  return r;
}

MultiPoly MultiPoly::variable(Var v, int exponent) {
  Exponents e{};
  e[static_cast<std::size_t>(v)] = exponent;
  return monomial(1, e);
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{});
}

Coefficient MultiPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Coefficient(0) : it->second;
}

int MultiPoly::degree(Var v) const {
  if (terms_.empty()) return 0;
  const auto i = static_cast<std::size_t>(v);
  int d = INT_MIN;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

int MultiPoly::min_degree(Var v) const {
  if (terms_.empty()) return 0;
  const auto i = static_cast<std::size_t>(v);
  int d = INT_MAX;
  for (const auto& [e, c] : terms_) d = std::min(d, e[i]);
  return d;
}

bool MultiPoly::uses(Var v) const {
  const auto i = static_cast<std::size_t>(v);
  return std::any_of(terms_.begin(), terms_.end(), [i](const auto& t) { return t.first[i] != 0; });
}

MultiPoly MultiPoly::coefficient_of(Var v, int k) const {
  const auto i = static_cast<std::size_t>(v);
  MultiPoly r;
  for (const auto& [e, c] : terms_) {
    if (e[i] != k) continue;
    Exponents f = e;
    f[i] = 0;
    r.terms_.emplace(f, c);
  }
  return r;
}

MultiPoly MultiPoly::truncated(Var v, int max_degree) const {
  const auto i = static_cast<std::size_t>(v);
  MultiPoly r;
  for (const auto& t : terms_)
    if (t.first[i] <= max_degree) r.terms_.insert(t);
  return r;
}

void MultiPoly::add_term(const Exponents& e, const Coefficient& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (inserted) {
    // callers may hand in unreduced fractions; equality relies on lowest terms
    it->second.canonicalize();
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) r.add_term(add_exponents(ea, eb), ca * cb);
  return r;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

MultiPoly& MultiPoly::operator*=(const Coefficient& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly operator-(MultiPoly a) {
  for (auto& [e, c] : a.terms_) c = -c;
  return a;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly result(1), base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

MultiPoly MultiPoly::substitute(const std::map<Var, MultiPoly>& bindings) const {
  // Inverses of monomial bindings, needed for negative exponents.
  std::map<Var, MultiPoly> inverses;
  for (const auto& [v, b] : bindings) {
    if (b.is_zero() || !b.is_monomial()) continue;
    const auto& [e, c] = *b.terms().begin();
    Exponents neg;
    for (std::size_t i = 0; i < kNumVars; ++i) neg[i] = checked_mul(-1, e[i]);
    inverses.emplace(v, MultiPoly::monomial(Coefficient(1) / c, neg));
  }

  std::map<std::pair<Var, int>, MultiPoly> power_cache;
  auto power_of = [&](Var v, int k) -> const MultiPoly& {
    auto key = std::make_pair(v, k);
    if (auto it = power_cache.find(key); it != power_cache.end()) return it->second;
    const MultiPoly& b = bindings.at(v);
    MultiPoly value;
    if (k >= 0) {
      value = b.pow(static_cast<unsigned>(k));
    } else {
      if (b.is_zero()) throw PolyError("pole at substitution");
      auto inv = inverses.find(v);
      if (inv == inverses.end())
        throw PolyError("non-monomial substitution into negative exponent of " +
                        std::string(var_name(v)));
      value = inv->second.pow(static_cast<unsigned>(-static_cast<long>(k)));
    }
    return power_cache.emplace(key, std::move(value)).first->second;
  };

  MultiPoly result;
  for (const auto& [e, c] : terms_) {
    Exponents kept{};
    MultiPoly term(c);
    for (std::size_t i = 0; i < kNumVars; ++i) {
      const auto v = static_cast<Var>(i);
      if (e[i] == 0) continue;
      if (bindings.contains(v))
        term *= power_of(v, e[i]);
      else
        kept[i] = e[i];
    }
    result += term * MultiPoly::monomial(1, kept);
  }
  return result;
}

MultiPoly MultiPoly::specialize(Var v, const Coefficient& value) const {
  const auto i = static_cast<std::size_t>(v);
  MultiPoly r;
  for (const auto& [e, c] : terms_) {
    Exponents f = e;
    f[i] = 0;
    r.add_term(f, c * rational_pow(value, e[i]));
  }
  return r;
}

Coefficient MultiPoly::eval(const std::map<Var, Coefficient>& point) const {
  Coefficient total = 0;
  for (const auto& [e, c] : terms_) {
    Coefficient t = c;
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      auto it = point.find(static_cast<Var>(i));
      if (it == point.end())
        throw PolyError("unbound variable " + std::string(kVarNames[i]) + " in evaluation");
      t *= rational_pow(it->second, e[i]);
    }
    total += t;
  }
  return total;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    const bool unit_monomial = e == Exponents{};
    if (c < 0)
      os << (first ? "-" : " - ");
    else if (!first)
      os << " + ";
    const Coefficient mag = abs(c);
    bool need_star = false;
    if (mag != 1 || unit_monomial) {
      os << mag.get_str();
      need_star = true;
    }
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << '*';
      os << kVarNames[i];
      if (e[i] != 1) os << '^' << e[i];
      need_star = true;
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MultiPoly& poly) { return os << poly.to_string(); }

nlohmann::json coefficient_to_json(const Coefficient& c) {
  auto part = [](const mpz_class& z) -> nlohmann::json {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
  };
  return nlohmann::json::array({part(c.get_num()), part(c.get_den())});
}

Coefficient coefficient_from_json(const nlohmann::json& j) {
  auto part = [](const nlohmann::json& v) -> mpz_class {
    if (v.is_number_integer()) return mpz_class(v.get<long>());
    if (v.is_string()) return mpz_class(v.get<std::string>());
    throw PolyError("coefficient part must be an integer or a decimal string");
  };
  if (!j.is_array() || j.size() != 2) throw PolyError("coefficient must be [num, den]");
  mpz_class den = part(j[1]);
  if (den <= 0) throw PolyError("coefficient denominator must be positive");
  Coefficient c(part(j[0]), den);
  c.canonicalize();
  return c;
}

nlohmann::json to_json(const MultiPoly& poly) {
  auto out = nlohmann::json::array();
  for (const auto& [e, c] : poly.terms()) {
    nlohmann::json exps = nlohmann::json::object();
    for (std::size_t i = 0; i < kNumVars; ++i) exps[std::string(kVarNames[i])] = e[i];
    out.push_back({{"c", coefficient_to_json(c)}, {"e", std::move(exps)}});
  }
  return out;
}

MultiPoly poly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw PolyError("polynomial JSON must be an array of terms");
  MultiPoly r;
  for (const auto& term : j) {
    if (!term.is_object() || !term.contains("c")) throw PolyError("term needs a \"c\" field");
    Exponents e{};
    if (term.contains("e")) {
      for (const auto& [name, value] : term.at("e").items()) {
        auto v = parse_var(name);
        if (!v) throw PolyError("unknown variable '" + name + "'");
        e[static_cast<std::size_t>(*v)] = value.get<int>();
      }
    }
    r += MultiPoly::monomial(coefficient_from_json(term.at("c")), e);
  }
  return r;
}

RationalFunction::RationalFunction(MultiPoly num, std::vector<MultiPoly> factors)
    : numerator(std::move(num)), denominator_factors(std::move(factors)) {
  for (const auto& f : denominator_factors)
    if (f.is_zero()) throw PolyError("zero denominator factor");
}

MultiPoly RationalFunction::expanded_denominator() const {
  MultiPoly d(1);
  for (const auto& f : denominator_factors) d *= f;
  return d;
}

}  // namespace hecke
