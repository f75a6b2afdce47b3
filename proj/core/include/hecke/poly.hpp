#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace hecke {

// The fixed variable set, in serialization order.
enum class Var : std::size_t { p = 0, x0, x1, x2, x3, x4, X };
inline constexpr std::size_t kNumVars = 7;

std::string_view var_name(Var v);
std::optional<Var> parse_var(std::string_view name);
// x_i for i in 0..4
Var x_var(int i);

using Coefficient = mpq_class;
using Exponents = std::array<int, kNumVars>;

class PolyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sparse Laurent polynomial over Q in the variables p, x0..x4, X.
///
/// Terms live in a map keyed by exponent vector, so iteration order is the
/// lexicographic order over (p, x0, x1, x2, x3, x4, X). No zero coefficient
/// is ever stored, which makes structural equality the ring equality.
class MultiPoly {
 public:
  using TermMap = std::map<Exponents, Coefficient>;

  MultiPoly() = default;
  MultiPoly(const Coefficient& c);  // NOLINT: constants convert implicitly
  MultiPoly(long c) : MultiPoly(Coefficient(c)) {}  // NOLINT

  static MultiPoly monomial(const Coefficient& c, const Exponents& e);
  static MultiPoly variable(Var v, int exponent = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  Coefficient coefficient(const Exponents& e) const;
  Coefficient constant_term() const { return coefficient(Exponents{}); }
  int degree(Var v) const;      // 0 for the zero polynomial
  int min_degree(Var v) const;  // 0 for the zero polynomial
  bool uses(Var v) const;

  // Sum of the terms whose exponent in v equals k, with v removed.
  MultiPoly coefficient_of(Var v, int k) const;
  // Drops every term whose exponent in v exceeds max_degree.
  MultiPoly truncated(Var v, int max_degree) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly& operator*=(const Coefficient& c);

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(MultiPoly a);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

  MultiPoly pow(unsigned e) const;

  // Exact image under the ring map sending each bound variable to its
  // binding. A variable with a negative exponent needs an invertible
  // (nonzero monomial) binding.
  MultiPoly substitute(const std::map<Var, MultiPoly>& bindings) const;
  // Partial evaluation of a single variable.
  MultiPoly specialize(Var v, const Coefficient& value) const;
  // Full evaluation; every variable that occurs must be bound.
  Coefficient eval(const std::map<Var, Coefficient>& point) const;

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const Coefficient& c);

  TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const MultiPoly& poly);

// JSON interchange: [{"c": [num, den], "e": {"p": .., "x0": .., ..., "X": ..}}]
nlohmann::json to_json(const MultiPoly& poly);
MultiPoly poly_from_json(const nlohmann::json& j);

nlohmann::json coefficient_to_json(const Coefficient& c);
Coefficient coefficient_from_json(const nlohmann::json& j);

/// Numerator over a factored denominator. Every factor is nonzero.
struct RationalFunction {
  MultiPoly numerator;
  std::vector<MultiPoly> denominator_factors;

  RationalFunction() = default;
  RationalFunction(MultiPoly num, std::vector<MultiPoly> factors);

  MultiPoly expanded_denominator() const;
};

}  // namespace hecke
