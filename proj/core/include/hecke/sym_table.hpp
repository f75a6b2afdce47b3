#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hecke/poly.hpp"

namespace hecke {

// Exponent multiset (i1 >= i2 >= i3 >= i4 >= 0) indexing a symmetric polynomial in x1..x4.
struct Partition4 {
  std::array<int, 4> parts{};

  Partition4() = default;
  explicit Partition4(std::array<int, 4> p);
  // "2211" style label; every part must be a single digit.
  static Partition4 from_label(std::string_view label);

  std::string label() const;
  friend auto operator<=>(const Partition4&, const Partition4&) = default;
};

// How sym_{i1 i2 i3 i4} expands into monomials. Only orbit_sum reproduces
// the genus-4 table; full_s4_sum exists to show that.
enum class SymConvention { orbit_sum, full_s4_sum };

// orbit_sum: each distinct permutation of the exponents once, coefficient 1.
// full_s4_sum: all 24 permutations, so a monomial carries its stabilizer order.
MultiPoly sym_expand(const Partition4& part, SymConvention convention = SymConvention::orbit_sum);

struct SymTerm {
  MultiPoly pcoeff;  // Laurent polynomial in p only
  std::optional<Partition4> partition;  // empty: pcoeff stands alone, e.g. K_0 = 1
};

// sign * x0^x0pow * p^ppow * sum(pcoeff * sym_partition)
struct SymPoly {
  int sign = 1;
  int x0pow = 0;
  int ppow = 0;
  std::vector<SymTerm> terms;

  bool is_zero() const { return terms.empty(); }
  MultiPoly expand(SymConvention convention = SymConvention::orbit_sum) const;
};

inline constexpr int kNumK = 15;

class KTable {
 public:
  KTable() = default;
  explicit KTable(std::vector<SymPoly> entries);

  static KTable from_json(const nlohmann::json& j);
  static KTable load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const SymPoly& operator[](int k) const { return entries_.at(static_cast<std::size_t>(k)); }
  SymPoly& at(int k) { return entries_.at(static_cast<std::size_t>(k)); }
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  std::vector<SymPoly> entries_;
};

std::filesystem::path default_ktable_path();

// The 2^genus factors (1 - x0 * prod_{i in S} x_i * X), subsets S of {1..genus}
// in order of size and then lexicographically.
std::vector<MultiPoly> build_Q(int genus);

// sum_k K_k X^k, fully expanded.
MultiPoly build_P4(const KTable& table, SymConvention convention = SymConvention::orbit_sum);

RationalFunction genus4_rational_function(const KTable& table,
                                          SymConvention convention = SymConvention::orbit_sum);

struct FunctionalEquationResult {
  bool passed = false;
  std::vector<MultiPoly> residuals;  // residuals[k] pairs K_{14-k} with K_k
  std::optional<int> first_failure;
};

// K_{14-k}(p, x0, x) == -p^-6 (x0^2 x1x2x3x4)^(7-k) K_k(1/p, x0x1x2x3x4, 1/x1, .., 1/x4)
FunctionalEquationResult check_functional_equation(
    const KTable& table, SymConvention convention = SymConvention::orbit_sum);

// invert_p:  P(p; x; X) = (-1)^(n-1) (x0^2 x1..xn X^2)^(2^(n-1)-1) p^(-n(n-1)/2) P(1/p; 1/x; 1/X)
// literal:   same prefactor, P(p; 1/x; p/X) with p left alone. Holds for n <= 3 but
//            not for the genus-4 table, where it contradicts the k <-> 14-k relation.
enum class RemarkForm { invert_p, literal };

struct RemarkResult {
  bool passed = false;
  MultiPoly residual;
};

RemarkResult check_remark_relation(const MultiPoly& numerator, int genus,
                                   RemarkForm form = RemarkForm::invert_p);

// x4 -> 0 in the numerator and in every factor; factors that become 1 are dropped.
RationalFunction siegel_project(const RationalFunction& rf);

// One block per K_k with the x0/p prefactor pulled out.
std::string to_latex(const KTable& table);

}  // namespace hecke
