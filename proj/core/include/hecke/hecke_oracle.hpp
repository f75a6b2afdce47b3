#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/poly.hpp"

namespace hecke {

// Small dense integer matrix, row-major. Arithmetic is overflow-checked.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols);

  static IntMatrix identity(int n);
  static IntMatrix diagonal(std::span<const std::int64_t> entries);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  std::int64_t operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  IntMatrix transpose() const;
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  IntMatrix& operator*=(std::int64_t s);
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
  friend auto operator<=>(const IntMatrix&, const IntMatrix&) = default;

  std::string to_string() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> data_;
};

// (0, I; -I, 0)
IntMatrix standard_J(int genus);
// Antidiagonal form for the basis order (e_1..e_n, f_n..f_1): entry (k, 2n-1-k) is
// +1 for k < n and -1 otherwise. Upper-triangular similitudes form a Borel here.
IntMatrix adapted_J(int genus);

// delta with tM J M = p^delta J (standard J), or nullopt.
std::optional<int> is_symplectic_similitude(const IntMatrix& m, std::int64_t p);

/// Canonical representative of a left coset Gamma*M, Gamma = Sp_2n(Z).
///
/// Stored in the adapted basis. The matrix is upper triangular with positive
/// diagonal, m_kk * m_{2n-1-k,2n-1-k} = p^delta, and tM J' M = p^delta J'.
/// Column j < n has its entries above the diagonal in [0, m_jj); column
/// j >= n has rows 0..2n-1-j in [0, m_jj) and the remaining rows forced by the
/// similitude identity.
struct CosetRep {
  int genus = 0;
  std::int64_t p = 0;
  int delta = 0;
  IntMatrix matrix;

  // v_p of the first genus diagonal entries
  std::vector<int> valuations() const;
  IntMatrix to_standard_basis() const;
  // Row-major entries separated by single spaces.
  std::string dump_line() const;
  friend bool operator==(const CosetRep&, const CosetRep&) = default;
};

// Row Hermite normal form of a nonsingular matrix: upper triangular, positive
// diagonal, 0 <= h_ij < h_jj above the diagonal. Canonical for the row lattice.
IntMatrix row_hnf(const IntMatrix& m);

/// Elementary divisors paired as (d_1..d_n; e_1..e_n), d_i e_i = p^delta.
struct DivisorChain {
  std::int64_t p = 0;
  std::vector<int> d_exponents;
  std::vector<int> e_exponents;

  int genus() const { return static_cast<int>(d_exponents.size()); }
  // "(1,1;4,4)"
  std::string label() const;
  // "T(p)", "T_i(p^2)" or empty when the chain is not a generator class.
  std::string generator_name() const;
  friend auto operator<=>(const DivisorChain&, const DivisorChain&) = default;
};

DivisorChain smith_symplectic(const IntMatrix& m, std::int64_t p, int delta);

/// omega(M) = x0^delta p^(scalar_exponent*delta) prod_i (x_i p^weights[i-1])^(v_p(m_ii)).
struct OmegaFamily {
  int scalar_exponent = 0;
  std::vector<int> weights;

  // scalar -n(n+1)/2, weights n, n-1, .., 1: the Satake normalization for the adapted basis
  static OmegaFamily calibrated(int genus);
  // scalar -n(n+1)/2, weights 1, 2, .., n
  static OmegaFamily ascending(int genus);
};

MultiPoly omega(const CosetRep& rep, const OmegaFamily& family);
MultiPoly omega_of_valuations(int genus, std::int64_t p, int delta, std::span<const int> valuations,
                              const OmegaFamily& family);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationOptions {
  std::uint64_t budget = 1'000'000'000;
  unsigned workers = 1;
  // re-verify the similitude identity on every k-th coset; 0 disables
#ifdef NDEBUG
  std::uint64_t check_every = 1u << 16;
#else
  std::uint64_t check_every = 1;
#endif
};

// p^(delta n(n+1)/2) prod_i (1 + p^-i); exact for delta = 1.
long double projected_coset_count(int genus, std::int64_t p, int delta);

// Visits every coset once, in column-major DFS order with entries ascending.
// Single-threaded; the callback sees a fully built CosetRep.
void for_each_coset(int genus, std::int64_t p, int delta, const EnumerationOptions& options,
                    const std::function<void(const CosetRep&)>& visit);

// Same order as for_each_coset regardless of the worker count.
std::vector<CosetRep> enumerate_cosets(int genus, std::int64_t p, int delta,
                                       const EnumerationOptions& options = {});

// Coset counts keyed by the diagonal valuations (v_p(m_11), .., v_p(m_nn)).
using ValuationCounts = std::map<std::vector<int>, std::uint64_t>;
ValuationCounts diagonal_class_counts(int genus, std::int64_t p, int delta,
                                      const EnumerationOptions& options = {});
std::uint64_t count_cosets(int genus, std::int64_t p, int delta,
                           const EnumerationOptions& options = {});

// sum over classes of count * omega
MultiPoly image_from_counts(int genus, std::int64_t p, int delta, const ValuationCounts& counts,
                            const OmegaFamily& family);

// Spherical image of T(p^delta) at a numeric prime.
MultiPoly spherical_T(int genus, std::int64_t p, int delta, const EnumerationOptions& options = {},
                      const std::optional<OmegaFamily>& family = std::nullopt);

struct ClassImage {
  std::string name;
  DivisorChain chain;
  int delta = 0;
  std::uint64_t count = 0;
  MultiPoly image;
};

// T(p) and T_0(p^2)..T_n(p^2), each from its own double coset. Writes
// "class=<chain> count=<n>" lines to progress when given.
std::vector<ClassImage> spherical_generators(int genus, std::int64_t p,
                                             const EnumerationOptions& options = {},
                                             const std::optional<OmegaFamily>& family = std::nullopt,
                                             std::ostream* progress = nullptr);

}  // namespace hecke
