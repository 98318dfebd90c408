#pragma once

// Exact arithmetic on real frequencies.
//
// A real frequency k is written as a rational combination of declared symbols
// (stand-ins for Q-independent reals such as 1, sqrt 2, pi), so independence
// over Q of a finite set is decided exactly by the rank of its coordinate
// matrix.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "measurelab/error.hpp"

namespace mlab {

using IntVector = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVector>;

class SymbolBasis {
 public:
  /// Throws BAD_BASIS for an empty list or a repeated name.
  static std::shared_ptr<const SymbolBasis> make(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  bool operator==(const SymbolBasis& other) const { return names_ == other.names_; }

 private:
  explicit SymbolBasis(std::vector<std::string> names) : names_(std::move(names)) {}
  std::vector<std::string> names_;
};

using BasisPtr = std::shared_ptr<const SymbolBasis>;

/// Parses "p/q" or "p" into a canonical rational; throws PARSE_ERROR.
mpq_class parse_rational(const std::string& text);
std::string format_rational(const mpq_class& q);

class FrequencyVector {
 public:
  /// Throws SIZE_MISMATCH when coords.size() != basis size.
  FrequencyVector(BasisPtr basis, std::vector<mpq_class> coords);
  static FrequencyVector zero(BasisPtr basis);
  /// The i-th basis symbol itself.
  static FrequencyVector unit(BasisPtr basis, std::size_t i);
  static FrequencyVector parse(BasisPtr basis, const std::vector<std::string>& coords);

  const BasisPtr& basis() const { return basis_; }
  const std::vector<mpq_class>& coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  bool is_zero() const;
  bool same_basis(const FrequencyVector& other) const;

  FrequencyVector operator+(const FrequencyVector& other) const;
  FrequencyVector operator-(const FrequencyVector& other) const;
  FrequencyVector operator-() const;
  FrequencyVector operator*(const mpq_class& factor) const;
  FrequencyVector operator*(std::int64_t factor) const;

  bool operator==(const FrequencyVector& other) const;
  /// Lexicographic on coordinates; only meaningful within one basis.
  std::strong_ordering operator<=>(const FrequencyVector& other) const;

  std::vector<std::string> to_strings() const;

 private:
  BasisPtr basis_;
  std::vector<mpq_class> coords_;
};

/// Rank over Q by fraction-free (Bareiss) elimination on the integer matrix
/// obtained by clearing each vector's denominators. Throws BASIS_MISMATCH.
std::size_t rank_over_Q(std::span<const FrequencyVector> vectors);

/// Smallest-height integer relation sum m_i k_i = 0 with 0 < max|m_i| <= bound,
/// first nonzero entry positive; nullopt if none exists in the box.
std::optional<IntVector> find_integer_relation(std::span<const FrequencyVector> vectors, int bound);

inline constexpr int kWitnessBound = 5;
inline constexpr std::size_t kWitnessMaxCount = 4;

class DependentSetError : public Error {
 public:
  DependentSetError(const std::string& what, std::optional<IntVector> witness)
      : Error(Errc::DependentSet, what), witness_(std::move(witness)) {}
  const std::optional<IntVector>& witness() const { return witness_; }

 private:
  std::optional<IntVector> witness_;
};

/// A finite Q-independent set gamma = {k_1, ..., k_n}. Copies share storage.
class IndependentSet {
 public:
  /// Throws EMPTY_SET, BASIS_MISMATCH, or DependentSetError (with a witness
  /// relation when count <= 4 and one exists with |m_i| <= 5).
  static IndependentSet make(std::vector<FrequencyVector> vectors);

  std::size_t size() const { return gens_->size(); }
  const FrequencyVector& operator[](std::size_t i) const { return (*gens_)[i]; }
  const std::vector<FrequencyVector>& generators() const { return *gens_; }
  const BasisPtr& basis() const { return (*gens_)[0].basis(); }

  bool operator==(const IndependentSet& other) const;

 private:
  explicit IndependentSet(std::shared_ptr<const std::vector<FrequencyVector>> gens) : gens_(std::move(gens)) {}
  std::shared_ptr<const std::vector<FrequencyVector>> gens_;
};

/// Integers m with k = sum m_i gamma_i. Throws NOT_IN_SPAN, NOT_INTEGRAL,
/// BASIS_MISMATCH, or OVERFLOW when an m_i does not fit in 64 bits.
IntVector decompose(const FrequencyVector& k, const IndependentSet& gamma);

/// Row i holds decompose(gamma_i, gamma_prime): gamma_i = sum_j M_ij gamma'_j.
/// Throws NOT_REFINEMENT when some gamma_i is not in G_{gamma'}.
IntMatrix refinement_matrix(const IndependentSet& gamma, const IndependentSet& gamma_prime);

/// lambda k; throws ZERO_LAMBDA.
FrequencyVector scale(const FrequencyVector& k, const mpq_class& lambda);
IndependentSet scale(const IndependentSet& gamma, const mpq_class& lambda);

/// Integer matrix product (rows of a) x (b); used for refinement composition.
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

}  // namespace mlab
