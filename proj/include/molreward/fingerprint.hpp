#pragma once

// Circular (ECFP-style) fingerprints folded into a fixed-width bitset, and
// Tanimoto similarity over them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molreward/smiles.hpp"

namespace molreward {

inline constexpr std::size_t kDefaultFingerprintWidth = 2048;
inline constexpr int kDefaultFingerprintRadius = 2;

class Fingerprint {
 public:
  // width must be a power of two, radius in [0, 4].
  Fingerprint(std::size_t width, int radius);

  std::size_t width() const noexcept { return width_; }
  int radius() const noexcept { return radius_; }
  std::size_t popcount() const noexcept { return popcount_; }
  bool test(std::size_t bit) const;
  void set(std::size_t bit);

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  // Little-endian byte order, two lowercase hex digits per byte; width/4 characters.
  std::string to_hex() const;
  static Fingerprint from_hex(std::string_view hex, int radius = kDefaultFingerprintRadius);

  bool operator==(const Fingerprint&) const = default;

 private:
  std::size_t width_;
  int radius_;
  std::vector<std::uint64_t> words_;
  std::size_t popcount_ = 0;
};

// Unfolded environment identifiers after duplicate-environment removal, sorted.
std::vector<std::uint64_t> ecfp_identifiers(const MolecularGraph& graph, int radius);

Fingerprint ecfp(const MolecularGraph& graph, int radius = kDefaultFingerprintRadius,
                 std::size_t width = kDefaultFingerprintWidth);

// |a & b| / |a | b|; 1.0 when both are empty. Throws std::invalid_argument on width mismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

inline constexpr double kSimilarityGate = 0.6;

// Strictly greater than 0.6.
inline bool similarity_gate(double similarity) noexcept { return similarity > kSimilarityGate; }

}  // namespace molreward
