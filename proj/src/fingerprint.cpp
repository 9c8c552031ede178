#include "molreward/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>
#include <utility>

#include "molreward/hash.hpp"

namespace molreward {

Fingerprint::Fingerprint(std::size_t width, int radius) : width_(width), radius_(radius) {
  if (width == 0 || !std::has_single_bit(width) || width < 64) {
    throw std::invalid_argument("fingerprint width must be a power of two >= 64");
  }
  if (radius < 0 || radius > 4) throw std::invalid_argument("fingerprint radius must be in [0, 4]");
  words_.assign(width / 64, 0);
}

bool Fingerprint::test(std::size_t bit) const {
  if (bit >= width_) throw std::out_of_range("fingerprint bit out of range");
  return (words_[bit / 64] >> (bit % 64)) & 1U;
}

void Fingerprint::set(std::size_t bit) {
  if (bit >= width_) throw std::out_of_range("fingerprint bit out of range");
  std::uint64_t& w = words_[bit / 64];
  const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
  if (!(w & mask)) {
    w |= mask;
    ++popcount_;
  }
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(width_ / 4);
  for (std::uint64_t w : words_) {
    for (int byte = 0; byte < 8; ++byte) {
      const auto v = static_cast<unsigned>((w >> (8 * byte)) & 0xffU);
      out += kDigits[v >> 4];
      out += kDigits[v & 0xfU];
    }
  }
  return out;
}

Fingerprint Fingerprint::from_hex(std::string_view hex, int radius) {
  Fingerprint fp(hex.size() * 4, radius);
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw std::invalid_argument("invalid hex digit in fingerprint");
  };
  for (std::size_t byte = 0; byte < hex.size() / 2; ++byte) {
    const unsigned v = nibble(hex[2 * byte]) << 4 | nibble(hex[2 * byte + 1]);
    for (int bit = 0; bit < 8; ++bit) {
      if (v >> bit & 1U) fp.set(byte * 8 + static_cast<std::size_t>(bit));
    }
  }
  return fp;
}

namespace {

using BondSet = std::vector<std::uint64_t>;

void add_bond(BondSet& set, int bond) {
  set[static_cast<std::size_t>(bond) / 64] |= std::uint64_t{1} << (bond % 64);
}

void merge(BondSet& into, const BondSet& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] |= from[i];
}

std::uint64_t initial_invariant(const MolecularGraph& g, int atom) {
  const Atom& a = g.atom(atom);
  std::uint64_t h = mix64(a.atomic_number);
  h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(a.charge)));
  h = hash_combine(h, static_cast<std::uint64_t>(g.degree(atom)));
  h = hash_combine(h, static_cast<std::uint64_t>(a.hydrogens));
  h = hash_combine(h, g.atom_in_ring(atom) ? 1U : 0U);
  h = hash_combine(h, a.aromatic ? 1U : 0U);
  return h;
}

}  // namespace

std::vector<std::uint64_t> ecfp_identifiers(const MolecularGraph& g, int radius) {
  if (radius < 0 || radius > 4) throw std::invalid_argument("fingerprint radius must be in [0, 4]");
  const int n = g.atom_count();
  const std::size_t words = (static_cast<std::size_t>(g.bond_count()) + 63) / 64 + 1;

  std::vector<std::uint64_t> ids(n);
  std::vector<BondSet> env(n, BondSet(words, 0));
  std::vector<std::uint64_t> out;
  std::set<BondSet> seen;
  seen.insert(BondSet(words, 0));
  for (int i = 0; i < n; ++i) {
    ids[i] = initial_invariant(g, i);
    out.push_back(ids[i]);
  }

  for (int round = 1; round <= radius; ++round) {
    struct Candidate {
      std::uint64_t id;
      int atom;
    };
    std::vector<std::uint64_t> next(n);
    std::vector<BondSet> next_env = env;
    std::vector<Candidate> candidates;
    candidates.reserve(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> around;
      for (const Neighbor& nb : g.neighbors(i)) {
        around.emplace_back(static_cast<std::uint64_t>(g.bond(nb.bond).order), ids[nb.atom]);
        add_bond(next_env[i], nb.bond);
        merge(next_env[i], env[nb.atom]);
      }
      std::sort(around.begin(), around.end());
      std::uint64_t h = hash_combine(static_cast<std::uint64_t>(round), ids[i]);
      for (const auto& [order, id] : around) {
        h = hash_combine(h, order);
        h = hash_combine(h, id);
      }
      next[i] = h;
      candidates.push_back({h, i});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.id != b.id ? a.id < b.id : a.atom < b.atom;
    });
    for (const Candidate& c : candidates) {
      if (seen.insert(next_env[c.atom]).second) out.push_back(c.id);
    }
    ids = std::move(next);
    env = std::move(next_env);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Fingerprint ecfp(const MolecularGraph& g, int radius, std::size_t width) {
  Fingerprint fp(width, radius);
  for (std::uint64_t id : ecfp_identifiers(g, radius)) fp.set(static_cast<std::size_t>(id & (width - 1)));
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width()) throw std::invalid_argument("fingerprint width mismatch");
  std::size_t both = 0;
  std::size_t either = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    both += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    either += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace molreward
