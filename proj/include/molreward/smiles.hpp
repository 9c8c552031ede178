#pragma once

// Molecular graph, SMILES reader and canonical writer.
//
// Supported input is the Daylight organic subset plus bracket atoms: aromatic
// lowercase atoms, ring closures (including %nn), branches, dot-separated
// fragments, charges and explicit hydrogen counts. Stereo marks (/ \ @) and
// isotopes are accepted and dropped with a warning. Kekule six-membered
// carbocycles are perceived as aromatic; no other aromaticity perception is done.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molreward {

enum class BondOrder : std::uint8_t { kSingle = 1, kDouble = 2, kTriple = 3, kAromatic = 4 };

struct Atom {
  std::uint8_t atomic_number = 6;
  int charge = 0;
  bool aromatic = false;
  int hydrogens = 0;  // total attached H, implicit or bracketed

  bool operator==(const Atom&) const = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const noexcept { return atom == begin ? end : begin; }
  bool operator==(const Bond&) const = default;
};

struct Neighbor {
  int atom;
  int bond;
};

// Immutable after construction. Ring membership and fragments are derived from
// the connectivity in the constructor.
class MolecularGraph {
 public:
  // Throws std::invalid_argument if an invariant is broken (bad endpoints,
  // self bonds, duplicate bonds, aromatic bond on a non-aromatic atom).
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds, bool valence_warning = false);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }
  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Neighbor> neighbors(int atom) const;
  int degree(int atom) const { return static_cast<int>(neighbors(atom).size()); }
  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }

  bool atom_in_ring(int atom) const { return atom_in_ring_[static_cast<std::size_t>(atom)]; }
  bool bond_in_ring(int bond) const { return bond_in_ring_[static_cast<std::size_t>(bond)]; }
  int fragment_of(int atom) const { return fragment_[static_cast<std::size_t>(atom)]; }
  int fragment_count() const noexcept { return fragment_count_; }
  bool multi_fragment() const noexcept { return fragment_count_ > 1; }
  bool valence_warning() const noexcept { return valence_warning_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<bool> atom_in_ring_;
  std::vector<bool> bond_in_ring_;
  std::vector<int> fragment_;
  int fragment_count_ = 0;
  bool valence_warning_ = false;
};

enum class ParseErrorKind {
  kUnbalancedRingClosure,
  kUnclosedBranch,
  kUnknownElement,
  kValenceViolation,
  kEmptyInput,
  kInvalidSyntax,
};

struct ParseDiagnostic {
  ParseErrorKind kind;
  std::size_t offset = 0;
  std::string message;
};

enum class ParseWarningKind { kStereoIgnored, kIsotopeIgnored, kValence, kAromaticBondDemoted };

struct ParseWarning {
  ParseWarningKind kind;
  std::size_t offset = 0;
};

// Exactly one of graph / error is set. Valence problems are warnings: the graph
// is returned with valence_warning() set.
struct ParseResult {
  std::optional<MolecularGraph> graph;
  std::optional<ParseDiagnostic> error;
  std::vector<ParseWarning> warnings;

  explicit operator bool() const noexcept { return graph.has_value(); }
};

ParseResult parse_smiles(std::string_view input);

std::string_view to_string(ParseErrorKind kind);

// Parses or throws std::invalid_argument carrying the diagnostic text.
MolecularGraph parse_smiles_or_throw(std::string_view input);

// Deterministic: isomorphic graphs give identical strings and the output parses
// back to an isomorphic graph.
std::string canonical_smiles(const MolecularGraph& graph);

// Canonical atom ranks in [0, atom_count). Symmetry ties are broken deterministically.
std::vector<int> canonical_ranks(const MolecularGraph& graph);

// Renumbers atoms: new index of old atom i is order[i]. Bond order is shuffled accordingly.
MolecularGraph relabeled(const MolecularGraph& graph, std::span<const int> order);

int heavy_atom_count(const MolecularGraph& graph);
// Cyclomatic number, which equals the SSSR size.
int ring_count(const MolecularGraph& graph);
int rotatable_bond_count(const MolecularGraph& graph);

std::string_view element_symbol(int atomic_number);
// 0 when unknown.
int atomic_number_of(std::string_view symbol);

}  // namespace molreward
