#include "molreward/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace molreward {

namespace {

constexpr std::array<std::string_view, 119> kElements = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si",
    "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu",
    "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru",
    "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",
    "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac",
    "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf",
    "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

// Allowed valences of the organic subset, lowest first.
std::span<const int> organic_valences(int z) {
  static constexpr int kB[] = {3};
  static constexpr int kC[] = {4};
  static constexpr int kN[] = {3, 5};
  static constexpr int kO[] = {2};
  static constexpr int kP[] = {3, 5};
  static constexpr int kS[] = {2, 4, 6};
  static constexpr int kHalogen[] = {1};
  switch (z) {
    case 5: return kB;
    case 6: return kC;
    case 7: return kN;
    case 8: return kO;
    case 15: return kP;
    case 16: return kS;
    case 9:
    case 17:
    case 35:
    case 53: return kHalogen;
    default: return {};
  }
}

bool organic_subset(int z, bool aromatic) {
  if (aromatic) return z == 5 || z == 6 || z == 7 || z == 8 || z == 15 || z == 16;
  return !organic_valences(z).empty();
}

// Largest sensible valence given the charge, using the isoelectronic neighbor.
// Zero means "do not check".
int max_valence(int z, int charge) {
  static constexpr std::array<int, 10> kPeriod2 = {0, 0, 0, 0, 0, 3, 4, 3, 2, 1};
  if (z >= 5 && z <= 9) {
    const int eff = z - charge;
    if (eff < 5 || eff > 9) return 0;
    return kPeriod2[static_cast<std::size_t>(eff)];
  }
  switch (z) {
    case 14: return 4;
    case 15: return charge == 0 ? 5 : (charge > 0 ? 4 : 3);
    case 16: return charge == 0 ? 6 : 5;
    case 17:
    case 35:
    case 53: return 7;
    default: return 0;
  }
}

int bond_valence(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

// Implicit H for an unbracketed atom. Aromatic atoms reserve one valence for the
// pi system and never climb to a higher valence state.
int implicit_hydrogens(int z, bool aromatic, int bond_sum, bool* exceeds) {
  const auto valences = organic_valences(z);
  if (exceeds) *exceeds = false;
  if (aromatic) {
    return std::max(0, valences.front() - (bond_sum + 1));
  }
  for (int v : valences) {
    if (v >= bond_sum) return v - bond_sum;
  }
  if (exceeds) *exceeds = true;
  return 0;
}

struct RawAtom {
  Atom atom;
  bool bracket = false;
  std::size_t offset = 0;
};

struct RawBond {
  int a = 0;
  int b = 0;
  std::optional<BondOrder> order;  // nullopt: implicit, resolved after ring perception
  std::size_t offset = 0;
};

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t atom_offset;
};

// Tarjan bridge finding, iterative. Returns per-bond "in a cycle" flags.
std::vector<bool> cycle_bonds(int n, std::span<const Bond> bonds) {
  std::vector<std::vector<Neighbor>> adj(static_cast<std::size_t>(n));
  for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
    adj[bonds[b].begin].push_back({bonds[b].end, b});
    adj[bonds[b].end].push_back({bonds[b].begin, b});
  }
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> in_cycle(bonds.size(), true);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.atom].size()) {
        const Neighbor nb = adj[f.atom][f.next++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[done.atom]);
          if (low[done.atom] > disc[parent]) in_cycle[done.parent_bond] = false;
        }
      }
    }
  }
  return in_cycle;
}

class SmilesReader {
 public:
  explicit SmilesReader(std::string_view text) : text_(text) {}

  ParseResult run() {
    ParseResult result;
    std::size_t begin = 0;
    while (begin < text_.size() && std::isspace(static_cast<unsigned char>(text_[begin]))) ++begin;
    std::size_t end = begin;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    if (begin == end) {
      result.error = ParseDiagnostic{ParseErrorKind::kEmptyInput, 0, "empty input"};
      return result;
    }
    pos_ = begin;
    end_ = end;
    if (!scan()) {
      result.error = std::move(error_);
      return result;
    }
    return finish();
  }

 private:
  bool fail(ParseErrorKind kind, std::size_t offset, std::string message) {
    if (offset >= text_.size()) offset = text_.empty() ? 0 : text_.size() - 1;
    error_ = ParseDiagnostic{kind, offset, std::move(message)};
    return false;
  }

  void warn(ParseWarningKind kind, std::size_t offset) { warnings_.push_back({kind, offset}); }

  bool add_bond(int a, int b, std::optional<BondOrder> order, std::size_t offset) {
    if (a == b) return fail(ParseErrorKind::kInvalidSyntax, offset, "ring closure bonds an atom to itself");
    for (const RawBond& rb : bonds_) {
      if ((rb.a == a && rb.b == b) || (rb.a == b && rb.b == a)) {
        return fail(ParseErrorKind::kInvalidSyntax, offset, "duplicate bond");
      }
    }
    bonds_.push_back({a, b, order, offset});
    return true;
  }

  bool scan() {
    int prev = -1;
    std::optional<BondOrder> pending;
    bool pending_set = false;
    std::size_t pending_offset = 0;
    std::vector<std::pair<int, std::size_t>> branches;

    while (pos_ < end_) {
      const char c = text_[pos_];
      const std::size_t at = pos_;
      if (c == '[' || std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
        RawAtom atom;
        atom.offset = at;
        if (c == '[') {
          if (!bracket_atom(atom)) return false;
        } else if (!organic_atom(atom)) {
          return false;
        }
        const int idx = static_cast<int>(atoms_.size());
        atoms_.push_back(atom);
        if (prev >= 0) {
          if (!add_bond(prev, idx, pending, pending_set ? pending_offset : at)) return false;
        } else if (pending_set) {
          return fail(ParseErrorKind::kInvalidSyntax, pending_offset, "bond without a preceding atom");
        }
        pending.reset();
        pending_set = false;
        prev = idx;
        continue;
      }
      switch (c) {
        case '(':
          if (prev < 0 || pending_set) return fail(ParseErrorKind::kInvalidSyntax, at, "misplaced branch");
          branches.emplace_back(prev, at);
          ++pos_;
          break;
        case ')':
          if (branches.empty()) return fail(ParseErrorKind::kUnclosedBranch, at, "unmatched ')'");
          if (pending_set) return fail(ParseErrorKind::kInvalidSyntax, at, "bond before ')'");
          prev = branches.back().first;
          branches.pop_back();
          ++pos_;
          break;
        case '-':
        case '=':
        case '#':
        case ':':
        case '/':
        case '\\':
          if (pending_set) return fail(ParseErrorKind::kInvalidSyntax, at, "consecutive bond symbols");
          if (c == '/' || c == '\\') warn(ParseWarningKind::kStereoIgnored, at);
          pending = c == '=' ? BondOrder::kDouble
                  : c == '#' ? BondOrder::kTriple
                  : c == ':' ? BondOrder::kAromatic
                             : BondOrder::kSingle;
          pending_set = true;
          pending_offset = at;
          ++pos_;
          break;
        case '.':
          if (prev < 0 || pending_set || !branches.empty()) {
            return fail(ParseErrorKind::kInvalidSyntax, at, "misplaced '.'");
          }
          prev = -1;
          ++pos_;
          break;
        case '%':
        case '0':
        case '1':
        case '2':
        case '3':
        case '4':
        case '5':
        case '6':
        case '7':
        case '8':
        case '9': {
          if (prev < 0) return fail(ParseErrorKind::kInvalidSyntax, at, "ring closure without an atom");
          int number = 0;
          if (c == '%') {
            if (pos_ + 2 >= end_) {
              return fail(ParseErrorKind::kInvalidSyntax, at, "truncated %nn ring closure");
            }
            const char d1 = text_[pos_ + 1];
            const char d2 = text_[pos_ + 2];
            if (!std::isdigit(static_cast<unsigned char>(d1)) || !std::isdigit(static_cast<unsigned char>(d2))) {
              return fail(ParseErrorKind::kInvalidSyntax, at, "malformed %nn ring closure");
            }
            number = (d1 - '0') * 10 + (d2 - '0');
            pos_ += 3;
          } else {
            number = c - '0';
            ++pos_;
          }
          auto it = rings_.find(number);
          if (it == rings_.end()) {
            rings_.emplace(number, RingOpen{prev, pending, atoms_[static_cast<std::size_t>(prev)].offset});
          } else {
            const RingOpen open = it->second;
            rings_.erase(it);
            std::optional<BondOrder> order = open.order;
            if (pending_set) {
              if (order && *order != *pending) {
                return fail(ParseErrorKind::kInvalidSyntax, at, "conflicting ring closure bond orders");
              }
              order = pending;
            }
            if (!add_bond(open.atom, prev, order, at)) return false;
          }
          pending.reset();
          pending_set = false;
          break;
        }
        default:
          return fail(ParseErrorKind::kInvalidSyntax, at, std::string("unexpected character '") + c + "'");
      }
    }
    if (pending_set) return fail(ParseErrorKind::kInvalidSyntax, pending_offset, "dangling bond");
    if (!branches.empty()) {
      return fail(ParseErrorKind::kUnclosedBranch, branches.back().second, "unclosed branch");
    }
    if (!rings_.empty()) {
      std::size_t offset = text_.size();
      for (const auto& [number, open] : rings_) offset = std::min(offset, open.atom_offset);
      return fail(ParseErrorKind::kUnbalancedRingClosure, offset, "unclosed ring bond");
    }
    return true;
  }

  bool organic_atom(RawAtom& out) {
    const char c = text_[pos_];
    if (c == '*') return fail(ParseErrorKind::kUnknownElement, pos_, "wildcard atoms are not supported");
    int z = 0;
    bool aromatic = false;
    std::size_t len = 1;
    if (c == 'C' && pos_ + 1 < end_ && text_[pos_ + 1] == 'l') {
      z = 17;
      len = 2;
    } else if (c == 'B' && pos_ + 1 < end_ && text_[pos_ + 1] == 'r') {
      z = 35;
      len = 2;
    } else {
      switch (c) {
        case 'B': z = 5; break;
        case 'C': z = 6; break;
        case 'N': z = 7; break;
        case 'O': z = 8; break;
        case 'P': z = 15; break;
        case 'S': z = 16; break;
        case 'F': z = 9; break;
        case 'I': z = 53; break;
        case 'b': z = 5; aromatic = true; break;
        case 'c': z = 6; aromatic = true; break;
        case 'n': z = 7; aromatic = true; break;
        case 'o': z = 8; aromatic = true; break;
        case 'p': z = 15; aromatic = true; break;
        case 's': z = 16; aromatic = true; break;
        default:
          return fail(ParseErrorKind::kUnknownElement, pos_,
                      std::string("'") + c + "' is not an organic-subset atom");
      }
    }
    out.atom.atomic_number = static_cast<std::uint8_t>(z);
    out.atom.aromatic = aromatic;
    out.bracket = false;
    pos_ += len;
    return true;
  }

  bool read_int(int& value, int limit) {
    value = 0;
    std::size_t start = pos_;
    while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > limit) return fail(ParseErrorKind::kInvalidSyntax, start, "number out of range");
      ++pos_;
    }
    return true;
  }

  bool bracket_atom(RawAtom& out) {
    const std::size_t open = pos_;
    ++pos_;
    out.bracket = true;
    // isotope
    if (pos_ < end_ && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int iso = 0;
      if (!read_int(iso, 999)) return false;
      warn(ParseWarningKind::kIsotopeIgnored, open);
    }
    if (pos_ >= end_) return fail(ParseErrorKind::kInvalidSyntax, open, "unterminated bracket atom");
    // element
    const std::size_t sym_at = pos_;
    int z = 0;
    bool aromatic = false;
    const char c0 = text_[pos_];
    const char c1 = pos_ + 1 < end_ ? text_[pos_ + 1] : '\0';
    if (std::isupper(static_cast<unsigned char>(c0))) {
      if (std::islower(static_cast<unsigned char>(c1))) {
        const std::string two{c0, c1};
        if (int z2 = atomic_number_of(two); z2 > 0) {
          z = z2;
          pos_ += 2;
        }
      }
      if (z == 0) {
        z = atomic_number_of(std::string_view(&text_[pos_], 1));
        if (z == 0) return fail(ParseErrorKind::kUnknownElement, sym_at, "unknown element");
        ++pos_;
      }
    } else if (std::islower(static_cast<unsigned char>(c0))) {
      aromatic = true;
      const std::string two{c0, c1};
      if (two == "se" || two == "as" || two == "te") {
        z = two == "se" ? 34 : two == "as" ? 33 : 52;
        pos_ += 2;
      } else {
        switch (c0) {
          case 'b': z = 5; break;
          case 'c': z = 6; break;
          case 'n': z = 7; break;
          case 'o': z = 8; break;
          case 'p': z = 15; break;
          case 's': z = 16; break;
          default: return fail(ParseErrorKind::kUnknownElement, sym_at, "unknown aromatic element");
        }
        ++pos_;
      }
    } else {
      return fail(ParseErrorKind::kUnknownElement, sym_at, "missing element symbol");
    }
    // chirality
    if (pos_ < end_ && text_[pos_] == '@') {
      warn(ParseWarningKind::kStereoIgnored, pos_);
      while (pos_ < end_ && text_[pos_] == '@') ++pos_;
      if (pos_ + 1 < end_) {
        const std::string_view tag = text_.substr(pos_, 2);
        if (tag == "TH" || tag == "AL" || tag == "SP" || tag == "TB" || tag == "OH") {
          pos_ += 2;
          int ignored = 0;
          if (!read_int(ignored, 99)) return false;
        }
      }
    }
    int hydrogens = 0;
    if (pos_ < end_ && text_[pos_] == 'H') {
      ++pos_;
      hydrogens = 1;
      if (pos_ < end_ && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        if (!read_int(hydrogens, 9)) return false;
      }
    }
    int charge = 0;
    if (pos_ < end_ && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      ++pos_;
      int magnitude = 1;
      if (pos_ < end_ && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        if (!read_int(magnitude, 15)) return false;
      } else {
        while (pos_ < end_ && text_[pos_] == sign && magnitude < 15) {
          ++magnitude;
          ++pos_;
        }
      }
      charge = sign == '+' ? magnitude : -magnitude;
    }
    if (pos_ < end_ && text_[pos_] == ':') {
      ++pos_;
      int atom_class = 0;
      if (!read_int(atom_class, 1 << 20)) return false;
    }
    if (pos_ >= end_ || text_[pos_] != ']') {
      return fail(ParseErrorKind::kInvalidSyntax, open, "unterminated bracket atom");
    }
    ++pos_;
    out.atom.atomic_number = static_cast<std::uint8_t>(z);
    out.atom.aromatic = aromatic;
    out.atom.hydrogens = hydrogens;
    out.atom.charge = charge;
    return true;
  }

  // Folds neutral explicit [H] atoms hanging off a heavy atom into its H count.
  void absorb_explicit_hydrogens() {
    const int n = static_cast<int>(atoms_.size());
    std::vector<int> degree(n, 0);
    for (const RawBond& b : bonds_) {
      ++degree[b.a];
      ++degree[b.b];
    }
    std::vector<bool> drop(n, false);
    for (const RawBond& b : bonds_) {
      for (auto [h, heavy] : {std::pair{b.a, b.b}, std::pair{b.b, b.a}}) {
        const Atom& ha = atoms_[h].atom;
        if (ha.atomic_number == 1 && ha.charge == 0 && ha.hydrogens == 0 && degree[h] == 1 &&
            atoms_[heavy].atom.atomic_number > 1 && (!b.order || *b.order == BondOrder::kSingle)) {
          drop[h] = true;
        }
      }
    }
    if (std::none_of(drop.begin(), drop.end(), [](bool d) { return d; })) return;
    std::vector<int> remap(n, -1);
    std::vector<RawAtom> kept;
    std::vector<int> extra_h;
    for (int i = 0; i < n; ++i) {
      if (drop[i]) continue;
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(atoms_[i]);
    }
    std::vector<RawBond> kept_bonds;
    for (const RawBond& b : bonds_) {
      if (drop[b.a] || drop[b.b]) {
        const int heavy = drop[b.a] ? b.b : b.a;
        RawAtom& target = kept[static_cast<std::size_t>(remap[heavy])];
        if (target.bracket) {
          ++target.atom.hydrogens;
        } else {
          // An unbracketed atom with an explicit H neighbor keeps exactly that H plus
          // whatever its valence still allows; treat it as bracketed from here on.
          target.bracket = true;
          hydrogen_bumps_.push_back(remap[heavy]);
          ++target.atom.hydrogens;
        }
        continue;
      }
      kept_bonds.push_back({remap[b.a], remap[b.b], b.order, b.offset});
    }
    atoms_ = std::move(kept);
    bonds_ = std::move(kept_bonds);
  }

  ParseResult finish() {
    ParseResult result;
    absorb_explicit_hydrogens();

    const int n = static_cast<int>(atoms_.size());
    if (std::none_of(atoms_.begin(), atoms_.end(),
                     [](const RawAtom& a) { return a.atom.atomic_number > 1; })) {
      result.error = ParseDiagnostic{ParseErrorKind::kEmptyInput, 0, "no heavy atoms"};
      return result;
    }

    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (const RawBond& rb : bonds_) bonds.push_back({rb.a, rb.b, rb.order.value_or(BondOrder::kSingle)});
    const std::vector<bool> ring = cycle_bonds(n, bonds);

    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const Atom& x = atoms_[bonds[b].begin].atom;
      const Atom& y = atoms_[bonds[b].end].atom;
      const bool both_aromatic = x.aromatic && y.aromatic;
      if (!bonds_[b].order) {
        bonds[b].order = both_aromatic && ring[b] ? BondOrder::kAromatic : BondOrder::kSingle;
      } else if (*bonds_[b].order == BondOrder::kAromatic && !both_aromatic) {
        warn(ParseWarningKind::kAromaticBondDemoted, bonds_[b].offset);
        bonds[b].order = BondOrder::kSingle;
      }
    }

    std::vector<int> bond_sum(n, 0);
    for (const Bond& b : bonds) {
      bond_sum[b.begin] += bond_valence(b.order);
      bond_sum[b.end] += bond_valence(b.order);
    }
    bool valence_warning = false;
    for (int i = 0; i < n; ++i) {
      RawAtom& ra = atoms_[i];
      const bool bumped = std::find(hydrogen_bumps_.begin(), hydrogen_bumps_.end(), i) != hydrogen_bumps_.end();
      if (!ra.bracket || bumped) {
        bool exceeds = false;
        const int explicit_h = ra.atom.hydrogens;
        ra.atom.hydrogens = explicit_h + implicit_hydrogens(ra.atom.atomic_number, ra.atom.aromatic,
                                                            bond_sum[i] + explicit_h, &exceeds);
        if (exceeds) {
          valence_warning = true;
          warn(ParseWarningKind::kValence, ra.offset);
        }
      }
    }

    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const RawAtom& ra : atoms_) atoms.push_back(ra.atom);
    aromatize_kekule_benzenoids(atoms, bonds, ring);

    for (int i = 0; i < n; ++i) {
      const Atom& a = atoms[i];
      const int limit = max_valence(a.atomic_number, a.charge);
      if (limit > 0 && bond_sum[i] + a.hydrogens > limit) {
        const bool already = std::any_of(warnings_.begin(), warnings_.end(), [&](const ParseWarning& w) {
          return w.kind == ParseWarningKind::kValence && w.offset == atoms_[i].offset;
        });
        if (!already) warn(ParseWarningKind::kValence, atoms_[i].offset);
        valence_warning = true;
      }
    }

    result.graph.emplace(std::move(atoms), std::move(bonds), valence_warning);
    result.warnings = std::move(warnings_);
    return result;
  }

  // Six-membered all-carbon rings in which every atom carries exactly one double
  // bond that lies on a ring (or is already aromatic) become aromatic.
  static void aromatize_kekule_benzenoids(std::vector<Atom>& atoms, std::vector<Bond>& bonds,
                                          const std::vector<bool>& ring) {
    const int n = static_cast<int>(atoms.size());
    std::vector<std::vector<Neighbor>> adj(n);
    bool any_double = false;
    for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
      if (!ring[b]) continue;
      adj[bonds[b].begin].push_back({bonds[b].end, b});
      adj[bonds[b].end].push_back({bonds[b].begin, b});
      any_double |= bonds[b].order == BondOrder::kDouble;
    }
    if (!any_double) return;

    auto eligible_atom = [&](int i) {
      const Atom& a = atoms[i];
      if (a.atomic_number != 6 || a.charge != 0) return false;
      if (a.aromatic) return true;
      int doubles = 0;
      bool ok = true;
      for (const Bond& b : bonds) {
        if (b.begin != i && b.end != i) continue;
        if (b.order == BondOrder::kTriple) ok = false;
        if (b.order == BondOrder::kDouble) ++doubles;
      }
      if (!ok || doubles != 1) return false;
      for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
        if ((bonds[b].begin == i || bonds[b].end == i) && bonds[b].order == BondOrder::kDouble) {
          return static_cast<bool>(ring[b]) && atoms[bonds[b].other(i)].atomic_number == 6;
        }
      }
      return false;
    };
    std::vector<bool> eligible(n);
    for (int i = 0; i < n; ++i) eligible[i] = eligible_atom(i);

    std::vector<std::array<int, 6>> rings;
    std::array<int, 6> path_bonds{};
    std::array<int, 6> path_atoms{};
    std::vector<bool> on_path(n, false);
    for (int start = 0; start < n; ++start) {
      if (!eligible[start]) continue;
      // Depth-first walk of length 6 back to start over atoms with larger index.
      auto walk = [&](auto&& self, int atom, int depth) -> void {
        for (const Neighbor& nb : adj[atom]) {
          if (depth == 5) {
            if (nb.atom == start && nb.bond != path_bonds[0]) {
              path_bonds[5] = nb.bond;
              std::array<int, 6> key = path_bonds;
              std::sort(key.begin(), key.end());
              const bool all_aromatic =
                  std::all_of(path_atoms.begin(), path_atoms.end(), [&](int a) { return atoms[a].aromatic; });
              if (!all_aromatic && (std::find(rings.begin(), rings.end(), key) == rings.end())) rings.push_back(key);
            }
            continue;
          }
          if (nb.atom <= start || on_path[nb.atom] || !eligible[nb.atom]) continue;
          on_path[nb.atom] = true;
          path_atoms[depth + 1] = nb.atom;
          path_bonds[depth] = nb.bond;
          self(self, nb.atom, depth + 1);
          on_path[nb.atom] = false;
        }
      };
      path_atoms[0] = start;
      on_path[start] = true;
      walk(walk, start, 0);
      on_path[start] = false;
    }
    for (const auto& ring_bonds : rings) {
      for (int b : ring_bonds) {
        atoms[bonds[b].begin].aromatic = true;
        atoms[bonds[b].end].aromatic = true;
      }
    }
    for (const auto& ring_bonds : rings) {
      for (int b : ring_bonds) bonds[b].order = BondOrder::kAromatic;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::vector<RawAtom> atoms_;
  std::vector<RawBond> bonds_;
  std::map<int, RingOpen> rings_;
  std::vector<ParseWarning> warnings_;
  std::vector<int> hydrogen_bumps_;
  ParseDiagnostic error_{};
};

int bond_code(BondOrder order) { return static_cast<int>(order); }

}  // namespace

// ---------------------------------------------------------------------------
// MolecularGraph

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds, bool valence_warning)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), valence_warning_(valence_warning) {
  const int n = static_cast<int>(atoms_.size());
  if (n == 0) throw std::invalid_argument("molecular graph has no atoms");
  if (std::none_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.atomic_number > 1; })) {
    throw std::invalid_argument("molecular graph has no heavy atoms");
  }
  std::vector<std::size_t> counts(n + 1, 0);
  for (const Bond& b : bonds_) {
    if (b.begin < 0 || b.end < 0 || b.begin >= n || b.end >= n) {
      throw std::invalid_argument("bond endpoint out of range");
    }
    if (b.begin == b.end) throw std::invalid_argument("self bond");
    if (b.order == BondOrder::kAromatic && !(atoms_[b.begin].aromatic && atoms_[b.end].aromatic)) {
      throw std::invalid_argument("aromatic bond on a non-aromatic atom");
    }
    ++counts[b.begin + 1];
    ++counts[b.end + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  adjacency_offsets_ = counts;
  adjacency_.assign(bonds_.size() * 2, Neighbor{0, 0});
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (int b = 0; b < static_cast<int>(bonds_.size()); ++b) {
    adjacency_[fill[bonds_[b].begin]++] = {bonds_[b].end, b};
    adjacency_[fill[bonds_[b].end]++] = {bonds_[b].begin, b};
  }
  for (int i = 0; i < n; ++i) {
    auto nb = neighbors(i);
    for (std::size_t x = 0; x < nb.size(); ++x) {
      for (std::size_t y = x + 1; y < nb.size(); ++y) {
        if (nb[x].atom == nb[y].atom) throw std::invalid_argument("duplicate bond");
      }
    }
  }

  bond_in_ring_ = cycle_bonds(n, bonds_);
  atom_in_ring_.assign(n, false);
  for (int b = 0; b < static_cast<int>(bonds_.size()); ++b) {
    if (bond_in_ring_[b]) {
      atom_in_ring_[bonds_[b].begin] = true;
      atom_in_ring_[bonds_[b].end] = true;
    }
  }

  fragment_.assign(n, -1);
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (fragment_[root] >= 0) continue;
    fragment_[root] = fragment_count_;
    stack.push_back(root);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : neighbors(u)) {
        if (fragment_[nb.atom] < 0) {
          fragment_[nb.atom] = fragment_count_;
          stack.push_back(nb.atom);
        }
      }
    }
    ++fragment_count_;
  }
}

std::span<const Neighbor> MolecularGraph::neighbors(int atom) const {
  const auto a = static_cast<std::size_t>(atom);
  return std::span<const Neighbor>(adjacency_).subspan(adjacency_offsets_[a],
                                                        adjacency_offsets_[a + 1] - adjacency_offsets_[a]);
}

// ---------------------------------------------------------------------------
// Parsing

ParseResult parse_smiles(std::string_view input) { return SmilesReader(input).run(); }

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kUnbalancedRingClosure: return "unbalanced ring closure";
    case ParseErrorKind::kUnclosedBranch: return "unclosed branch";
    case ParseErrorKind::kUnknownElement: return "unknown element";
    case ParseErrorKind::kValenceViolation: return "valence violation";
    case ParseErrorKind::kEmptyInput: return "empty input";
    case ParseErrorKind::kInvalidSyntax: return "invalid syntax";
  }
  return "unknown";
}

MolecularGraph parse_smiles_or_throw(std::string_view input) {
  ParseResult r = parse_smiles(input);
  if (!r) {
    throw std::invalid_argument(std::string(to_string(r.error->kind)) + " at offset " +
                                std::to_string(r.error->offset) + ": " + r.error->message);
  }
  return std::move(*r.graph);
}

// ---------------------------------------------------------------------------
// Canonical ranking

namespace {

int dense_rank(const std::vector<std::vector<long long>>& keys, std::vector<int>& ranks) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  int classes = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i]] != keys[order[i - 1]]) ++classes;
    ranks[order[i]] = classes;
  }
  return n == 0 ? 0 : classes + 1;
}

int refine(const MolecularGraph& g, std::vector<int>& ranks, int classes) {
  const int n = g.atom_count();
  std::vector<std::vector<long long>> keys(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      auto& key = keys[i];
      key.clear();
      key.push_back(ranks[i]);
      std::vector<long long> env;
      for (const Neighbor& nb : g.neighbors(i)) {
        env.push_back(static_cast<long long>(bond_code(g.bond(nb.bond).order)) * (n + 1) + ranks[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      key.insert(key.end(), env.begin(), env.end());
    }
    const int next = dense_rank(keys, ranks);
    if (next == classes) return classes;
    classes = next;
  }
}

}  // namespace

std::vector<int> canonical_ranks(const MolecularGraph& g) {
  const int n = g.atom_count();
  std::vector<std::vector<long long>> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = g.atom(i);
    keys[i] = {a.atomic_number, a.aromatic ? 1 : 0, a.charge, a.hydrogens, g.degree(i), g.atom_in_ring(i) ? 1 : 0};
  }
  std::vector<int> ranks(n);
  int classes = dense_rank(keys, ranks);
  classes = refine(g, ranks, classes);
  while (classes < n) {
    // Smallest tied class; promote its lowest-index member.
    std::vector<int> class_size(n, 0);
    for (int r : ranks) ++class_size[r];
    int tied = 0;
    while (class_size[tied] < 2) ++tied;
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] == tied) {
        chosen = i;
        break;
      }
    }
    for (int& r : ranks) r *= 2;
    ranks[chosen] -= 1;
    for (int i = 0; i < n; ++i) keys[i] = {ranks[i]};
    classes = dense_rank(keys, ranks);
    classes = refine(g, ranks, classes);
  }
  return ranks;
}

// ---------------------------------------------------------------------------
// Writing

namespace {

class SmilesWriter {
 public:
  SmilesWriter(const MolecularGraph& g, const std::vector<int>& ranks)
      : g_(g), ranks_(ranks), visited_(g.atom_count(), false), classified_(g.bond_count(), false),
        children_(g.atom_count()), ring_tokens_(g.atom_count()), digit_of_bond_(g.bond_count(), -1) {}

  std::string fragment(int start) {
    plan(start, -1);
    std::string out;
    emit(start, -1, out);
    return out;
  }

 private:
  struct RingToken {
    int partner;
    int bond;
    bool opening;
  };

  std::vector<Neighbor> sorted_neighbors(int u) const {
    auto nb = g_.neighbors(u);
    std::vector<Neighbor> out(nb.begin(), nb.end());
    std::sort(out.begin(), out.end(), [&](const Neighbor& a, const Neighbor& b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return out;
  }

  void plan(int u, int parent_bond) {
    visited_[u] = true;
    for (const Neighbor& nb : sorted_neighbors(u)) {
      if (nb.bond == parent_bond || classified_[nb.bond]) continue;
      classified_[nb.bond] = true;
      if (visited_[nb.atom]) {
        ring_tokens_[nb.atom].push_back({u, nb.bond, true});
        ring_tokens_[u].push_back({nb.atom, nb.bond, false});
      } else {
        children_[u].push_back(nb);
        plan(nb.atom, nb.bond);
      }
    }
  }

  std::string bond_symbol(int b) const {
    const Bond& bond = g_.bond(b);
    const bool both_aromatic = g_.atom(bond.begin).aromatic && g_.atom(bond.end).aromatic;
    switch (bond.order) {
      case BondOrder::kSingle: return both_aromatic ? "-" : "";
      case BondOrder::kDouble: return "=";
      case BondOrder::kTriple: return "#";
      case BondOrder::kAromatic: return g_.bond_in_ring(b) ? "" : ":";
    }
    return "";
  }

  std::string atom_symbol(int u) const {
    const Atom& a = g_.atom(u);
    std::string symbol(element_symbol(a.atomic_number));
    if (a.aromatic) {
      for (char& c : symbol) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (a.charge == 0 && organic_subset(a.atomic_number, a.aromatic)) {
      int sum = 0;
      for (const Neighbor& nb : g_.neighbors(u)) sum += bond_valence(g_.bond(nb.bond).order);
      if (implicit_hydrogens(a.atomic_number, a.aromatic, sum, nullptr) == a.hydrogens) return symbol;
    }
    std::string out = "[" + symbol;
    if (a.hydrogens > 0) {
      out += 'H';
      if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
    }
    if (a.charge != 0) {
      out += a.charge > 0 ? '+' : '-';
      if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
    }
    out += ']';
    return out;
  }

  static std::string digit_text(int d) {
    if (d < 10) return std::string(1, static_cast<char>('0' + d));
    return "%" + std::to_string(d);
  }

  void emit(int u, int in_bond, std::string& out) {
    if (in_bond >= 0) out += bond_symbol(in_bond);
    out += atom_symbol(u);

    auto tokens = ring_tokens_[u];
    std::sort(tokens.begin(), tokens.end(),
              [&](const RingToken& a, const RingToken& b) { return ranks_[a.partner] < ranks_[b.partner]; });
    std::vector<int> release;
    for (const RingToken& t : tokens) {
      if (t.opening) {
        int d = 1;
        while (d < 100 && (in_use_[d] || std::find(release.begin(), release.end(), d) != release.end())) ++d;
        if (d >= 100) throw std::runtime_error("too many simultaneous ring closures");
        in_use_[d] = true;
        digit_of_bond_[t.bond] = d;
        out += bond_symbol(t.bond);
        out += digit_text(d);
      } else {
        const int d = digit_of_bond_[t.bond];
        out += digit_text(d);
        release.push_back(d);
      }
    }
    for (int d : release) in_use_[d] = false;

    const auto& kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (k + 1 < kids.size()) {
        out += '(';
        emit(kids[k].atom, kids[k].bond, out);
        out += ')';
      } else {
        emit(kids[k].atom, kids[k].bond, out);
      }
    }
  }

  const MolecularGraph& g_;
  const std::vector<int>& ranks_;
  std::vector<bool> visited_;
  std::vector<bool> classified_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<RingToken>> ring_tokens_;
  std::vector<int> digit_of_bond_;
  std::array<bool, 100> in_use_{};
};

}  // namespace

std::string canonical_smiles(const MolecularGraph& g) {
  const std::vector<int> ranks = canonical_ranks(g);
  std::vector<int> start(g.fragment_count(), -1);
  for (int i = 0; i < g.atom_count(); ++i) {
    int& s = start[g.fragment_of(i)];
    if (s < 0 || ranks[i] < ranks[s]) s = i;
  }
  SmilesWriter writer(g, ranks);
  std::vector<std::string> parts;
  parts.reserve(start.size());
  for (int s : start) parts.push_back(writer.fragment(s));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += '.';
    out += parts[i];
  }
  return out;
}

MolecularGraph relabeled(const MolecularGraph& g, std::span<const int> order) {
  const int n = g.atom_count();
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<Atom> atoms(n);
  std::vector<bool> seen(n, false);
  for (int i = 0; i < n; ++i) {
    const int to = order[i];
    if (to < 0 || to >= n || seen[to]) throw std::invalid_argument("not a permutation");
    seen[to] = true;
    atoms[to] = g.atom(i);
  }
  std::vector<Bond> bonds;
  bonds.reserve(g.bond_count());
  for (const Bond& b : g.bonds()) bonds.push_back({order[b.begin], order[b.end], b.order});
  std::sort(bonds.begin(), bonds.end(), [](const Bond& x, const Bond& y) {
    return std::minmax(x.begin, x.end) < std::minmax(y.begin, y.end);
  });
  return MolecularGraph(std::move(atoms), std::move(bonds), g.valence_warning());
}

// ---------------------------------------------------------------------------
// Descriptors

int heavy_atom_count(const MolecularGraph& g) {
  return static_cast<int>(std::count_if(g.atoms().begin(), g.atoms().end(),
                                        [](const Atom& a) { return a.atomic_number > 1; }));
}

int ring_count(const MolecularGraph& g) { return g.bond_count() - g.atom_count() + g.fragment_count(); }

int rotatable_bond_count(const MolecularGraph& g) {
  auto heavy_degree = [&](int atom) {
    int d = 0;
    for (const Neighbor& nb : g.neighbors(atom)) d += g.atom(nb.atom).atomic_number > 1 ? 1 : 0;
    return d;
  };
  int count = 0;
  for (int b = 0; b < g.bond_count(); ++b) {
    const Bond& bond = g.bond(b);
    if (bond.order != BondOrder::kSingle || g.bond_in_ring(b)) continue;
    if (g.atom(bond.begin).atomic_number <= 1 || g.atom(bond.end).atomic_number <= 1) continue;
    if (heavy_degree(bond.begin) >= 2 && heavy_degree(bond.end) >= 2) ++count;
  }
  return count;
}

std::string_view element_symbol(int z) {
  if (z <= 0 || z >= static_cast<int>(kElements.size())) return "*";
  return kElements[static_cast<std::size_t>(z)];
}

int atomic_number_of(std::string_view symbol) {
  for (std::size_t z = 1; z < kElements.size(); ++z) {
    if (kElements[z] == symbol) return static_cast<int>(z);
  }
  return 0;
}

}  // namespace molreward
