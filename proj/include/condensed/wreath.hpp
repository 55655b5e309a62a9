#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "condensed/ambient.hpp"
#include "condensed/finite_group.hpp"
#include "condensed/forcing.hpp"

namespace condensed {

/**
 * A word over Y^{±1} = (x_1, ..., x_n, ā, b̄)^{±1}.
 *
 * Letter code 2g + (inverse ? 1 : 0) with g < n for x_{g+1}, g = n for ā and
 * g = n + 1 for b̄, so code order is the global shortlex letter order and
 * ambient letters share their codes with Ambient.
 */
struct MarkedWord {
  std::vector<int> codes;

  std::size_t size() const { return codes.size(); }
  bool empty() const { return codes.empty(); }
  bool operator==(const MarkedWord&) const = default;
  auto operator<=>(const MarkedWord&) const = default;
};

/// Alphabet arity helpers for Y with n ambient generators.
struct MarkedAlphabet {
  int n;
  int a_gen() const { return n; }
  int b_gen() const { return n + 1; }
  int letter_count() const { return 2 * (n + 2); }
  bool is_ambient(int code) const { return code / 2 < n; }
};

/// Tokens `x<i>`, `a`, `b`, each optionally `^-1`; the empty word is `e`.
MarkedWord parse_word(std::string_view text, int n);
std::string format_word(const MarkedWord& w, int n);
std::string format_letter(int code, int n);

MarkedWord inverse_word(const MarkedWord& w);
MarkedWord concat(const MarkedWord& u, const MarkedWord& v);
MarkedWord free_reduce(const MarkedWord& w);
bool shortlex_less(const MarkedWord& u, const MarkedWord& v);
/// The normal word of an ambient element, spelled in Y.
MarkedWord spell(const Ambient& h, const Element& g);

enum class FactorGen { A, B };

/// One conjugated generator power c·g^exp·c⁻¹.
struct Factor {
  Element conj;
  FactorGen gen;
  int exp;
  bool operator==(const Factor&) const = default;
};

/// w = (∏ c_j g_j^{exp_j} c_j⁻¹) · tail in the free group on Y.
struct CollectedForm {
  std::vector<Factor> factors;
  Element tail;
};

/// B-factors grouped by equal conjugator, with exponent sums.
struct FactorClass {
  Element conj;
  std::vector<std::size_t> members;  // indices into CollectedForm::factors
  long long sigma = 0;
};

struct ClassPartition {
  std::vector<FactorClass> classes;  // in order of first appearance
};

ClassPartition partition_b_factors(const CollectedForm& cf);

enum class VerdictKind { Identity, IdentityUpToWindow, NonIdentity };

/// Word-problem answer. A NonIdentity verdict either has a point h with
/// w(h) ≠ 1 or, when `point` is empty, a nontrivial image `tail` in H.
struct Verdict {
  VerdictKind kind;
  std::optional<Element> point;
  Element tail;

  bool non_identity() const { return kind == VerdictKind::NonIdentity; }
};

/// A function H → B known on Ball(radius), plus an ambient part.
struct WindowElement {
  int radius = 0;
  std::unordered_map<Element, int, ElementHash> values;  // absent = undetermined
  Element tail;
};

/**
 * The unrestricted wreath product W = B Wr H restricted to the subgroup
 * generated by X, ā and b̄_S, where ā is a at the identity and b̄_S is b on S.
 */
class Wreath {
 public:
  Wreath(Ambient h, FiniteGroupTable b);

  const Ambient& ambient() const { return h_; }
  const FiniteGroupTable& table() const { return b_; }
  MarkedAlphabet alphabet() const { return {h_.rank()}; }

  CollectedForm collect(const MarkedWord& w) const;

  /// Value of the B^H part of cf at h, multiplied left to right.
  int evaluate_at(const CollectedForm& cf, MembershipOracle& s, const Element& h) const;

  /**
   * Exact word problem for a forced subset (or a translate of one). Identity
   * iff the tail is trivial, every ā-conjugator point evaluates to 1 and
   * b^σ = 1 for every class of equal-conjugator b̄-factors. A violated class
   * sum is witnessed by a realized point isolating that class.
   */
  Verdict is_identity_generic(const MarkedWord& w, ForcedTranslate& s) const;

  /// Brute-force evaluation over Ball(R). NonIdentity is conclusive.
  Verdict is_identity_window(const MarkedWord& w, MembershipOracle& s, int radius,
                             std::size_t cap = 4'000'000) const;

  bool elements_equal(const MarkedWord& u, const MarkedWord& v, ForcedTranslate& s) const;

  WindowElement window_identity(int radius) const;
  WindowElement window_of_word(const MarkedWord& w, MembershipOracle& s, int radius) const;
  /// acc · letter, evaluating the letter's function wherever needed.
  void window_times_letter(WindowElement& acc, int code, MembershipOracle& s) const;
  /// Pointwise product x·y; points where y is needed outside its window are dropped.
  WindowElement window_mul(const WindowElement& x, const WindowElement& y) const;
  WindowElement window_of_ambient(const Element& g, int radius) const;

 private:
  Ambient h_;
  FiniteGroupTable b_;
};

}  // namespace condensed
