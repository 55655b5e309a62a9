#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "condensed/wreath.hpp"

namespace condensed {

/**
 * The marked group (G_S, Y_S) for S = h·S_0, where S_0 is a forced subset.
 * Word-problem verdicts are memoized; they stay valid because pinning is
 * append-only.
 */
class MarkedSpec {
 public:
  MarkedSpec(const Wreath& w, ForcedSubset& base, Element translate);

  const Wreath& wreath() const { return *wreath_; }
  ForcedTranslate& subset() { return subset_; }
  const Element& translate() const { return subset_.translate(); }
  /// |Y| = n + 2.
  int arity() const { return wreath_->ambient().rank() + 2; }

  bool is_identity(const MarkedWord& w);
  bool equal(const MarkedWord& u, const MarkedWord& v);

 private:
  const Wreath* wreath_;
  ForcedTranslate subset_;
  std::map<std::vector<int>, bool> memo_;
};

/**
 * Radius-r ball of the Cayley graph of (G, Y), rooted at the identity.
 * Vertices carry their shortlex-least representative word and are stored in
 * shortlex order; edges[v][code] is the target vertex or kOut.
 */
struct MarkedBall {
  static constexpr int kOut = -1;

  int radius = 0;
  int arity = 0;
  std::vector<MarkedWord> vertices;
  std::vector<std::vector<int>> edges;

  /// `<index> <word>` per vertex, then `<src> <letter> <dst|OUT>` per edge.
  std::string dump() const;
  bool operator==(const MarkedBall&) const = default;
};

MarkedBall build_ball(MarkedSpec& m, int r, std::size_t cap = 1'000'000);

/// Throws UsageError on radius or arity mismatch.
bool r_similar(const MarkedBall& x, const MarkedBall& y);

/// Empty when the ball satisfies its structural invariants, else a reason.
std::optional<std::string> check_ball(const MarkedBall& b);

/**
 * Shortlex-first freely reduced word of length <= 2r+1 whose identity
 * verdicts differ between the two marked groups, if any.
 */
std::optional<MarkedWord> similarity_debug(MarkedSpec& x, MarkedSpec& y, int r);

/// Calls visit(word) for every freely reduced word of length <= max_length in shortlex
/// order until visit returns false.
template <class Visit>
void for_each_reduced_word(int letter_count, int max_length, Visit&& visit) {
  MarkedWord w;
  if (!visit(w)) return;
  for (int len = 1; len <= max_length; ++len) {
    w.codes.assign(len, 0);
    std::vector<int> next(len, 0);
    int depth = 0;
    while (depth >= 0) {
      if (next[depth] >= letter_count) {
        --depth;
        continue;
      }
      int c = next[depth]++;
      if (depth > 0 && c == (w.codes[depth - 1] ^ 1)) continue;
      w.codes[depth] = c;
      if (depth + 1 == len) {
        if (!visit(w)) return;
      } else {
        next[++depth] = 0;
      }
    }
  }
}

}  // namespace condensed
