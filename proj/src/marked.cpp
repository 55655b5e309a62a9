#include "condensed/marked.hpp"

#include <sstream>
#include <unordered_map>

#include "condensed/error.hpp"

namespace condensed {

MarkedSpec::MarkedSpec(const Wreath& w, ForcedSubset& base, Element translate)
    : wreath_(&w), subset_(base, std::move(translate)) {
  if (!(base.ambient() == w.ambient()))
    throw UsageError("subset and wreath product use different ambient groups");
}

bool MarkedSpec::is_identity(const MarkedWord& w) {
  MarkedWord reduced = free_reduce(w);
  auto it = memo_.find(reduced.codes);
  if (it != memo_.end()) return it->second;
  bool identity = !wreath_->is_identity_generic(reduced, subset_).non_identity();
  memo_.emplace(std::move(reduced.codes), identity);
  return identity;
}

bool MarkedSpec::equal(const MarkedWord& u, const MarkedWord& v) {
  return is_identity(concat(u, inverse_word(v)));
}

std::string MarkedBall::dump() const {
  const int n = arity - 2;
  std::ostringstream out;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    out << i << ' ' << format_word(vertices[i], n) << '\n';
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t code = 0; code < edges[i].size(); ++code) {
      out << i << ' ' << format_letter(static_cast<int>(code), n) << ' ';
      if (edges[i][code] == kOut)
        out << "OUT";
      else
        out << edges[i][code];
      out << '\n';
    }
  return out.str();
}

MarkedBall build_ball(MarkedSpec& m, int r, std::size_t cap) {
  if (r < 0) throw UsageError("ball radius must be non-negative");
  const Wreath& W = m.wreath();
  const Ambient& H = W.ambient();
  const MarkedAlphabet alpha = W.alphabet();
  const int letters = alpha.letter_count();

  MarkedBall ball{r, m.arity(), {MarkedWord{}}, {}};
  std::vector<int> dist{0};
  std::vector<Element> tails{H.identity()};
  // equal elements have equal images in H, so candidates are bucketed by tail
  std::unordered_map<Element, std::vector<int>, ElementHash> by_tail{{H.identity(), {0}}};

  for (std::size_t v = 0; v < ball.vertices.size(); ++v) {
    std::vector<int> row(letters, MarkedBall::kOut);
    const int d = dist[v];
    for (int code = 0; code < letters; ++code) {
      MarkedWord w = ball.vertices[v];
      w.codes.push_back(code);
      Element tail = tails[v];
      if (alpha.is_ambient(code)) H.mul_letter(tail, code);

      int target = MarkedBall::kOut;
      auto& bucket = by_tail[tail];
      for (int c : bucket) {
        if (dist[c] < d - 1 || dist[c] > d + 1) continue;
        if (m.equal(w, ball.vertices[c])) {
          target = c;
          break;
        }
      }
      if (target == MarkedBall::kOut && d + 1 <= r) {
        if (ball.vertices.size() >= cap)
          throw CapacityError("marked ball exceeds " + std::to_string(cap) + " vertices");
        target = static_cast<int>(ball.vertices.size());
        ball.vertices.push_back(std::move(w));
        dist.push_back(d + 1);
        tails.push_back(tail);
        bucket.push_back(target);
      }
      row[code] = target;
    }
    ball.edges.push_back(std::move(row));
  }
  return ball;
}

bool r_similar(const MarkedBall& x, const MarkedBall& y) {
  if (x.radius != y.radius) throw UsageError("r_similar: balls have different radii");
  if (x.arity != y.arity) throw UsageError("r_similar: balls have different arities");
  return x.vertices == y.vertices && x.edges == y.edges;
}

std::optional<std::string> check_ball(const MarkedBall& b) {
  const int letters = 2 * b.arity;
  if (b.vertices.empty() || !b.vertices.front().empty()) return "base vertex is not the empty word";
  if (b.edges.size() != b.vertices.size()) return "edge table size mismatch";
  for (std::size_t v = 0; v < b.vertices.size(); ++v) {
    if (static_cast<int>(b.vertices[v].size()) > b.radius)
      return "vertex " + std::to_string(v) + " lies beyond the radius";
    if (v > 0 && !shortlex_less(b.vertices[v - 1], b.vertices[v]))
      return "vertices not in shortlex order at " + std::to_string(v);
    if (static_cast<int>(b.edges[v].size()) != letters)
      return "vertex " + std::to_string(v) + " lacks a target for some letter";
    for (int code = 0; code < letters; ++code) {
      int t = b.edges[v][code];
      if (t == MarkedBall::kOut) continue;
      if (t < 0 || t >= static_cast<int>(b.vertices.size()))
        return "edge target out of range at vertex " + std::to_string(v);
      int back = b.edges[t][code ^ 1];
      if (back != MarkedBall::kOut && back != static_cast<int>(v))
        return "inverse edge of letter " + std::to_string(code) + " from vertex " +
               std::to_string(v) + " does not return";
    }
  }
  // every non-base vertex is reached from its own prefix
  std::map<std::vector<int>, int> index;
  for (std::size_t v = 0; v < b.vertices.size(); ++v) index[b.vertices[v].codes] = static_cast<int>(v);
  for (std::size_t v = 1; v < b.vertices.size(); ++v) {
    std::vector<int> prefix(b.vertices[v].codes.begin(), b.vertices[v].codes.end() - 1);
    auto it = index.find(prefix);
    if (it == index.end() || b.edges[it->second][b.vertices[v].codes.back()] != static_cast<int>(v))
      return "vertex " + std::to_string(v) + " is not connected through its prefix";
  }
  return std::nullopt;
}

std::optional<MarkedWord> similarity_debug(MarkedSpec& x, MarkedSpec& y, int r) {
  if (r < 0) throw UsageError("radius must be non-negative");
  if (x.arity() != y.arity()) throw UsageError("similarity_debug: arity mismatch");
  std::optional<MarkedWord> found;
  for_each_reduced_word(2 * x.arity(), 2 * r + 1, [&](const MarkedWord& w) {
    if (x.is_identity(w) != y.is_identity(w)) {
      found = w;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace condensed
