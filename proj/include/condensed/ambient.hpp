#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace condensed {

enum class Backend : std::uint8_t { Free, Zd };

/**
 * An element of the ambient group H in canonical form.
 *
 * Free backend: `data` is a freely reduced sequence of letter codes, where
 * code 2i is x_{i+1} and 2i+1 is its inverse. Zd backend: `data` holds the
 * d coordinates. Two elements are equal iff their canonical forms agree.
 */
struct Element {
  Backend backend = Backend::Free;
  std::vector<std::int32_t> data;

  bool operator==(const Element&) const = default;
  // Storage order, used for ordered containers; not the shortlex order.
  auto operator<=>(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t h = static_cast<std::size_t>(e.backend) * 0x9e3779b97f4a7c15ULL;
    for (auto v : e.data) h = (h ^ static_cast<std::uint32_t>(v)) * 0x100000001b3ULL + (h >> 29);
    return h;
  }
};

/// Letter code helpers shared by ambient words and marked words.
constexpr int letter_inverse(int code) { return code ^ 1; }

/// Ball_H(radius) in shortlex order; front() is the identity.
struct BallSpec {
  int radius = 0;
  std::vector<Element> elements;
};

/**
 * The ambient group H with its fixed generating set X = (x_1, ..., x_n):
 * the free group free:k on k letters, or Z^d with the standard basis.
 *
 * The shortlex order is fixed globally by x1 < x1^-1 < x2 < x2^-1 < ...
 * applied to the shortlex-least geodesic word of each element.
 */
class Ambient {
 public:
  static Ambient free_group(int rank);
  static Ambient lattice(int dim);
  /// "free:k" (k >= 2) or "zd:d" (d >= 1).
  static Ambient parse(std::string_view spec);

  std::string spec() const;
  Backend backend() const { return backend_; }
  /// Number of generators n = |X|.
  int rank() const { return rank_; }

  Element identity() const;
  Element generator(int code) const;
  bool is_identity(const Element& e) const;

  Element mul(const Element& g, const Element& h) const;
  Element inv(const Element& g) const;
  /// g := g * x where x is the generator with letter code `code`.
  void mul_letter(Element& g, int code) const;

  /// |g|_X: letter count for free groups, l1 norm for Z^d.
  int length(const Element& g) const;

  /// The shortlex-least geodesic word of g, as letter codes.
  std::vector<int> normal_word(const Element& g) const;
  Element from_word(const std::vector<int>& codes) const;
  bool shortlex_less(const Element& g, const Element& h) const;
  void sort_shortlex(std::vector<Element>& v) const;

  /// Elements of length exactly n, shortlex sorted.
  std::vector<Element> sphere(int n, std::size_t cap) const;
  BallSpec ball(int n, std::size_t cap) const;
  /// |Ball_H(n)| without enumerating it.
  std::size_t ball_size(int n) const;

  /// Shortlex-least element of length n.
  Element first_of_length(int n) const;

  /// Text form: free "x1 x2^-1", zd "(m1,...,md)", identity "e".
  std::string format(const Element& g) const;
  Element parse_element(std::string_view text) const;

  /// Throws UsageError when g does not belong to this backend.
  void check(const Element& g) const;

  bool operator==(const Ambient&) const = default;

 private:
  Ambient(Backend b, int rank) : backend_(b), rank_(rank) {}
  Backend backend_;
  int rank_;
};

/**
 * Walks H \ {e} in shortlex order starting after a given element. Keeps the
 * current sphere cached for the Z^d backend, where successors are found by
 * position in the sorted sphere.
 */
class ShortlexWalker {
 public:
  ShortlexWalker(const Ambient& h, Element start);
  const Element& current() const { return current_; }
  const Element& next();
  /// Moves to the first element of length n if the walk is still shorter.
  void skip_to_length(int n);

 private:
  const Ambient& ambient_;
  Element current_;
  bool primed_ = false;  // current_ is the next answer, set by skip_to_length
  int sphere_length_ = -1;
  std::vector<Element> sphere_;
  std::size_t pos_ = 0;
};

}  // namespace condensed
