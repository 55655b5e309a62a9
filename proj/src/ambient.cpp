#include "condensed/ambient.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "condensed/error.hpp"

namespace condensed {

namespace {

// Per-coordinate rank realizing lexicographic order of Z^d normal words:
// long positive blocks first, then long negative blocks, zero last.
std::pair<int, int> coordinate_rank(std::int32_t v) {
  if (v > 0) return {0, -v};
  if (v < 0) return {1, v};
  return {2, 0};
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max()
                                                         : a + b;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a && b > std::numeric_limits<std::size_t>::max() / a)
    return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = saturating_mul(r, n - k + i) / i;
  return r;
}

// Parses a token "x<i>" or "x<i>^-1" into a letter code; returns -1 on failure.
int parse_generator_token(std::string_view tok, int rank) {
  if (tok.size() < 2 || tok[0] != 'x') return -1;
  bool inverse = false;
  if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
    inverse = true;
    tok.remove_suffix(3);
  }
  int index = 0;
  auto digits = tok.substr(1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return -1;
  if (index < 1 || index > rank) return -2;
  return 2 * (index - 1) + (inverse ? 1 : 0);
}

}  // namespace

Ambient Ambient::free_group(int rank) {
  if (rank < 2) throw UsageError("free backend needs rank >= 2");
  return Ambient(Backend::Free, rank);
}

Ambient Ambient::lattice(int dim) {
  if (dim < 1) throw UsageError("zd backend needs dimension >= 1");
  return Ambient(Backend::Zd, dim);
}

Ambient Ambient::parse(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ParseError("ambient spec must be free:k or zd:d", 0);
  auto kind = spec.substr(0, colon);
  auto num = spec.substr(colon + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (ec != std::errc() || ptr != num.data() + num.size())
    throw ParseError("ambient spec: bad number '" + std::string(num) + "'", colon + 2);
  if (kind == "free") return free_group(value);
  if (kind == "zd") return lattice(value);
  throw ParseError("ambient spec: unknown backend '" + std::string(kind) + "'", 1);
}

std::string Ambient::spec() const {
  return (backend_ == Backend::Free ? "free:" : "zd:") + std::to_string(rank_);
}

Element Ambient::identity() const {
  Element e{backend_, {}};
  if (backend_ == Backend::Zd) e.data.assign(rank_, 0);
  return e;
}

Element Ambient::generator(int code) const {
  Element e = identity();
  mul_letter(e, code);
  return e;
}

bool Ambient::is_identity(const Element& e) const {
  if (backend_ == Backend::Free) return e.data.empty();
  return std::all_of(e.data.begin(), e.data.end(), [](auto v) { return v == 0; });
}

void Ambient::mul_letter(Element& g, int code) const {
  if (code < 0 || code >= 2 * rank_)
    throw UsageError("letter code " + std::to_string(code) + " outside " + spec());
  if (backend_ == Backend::Free) {
    if (!g.data.empty() && g.data.back() == letter_inverse(code))
      g.data.pop_back();
    else
      g.data.push_back(code);
  } else {
    g.data[code / 2] += (code & 1) ? -1 : 1;
  }
}

Element Ambient::mul(const Element& g, const Element& h) const {
  if (g.backend != backend_ || h.backend != backend_)
    throw UsageError("element belongs to a different backend than " + spec());
  if (backend_ == Backend::Zd) {
    if (g.data.size() != h.data.size() || g.data.size() != static_cast<std::size_t>(rank_))
      throw UsageError("element has wrong dimension for " + spec());
    Element r = g;
    for (int i = 0; i < rank_; ++i) r.data[i] += h.data[i];
    return r;
  }
  // cancel the longest suffix of g against the prefix of h
  std::size_t k = 0;
  while (k < g.data.size() && k < h.data.size() &&
         g.data[g.data.size() - 1 - k] == letter_inverse(h.data[k]))
    ++k;
  Element r{Backend::Free, {}};
  r.data.reserve(g.data.size() + h.data.size() - 2 * k);
  r.data.insert(r.data.end(), g.data.begin(), g.data.end() - k);
  r.data.insert(r.data.end(), h.data.begin() + k, h.data.end());
  return r;
}

Element Ambient::inv(const Element& g) const {
  Element r = g;
  if (backend_ == Backend::Free) {
    std::reverse(r.data.begin(), r.data.end());
    for (auto& c : r.data) c = letter_inverse(c);
  } else {
    for (auto& v : r.data) v = -v;
  }
  return r;
}

int Ambient::length(const Element& g) const {
  if (backend_ == Backend::Free) return static_cast<int>(g.data.size());
  int n = 0;
  for (auto v : g.data) n += std::abs(v);
  return n;
}

std::vector<int> Ambient::normal_word(const Element& g) const {
  if (backend_ == Backend::Free) return {g.data.begin(), g.data.end()};
  std::vector<int> word;
  for (int i = 0; i < rank_; ++i) {
    int v = g.data[i];
    word.insert(word.end(), static_cast<std::size_t>(std::abs(v)), 2 * i + (v < 0 ? 1 : 0));
  }
  return word;
}

Element Ambient::from_word(const std::vector<int>& codes) const {
  Element e = identity();
  for (int c : codes) mul_letter(e, c);
  return e;
}

bool Ambient::shortlex_less(const Element& g, const Element& h) const {
  int lg = length(g), lh = length(h);
  if (lg != lh) return lg < lh;
  if (backend_ == Backend::Free) return g.data < h.data;
  for (int i = 0; i < rank_; ++i) {
    auto rg = coordinate_rank(g.data[i]), rh = coordinate_rank(h.data[i]);
    if (rg != rh) return rg < rh;
  }
  return false;
}

void Ambient::sort_shortlex(std::vector<Element>& v) const {
  std::sort(v.begin(), v.end(), [this](const Element& a, const Element& b) {
    return shortlex_less(a, b);
  });
}

std::size_t Ambient::ball_size(int n) const {
  if (n < 0) return 0;
  if (backend_ == Backend::Free) {
    std::size_t total = 1, sphere = 2 * static_cast<std::size_t>(rank_);
    for (int len = 1; len <= n; ++len) {
      total = saturating_add(total, sphere);
      sphere = saturating_mul(sphere, 2 * static_cast<std::size_t>(rank_) - 1);
    }
    return total;
  }
  // points of Z^d with l1 norm <= n: sum_i 2^i C(d,i) C(n,i)
  std::size_t total = 0;
  for (int i = 0; i <= rank_; ++i)
    total = saturating_add(total, saturating_mul(saturating_mul(std::size_t{1} << std::min(i, 62),
                                                                binomial(rank_, i)),
                                                 binomial(n, i)));
  return total;
}

std::vector<Element> Ambient::sphere(int n, std::size_t cap) const {
  if (n < 0) throw UsageError("radius must be non-negative");
  std::vector<Element> out;
  if (n == 0) {
    out.push_back(identity());
    return out;
  }
  if (ball_size(n) - ball_size(n - 1) > cap)
    throw CapacityError("sphere of radius " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  if (backend_ == Backend::Free) {
    // lexicographic DFS over reduced words yields shortlex order directly
    std::vector<std::int32_t> word(n, 0);
    std::vector<int> next(n, 0);
    int depth = 0;
    while (depth >= 0) {
      if (next[depth] >= 2 * rank_) {
        next[depth] = 0;
        --depth;
        continue;
      }
      int c = next[depth]++;
      if (depth > 0 && c == letter_inverse(word[depth - 1])) continue;
      word[depth] = c;
      if (depth + 1 == n) {
        out.push_back(Element{Backend::Free, word});
      } else {
        ++depth;
        next[depth] = 0;
      }
    }
    return out;
  }
  // compositions of n into d signed parts
  Element cur = identity();
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == rank_ - 1) {
      cur.data[i] = remaining;
      out.push_back(cur);
      if (remaining) {
        cur.data[i] = -remaining;
        out.push_back(cur);
      }
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur.data[i] = v;
      self(self, i + 1, remaining - v);
      if (v) {
        cur.data[i] = -v;
        self(self, i + 1, remaining - v);
      }
    }
  };
  rec(rec, 0, n);
  sort_shortlex(out);
  return out;
}

BallSpec Ambient::ball(int n, std::size_t cap) const {
  if (n < 0) throw UsageError("radius must be non-negative");
  if (ball_size(n) > cap)
    throw CapacityError("Ball(" + std::to_string(n) + ") has " + std::to_string(ball_size(n)) +
                        " elements, cap is " + std::to_string(cap));
  BallSpec b{n, {}};
  b.elements.reserve(ball_size(n));
  for (int len = 0; len <= n; ++len) {
    auto s = sphere(len, cap);
    std::move(s.begin(), s.end(), std::back_inserter(b.elements));
  }
  return b;
}

Element Ambient::first_of_length(int n) const {
  Element e = identity();
  if (backend_ == Backend::Free)
    e.data.assign(n, 0);
  else
    e.data[0] = n;
  return e;
}

std::string Ambient::format(const Element& g) const {
  if (is_identity(g)) return "e";
  std::string out;
  if (backend_ == Backend::Free) {
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      if (i) out += ' ';
      out += 'x';
      out += std::to_string(g.data[i] / 2 + 1);
      if (g.data[i] & 1) out += "^-1";
    }
    return out;
  }
  out = "(";
  for (int i = 0; i < rank_; ++i) {
    if (i) out += ',';
    out += std::to_string(g.data[i]);
  }
  return out + ")";
}

Element Ambient::parse_element(std::string_view text) const {
  auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) throw ParseError("empty element", 0);
  auto last = text.find_last_not_of(" \t");
  auto body = text.substr(first, last - first + 1);
  if (body == "e") return identity();

  if (backend_ == Backend::Zd && body.front() == '(') {
    if (body.back() != ')') throw ParseError("missing ')'", first + body.size());
    Element e = identity();
    std::size_t pos = 1;
    for (int i = 0; i < rank_; ++i) {
      auto end = body.find_first_of(",)", pos);
      if (end == std::string_view::npos) throw ParseError("too few coordinates", first + pos + 1);
      auto field = body.substr(pos, end - pos);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      int v = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("bad coordinate '" + std::string(field) + "'", first + pos + 1);
      e.data[i] = v;
      bool closing = body[end] == ')';
      pos = end + 1;
      if (closing != (i == rank_ - 1))
        throw ParseError("expected " + std::to_string(rank_) + " coordinates", first + end + 1);
    }
    if (pos != body.size()) throw ParseError("trailing characters", first + pos + 1);
    return e;
  }

  Element e = identity();
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto end = body.find(' ', pos);
    if (end == std::string_view::npos) end = body.size();
    auto tok = body.substr(pos, end - pos);
    if (!tok.empty()) {
      int code = parse_generator_token(tok, rank_);
      if (code == -2) throw ParseError("generator index out of range in '" + std::string(tok) + "'",
                                       first + pos + 1);
      if (code < 0) throw ParseError("unknown token '" + std::string(tok) + "'", first + pos + 1);
      mul_letter(e, code);
    }
    pos = end + 1;
  }
  return e;
}

void Ambient::check(const Element& g) const {
  if (g.backend != backend_) throw UsageError("element belongs to a different backend than " + spec());
  if (backend_ == Backend::Zd) {
    if (g.data.size() != static_cast<std::size_t>(rank_))
      throw UsageError("element has wrong dimension for " + spec());
    return;
  }
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (g.data[i] < 0 || g.data[i] >= 2 * rank_)
      throw UsageError("letter outside " + spec());
    if (i && g.data[i] == letter_inverse(g.data[i - 1]))
      throw UsageError("element is not freely reduced");
  }
}

ShortlexWalker::ShortlexWalker(const Ambient& h, Element start)
    : ambient_(h), current_(std::move(start)) {}

void ShortlexWalker::skip_to_length(int n) {
  if (ambient_.length(current_) >= n) return;
  current_ = ambient_.first_of_length(n);
  primed_ = true;
}

const Element& ShortlexWalker::next() {
  if (primed_) {
    primed_ = false;
    return current_;
  }
  const int len = ambient_.length(current_);
  if (len == 0) {
    current_ = ambient_.first_of_length(1);
    return current_;
  }
  if (ambient_.backend() == Backend::Free) {
    // odometer over reduced words of fixed length
    auto& w = current_.data;
    const int letters = 2 * ambient_.rank();
    for (int i = len - 1; i >= 0; --i) {
      for (int c = w[i] + 1; c < letters; ++c) {
        if (i > 0 && c == letter_inverse(w[i - 1])) continue;
        w[i] = c;
        for (int j = i + 1; j < len; ++j) w[j] = (w[j - 1] == 1) ? 1 : 0;
        return current_;
      }
    }
    current_ = ambient_.first_of_length(len + 1);
    return current_;
  }
  if (sphere_length_ != len || pos_ >= sphere_.size() || sphere_[pos_] != current_) {
    sphere_ = ambient_.sphere(len, std::numeric_limits<std::size_t>::max());
    sphere_length_ = len;
    pos_ = static_cast<std::size_t>(
        std::lower_bound(sphere_.begin(), sphere_.end(), current_,
                         [this](const Element& a, const Element& b) {
                           return ambient_.shortlex_less(a, b);
                         }) -
        sphere_.begin());
  }
  if (pos_ + 1 < sphere_.size()) {
    current_ = sphere_[++pos_];
  } else {
    current_ = ambient_.first_of_length(len + 1);
  }
  return current_;
}

}  // namespace condensed
