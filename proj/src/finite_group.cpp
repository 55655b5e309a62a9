#include "condensed/finite_group.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "condensed/error.hpp"

namespace condensed {

namespace {

using Perm = std::vector<int>;

// "p then q": first apply p, then q.
Perm compose(const Perm& p, const Perm& q) {
  Perm r(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) r[x] = q[p[x]];
  return r;
}

FiniteGroupTable permutation_group(const std::vector<Perm>& gens, const Perm& a, const Perm& b) {
  const std::size_t degree = gens.front().size();
  Perm identity(degree);
  for (std::size_t i = 0; i < degree; ++i) identity[i] = static_cast<int>(i);

  std::set<Perm> seen{identity};
  std::vector<Perm> frontier{identity};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& p : frontier)
      for (const auto& g : gens) {
        Perm q = compose(p, g);
        if (seen.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
  }

  std::vector<Perm> elements(seen.begin(), seen.end());
  std::map<Perm, int> index;
  for (std::size_t i = 0; i < elements.size(); ++i) index[elements[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> rows(elements.size(), std::vector<int>(elements.size()));
  for (std::size_t g = 0; g < elements.size(); ++g)
    for (std::size_t h = 0; h < elements.size(); ++h)
      rows[g][h] = index.at(compose(elements[g], elements[h]));
  return FiniteGroupTable::from_rows(std::move(rows), index.at(identity), index.at(a), index.at(b));
}

// Quaternion group, elements ordered 1, -1, i, -i, j, -j, k, -k.
FiniteGroupTable quaternion_group() {
  // unit product table over {1, i, j, k}: sign and unit
  constexpr std::array<std::array<std::pair<int, int>, 4>, 4> units{{
      {{{1, 0}, {1, 1}, {1, 2}, {1, 3}}},
      {{{1, 1}, {-1, 0}, {1, 3}, {-1, 2}}},
      {{{1, 2}, {-1, 3}, {-1, 0}, {1, 1}}},
      {{{1, 3}, {1, 2}, {-1, 1}, {-1, 0}}},
  }};
  auto encode = [](int sign, int unit) { return 2 * unit + (sign < 0 ? 1 : 0); };
  std::vector<std::vector<int>> rows(8, std::vector<int>(8));
  for (int g = 0; g < 8; ++g)
    for (int h = 0; h < 8; ++h) {
      int sign = ((g & 1) ? -1 : 1) * ((h & 1) ? -1 : 1);
      auto [s, u] = units[g / 2][h / 2];
      rows[g][h] = encode(sign * s, u);
    }
  return FiniteGroupTable::from_rows(std::move(rows), 0, encode(1, 1), encode(1, 2));
}

std::string expect_keyword(std::istream& in, const char* keyword) {
  std::string word;
  if (!(in >> word) || word != keyword)
    throw ParseError(std::string("table file: expected '") + keyword + "'", 0);
  return word;
}

int read_int(std::istream& in, const char* what) {
  long long v;
  if (!(in >> v)) throw ParseError(std::string("table file: expected integer for ") + what, 0);
  return static_cast<int>(v);
}

}  // namespace

FiniteGroupTable FiniteGroupTable::from_rows(std::vector<std::vector<int>> rows, int id, int a, int b) {
  FiniteGroupTable t;
  t.order = static_cast<int>(rows.size());
  t.mul = std::move(rows);
  t.id = id;
  t.gen_a = a;
  t.gen_b = b;
  t.inv.assign(t.order, -1);
  auto in_range = [&](int x) { return x >= 0 && x < t.order; };
  for (int g = 0; g < t.order; ++g) {
    if (t.mul[g].size() != static_cast<std::size_t>(t.order)) continue;
    for (int h = 0; h < t.order; ++h) {
      if (t.mul[h].size() != static_cast<std::size_t>(t.order)) continue;
      if (t.mul[g][h] == id && t.mul[h][g] == id && in_range(id)) {
        t.inv[g] = h;
        break;
      }
    }
  }
  return t;
}

FiniteGroupTable FiniteGroupTable::preset(std::string_view name) {
  if (name == "s3") {
    // a = (1 2), b = (2 3) acting on {1,2,3}
    return permutation_group({{1, 0, 2}, {0, 2, 1}}, {1, 0, 2}, {0, 2, 1});
  }
  if (name == "d4") {
    // a = quarter rotation of the square, b = reflection fixing vertex 0
    return permutation_group({{1, 2, 3, 0}, {0, 3, 2, 1}}, {1, 2, 3, 0}, {0, 3, 2, 1});
  }
  if (name == "q8") return quaternion_group();
  throw UsageError("unknown table preset '" + std::string(name) + "'");
}

std::vector<std::string> FiniteGroupTable::preset_names() { return {"s3", "d4", "q8"}; }

FiniteGroupTable FiniteGroupTable::parse(std::istream& in) {
  expect_keyword(in, "order");
  int k = read_int(in, "order");
  if (k <= 0 || k > kMaxOrder)
    throw ParseError("table file: order must be in 1.." + std::to_string(kMaxOrder), 0);
  std::vector<std::vector<int>> rows(k, std::vector<int>(k));
  for (int g = 0; g < k; ++g)
    for (int h = 0; h < k; ++h) rows[g][h] = read_int(in, "table entry");
  expect_keyword(in, "id");
  int id = read_int(in, "id");
  expect_keyword(in, "a");
  int a = read_int(in, "a");
  expect_keyword(in, "b");
  int b = read_int(in, "b");
  return from_rows(std::move(rows), id, a, b);
}

FiniteGroupTable FiniteGroupTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open table file '" + path + "'");
  return parse(in);
}

std::string FiniteGroupTable::to_text() const {
  std::ostringstream out;
  out << "order " << order << "\n";
  for (const auto& row : mul) {
    for (std::size_t h = 0; h < row.size(); ++h) out << (h ? " " : "") << row[h];
    out << "\n";
  }
  out << "id " << id << "\na " << gen_a << "\nb " << gen_b << "\n";
  return out.str();
}

int FiniteGroupTable::element_order(int g) const {
  int x = g;
  for (int n = 1; n <= order; ++n) {
    if (x == id) return n;
    x = mul[x][g];
  }
  return 0;
}

int fin_power(const FiniteGroupTable& t, int g, long long e) {
  int base = e < 0 ? t.inv[g] : g;
  unsigned long long n = e < 0 ? -static_cast<unsigned long long>(e) : static_cast<unsigned long long>(e);
  int result = t.id;
  while (n) {
    if (n & 1) result = t.mul[result][base];
    base = t.mul[base][base];
    n >>= 1;
  }
  return result;
}

std::optional<TableDefect> validate_table(const FiniteGroupTable& t) {
  using K = TableDefect::Kind;
  const int n = t.order;
  if (n <= 0 || n > FiniteGroupTable::kMaxOrder)
    return TableDefect{K::Size, "order " + std::to_string(n) + " outside 1.." +
                                    std::to_string(FiniteGroupTable::kMaxOrder), {}};
  if (t.mul.size() != static_cast<std::size_t>(n))
    return TableDefect{K::Size, "table has " + std::to_string(t.mul.size()) + " rows", {}};
  for (int g = 0; g < n; ++g) {
    if (t.mul[g].size() != static_cast<std::size_t>(n))
      return TableDefect{K::Size, "row " + std::to_string(g) + " has wrong length", {g}};
    for (int h = 0; h < n; ++h)
      if (t.mul[g][h] < 0 || t.mul[g][h] >= n)
        return TableDefect{K::Range, "entry out of range at (" + std::to_string(g) + "," +
                                         std::to_string(h) + ")", {g, h}};
  }
  auto in_range = [n](int x) { return x >= 0 && x < n; };
  if (!in_range(t.id)) return TableDefect{K::Identity, "identity index out of range", {t.id}};
  for (int g = 0; g < n; ++g)
    if (t.mul[t.id][g] != g || t.mul[g][t.id] != g)
      return TableDefect{K::Identity, "id is not a two-sided identity at " + std::to_string(g),
                         {g}};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (t.mul[t.mul[x][y]][z] != t.mul[x][t.mul[y][z]])
          return TableDefect{K::Associativity,
                             "associativity fails on (" + std::to_string(x) + "," +
                                 std::to_string(y) + "," + std::to_string(z) + ")",
                             {x, y, z}};
  if (t.inv.size() != static_cast<std::size_t>(n))
    return TableDefect{K::Inverse, "inverse table has wrong size", {}};
  for (int g = 0; g < n; ++g) {
    int i = t.inv[g];
    if (!in_range(i) || t.mul[g][i] != t.id || t.mul[i][g] != t.id)
      return TableDefect{K::Inverse, "no two-sided inverse for " + std::to_string(g), {g}};
  }
  if (!in_range(t.gen_a) || !in_range(t.gen_b))
    return TableDefect{K::Generator, "a or b out of range", {t.gen_a, t.gen_b}};
  bool abelian = true;
  for (int g = 0; g < n && abelian; ++g)
    for (int h = 0; h < n; ++h)
      if (t.mul[g][h] != t.mul[h][g]) {
        abelian = false;
        break;
      }
  if (abelian) return TableDefect{K::Abelian, "abelian group: no non-commuting pair exists", {}};
  if (t.mul[t.gen_a][t.gen_b] == t.mul[t.gen_b][t.gen_a])
    return TableDefect{K::CommutingPair,
                       "a=" + std::to_string(t.gen_a) + " and b=" + std::to_string(t.gen_b) +
                           " commute",
                       {t.gen_a, t.gen_b}};
  return std::nullopt;
}

}  // namespace condensed
