#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace condensed {

/**
 * A finite group B given by its multiplication table, together with the two
 * marked elements a and b used to build the generators of G_S.
 *
 * Convention: mul[g][h] is the product "g then h" (row = left factor).
 * Elements are indices 0..order-1.
 */
struct FiniteGroupTable {
  static constexpr int kMaxOrder = 64;

  int order = 0;
  std::vector<std::vector<int>> mul;
  std::vector<int> inv;  // -1 where no inverse exists (invalid tables only)
  int id = 0;
  int gen_a = 0;
  int gen_b = 0;

  /// Builds a table from raw rows; `inv` is derived and left at -1 when the
  /// rows do not define an inverse. No validation happens here.
  static FiniteGroupTable from_rows(std::vector<std::vector<int>> rows, int id, int a, int b);

  /// Built-in presets: "s3", "d4", "q8".
  static FiniteGroupTable preset(std::string_view name);
  static std::vector<std::string> preset_names();

  /// Table file: `order k`, k rows of k indices, then `id i`, `a j`, `b l`.
  static FiniteGroupTable parse(std::istream& in);
  static FiniteGroupTable load(const std::string& path);
  std::string to_text() const;

  int operator()(int g, int h) const { return mul[g][h]; }
  int element_order(int g) const;

  bool operator==(const FiniteGroupTable&) const = default;
};

/// g^e; negative exponents go through the inverse table.
int fin_power(const FiniteGroupTable& t, int g, long long e);

/// First violated axiom of a FiniteGroupTable.
struct TableDefect {
  enum class Kind { Size, Range, Identity, Inverse, Associativity, Abelian, CommutingPair, Generator };
  Kind kind;
  std::string message;
  std::vector<int> witness;  // offending indices, e.g. the failing triple
};

std::optional<TableDefect> validate_table(const FiniteGroupTable& t);

}  // namespace condensed
