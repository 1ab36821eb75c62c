#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace locsdp {

// Subset of [n] as a bitmask; bit i stands for element i (0-based). n <= 64.
using Subset = std::uint64_t;

constexpr int kMaxElements = 64;

inline int subset_size(Subset s) { return std::popcount(s); }
inline bool subset_contains(Subset s, int i) { return (s >> i) & 1u; }
inline Subset singleton(int i) { return Subset{1} << i; }
inline bool is_subset_of(Subset a, Subset b) { return (a & ~b) == 0; }

Subset subset_of(const std::vector<int>& members);
std::vector<int> subset_members(Subset s);
// "{1,3}" with 1-based members, "{}" for the empty set.
std::string subset_to_string(Subset s);

// Canonical order: by size, then by bitmask value.
bool subset_less(Subset a, Subset b);
void canonicalize(std::vector<Subset>& family);

// All subsets of [n] with at most d elements, canonical order.
std::vector<Subset> subsets_up_to(int n, int d);
// All subsets of `s`, canonical order.
std::vector<Subset> all_subsets_of(Subset s);
std::uint64_t binomial(int n, int k);
std::uint64_t count_subsets_up_to(int n, int d);

// { A | B | C : A, B in family, |C| <= d, C subset of [n] }.
std::vector<Subset> extend_index_family(const std::vector<Subset>& family,
                                        int d, int n);
// { A | C : A in family, |C| <= d }. Rows of the base moment block.
std::vector<Subset> pad_family(const std::vector<Subset>& family, int d, int n);

// Position lookup for a canonical family.
class SubsetIndexer {
 public:
  SubsetIndexer() = default;
  explicit SubsetIndexer(std::vector<Subset> family);

  const std::vector<Subset>& family() const { return family_; }
  int size() const { return static_cast<int>(family_.size()); }
  // -1 when absent.
  int find(Subset s) const;
  bool contains(Subset s) const { return find(s) >= 0; }
  Subset at(int i) const { return family_[static_cast<size_t>(i)]; }

 private:
  std::vector<Subset> family_;
  std::unordered_map<Subset, int> position_;
};

}  // namespace locsdp
