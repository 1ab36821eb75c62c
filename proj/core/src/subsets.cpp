#include "locsdp/subsets.hpp"

#include <algorithm>
#include <unordered_set>

#include "locsdp/errors.hpp"

namespace locsdp {

Subset subset_of(const std::vector<int>& members) {
  Subset s = 0;
  for (int m : members) {
    if (m < 0 || m >= kMaxElements) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subset member " + std::to_string(m) + " out of range");
    }
    s |= singleton(m);
  }
  return s;
}

std::vector<int> subset_members(Subset s) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(subset_size(s)));
  while (s) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

std::string subset_to_string(Subset s) {
  std::string out = "{";
  bool first = true;
  for (int m : subset_members(s)) {
    if (!first) out += ",";
    out += std::to_string(m + 1);
    first = false;
  }
  return out + "}";
}

bool subset_less(Subset a, Subset b) {
  const int sa = subset_size(a), sb = subset_size(b);
  return sa != sb ? sa < sb : a < b;
}

void canonicalize(std::vector<Subset>& family) {
  std::sort(family.begin(), family.end(), subset_less);
  family.erase(std::unique(family.begin(), family.end()), family.end());
}

namespace {

// Calls fn(C) for every C subset of `pool` with |C| <= d.
template <class Fn>
void for_small_subsets(const std::vector<int>& pool, int d, Fn&& fn) {
  std::vector<int> pick;
  Subset current = 0;
  auto rec = [&](auto&& self, size_t start) -> void {
    fn(current);
    if (static_cast<int>(pick.size()) == d) return;
    for (size_t i = start; i < pool.size(); ++i) {
      pick.push_back(pool[i]);
      current |= singleton(pool[i]);
      self(self, i + 1);
      current &= ~singleton(pool[i]);
      pick.pop_back();
    }
  };
  rec(rec, 0);
}

void check_n(int n) {
  if (n < 0 || n > kMaxElements) {
    throw Error(ErrorCode::kInvalidArgument,
                "element count must be in [0, 64], got " + std::to_string(n));
  }
}

}  // namespace

std::vector<Subset> subsets_up_to(int n, int d) {
  check_n(n);
  std::vector<int> pool(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  std::vector<Subset> out;
  for_small_subsets(pool, d, [&](Subset c) { out.push_back(c); });
  canonicalize(out);
  return out;
}

std::vector<Subset> all_subsets_of(Subset s) {
  std::vector<Subset> out;
  Subset t = s;
  while (true) {
    out.push_back(t);
    if (t == 0) break;
    t = (t - 1) & s;
  }
  canonicalize(out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

std::uint64_t count_subsets_up_to(int n, int d) {
  std::uint64_t total = 0;
  for (int k = 0; k <= std::min(n, d); ++k) total += binomial(n, k);
  return total;
}

std::vector<Subset> pad_family(const std::vector<Subset>& family, int d,
                               int n) {
  check_n(n);
  std::unordered_set<Subset> seen;
  std::vector<Subset> out;
  for (Subset a : family) {
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) {
      if (!subset_contains(a, i)) pool.push_back(i);
    }
    for_small_subsets(pool, d, [&](Subset c) {
      if (seen.insert(a | c).second) out.push_back(a | c);
    });
  }
  canonicalize(out);
  return out;
}

std::vector<Subset> extend_index_family(const std::vector<Subset>& family,
                                        int d, int n) {
  if (family.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "index family must be nonempty");
  }
  std::unordered_set<Subset> unions_seen;
  std::vector<Subset> unions;
  for (size_t i = 0; i < family.size(); ++i) {
    for (size_t j = i; j < family.size(); ++j) {
      const Subset u = family[i] | family[j];
      if (unions_seen.insert(u).second) unions.push_back(u);
    }
  }
  return pad_family(unions, d, n);
}

SubsetIndexer::SubsetIndexer(std::vector<Subset> family)
    : family_(std::move(family)) {
  canonicalize(family_);
  position_.reserve(family_.size() * 2);
  for (size_t i = 0; i < family_.size(); ++i) {
    position_.emplace(family_[i], static_cast<int>(i));
  }
}

int SubsetIndexer::find(Subset s) const {
  const auto it = position_.find(s);
  return it == position_.end() ? -1 : it->second;
}

}  // namespace locsdp
