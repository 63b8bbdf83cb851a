#pragma once

// Hoare partition (the Cormen-Leiserson-Rivest "repeat j-- / repeat i++"
// version) and Quickselect, instrumented to count key exchanges.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selectlab/errors.hpp"
#include "selectlab/rng.hpp"

namespace selectlab {

/// Nonempty sequence of pairwise distinct keys. Positions are 1-based in
/// every public call that takes an index.
template <typename Key, typename Less = std::less<Key>>
class KeyArray {
 public:
  explicit KeyArray(std::vector<Key> items, Less less = Less{})
      : items_(std::move(items)), less_(less) {
    if (items_.empty()) throw ContractViolation("KeyArray: length must be >= 1");
    std::vector<Key> sorted = items_;
    std::sort(sorted.begin(), sorted.end(), less_);
    auto equal = [&](const Key& a, const Key& b) { return !less_(a, b) && !less_(b, a); };
    if (std::adjacent_find(sorted.begin(), sorted.end(), equal) != sorted.end())
      throw DistinctnessError("KeyArray: keys must be pairwise distinct");
  }

  std::size_t size() const noexcept { return items_.size(); }
  const Key& operator[](std::size_t pos) const { return items_.at(pos - 1); }
  std::span<const Key> items() const noexcept { return items_; }
  std::span<Key> mutable_items() noexcept { return items_; }
  const Less& less() const noexcept { return less_; }

 private:
  struct Trusted {};
  KeyArray(Trusted, std::vector<Key> items) : items_(std::move(items)) {}

  std::vector<Key> items_;
  Less less_;

  friend KeyArray<int> rank_array_unchecked(std::vector<int>);
};

/// Rank array 1..n in some order; the caller guarantees it is a permutation.
inline KeyArray<int> rank_array_unchecked(std::vector<int> perm) {
  return KeyArray<int>(KeyArray<int>::Trusted{}, std::move(perm));
}

struct PartitionOutcome {
  std::size_t split_index = 0;  // absolute 1-based j
  std::uint64_t swaps = 0;
  friend bool operator==(const PartitionOutcome&, const PartitionOutcome&) = default;
};

template <typename Key>
struct BasicRunRecord {
  std::size_t n = 0;
  std::size_t rank = 0;
  std::uint64_t exchanges = 0;
  double normalized = 0.0;
  Key selected_value{};
};

using RunRecord = BasicRunRecord<int>;

namespace detail {

// Partition a[lo..hi] (0-based, inclusive) around a[lo]; returns 0-based j.
template <typename Key, typename Less>
std::size_t partition_span(std::span<Key> a, std::size_t lo, std::size_t hi,
                           const Less& less, std::uint64_t& swaps) {
  const Key pivot = a[lo];
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(lo) - 1;
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(hi) + 1;
  for (;;) {
    do {
      --j;
    } while (less(pivot, a[j]));
    do {
      ++i;
    } while (less(a[i], pivot));
    if (i < j) {
      std::swap(a[i], a[j]);
      ++swaps;
    } else {
      return static_cast<std::size_t>(j);
    }
  }
}

}  // namespace detail

/// Partitions positions lo..hi (1-based, inclusive) around the key at lo.
template <typename Key, typename Less>
PartitionOutcome hoare_partition(KeyArray<Key, Less>& array, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi > array.size() || hi <= lo)
    throw ContractViolation("hoare_partition: need 1 <= lo < hi <= n, got lo=" +
                            std::to_string(lo) + " hi=" + std::to_string(hi));
  PartitionOutcome out;
  out.split_index =
      detail::partition_span(array.mutable_items(), lo - 1, hi - 1, array.less(), out.swaps) + 1;
  return out;
}

/// Quickselect for the rank-th smallest key; consumes the array.
template <typename Key, typename Less>
BasicRunRecord<Key> quickselect(KeyArray<Key, Less> array, std::size_t rank) {
  const std::size_t n = array.size();
  if (rank < 1 || rank > n)
    throw std::out_of_range("quickselect: rank " + std::to_string(rank) + " outside 1.." +
                            std::to_string(n));
  auto a = array.mutable_items();
  std::size_t lo = 0, hi = n - 1;
  const std::size_t target = rank - 1;
  BasicRunRecord<Key> rec;
  rec.n = n;
  rec.rank = rank;
  while (lo < hi) {
    const std::size_t j = detail::partition_span(a, lo, hi, array.less(), rec.exchanges);
    if (target <= j)
      hi = j;
    else
      lo = j + 1;
  }
  rec.selected_value = a[lo];
  rec.normalized = static_cast<double>(rec.exchanges) / static_cast<double>(n);
  return rec;
}

/// One Quickselect run on a uniform permutation of 1..n with an independent
/// uniform rank, drawn from `rng`.
RunRecord run_random(std::size_t n, RandomStream& rng);

/// Same, on the stream (seed, stream_index).
RunRecord run_random(std::size_t n, std::uint64_t seed, std::uint64_t stream_index);

}  // namespace selectlab
