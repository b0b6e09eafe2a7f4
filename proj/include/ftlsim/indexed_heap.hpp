#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ftlsim/types.hpp"

namespace ftlsim {

/// Binary min-heap over (key, block) pairs with a position index, giving
/// O(log n) insert, erase and key updates. Ties order by lower block id.
class IndexedMinHeap {
 public:
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(BlockId id) const { return pos_.count(id) != 0; }

  void insert(BlockId id, std::uint32_t key) {
    if (contains(id)) throw std::logic_error("IndexedMinHeap: duplicate insert");
    heap_.push_back({key, id});
    pos_[id] = heap_.size() - 1;
    sift_up(heap_.size() - 1);
  }

  void update(BlockId id, std::uint32_t key) {
    auto it = pos_.find(id);
    if (it == pos_.end()) throw std::logic_error("IndexedMinHeap: update of unknown id");
    std::size_t i = it->second;
    heap_[i].key = key;
    sift_up(i);
    sift_down(pos_[id]);
  }

  void erase(BlockId id) {
    auto it = pos_.find(id);
    if (it == pos_.end()) throw std::logic_error("IndexedMinHeap: erase of unknown id");
    std::size_t i = it->second;
    swap_entries(i, heap_.size() - 1);
    pos_.erase(heap_.back().id);
    heap_.pop_back();
    if (i < heap_.size()) {
      sift_up(i);
      sift_down(pos_[heap_[i].id]);
    }
  }

  /// (key, id) of the minimum; heap must be non-empty.
  std::pair<std::uint32_t, BlockId> min() const {
    assert(!heap_.empty());
    return {heap_[0].key, heap_[0].id};
  }

 private:
  struct Entry {
    std::uint32_t key;
    BlockId id;
  };

  static bool less(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  }

  void swap_entries(std::size_t i, std::size_t j) {
    std::swap(heap_[i], heap_[j]);
    pos_[heap_[i].id] = i;
    pos_[heap_[j].id] = j;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!less(heap_[i], heap_[parent])) break;
      swap_entries(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    for (;;) {
      std::size_t smallest = i;
      std::size_t left = 2 * i + 1, right = 2 * i + 2;
      if (left < heap_.size() && less(heap_[left], heap_[smallest])) smallest = left;
      if (right < heap_.size() && less(heap_[right], heap_[smallest])) smallest = right;
      if (smallest == i) break;
      swap_entries(i, smallest);
      i = smallest;
    }
  }

  std::vector<Entry> heap_;
  std::unordered_map<BlockId, std::size_t> pos_;
};

}  // namespace ftlsim
