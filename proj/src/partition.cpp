#include "malcev/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "malcev/error.hpp"

namespace malcev {

  Partition::Partition(std::size_t n) : _parent(n), _rank(n, 0) {
    std::iota(_parent.begin(), _parent.end(), index_type(0));
  }

  Partition Partition::full(std::size_t n) {
    Partition p(n);
    for (index_type i = 1; i < n; ++i) {
      p.merge(0, i);
    }
    return p;
  }

  Partition
  Partition::from_blocks(std::size_t                                 n,
                         std::vector<std::vector<index_type>> const& blocks) {
    Partition         p(n);
    std::vector<bool> seen(n, false);
    for (auto const& block : blocks) {
      for (index_type x : block) {
        if (x >= n) {
          throw ValidationError("block entry " + std::to_string(x)
                                + " is out of range for a carrier of size "
                                + std::to_string(n));
        }
        if (seen[x]) {
          throw ValidationError("element " + std::to_string(x)
                                + " occurs in more than one block");
        }
        seen[x] = true;
      }
      for (std::size_t i = 1; i < block.size(); ++i) {
        p.merge(block[0], block[i]);
      }
    }
    return p;
  }

  bool Partition::merge(index_type x, index_type y) {
    x = find(x);
    y = find(y);
    if (x == y) {
      return false;
    }
    if (_rank[x] < _rank[y]) {
      std::swap(x, y);
    }
    _parent[y] = x;
    if (_rank[x] == _rank[y]) {
      ++_rank[x];
    }
    return true;
  }

  void Partition::merge_all(Partition const& other) {
    if (other.size() != size()) {
      throw ValidationError("partition size mismatch");
    }
    for (index_type i = 0; i < size(); ++i) {
      merge(i, other.find(i));
    }
  }

  bool Partition::contains(Partition const& other) const {
    if (other.size() != size()) {
      throw ValidationError("partition size mismatch");
    }
    for (index_type i = 0; i < size(); ++i) {
      if (!same(i, other.find(i))) {
        return false;
      }
    }
    return true;
  }

  bool Partition::is_identity() const {
    return number_of_blocks() == size();
  }

  bool Partition::is_full() const {
    return number_of_blocks() <= 1;
  }

  std::size_t Partition::number_of_blocks() const {
    std::size_t count = 0;
    for (index_type i = 0; i < size(); ++i) {
      count += (_parent[i] == i);
    }
    return count;
  }

  std::vector<Partition::index_type> Partition::canonical() const {
    std::vector<index_type> least(size(), index_type(-1));
    std::vector<index_type> result(size());
    for (index_type i = 0; i < size(); ++i) {
      index_type r = find(i);
      if (least[r] == index_type(-1)) {
        least[r] = i;
      }
      result[i] = least[r];
    }
    return result;
  }

  std::vector<std::vector<Partition::index_type>> Partition::blocks() const {
    auto                                 canon = canonical();
    std::vector<std::vector<index_type>> result;
    std::vector<std::size_t>             slot(size(), 0);
    for (index_type i = 0; i < size(); ++i) {
      if (canon[i] == i) {
        slot[i] = result.size();
        result.emplace_back();
      }
      result[slot[canon[i]]].push_back(i);
    }
    return result;
  }

}  // namespace malcev
