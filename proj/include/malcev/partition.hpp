#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace malcev {

  // An equivalence relation on {0, ..., n-1}, stored as a union-find forest.
  //
  // `find` does not compress paths so that it can be const; union by rank
  // keeps trees logarithmic. Equality and ordering go through the canonical
  // form, in which every element is mapped to the least element of its
  // block.
  class Partition {
   public:
    using index_type = std::uint32_t;

    Partition() = default;
    explicit Partition(std::size_t n);

    static Partition identity(std::size_t n) { return Partition(n); }
    static Partition full(std::size_t n);
    // Builds a partition from explicit blocks; elements not mentioned are
    // singletons. Throws ValidationError on out-of-range or repeated entries.
    static Partition from_blocks(std::size_t                                 n,
                                 std::vector<std::vector<index_type>> const& blocks);

    std::size_t size() const noexcept { return _parent.size(); }

    index_type find(index_type x) const noexcept {
      while (_parent[x] != x) {
        x = _parent[x];
      }
      return x;
    }

    bool same(index_type x, index_type y) const noexcept {
      return find(x) == find(y);
    }

    // Returns true if a merge happened.
    bool merge(index_type x, index_type y);

    // Merges every block of `other` into this partition.
    void merge_all(Partition const& other);

    bool contains(Partition const& other) const;  // other <= *this

    bool is_identity() const;
    bool is_full() const;

    std::size_t number_of_blocks() const;

    // Blocks sorted internally and by least element.
    std::vector<std::vector<index_type>> blocks() const;

    // Least element of the block of each element.
    std::vector<index_type> canonical() const;

    friend bool operator==(Partition const& a, Partition const& b) {
      return a.canonical() == b.canonical();
    }
    friend std::strong_ordering operator<=>(Partition const& a,
                                            Partition const& b) {
      return a.canonical() <=> b.canonical();
    }

   private:
    std::vector<index_type>    _parent;
    std::vector<std::uint8_t>  _rank;
  };

}  // namespace malcev
