#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/cube.hpp"

namespace malcev {

  // A labeled cube over {0..n-1} packed as sum_v label_v * n^v.
  using CubeCode = std::uint64_t;

  // Number of labeled cubes above which closures refuse to run unless
  // forced. MALCEV_MAX_CUBES in the environment overrides it.
  inline constexpr std::uint64_t default_max_cubes = std::uint64_t(1) << 24;
  std::uint64_t max_cubes_from_env();

  class CubeCodec {
   public:
    // Throws ValidationError if n^(2^k) does not fit in 64 bits.
    CubeCodec(std::size_t carrier, CubeShape shape);

    std::size_t      carrier() const noexcept { return _n; }
    CubeShape const& shape() const noexcept { return _shape; }
    std::size_t      vertices() const noexcept { return _vertices; }
    // |A|^(2^k).
    std::uint64_t space_size() const noexcept { return _space; }

    CubeCode encode(std::span<Elem const> labels) const noexcept {
      CubeCode c = 0;
      for (std::size_t v = _vertices; v-- > 0;) {
        c = c * _n + labels[v];
      }
      return c;
    }

    void decode(CubeCode c, std::span<Elem> out) const noexcept {
      for (std::size_t v = 0; v < _vertices; ++v) {
        out[v] = static_cast<Elem>(c % _n);
        c /= _n;
      }
    }

    Elem label(CubeCode c, std::size_t v) const noexcept {
      return static_cast<Elem>((c / _pow[v]) % _n);
    }

    CubeCode          encode(LabeledCube<Elem> const& cube) const;
    LabeledCube<Elem> cube(CubeCode c) const;

    CubeCode constant(Elem c) const noexcept;

    // Position-based unary maps (p is the position of the direction in S).
    CubeCode sym(CubeCode c, std::size_t p) const noexcept;
    CubeCode refl(CubeCode c, std::size_t p, unsigned j) const noexcept;

    // Faces in the (k-1)-dimensional code space, and the inverse.
    CubeCode face(CubeCode c, std::size_t p, unsigned j) const noexcept;
    CubeCode glue(CubeCode face0, CubeCode face1, std::size_t p) const noexcept;

   private:
    std::size_t                _n;
    CubeShape                  _shape;
    std::size_t                _vertices;
    std::uint64_t              _space;
    std::vector<std::uint64_t> _pow;
  };

  // Insertion-ordered set of cube codes. Dense bitmap when the code space
  // is small enough, hash set otherwise.
  class CubeSet {
   public:
    explicit CubeSet(std::uint64_t space);

    bool insert(CubeCode c);
    bool contains(CubeCode c) const;
    std::size_t size() const noexcept { return _order.size(); }
    CubeCode operator[](std::size_t i) const noexcept { return _order[i]; }
    std::vector<CubeCode> const& order() const noexcept { return _order; }
    void clear();

   private:
    bool                         _dense;
    std::vector<std::uint64_t>   _bits;
    std::unordered_set<CubeCode> _hashed;
    std::vector<CubeCode>        _order;
  };

  // A finite set of labeled cubes of one shape over a finite carrier,
  // stored as sorted unique codes.
  class CubeRelation {
   public:
    CubeRelation(std::size_t carrier, CubeShape shape);
    CubeRelation(std::size_t carrier, CubeShape shape,
                 std::vector<CubeCode> codes);
    CubeRelation(CubeCodec codec, std::vector<CubeCode> codes);

    // Throws ValidationError on shape or label mismatch.
    static CubeRelation from_cubes(std::size_t                           carrier,
                                   CubeShape const&                      shape,
                                   std::vector<LabeledCube<Elem>> const& cubes);

    CubeCodec const& codec() const noexcept { return _codec; }
    CubeShape const& shape() const noexcept { return _codec.shape(); }
    std::size_t      carrier() const noexcept { return _codec.carrier(); }
    std::size_t      dimension() const noexcept { return shape().dimension(); }

    std::size_t size() const noexcept { return _codes.size(); }
    bool        empty() const noexcept { return _codes.empty(); }

    std::vector<CubeCode> const& codes() const noexcept { return _codes; }
    std::vector<LabeledCube<Elem>> cubes() const;

    bool contains(CubeCode c) const;
    bool contains(LabeledCube<Elem> const& cube) const;

    // For direction i: each (k-1)-face code -> the cubes having it as face^0
    // or face^1 in direction i (sorted).
    std::map<CubeCode, std::vector<CubeCode>> face_index(Coord i) const;

    // Every label that occurs in some cube.
    std::set<Elem> labels() const;

    bool is_subset_of(CubeRelation const& other) const;

    friend bool operator==(CubeRelation const& a, CubeRelation const& b) {
      return a.shape() == b.shape() && a.carrier() == b.carrier()
             && a._codes == b._codes;
    }

   private:
    CubeCodec             _codec;
    std::vector<CubeCode> _codes;
  };

}  // namespace malcev
