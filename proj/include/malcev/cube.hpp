#pragma once

// Labeled hypercubes and rectangular complexes.
//
// A cube of shape S = {s_0 < ... < s_{k-1}} stores its 2^k labels so that
// the vertex f : S -> {0,1} sits at index sum_j f(s_j) * 2^j. Vertices are
// passed around as that index (a bitmask over positions in S, not over the
// coordinate names themselves).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/error.hpp"

namespace malcev {

  using Coord = unsigned;

  class CubeShape {
   public:
    CubeShape() = default;

    // Coordinates must be strictly increasing.
    explicit CubeShape(std::vector<Coord> coords) : _coords(std::move(coords)) {
      for (std::size_t i = 1; i < _coords.size(); ++i) {
        if (_coords[i - 1] >= _coords[i]) {
          throw ValidationError(
              "cube coordinates must be distinct and sorted ascending");
        }
      }
      if (_coords.size() > 20) {
        throw ValidationError("cube dimension too large");
      }
    }

    // The normalized shape {0, ..., k-1}.
    static CubeShape standard(std::size_t k) {
      std::vector<Coord> c(k);
      for (std::size_t i = 0; i < k; ++i) {
        c[i] = static_cast<Coord>(i);
      }
      return CubeShape(std::move(c));
    }

    std::size_t dimension() const noexcept { return _coords.size(); }
    std::size_t number_of_vertices() const noexcept {
      return std::size_t(1) << _coords.size();
    }
    std::vector<Coord> const& coords() const noexcept { return _coords; }
    Coord max_coord() const { return _coords.back(); }

    bool contains(Coord c) const {
      return std::binary_search(_coords.begin(), _coords.end(), c);
    }

    // Position of coordinate `c` within S; throws if c is not in S.
    std::size_t position(Coord c) const {
      auto it = std::lower_bound(_coords.begin(), _coords.end(), c);
      if (it == _coords.end() || *it != c) {
        throw ValidationError("coordinate " + std::to_string(c)
                              + " is not in the cube shape");
      }
      return static_cast<std::size_t>(it - _coords.begin());
    }

    // S \ Q and the bitmask of positions of Q within S.
    CubeShape without(std::vector<Coord> const& q) const {
      std::vector<Coord> rest;
      for (Coord c : _coords) {
        if (std::find(q.begin(), q.end(), c) == q.end()) {
          rest.push_back(c);
        }
      }
      return CubeShape(std::move(rest));
    }

    friend bool operator==(CubeShape const&, CubeShape const&) = default;
    friend auto operator<=>(CubeShape const&, CubeShape const&) = default;

   private:
    std::vector<Coord> _coords;
  };

  template <typename T>
  struct LabeledCube {
    CubeShape      shape;
    std::vector<T> labels;

    LabeledCube() = default;
    LabeledCube(CubeShape s, std::vector<T> l)
        : shape(std::move(s)), labels(std::move(l)) {
      if (labels.size() != shape.number_of_vertices()) {
        throw ValidationError("a cube of dimension "
                              + std::to_string(shape.dimension()) + " needs "
                              + std::to_string(shape.number_of_vertices())
                              + " labels, got "
                              + std::to_string(labels.size()));
      }
    }

    std::size_t dimension() const noexcept { return shape.dimension(); }
    T const&    operator[](std::size_t v) const { return labels[v]; }

    bool is_constant() const {
      return std::all_of(labels.begin(), labels.end(),
                         [&](T const& x) { return x == labels.front(); });
    }

    friend bool operator==(LabeledCube const&, LabeledCube const&) = default;
    friend auto operator<=>(LabeledCube const& a, LabeledCube const& b) {
      if (auto c = a.shape <=> b.shape; c != 0) {
        return c;
      }
      return a.labels <=> b.labels;
    }
  };

  namespace detail {
    // Deposits the low bits of `value` into the bit positions set in `mask`.
    inline std::size_t deposit(std::size_t value, std::size_t mask) {
      std::size_t out = 0;
      for (std::size_t bit = 0; mask != 0; ++bit) {
        if (mask & 1) {
          out |= (value & 1) << bit;
          value >>= 1;
        }
        mask >>= 1;
      }
      return out;
    }

    inline std::size_t positions_mask(CubeShape const&          shape,
                                      std::vector<Coord> const& q) {
      std::size_t mask = 0;
      for (Coord c : q) {
        mask |= std::size_t(1) << shape.position(c);
      }
      return mask;
    }

    inline std::vector<Coord> sorted_unique(std::vector<Coord> q) {
      std::sort(q.begin(), q.end());
      if (std::adjacent_find(q.begin(), q.end()) != q.end()) {
        throw ValidationError("repeated coordinate");
      }
      return q;
    }
  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////
  // cut / glue / faces / lines
  ////////////////////////////////////////////////////////////////////////

  // Vertex f of the result (shape Q) holds the cube g -> gamma_{f u g}.
  template <typename T>
  LabeledCube<LabeledCube<T>> cut(LabeledCube<T> const& gamma,
                                  std::vector<Coord>    q) {
    q                      = detail::sorted_unique(std::move(q));
    std::size_t const qmsk = detail::positions_mask(gamma.shape, q);
    std::size_t const full = gamma.shape.number_of_vertices() - 1;
    CubeShape         outer(q);
    CubeShape         inner = gamma.shape.without(q);

    std::vector<LabeledCube<T>> out;
    out.reserve(outer.number_of_vertices());
    for (std::size_t f = 0; f < outer.number_of_vertices(); ++f) {
      std::size_t const fbits = detail::deposit(f, qmsk);
      std::vector<T>    labels;
      labels.reserve(inner.number_of_vertices());
      for (std::size_t g = 0; g < inner.number_of_vertices(); ++g) {
        labels.push_back(gamma.labels[fbits | detail::deposit(g, full & ~qmsk)]);
      }
      out.emplace_back(inner, std::move(labels));
    }
    return LabeledCube<LabeledCube<T>>(std::move(outer), std::move(out));
  }

  template <typename T>
  LabeledCube<T> glue(LabeledCube<LabeledCube<T>> const& cc) {
    CubeShape const& inner = cc.labels.front().shape;
    for (auto const& c : cc.labels) {
      if (c.shape != inner) {
        throw ValidationError("glue: inner cubes have different shapes");
      }
    }
    std::vector<Coord> all = cc.shape.coords();
    for (Coord c : inner.coords()) {
      if (cc.shape.contains(c)) {
        throw ValidationError("glue: outer and inner shapes overlap");
      }
      all.push_back(c);
    }
    std::sort(all.begin(), all.end());
    CubeShape         shape(all);
    std::size_t const qmsk = detail::positions_mask(shape, cc.shape.coords());
    std::size_t const full = shape.number_of_vertices() - 1;
    std::vector<T>    labels(shape.number_of_vertices());
    for (std::size_t f = 0; f < cc.shape.number_of_vertices(); ++f) {
      std::size_t const fbits = detail::deposit(f, qmsk);
      for (std::size_t g = 0; g < inner.number_of_vertices(); ++g) {
        labels[fbits | detail::deposit(g, full & ~qmsk)] = cc.labels[f].labels[g];
      }
    }
    return LabeledCube<T>(std::move(shape), std::move(labels));
  }

  // (face^0, face^1) in direction i.
  template <typename T>
  std::pair<LabeledCube<T>, LabeledCube<T>> faces(LabeledCube<T> const& gamma,
                                                  Coord                 i) {
    auto c = cut(gamma, {i});
    return {c.labels[0], c.labels[1]};
  }

  // The (k-1)-cube over S \ {i} whose vertex g holds the pair
  // (gamma_{g, i=0}, gamma_{g, i=1}).
  template <typename T>
  LabeledCube<std::pair<T, T>> lines(LabeledCube<T> const& gamma, Coord i) {
    std::size_t const p    = gamma.shape.position(i);
    CubeShape         rest = gamma.shape.without({i});
    std::vector<std::pair<T, T>> out;
    out.reserve(rest.number_of_vertices());
    std::size_t const full = gamma.shape.number_of_vertices() - 1;
    std::size_t const imsk = std::size_t(1) << p;
    for (std::size_t g = 0; g < rest.number_of_vertices(); ++g) {
      std::size_t const v = detail::deposit(g, full & ~imsk);
      out.emplace_back(gamma.labels[v], gamma.labels[v | imsk]);
    }
    return LabeledCube<std::pair<T, T>>(std::move(rest), std::move(out));
  }

  template <typename T>
  LabeledCube<T> glue_faces(LabeledCube<T> const& face0,
                            LabeledCube<T> const& face1, Coord i) {
    return glue(LabeledCube<LabeledCube<T>>(CubeShape({i}), {face0, face1}));
  }

  ////////////////////////////////////////////////////////////////////////
  // refl / sym / cube_from_pair / permute_coords
  ////////////////////////////////////////////////////////////////////////

  // Copies face j of direction i onto both faces.
  template <typename T>
  LabeledCube<T> refl(LabeledCube<T> const& gamma, Coord i, unsigned j) {
    if (j > 1) {
      throw ValidationError("refl: face index must be 0 or 1");
    }
    std::size_t const m   = std::size_t(1) << gamma.shape.position(i);
    LabeledCube<T>    out = gamma;
    for (std::size_t v = 0; v < out.labels.size(); ++v) {
      out.labels[v] = gamma.labels[j ? (v | m) : (v & ~m)];
    }
    return out;
  }

  // Swaps the two faces of direction i.
  template <typename T>
  LabeledCube<T> sym(LabeledCube<T> const& gamma, Coord i) {
    std::size_t const m   = std::size_t(1) << gamma.shape.position(i);
    LabeledCube<T>    out = gamma;
    for (std::size_t v = 0; v < out.labels.size(); ++v) {
      out.labels[v] = gamma.labels[v ^ m];
    }
    return out;
  }

  // x where f_i = 0, y where f_i = 1.
  template <typename T>
  LabeledCube<T> cube_from_pair(CubeShape const& shape, Coord i, T const& x,
                                T const& y) {
    std::size_t const m = std::size_t(1) << shape.position(i);
    std::vector<T>    labels;
    labels.reserve(shape.number_of_vertices());
    for (std::size_t v = 0; v < shape.number_of_vertices(); ++v) {
      labels.push_back((v & m) ? y : x);
    }
    return LabeledCube<T>(shape, std::move(labels));
  }

  template <typename T>
  LabeledCube<T> constant_cube(CubeShape const& shape, T const& c) {
    return LabeledCube<T>(shape, std::vector<T>(shape.number_of_vertices(), c));
  }

  // `pi` maps each coordinate of S to a coordinate of S; the label at f is
  // gamma at f o pi.
  template <typename T>
  LabeledCube<T> permute_coords(LabeledCube<T> const&         gamma,
                                std::map<Coord, Coord> const& pi) {
    auto const&       cs = gamma.shape.coords();
    std::vector<bool> hit(cs.size(), false);
    if (pi.size() != cs.size()) {
      throw ValidationError("permute_coords: map must cover every coordinate");
    }
    std::vector<std::size_t> target(cs.size());
    for (std::size_t p = 0; p < cs.size(); ++p) {
      auto it = pi.find(cs[p]);
      if (it == pi.end() || !gamma.shape.contains(it->second)) {
        throw ValidationError("permute_coords: not a map on the cube shape");
      }
      target[p] = gamma.shape.position(it->second);
      if (hit[target[p]]) {
        throw ValidationError("permute_coords: not a bijection");
      }
      hit[target[p]] = true;
    }
    // (f o pi)(s_p) = f(pi(s_p)): bit p of the source vertex is bit
    // target[p] of f.
    LabeledCube<T> out = gamma;
    for (std::size_t f = 0; f < gamma.labels.size(); ++f) {
      std::size_t src = 0;
      for (std::size_t p = 0; p < cs.size(); ++p) {
        src |= ((f >> target[p]) & 1) << p;
      }
      out.labels[f] = gamma.labels[src];
    }
    return out;
  }

  template <typename T>
  LabeledCube<T> transpose(LabeledCube<T> const& gamma, Coord a, Coord b) {
    std::map<Coord, Coord> pi;
    for (Coord c : gamma.shape.coords()) {
      pi[c] = c;
    }
    pi.at(a) = b;
    pi.at(b) = a;
    return permute_coords(gamma, pi);
  }

  ////////////////////////////////////////////////////////////////////////
  // Rectangular complexes
  ////////////////////////////////////////////////////////////////////////

  // Labels are stored with coordinate 0 varying fastest, so a complex with
  // all dimensions equal to 2 has the same label array as a cube.
  template <typename T>
  struct RectComplex {
    std::vector<std::size_t> dims;
    std::vector<T>           labels;

    RectComplex() = default;
    RectComplex(std::vector<std::size_t> d, std::vector<T> l)
        : dims(std::move(d)), labels(std::move(l)) {
      std::size_t total = 1;
      for (auto n : dims) {
        if (n < 2) {
          throw ValidationError("complex dimensions must be at least 2");
        }
        total *= n;
      }
      if (dims.empty()) {
        throw ValidationError("complex needs at least one dimension");
      }
      if (labels.size() != total) {
        throw ValidationError("complex label count does not match dimensions");
      }
    }

    std::size_t index(std::span<std::size_t const> f) const {
      std::size_t idx = 0, stride = 1;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        idx += f[j] * stride;
        stride *= dims[j];
      }
      return idx;
    }

    T const& at(std::span<std::size_t const> f) const {
      return labels[index(f)];
    }

    friend bool operator==(RectComplex const&, RectComplex const&) = default;
  };

  // The unit subcube with least corner f.
  template <typename T>
  LabeledCube<T> cell(RectComplex<T> const& c, std::span<std::size_t const> f) {
    std::size_t const k = c.dims.size();
    if (f.size() != k) {
      throw ValidationError("cell: offset has the wrong length");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (f[j] + 1 >= c.dims[j]) {
        throw ValidationError("cell: offset out of range");
      }
    }
    CubeShape                shape = CubeShape::standard(k);
    std::vector<T>           labels(shape.number_of_vertices());
    std::vector<std::size_t> g(k);
    for (std::size_t v = 0; v < labels.size(); ++v) {
      for (std::size_t j = 0; j < k; ++j) {
        g[j] = f[j] + ((v >> j) & 1);
      }
      labels[v] = c.at(g);
    }
    return LabeledCube<T>(std::move(shape), std::move(labels));
  }

  template <typename T>
  LabeledCube<T> corners(RectComplex<T> const& c) {
    std::size_t const        k     = c.dims.size();
    CubeShape                shape = CubeShape::standard(k);
    std::vector<T>           labels(shape.number_of_vertices());
    std::vector<std::size_t> g(k);
    for (std::size_t v = 0; v < labels.size(); ++v) {
      for (std::size_t j = 0; j < k; ++j) {
        g[j] = ((v >> j) & 1) * (c.dims[j] - 1);
      }
      labels[v] = c.at(g);
    }
    return LabeledCube<T>(std::move(shape), std::move(labels));
  }

  // The (n+1)^k complex whose entry at f is alpha at
  // (f_0 > i, ..., f_{k-1} > i).
  template <typename T>
  RectComplex<T> expand_zeta(LabeledCube<T> const& alpha, std::size_t i,
                             std::size_t n) {
    std::size_t const        k = alpha.dimension();
    std::vector<std::size_t> dims(k, n + 1);
    std::size_t              total = 1;
    for (std::size_t j = 0; j < k; ++j) {
      total *= n + 1;
    }
    std::vector<T> labels(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx, v = 0;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t fj = rest % (n + 1);
        rest /= n + 1;
        v |= std::size_t(fj >= i + 1) << j;
      }
      labels[idx] = alpha.labels[v];
    }
    return RectComplex<T>(std::move(dims), std::move(labels));
  }

  ////////////////////////////////////////////////////////////////////////
  // Vertexwise application
  ////////////////////////////////////////////////////////////////////////

  // out_v = fn(cubes[0]_v, ..., cubes[m-1]_v); `fn` receives a span.
  template <typename T, typename Fn>
  LabeledCube<T> apply_vertexwise(Fn&& fn, std::span<LabeledCube<T> const> cubes,
                                  CubeShape const& shape) {
    for (auto const& c : cubes) {
      if (c.shape != shape) {
        throw ValidationError("vertexwise application: shape mismatch");
      }
    }
    std::vector<T> labels(shape.number_of_vertices());
    std::vector<T> args(cubes.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
      for (std::size_t j = 0; j < cubes.size(); ++j) {
        args[j] = cubes[j].labels[v];
      }
      labels[v] = fn(std::span<T const>(args));
    }
    return LabeledCube<T>(shape, std::move(labels));
  }

  LabeledCube<Elem> apply_op_to_cubes(FiniteAlgebra const&                alg,
                                      std::string const&                  op,
                                      std::span<LabeledCube<Elem> const>  cubes,
                                      CubeShape const& shape);

  // Vertexwise application to complexes of equal dimensions.
  RectComplex<Elem> apply_op_to_complexes(FiniteAlgebra const&                 alg,
                                          std::string const&                   op,
                                          std::span<RectComplex<Elem> const> cs);

}  // namespace malcev
