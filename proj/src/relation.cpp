#include "malcev/relation.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace malcev {

  namespace {
    constexpr std::uint64_t dense_limit = std::uint64_t(1) << 26;

    // Inserts a zero bit at position p.
    inline std::size_t expand_at(std::size_t w, std::size_t p) {
      std::size_t low = w & ((std::size_t(1) << p) - 1);
      return ((w >> p) << (p + 1)) | low;
    }
  }  // namespace

  std::uint64_t max_cubes_from_env() {
    if (char const* s = std::getenv("MALCEV_MAX_CUBES")) {
      char*              end = nullptr;
      unsigned long long v   = std::strtoull(s, &end, 10);
      if (end != s && *end == '\0' && v > 0) {
        return v;
      }
    }
    return default_max_cubes;
  }

  CubeCodec::CubeCodec(std::size_t carrier, CubeShape shape)
      : _n(carrier),
        _shape(std::move(shape)),
        _vertices(_shape.number_of_vertices()),
        _space(1),
        _pow(_vertices + 1, 1) {
    if (_n == 0) {
      throw ValidationError("carrier must be nonempty");
    }
    for (std::size_t v = 0; v < _vertices; ++v) {
      if (_pow[v] > std::uint64_t(-1) / _n) {
        throw ValidationError(
            "cube space does not fit in 64-bit codes (carrier "
            + std::to_string(_n) + ", dimension "
            + std::to_string(_shape.dimension()) + ")");
      }
      _pow[v + 1] = _pow[v] * _n;
    }
    _space = _pow[_vertices];
  }

  CubeCode CubeCodec::encode(LabeledCube<Elem> const& cube) const {
    if (cube.shape != _shape) {
      throw ValidationError("cube shape does not match the relation");
    }
    for (Elem x : cube.labels) {
      if (x >= _n) {
        throw ValidationError("cube label " + std::to_string(x)
                              + " outside the carrier");
      }
    }
    return encode(std::span<Elem const>(cube.labels));
  }

  LabeledCube<Elem> CubeCodec::cube(CubeCode c) const {
    std::vector<Elem> labels(_vertices);
    decode(c, labels);
    return LabeledCube<Elem>(_shape, std::move(labels));
  }

  CubeCode CubeCodec::constant(Elem c) const noexcept {
    CubeCode code = 0;
    for (std::size_t v = 0; v < _vertices; ++v) {
      code = code * _n + c;
    }
    return code;
  }

  CubeCode CubeCodec::sym(CubeCode c, std::size_t p) const noexcept {
    std::size_t const m = std::size_t(1) << p;
    CubeCode          out = 0;
    for (std::size_t v = 0; v < _vertices; ++v) {
      out += label(c, v ^ m) * _pow[v];
    }
    return out;
  }

  CubeCode CubeCodec::refl(CubeCode c, std::size_t p,
                           unsigned j) const noexcept {
    std::size_t const m   = std::size_t(1) << p;
    CubeCode          out = 0;
    for (std::size_t v = 0; v < _vertices; ++v) {
      out += label(c, j ? (v | m) : (v & ~m)) * _pow[v];
    }
    return out;
  }

  CubeCode CubeCodec::face(CubeCode c, std::size_t p,
                           unsigned j) const noexcept {
    std::size_t const half = _vertices / 2;
    std::size_t const bit  = std::size_t(j) << p;
    CubeCode          out  = 0;
    for (std::size_t w = half; w-- > 0;) {
      out = out * _n + label(c, expand_at(w, p) | bit);
    }
    return out;
  }

  CubeCode CubeCodec::glue(CubeCode face0, CubeCode face1,
                           std::size_t p) const noexcept {
    std::size_t const half = _vertices / 2;
    std::size_t const m    = std::size_t(1) << p;
    CubeCode          out  = 0;
    for (std::size_t w = 0; w < half; ++w) {
      std::size_t v = expand_at(w, p);
      out += (face0 % _n) * _pow[v] + (face1 % _n) * _pow[v | m];
      face0 /= _n;
      face1 /= _n;
    }
    return out;
  }

  CubeSet::CubeSet(std::uint64_t space) : _dense(space <= dense_limit) {
    if (_dense) {
      _bits.assign((space + 63) / 64, 0);
    }
  }

  bool CubeSet::insert(CubeCode c) {
    if (_dense) {
      std::uint64_t& word = _bits[c >> 6];
      std::uint64_t  mask = std::uint64_t(1) << (c & 63);
      if (word & mask) {
        return false;
      }
      word |= mask;
    } else if (!_hashed.insert(c).second) {
      return false;
    }
    _order.push_back(c);
    return true;
  }

  bool CubeSet::contains(CubeCode c) const {
    if (_dense) {
      return (_bits[c >> 6] >> (c & 63)) & 1;
    }
    return _hashed.count(c) != 0;
  }

  void CubeSet::clear() {
    if (_dense) {
      for (CubeCode c : _order) {
        _bits[c >> 6] &= ~(std::uint64_t(1) << (c & 63));
      }
    } else {
      _hashed.clear();
    }
    _order.clear();
  }

  CubeRelation::CubeRelation(std::size_t carrier, CubeShape shape)
      : _codec(carrier, std::move(shape)) {}

  CubeRelation::CubeRelation(std::size_t carrier, CubeShape shape,
                             std::vector<CubeCode> codes)
      : CubeRelation(CubeCodec(carrier, std::move(shape)), std::move(codes)) {}

  CubeRelation::CubeRelation(CubeCodec codec, std::vector<CubeCode> codes)
      : _codec(std::move(codec)), _codes(std::move(codes)) {
    std::sort(_codes.begin(), _codes.end());
    _codes.erase(std::unique(_codes.begin(), _codes.end()), _codes.end());
    if (!_codes.empty() && _codes.back() >= _codec.space_size()) {
      throw ValidationError("cube code out of range");
    }
  }

  CubeRelation
  CubeRelation::from_cubes(std::size_t                           carrier,
                           CubeShape const&                      shape,
                           std::vector<LabeledCube<Elem>> const& cubes) {
    CubeCodec             codec(carrier, shape);
    std::vector<CubeCode> codes;
    codes.reserve(cubes.size());
    for (auto const& c : cubes) {
      codes.push_back(codec.encode(c));
    }
    return CubeRelation(std::move(codec), std::move(codes));
  }

  std::vector<LabeledCube<Elem>> CubeRelation::cubes() const {
    std::vector<LabeledCube<Elem>> out;
    out.reserve(_codes.size());
    for (CubeCode c : _codes) {
      out.push_back(_codec.cube(c));
    }
    return out;
  }

  bool CubeRelation::contains(CubeCode c) const {
    return std::binary_search(_codes.begin(), _codes.end(), c);
  }

  bool CubeRelation::contains(LabeledCube<Elem> const& cube) const {
    return contains(_codec.encode(cube));
  }

  std::map<CubeCode, std::vector<CubeCode>>
  CubeRelation::face_index(Coord i) const {
    std::size_t const                         p = shape().position(i);
    std::map<CubeCode, std::vector<CubeCode>> index;
    for (CubeCode c : _codes) {
      CubeCode f0 = _codec.face(c, p, 0);
      CubeCode f1 = _codec.face(c, p, 1);
      index[f0].push_back(c);
      if (f1 != f0) {
        index[f1].push_back(c);
      }
    }
    return index;
  }

  std::set<Elem> CubeRelation::labels() const {
    std::set<Elem>    out;
    std::vector<Elem> buf(_codec.vertices());
    for (CubeCode c : _codes) {
      _codec.decode(c, buf);
      out.insert(buf.begin(), buf.end());
    }
    return out;
  }

  bool CubeRelation::is_subset_of(CubeRelation const& other) const {
    return std::includes(other._codes.begin(), other._codes.end(),
                         _codes.begin(), _codes.end());
  }

}  // namespace malcev
