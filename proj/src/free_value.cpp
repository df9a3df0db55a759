#include "malcev/free_value.hpp"

#include <algorithm>
#include <stdexcept>

#include "malcev/error.hpp"

namespace malcev {

  std::size_t FreeStore::KeyHash::operator()(Node const& n) const noexcept {
    std::size_t h = std::hash<std::uint64_t>()(n.value) * 31 + n.nat;
    for (auto a : n.args) {
      h ^= std::hash<std::uint32_t>()(a) + 0x9e3779b97f4a7c15ULL + (h << 6)
           + (h >> 2);
    }
    return h;
  }

  FreeValue FreeStore::intern(Node node) {
    auto it = _index.find(node);
    if (it != _index.end()) {
      return FreeValue{it->second};
    }
    auto id = static_cast<std::uint32_t>(_nodes.size());
    _nodes.push_back(node);
    _index.emplace(std::move(node), id);
    return FreeValue{id};
  }

  FreeValue FreeStore::nat(std::uint64_t m) {
    std::lock_guard lock(_mutex);
    return intern(Node{true, m, {}});
  }

  FreeValue FreeStore::app(std::string const&         tag,
                           std::span<FreeValue const> args) {
    std::lock_guard lock(_mutex);
    auto            it = std::find(_tags.begin(), _tags.end(), tag);
    std::uint64_t   t  = static_cast<std::uint64_t>(it - _tags.begin());
    if (it == _tags.end()) {
      _tags.push_back(tag);
    }
    Node node{false, t, {}};
    node.args.reserve(args.size());
    for (auto a : args) {
      if (a.id >= _nodes.size()) {
        throw ValidationError("free value from another store");
      }
      node.args.push_back(a.id);
    }
    return intern(std::move(node));
  }

  bool FreeStore::is_nat(FreeValue v) const {
    std::lock_guard lock(_mutex);
    return _nodes.at(v.id).nat;
  }

  std::uint64_t FreeStore::nat_value(FreeValue v) const {
    std::lock_guard lock(_mutex);
    auto const&     n = _nodes.at(v.id);
    if (!n.nat) {
      throw std::logic_error("nat_value on an application node");
    }
    return n.value;
  }

  std::string FreeStore::tag(FreeValue v) const {
    std::lock_guard lock(_mutex);
    auto const&     n = _nodes.at(v.id);
    if (n.nat) {
      throw std::logic_error("tag on a natural number");
    }
    return _tags[n.value];
  }

  std::vector<FreeValue> FreeStore::args(FreeValue v) const {
    std::lock_guard        lock(_mutex);
    std::vector<FreeValue> out;
    for (auto a : _nodes.at(v.id).args) {
      out.push_back(FreeValue{a});
    }
    return out;
  }

  std::string FreeStore::sexpr_locked(std::uint32_t id) const {
    auto const& n = _nodes.at(id);
    if (n.nat) {
      return std::to_string(n.value);
    }
    std::string s = "(" + _tags[n.value];
    for (auto a : n.args) {
      s += ' ';
      s += sexpr_locked(a);
    }
    return s + ")";
  }

  std::string FreeStore::to_sexpr(FreeValue v) const {
    std::lock_guard lock(_mutex);
    return sexpr_locked(v.id);
  }

  std::size_t FreeStore::size() const {
    std::lock_guard lock(_mutex);
    return _nodes.size();
  }

}  // namespace malcev
