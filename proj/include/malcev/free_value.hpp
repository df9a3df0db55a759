#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace malcev {

  // Handle to an interned value: a natural number or a formal application
  // of a constructor to interned arguments. Two handles from the same
  // store are equal iff the values are structurally equal.
  struct FreeValue {
    std::uint32_t id = 0;

    friend bool operator==(FreeValue, FreeValue) = default;
    friend auto operator<=>(FreeValue, FreeValue) = default;
  };

  // Append-only intern table. All member functions lock, so a store can be
  // shared between threads; ids are assigned in insertion order.
  class FreeStore {
   public:
    FreeStore() = default;
    FreeStore(FreeStore const&)            = delete;
    FreeStore& operator=(FreeStore const&) = delete;

    FreeValue nat(std::uint64_t m);
    FreeValue app(std::string const& tag, std::span<FreeValue const> args);

    bool                   is_nat(FreeValue v) const;
    std::uint64_t          nat_value(FreeValue v) const;  // throws if not Nat
    std::string            tag(FreeValue v) const;        // throws if Nat
    std::vector<FreeValue> args(FreeValue v) const;       // empty for Nat

    // "3", "(s 0 0 1)", "(t_2 1 2 3)".
    std::string to_sexpr(FreeValue v) const;

    std::size_t size() const;

   private:
    struct Node {
      bool                       nat;
      std::uint64_t              value;  // number, or tag index for App
      std::vector<std::uint32_t> args;
    };
    struct KeyHash {
      std::size_t operator()(Node const& n) const noexcept;
    };
    struct KeyEq {
      bool operator()(Node const& a, Node const& b) const noexcept {
        return a.nat == b.nat && a.value == b.value && a.args == b.args;
      }
    };

    FreeValue   intern(Node node);
    std::string sexpr_locked(std::uint32_t id) const;

    mutable std::mutex                                   _mutex;
    std::deque<Node>                                     _nodes;
    std::unordered_map<Node, std::uint32_t, KeyHash, KeyEq> _index;
    std::vector<std::string>                             _tags;
  };

}  // namespace malcev

template <>
struct std::hash<malcev::FreeValue> {
  std::size_t operator()(malcev::FreeValue v) const noexcept {
    return std::hash<std::uint32_t>()(v.id);
  }
};
