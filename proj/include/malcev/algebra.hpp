#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "malcev/error.hpp"
#include "malcev/partition.hpp"

namespace malcev {

  // Elements of a finite carrier are always {0, ..., n-1}.
  using Elem = std::uint32_t;

  struct OperationTable {
    std::string       name;
    std::size_t       arity = 0;
    std::vector<Elem> table;  // row-major, first argument most significant
  };

  class FiniteAlgebra {
   public:
    FiniteAlgebra() = default;

    // Validates every table; throws ValidationError on any violation.
    FiniteAlgebra(std::string name, std::size_t size,
                  std::vector<OperationTable> ops);

    std::string const& name() const noexcept { return _name; }
    std::size_t        size() const noexcept { return _size; }

    std::vector<OperationTable> const& operations() const noexcept {
      return _ops;
    }

    std::size_t number_of_operations() const noexcept { return _ops.size(); }

    OperationTable const& operation(std::size_t i) const { return _ops.at(i); }

    // Index of the operation called `name`; throws ValidationError if absent.
    std::size_t operation_index(std::string const& name) const;

    // Table lookup, unchecked beyond a debug assertion on arity.
    Elem apply(std::size_t op, std::span<Elem const> args) const noexcept {
      auto const& t   = _ops[op];
      std::size_t idx = 0;
      for (Elem a : args) {
        idx = idx * _size + a;
      }
      return t.table[idx];
    }

    // Checked variant used at API boundaries.
    Elem apply_checked(std::size_t op, std::span<Elem const> args) const;

   private:
    std::string                 _name;
    std::size_t                 _size = 0;
    std::vector<OperationTable> _ops;
  };

  ////////////////////////////////////////////////////////////////////////
  // Terms
  ////////////////////////////////////////////////////////////////////////

  class Term {
   public:
    struct Var {
      std::size_t index;
    };
    struct App {
      std::string       op;
      std::vector<Term> args;
    };

    static Term var(std::size_t i) { return Term(Var{i}); }
    static Term app(std::string op, std::vector<Term> args) {
      return Term(App{std::move(op), std::move(args)});
    }

    bool is_var() const noexcept { return std::holds_alternative<Var>(_node); }
    Var const& as_var() const { return std::get<Var>(_node); }
    App const& as_app() const { return std::get<App>(_node); }

    std::size_t height() const;

   private:
    explicit Term(Var v) : _node(v) {}
    explicit Term(App a) : _node(std::move(a)) {}

    std::variant<Var, App> _node;
  };

  // Bottom-up evaluation. Throws ValidationError for unknown operations,
  // arity mismatches and variables out of range.
  Elem eval_term(FiniteAlgebra const& alg, Term const& term,
                 std::span<Elem const> args);

  ////////////////////////////////////////////////////////////////////////
  // Subalgebras and congruences
  ////////////////////////////////////////////////////////////////////////

  // Least subset containing `seed` and closed under every operation.
  // Nullary operations always contribute their value.
  std::set<Elem> subalgebra_generated(FiniteAlgebra const&  alg,
                                      std::set<Elem> const& seed);

  // Congruence generated by `pairs`, via one-step translations and
  // union-find merging.
  Partition cg(FiniteAlgebra const&                        alg,
               std::span<std::pair<Elem, Elem> const> pairs);

  // True if the partition is compatible with every operation; scans all
  // argument tuples.
  bool is_compatible(FiniteAlgebra const& alg, Partition const& p);

  inline constexpr std::size_t default_congruence_size_limit = 6;

  // The whole congruence lattice, sorted by canonical form. Throws
  // ResourceLimitError if the carrier exceeds `size_limit`.
  std::vector<Partition>
  all_congruences(FiniteAlgebra const& alg,
                  std::size_t size_limit = default_congruence_size_limit);

  Partition meet(Partition const& p, Partition const& q);
  Partition join(FiniteAlgebra const& alg, Partition const& p,
                 Partition const& q);

}  // namespace malcev
