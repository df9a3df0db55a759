#include "malcev/algebra.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

namespace malcev {

  namespace {
    std::size_t checked_power(std::size_t base, std::size_t exp) {
      std::size_t result = 1;
      for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && result > (std::size_t(1) << 40) / base) {
          throw ValidationError("operation table would be too large");
        }
        result *= base;
      }
      return result;
    }

    // Calls fn(args) for every tuple in {0..n-1}^arity, in row-major order.
    template <typename Fn>
    void for_each_tuple(std::size_t n, std::size_t arity, Fn&& fn) {
      std::vector<Elem> args(arity, 0);
      if (arity > 0 && n == 0) {
        return;
      }
      while (true) {
        fn(std::span<Elem const>(args));
        std::size_t pos = arity;
        while (pos > 0) {
          --pos;
          if (++args[pos] < n) {
            break;
          }
          args[pos] = 0;
          if (pos == 0) {
            return;
          }
        }
        if (arity == 0) {
          return;
        }
      }
    }
  }  // namespace

  FiniteAlgebra::FiniteAlgebra(std::string                 name,
                               std::size_t                 size,
                               std::vector<OperationTable> ops)
      : _name(std::move(name)), _size(size), _ops(std::move(ops)) {
    if (_size == 0) {
      throw ValidationError("algebra size must be positive");
    }
    if (_ops.empty()) {
      throw ValidationError("an algebra needs at least one operation");
    }
    std::set<std::string> names;
    for (auto const& op : _ops) {
      if (!names.insert(op.name).second) {
        throw ValidationError("duplicate operation name '" + op.name + "'");
      }
      std::size_t expected = checked_power(_size, op.arity);
      if (op.table.size() != expected) {
        throw ValidationError("operation '" + op.name + "' of arity "
                              + std::to_string(op.arity) + " needs "
                              + std::to_string(expected) + " entries, got "
                              + std::to_string(op.table.size()));
      }
      for (Elem e : op.table) {
        if (e >= _size) {
          throw ValidationError("operation '" + op.name + "' has entry "
                                + std::to_string(e)
                                + " outside the carrier");
        }
      }
    }
  }

  std::size_t FiniteAlgebra::operation_index(std::string const& name) const {
    for (std::size_t i = 0; i < _ops.size(); ++i) {
      if (_ops[i].name == name) {
        return i;
      }
    }
    throw ValidationError("unknown operation '" + name + "'");
  }

  Elem FiniteAlgebra::apply_checked(std::size_t           op,
                                    std::span<Elem const> args) const {
    if (op >= _ops.size()) {
      throw ValidationError("operation index out of range");
    }
    if (args.size() != _ops[op].arity) {
      throw ValidationError("operation '" + _ops[op].name + "' expects "
                            + std::to_string(_ops[op].arity)
                            + " arguments, got "
                            + std::to_string(args.size()));
    }
    for (Elem a : args) {
      if (a >= _size) {
        throw ValidationError("argument " + std::to_string(a)
                              + " outside the carrier");
      }
    }
    return apply(op, args);
  }

  std::size_t Term::height() const {
    if (is_var()) {
      return 0;
    }
    std::size_t h = 0;
    for (auto const& t : as_app().args) {
      h = std::max(h, t.height());
    }
    return h + 1;
  }

  Elem eval_term(FiniteAlgebra const& alg, Term const& term,
                 std::span<Elem const> args) {
    if (term.is_var()) {
      auto i = term.as_var().index;
      if (i >= args.size()) {
        throw ValidationError("variable x" + std::to_string(i)
                              + " out of range for "
                              + std::to_string(args.size()) + " arguments");
      }
      if (args[i] >= alg.size()) {
        throw ValidationError("argument outside the carrier");
      }
      return args[i];
    }
    auto const& app = term.as_app();
    std::size_t op  = alg.operation_index(app.op);
    if (app.args.size() != alg.operation(op).arity) {
      throw ValidationError("operation '" + app.op + "' applied to "
                            + std::to_string(app.args.size())
                            + " arguments, arity is "
                            + std::to_string(alg.operation(op).arity));
    }
    std::vector<Elem> values;
    values.reserve(app.args.size());
    for (auto const& sub : app.args) {
      values.push_back(eval_term(alg, sub, args));
    }
    return alg.apply(op, values);
  }

  std::set<Elem> subalgebra_generated(FiniteAlgebra const&  alg,
                                      std::set<Elem> const& seed) {
    std::vector<bool> member(alg.size(), false);
    std::vector<Elem> elems;
    auto              add = [&](Elem x) {
      if (!member[x]) {
        member[x] = true;
        elems.push_back(x);
      }
    };
    for (Elem x : seed) {
      if (x >= alg.size()) {
        throw ValidationError("seed element " + std::to_string(x)
                              + " outside the carrier");
      }
      add(x);
    }
    for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
      if (alg.operation(op).arity == 0) {
        add(alg.operation(op).table[0]);
      }
    }
    // Naive rounds: the carrier is small and each round is a full scan of
    // the current element list.
    bool changed = true;
    while (changed) {
      changed          = false;
      std::size_t size = elems.size();
      for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
        std::size_t arity = alg.operation(op).arity;
        if (arity == 0 || size == 0) {
          continue;
        }
        std::vector<Elem> snapshot(elems.begin(), elems.begin() + size);
        for_each_tuple(size, arity, [&](std::span<Elem const> idx) {
          std::vector<Elem> args(arity);
          for (std::size_t j = 0; j < arity; ++j) {
            args[j] = snapshot[idx[j]];
          }
          Elem y = alg.apply(op, args);
          if (!member[y]) {
            add(y);
            changed = true;
          }
        });
      }
    }
    return std::set<Elem>(elems.begin(), elems.end());
  }

  Partition cg(FiniteAlgebra const&                   alg,
               std::span<std::pair<Elem, Elem> const> pairs) {
    std::size_t const n = alg.size();
    Partition         result(n);
    std::deque<std::pair<Elem, Elem>> queue;
    for (auto [a, b] : pairs) {
      if (a >= n || b >= n) {
        throw ValidationError("pair (" + std::to_string(a) + ","
                              + std::to_string(b) + ") outside the carrier");
      }
      if (result.merge(a, b)) {
        queue.emplace_back(a, b);
      }
    }
    // Every pair that caused a union is pushed through every one-step
    // translation f(c_0, .., x, .., c_{m-1}); the union-find edges span the
    // equivalence, so this reaches the least compatible partition.
    std::vector<Elem> args;
    while (!queue.empty()) {
      auto [a, b] = queue.front();
      queue.pop_front();
      for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
        std::size_t arity = alg.operation(op).arity;
        if (arity == 0) {
          continue;
        }
        args.assign(arity, 0);
        for (std::size_t pos = 0; pos < arity; ++pos) {
          for_each_tuple(n, arity - 1, [&](std::span<Elem const> rest) {
            for (std::size_t j = 0, r = 0; j < arity; ++j) {
              if (j != pos) {
                args[j] = rest[r++];
              }
            }
            args[pos] = a;
            Elem fa   = alg.apply(op, args);
            args[pos] = b;
            Elem fb   = alg.apply(op, args);
            if (result.merge(fa, fb)) {
              queue.emplace_back(fa, fb);
            }
          });
        }
      }
    }
    return result;
  }

  bool is_compatible(FiniteAlgebra const& alg, Partition const& p) {
    std::size_t const n = alg.size();
    if (p.size() != n) {
      throw ValidationError("partition size mismatch");
    }
    std::vector<Elem> args;
    for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
      std::size_t arity = alg.operation(op).arity;
      if (arity == 0) {
        continue;
      }
      args.assign(arity, 0);
      bool ok = true;
      for (std::size_t pos = 0; pos < arity && ok; ++pos) {
        for_each_tuple(n, arity - 1, [&](std::span<Elem const> rest) {
          if (!ok) {
            return;
          }
          for (std::size_t j = 0, r = 0; j < arity; ++j) {
            if (j != pos) {
              args[j] = rest[r++];
            }
          }
          for (Elem a = 0; a < n && ok; ++a) {
            for (Elem b = a + 1; b < n && ok; ++b) {
              if (!p.same(a, b)) {
                continue;
              }
              args[pos] = a;
              Elem fa   = alg.apply(op, args);
              args[pos] = b;
              ok        = p.same(fa, alg.apply(op, args));
            }
          }
        });
      }
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  std::vector<Partition> all_congruences(FiniteAlgebra const& alg,
                                         std::size_t          size_limit) {
    std::size_t const n = alg.size();
    if (n > size_limit) {
      throw ResourceLimitError("all_congruences: carrier size "
                               + std::to_string(n) + " exceeds the limit "
                               + std::to_string(size_limit));
    }
    std::set<Partition> found;
    found.insert(Partition::identity(n));
    std::vector<Partition> principal;
    for (Elem a = 0; a < n; ++a) {
      for (Elem b = a + 1; b < n; ++b) {
        std::pair<Elem, Elem> pr{a, b};
        principal.push_back(cg(alg, std::span(&pr, 1)));
        found.insert(principal.back());
      }
    }
    // Every congruence is a join of principal ones; close under joining
    // with a principal congruence until nothing new appears.
    std::vector<Partition> frontier(found.begin(), found.end());
    while (!frontier.empty()) {
      std::vector<Partition> next;
      for (auto const& p : frontier) {
        for (auto const& q : principal) {
          Partition j = p;
          j.merge_all(q);
          if (found.insert(j).second) {
            next.push_back(std::move(j));
          }
        }
      }
      frontier = std::move(next);
    }
    return std::vector<Partition>(found.begin(), found.end());
  }

  Partition meet(Partition const& p, Partition const& q) {
    if (p.size() != q.size()) {
      throw ValidationError("partition size mismatch");
    }
    std::size_t const n = p.size();
    Partition         result(n);
    std::map<std::pair<Partition::index_type, Partition::index_type>,
             Partition::index_type>
        rep;
    for (Partition::index_type i = 0; i < n; ++i) {
      auto [it, inserted] = rep.emplace(std::pair(p.find(i), q.find(i)), i);
      if (!inserted) {
        result.merge(it->second, i);
      }
    }
    return result;
  }

  Partition join(FiniteAlgebra const& alg, Partition const& p,
                 Partition const& q) {
    if (p.size() != alg.size() || q.size() != alg.size()) {
      throw ValidationError("partition size mismatch");
    }
    Partition result = p;
    result.merge_all(q);
    return result;
  }

}  // namespace malcev
