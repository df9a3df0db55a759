#pragma once

// Test fixtures and brute-force oracles. The oracles work on plain sets of
// label vectors and never call into the closure or congruence engines.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "malcev/json_io.hpp"

#ifndef MALCEV_CORPUS_DIR
#error "MALCEV_CORPUS_DIR must point at the corpus directory"
#endif

namespace malcev::testing {

  inline FiniteAlgebra corpus(std::string const& name) {
    return algebra_from_json(
        read_json_file(std::string(MALCEV_CORPUS_DIR) + "/" + name + ".json"));
  }

  inline std::vector<std::string> const& corpus_names() {
    static std::vector<std::string> const names = {
        "z2",     "z3",    "z4",    "klein4",          "s3",
        "lattice2", "groupoid3_seed1", "groupoid3_seed2", "groupoid3_seed3"};
    return names;
  }

  inline std::vector<std::string> small_corpus_names() {
    std::vector<std::string> out;
    for (auto const& n : corpus_names()) {
      if (corpus(n).size() <= 4) {
        out.push_back(n);
      }
    }
    return out;
  }

  inline FiniteAlgebra cyclic(std::size_t n) {
    std::vector<Elem> t;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        t.push_back(static_cast<Elem>((x + y) % n));
      }
    }
    return FiniteAlgebra("z" + std::to_string(n), n, {{"add", 2, t}});
  }

  ////////////////////////////////////////////////////////////////////////
  // Partitions by enumeration
  ////////////////////////////////////////////////////////////////////////

  // Every set partition of {0..n-1} as a restricted growth string.
  inline std::vector<std::vector<Elem>> all_set_partitions(std::size_t n) {
    std::vector<std::vector<Elem>> out;
    std::vector<Elem>              a(n, 0);
    if (n == 0) {
      return {{}};
    }
    std::function<void(std::size_t, Elem)> rec = [&](std::size_t i, Elem mx) {
      if (i == n) {
        out.push_back(a);
        return;
      }
      for (Elem b = 0; b <= mx + 1; ++b) {
        a[i] = b;
        rec(i + 1, std::max(mx, b));
      }
    };
    rec(1, 0);
    return out;
  }

  inline Partition from_labels(std::vector<Elem> const& lab) {
    Partition p(lab.size());
    for (std::size_t i = 0; i < lab.size(); ++i) {
      for (std::size_t j = i + 1; j < lab.size(); ++j) {
        if (lab[i] == lab[j]) {
          p.merge(static_cast<Elem>(i), static_cast<Elem>(j));
        }
      }
    }
    return p;
  }

  // Compatibility straight from the definition: related argument tuples
  // give related results.
  inline bool compatible_by_definition(FiniteAlgebra const&     alg,
                                       std::vector<Elem> const& lab) {
    std::size_t const n = alg.size();
    for (std::size_t o = 0; o < alg.number_of_operations(); ++o) {
      std::size_t const  ar = alg.operation(o).arity;
      std::size_t        total = 1;
      for (std::size_t j = 0; j < ar; ++j) {
        total *= n;
      }
      for (std::size_t s = 0; s < total; ++s) {
        for (std::size_t t = 0; t < total; ++t) {
          std::vector<Elem> a(ar), b(ar);
          std::size_t       x = s, y = t;
          bool              related = true;
          for (std::size_t j = ar; j-- > 0;) {
            a[j] = static_cast<Elem>(x % n);
            b[j] = static_cast<Elem>(y % n);
            x /= n;
            y /= n;
            related = related && lab[a[j]] == lab[b[j]];
          }
          if (related && lab[alg.apply(o, a)] != lab[alg.apply(o, b)]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  inline std::vector<Partition> congruences_by_enumeration(
      FiniteAlgebra const& alg) {
    std::vector<Partition> out;
    for (auto const& lab : all_set_partitions(alg.size())) {
      if (compatible_by_definition(alg, lab)) {
        out.push_back(from_labels(lab));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Least compatible partition containing the pairs.
  inline Partition cg_by_enumeration(
      FiniteAlgebra const& alg, std::vector<std::pair<Elem, Elem>> const& pairs) {
    std::optional<Partition> best;
    for (auto const& lab : all_set_partitions(alg.size())) {
      bool ok = std::all_of(pairs.begin(), pairs.end(), [&](auto const& pr) {
        return lab[pr.first] == lab[pr.second];
      });
      if (ok && compatible_by_definition(alg, lab)) {
        auto p = from_labels(lab);
        if (!best || best->contains(p)) {
          best = p;
        }
      }
    }
    return *best;
  }

  ////////////////////////////////////////////////////////////////////////
  // Cube relations as plain sets
  ////////////////////////////////////////////////////////////////////////

  using LabelSet = std::set<std::vector<Elem>>;

  inline LabelSet as_set(CubeRelation const& r) {
    LabelSet s;
    for (auto const& c : r.cubes()) {
      s.insert(c.labels);
    }
    return s;
  }

  inline CubeRelation as_relation(std::size_t n, std::size_t k,
                                  LabelSet const& s) {
    std::vector<LabeledCube<Elem>> cubes;
    for (auto const& l : s) {
      cubes.emplace_back(CubeShape::standard(k), l);
    }
    return CubeRelation::from_cubes(n, CubeShape::standard(k), cubes);
  }

  inline std::vector<Elem> naive_sym(std::vector<Elem> const& c, std::size_t p) {
    std::vector<Elem> o(c.size());
    for (std::size_t v = 0; v < c.size(); ++v) {
      o[v] = c[v ^ (std::size_t(1) << p)];
    }
    return o;
  }

  inline std::vector<Elem> naive_refl(std::vector<Elem> const& c, std::size_t p,
                                      unsigned j) {
    std::size_t const m = std::size_t(1) << p;
    std::vector<Elem> o(c.size());
    for (std::size_t v = 0; v < c.size(); ++v) {
      o[v] = c[j ? (v | m) : (v & ~m)];
    }
    return o;
  }

  inline LabelSet naive_sym_refl(LabelSet s, std::size_t k) {
    bool grew = true;
    while (grew) {
      grew = false;
      LabelSet add;
      for (auto const& c : s) {
        for (std::size_t p = 0; p < k; ++p) {
          add.insert(naive_sym(c, p));
          add.insert(naive_refl(c, p, 0));
          add.insert(naive_refl(c, p, 1));
        }
      }
      for (auto const& c : add) {
        grew |= s.insert(c).second;
      }
    }
    return s;
  }

  // Images of every operation on every tuple of members.
  inline LabelSet naive_op_images(FiniteAlgebra const& alg, LabelSet const& s,
                                 std::size_t V) {
    LabelSet                        out;
    std::vector<std::vector<Elem>> members(s.begin(), s.end());
    for (std::size_t o = 0; o < alg.number_of_operations(); ++o) {
      std::size_t const ar = alg.operation(o).arity;
      if (ar == 0) {
        if (!s.empty()) {
          out.insert(std::vector<Elem>(V, alg.apply(o, {})));
        }
        continue;
      }
      if (s.empty()) {
        continue;
      }
      std::vector<std::size_t> idx(ar, 0);
      std::vector<Elem>        args(ar);
      while (true) {
        std::vector<Elem> r(V);
        for (std::size_t v = 0; v < V; ++v) {
          for (std::size_t j = 0; j < ar; ++j) {
            args[j] = members[idx[j]][v];
          }
          r[v] = alg.apply(o, args);
        }
        out.insert(std::move(r));
        std::size_t j = 0;
        while (j < ar && ++idx[j] == members.size()) {
          idx[j++] = 0;
        }
        if (j == ar) {
          break;
        }
      }
    }
    return out;
  }

  // Faces along position p as (face0, face1) label vectors.
  inline std::pair<std::vector<Elem>, std::vector<Elem>>
  naive_faces(std::vector<Elem> const& c, std::size_t p) {
    std::vector<Elem> f0, f1;
    for (std::size_t v = 0; v < c.size(); ++v) {
      if (!((v >> p) & 1)) {
        f0.push_back(c[v]);
        f1.push_back(c[v | (std::size_t(1) << p)]);
      }
    }
    return {f0, f1};
  }

  inline std::vector<Elem> naive_glue(std::vector<Elem> const& f0,
                                      std::vector<Elem> const& f1,
                                      std::size_t p, std::size_t V) {
    std::vector<Elem> c(V);
    std::size_t       g = 0;
    for (std::size_t v = 0; v < V; ++v) {
      if (!((v >> p) & 1)) {
        c[v]                             = f0[g];
        c[v | (std::size_t(1) << p)]     = f1[g];
        ++g;
      }
    }
    return c;
  }

  // Least set containing g closed under sym, refl, every operation and
  // composition of face pairs in every direction: the higher-dimensional
  // congruence generated by g, straight from the definition.
  inline LabelSet naive_theta(FiniteAlgebra const& alg, LabelSet s,
                             std::size_t k) {
    std::size_t const V = std::size_t(1) << k;
    bool              grew = true;
    while (grew) {
      grew = false;
      LabelSet add = naive_sym_refl(s, k);
      for (auto const& c : naive_op_images(alg, s, V)) {
        add.insert(c);
      }
      for (std::size_t p = 0; p < k; ++p) {
        std::map<std::vector<Elem>, std::vector<std::vector<Elem>>> by_first;
        for (auto const& c : s) {
          auto [f0, f1] = naive_faces(c, p);
          by_first[f0].push_back(f1);
        }
        for (auto const& c : s) {
          auto [f0, f1] = naive_faces(c, p);
          auto it       = by_first.find(f1);
          if (it != by_first.end()) {
            for (auto const& f2 : it->second) {
              add.insert(naive_glue(f0, f2, p, V));
            }
          }
        }
      }
      for (auto const& c : add) {
        grew |= s.insert(c).second;
      }
    }
    return s;
  }

  // Least set containing g closed under sym, refl and every operation.
  inline LabelSet naive_tolerance(FiniteAlgebra const& alg, LabelSet s,
                                 std::size_t k) {
    std::size_t const V    = std::size_t(1) << k;
    bool              grew = true;
    while (grew) {
      grew        = false;
      LabelSet add = naive_sym_refl(s, k);
      for (auto const& c : naive_op_images(alg, s, V)) {
        add.insert(c);
      }
      for (auto const& c : add) {
        grew |= s.insert(c).second;
      }
    }
    return s;
  }

  inline LabelSet pair_generators(std::size_t, std::size_t k, std::size_t p,
                                 std::vector<std::pair<Elem, Elem>> const& prs) {
    LabelSet s;
    for (auto [x, y] : prs) {
      std::vector<Elem> c(std::size_t(1) << k);
      for (std::size_t v = 0; v < c.size(); ++v) {
        c[v] = ((v >> p) & 1) ? y : x;
      }
      s.insert(c);
    }
    return s;
  }

  inline std::vector<Elem> random_cube(std::mt19937& rng, std::size_t n,
                                       std::size_t k) {
    std::uniform_int_distribution<Elem> d(0, static_cast<Elem>(n - 1));
    std::vector<Elem> c(std::size_t(1) << k);
    for (auto& x : c) {
      x = d(rng);
    }
    return c;
  }

  ////////////////////////////////////////////////////////////////////////
  // Centrality and commutators by enumeration
  ////////////////////////////////////////////////////////////////////////

  // A cube violates centrality in position p when exactly one of its lines
  // in that direction is outside the partition.
  inline bool naive_violates(std::vector<Elem> const& c, std::size_t p,
                             std::vector<Elem> const& lab) {
    auto [f0, f1]   = naive_faces(c, p);
    std::size_t out = 0;
    for (std::size_t g = 0; g < f0.size(); ++g) {
      out += lab[f0[g]] != lab[f1[g]];
    }
    return out == 1;
  }

  // Meet of every congruence against which no cube of r violates
  // centrality in position p.
  inline Partition naive_commutator(FiniteAlgebra const& alg, LabelSet const& r,
                                    std::size_t p) {
    std::size_t const n = alg.size();
    std::vector<Elem> best(n, 0);  // full relation
    for (auto const& lab : all_set_partitions(n)) {
      if (!compatible_by_definition(alg, lab)) {
        continue;
      }
      bool central = std::none_of(r.begin(), r.end(), [&](auto const& c) {
        return naive_violates(c, p, lab);
      });
      if (central) {
        // Meet by pairing labels.
        std::map<std::pair<Elem, Elem>, Elem> ids;
        std::vector<Elem>                     m(n);
        for (std::size_t x = 0; x < n; ++x) {
          auto key = std::pair(best[x], lab[x]);
          auto it  = ids.emplace(key, static_cast<Elem>(ids.size())).first;
          m[x]     = it->second;
        }
        best = m;
      }
    }
    return from_labels(best);
  }

  inline LabelSet naive_commutator_generators(
      FiniteAlgebra const& alg, std::vector<Partition> const& thetas) {
    std::size_t const k = thetas.size();
    LabelSet           g;
    for (std::size_t p = 0; p < k; ++p) {
      for (Elem x = 0; x < alg.size(); ++x) {
        for (Elem y = 0; y < alg.size(); ++y) {
          if (thetas[p].same(x, y)) {
            auto s = pair_generators(alg.size(), k, p, {{x, y}});
            g.insert(s.begin(), s.end());
          }
        }
      }
    }
    return g;
  }

}  // namespace malcev::testing
