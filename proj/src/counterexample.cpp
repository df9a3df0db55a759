#include "malcev/counterexample.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "malcev/error.hpp"
#include "malcev/parallel.hpp"

namespace malcev {

  ////////////////////////////////////////////////////////////////////////
  // Families
  ////////////////////////////////////////////////////////////////////////

  Family Family::C() {
    Family f;
    f._name    = "C";
    f._k       = 0;
    f._arity   = 3;
    f._special = 3;
    f._tag     = "s";
    return f;
  }

  Family Family::Ck(std::size_t k) {
    if (k < 2) {
      throw ValidationError("family Ck needs k >= 2, got " + std::to_string(k));
    }
    if (k > 16) {
      throw ValidationError("family Ck: k too large");
    }
    Family f;
    f._name    = "Ck";
    f._k       = k;
    f._arity   = k + 1;
    f._special = k + 2;
    f._tag     = "t_" + std::to_string(k);
    return f;
  }

  bool Family::in_special_domain(std::span<std::uint64_t const> xs) const {
    if (xs.size() != _arity) {
      return false;
    }
    if (_name == "C") {
      return (xs[0] == 0 && xs[1] == 0 && xs[2] == 0)
             || (xs[0] == 1 && xs[1] == 2 && xs[2] == 0);
    }
    bool const head0 = xs[0] == 0 && xs[1] == 0;
    bool const head1 = xs[0] == 1 && xs[1] == 2;
    if (!head0 && !head1) {
      return false;
    }
    bool all_high = head1;
    for (std::size_t j = 2; j < _arity; ++j) {
      if (xs[j] == j + 1) {
        continue;
      }
      if (xs[j] != 0) {
        return false;
      }
      all_high = false;
    }
    return !all_high;
  }

  FreeValue Family::eval(FreeStore& store, std::span<FreeValue const> args) const {
    if (args.size() != _arity) {
      throw ValidationError(_tag + " takes " + std::to_string(_arity)
                            + " arguments, got " + std::to_string(args.size()));
    }
    std::vector<std::uint64_t> xs;
    xs.reserve(args.size());
    for (auto a : args) {
      if (!store.is_nat(a)) {
        return store.app(_tag, args);
      }
      xs.push_back(store.nat_value(a));
    }
    if (in_special_domain(xs)) {
      return store.nat(_special);
    }
    return store.app(_tag, args);
  }

  std::vector<std::uint64_t> Family::default_seeds() const {
    std::vector<std::uint64_t> s;
    for (std::uint64_t m = 0; m <= _special; ++m) {
      s.push_back(m);
    }
    return s;
  }

  FreeValue eval_C(FreeStore& store, FreeValue x, FreeValue y, FreeValue z) {
    FreeValue const args[] = {x, y, z};
    return Family::C().eval(store, args);
  }

  FreeValue eval_Ck(FreeStore& store, std::size_t k,
                    std::span<FreeValue const> args) {
    return Family::Ck(k).eval(store, args);
  }

  FreeCube apply_family(FreeStore& store, Family const& fam,
                        std::span<FreeCube const> cubes) {
    if (cubes.empty()) {
      throw ValidationError("apply_family: no argument cubes");
    }
    return apply_vertexwise<FreeValue>(
        [&](std::span<FreeValue const> a) { return fam.eval(store, a); }, cubes,
        cubes.front().shape);
  }

  FreeCube free_generator(FreeStore& store, CubeShape const& shape, Coord i,
                          std::uint64_t x, std::uint64_t y) {
    return cube_from_pair(shape, i, store.nat(x), store.nat(y));
  }

  std::optional<FreeViolation> identity_violation(FreeCube const& cube,
                                                  Coord           direction) {
    if (cube.dimension() < 2) {
      throw ValidationError("centrality needs dimension at least 2");
    }
    auto              ls   = lines(cube, direction);
    std::size_t const need = ls.labels.size() - 1;
    FreeViolation     v;
    std::size_t       out = 0;
    for (std::size_t g = 0; g < ls.labels.size(); ++g) {
      auto const& [a, b] = ls.labels[g];
      if (a == b) {
        v.delta_pairs.push_back(g);
      } else {
        v.offending_pair = {a, b};
        ++out;
      }
    }
    if (v.delta_pairs.size() != need || out != 1) {
      return std::nullopt;
    }
    v.cube      = cube;
    v.direction = direction;
    return v;
  }

  ////////////////////////////////////////////////////////////////////////
  // Witnesses
  ////////////////////////////////////////////////////////////////////////

  namespace {
    FreeViolation require_violation(FreeCube const& cube, Coord dir,
                                    char const* what) {
      auto v = identity_violation(cube, dir);
      if (!v) {
        throw std::logic_error(std::string(what) + " is not a violation");
      }
      return *v;
    }
  }  // namespace

  TcWitness direct_tc_witness(FreeStore& store) {
    Family const    fam   = Family::C();
    CubeShape const shape = CubeShape::standard(2);
    FreeCube const  args[] = {free_generator(store, shape, 1, 0, 1),
                              free_generator(store, shape, 1, 0, 2),
                              free_generator(store, shape, 0, 0, 1)};
    TcWitness w;
    w.square         = apply_family(store, fam, args);
    w.display_square = transpose(w.square, Coord(0), Coord(1));
    w.violation      = require_violation(w.square, 1, "direct witness");
    return w;
  }

  HyperWitness glued_hyper_witness(FreeStore& store) {
    Family const    fam   = Family::C();
    CubeShape const shape = CubeShape::standard(2);
    FreeValue const zero  = store.nat(0);
    FreeValue const one   = store.nat(1);
    FreeCube const  f0    = free_generator(store, shape, 0, 0, 1);
    FreeCube const  f1    = free_generator(store, shape, 1, 0, 1);
    FreeCube const  g     = free_generator(store, shape, 0, 0, 2);

    HyperWitness w;
    FreeCube const a1[] = {f0, constant_cube(shape, zero), f1};
    FreeCube const a2[] = {constant_cube(shape, one), g, f1};
    w.square1           = apply_family(store, fam, a1);
    w.square2           = apply_family(store, fam, a2);

    auto [s1_0, s1_1] = faces(w.square1, 0);
    auto [s2_0, s2_1] = faces(w.square2, 0);
    if (s1_1 != s2_0) {
      throw std::logic_error("hyper witness squares do not share a face");
    }
    w.shared_face = s1_1;
    // (a -> b) and (b -> c) in direction 0 give (a -> c).
    w.glued     = glue_faces(s1_0, s2_1, 0);
    w.oriented  = transpose(w.glued, Coord(0), Coord(1));
    w.violation = require_violation(w.oriented, 1, "glued square");
    return w;
  }

  EtaWitness eta_witness(FreeStore& store, std::size_t k) {
    Family const    fam   = Family::Ck(k);
    CubeShape const shape = CubeShape::standard(k);
    std::vector<FreeCube> args;
    args.push_back(free_generator(store, shape, 0, 0, 1));
    args.push_back(free_generator(store, shape, 0, 0, 2));
    for (std::size_t i = 1; i < k; ++i) {
      args.push_back(free_generator(store, shape, Coord(i), 0, i + 2));
    }
    EtaWitness w;
    w.k   = k;
    w.eta = apply_family(store, fam, args);

    FreeValue const   special = store.nat(k + 2);
    std::size_t const top     = shape.number_of_vertices() - 1;
    for (std::size_t v = 0; v <= top; ++v) {
      bool const is_special = w.eta.labels[v] == special;
      if (is_special != (v != top)) {
        throw std::logic_error("eta has an unexpected vertex "
                               + std::to_string(v));
      }
      w.special_vertices += is_special;
    }
    w.violation = require_violation(w.eta, Coord(k - 1), "eta");
    return w;
  }

  ////////////////////////////////////////////////////////////////////////
  // Bounded search
  ////////////////////////////////////////////////////////////////////////

  namespace {
    constexpr std::size_t max_search_depth = 4;

    struct CubeHash {
      std::size_t V;
      std::vector<FreeValue> const* labels;
      std::size_t operator()(std::size_t e) const noexcept {
        std::size_t h = 0;
        for (std::size_t v = 0; v < V; ++v) {
          h = h * 1000003u ^ (*labels)[e * V + v].id;
        }
        return h;
      }
    };
    struct CubeEq {
      std::size_t V;
      std::vector<FreeValue> const* labels;
      bool operator()(std::size_t a, std::size_t b) const noexcept {
        return std::equal(labels->begin() + a * V, labels->begin() + (a + 1) * V,
                          labels->begin() + b * V);
      }
    };

    struct Setup {
      std::size_t              k = 0, r = 0, V = 0, m = 0;
      CubeShape                shape;
      std::vector<std::uint64_t> seeds;
      std::vector<FreeCube>    generators;   // non-constant, in order
      std::vector<std::size_t> gen_coord;    // position of each generator
      std::vector<FreeCube>    constants;
      // Restricted mode: generator indices per coordinate.
      std::vector<std::vector<std::size_t>> per_coord;
      // Lifted mode: explicit selections.
      std::vector<std::vector<std::size_t>> selections;
      bool                     restricted = true;
      std::uint64_t            number_of_selections = 0;
    };

    std::uint64_t checked_pow(std::uint64_t b, std::size_t e) {
      std::uint64_t out = 1;
      for (std::size_t i = 0; i < e; ++i) {
        if (b != 0 && out > UINT64_MAX / b) {
          throw ResourceLimitError("search: term count overflows");
        }
        out *= b;
      }
      return out;
    }

    void next_combination_all(std::size_t n, std::size_t m,
                              std::vector<std::vector<std::size_t>>& out,
                              std::vector<std::size_t> const&        coord,
                              std::size_t k, bool need_cover) {
      if (m > n) {
        return;
      }
      std::vector<std::size_t> c(m);
      for (std::size_t i = 0; i < m; ++i) {
        c[i] = i;
      }
      while (true) {
        std::uint32_t cover = 0;
        for (auto e : c) {
          cover |= 1u << coord[e];
        }
        if (!need_cover || cover == (1u << k) - 1) {
          out.push_back(c);
        }
        std::size_t i = m;
        while (i > 0 && c[i - 1] == n - m + i - 1) {
          --i;
        }
        if (i == 0) {
          return;
        }
        ++c[i - 1];
        for (std::size_t j = i; j < m; ++j) {
          c[j] = c[j - 1] + 1;
        }
      }
    }

    Setup make_setup(FreeStore& store, Family const& fam, std::size_t k,
                     SearchOptions const& opts, bool need_cover) {
      if (k < 2) {
        throw ValidationError("search needs cube dimension k >= 2");
      }
      if (k > 6) {
        throw ValidationError("search: cube dimension too large");
      }
      if (opts.depth > max_search_depth) {
        throw ValidationError("search depth is bounded by "
                              + std::to_string(max_search_depth));
      }
      Setup s;
      s.k     = k;
      s.r     = fam.arity();
      s.shape = CubeShape::standard(k);
      s.V     = s.shape.number_of_vertices();
      s.m     = opts.max_leaves == 0 ? k : opts.max_leaves;
      if (s.m < k && need_cover) {
        throw ValidationError("max_leaves must be at least k");
      }
      s.seeds = opts.seeds.empty() ? fam.default_seeds() : opts.seeds;
      std::sort(s.seeds.begin(), s.seeds.end());
      s.seeds.erase(std::unique(s.seeds.begin(), s.seeds.end()), s.seeds.end());
      if (s.seeds.empty()) {
        throw ValidationError("search needs at least one seed");
      }
      s.per_coord.resize(k);
      for (std::size_t p = 0; p < k; ++p) {
        for (auto x : s.seeds) {
          for (auto y : s.seeds) {
            if (x != y) {
              s.per_coord[p].push_back(s.generators.size());
              s.generators.push_back(
                  free_generator(store, s.shape, Coord(p), x, y));
              s.gen_coord.push_back(p);
            }
          }
        }
      }
      for (auto x : s.seeds) {
        s.constants.push_back(constant_cube(s.shape, store.nat(x)));
      }
      s.restricted = need_cover && s.m == k;
      if (s.restricted) {
        s.number_of_selections = checked_pow(s.per_coord[0].size(), k);
      } else {
        next_combination_all(s.generators.size(), s.m, s.selections,
                             s.gen_coord, k, need_cover);
        s.number_of_selections = s.selections.size();
      }
      return s;
    }

    void selection_at(Setup const& s, std::uint64_t i,
                      std::vector<std::size_t>& out) {
      out.clear();
      if (!s.restricted) {
        out = s.selections[i];
        return;
      }
      std::uint64_t const n = s.per_coord[0].size();
      for (std::size_t p = 0; p < s.k; ++p) {
        out.push_back(s.per_coord[p][i % n]);
        i /= n;
      }
    }

    // Per-thread state and counters for one chunk of selections.
    struct Worker {
      FreeStore&    store;
      Family const& fam;
      Setup const&  s;
      SearchOptions const& opts;

      Worker(FreeStore& st, Family const& f, Setup const& se,
             SearchOptions const& o)
          : store(st), fam(f), s(se), opts(o) {}

      std::uint64_t                terms_total     = 0;
      std::uint64_t                terms_evaluated = 0;
      std::uint64_t                violations      = 0;
      std::optional<FreeViolation> first;

      std::vector<FreeValue> pool;  // flat, V per cube
      std::vector<FreeValue> args;

      std::size_t pool_size() const { return pool.size() / s.V; }

      FreeCube cube_of(std::size_t e) const {
        return FreeCube(s.shape, std::vector<FreeValue>(
                                     pool.begin() + e * s.V,
                                     pool.begin() + (e + 1) * s.V));
      }

      void note(FreeCube const& c, std::uint64_t mult = 1) {
        if (auto v = identity_violation(c, Coord(s.k - 1))) {
          violations += mult;
          if (!first) {
            first = std::move(v);
          }
        }
      }

      // Seeds the pool with the selection's leaves and the constants.
      void start(std::vector<std::size_t> const& sel) {
        pool.clear();
        for (auto g : sel) {
          auto const& l = s.generators[g].labels;
          pool.insert(pool.end(), l.begin(), l.end());
        }
        for (auto const& c : s.constants) {
          pool.insert(pool.end(), c.labels.begin(), c.labels.end());
        }
        std::size_t const n = pool_size();
        terms_total += n;
        terms_evaluated += n;
        for (std::size_t e = 0; e < n; ++e) {
          note(cube_of(e));
        }
      }

      // Applies the operation to every r-tuple over the current pool; calls
      // sink(labels) with each result.
      template <typename Sink>
      void each_application(std::size_t n, Sink&& sink) {
        std::vector<std::size_t> idx(s.r, 0);
        std::vector<FreeValue>   out(s.V);
        args.resize(s.r);
        while (true) {
          for (std::size_t v = 0; v < s.V; ++v) {
            for (std::size_t j = 0; j < s.r; ++j) {
              args[j] = pool[idx[j] * s.V + v];
            }
            out[v] = fam.eval(store, args);
          }
          sink(out);
          std::size_t j = 0;
          while (j < s.r && ++idx[j] == n) {
            idx[j++] = 0;
          }
          if (j == s.r) {
            return;
          }
        }
      }

      // One explicit level: evaluates, checks, and adds new cubes.
      void explicit_level(bool grow) {
        std::size_t const   n     = pool_size();
        std::uint64_t const count = checked_pow(n, s.r);
        if (grow && count > opts.max_intermediate) {
          throw ResourceLimitError(
              "search: intermediate level has " + std::to_string(count)
              + " terms (guard " + std::to_string(opts.max_intermediate) + ")");
        }
        terms_total += count;
        terms_evaluated += count;
        std::vector<FreeValue> fresh;
        std::unordered_set<std::size_t, CubeHash, CubeEq> seen(
            0, CubeHash{s.V, &pool}, CubeEq{s.V, &pool});
        for (std::size_t e = 0; e < n; ++e) {
          seen.insert(e);
        }
        each_application(n, [&](std::vector<FreeValue> const& labels) {
          note(FreeCube(s.shape, labels));
          if (!grow) {
            return;
          }
          pool.insert(pool.end(), labels.begin(), labels.end());
          std::size_t const e = pool_size() - 1;
          if (!seen.insert(e).second) {
            pool.resize(pool.size() - s.V);
          }
        });
      }
    };

    ////////////////////////////////////////////////////////////////////////
    // Class-abstracted last level
    ////////////////////////////////////////////////////////////////////////

    // Cubes that agree on (dependency mask, direction-(k-1) line equality
    // mask, per-vertex code) behave identically as arguments of the last
    // application. Codes 0..bound-1 are those naturals; code `bound` is
    // every other value. The special domain only uses naturals < bound.
    struct LastLevel {
      Setup const&  s;
      Family const& fam;
      std::size_t   base = 0, half = 0, need = 0;
      std::uint32_t full_dep = 0;
      std::vector<bool>               special;  // indexed by packed codes
      std::vector<std::vector<bool>>  maybe;    // [position][code]

      struct Class {
        std::uint32_t              dep = 0, eq = 0;
        std::vector<std::uint8_t>  codes;
        std::uint64_t              count = 0;
        std::size_t                rep   = 0;
      };

      LastLevel(Setup const& s_, Family const& fam_) : s(s_), fam(fam_) {
        base     = fam.special_value() + 1;
        half     = s.V / 2;
        need     = half - 1;
        full_dep = (1u << s.k) - 1;
        std::size_t const total = checked_pow(base, s.r);
        if (total > (std::size_t(1) << 26)) {
          throw ResourceLimitError("search: special table too large");
        }
        special.assign(total, false);
        maybe.assign(s.r, std::vector<bool>(base, false));
        std::vector<std::uint64_t> xs(s.r);
        for (std::size_t t = 0; t < total; ++t) {
          std::size_t rest = t;
          bool        other = false;
          for (std::size_t j = 0; j < s.r; ++j) {
            xs[j] = rest % base;
            rest /= base;
            other |= xs[j] == base - 1;
          }
          if (!other && fam.in_special_domain(xs)) {
            special[t] = true;
            for (std::size_t j = 0; j < s.r; ++j) {
              maybe[j][xs[j]] = true;
            }
          }
        }
      }

      std::vector<Class> classify(FreeStore&                    store,
                                  std::vector<FreeValue> const& pool) const {
        std::size_t const  n = pool.size() / s.V;
        std::vector<Class> classes;
        std::unordered_map<std::string, std::size_t> index;
        std::unordered_map<std::uint32_t, std::uint8_t> code_of;
        std::uint8_t const other = static_cast<std::uint8_t>(base - 1);
        for (std::size_t e = 0; e < n; ++e) {
          Class c;
          c.codes.resize(s.V);
          FreeValue const* l = pool.data() + e * s.V;
          for (std::size_t v = 0; v < s.V; ++v) {
            auto it = code_of.find(l[v].id);
            if (it == code_of.end()) {
              std::uint8_t code = other;
              if (store.is_nat(l[v])) {
                auto x = store.nat_value(l[v]);
                if (x < base - 1) {
                  code = static_cast<std::uint8_t>(x);
                }
              }
              it = code_of.emplace(l[v].id, code).first;
            }
            c.codes[v] = it->second;
          }
          for (std::size_t p = 0; p < s.k; ++p) {
            std::size_t const bit = std::size_t(1) << p;
            for (std::size_t v = 0; v < s.V; ++v) {
              if (!(v & bit) && l[v] != l[v | bit]) {
                c.dep |= 1u << p;
                break;
              }
            }
          }
          for (std::size_t g = 0; g < half; ++g) {
            if (l[g] == l[g + half]) {
              c.eq |= 1u << g;
            }
          }
          std::string key(reinterpret_cast<char const*>(&c.dep), 4);
          key.append(reinterpret_cast<char const*>(&c.eq), 4);
          key.append(c.codes.begin(), c.codes.end());
          auto [it, fresh] = index.emplace(std::move(key), classes.size());
          if (fresh) {
            c.rep = e;
            classes.push_back(std::move(c));
          }
          ++classes[it->second].count;
        }
        return classes;
      }
    };

    struct LastLevelRun {
      LastLevel const&                       ll;
      std::vector<LastLevel::Class> const&   cls;
      std::size_t                            r, V, half, need;
      std::uint32_t                          lo_mask;
      // contrib[j][c][v] and possibly-special masks pm[j][c].
      std::vector<std::vector<std::vector<std::uint32_t>>> contrib;
      std::vector<std::vector<std::uint32_t>>               pm;
      std::vector<std::vector<std::uint32_t>>               idx;  // per depth
      std::vector<std::size_t>                              chosen;

      std::uint64_t evaluated  = 0;
      std::uint64_t violations = 0;
      std::optional<std::vector<std::size_t>> first;  // class per position

      LastLevelRun(LastLevel const& l, std::vector<LastLevel::Class> const& c)
          : ll(l), cls(c), r(l.s.r), V(l.s.V), half(l.half), need(l.need) {
        lo_mask = (half == 32) ? 0xffffffffu : ((1u << half) - 1);
        contrib.assign(r, std::vector<std::vector<std::uint32_t>>(cls.size()));
        pm.assign(r, std::vector<std::uint32_t>(cls.size(), 0));
        std::uint32_t stride = 1;
        for (std::size_t j = 0; j < r; ++j) {
          for (std::size_t c = 0; c < cls.size(); ++c) {
            auto& out = contrib[j][c];
            out.resize(V);
            for (std::size_t v = 0; v < V; ++v) {
              out[v] = cls[c].codes[v] * stride;
              if (ll.maybe[j][cls[c].codes[v]]) {
                pm[j][c] |= 1u << v;
              }
            }
          }
          stride *= static_cast<std::uint32_t>(ll.base);
        }
        idx.assign(r + 1, std::vector<std::uint32_t>(V, 0));
        chosen.assign(r, 0);
      }

      void run() { rec(0, 0, lo_mask, (V == 32) ? 0xffffffffu : ((1u << V) - 1), 1); }

      void rec(std::size_t j, std::uint32_t dep, std::uint32_t eq,
               std::uint32_t maybe, std::uint64_t mult) {
        if (j == r) {
          leaf(eq, mult);
          return;
        }
        std::size_t const remaining = r - j - 1;
        for (std::size_t c = 0; c < cls.size(); ++c) {
          std::uint32_t const d = dep | cls[c].dep;
          if (remaining == 0 && d != ll.full_dep) {
            continue;  // does not depend on every coordinate
          }
          std::uint32_t const e  = eq & cls[c].eq;
          std::uint32_t const pm_ = maybe & pm[j][c];
          std::uint32_t const u =
              (pm_ & (pm_ >> half) & lo_mask) | e;
          if (static_cast<std::size_t>(std::popcount(u)) < need) {
            continue;  // too few lines can still be equal
          }
          auto const& add = contrib[j][c];
          auto const& cur = idx[j];
          auto&       nxt = idx[j + 1];
          for (std::size_t v = 0; v < V; ++v) {
            nxt[v] = cur[v] + add[v];
          }
          chosen[j] = c;
          rec(j + 1, d, e, pm_, mult * cls[c].count);
        }
      }

      void leaf(std::uint32_t eq, std::uint64_t mult) {
        evaluated += mult;
        auto const&   ix = idx[r];
        std::uint32_t sp = 0;
        for (std::size_t v = 0; v < V; ++v) {
          sp |= std::uint32_t(ll.special[ix[v]]) << v;
        }
        std::uint32_t const lo = sp & lo_mask, hi = (sp >> half) & lo_mask;
        std::uint32_t const equal = (lo & hi) | (~lo & ~hi & eq & lo_mask);
        if (static_cast<std::size_t>(std::popcount(equal)) == need) {
          violations += mult;
          if (!first) {
            first = chosen;
          }
        }
      }
    };

    struct ChunkResult {
      std::uint64_t                terms_total = 0, terms_evaluated = 0,
                                   violations = 0;
      std::optional<FreeViolation> first;
    };

    SearchResult finish(Family const& fam, Setup const& s,
                        SearchOptions const&             opts,
                        std::vector<ChunkResult>&        chunks) {
      SearchResult res;
      res.family          = fam.name();
      res.k               = s.k;
      res.depth           = opts.depth;
      res.max_leaves      = s.m;
      res.seeds           = s.seeds;
      res.leaf_selections = s.number_of_selections;
      for (auto& c : chunks) {
        res.terms_total += c.terms_total;
        res.terms_evaluated += c.terms_evaluated;
        res.violations += c.violations;
        if (!res.first_violation && c.first) {
          res.first_violation = std::move(c.first);
        }
      }
      return res;
    }

    ////////////////////////////////////////////////////////////////////////
    // Depth 1, one generator per coordinate
    ////////////////////////////////////////////////////////////////////////

    // Every term depending on all coordinates contains the generator of the
    // last coordinate, whose lines are all non-constant. At depth 1 a root
    // line is therefore constant iff both of its ends hit the special
    // domain, and argument tuples can be enumerated position by position
    // across all selections at once. Each full-coverage tuple belongs to
    // exactly one selection.
    struct DepthOneRun {
      Setup const&     s;
      LastLevel const& ll;

      struct Item {
        std::size_t                generator = SIZE_MAX;  // SIZE_MAX: constant
        std::size_t                coord     = 0;
        std::vector<std::uint8_t>  codes;
      };
      std::vector<Item>                       items;
      std::vector<std::vector<std::uint32_t>> maybe;  // [position][item]
      std::vector<std::uint32_t>              stride;
      std::size_t                             half = 0, need = 0;
      std::uint32_t                           lo_mask = 0;

      DepthOneRun(FreeStore& store, Setup const& s_, LastLevel const& l)
          : s(s_), ll(l) {
        half    = s.V / 2;
        need    = half - 1;
        lo_mask = (1u << half) - 1;
        auto code = [&](FreeValue v) {
          auto const x = store.nat_value(v);
          return static_cast<std::uint8_t>(std::min<std::uint64_t>(x, ll.base - 1));
        };
        for (auto const& c : s.constants) {
          Item it;
          for (auto v : c.labels) {
            it.codes.push_back(code(v));
          }
          items.push_back(std::move(it));
        }
        for (std::size_t g = 0; g < s.generators.size(); ++g) {
          Item it;
          it.generator = g;
          it.coord     = s.gen_coord[g];
          for (auto v : s.generators[g].labels) {
            it.codes.push_back(code(v));
          }
          items.push_back(std::move(it));
        }
        maybe.assign(s.r, std::vector<std::uint32_t>(items.size(), 0));
        stride.assign(s.r, 1);
        for (std::size_t j = 0; j < s.r; ++j) {
          if (j > 0) {
            stride[j] = stride[j - 1] * static_cast<std::uint32_t>(ll.base);
          }
          for (std::size_t i = 0; i < items.size(); ++i) {
            for (std::size_t v = 0; v < s.V; ++v) {
              if (ll.maybe[j][items[i].codes[v]]) {
                maybe[j][i] |= 1u << v;
              }
            }
          }
        }
      }

      struct State {
        std::vector<std::size_t>   assigned;  // generator per coord, or SIZE_MAX
        std::vector<std::uint32_t> idx;
        std::vector<std::size_t>   chosen;
        std::uint64_t              reached    = 0;
        std::uint64_t              violations = 0;
        std::optional<std::vector<std::size_t>> first;
      };

      bool admissible(State const& st, std::size_t j, std::size_t i,
                      std::uint32_t mb, std::size_t open_coords) const {
        Item const& it = items[i];
        if (it.generator != SIZE_MAX) {
          auto const a = st.assigned[it.coord];
          if (a != SIZE_MAX && a != it.generator) {
            return false;
          }
          if (a == SIZE_MAX) {
            --open_coords;
          }
        }
        if (open_coords > s.r - j - 1) {
          return false;
        }
        std::uint32_t const m = mb & maybe[j][i];
        return static_cast<std::size_t>(
                   std::popcount((m & (m >> half)) & lo_mask))
               >= need;
      }

      void rec(State& st, std::size_t j, std::uint32_t mb,
               std::size_t open_coords) const {
        if (j == s.r) {
          ++st.reached;
          std::uint32_t sp = 0;
          for (std::size_t v = 0; v < s.V; ++v) {
            sp |= std::uint32_t(ll.special[st.idx[v]]) << v;
          }
          if (static_cast<std::size_t>(
                  std::popcount((sp & (sp >> half)) & lo_mask))
              == need) {
            ++st.violations;
            if (!st.first) {
              st.first = st.chosen;
            }
          }
          return;
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
          step(st, j, i, mb, open_coords);
        }
      }

      void step(State& st, std::size_t j, std::size_t i, std::uint32_t mb,
                std::size_t open_coords) const {
        if (!admissible(st, j, i, mb, open_coords)) {
          return;
        }
        Item const& it    = items[i];
        bool const  fresh = it.generator != SIZE_MAX
                           && st.assigned[it.coord] == SIZE_MAX;
        if (fresh) {
          st.assigned[it.coord] = it.generator;
        }
        for (std::size_t v = 0; v < s.V; ++v) {
          st.idx[v] += it.codes[v] * stride[j];
        }
        st.chosen[j] = i;
        rec(st, j + 1, mb & maybe[j][i], open_coords - (fresh ? 1 : 0));
        for (std::size_t v = 0; v < s.V; ++v) {
          st.idx[v] -= it.codes[v] * stride[j];
        }
        if (fresh) {
          st.assigned[it.coord] = SIZE_MAX;
        }
      }

      State fresh_state() const {
        State st;
        st.assigned.assign(s.k, SIZE_MAX);
        st.idx.assign(s.V, 0);
        st.chosen.assign(s.r, 0);
        return st;
      }
    };

    SearchResult search_depth_one(FreeStore& store, Family const& fam,
                                  Setup const& s, LastLevel const& ll,
                                  SearchOptions const& opts) {
      DepthOneRun const run(store, s, ll);
      std::uint32_t const all = (s.V == 32) ? 0xffffffffu : ((1u << s.V) - 1);
      std::size_t const   n   = run.items.size();
      std::vector<ChunkResult> chunks(number_of_chunks(n, opts.threads));
      std::vector<std::optional<std::vector<std::size_t>>> firsts(chunks.size());

      // Chunks split the choice at position 0.
      parallel_chunks(n, opts.threads, [&](std::size_t begin, std::size_t end,
                                           std::size_t chunk) {
        auto st = run.fresh_state();
        for (std::size_t i = begin; i < end; ++i) {
          run.step(st, 0, i, all, s.k);
        }
        chunks[chunk].terms_evaluated = st.reached;
        chunks[chunk].violations      = st.violations;
        firsts[chunk]                 = st.first;
      });

      for (std::size_t c = 0; c < chunks.size(); ++c) {
        if (firsts[c]) {
          std::vector<FreeCube> args;
          for (auto i : *firsts[c]) {
            auto const& it = run.items[i];
            args.push_back(it.generator == SIZE_MAX
                               ? s.constants[i]
                               : s.generators[it.generator]);
          }
          auto v = identity_violation(apply_family(store, fam, args),
                                      Coord(s.k - 1));
          if (!v) {
            throw std::logic_error("search: depth-one reduction disagrees");
          }
          chunks[c].first = std::move(v);
        }
      }
      // Leaves and constants never violate on their own; they are still
      // checked.
      for (auto const& g : s.generators) {
        if (identity_violation(g, Coord(s.k - 1))) {
          throw std::logic_error("search: a generator violates centrality");
        }
      }
      std::uint64_t const pool = s.k + s.constants.size();
      chunks[0].terms_total =
          s.number_of_selections * (pool + checked_pow(pool, s.r));
      return finish(fam, s, opts, chunks);
    }
  }  // namespace

  SearchResult search_polyk_violation(FreeStore& store, Family const& fam,
                                      std::size_t k, SearchOptions opts) {
    Setup const     s = make_setup(store, fam, k, opts, true);
    LastLevel const ll(s, fam);
    if (opts.depth == 1 && s.restricted && opts.factorized) {
      return search_depth_one(store, fam, s, ll, opts);
    }
    std::size_t const n      = static_cast<std::size_t>(s.number_of_selections);
    std::size_t const nchunk = number_of_chunks(n, opts.threads);
    std::vector<ChunkResult> chunks(nchunk);

    parallel_chunks(n, opts.threads, [&](std::size_t begin, std::size_t end,
                                         std::size_t chunk) {
      Worker w(store, fam, s, opts);
      std::vector<std::size_t> sel;
      for (std::size_t i = begin; i < end; ++i) {
        selection_at(s, i, sel);
        w.start(sel);
        if (opts.depth == 0) {
          continue;
        }
        for (std::size_t level = 1; level < opts.depth; ++level) {
          w.explicit_level(true);
        }
        std::size_t const   pn    = w.pool_size();
        w.terms_total += checked_pow(pn, s.r);
        auto const   cls = ll.classify(store, w.pool);
        LastLevelRun run(ll, cls);
        run.run();
        w.terms_evaluated += run.evaluated;
        w.violations += run.violations;
        if (run.first && !w.first) {
          std::vector<FreeCube> args;
          for (auto c : *run.first) {
            args.push_back(w.cube_of(cls[c].rep));
          }
          auto cube = apply_family(store, fam, args);
          auto v    = identity_violation(cube, Coord(s.k - 1));
          if (!v) {
            throw std::logic_error("search: class abstraction disagrees");
          }
          w.first = std::move(v);
        }
      }
      chunks[chunk] = {w.terms_total, w.terms_evaluated, w.violations,
                       std::move(w.first)};
    });
    return finish(fam, s, opts, chunks);
  }

  SearchResult search_polyk_violation_naive(FreeStore& store, Family const& fam,
                                            std::size_t k, SearchOptions opts) {
    Setup const s = make_setup(store, fam, k, opts, false);
    std::vector<ChunkResult> chunks(1);
    Worker                   w{store, fam, s, opts};
    for (auto const& sel : s.selections) {
      w.start(sel);
      for (std::size_t level = 1; level <= opts.depth; ++level) {
        w.explicit_level(level < opts.depth);
      }
    }
    chunks[0] = {w.terms_total, w.terms_evaluated, w.violations,
                 std::move(w.first)};
    return finish(fam, s, opts, chunks);
  }

  bool WitnessReport::ok() const {
    if (!found_tc_violation || search.violations != 0) {
      return false;
    }
    return family != "C" || hyper.has_value();
  }

  WitnessReport witness_report(FreeStore& store, Family const& fam,
                               std::size_t k, SearchOptions const& opts) {
    WitnessReport rep;
    rep.family = fam.name();
    rep.k      = k;
    if (fam.name() == "C") {
      if (k != 2) {
        throw ValidationError("family C is reported at k = 2");
      }
      auto tc                = direct_tc_witness(store);
      rep.found_tc_violation = true;
      rep.tc_violation       = tc.violation;
      rep.tc_display         = tc.display_square;
      rep.hyper              = glued_hyper_witness(store);
    } else {
      if (k != fam.parameter()) {
        throw ValidationError("family Ck is reported at its own k");
      }
      rep.eta                = eta_witness(store, k);
      rep.found_tc_violation = true;
      rep.tc_violation       = rep.eta->violation;
    }
    rep.search = search_polyk_violation(store, fam, k, opts);
    return rep;
  }

}  // namespace malcev
