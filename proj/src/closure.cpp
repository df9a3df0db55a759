#include "malcev/closure.hpp"

#include <algorithm>
#include <unordered_map>

#include "malcev/parallel.hpp"

namespace malcev {

  std::string to_string(Route r) {
    return r == Route::basic_ops ? "basic-ops" : "pol-k";
  }

  Route route_from_string(std::string const& s) {
    if (s == "basic-ops" || s == "basic") {
      return Route::basic_ops;
    }
    if (s == "pol-k" || s == "polyk") {
      return Route::pol_k;
    }
    throw ValidationError("unknown route '" + s + "'");
  }

  void check_cube_space(CubeCodec const& codec, ExecOptions const& opts) {
    if (!opts.force && codec.space_size() > opts.max_cubes) {
      throw ResourceLimitError(
          "cube space |A|^(2^k) = " + std::to_string(codec.space_size())
          + " exceeds the limit " + std::to_string(opts.max_cubes)
          + " (use --force or MALCEV_MAX_CUBES)");
    }
  }

  namespace {

    // Insertion-ordered cube set that also keeps decoded labels, so that
    // vertexwise application does not decode repeatedly.
    class Worklist {
     public:
      explicit Worklist(CubeCodec const& codec)
          : _codec(codec), _set(codec.space_size()) {}

      bool add(CubeCode c) {
        if (!_set.insert(c)) {
          return false;
        }
        std::size_t const off = _flat.size();
        _flat.resize(off + _codec.vertices());
        _codec.decode(c, std::span<Elem>(_flat.data() + off, _codec.vertices()));
        return true;
      }

      std::size_t size() const noexcept { return _set.size(); }
      CubeCode    operator[](std::size_t i) const noexcept { return _set[i]; }
      bool contains(CubeCode c) const { return _set.contains(c); }
      Elem label(std::size_t i, std::size_t v) const noexcept {
        return _flat[i * _codec.vertices() + v];
      }
      std::vector<CubeCode> const& order() const noexcept {
        return _set.order();
      }
      void clear() {
        _set.clear();
        _flat.clear();
      }

     private:
      CubeCodec const&  _codec;
      CubeSet           _set;
      std::vector<Elem> _flat;
    };

    // Processes elements from index `start` on. For an element at index t
    // this adds its sym/refl images (if `unary`) and the vertexwise image
    // of every operation tuple whose largest index is t. Tuples made only
    // of elements below `start` are assumed to have been handled already.
    void saturate(FiniteAlgebra const& alg, CubeCodec const& codec,
                  Worklist& wl, std::size_t start, bool unary) {
      std::size_t const k = codec.shape().dimension();
      std::size_t const V = codec.vertices();
      std::vector<Elem> args, out(V);
      std::vector<std::size_t> idx;

      for (std::size_t t = start; t < wl.size(); ++t) {
        CubeCode const c = wl[t];
        if (unary) {
          for (std::size_t p = 0; p < k; ++p) {
            wl.add(codec.sym(c, p));
            wl.add(codec.refl(c, p, 0));
            wl.add(codec.refl(c, p, 1));
          }
        }
        for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
          std::size_t const m = alg.operation(op).arity;
          if (m == 0) {
            continue;
          }
          args.resize(m);
          idx.resize(m);
          // q is the first position holding t; earlier positions range
          // over [0, t), later ones over [0, t].
          for (std::size_t q = 0; q < m; ++q) {
            if (q > 0 && t == 0) {
              break;
            }
            std::fill(idx.begin(), idx.end(), 0);
            idx[q] = t;
            while (true) {
              for (std::size_t v = 0; v < V; ++v) {
                for (std::size_t j = 0; j < m; ++j) {
                  args[j] = wl.label(idx[j], v);
                }
                out[v] = alg.apply(op, args);
              }
              wl.add(codec.encode(out));
              // Advance the odometer over the free positions.
              std::size_t pos = m;
              bool        done = true;
              while (pos-- > 0) {
                if (pos == q) {
                  continue;
                }
                std::size_t const limit = pos < q ? t : t + 1;
                if (++idx[pos] < limit) {
                  done = false;
                  break;
                }
                idx[pos] = 0;
              }
              if (done) {
                break;
              }
            }
          }
        }
      }
    }

    void add_nullary_constants(FiniteAlgebra const& alg,
                               CubeCodec const& codec, Worklist& wl) {
      for (auto const& op : alg.operations()) {
        if (op.arity == 0) {
          wl.add(codec.constant(op.table[0]));
        }
      }
    }

    void check_carrier(FiniteAlgebra const& alg, CubeRelation const& r) {
      if (r.carrier() != alg.size()) {
        throw ValidationError("relation carrier size "
                              + std::to_string(r.carrier())
                              + " does not match the algebra size "
                              + std::to_string(alg.size()));
      }
    }

  }  // namespace

  CubeRelation close_sym_refl(CubeRelation const& r) {
    CubeCodec const&  codec = r.codec();
    std::size_t const k     = codec.shape().dimension();
    CubeSet           set(codec.space_size());
    for (CubeCode c : r.codes()) {
      set.insert(c);
    }
    for (std::size_t t = 0; t < set.size(); ++t) {
      CubeCode const c = set[t];
      for (std::size_t p = 0; p < k; ++p) {
        set.insert(codec.sym(c, p));
        set.insert(codec.refl(c, p, 0));
        set.insert(codec.refl(c, p, 1));
      }
    }
    return CubeRelation(codec, set.order());
  }

  CubeRelation close_under_ops(FiniteAlgebra const& alg, CubeRelation const& r,
                               ExecOptions const& opts) {
    check_carrier(alg, r);
    check_cube_space(r.codec(), opts);
    Worklist wl(r.codec());
    for (CubeCode c : r.codes()) {
      wl.add(c);
    }
    if (wl.size() > 0) {
      add_nullary_constants(alg, r.codec(), wl);
    }
    saturate(alg, r.codec(), wl, 0, true);
    return CubeRelation(r.codec(), wl.order());
  }

  CubeRelation dtc(CubeRelation const& r, Coord i, ExecOptions const& opts) {
    CubeCodec const&  codec = r.codec();
    std::size_t const p     = codec.shape().position(i);

    std::vector<std::pair<CubeCode, CubeCode>> edges;
    edges.reserve(r.size());
    for (CubeCode c : r.codes()) {
      edges.emplace_back(codec.face(c, p, 0), codec.face(c, p, 1));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Sources with the half-open range of their out-edges.
    std::vector<CubeCode>                             sources;
    std::unordered_map<CubeCode, std::pair<std::size_t, std::size_t>> out;
    for (std::size_t e = 0; e < edges.size();) {
      std::size_t f = e;
      while (f < edges.size() && edges[f].first == edges[e].first) {
        ++f;
      }
      sources.push_back(edges[e].first);
      out.emplace(edges[e].first, std::pair(e, f));
      e = f;
    }

    std::size_t const chunks = number_of_chunks(sources.size(), opts.threads);
    std::vector<std::vector<CubeCode>> found(chunks);
    parallel_chunks(
        sources.size(), opts.threads,
        [&](std::size_t begin, std::size_t end, std::size_t chunk) {
          std::vector<CubeCode>&       result = found[chunk];
          std::unordered_set<CubeCode> seen;
          std::vector<CubeCode>        stack;
          for (std::size_t s = begin; s < end; ++s) {
            seen.clear();
            stack.assign(1, sources[s]);
            while (!stack.empty()) {
              CubeCode u = stack.back();
              stack.pop_back();
              auto it = out.find(u);
              if (it == out.end()) {
                continue;
              }
              for (std::size_t e = it->second.first; e < it->second.second;
                   ++e) {
                CubeCode w = edges[e].second;
                if (seen.insert(w).second) {
                  result.push_back(codec.glue(sources[s], w, p));
                  stack.push_back(w);
                }
              }
            }
          }
        });

    std::vector<CubeCode> all = r.codes();
    for (auto const& part : found) {
      all.insert(all.end(), part.begin(), part.end());
    }
    return CubeRelation(codec, std::move(all));
  }

  CubeRelation tc(CubeRelation const& r, ExecOptions const& opts,
                  ClosurePhase* phase) {
    std::vector<Coord> order = opts.direction_order;
    if (order.empty()) {
      order = r.shape().coords();
    } else {
      auto sorted = order;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != r.shape().coords()) {
        throw ValidationError(
            "direction order must be a permutation of the cube coordinates");
      }
    }
    // Every round closes the same input in each direction and takes the
    // union, so round counts and sizes do not depend on the order.
    CubeRelation current = r;
    while (true) {
      std::vector<CubeCode> all = current.codes();
      for (Coord i : order) {
        CubeRelation const d = dtc(current, i, opts);
        all.insert(all.end(), d.codes().begin(), d.codes().end());
      }
      CubeRelation next(current.codec(), std::move(all));
      bool const   grew = next.size() != current.size();
      current           = std::move(next);
      if (phase != nullptr) {
        ++phase->rounds;
        phase->sizes.push_back(current.size());
      }
      if (!grew) {
        return current;
      }
    }
  }

  CubeRelation close_pol_k(FiniteAlgebra const& alg, CubeRelation const& r,
                           ExecOptions const& opts) {
    check_carrier(alg, r);
    if (r.empty()) {
      throw ValidationError(
          "polynomial closure needs a nonempty relation (the constants "
          "come from its labels)");
    }
    CubeCodec const&  codec = r.codec();
    std::size_t const k     = codec.shape().dimension();
    check_cube_space(codec, opts);

    std::vector<CubeCode> constants;
    for (Elem c : subalgebra_generated(alg, r.labels())) {
      constants.push_back(codec.constant(c));
    }

    Worklist                               poly(codec);
    std::unordered_map<CubeCode, uint32_t> where;
    // cover[e] lists the ids of computed closed sets containing element e;
    // ids are handed out in increasing order so each list stays sorted.
    std::vector<std::vector<std::uint32_t>> cover;
    auto add = [&](CubeCode c) -> std::uint32_t {
      auto [it, inserted] = where.emplace(c, std::uint32_t(poly.size()));
      if (inserted) {
        poly.add(c);
        cover.emplace_back();
      }
      return it->second;
    };
    for (CubeCode c : r.codes()) {
      add(c);
    }

    Worklist      sub(codec);
    std::uint32_t next_id  = 0;
    bool          complete = false;

    constexpr std::uint32_t none = ~std::uint32_t(0);
    auto in_set = [&](std::uint32_t x, std::uint32_t id) {
      return std::binary_search(cover[x].begin(), cover[x].end(), id);
    };

    // Id of a computed closed set containing xs, or none. `hint` covers
    // every element of xs but the last.
    auto covering = [&](std::vector<std::uint32_t> const& xs,
                        std::uint32_t                     hint) {
      if (hint != none && in_set(xs.back(), hint)) {
        return hint;
      }
      auto const* smallest = &cover[xs[0]];
      for (auto x : xs) {
        if (cover[x].size() < smallest->size()) {
          smallest = &cover[x];
        }
      }
      for (std::uint32_t id : *smallest) {
        if (std::all_of(xs.begin(), xs.end(),
                        [&](std::uint32_t x) { return in_set(x, id); })) {
          return id;
        }
      }
      return none;
    };

    // Returns (id, computed): the closed set containing xs, and whether it
    // is exactly the closure of xs.
    auto process = [&](std::vector<std::uint32_t> const& xs,
                       std::uint32_t hint) -> std::pair<std::uint32_t, bool> {
      if (auto id = covering(xs, hint); id != none) {
        return {id, false};
      }
      sub.clear();
      for (CubeCode c : constants) {
        sub.add(c);
      }
      std::size_t const start = sub.size();
      for (auto x : xs) {
        sub.add(poly[x]);
      }
      saturate(alg, codec, sub, start, false);
      std::uint32_t const id = next_id++;
      for (CubeCode c : sub.order()) {
        cover[add(c)].push_back(id);
      }
      complete = sub.size() == poly.size()
                 || poly.size() == codec.space_size();
      return {id, true};
    };

    // Subsets of at most k elements, largest index first. If the closure
    // C of xs was computed, extending xs by s in C changes nothing: any
    // xs + s + W has closure C(xs + W), a smaller subset handled elsewhere.
    std::vector<std::uint32_t> xs;
    auto enumerate = [&](auto&& self, std::uint32_t below,
                         std::uint32_t hint) -> void {
      if (complete) {
        return;
      }
      auto [id, computed] = process(xs, hint);
      if (xs.size() == k) {
        return;
      }
      for (std::uint32_t s = below; s-- > 0 && !complete;) {
        if (computed && in_set(s, id)) {
          continue;
        }
        xs.push_back(s);
        self(self, s, id);
        xs.pop_back();
      }
    };
    for (std::uint32_t t = 0; t < poly.size() && !complete; ++t) {
      xs.assign(1, t);
      enumerate(enumerate, t, none);
    }
    return CubeRelation(codec, poly.order());
  }

  ThetaResult theta(FiniteAlgebra const& alg, CubeRelation const& g,
                    Route route, ExecOptions const& opts) {
    check_carrier(alg, g);
    check_cube_space(g.codec(), opts);
    ThetaResult result{CubeRelation(g.carrier(), g.shape()), {}};
    result.report.route = route;

    CubeRelation sr = close_sym_refl(g);
    result.report.phases.push_back({"sym-refl", 1, {sr.size()}});

    CubeRelation tol = route == Route::basic_ops ? close_under_ops(alg, sr, opts)
                                                 : close_pol_k(alg, sr, opts);
    result.report.phases.push_back(
        {route == Route::basic_ops ? "ops" : "pol-k", 1, {tol.size()}});

    ClosurePhase phase{"tc", 0, {}};
    result.relation = tc(tol, opts, &phase);
    result.report.phases.push_back(std::move(phase));
    return result;
  }

  ////////////////////////////////////////////////////////////////////////
  // Predicates
  ////////////////////////////////////////////////////////////////////////

  namespace {
    CheckResult fail(CubeRelation const& r, CubeCode c, std::string reason) {
      return CheckResult{false, r.codec().cube(c), std::move(reason)};
    }
  }  // namespace

  CheckResult is_S_reflexive(CubeRelation const& r) {
    CubeCodec const& codec = r.codec();
    for (std::size_t p = 0; p < r.dimension(); ++p) {
      for (CubeCode c : r.codes()) {
        for (unsigned j = 0; j < 2; ++j) {
          CubeCode f = codec.face(c, p, j);
          if (!r.contains(codec.glue(f, f, p))) {
            return fail(r, c,
                        "faces in direction "
                            + std::to_string(r.shape().coords()[p])
                            + " are not quasireflexive");
          }
        }
      }
    }
    return {};
  }

  CheckResult is_S_symmetric(CubeRelation const& r) {
    CubeCodec const& codec = r.codec();
    for (std::size_t p = 0; p < r.dimension(); ++p) {
      for (CubeCode c : r.codes()) {
        if (!r.contains(codec.glue(codec.face(c, p, 1), codec.face(c, p, 0), p))) {
          return fail(r, c,
                      "faces in direction "
                          + std::to_string(r.shape().coords()[p])
                          + " are not symmetric");
        }
      }
    }
    return {};
  }

  CheckResult is_S_transitive(CubeRelation const& r) {
    CubeCodec const& codec = r.codec();
    for (std::size_t p = 0; p < r.dimension(); ++p) {
      std::unordered_map<CubeCode, std::vector<CubeCode>> succ;
      for (CubeCode c : r.codes()) {
        succ[codec.face(c, p, 0)].push_back(codec.face(c, p, 1));
      }
      for (CubeCode c : r.codes()) {
        CubeCode a  = codec.face(c, p, 0);
        auto     it = succ.find(codec.face(c, p, 1));
        if (it == succ.end()) {
          continue;
        }
        for (CubeCode z : it->second) {
          if (!r.contains(codec.glue(a, z, p))) {
            return fail(r, c,
                        "faces in direction "
                            + std::to_string(r.shape().coords()[p])
                            + " are not transitive");
          }
        }
      }
    }
    return {};
  }

  CheckResult is_compatible(FiniteAlgebra const& alg, CubeRelation const& r) {
    check_carrier(alg, r);
    CubeCodec const& codec = r.codec();
    if (r.empty()) {
      return {};
    }
    std::size_t const V = codec.vertices();
    std::vector<Elem> flat(r.size() * V);
    for (std::size_t e = 0; e < r.size(); ++e) {
      codec.decode(r.codes()[e], std::span<Elem>(flat.data() + e * V, V));
    }
    std::vector<Elem>        args, out(V);
    std::vector<std::size_t> idx;
    for (std::size_t op = 0; op < alg.number_of_operations(); ++op) {
      std::size_t const m = alg.operation(op).arity;
      if (m == 0) {
        CubeCode c = codec.constant(alg.operation(op).table[0]);
        if (!r.contains(c)) {
          return fail(r, c, "missing the constant cube of a nullary operation");
        }
        continue;
      }
      args.resize(m);
      idx.assign(m, 0);
      while (true) {
        for (std::size_t v = 0; v < V; ++v) {
          for (std::size_t j = 0; j < m; ++j) {
            args[j] = flat[idx[j] * V + v];
          }
          out[v] = alg.apply(op, args);
        }
        CubeCode c = codec.encode(out);
        if (!r.contains(c)) {
          return fail(r, c,
                      "operation '" + alg.operation(op).name
                          + "' leads outside the relation");
        }
        std::size_t pos = m;
        while (pos > 0 && ++idx[pos - 1] == r.size()) {
          idx[--pos] = 0;
        }
        if (pos == 0) {
          break;
        }
      }
    }
    return {};
  }

  CheckResult is_tolerance(FiniteAlgebra const& alg, CubeRelation const& r) {
    if (auto c = is_S_reflexive(r); !c) {
      return c;
    }
    if (auto c = is_S_symmetric(r); !c) {
      return c;
    }
    return is_compatible(alg, r);
  }

  CheckResult is_higher_congruence(FiniteAlgebra const& alg,
                                   CubeRelation const&  r) {
    if (auto c = is_tolerance(alg, r); !c) {
      return c;
    }
    return is_S_transitive(r);
  }

}  // namespace malcev
